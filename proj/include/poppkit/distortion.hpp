#pragma once

#include <string>
#include <vector>

#include "poppkit/popp.hpp"

namespace poppkit {

struct LayerSpectrum {
  std::vector<std::vector<double>> by_layer;  // eigenvalues of g_s^{-1} h_s
  std::vector<double> all;                    // concatenated, sorted
};

/// Per-layer eigenvalues of the distortion matrix. Both extensions must be
/// built in the same adapted frame at the same point (GeometryError).
LayerSpectrum distortion_eigenvalues(const PoppExtension& g, const PoppExtension& h);

/// H^2 = lambda_max^k / prod(lambda) for the pencil eigenvalues.
double horizontal_distortion(const std::vector<double>& lambda);
double horizontal_distortion(const RealMatrix& g, const RealMatrix& h);

/// K^2 = lambda_max^Q / det(gbar^{-1} hbar).
double popp_distortion(const std::vector<double>& lambda, double det_full,
                       std::size_t homogeneous_dimension);

/// Named inequality a <= b. slack = (b - a) / max(|a|, |b|); the check
/// passes when slack >= -tol.
struct BoundCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool passed = false;
};

/// Named agreement a == b within relative tolerance.
struct EqualityCheck {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double difference = 0.0;  // relative
  bool passed = false;
};

EqualityCheck make_equality(std::string name, double lhs, double rhs, double tol);

struct BoundFlags {
  std::vector<BoundCheck> checks;
  bool all_passed() const;
  double worst_slack() const;
};

struct DistortionReport {
  std::vector<double> lambda;
  std::vector<double> mu;
  std::vector<std::vector<double>> mu_by_layer;
  double H2 = 0.0;
  double K2 = 0.0;
  double det_full = 0.0;
  std::size_t Q = 0;
  std::size_t k = 0;
  std::vector<std::size_t> weights;
  BoundFlags bounds;
};

/// Builds both Popp extensions in `frame` and fills every field except
/// `bounds`. Metrics are in the frame's horizontal basis; a degenerate
/// `h` is rejected with NumericalError before any eigensolve.
DistortionReport analyze_distortion(const AdaptedFrame& frame, const StructureConstants& constants,
                                    const RationalMatrix& g, const RationalMatrix& h);

/// Same from ready-made extensions.
DistortionReport analyze_distortion(const PoppExtension& g, const PoppExtension& h);

/// lambda_1^s <= mu <= lambda_k^s per layer, the determinant sandwich and
/// H^2 <= K^2 <= (H^2)^{Q-1}.
BoundFlags verify_bounds(const DistortionReport& report, double tol = kDefaultTolerance);

/// lambda_1 lambda_2 <= mu <= lambda_{k-1} lambda_k for layer-2 eigenvalues.
/// Throws InputError unless the report has step 2.
BoundFlags step2_refined_bounds(const DistortionReport& report, double tol = kDefaultTolerance);

BoundCheck make_bound(std::string name, double lhs, double rhs, double tol);

}  // namespace poppkit

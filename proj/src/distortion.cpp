#include "poppkit/distortion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "poppkit/linalg.hpp"

namespace poppkit {

LayerSpectrum distortion_eigenvalues(const PoppExtension& g, const PoppExtension& h) {
  if (g.layer_bounds != h.layer_bounds || g.point != h.point || !(g.frame_matrix == h.frame_matrix)) {
    throw GeometryError("distortion: Popp extensions built in different frames or points");
  }
  LayerSpectrum spec;
  for (std::size_t s = 0; s < g.blocks.size(); ++s) {
    spec.by_layer.push_back(generalized_eigenvalues(g.blocks[s], h.blocks[s]));
    spec.all.insert(spec.all.end(), spec.by_layer.back().begin(), spec.by_layer.back().end());
  }
  std::sort(spec.all.begin(), spec.all.end());
  return spec;
}

double horizontal_distortion(const std::vector<double>& lambda) {
  if (lambda.empty()) throw std::invalid_argument("horizontal_distortion: no eigenvalues");
  // Ratio form avoids overflow: prod(lambda_max / lambda_i).
  double h2 = 1.0;
  const double top = lambda.back();
  for (double l : lambda) h2 *= top / l;
  return h2;
}

double horizontal_distortion(const RealMatrix& g, const RealMatrix& h) {
  return horizontal_distortion(generalized_eigenvalues(g, h));
}

double popp_distortion(const std::vector<double>& lambda, double det_full,
                       std::size_t homogeneous_dimension) {
  if (lambda.empty()) throw std::invalid_argument("popp_distortion: no eigenvalues");
  return std::pow(lambda.back(), static_cast<double>(homogeneous_dimension)) / det_full;
}

bool BoundFlags::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.passed; });
}

double BoundFlags::worst_slack() const {
  double w = std::numeric_limits<double>::infinity();
  for (const auto& c : checks) w = std::min(w, c.slack);
  return w;
}

BoundCheck make_bound(std::string name, double lhs, double rhs, double tol) {
  BoundCheck c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
  c.slack = (rhs - lhs) / scale;
  c.passed = c.slack >= -tol;
  return c;
}

EqualityCheck make_equality(std::string name, double lhs, double rhs, double tol) {
  EqualityCheck c;
  c.name = std::move(name);
  c.lhs = lhs;
  c.rhs = rhs;
  c.difference = relative_difference(lhs, rhs);
  c.passed = c.difference <= tol;
  return c;
}

DistortionReport analyze_distortion(const PoppExtension& g, const PoppExtension& h) {
  DistortionReport r;
  const LayerSpectrum spectrum = distortion_eigenvalues(g, h);
  r.lambda = spectrum.by_layer.front();
  r.mu = spectrum.all;
  r.mu_by_layer = spectrum.by_layer;
  r.k = g.layer_bounds.at(1);
  for (std::size_t s = 1; s < g.layer_bounds.size(); ++s) {
    for (std::size_t i = g.layer_bounds[s - 1]; i < g.layer_bounds[s]; ++i) {
      r.weights.push_back(s);
      r.Q += s;
    }
  }
  const Rational det_ratio = h.determinant() / g.determinant();
  r.det_full = det_ratio.get_d();
  r.H2 = horizontal_distortion(r.lambda);
  r.K2 = popp_distortion(r.lambda, r.det_full, r.Q);
  return r;
}

DistortionReport analyze_distortion(const AdaptedFrame& frame, const StructureConstants& constants,
                                    const RationalMatrix& g, const RationalMatrix& h) {
  if (!is_positive_definite(h)) {
    throw NumericalError("distortion: second metric is not positive definite at " +
                         to_string(frame.point));
  }
  return analyze_distortion(popp_extension(frame, constants, g),
                            popp_extension(frame, constants, h));
}

BoundFlags verify_bounds(const DistortionReport& r, double tol) {
  BoundFlags flags;
  const double l1 = r.lambda.front();
  const double lk = r.lambda.back();
  for (std::size_t s = 1; s <= r.mu_by_layer.size(); ++s) {
    const auto& mus = r.mu_by_layer[s - 1];
    const double e = static_cast<double>(s);
    const std::string tag = "layer" + std::to_string(s);
    flags.checks.push_back(make_bound(tag + ".lower", std::pow(l1, e), mus.front(), tol));
    flags.checks.push_back(make_bound(tag + ".upper", mus.back(), std::pow(lk, e), tol));
  }
  const double q = static_cast<double>(r.Q);
  flags.checks.push_back(
      make_bound("det.lower", std::pow(l1, q - 1.0) * lk, r.det_full, tol));
  flags.checks.push_back(
      make_bound("det.upper", r.det_full, l1 * std::pow(lk, q - 1.0), tol));
  flags.checks.push_back(make_bound("distortion.lower", r.H2, r.K2, tol));
  flags.checks.push_back(make_bound("distortion.upper", r.K2, std::pow(r.H2, q - 1.0), tol));
  return flags;
}

BoundFlags step2_refined_bounds(const DistortionReport& r, double tol) {
  if (r.mu_by_layer.size() != 2) {
    throw InputError("step-2 refinement requires step 2, got step " +
                     std::to_string(r.mu_by_layer.size()));
  }
  if (r.lambda.size() < 2) throw InputError("step-2 refinement requires rank >= 2");
  const std::size_t k = r.lambda.size();
  const auto& mus = r.mu_by_layer[1];
  BoundFlags flags;
  flags.checks.push_back(
      make_bound("step2.lower", r.lambda[0] * r.lambda[1], mus.front(), tol));
  flags.checks.push_back(
      make_bound("step2.upper", mus.back(), r.lambda[k - 2] * r.lambda[k - 1], tol));
  return flags;
}

}  // namespace poppkit

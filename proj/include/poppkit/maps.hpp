#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "poppkit/distortion.hpp"

namespace poppkit {

/// Polynomial map between two chart-level subRiemannian structures.
struct MapSpec {
  std::string name;
  std::shared_ptr<const ManifoldSpec> source;
  std::shared_ptr<const ManifoldSpec> target;
  std::vector<Polynomial> components;  // one per target coordinate, in source variables
  PolynomialMatrix jacobian;           // n_target x n_source
  std::vector<Point> sample_points;    // defaults to the source sample points

  Point image(const Point& p) const;
  RationalMatrix jacobian_at(const Point& p) const;
};

MapSpec make_map(std::string name, std::shared_ptr<const ManifoldSpec> source,
                 std::shared_ptr<const ManifoldSpec> target,
                 std::vector<Polynomial> components, std::vector<Point> sample_points = {});

MapSpec make_map(std::string name, std::shared_ptr<const ManifoldSpec> source,
                 std::shared_ptr<const ManifoldSpec> target,
                 const std::vector<std::string>& components);

/// outer ∘ inner. The sample points are those of `inner`.
MapSpec compose(const MapSpec& outer, const MapSpec& inner);

/// Jacobian(p) * X(p), a tangent vector at the image point.
std::vector<Rational> pushforward(const MapSpec& map, const VectorField& x, const Point& p);

struct ContactDefect {
  Point image;
  /// Column i: f_* X_i expressed in the target adapted frame at the image.
  RationalMatrix coefficients;
  std::size_t target_rank = 0;
  /// max_i Euclidean norm of the coefficients of weight > 1.
  double defect = 0.0;
  bool contact = false;
};

/// `contact_tolerance` = 0 requires the weight > 1 coefficients to vanish
/// exactly; a positive value accepts defect <= tolerance.
ContactDefect contact_defect(const MapSpec& map, const Point& p, double contact_tolerance = 0.0);

/// (f*h)_ij = h(f_* X_i, f_* X_j) in the source generator basis. Throws
/// GeometryError at non-contact points or when the pullback is not SPD.
RationalMatrix pullback_metric(const MapSpec& map, const Point& p, double contact_tolerance = 0.0);

struct QRReport {
  Point point;
  std::vector<double> lambda;  // eigenvalues of g^{-1} f*h
  double Df_norm = 0.0;        // sqrt(lambda_max)
  double Df_min = 0.0;         // sqrt(lambda_min)
  double H = 0.0;              // sqrt(H^2(g, f*h))
  double K_popp = 0.0;         // sqrt(K^2(gbar, overline{f*h}))
  double K_analytic_bound = 0.0;  // ||Df||^Q / J_f
  double J_f = 0.0;               // det(gbar^{-1} overline{f*h})^{1/2}
  double contact_defect = 0.0;
  std::size_t Q = 0;
  std::size_t k = 0;
  DistortionReport distortion;
  /// Pointwise consequences of the distortion bounds.
  BoundFlags theorem_checks;
};

QRReport qr_constants(const MapSpec& map, const Point& p, double contact_tolerance = 0.0,
                      double tol = kDefaultTolerance);

/// Sample maxima of the pointwise constants and the constant relations
/// between them.
struct TheoremRelations {
  double H_star = 0.0;  // max ||Df|| / ||Df||_s
  double K_a = 0.0;     // max K_analytic_bound
  double H_hat = 0.0;   // max H
  double K_hat = 0.0;   // max K_popp
  BoundFlags checks;
};

TheoremRelations check_theorem_relations(std::span<const QRReport> reports, std::size_t Q,
                                         std::size_t k, double tol = kDefaultTolerance);

struct PullbackCheck {
  double target_density = 0.0;        // Popp density of h at f(p)
  double jacobian_determinant = 0.0;  // |det Df(p)| in coordinates
  double pulled_back_density = 0.0;   // target_density * |det Df|
  double source_density = 0.0;        // Popp density of f*h at p
  double slack = 0.0;                 // relative difference
};

/// Compares the densities of f*P_h and P_{f*h}. Throws GeometryError when the
/// coordinate Jacobian is singular or the dimensions differ.
PullbackCheck popp_pullback_check(const MapSpec& map, const Point& p,
                                  double contact_tolerance = 0.0);

/// n when the manifold is the standard Heisenberg group H^n: dimension 2n+1,
/// identity metric, [X_j, X_{j+n}] = -4 d/dt on the last coordinate and all
/// other generator brackets zero.
std::optional<std::size_t> heisenberg_index(const ManifoldSpec& spec);

struct DairbekovReport {
  std::size_t n = 0;
  double HJ = 0.0;           // |det D_H f| in the standard frame
  double J = 0.0;            // HJ^{(n+1)/n}
  double J_f = 0.0;          // Popp pipeline
  double K_dairbekov = 0.0;  // ||D_H f||^Q / J
  double K_horizontal = 0.0; // H
  std::vector<EqualityCheck> relations;
  bool all_passed() const;
};

/// Throws InputError when source or target is not a standard Heisenberg
/// group.
DairbekovReport heisenberg_dairbekov(const MapSpec& map, const Point& p,
                                     double tol = kDefaultTolerance);

}  // namespace poppkit

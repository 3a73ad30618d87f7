#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "poppkit/error.hpp"
#include "poppkit/matrix.hpp"
#include "poppkit/polynomial.hpp"

namespace poppkit {

/// Polynomial vector field in the chart coordinates together with the
/// bracket word it was built from ("X1", "[X1,X2]", ...).
struct VectorField {
  std::vector<Polynomial> components;
  std::string word;

  std::size_t dimension() const { return components.size(); }
  bool is_zero() const;
  std::vector<Rational> at(std::span<const Rational> point) const;

  friend bool same_components(const VectorField& a, const VectorField& b) {
    return a.components == b.components;
  }
};

/// [X,Y]^i = sum_j X^j d_j Y^i - Y^j d_j X^i.
VectorField lie_bracket(const VectorField& x, const VectorField& y);

/// sum_j coeffs[j] * fields[j], with the given word.
VectorField linear_combination(std::span<const Rational> coeffs,
                               std::span<const VectorField> fields, std::string word);

/// Matrix whose columns are the field values at `point`.
RationalMatrix value_matrix(std::span<const VectorField> fields, std::span<const Rational> point);

/// A subRiemannian structure on a coordinate chart: a horizontal frame of
/// polynomial vector fields and a horizontal metric expressed in that frame.
struct ManifoldSpec {
  std::string name;
  std::vector<std::string> coordinates;
  std::vector<VectorField> frame;
  PolynomialMatrix metric;  // k x k; entries are g(X_i, X_j)
  std::vector<Point> sample_points;

  std::size_t dimension() const { return coordinates.size(); }
  std::size_t rank() const { return frame.size(); }

  RationalMatrix metric_at(std::span<const Rational> point) const;

  /// Checks sizes, metric symmetry and positive definiteness at every
  /// sample point. Throws InputError naming the manifold.
  void validate() const;
};

/// Builds a spec from textual polynomials. The metric defaults to identity
/// when `metric` is empty.
ManifoldSpec make_manifold(std::string name, std::vector<std::string> coordinates,
                           const std::vector<std::vector<std::string>>& frame,
                           const std::vector<std::vector<std::string>>& metric = {},
                           const std::vector<std::vector<std::string>>& points = {});

/// Flag of distributions D^1 ⊂ D^2 ⊂ ... at a point.
struct FlagReport {
  Point point;
  std::vector<std::size_t> ranks;   // k_s, s = 1..m
  std::vector<std::size_t> growth;  // n_s = k_s - k_{s-1}
  std::size_t step = 0;
  std::vector<std::size_t> weights;  // w_i, i = 1..n
  std::size_t homogeneous_dimension = 0;
  /// Fields whose values span T_pM layer by layer; positions
  /// k_{s-1}..k_s-1 belong to layer s.
  std::vector<VectorField> bracket_basis;

  std::vector<std::string> bracket_words() const;
  /// k_0 = 0, k_1, ..., k_m.
  std::vector<std::size_t> layer_bounds() const;
};

inline constexpr std::size_t kDefaultMaxStep = 8;

/// Computes ranks by iterated left-nested brackets of the generators,
/// admitting bracket-basis fields greedily in lexicographic word order.
/// Throws GeometryError if the brackets do not span T_pM within `max_step`.
FlagReport compute_flag(const ManifoldSpec& spec, const Point& point,
                        std::size_t max_step = kDefaultMaxStep);

struct EquiregularityReport {
  bool equiregular = false;
  std::vector<FlagReport> flags;
};

/// Sampled certification: equiregular iff every sample point yields the
/// same rank sequence.
EquiregularityReport check_equiregular(const ManifoldSpec& spec,
                                       std::size_t max_step = kDefaultMaxStep);

}  // namespace poppkit

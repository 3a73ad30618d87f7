#pragma once

#include <vector>

#include "poppkit/adapted.hpp"
#include "poppkit/error.hpp"

namespace poppkit {

/// Block-diagonal extension g_1 = g, g_2, ..., g_m of a horizontal metric,
/// expressed in one adapted frame at one point.
struct PoppExtension {
  Point point;
  std::vector<std::size_t> layer_bounds;
  RationalMatrix frame_matrix;  // identifies the adapted frame
  std::vector<RationalMatrix> exact_blocks;
  std::vector<RealMatrix> blocks;

  std::size_t num_layers() const { return blocks.size(); }
  /// The full n x n block-diagonal matrix.
  RationalMatrix full_exact() const;
  Rational determinant() const;
};

/// Inverse blocks (g_s^{-1})^{ab} = b^a_I (g^{-1})^{⊗s}_{IJ} b^b_J, then
/// inverted exactly. `horizontal_metric` is expressed in the frame's
/// horizontal basis. Throws GeometryError on a singular inverse block.
PoppExtension popp_extension(const AdaptedFrame& frame, const StructureConstants& constants,
                             const RationalMatrix& horizontal_metric);

/// As above with the manifold metric (generator basis) evaluated at the frame
/// point.
PoppExtension popp_extension(const ManifoldSpec& spec, const AdaptedFrame& frame,
                             const StructureConstants& constants);

/// Density of the Popp volume against chart Lebesgue measure:
/// 1 / |det| of the frame orthonormalized block-wise by Cholesky.
double popp_density(const AdaptedFrame& frame, const PoppExtension& extension);

/// Builds flag, adapted frame and extension at `point` using `metric`
/// (generator basis) or the manifold metric when none is given.
double popp_density(const ManifoldSpec& spec, const Point& point);
double popp_density(const ManifoldSpec& spec, const Point& point,
                    const RationalMatrix& generator_metric);

struct FrameLawReport {
  /// transform(i, j): frame B field i = sum_j transform(i, j) * frame A field j.
  RationalMatrix transform;
  bool lower_block_triangular = false;
  /// max over layers of the relative Frobenius residual of
  /// g_s(B) - T_s g_s(A) T_s^T.
  double block_law_residual = 0.0;
  double density_a = 0.0;
  double density_b = 0.0;
  double density_difference = 0.0;  // relative
  bool holds = false;
};

/// Checks the change-of-adapted-frame law and equality of Popp densities.
/// Throws GeometryError if the frames do not share layer bounds and point.
FrameLawReport verify_frame_law(const ManifoldSpec& spec, const AdaptedFrame& a,
                                const AdaptedFrame& b, double tol = kDefaultTolerance);

}  // namespace poppkit

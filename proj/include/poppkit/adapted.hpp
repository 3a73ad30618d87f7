#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "poppkit/manifold.hpp"

namespace poppkit {

/// Frame (X_1..X_n) at a point whose consecutive blocks
/// [k_{s-1}, k_s) project to bases of D^s / D^{s-1}.
struct AdaptedFrame {
  Point point;
  std::vector<VectorField> fields;
  RationalMatrix frame_matrix;    // column j = fields[j] at point
  RationalMatrix coframe_matrix;  // inverse; row a = dual covector omega^a
  std::vector<std::size_t> layer_bounds;  // 0 = k_0 < k_1 < ... < k_m = n
  /// fields[i] = sum_j horizontal_mix(i, j) * generator_j for i < k.
  RationalMatrix horizontal_mix;

  std::size_t dimension() const { return fields.size(); }
  std::size_t rank() const { return layer_bounds.at(1); }
  std::size_t step() const { return layer_bounds.size() - 1; }
  /// 1-based layer of the field at `index`.
  std::size_t layer_of(std::size_t index) const;

  /// Horizontal metric in this frame's horizontal basis, given the metric
  /// in the generator basis: mix * g * mix^T.
  RationalMatrix horizontal_metric(const RationalMatrix& generator_metric) const;
};

/// Generators followed by the flag's bracket basis in layers >= 2.
/// Throws GeometryError if the generators are dependent at the point.
AdaptedFrame build_adapted_frame(const ManifoldSpec& spec, const FlagReport& flag);

/// New frame Y with Y_i = sum_j transform(i, j) X_j. The transform must be
/// block lower triangular for the layer bounds with invertible diagonal
/// blocks, otherwise InputError.
AdaptedFrame change_frame(const AdaptedFrame& frame, const RationalMatrix& transform);

/// Random block-lower-triangular transform with rational entries p/q in
/// [-3, 3], q in {1, 2, 3}, and invertible diagonal blocks.
RationalMatrix random_adapted_transform(std::span<const std::size_t> layer_bounds,
                                        std::mt19937_64& rng);

/// Adapted structure constants b^a_{i_1...i_s} = omega^a([X_i1,[...,X_is]]).
class StructureConstants {
 public:
  struct Layer {
    std::size_t layer = 0;  // s >= 2
    std::size_t first = 0;  // k_{s-1}
    /// Row a - first, column = base-k encoding of (i_1, ..., i_s) with i_1
    /// most significant.
    RationalMatrix values;
  };

  StructureConstants() = default;
  StructureConstants(std::size_t rank, std::vector<Layer> layers)
      : rank_(rank), layers_(std::move(layers)) {}

  std::size_t rank() const { return rank_; }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& mutable_layers() { return layers_; }

  /// 0-based alpha and indices; the layer is indices.size().
  const Rational& operator()(std::size_t alpha, std::span<const std::size_t> indices) const;

  static std::size_t encode(std::span<const std::size_t> indices, std::size_t rank);

 private:
  std::size_t rank_ = 0;
  std::vector<Layer> layers_;
};

/// Left-nested brackets [X_i1,[X_i2,...,X_is]] of the frame's horizontal
/// fields for every tuple, in encode() order.
std::vector<VectorField> nested_brackets(const AdaptedFrame& frame, std::size_t length);

StructureConstants structure_constants(const AdaptedFrame& frame);

}  // namespace poppkit

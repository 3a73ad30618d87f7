#include "poppkit/adapted.hpp"

#include "poppkit/linalg.hpp"

namespace poppkit {

std::size_t AdaptedFrame::layer_of(std::size_t index) const {
  for (std::size_t s = 1; s < layer_bounds.size(); ++s)
    if (index < layer_bounds[s]) return s;
  throw std::out_of_range("layer_of: index out of range");
}

RationalMatrix AdaptedFrame::horizontal_metric(const RationalMatrix& generator_metric) const {
  return horizontal_mix * generator_metric * horizontal_mix.transpose();
}

AdaptedFrame build_adapted_frame(const ManifoldSpec& spec, const FlagReport& flag) {
  const std::size_t k = spec.rank();
  if (flag.ranks.empty() || flag.ranks.front() != k) {
    throw GeometryError("manifold '" + spec.name + "': horizontal generators are dependent at " +
                        to_string(flag.point) + "; no adapted frame");
  }
  AdaptedFrame frame;
  frame.point = flag.point;
  frame.fields = spec.frame;
  frame.fields.insert(frame.fields.end(), flag.bracket_basis.begin() + static_cast<long>(k),
                      flag.bracket_basis.end());
  frame.layer_bounds = flag.layer_bounds();
  frame.frame_matrix = value_matrix(frame.fields, frame.point);
  try {
    frame.coframe_matrix = inverse(frame.frame_matrix);
  } catch (const NumericalError&) {
    throw GeometryError("manifold '" + spec.name + "': singular adapted frame at " +
                        to_string(flag.point));
  }
  frame.horizontal_mix = RationalMatrix::identity(k);
  return frame;
}

AdaptedFrame change_frame(const AdaptedFrame& frame, const RationalMatrix& transform) {
  const std::size_t n = frame.dimension();
  if (transform.rows() != n || transform.cols() != n) {
    throw InputError("change_frame: transform has wrong size");
  }
  const auto& b = frame.layer_bounds;
  for (std::size_t s = 1; s < b.size(); ++s) {
    for (std::size_t i = b[s - 1]; i < b[s]; ++i)
      for (std::size_t j = b[s]; j < n; ++j)
        if (transform(i, j) != 0) {
          throw InputError("change_frame: transform is not block lower triangular");
        }
    const std::size_t size = b[s] - b[s - 1];
    if (determinant(transform.block(b[s - 1], b[s - 1], size, size)) == 0) {
      throw InputError("change_frame: singular diagonal block in layer " + std::to_string(s));
    }
  }
  AdaptedFrame out;
  out.point = frame.point;
  out.layer_bounds = frame.layer_bounds;
  for (std::size_t i = 0; i < n; ++i) {
    out.fields.push_back(linear_combination(transform.row(i), frame.fields, "Y" + std::to_string(i + 1)));
  }
  out.frame_matrix = frame.frame_matrix * transform.transpose();
  out.coframe_matrix = inverse(out.frame_matrix);
  const std::size_t k = frame.rank();
  out.horizontal_mix = transform.block(0, 0, k, k) * frame.horizontal_mix;
  return out;
}

RationalMatrix random_adapted_transform(std::span<const std::size_t> layer_bounds,
                                        std::mt19937_64& rng) {
  const std::size_t n = layer_bounds.back();
  std::uniform_int_distribution<int> den_dist(1, 3);
  auto draw = [&] {
    const int q = den_dist(rng);
    std::uniform_int_distribution<int> num_dist(-3 * q, 3 * q);
    return make_rational(num_dist(rng), q);
  };
  RationalMatrix t(n, n);
  for (std::size_t s = 1; s < layer_bounds.size(); ++s) {
    const std::size_t lo = layer_bounds[s - 1];
    const std::size_t hi = layer_bounds[s];
    for (std::size_t i = lo; i < hi; ++i)
      for (std::size_t j = 0; j < lo; ++j) t(i, j) = draw();
    RationalMatrix diag(hi - lo, hi - lo);
    do {
      for (std::size_t i = 0; i < diag.rows(); ++i)
        for (std::size_t j = 0; j < diag.cols(); ++j) diag(i, j) = draw();
    } while (determinant(diag) == 0);
    t.set_block(lo, lo, diag);
  }
  return t;
}

std::size_t StructureConstants::encode(std::span<const std::size_t> indices, std::size_t rank) {
  std::size_t code = 0;
  for (std::size_t i : indices) code = code * rank + i;
  return code;
}

const Rational& StructureConstants::operator()(std::size_t alpha,
                                               std::span<const std::size_t> indices) const {
  for (const auto& l : layers_) {
    if (l.layer != indices.size()) continue;
    if (alpha < l.first || alpha >= l.first + l.values.rows()) {
      throw std::out_of_range("structure constant: alpha outside layer");
    }
    return l.values(alpha - l.first, encode(indices, rank_));
  }
  throw std::out_of_range("structure constant: no such layer");
}

namespace {

std::vector<VectorField> extend_brackets(const AdaptedFrame& frame,
                                         const std::vector<VectorField>& previous) {
  const std::size_t k = frame.rank();
  std::vector<VectorField> next;
  next.reserve(previous.size() * k);
  for (std::size_t i = 0; i < k; ++i)
    for (const auto& z : previous) next.push_back(lie_bracket(frame.fields[i], z));
  return next;
}

}  // namespace

std::vector<VectorField> nested_brackets(const AdaptedFrame& frame, std::size_t length) {
  if (length == 0) throw std::invalid_argument("nested_brackets: zero length");
  std::vector<VectorField> level(frame.fields.begin(),
                                 frame.fields.begin() + static_cast<long>(frame.rank()));
  for (std::size_t l = 2; l <= length; ++l) level = extend_brackets(frame, level);
  return level;
}

StructureConstants structure_constants(const AdaptedFrame& frame) {
  const std::size_t k = frame.rank();
  std::vector<StructureConstants::Layer> layers;
  std::vector<VectorField> level(frame.fields.begin(), frame.fields.begin() + static_cast<long>(k));
  for (std::size_t s = 2; s <= frame.step(); ++s) {
    level = extend_brackets(frame, level);
    const std::size_t first = frame.layer_bounds[s - 1];
    const std::size_t count = frame.layer_bounds[s] - first;
    StructureConstants::Layer layer{s, first, RationalMatrix(count, level.size())};
    for (std::size_t t = 0; t < level.size(); ++t) {
      const auto v = level[t].at(frame.point);
      for (std::size_t a = 0; a < count; ++a) {
        Rational sum = 0;
        for (std::size_t j = 0; j < v.size(); ++j) sum += frame.coframe_matrix(first + a, j) * v[j];
        layer.values(a, t) = sum;
      }
    }
    layers.push_back(std::move(layer));
  }
  return StructureConstants(k, std::move(layers));
}

}  // namespace poppkit

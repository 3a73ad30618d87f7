#include "poppkit/popp.hpp"

#include <algorithm>
#include <cmath>

#include "poppkit/linalg.hpp"

namespace poppkit {

RationalMatrix PoppExtension::full_exact() const {
  const std::size_t n = layer_bounds.back();
  RationalMatrix m(n, n);
  for (std::size_t s = 0; s < exact_blocks.size(); ++s) {
    m.set_block(layer_bounds[s], layer_bounds[s], exact_blocks[s]);
  }
  return m;
}

Rational PoppExtension::determinant() const {
  Rational d = 1;
  for (const auto& b : exact_blocks) d *= poppkit::determinant(b);
  return d;
}

namespace {

// Applies `m` along every mode of each row tensor (k^s entries per row).
RationalMatrix contract_all_modes(const RationalMatrix& rows, const RationalMatrix& m,
                                  std::size_t s) {
  const std::size_t k = m.rows();
  const std::size_t size = rows.cols();
  RationalMatrix out = rows;
  std::vector<Rational> next(size);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto t = out.row(r);
    std::size_t stride = size;
    for (std::size_t mode = 0; mode < s; ++mode) {
      stride /= k;
      for (std::size_t idx = 0; idx < size; ++idx) {
        const std::size_t digit = (idx / stride) % k;
        const std::size_t base = idx - digit * stride;
        Rational acc = 0;
        for (std::size_t j = 0; j < k; ++j) {
          if (m(digit, j) != 0) acc += m(digit, j) * t[base + j * stride];
        }
        next[idx] = acc;
      }
      std::copy(next.begin(), next.end(), t.begin());
    }
  }
  return out;
}

}  // namespace

PoppExtension popp_extension(const AdaptedFrame& frame, const StructureConstants& constants,
                             const RationalMatrix& horizontal_metric) {
  const std::size_t k = frame.rank();
  if (horizontal_metric.rows() != k || horizontal_metric.cols() != k) {
    throw InputError("popp_extension: horizontal metric has wrong size");
  }
  if (!is_positive_definite(horizontal_metric)) {
    throw NumericalError("popp_extension: horizontal metric is not positive definite at " +
                         to_string(frame.point));
  }
  PoppExtension ext;
  ext.point = frame.point;
  ext.layer_bounds = frame.layer_bounds;
  ext.frame_matrix = frame.frame_matrix;
  ext.exact_blocks.push_back(horizontal_metric);
  const RationalMatrix metric_inverse = inverse(horizontal_metric);
  for (const auto& layer : constants.layers()) {
    const RationalMatrix raised = contract_all_modes(layer.values, metric_inverse, layer.layer);
    const RationalMatrix inverse_block = layer.values * raised.transpose();
    try {
      ext.exact_blocks.push_back(inverse(inverse_block));
    } catch (const NumericalError&) {
      throw GeometryError("popp_extension: singular block in layer " +
                          std::to_string(layer.layer) + " at " + to_string(frame.point) +
                          " (frame not adapted)");
    }
  }
  for (const auto& b : ext.exact_blocks) ext.blocks.push_back(to_real(b));
  return ext;
}

PoppExtension popp_extension(const ManifoldSpec& spec, const AdaptedFrame& frame,
                             const StructureConstants& constants) {
  return popp_extension(frame, constants, frame.horizontal_metric(spec.metric_at(frame.point)));
}

double popp_density(const AdaptedFrame& frame, const PoppExtension& extension) {
  const std::size_t n = frame.dimension();
  RealMatrix scale(n, n);
  for (std::size_t s = 0; s < extension.blocks.size(); ++s) {
    const RealMatrix l = cholesky(extension.blocks[s]);
    scale.set_block(extension.layer_bounds[s], extension.layer_bounds[s],
                    inverse(l).transpose());
  }
  const RealMatrix orthonormal = to_real(frame.frame_matrix) * scale;
  return 1.0 / std::abs(determinant(orthonormal));
}

double popp_density(const ManifoldSpec& spec, const Point& point,
                    const RationalMatrix& generator_metric) {
  const FlagReport flag = compute_flag(spec, point);
  const AdaptedFrame frame = build_adapted_frame(spec, flag);
  const StructureConstants b = structure_constants(frame);
  const PoppExtension ext =
      popp_extension(frame, b, frame.horizontal_metric(generator_metric));
  return popp_density(frame, ext);
}

double popp_density(const ManifoldSpec& spec, const Point& point) {
  return popp_density(spec, point, spec.metric_at(point));
}

namespace {

double frobenius(const RationalMatrix& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const double v = m(i, j).get_d();
      s += v * v;
    }
  return std::sqrt(s);
}

}  // namespace

FrameLawReport verify_frame_law(const ManifoldSpec& spec, const AdaptedFrame& a,
                                const AdaptedFrame& b, double tol) {
  if (a.layer_bounds != b.layer_bounds || a.point != b.point) {
    throw GeometryError("manifold '" + spec.name +
                        "': frames are not adapted to the same flag at the same point");
  }
  FrameLawReport r;
  r.transform = (a.coframe_matrix * b.frame_matrix).transpose();
  const auto& bounds = a.layer_bounds;
  const std::size_t n = a.dimension();
  r.lower_block_triangular = true;
  for (std::size_t s = 1; s < bounds.size(); ++s)
    for (std::size_t i = bounds[s - 1]; i < bounds[s]; ++i)
      for (std::size_t j = bounds[s]; j < n; ++j)
        if (r.transform(i, j) != 0) r.lower_block_triangular = false;

  const PoppExtension ga = popp_extension(spec, a, structure_constants(a));
  const PoppExtension gb = popp_extension(spec, b, structure_constants(b));
  for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
    const std::size_t size = bounds[s + 1] - bounds[s];
    const RationalMatrix ts = r.transform.block(bounds[s], bounds[s], size, size);
    const RationalMatrix predicted = ts * ga.exact_blocks[s] * ts.transpose();
    const double denom = std::max(frobenius(gb.exact_blocks[s]), 1e-300);
    r.block_law_residual =
        std::max(r.block_law_residual, frobenius(gb.exact_blocks[s] - predicted) / denom);
  }
  r.density_a = popp_density(a, ga);
  r.density_b = popp_density(b, gb);
  r.density_difference = relative_difference(r.density_a, r.density_b);
  r.holds = r.lower_block_triangular && r.block_law_residual <= tol &&
            r.density_difference <= tol;
  return r;
}

}  // namespace poppkit

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "poppkit/linalg.hpp"
#include "poppkit/popp.hpp"
#include "poppkit/random.hpp"
#include "support.hpp"

namespace poppkit {
namespace {

// Independent route: explicit sum over every index tuple for the inverse
// blocks, then sqrt(det gbar) / |det F| with no Cholesky.
double oracle_density(const AdaptedFrame& f, const RationalMatrix& g) {
  const StructureConstants b = structure_constants(f);
  const std::size_t k = f.rank();
  const RationalMatrix gi = inverse(g);
  Rational det_bar = determinant(g);
  for (const auto& layer : b.layers()) {
    const std::size_t s = layer.layer;
    const std::size_t size = layer.values.rows();
    std::size_t tuples = 1;
    for (std::size_t i = 0; i < s; ++i) tuples *= k;
    RationalMatrix inv_block(size, size);
    for (std::size_t a = 0; a < size; ++a)
      for (std::size_t c = 0; c < size; ++c) {
        Rational acc = 0;
        for (std::size_t I = 0; I < tuples; ++I)
          for (std::size_t J = 0; J < tuples; ++J) {
            Rational w = 1;
            for (std::size_t m = 0, ii = I, jj = J; m < s; ++m, ii /= k, jj /= k) w *= gi(ii % k, jj % k);
            acc += layer.values(a, I) * w * layer.values(c, J);
          }
        inv_block(a, c) = acc;
      }
    det_bar /= determinant(inv_block);
  }
  return std::sqrt(det_bar.get_d()) / std::abs(determinant(f.frame_matrix).get_d());
}

AdaptedFrame frame_at(const ManifoldSpec& s, const Point& p) { return build_adapted_frame(s, compute_flag(s, p)); }

TEST(PoppDensity, HeisenbergGoldenValue) {
  const auto h1 = test::heisenberg1();
  const double expected = 1.0 / (4.0 * std::sqrt(2.0));
  for (const auto& p : h1->sample_points) EXPECT_NEAR(popp_density(*h1, p) / expected, 1.0, 1e-12);
}

TEST(PoppDensity, HeisenbergBlocks) {
  const auto h1 = test::heisenberg1();
  const AdaptedFrame f = frame_at(*h1, h1->sample_points[0]);
  const PoppExtension e = popp_extension(*h1, f, structure_constants(f));
  ASSERT_EQ(e.exact_blocks.size(), 2u);
  EXPECT_EQ(e.exact_blocks[1], (RationalMatrix{{make_rational(1, 2)}}));
  EXPECT_EQ(e.determinant(), make_rational(1, 2));
  EXPECT_EQ(e.full_exact(), (RationalMatrix{{1, 0, 0}, {0, 1, 0}, {0, 0, make_rational(1, 2)}}));
}

TEST(PoppDensity, MatchesOracleOnAllFixtures) {
  std::mt19937_64 rng(21);
  for (const auto& spec : {test::heisenberg1(), test::heisenberg2(), test::engel(), test::riemann2()}) {
    for (const auto& p : spec->sample_points) {
      const AdaptedFrame f = frame_at(*spec, p);
      const RationalMatrix g = random_spd(spec->rank(), rng);
      const double ours = popp_density(f, popp_extension(f, structure_constants(f), g));
      EXPECT_NEAR(ours / oracle_density(f, g), 1.0, 1e-12) << spec->name << " " << to_string(p);
    }
  }
}

TEST(PoppDensity, EngelBlocksNonsingular) {
  const auto e = test::engel();
  for (const auto& p : e->sample_points) {
    const AdaptedFrame f = frame_at(*e, p);
    const PoppExtension ext = popp_extension(*e, f, structure_constants(f));
    ASSERT_EQ(ext.exact_blocks.size(), 3u);
    for (const auto& b : ext.exact_blocks) EXPECT_NE(determinant(b), 0);
    EXPECT_TRUE(is_positive_definite(ext.full_exact()));
  }
}

TEST(PoppDensity, RiemannianExtensionIsTheMetric) {
  const auto r = test::riemann2();
  const AdaptedFrame f = frame_at(*r, r->sample_points[1]);
  const RationalMatrix g{{2, 1}, {1, 3}};
  const PoppExtension e = popp_extension(f, structure_constants(f), g);
  ASSERT_EQ(e.exact_blocks.size(), 1u);
  EXPECT_EQ(e.exact_blocks[0], g);
  EXPECT_NEAR(popp_density(f, e), std::sqrt(5.0), 1e-14);
}

TEST(PoppDensity, ScalingTheMetric) {
  // g -> c g multiplies layer s by c^s, so the density scales by c^{Q/2}.
  const auto h1 = test::heisenberg1();
  const Point& p = h1->sample_points[3];
  const double base = popp_density(*h1, p);
  const double scaled = popp_density(*h1, p, RationalMatrix{{4, 0}, {0, 4}});
  EXPECT_NEAR(scaled / base, std::pow(4.0, 2.0), 1e-13);
}

TEST(PoppExtension, RejectsIndefiniteMetric) {
  const auto h1 = test::heisenberg1();
  const AdaptedFrame f = frame_at(*h1, h1->sample_points[0]);
  EXPECT_THROW(popp_extension(f, structure_constants(f), RationalMatrix{{1, 2}, {2, 1}}), NumericalError);
}

TEST(PoppExtension, SingularLayerIsGeometryError) {
  const auto h1 = test::heisenberg1();
  const AdaptedFrame f = frame_at(*h1, h1->sample_points[0]);
  StructureConstants b = structure_constants(f);
  for (std::size_t c = 0; c < b.mutable_layers()[0].values.cols(); ++c) b.mutable_layers()[0].values(0, c) = 0;
  EXPECT_THROW(popp_extension(f, b, RationalMatrix::identity(2)), GeometryError);
}

TEST(FrameLaw, HoldsForRandomAdaptedFrames) {
  std::mt19937_64 rng(31);
  for (const auto& spec : {test::heisenberg1(), test::heisenberg2(), test::engel()}) {
    for (int t = 0; t < 20; ++t) {
      const Point& p = spec->sample_points[t % spec->sample_points.size()];
      const AdaptedFrame a = frame_at(*spec, p);
      const AdaptedFrame b = change_frame(a, random_adapted_transform(a.layer_bounds, rng));
      const FrameLawReport r = verify_frame_law(*spec, a, b, 1e-9);
      EXPECT_TRUE(r.holds) << spec->name;
      EXPECT_TRUE(r.lower_block_triangular);
      EXPECT_EQ(r.block_law_residual, 0.0);
      EXPECT_LE(r.density_difference, 1e-9);
    }
  }
}

TEST(FrameLaw, CorruptedConstantChangesDensity) {
  const auto h1 = test::heisenberg1();
  const AdaptedFrame f = frame_at(*h1, h1->sample_points[1]);
  StructureConstants b = structure_constants(f);
  b.mutable_layers()[0].values(0, 1) += 1;
  const double corrupted = popp_density(f, popp_extension(f, b, RationalMatrix::identity(2)));
  EXPECT_GT(relative_difference(corrupted, popp_density(*h1, f.point)), 1e-3);
}

TEST(FrameLaw, RejectsFramesAtDifferentPoints) {
  const auto h1 = test::heisenberg1();
  EXPECT_THROW(verify_frame_law(*h1, frame_at(*h1, h1->sample_points[0]), frame_at(*h1, h1->sample_points[1]), 1e-9),
               GeometryError);
}

}  // namespace
}  // namespace poppkit

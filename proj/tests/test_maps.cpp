#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "poppkit/linalg.hpp"
#include "support.hpp"

namespace poppkit {
namespace {

using test::pt;

MapSpec h1_map(const std::string& name, std::vector<std::string> comps) {
  return make_map(name, test::heisenberg1(), test::heisenberg1(), comps);
}

TEST(Maps, JacobianAndPushforward) {
  const MapSpec m = h1_map("m", {"x + y^2", "3*y", "t*x"});
  const Point p = pt({"1", "2", "3"});
  EXPECT_EQ(m.image(p), pt({"5", "6", "3"}));
  EXPECT_EQ(m.jacobian_at(p), (RationalMatrix{{1, 4, 0}, {0, 3, 0}, {3, 0, 1}}));
  EXPECT_EQ(pushforward(m, test::heisenberg1()->frame[0], p), (std::vector<Rational>{1, 0, 7}));
}

TEST(Maps, ContactDefectOfShear) {
  const MapSpec m = h1_map("shear", {"x", "y", "t + x"});
  for (const auto& p : test::heisenberg1()->sample_points) {
    const ContactDefect d = contact_defect(m, p);
    EXPECT_FALSE(d.contact);
    // f_* X = X + d/dt and [X, Y] = -4 d/dt.
    EXPECT_EQ(d.coefficients(2, 0), make_rational(-1, 4));
    EXPECT_EQ(d.coefficients(2, 1), 0);
    EXPECT_DOUBLE_EQ(d.defect, 0.25);
    EXPECT_TRUE(contact_defect(m, p, 0.3).contact);
  }
  try {
    pullback_metric(m, pt({"1/2", "-3", "7"}));
    FAIL();
  } catch (const GeometryError& e) {
    EXPECT_NE(std::string(e.what()).find("(1/2, -3, 7)"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("shear"), std::string::npos);
  }
}

TEST(Maps, DilationConstants) {
  for (const auto& [r, comps] : std::vector<std::pair<double, std::vector<std::string>>>{
           {2.0, {"2*x", "2*y", "4*t"}}, {0.5, {"1/2*x", "1/2*y", "1/4*t"}}, {3.0, {"3*x", "3*y", "9*t"}}}) {
    const MapSpec m = h1_map("dilation", comps);
    for (const auto& p : test::heisenberg1()->sample_points) {
      const QRReport q = qr_constants(m, p);
      EXPECT_NEAR(q.H, 1.0, 1e-12);
      EXPECT_NEAR(q.K_popp, 1.0, 1e-12);
      EXPECT_NEAR(q.J_f / std::pow(r, 4), 1.0, 1e-12);
      EXPECT_NEAR(q.Df_norm, r, 1e-12);
      EXPECT_EQ(pullback_metric(m, p), (RationalMatrix{{Rational(r * r), 0}, {0, Rational(r * r)}}));
      EXPECT_LE(popp_pullback_check(m, p).slack, 1e-12);
    }
  }
}

TEST(Maps, AnisotropicAutomorphism) {
  const MapSpec m = h1_map("aniso", {"x", "2*y", "2*t"});
  std::vector<QRReport> reports;
  for (const auto& p : test::heisenberg1()->sample_points) reports.push_back(qr_constants(m, p));
  const TheoremRelations t = check_theorem_relations(reports, 4, 2);
  EXPECT_NEAR(t.H_star, 2.0, 1e-12);
  EXPECT_NEAR(t.H_hat, 2.0, 1e-12);
  EXPECT_NEAR(t.K_a, 4.0, 1e-12);
  EXPECT_NEAR(t.K_hat, 4.0, 1e-12);
  EXPECT_TRUE(t.checks.all_passed());
  EXPECT_EQ(reports[0].lambda.size(), 2u);
  EXPECT_NEAR(reports[0].J_f, 4.0, 1e-12);
}

TEST(Maps, RotationAndTranslationAreIsometries) {
  for (const auto& comps : std::vector<std::vector<std::string>>{
           {"3/5*x - 4/5*y", "4/5*x + 3/5*y", "t"}, {"x + 1", "y + 2", "t + 3 + 4*x - 2*y"}}) {
    const MapSpec m = h1_map("iso", comps);
    for (const auto& p : test::heisenberg1()->sample_points) {
      EXPECT_EQ(pullback_metric(m, p), RationalMatrix::identity(2));
      const QRReport q = qr_constants(m, p);
      EXPECT_NEAR(q.H, 1.0, 1e-12);
      EXPECT_NEAR(q.K_popp, 1.0, 1e-12);
      EXPECT_NEAR(q.J_f, 1.0, 1e-12);
    }
  }
}

TEST(Maps, CompositionOfDilations) {
  const MapSpec up = h1_map("up", {"2*x", "2*y", "4*t"});
  const MapSpec down = h1_map("down", {"1/2*x", "1/2*y", "1/4*t"});
  const MapSpec id = compose(down, up);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(id.components[i], Polynomial::variable(3, i));
  EXPECT_NEAR(qr_constants(id, pt({"1", "1", "1"})).J_f, 1.0, 1e-14);
}

TEST(Maps, RandomDiagonalH2Automorphisms) {
  std::mt19937_64 rng(51);
  std::uniform_int_distribution<int> dist(1, 5);
  for (int trial = 0; trial < 10; ++trial) {
    const int a1 = dist(rng), a2 = dist(rng), c = a1 * a2 * dist(rng);
    const std::vector<std::string> comps{std::to_string(a1) + "*x1", std::to_string(a2) + "*x2",
                                         std::to_string(c) + "/" + std::to_string(a1) + "*y1",
                                         std::to_string(c) + "/" + std::to_string(a2) + "*y2",
                                         std::to_string(c) + "*t"};
    const MapSpec m = make_map("diag", test::heisenberg2(), test::heisenberg2(), comps);
    std::vector<QRReport> reports;
    for (const auto& p : test::heisenberg2()->sample_points) {
      reports.push_back(qr_constants(m, p));
      EXPECT_TRUE(reports.back().theorem_checks.all_passed());
      EXPECT_LE(popp_pullback_check(m, p).slack, 1e-12);
    }
    EXPECT_TRUE(check_theorem_relations(reports, 6, 4).checks.all_passed());
  }
}

TEST(Maps, ConformalSquareOnThePlane) {
  const MapSpec m = make_map("square", test::riemann2(), test::riemann2(), std::vector<std::string>{"x^2 - y^2", "2*x*y"});
  for (const auto& p : test::riemann2()->sample_points) {
    const QRReport q = qr_constants(m, p);
    EXPECT_NEAR(q.H, 1.0, 1e-12);
    EXPECT_NEAR(q.K_popp, 1.0, 1e-12);
    // |f'(z)|^2 = 4|z|^2.
    const double r2 = Rational(p[0] * p[0] + p[1] * p[1]).get_d();
    EXPECT_NEAR(q.J_f / (4.0 * r2), 1.0, 1e-12);
  }
  EXPECT_THROW(pullback_metric(m, pt({"0", "0"})), GeometryError);
}

TEST(Maps, HeisenbergIndex) {
  EXPECT_EQ(heisenberg_index(*test::heisenberg1()), 1u);
  EXPECT_EQ(heisenberg_index(*test::heisenberg2()), 2u);
  EXPECT_FALSE(heisenberg_index(*test::engel()).has_value());
  EXPECT_FALSE(heisenberg_index(*test::riemann2()).has_value());
  const ManifoldSpec scaled = make_manifold("h1b", {"x", "y", "t"}, {{"1", "0", "2*y"}, {"0", "1", "-2*x"}},
                                            {{"2", "0"}, {"0", "2"}}, {});
  EXPECT_FALSE(heisenberg_index(scaled).has_value());
}

TEST(Maps, DairbekovOnH1) {
  for (const auto& comps : std::vector<std::vector<std::string>>{
           {"2*x", "2*y", "4*t"}, {"x", "2*y", "2*t"}, {"x + 1", "y + 2", "t + 3 + 4*x - 2*y"}}) {
    const MapSpec m = h1_map("m", comps);
    for (const auto& p : test::heisenberg1()->sample_points) {
      const DairbekovReport d = heisenberg_dairbekov(m, p);
      EXPECT_EQ(d.n, 1u);
      EXPECT_TRUE(d.all_passed());
      EXPECT_NEAR(d.J, d.HJ * d.HJ, 1e-12 * d.J);
      EXPECT_NEAR(d.K_dairbekov, d.K_horizontal * d.K_horizontal, 1e-12 * d.K_dairbekov);
    }
  }
  const MapSpec engel_map = make_map("e", test::engel(), test::engel(), std::vector<std::string>{"2*a", "2*b", "4*c", "8*d"});
  EXPECT_THROW(heisenberg_dairbekov(engel_map, test::engel()->sample_points[0]), InputError);
}

TEST(Maps, ConstructionErrors) {
  EXPECT_THROW(h1_map("short", {"x", "y"}), InputError);
  EXPECT_THROW(h1_map("badvar", {"x", "y", "s"}), ParseError);
  const MapSpec singular = h1_map("collapse", {"x", "0", "0"});
  EXPECT_THROW(qr_constants(singular, pt({"1", "1", "1"})), GeometryError);
}

}  // namespace
}  // namespace poppkit

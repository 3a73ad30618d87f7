#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "poppkit/manifest.hpp"

namespace poppkit {
namespace {

const char* kSmall = R"(
# comment line
[options]
seed = 3
random_pairs = 10

[manifold.h]
coordinates = ["x", "y", "t"]
frame = [["1", "0", "2*y"],
         ["0", "1", "-2*x"]]   # trailing comment
points = [["0", "0", "0"], [1, "1/2", -3]]

[map.d]
source = "h"
target = "h"
components = ["2*x", "2*y", "4*t"]
)";

template <class F>
std::string error_of(F&& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

TEST(Manifest, ParsesSectionsAndMultilineArrays) {
  const Manifest m = parse_manifest_text(kSmall);
  EXPECT_EQ(m.options.seed, 3u);
  EXPECT_EQ(m.options.random_pairs, 10u);
  EXPECT_EQ(m.options.frames, 20u);
  const ManifoldSpec& h = m.manifold("h");
  EXPECT_EQ(h.dimension(), 3u);
  EXPECT_EQ(h.rank(), 2u);
  ASSERT_EQ(h.sample_points.size(), 2u);
  EXPECT_EQ(h.sample_points[1][1], make_rational(1, 2));
  EXPECT_EQ(check_equiregular(h).flags[0].homogeneous_dimension, 4u);
  EXPECT_EQ(m.map("d").sample_points.size(), 2u);
  EXPECT_EQ(m.manifold_order, std::vector<std::string>{"h"});
}

TEST(Manifest, BundledManifest) {
  const Manifest m = bundled_manifest();
  for (const char* name : {"heisenberg1", "heisenberg2", "engel", "riemann2", "grushin-negative"})
    EXPECT_NO_THROW(m.manifold(name)) << name;
  EXPECT_EQ(check_equiregular(m.manifold("heisenberg1")).flags[0].homogeneous_dimension, 4u);
  EXPECT_FALSE(check_equiregular(m.manifold("grushin-negative")).equiregular);
  EXPECT_GE(m.manifold("heisenberg1").sample_points.size(), 5u);
  EXPECT_TRUE(m.options.seed.has_value());
}

TEST(Manifest, NonSpdMetricNamesTheManifold) {
  const std::string text = R"([manifold.bad]
coordinates = ["x", "y"]
frame = [["1", "0"], ["0", "1"]]
metric = [[1, 2], [2, 1]]
points = [["0", "0"]]
)";
  const std::string msg = error_of([&] { parse_manifest_text(text); });
  EXPECT_NE(msg.find("'bad'"), std::string::npos) << msg;
  EXPECT_NE(msg.find("positive definite"), std::string::npos) << msg;
  EXPECT_THROW(parse_manifest_text(text), InputError);
}

TEST(Manifest, UndefinedManifoldInMap) {
  const std::string text = std::string(kSmall) + "\n[map.e]\nsource = \"h\"\ntarget = \"nowhere\"\ncomponents = [\"x\", \"y\", \"t\"]\n";
  const std::string msg = error_of([&] { parse_manifest_text(text); });
  EXPECT_NE(msg.find("nowhere"), std::string::npos);
  EXPECT_NE(msg.find("'e'"), std::string::npos);
  EXPECT_THROW(parse_manifest_text(text), InputError);
}

TEST(Manifest, SyntaxErrorsCarryLineAndColumn) {
  try {
    parse_manifest_text("[manifold.a]\ncoordinates = [\"x\"\nframe = 1\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  try {
    parse_manifest_text("[manifold.a]\ncoordinates = [\"x\", \"y\"]\nframe = [[\"1\", \"0\"], [\"0\", \"x +* 2\"]]\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 32u);
  }
  try {
    parse_manifest_text("\n\n[mystery]\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_manifest_text("key = 1\n"), ParseError);
  EXPECT_THROW(parse_manifest_text("[options]\ntol = fast\n"), ParseError);
  EXPECT_THROW(parse_manifest_text("[options]\nseed = 1\nseed = 2\n"), ParseError);
  EXPECT_THROW(parse_manifest_text("[options]\ncolour = 1\n"), ParseError);
  EXPECT_THROW(parse_manifest_text("[manifold.a]\ncoordinates = [\"x\"]\n"), ParseError);
}

TEST(Manifest, RandomPairsRequireSeed) {
  EXPECT_THROW(parse_manifest_text("[options]\nrandom_pairs = 5\n"), InputError);
  EXPECT_NO_THROW(parse_manifest_text("[options]\nrandom_pairs = 0\n"));
}

TEST(Manifest, FileErrors) {
  EXPECT_THROW(parse_manifest("/nonexistent/manifest.toml"), InputError);
  const auto path = std::filesystem::temp_directory_path() / "poppkit_manifest_test.toml";
  {
    std::ofstream out(path);
    out << kSmall;
  }
  EXPECT_NO_THROW(parse_manifest(path));
  std::filesystem::remove(path);
}

TEST(Manifest, UnknownNamesOnLookup) {
  const Manifest m = parse_manifest_text(kSmall);
  EXPECT_THROW(m.manifold("zzz"), InputError);
  EXPECT_THROW(m.map("zzz"), InputError);
}

}  // namespace
}  // namespace poppkit

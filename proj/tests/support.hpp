#pragma once

#include <memory>
#include <string>
#include <vector>

#include "poppkit/maps.hpp"

namespace poppkit::test {

inline Point pt(std::initializer_list<const char*> xs) {
  Point p;
  for (const char* x : xs) p.push_back(parse_rational(x));
  return p;
}

inline std::shared_ptr<const ManifoldSpec> heisenberg1() {
  static const auto spec = std::make_shared<const ManifoldSpec>(make_manifold(
      "h1", {"x", "y", "t"}, {{"1", "0", "2*y"}, {"0", "1", "-2*x"}}, {},
      {{"0", "0", "0"}, {"1", "2", "3"}, {"1/2", "-3", "7"}, {"-2", "1/3", "-1"}, {"5", "-1/4", "2/3"}}));
  return spec;
}

inline std::shared_ptr<const ManifoldSpec> heisenberg2() {
  static const auto spec = std::make_shared<const ManifoldSpec>(make_manifold(
      "h2", {"x1", "x2", "y1", "y2", "t"},
      {{"1", "0", "0", "0", "2*y1"}, {"0", "1", "0", "0", "2*y2"}, {"0", "0", "1", "0", "-2*x1"},
       {"0", "0", "0", "1", "-2*x2"}},
      {}, {{"0", "0", "0", "0", "0"}, {"1", "-1", "2", "1/2", "3"}, {"-1/3", "2", "0", "-4", "1"}}));
  return spec;
}

inline std::shared_ptr<const ManifoldSpec> engel() {
  static const auto spec = std::make_shared<const ManifoldSpec>(make_manifold(
      "engel", {"a", "b", "c", "d"}, {{"1", "0", "0", "0"}, {"0", "1", "a", "1/2*a^2"}}, {},
      {{"0", "0", "0", "0"}, {"1", "2", "3", "4"}, {"-1/2", "1", "0", "2"}, {"3", "-1", "1/3", "-2"},
       {"2", "0", "-1", "1/5"}}));
  return spec;
}

inline std::shared_ptr<const ManifoldSpec> riemann2() {
  static const auto spec = std::make_shared<const ManifoldSpec>(make_manifold(
      "r2", {"x", "y"}, {{"1", "0"}, {"0", "1"}}, {}, {{"1", "0"}, {"1", "2"}, {"-1/2", "3"}}));
  return spec;
}

inline std::shared_ptr<const ManifoldSpec> grushin() {
  static const auto spec = std::make_shared<const ManifoldSpec>(make_manifold(
      "grushin", {"x", "y"}, {{"1", "0"}, {"0", "x"}}, {}, {{"0", "0"}, {"1", "1"}, {"0", "2"}}));
  return spec;
}

}  // namespace poppkit::test

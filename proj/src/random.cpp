#include "poppkit/random.hpp"

namespace poppkit {

Rational random_rational(std::mt19937_64& rng, int bound) {
  std::uniform_int_distribution<int> den_dist(1, 3);
  const int q = den_dist(rng);
  std::uniform_int_distribution<int> num_dist(-bound * q, bound * q);
  return make_rational(num_dist(rng), q);
}

RationalMatrix random_spd(std::size_t k, std::mt19937_64& rng) {
  RationalMatrix b(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) b(i, j) = random_rational(rng, 2);
  return b * b.transpose() + RationalMatrix::identity(k);
}

namespace {

void monomials(std::size_t num_vars, std::size_t degree, std::vector<std::uint32_t>& current,
               std::size_t var, std::vector<std::vector<std::uint32_t>>& out) {
  if (var == num_vars) {
    out.push_back(current);
    return;
  }
  for (std::size_t e = 0; e <= degree; ++e) {
    current[var] = static_cast<std::uint32_t>(e);
    monomials(num_vars, degree - e, current, var + 1, out);
  }
  current[var] = 0;
}

}  // namespace

Polynomial random_polynomial(std::size_t num_vars, std::size_t degree, std::mt19937_64& rng) {
  std::vector<std::vector<std::uint32_t>> all;
  std::vector<std::uint32_t> current(num_vars, 0);
  monomials(num_vars, degree, current, 0, all);
  Polynomial p(num_vars);
  for (const auto& exps : all) {
    Polynomial term = Polynomial::constant(num_vars, random_rational(rng));
    for (std::size_t v = 0; v < num_vars; ++v)
      if (exps[v] > 0) term *= Polynomial::variable(num_vars, v).pow(exps[v]);
    p += term;
  }
  return p;
}

VectorField random_field(std::size_t dimension, std::size_t degree, std::mt19937_64& rng,
                         std::string word) {
  VectorField f;
  f.word = std::move(word);
  for (std::size_t i = 0; i < dimension; ++i) f.components.push_back(random_polynomial(dimension, degree, rng));
  return f;
}

}  // namespace poppkit

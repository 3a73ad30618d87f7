#pragma once

#include <random>

#include "poppkit/manifold.hpp"

namespace poppkit {

/// p/q with q in {1, 2, 3} and |p/q| <= bound.
Rational random_rational(std::mt19937_64& rng, int bound = 3);

/// B B^T + I with random rational B; always SPD.
RationalMatrix random_spd(std::size_t k, std::mt19937_64& rng);

/// Dense polynomial of total degree <= degree with random rational coefficients.
Polynomial random_polynomial(std::size_t num_vars, std::size_t degree, std::mt19937_64& rng);

VectorField random_field(std::size_t dimension, std::size_t degree, std::mt19937_64& rng,
                         std::string word = "V");

}  // namespace poppkit

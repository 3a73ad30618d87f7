#include "poppkit/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "poppkit/error.hpp"

namespace poppkit {
namespace {

using IntegerMatrix = Matrix<Integer>;

// Scales every row by the lcm of its denominators. `scale` receives the
// product of the row multipliers.
IntegerMatrix clear_denominators(const RationalMatrix& m, Integer* scale) {
  IntegerMatrix out(m.rows(), m.cols());
  Integer total = 1;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Integer l = 1;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), m(i, j).get_den_mpz_t());
    }
    for (std::size_t j = 0; j < m.cols(); ++j) {
      out(i, j) = m(i, j).get_num() * (l / m(i, j).get_den());
    }
    total *= l;
  }
  if (scale) *scale = total;
  return out;
}

struct BareissResult {
  std::size_t rank = 0;
  Integer det = 0;  // only meaningful for square full-rank input
};

// Fraction-free elimination with row pivoting on the first nonzero entry.
BareissResult bareiss(IntegerMatrix a) {
  const std::size_t rows = a.rows();
  const std::size_t cols = a.cols();
  Integer prev = 1;
  int sign = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a(p, c) == 0) ++p;
    if (p == rows) continue;
    if (p != r) {
      for (std::size_t j = 0; j < cols; ++j) std::swap(a(p, j), a(r, j));
      sign = -sign;
    }
    for (std::size_t i = r + 1; i < rows; ++i) {
      for (std::size_t j = c + 1; j < cols; ++j) {
        Integer v = a(r, c) * a(i, j) - a(i, c) * a(r, j);
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        a(i, j) = v;
      }
      a(i, c) = 0;
    }
    prev = a(r, c);
    ++r;
  }
  BareissResult res;
  res.rank = r;
  if (rows == cols && r == rows) res.det = sign * prev;
  return res;
}

}  // namespace

std::size_t rank(const RationalMatrix& m) {
  if (m.empty()) return 0;
  return bareiss(clear_denominators(m, nullptr)).rank;
}

Rational determinant(const RationalMatrix& m) {
  if (!m.is_square()) throw NumericalError("determinant of non-square matrix");
  if (m.rows() == 0) return Rational(1);
  Integer scale;
  const BareissResult r = bareiss(clear_denominators(m, &scale));
  if (r.rank < m.rows()) return Rational(0);
  Rational d(r.det, scale);
  d.canonicalize();
  return d;
}

RationalMatrix inverse(const RationalMatrix& m) {
  if (!m.is_square()) throw NumericalError("inverse of non-square matrix");
  const std::size_t n = m.rows();
  RationalMatrix a = m;
  RationalMatrix inv = RationalMatrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a(p, c) == 0) ++p;
    if (p == n) throw NumericalError("singular matrix");
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) {
        std::swap(a(p, j), a(c, j));
        std::swap(inv(p, j), inv(c, j));
      }
    }
    const Rational piv_inv = 1 / a(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      a(c, j) *= piv_inv;
      inv(c, j) *= piv_inv;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a(i, c) == 0) continue;
      const Rational f = a(i, c);
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) -= f * a(c, j);
        inv(i, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

bool is_symmetric(const RationalMatrix& m) {
  if (!m.is_square()) return false;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i + 1; j < m.cols(); ++j)
      if (m(i, j) != m(j, i)) return false;
  return true;
}

bool is_positive_definite(const RationalMatrix& m) {
  if (!is_symmetric(m) || m.rows() == 0) return false;
  // Elimination without pivoting: the k-th pivot is the ratio of
  // consecutive leading principal minors.
  RationalMatrix a = m;
  const std::size_t n = a.rows();
  for (std::size_t c = 0; c < n; ++c) {
    if (a(c, c) <= 0) return false;
    for (std::size_t i = c + 1; i < n; ++i) {
      if (a(i, c) == 0) continue;
      const Rational f = a(i, c) / a(c, c);
      for (std::size_t j = c; j < n; ++j) a(i, j) -= f * a(c, j);
    }
  }
  return true;
}

namespace {

struct LuDecomposition {
  RealMatrix lu;
  std::vector<std::size_t> perm;
  int sign = 1;
  bool singular = false;
};

LuDecomposition lu_decompose(const RealMatrix& m) {
  LuDecomposition d{m, std::vector<std::size_t>(m.rows()), 1, false};
  std::iota(d.perm.begin(), d.perm.end(), std::size_t{0});
  const std::size_t n = m.rows();
  RealMatrix& a = d.lu;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t i = c + 1; i < n; ++i)
      if (std::abs(a(i, c)) > std::abs(a(p, c))) p = i;
    if (a(p, c) == 0.0) {
      d.singular = true;
      continue;
    }
    if (p != c) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(c, j));
      std::swap(d.perm[p], d.perm[c]);
      d.sign = -d.sign;
    }
    for (std::size_t i = c + 1; i < n; ++i) {
      a(i, c) /= a(c, c);
      for (std::size_t j = c + 1; j < n; ++j) a(i, j) -= a(i, c) * a(c, j);
    }
  }
  return d;
}

}  // namespace

double determinant(const RealMatrix& m) {
  if (!m.is_square()) throw NumericalError("determinant of non-square matrix");
  const LuDecomposition d = lu_decompose(m);
  if (d.singular) return 0.0;
  double det = d.sign;
  for (std::size_t i = 0; i < m.rows(); ++i) det *= d.lu(i, i);
  return det;
}

RealMatrix inverse(const RealMatrix& m) {
  if (!m.is_square()) throw NumericalError("inverse of non-square matrix");
  const std::size_t n = m.rows();
  const LuDecomposition d = lu_decompose(m);
  if (d.singular) throw NumericalError("singular matrix");
  RealMatrix inv(n, n);
  for (std::size_t col = 0; col < n; ++col) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = d.perm[i] == col ? 1.0 : 0.0;
      for (std::size_t j = 0; j < i; ++j) s -= d.lu(i, j) * x[j];
      x[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
      double s = x[ii];
      for (std::size_t j = ii + 1; j < n; ++j) s -= d.lu(ii, j) * x[j];
      x[ii] = s / d.lu(ii, ii);
    }
    for (std::size_t i = 0; i < n; ++i) inv(i, col) = x[i];
  }
  return inv;
}

std::optional<RealMatrix> try_cholesky(const RealMatrix& m) {
  if (!m.is_square()) return std::nullopt;
  const std::size_t n = m.rows();
  RealMatrix l(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    double d = m(j, j);
    for (std::size_t p = 0; p < j; ++p) d -= l(j, p) * l(j, p);
    if (!(d > 0.0) || !std::isfinite(d)) return std::nullopt;
    l(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = m(i, j);
      for (std::size_t p = 0; p < j; ++p) s -= l(i, p) * l(j, p);
      l(i, j) = s / l(j, j);
    }
  }
  return l;
}

RealMatrix cholesky(const RealMatrix& m) {
  auto l = try_cholesky(m);
  if (!l) throw NumericalError("matrix is not symmetric positive definite");
  return *l;
}

std::vector<double> symmetric_eigenvalues(const RealMatrix& input) {
  if (!input.is_square()) throw NumericalError("eigenvalues of non-square matrix");
  const std::size_t n = input.rows();
  RealMatrix a = input;
  double frob = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) frob += a(i, j) * a(i, j);
  frob = std::sqrt(frob);
  const double target = 1e-13 * frob;

  auto off_norm = [&] {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
  };

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps && off_norm() > target; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

std::vector<double> generalized_eigenvalues(const RealMatrix& g, const RealMatrix& h) {
  if (!g.is_square() || !h.is_square() || g.rows() != h.rows()) {
    throw NumericalError("generalized eigenproblem: size mismatch");
  }
  const std::size_t n = g.rows();
  const auto l = try_cholesky(g);
  if (!l) throw NumericalError("generalized eigenproblem: g is not SPD");

  // Y = L^{-1} h, then C = L^{-1} Y^T = L^{-1} h L^{-T}.
  auto forward_solve = [&](const RealMatrix& rhs) {
    RealMatrix x(n, rhs.cols());
    for (std::size_t col = 0; col < rhs.cols(); ++col) {
      for (std::size_t i = 0; i < n; ++i) {
        double s = rhs(i, col);
        for (std::size_t j = 0; j < i; ++j) s -= (*l)(i, j) * x(j, col);
        x(i, col) = s / (*l)(i, i);
      }
    }
    return x;
  };
  RealMatrix c = forward_solve(forward_solve(h).transpose());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double avg = 0.5 * (c(i, j) + c(j, i));
      c(i, j) = avg;
      c(j, i) = avg;
    }
  return symmetric_eigenvalues(c);
}

bool approx_equal(double a, double b, double tol) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) <= tol * scale;
}

double relative_difference(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

}  // namespace poppkit

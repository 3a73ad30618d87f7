#include "poppkit/manifold.hpp"

#include <algorithm>

#include "poppkit/linalg.hpp"

namespace poppkit {

bool VectorField::is_zero() const {
  return std::all_of(components.begin(), components.end(),
                     [](const Polynomial& p) { return p.is_zero(); });
}

std::vector<Rational> VectorField::at(std::span<const Rational> point) const {
  std::vector<Rational> v;
  v.reserve(components.size());
  for (const auto& c : components) v.push_back(c.evaluate(point));
  return v;
}

VectorField lie_bracket(const VectorField& x, const VectorField& y) {
  const std::size_t n = x.dimension();
  if (y.dimension() != n) throw std::invalid_argument("lie_bracket: dimension mismatch");
  VectorField out;
  out.word = "[" + x.word + "," + y.word + "]";
  out.components.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t vars = x.components[i].num_vars();
    Polynomial acc(vars);
    for (std::size_t j = 0; j < n; ++j) {
      if (!x.components[j].is_zero()) acc += x.components[j] * y.components[i].partial(j);
      if (!y.components[j].is_zero()) acc -= y.components[j] * x.components[i].partial(j);
    }
    out.components.push_back(std::move(acc));
  }
  return out;
}

VectorField linear_combination(std::span<const Rational> coeffs,
                               std::span<const VectorField> fields, std::string word) {
  if (coeffs.size() != fields.size() || fields.empty()) {
    throw std::invalid_argument("linear_combination: size mismatch");
  }
  VectorField out;
  out.word = std::move(word);
  const std::size_t n = fields[0].dimension();
  for (std::size_t i = 0; i < n; ++i) {
    Polynomial acc(fields[0].components[i].num_vars());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (coeffs[j] != 0) acc += coeffs[j] * fields[j].components[i];
    }
    out.components.push_back(std::move(acc));
  }
  return out;
}

RationalMatrix value_matrix(std::span<const VectorField> fields, std::span<const Rational> point) {
  const std::size_t n = fields.empty() ? point.size() : fields[0].dimension();
  RationalMatrix m(n, fields.size());
  for (std::size_t j = 0; j < fields.size(); ++j) {
    const auto v = fields[j].at(point);
    for (std::size_t i = 0; i < n; ++i) m(i, j) = v[i];
  }
  return m;
}

RationalMatrix ManifoldSpec::metric_at(std::span<const Rational> point) const {
  return evaluate(metric, point);
}

void ManifoldSpec::validate() const {
  const std::string where = "manifold '" + name + "': ";
  const std::size_t n = dimension();
  const std::size_t k = rank();
  if (n == 0) throw InputError(where + "no coordinates");
  if (k == 0 || k > n) throw InputError(where + "frame size must satisfy 1 <= k <= n");
  for (const auto& f : frame) {
    if (f.dimension() != n) {
      throw InputError(where + "frame field " + f.word + " has " +
                       std::to_string(f.dimension()) + " components, expected " +
                       std::to_string(n));
    }
  }
  if (metric.rows() != k || metric.cols() != k) {
    throw InputError(where + "metric must be " + std::to_string(k) + "x" + std::to_string(k));
  }
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i + 1; j < k; ++j)
      if (!(metric(i, j) == metric(j, i))) throw InputError(where + "metric is not symmetric");
  for (const auto& p : sample_points) {
    if (p.size() != n) throw InputError(where + "sample point " + to_string(p) + " has wrong size");
    if (!is_positive_definite(metric_at(p))) {
      throw InputError(where + "metric is not positive definite at " + to_string(p));
    }
  }
}

ManifoldSpec make_manifold(std::string name, std::vector<std::string> coordinates,
                           const std::vector<std::vector<std::string>>& frame,
                           const std::vector<std::vector<std::string>>& metric,
                           const std::vector<std::vector<std::string>>& points) {
  ManifoldSpec spec;
  spec.name = std::move(name);
  spec.coordinates = std::move(coordinates);
  const std::size_t n = spec.coordinates.size();
  for (std::size_t i = 0; i < frame.size(); ++i) {
    VectorField f;
    f.word = "X" + std::to_string(i + 1);
    for (const auto& c : frame[i]) f.components.push_back(parse_polynomial(c, spec.coordinates));
    spec.frame.push_back(std::move(f));
  }
  const std::size_t k = spec.frame.size();
  spec.metric = PolynomialMatrix(k, k, Polynomial(n));
  if (metric.empty()) {
    for (std::size_t i = 0; i < k; ++i) spec.metric(i, i) = Polynomial::constant(n, Rational(1));
  } else {
    if (metric.size() != k) throw InputError("manifold '" + spec.name + "': metric has wrong size");
    for (std::size_t i = 0; i < k; ++i) {
      if (metric[i].size() != k) {
        throw InputError("manifold '" + spec.name + "': metric has wrong size");
      }
      for (std::size_t j = 0; j < k; ++j)
        spec.metric(i, j) = parse_polynomial(metric[i][j], spec.coordinates);
    }
  }
  for (const auto& p : points) {
    Point q;
    for (const auto& c : p) q.push_back(parse_rational(c));
    spec.sample_points.push_back(std::move(q));
  }
  spec.validate();
  return spec;
}

std::vector<std::string> FlagReport::bracket_words() const {
  std::vector<std::string> w;
  for (const auto& f : bracket_basis) w.push_back(f.word);
  return w;
}

std::vector<std::size_t> FlagReport::layer_bounds() const {
  std::vector<std::size_t> b{0};
  b.insert(b.end(), ranks.begin(), ranks.end());
  return b;
}

namespace {

// Independence test against the values admitted so far, by exact rank.
class BasisBuilder {
 public:
  BasisBuilder(std::size_t n, const Point& point) : n_(n), point_(point) {}

  bool try_admit(const VectorField& f) {
    auto v = f.at(point_);
    if (std::all_of(v.begin(), v.end(), [](const Rational& x) { return x == 0; })) return false;
    RationalMatrix m(rows_.size() + 1, n_);
    for (std::size_t i = 0; i < rows_.size(); ++i)
      for (std::size_t j = 0; j < n_; ++j) m(i, j) = rows_[i][j];
    for (std::size_t j = 0; j < n_; ++j) m(rows_.size(), j) = v[j];
    if (rank(m) <= rows_.size()) return false;
    rows_.push_back(std::move(v));
    return true;
  }

  std::size_t count() const { return rows_.size(); }

 private:
  std::size_t n_;
  const Point& point_;
  std::vector<std::vector<Rational>> rows_;
};

bool contains_up_to_sign(const std::vector<VectorField>& fields, const VectorField& f) {
  for (const auto& g : fields) {
    if (same_components(g, f)) return true;
    bool negated = true;
    for (std::size_t i = 0; i < f.dimension() && negated; ++i) {
      negated = (g.components[i] + f.components[i]).is_zero();
    }
    if (negated) return true;
  }
  return false;
}

}  // namespace

FlagReport compute_flag(const ManifoldSpec& spec, const Point& point, std::size_t max_step) {
  const std::size_t n = spec.dimension();
  const std::size_t k = spec.rank();
  if (point.size() != n) {
    throw InputError("manifold '" + spec.name + "': point " + to_string(point) +
                     " has wrong dimension");
  }
  FlagReport report;
  report.point = point;
  BasisBuilder basis(n, point);

  std::vector<VectorField> layer_all = spec.frame;
  std::vector<VectorField> layer_basis;
  for (const auto& f : spec.frame) {
    if (basis.try_admit(f)) {
      layer_basis.push_back(f);
      report.bracket_basis.push_back(f);
    }
  }
  report.ranks.push_back(basis.count());

  while (basis.count() < n) {
    if (report.ranks.size() >= max_step) {
      throw GeometryError("manifold '" + spec.name + "': not bracket generating at " +
                          to_string(point) + " within step " + std::to_string(max_step));
    }
    // Candidates built from the chosen basis come first; brackets with the
    // remaining words of the layer only matter at singular points.
    std::vector<VectorField> next;
    auto push_candidates = [&](const VectorField& z) {
      for (std::size_t i = 0; i < k; ++i) {
        VectorField b = lie_bracket(spec.frame[i], z);
        if (b.is_zero() || contains_up_to_sign(next, b)) continue;
        next.push_back(std::move(b));
      }
    };
    // i-major over the basis words gives lexicographic word order.
    for (std::size_t i = 0; i < k; ++i) {
      for (const auto& z : layer_basis) {
        VectorField b = lie_bracket(spec.frame[i], z);
        if (b.is_zero() || contains_up_to_sign(next, b)) continue;
        next.push_back(std::move(b));
      }
    }
    for (const auto& z : layer_all) {
      const bool in_basis = std::any_of(layer_basis.begin(), layer_basis.end(),
                                        [&](const VectorField& b) { return b.word == z.word; });
      if (!in_basis) push_candidates(z);
    }
    if (next.empty()) {
      throw GeometryError("manifold '" + spec.name + "': not bracket generating at " +
                          to_string(point) + " (all brackets vanish at step " +
                          std::to_string(report.ranks.size() + 1) + ")");
    }
    layer_basis.clear();
    for (const auto& f : next) {
      if (basis.try_admit(f)) {
        layer_basis.push_back(f);
        report.bracket_basis.push_back(f);
      }
    }
    report.ranks.push_back(basis.count());
    layer_all = std::move(next);
  }

  report.step = report.ranks.size();
  std::size_t prev = 0;
  for (std::size_t s = 0; s < report.ranks.size(); ++s) {
    const std::size_t ns = report.ranks[s] - prev;
    report.growth.push_back(ns);
    for (std::size_t i = 0; i < ns; ++i) report.weights.push_back(s + 1);
    report.homogeneous_dimension += (s + 1) * ns;
    prev = report.ranks[s];
  }
  return report;
}

EquiregularityReport check_equiregular(const ManifoldSpec& spec, std::size_t max_step) {
  if (spec.sample_points.empty()) {
    throw InputError("manifold '" + spec.name + "': no sample points");
  }
  EquiregularityReport r;
  for (const auto& p : spec.sample_points) r.flags.push_back(compute_flag(spec, p, max_step));
  r.equiregular = std::all_of(r.flags.begin(), r.flags.end(), [&](const FlagReport& f) {
    return f.ranks == r.flags.front().ranks;
  });
  return r;
}

}  // namespace poppkit

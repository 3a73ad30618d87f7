#include "poppkit/maps.hpp"

#include <algorithm>
#include <cmath>

#include "poppkit/linalg.hpp"

namespace poppkit {

Point MapSpec::image(const Point& p) const {
  Point q;
  q.reserve(components.size());
  for (const auto& c : components) q.push_back(c.evaluate(p));
  return q;
}

RationalMatrix MapSpec::jacobian_at(const Point& p) const { return evaluate(jacobian, p); }

MapSpec make_map(std::string name, std::shared_ptr<const ManifoldSpec> source,
                 std::shared_ptr<const ManifoldSpec> target, std::vector<Polynomial> components,
                 std::vector<Point> sample_points) {
  if (!source || !target) throw InputError("map '" + name + "': missing source or target");
  if (components.size() != target->dimension()) {
    throw InputError("map '" + name + "': has " + std::to_string(components.size()) +
                     " components, target '" + target->name + "' has dimension " +
                     std::to_string(target->dimension()));
  }
  for (const auto& c : components) {
    if (c.num_vars() != source->dimension()) {
      throw InputError("map '" + name + "': component not in source coordinates");
    }
  }
  MapSpec m;
  m.name = std::move(name);
  m.components = std::move(components);
  m.jacobian = PolynomialMatrix(target->dimension(), source->dimension(),
                                Polynomial(source->dimension()));
  for (std::size_t i = 0; i < target->dimension(); ++i)
    for (std::size_t j = 0; j < source->dimension(); ++j)
      m.jacobian(i, j) = m.components[i].partial(j);
  m.sample_points = sample_points.empty() ? source->sample_points : std::move(sample_points);
  for (const auto& p : m.sample_points) {
    if (p.size() != source->dimension()) {
      throw InputError("map '" + m.name + "': sample point " + to_string(p) + " has wrong size");
    }
  }
  m.source = std::move(source);
  m.target = std::move(target);
  return m;
}

MapSpec make_map(std::string name, std::shared_ptr<const ManifoldSpec> source,
                 std::shared_ptr<const ManifoldSpec> target,
                 const std::vector<std::string>& components) {
  if (!source) throw InputError("map '" + name + "': missing source");
  std::vector<Polynomial> polys;
  for (const auto& c : components) polys.push_back(parse_polynomial(c, source->coordinates));
  return make_map(std::move(name), std::move(source), std::move(target), std::move(polys));
}

MapSpec compose(const MapSpec& outer, const MapSpec& inner) {
  if (inner.target->dimension() != outer.source->dimension()) {
    throw InputError("compose: '" + outer.name + "' cannot follow '" + inner.name + "'");
  }
  std::vector<Polynomial> comps;
  for (const auto& c : outer.components) comps.push_back(c.compose(inner.components));
  return make_map(outer.name + "∘" + inner.name, inner.source, outer.target, std::move(comps),
                  inner.sample_points);
}

std::vector<Rational> pushforward(const MapSpec& map, const VectorField& x, const Point& p) {
  const auto v = x.at(p);
  return map.jacobian_at(p) * std::span<const Rational>(v);
}

ContactDefect contact_defect(const MapSpec& map, const Point& p, double contact_tolerance) {
  ContactDefect d;
  d.image = map.image(p);
  const ManifoldSpec& target = *map.target;
  const FlagReport flag = compute_flag(target, d.image);
  const AdaptedFrame frame = build_adapted_frame(target, flag);
  const std::size_t n = target.dimension();
  const std::size_t k_src = map.source->rank();
  d.target_rank = target.rank();
  d.coefficients = RationalMatrix(n, k_src);
  const RationalMatrix jac = map.jacobian_at(p);
  bool exact_zero = true;
  for (std::size_t i = 0; i < k_src; ++i) {
    const auto x = map.source->frame[i].at(p);
    const auto pushed = jac * std::span<const Rational>(x);
    const auto coeffs = frame.coframe_matrix * std::span<const Rational>(pushed);
    double norm2 = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
      d.coefficients(a, i) = coeffs[a];
      if (a >= d.target_rank) {
        if (coeffs[a] != 0) exact_zero = false;
        const double c = coeffs[a].get_d();
        norm2 += c * c;
      }
    }
    d.defect = std::max(d.defect, std::sqrt(norm2));
  }
  d.contact = contact_tolerance > 0.0 ? d.defect <= contact_tolerance : exact_zero;
  return d;
}

RationalMatrix pullback_metric(const MapSpec& map, const Point& p, double contact_tolerance) {
  const ContactDefect d = contact_defect(map, p, contact_tolerance);
  if (!d.contact) {
    throw GeometryError("map '" + map.name + "': not contact at " + to_string(p) +
                        " (defect " + std::to_string(d.defect) + ")");
  }
  const RationalMatrix horizontal = d.coefficients.block(0, 0, d.target_rank, d.coefficients.cols());
  const RationalMatrix h = map.target->metric_at(d.image);
  RationalMatrix pulled = horizontal.transpose() * h * horizontal;
  if (!is_positive_definite(pulled)) {
    throw GeometryError("map '" + map.name + "': degenerate horizontal differential at " +
                        to_string(p));
  }
  return pulled;
}

QRReport qr_constants(const MapSpec& map, const Point& p, double contact_tolerance, double tol) {
  const ManifoldSpec& source = *map.source;
  QRReport r;
  r.point = p;
  r.contact_defect = contact_defect(map, p, contact_tolerance).defect;
  const RationalMatrix fh = pullback_metric(map, p, contact_tolerance);
  const FlagReport flag = compute_flag(source, p);
  const AdaptedFrame frame = build_adapted_frame(source, flag);
  const StructureConstants b = structure_constants(frame);
  r.distortion = analyze_distortion(frame, b, frame.horizontal_metric(source.metric_at(p)),
                                    frame.horizontal_metric(fh));
  r.distortion.bounds = verify_bounds(r.distortion, tol);
  r.lambda = r.distortion.lambda;
  r.Q = r.distortion.Q;
  r.k = r.distortion.k;
  const double l1 = r.lambda.front();
  const double lk = r.lambda.back();
  const double q = static_cast<double>(r.Q);
  r.Df_norm = std::sqrt(lk);
  r.Df_min = std::sqrt(l1);
  r.H = std::sqrt(r.distortion.H2);
  r.K_popp = std::sqrt(r.distortion.K2);
  r.J_f = std::sqrt(r.distortion.det_full);
  r.K_analytic_bound = std::pow(r.Df_norm, q) / r.J_f;

  const double ratio = r.Df_norm / r.Df_min;
  auto& c = r.theorem_checks.checks;
  c.push_back(make_bound("ratio<=H", ratio, r.H, tol));
  c.push_back(make_bound("H<=K_popp", r.H, r.K_popp, tol));
  c.push_back(make_bound("K_popp<=H^(Q-1)", r.K_popp, std::pow(r.H, q - 1.0), tol));
  c.push_back(make_bound("K_analytic<=ratio^(Q-1)", r.K_analytic_bound, std::pow(ratio, q - 1.0), tol));
  c.insert(c.end(), r.distortion.bounds.checks.begin(), r.distortion.bounds.checks.end());
  return r;
}

TheoremRelations check_theorem_relations(std::span<const QRReport> reports, std::size_t Q,
                                         std::size_t k, double tol) {
  if (reports.empty()) throw InputError("theorem relations: no reports");
  TheoremRelations t;
  for (const auto& r : reports) {
    t.H_star = std::max(t.H_star, r.Df_norm / r.Df_min);
    t.K_a = std::max(t.K_a, r.K_analytic_bound);
    t.H_hat = std::max(t.H_hat, r.H);
    t.K_hat = std::max(t.K_hat, r.K_popp);
  }
  const double q = static_cast<double>(Q);
  const double kk = static_cast<double>(k);
  auto& c = t.checks.checks;
  c.push_back(make_bound("K_a<=H*^(Q-1)", t.K_a, std::pow(t.H_star, q - 1.0), tol));
  c.push_back(make_bound("H_hat<=H*^(k-1)", t.H_hat, std::pow(t.H_star, kk - 1.0), tol));
  c.push_back(make_bound("K_hat<=H_hat^(Q-1)", t.K_hat, std::pow(t.H_hat, q - 1.0), tol));
  c.push_back(make_bound("H_hat<=K_hat", t.H_hat, t.K_hat, tol));
  return t;
}

PullbackCheck popp_pullback_check(const MapSpec& map, const Point& p, double contact_tolerance) {
  if (map.source->dimension() != map.target->dimension()) {
    throw GeometryError("map '" + map.name + "': source and target dimensions differ");
  }
  const Rational jdet = determinant(map.jacobian_at(p));
  if (jdet == 0) {
    throw GeometryError("map '" + map.name + "': singular Jacobian at " + to_string(p));
  }
  PullbackCheck c;
  c.jacobian_determinant = std::abs(jdet.get_d());
  c.target_density = popp_density(*map.target, map.image(p));
  c.pulled_back_density = c.target_density * c.jacobian_determinant;
  c.source_density = popp_density(*map.source, p, pullback_metric(map, p, contact_tolerance));
  c.slack = relative_difference(c.pulled_back_density, c.source_density);
  return c;
}

std::optional<std::size_t> heisenberg_index(const ManifoldSpec& spec) {
  const std::size_t dim = spec.dimension();
  const std::size_t k = spec.rank();
  if (dim < 3 || dim % 2 == 0 || k != dim - 1) return std::nullopt;
  const std::size_t n = k / 2;
  const std::size_t vars = dim;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) {
      const Polynomial expected = Polynomial::constant(vars, i == j ? Rational(1) : Rational(0));
      if (!(spec.metric(i, j) == expected)) return std::nullopt;
    }
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      const VectorField b = lie_bracket(spec.frame[i], spec.frame[j]);
      for (std::size_t c = 0; c < dim; ++c) {
        Rational want = 0;
        if (j == i + n && c == dim - 1) want = -4;
        if (!(b.components[c] == Polynomial::constant(vars, want))) return std::nullopt;
      }
    }
  }
  return n;
}

bool DairbekovReport::all_passed() const {
  return std::all_of(relations.begin(), relations.end(),
                     [](const EqualityCheck& c) { return c.passed; });
}

DairbekovReport heisenberg_dairbekov(const MapSpec& map, const Point& p, double tol) {
  const auto ns = heisenberg_index(*map.source);
  const auto nt = heisenberg_index(*map.target);
  if (!ns || !nt || *ns != *nt) {
    throw InputError("map '" + map.name + "': source and target must be the same standard Heisenberg group");
  }
  DairbekovReport r;
  r.n = *ns;
  const double exponent = static_cast<double>(r.n + 1) / static_cast<double>(r.n);
  const ContactDefect d = contact_defect(map, p);
  if (!d.contact) {
    throw GeometryError("map '" + map.name + "': not contact at " + to_string(p));
  }
  const RationalMatrix horizontal = d.coefficients.block(0, 0, d.target_rank, d.coefficients.cols());
  r.HJ = std::abs(determinant(horizontal).get_d());
  r.J = std::pow(r.HJ, exponent);
  const QRReport qr = qr_constants(map, p, 0.0, tol);
  r.J_f = qr.J_f;
  r.K_horizontal = qr.H;
  r.K_dairbekov = std::pow(qr.Df_norm, static_cast<double>(qr.Q)) / r.J;
  double lambda_product = 1.0;
  for (double l : qr.lambda) lambda_product *= l;
  r.relations.push_back(make_equality("HJ=sqrt(prod lambda)", r.HJ, std::sqrt(lambda_product), tol));
  r.relations.push_back(make_equality("J=J_f", r.J, r.J_f, tol));
  r.relations.push_back(make_equality("J=|det Df|", r.J, std::abs(determinant(map.jacobian_at(p)).get_d()), tol));
  r.relations.push_back(
      make_equality("K_dairbekov=K_horizontal^((n+1)/n)", r.K_dairbekov, std::pow(r.K_horizontal, exponent), tol));
  return r;
}

}  // namespace poppkit

#include "poppkit/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "poppkit/linalg.hpp"
#include "poppkit/random.hpp"

namespace poppkit {

namespace {

void write_json(const Json& j, std::string& out, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    out.push_back('\n');
    out.append(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out.push_back('{');
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out.push_back(',');
        first = false;
        newline(depth + 1);
        out += Json(key).dump();
        out += indent < 0 ? ":" : ": ";
        write_json(value, out, indent, depth + 1);
      }
      newline(depth);
      out.push_back('}');
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out.push_back('[');
      bool first = true;
      for (const auto& value : j) {
        if (!first) out.push_back(',');
        first = false;
        newline(depth + 1);
        write_json(value, out, indent, depth + 1);
      }
      newline(depth);
      out.push_back(']');
      return;
    }
    case Json::value_t::number_float: {
      const double d = j.get<double>();
      if (!std::isfinite(d)) {
        out += "null";
        return;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", d);
      out += buf;
      return;
    }
    default:
      out += j.dump();
  }
}

Json to_json(const Point& p) {
  Json a = Json::array();
  for (const auto& x : p) a.push_back(to_string(x));
  return a;
}

Json to_json(const RationalMatrix& m) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_string(m(i, j)));
    rows.push_back(row);
  }
  return rows;
}

std::string describe(const Point& p) { return to_string(p); }

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::string out;
  write_json(j, out, indent, 0);
  return out;
}

Json to_json(const FlagReport& flag) {
  Json j;
  j["point"] = to_json(flag.point);
  j["ranks"] = flag.ranks;
  j["growth"] = flag.growth;
  j["weights"] = flag.weights;
  j["step"] = flag.step;
  j["Q"] = flag.homogeneous_dimension;
  j["bracket_basis"] = flag.bracket_words();
  return j;
}

Json to_json(const BoundFlags& flags) {
  Json a = Json::array();
  for (const auto& c : flags.checks) {
    a.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"slack", c.slack}, {"passed", c.passed}});
  }
  return a;
}

Json to_json(const DistortionReport& r) {
  Json j;
  j["lambda"] = r.lambda;
  j["mu"] = r.mu;
  j["mu_by_layer"] = r.mu_by_layer;
  j["H2"] = r.H2;
  j["K2"] = r.K2;
  j["det"] = r.det_full;
  j["Q"] = r.Q;
  j["k"] = r.k;
  j["weights"] = r.weights;
  j["bounds"] = to_json(r.bounds);
  return j;
}

Json to_json(const QRReport& r) {
  Json j;
  j["point"] = to_json(r.point);
  j["lambda"] = r.lambda;
  j["Df_norm"] = r.Df_norm;
  j["Df_min"] = r.Df_min;
  j["H"] = r.H;
  j["K_popp"] = r.K_popp;
  j["K_analytic_bound"] = r.K_analytic_bound;
  j["J_f"] = r.J_f;
  j["contact_defect"] = r.contact_defect;
  j["Q"] = r.Q;
  j["k"] = r.k;
  j["checks"] = to_json(r.theorem_checks);
  return j;
}

CommandResult cmd_analyze(const Manifest& manifest, const std::string& name) {
  const ManifoldSpec& spec = manifest.manifold(name);
  const EquiregularityReport eq = check_equiregular(spec);
  Json points = Json::array();
  std::vector<double> densities;
  for (const auto& flag : eq.flags) {
    Json pj = to_json(flag);
    // Singular points of a non-equiregular structure have no adapted frame.
    try {
      const double d = popp_density(spec, flag.point);
      pj["popp_density"] = d;
      densities.push_back(d);
    } catch (const GeometryError& e) {
      pj["popp_density"] = nullptr;
      pj["popp_error"] = e.what();
    }
    points.push_back(pj);
  }
  Json j;
  j["manifold"] = name;
  j["dimension"] = spec.dimension();
  j["rank"] = spec.rank();
  j["equiregular"] = eq.equiregular;
  if (eq.equiregular) {
    const FlagReport& f = eq.flags.front();
    j["Q"] = f.homogeneous_dimension;
    j["growth"] = f.growth;
    j["weights"] = f.weights;
    j["step"] = f.step;
    bool constant = densities.size() == eq.flags.size();
    for (double d : densities) constant = constant && relative_difference(d, densities.front()) <= manifest.options.tol;
    j["popp_density"] = constant ? Json(densities.front()) : Json(nullptr);
  }
  j["points"] = points;
  return {j, kExitSuccess};
}

PolynomialMatrix parse_metric_rows(const std::string& text, const std::vector<std::string>& vars) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream rs(text);
  std::string row;
  while (std::getline(rs, row, ';')) {
    std::vector<std::string> cells;
    std::stringstream cs(row);
    std::string cell;
    while (std::getline(cs, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  const std::size_t k = rows.size();
  if (k == 0) throw InputError("metric: empty matrix");
  PolynomialMatrix m(k, k, Polynomial(vars.size()));
  for (std::size_t i = 0; i < k; ++i) {
    if (rows[i].size() != k) {
      throw InputError("metric: row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                       " entries, expected " + std::to_string(k));
    }
    for (std::size_t j = 0; j < k; ++j) m(i, j) = parse_polynomial(rows[i][j], vars);
  }
  return m;
}

namespace {

struct PointGeometry {
  AdaptedFrame frame;
  StructureConstants constants;
};

PointGeometry geometry_at(const ManifoldSpec& spec, const Point& p) {
  const FlagReport flag = compute_flag(spec, p);
  AdaptedFrame frame = build_adapted_frame(spec, flag);
  StructureConstants b = structure_constants(frame);
  return {std::move(frame), std::move(b)};
}

}  // namespace

CommandResult cmd_distort(const Manifest& manifest, const std::string& name, const DistortOptions& options) {
  const ManifoldSpec& spec = manifest.manifold(name);
  if (spec.sample_points.empty()) throw InputError("manifold '" + name + "': no sample points");
  if (options.metric_b && options.random) throw InputError("distort: give either a second metric or --random");
  if (!options.metric_b && !options.random) throw InputError("distort: a second metric or --random N is required");

  const std::size_t k = spec.rank();
  std::vector<std::pair<Point, RationalMatrix>> cases;
  std::uint64_t seed = 0;
  if (options.metric_b) {
    const PolynomialMatrix b = parse_metric_rows(*options.metric_b, spec.coordinates);
    if (b.rows() != k) {
      throw InputError("manifold '" + name + "': second metric must be " + std::to_string(k) + "x" + std::to_string(k));
    }
    for (const auto& p : spec.sample_points) {
      RationalMatrix h = evaluate(b, p);
      if (!is_positive_definite(h)) {
        throw InputError("manifold '" + name + "': second metric is not positive definite at " + describe(p));
      }
      cases.emplace_back(p, std::move(h));
    }
  } else {
    if (!options.seed && !manifest.options.seed) throw InputError("distort: --random requires --seed");
    seed = options.seed ? *options.seed : *manifest.options.seed;
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < *options.random; ++i) {
      cases.emplace_back(spec.sample_points[i % spec.sample_points.size()], random_spd(k, rng));
    }
  }

  std::map<Point, PointGeometry> cache;
  Json reports = Json::array();
  std::size_t violations = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& [p, h] : cases) {
    auto it = cache.find(p);
    if (it == cache.end()) {
      try {
        it = cache.emplace(p, geometry_at(spec, p)).first;
      } catch (const Error& e) {
        throw GeometryError("manifold '" + name + "' at " + describe(p) + ": " + e.what());
      }
    }
    const PointGeometry& geo = it->second;
    DistortionReport r = analyze_distortion(geo.frame, geo.constants, geo.frame.horizontal_metric(spec.metric_at(p)),
                                            geo.frame.horizontal_metric(h));
    r.bounds = verify_bounds(r, options.tol);
    Json entry;
    entry["point"] = to_json(p);
    entry["metric_b"] = to_json(h);
    entry.update(to_json(r));
    BoundFlags all = r.bounds;
    if (r.mu_by_layer.size() == 2 && r.k >= 2) {
      const BoundFlags s2 = step2_refined_bounds(r, options.tol);
      entry["step2"] = to_json(s2);
      all.checks.insert(all.checks.end(), s2.checks.begin(), s2.checks.end());
    }
    for (const auto& c : all.checks) {
      if (!c.passed) ++violations;
      worst = std::min(worst, c.slack);
    }
    reports.push_back(entry);
  }
  Json j;
  j["manifold"] = name;
  j["mode"] = options.metric_b ? "metric" : "random";
  if (options.random) j["seed"] = seed;
  j["tol"] = options.tol;
  j["reports"] = reports;
  j["violations"] = violations;
  j["worst_slack"] = worst;
  return {j, violations == 0 ? kExitSuccess : kExitCheckFailure};
}

CommandResult cmd_qrcheck(const Manifest& manifest, const std::string& name, double tol, double contact_tol) {
  const MapSpec& map = manifest.map(name);
  const auto src_eq = check_equiregular(*map.source);
  const auto tgt_eq = check_equiregular(*map.target);
  if (!src_eq.equiregular || !tgt_eq.equiregular) {
    throw InputError("map '" + name + "': source '" + map.source->name + "' and target '" + map.target->name +
                     "' must be equiregular");
  }
  if (map.sample_points.empty()) throw InputError("map '" + name + "': no sample points");

  Json j;
  j["map"] = name;
  j["source"] = map.source->name;
  j["target"] = map.target->name;
  j["tol"] = tol;

  Json offenders = Json::array();
  double worst_defect = -1.0;
  Point worst_point;
  for (const auto& p : map.sample_points) {
    const ContactDefect d = contact_defect(map, p, contact_tol);
    if (!d.contact) {
      offenders.push_back({{"point", to_json(p)}, {"defect", d.defect}});
      if (d.defect > worst_defect) {
        worst_defect = d.defect;
        worst_point = p;
      }
    }
  }
  if (!offenders.empty()) {
    std::string listed;
    for (const auto& o : offenders) {
      std::string pt = "(";
      for (std::size_t i = 0; i < o["point"].size(); ++i) pt += (i ? ", " : "") + o["point"][i].get<std::string>();
      listed += (listed.empty() ? "" : ", ") + pt + ")";
    }
    j["contact"] = false;
    j["error"] = "map '" + name + "' is not contact: contact defect > 0 at " + listed + "; worst at " +
                 describe(worst_point);
    j["non_contact_points"] = offenders;
    j["worst_point"] = to_json(worst_point);
    j["worst_defect"] = worst_defect;
    return {j, kExitCheckFailure};
  }
  j["contact"] = true;

  std::vector<QRReport> reports;
  Json rj = Json::array();
  bool ok = true;
  for (const auto& p : map.sample_points) {
    QRReport r;
    try {
      r = qr_constants(map, p, contact_tol, tol);
    } catch (const GeometryError& e) {
      throw GeometryError("map '" + name + "' at " + describe(p) + ": " + e.what());
    }
    ok = ok && r.theorem_checks.all_passed();
    rj.push_back(to_json(r));
    reports.push_back(std::move(r));
  }
  j["reports"] = rj;
  const TheoremRelations rel = check_theorem_relations(reports, reports.front().Q, reports.front().k, tol);
  ok = ok && rel.checks.all_passed();
  j["constants"] = {{"H_star", rel.H_star}, {"K_a", rel.K_a}, {"H_hat", rel.H_hat}, {"K_hat", rel.K_hat}};
  j["relations"] = to_json(rel.checks);

  if (map.source->dimension() == map.target->dimension()) {
    Json pj = Json::array();
    double worst = 0.0;
    for (const auto& p : map.sample_points) {
      if (determinant(map.jacobian_at(p)) == 0) {
        pj.push_back({{"point", to_json(p)}, {"skipped", "singular Jacobian"}});
        continue;
      }
      const PullbackCheck c = popp_pullback_check(map, p, contact_tol);
      worst = std::max(worst, c.slack);
      pj.push_back({{"point", to_json(p)},
                    {"target_density", c.target_density},
                    {"jacobian_determinant", c.jacobian_determinant},
                    {"pulled_back_density", c.pulled_back_density},
                    {"source_density", c.source_density},
                    {"slack", c.slack},
                    {"passed", c.slack <= tol}});
      ok = ok && c.slack <= tol;
    }
    j["popp_pullback"] = pj;
    j["popp_pullback_worst_slack"] = worst;
  }

  const auto ns = heisenberg_index(*map.source);
  const auto nt = heisenberg_index(*map.target);
  if (ns && nt && *ns == *nt) {
    Json dj = Json::array();
    for (const auto& p : map.sample_points) {
      const DairbekovReport d = heisenberg_dairbekov(map, p, tol);
      Json rels = Json::array();
      for (const auto& c : d.relations) {
        rels.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"difference", c.difference}, {"passed", c.passed}});
      }
      // For n >= 2 the two constants are reported without asserting a relation.
      const bool asserted = d.n == 1;
      if (asserted) ok = ok && d.all_passed();
      dj.push_back({{"point", to_json(p)},
                    {"n", d.n},
                    {"HJ", d.HJ},
                    {"J", d.J},
                    {"J_f", d.J_f},
                    {"K_dairbekov", d.K_dairbekov},
                    {"K_horizontal", d.K_horizontal},
                    {"asserted", asserted},
                    {"relations", rels}});
    }
    j["dairbekov"] = dj;
  }
  j["passed"] = ok;
  return {j, ok ? kExitSuccess : kExitCheckFailure};
}

// ---------------------------------------------------------------------------
// Self-test

namespace {

class Suite {
 public:
  explicit Suite(std::string name, double tol) : name_(std::move(name)), tol_(tol) {}

  void bound(double slack, const std::string& what) {
    ++cases_;
    worst_ = std::min(worst_, slack);
    if (!(slack >= -tol_)) fail(what + " (slack " + std::to_string(slack) + ")");
  }

  void equal(double a, double b, const std::string& what, double tol) {
    ++cases_;
    const double diff = relative_difference(a, b);
    worst_ = std::min(worst_, -diff);
    if (!(diff <= tol)) fail(what + " (" + std::to_string(a) + " vs " + std::to_string(b) + ")");
  }

  void exact(bool ok, const std::string& what) {
    ++cases_;
    worst_ = std::min(worst_, ok ? 0.0 : -1.0);
    if (!ok) fail(what);
  }

  void fail(const std::string& message) {
    passed_ = false;
    if (failures_.size() < 5) failures_.push_back(message);
  }

  bool passed() const { return passed_; }
  const std::string& name() const { return name_; }

  Json to_json() const {
    return {{"name", name_},
            {"passed", passed_},
            {"cases", cases_},
            {"worst_slack", cases_ ? worst_ : 0.0},
            {"failures", failures_}};
  }

  std::string summary() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", cases_ ? worst_ : 0.0);
    return "suite " + name_ + ": " + (passed_ ? "PASS" : "FAIL") + " cases=" + std::to_string(cases_) +
           " worst_slack=" + buf;
  }

 private:
  std::string name_;
  double tol_;
  bool passed_ = true;
  std::size_t cases_ = 0;
  double worst_ = std::numeric_limits<double>::infinity();
  std::vector<std::string> failures_;
};

std::mt19937_64 suite_rng(std::uint64_t seed, std::uint64_t suite) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(suite)};
  return std::mt19937_64(seq);
}

std::vector<const ManifoldSpec*> equiregular_manifolds(const Manifest& m) {
  std::vector<const ManifoldSpec*> out;
  for (const auto& name : m.manifold_order) {
    const ManifoldSpec& s = m.manifold(name);
    if (!s.sample_points.empty() && check_equiregular(s).equiregular) out.push_back(&s);
  }
  return out;
}

std::string at(const ManifoldSpec& s, const Point& p) { return s.name + " at " + describe(p); }

void suite_brackets(Suite& suite, const Manifest& m, std::mt19937_64& rng) {
  for (const auto& name : m.manifold_order) {
    const std::size_t n = m.manifold(name).dimension();
    for (int trial = 0; trial < 3; ++trial) {
      const VectorField x = random_field(n, 2, rng, "X");
      const VectorField y = random_field(n, 2, rng, "Y");
      const VectorField z = random_field(n, 2, rng, "Z");
      const Rational a = random_rational(rng), b = random_rational(rng);
      const std::string where = name + " trial " + std::to_string(trial);
      const VectorField xy = lie_bracket(x, y);
      const VectorField yx = lie_bracket(y, x);
      std::vector<Rational> minus_one{Rational(-1)};
      suite.exact(same_components(xy, linear_combination(minus_one, std::span<const VectorField>(&yx, 1), "")),
                  "antisymmetry " + where);
      const std::vector<Rational> ab{a, b};
      const std::vector<VectorField> xy_pair{x, y};
      const VectorField lhs = lie_bracket(linear_combination(ab, xy_pair, ""), z);
      const std::vector<VectorField> brackets{lie_bracket(x, z), lie_bracket(y, z)};
      suite.exact(same_components(lhs, linear_combination(ab, brackets, "")), "bilinearity " + where);
      const std::vector<Rational> ones{Rational(1), Rational(1), Rational(1)};
      const std::vector<VectorField> cyclic{lie_bracket(x, lie_bracket(y, z)), lie_bracket(y, lie_bracket(z, x)),
                                            lie_bracket(z, lie_bracket(x, y))};
      suite.exact(linear_combination(ones, cyclic, "").is_zero(), "Jacobi identity " + where);
    }
  }
}

void suite_eigen(Suite& suite, std::mt19937_64& rng, double tol) {
  for (std::size_t trial = 0; trial < 20; ++trial) {
    const std::size_t k = 1 + trial % 5;
    const RationalMatrix g = random_spd(k, rng);
    const RationalMatrix h = random_spd(k, rng);
    const std::vector<double> l = generalized_eigenvalues(to_real(g), to_real(h));
    double prod = 1.0;
    for (double x : l) prod *= x;
    const std::string where = "k=" + std::to_string(k) + " trial " + std::to_string(trial);
    suite.equal(prod, Rational(determinant(h) / determinant(g)).get_d(), "det identity " + where, tol);
    const std::vector<double> inv = generalized_eigenvalues(to_real(h), to_real(g));
    for (std::size_t i = 0; i < k; ++i) suite.equal(inv[i], 1.0 / l[k - 1 - i], "swap " + where, tol);
    for (double x : generalized_eigenvalues(to_real(g), to_real(g))) suite.equal(x, 1.0, "g=h " + where, tol);
  }
}

void suite_flag(Suite& suite, const Manifest& m, Json& verdicts) {
  for (const auto& name : m.manifold_order) {
    const ManifoldSpec& s = m.manifold(name);
    if (s.sample_points.empty()) continue;
    const EquiregularityReport eq = check_equiregular(s);
    verdicts[name] = eq.equiregular;
    for (const auto& f : eq.flags) {
      const std::string where = at(s, f.point);
      bool increasing = true;
      for (std::size_t i = 1; i < f.ranks.size(); ++i) increasing = increasing && f.ranks[i] > f.ranks[i - 1];
      suite.exact(increasing, "ranks increase " + where);
      suite.exact(f.ranks.back() == s.dimension(), "full rank at top " + where);
      std::size_t sum = 0, q = 0;
      for (std::size_t i = 0; i < f.growth.size(); ++i) {
        sum += f.growth[i];
        q += (i + 1) * f.growth[i];
      }
      suite.exact(sum == s.dimension(), "growth sums to n " + where);
      suite.exact(q == f.homogeneous_dimension, "Q = sum s n_s " + where);
      std::size_t wsum = 0;
      for (std::size_t w : f.weights) wsum += w;
      suite.exact(wsum == f.homogeneous_dimension && std::is_sorted(f.weights.begin(), f.weights.end()),
                  "weights " + where);
      suite.exact(f.step == f.ranks.size(), "step " + where);
    }
  }
}

void suite_frame_invariance(Suite& suite, const std::vector<const ManifoldSpec*>& specs, std::size_t frames,
                            std::mt19937_64& rng, double tol, bool corrupt) {
  bool corrupted = false;
  for (const ManifoldSpec* s : specs) {
    std::vector<PointGeometry> base;
    std::vector<double> density;
    for (const auto& p : s->sample_points) {
      base.push_back(geometry_at(*s, p));
      const PointGeometry& geo = base.back();
      density.push_back(popp_density(geo.frame, popp_extension(*s, geo.frame, geo.constants)));
    }
    for (std::size_t i = 1; i < density.size(); ++i) {
      suite.equal(density[i], density[0], "density constant on " + s->name, tol);
    }
    for (std::size_t t = 0; t < frames; ++t) {
      const std::size_t pi = t % base.size();
      const Point& p = s->sample_points[pi];
      const AdaptedFrame& a = base[pi].frame;
      const AdaptedFrame b = change_frame(a, random_adapted_transform(a.layer_bounds, rng));
      StructureConstants cb = structure_constants(b);
      const bool here = corrupt && !corrupted && cb.layers().size() > 0;
      if (here) {
        corrupted = true;
        cb.mutable_layers().front().values(0, 0) += 1;
      }
      const std::string where = at(*s, p) + " frame " + std::to_string(t);
      try {
        const PoppExtension eb = popp_extension(b, cb, b.horizontal_metric(s->metric_at(p)));
        suite.equal(popp_density(b, eb), density[pi], "density invariance " + where, tol);
      } catch (const Error& e) {
        suite.fail("density invariance " + where + ": " + e.what());
      }
      const FrameLawReport law = verify_frame_law(*s, a, b, tol);
      suite.exact(law.lower_block_triangular, "block lower triangular " + where);
      suite.bound(-law.block_law_residual, "block law " + where);
    }
  }
}

void suite_bounds(Suite& suite, Suite& step2, const std::vector<const ManifoldSpec*>& specs, std::size_t pairs,
                  std::mt19937_64& rng, double tol) {
  for (const ManifoldSpec* s : specs) {
    std::vector<PointGeometry> geo;
    for (const auto& p : s->sample_points) geo.push_back(geometry_at(*s, p));
    for (std::size_t i = 0; i < pairs; ++i) {
      const std::size_t pi = i % geo.size();
      const AdaptedFrame& f = geo[pi].frame;
      const RationalMatrix g = random_spd(s->rank(), rng);
      const RationalMatrix h = random_spd(s->rank(), rng);
      const DistortionReport r = analyze_distortion(f, geo[pi].constants, g, h);
      const std::string where = at(*s, s->sample_points[pi]) + " pair " + std::to_string(i);
      for (const auto& c : verify_bounds(r, tol).checks) suite.bound(c.slack, c.name + " " + where);
      if (r.mu_by_layer.size() == 2 && r.k >= 2) {
        for (const auto& c : step2_refined_bounds(r, tol).checks) step2.bound(c.slack, c.name + " " + where);
        if (r.k == 2 && r.mu_by_layer[1].size() == 1) {
          const double l12 = r.lambda[0] * r.lambda[1];
          step2.equal(r.mu_by_layer[1][0], l12, "mu = l1 l2 " + where, tol);
          step2.equal(r.det_full, l12 * l12, "det = (l1 l2)^2 " + where, tol);
        }
      }
    }
  }
}

void suite_distortion_invariance(Suite& suite, const std::vector<const ManifoldSpec*>& specs, std::size_t frames,
                                 std::mt19937_64& rng, double tol) {
  for (const ManifoldSpec* s : specs) {
    for (std::size_t t = 0; t < frames; ++t) {
      const Point& p = s->sample_points[t % s->sample_points.size()];
      const PointGeometry a = geometry_at(*s, p);
      const AdaptedFrame b = change_frame(a.frame, random_adapted_transform(a.frame.layer_bounds, rng));
      const StructureConstants cb = structure_constants(b);
      const RationalMatrix g = random_spd(s->rank(), rng);
      const RationalMatrix h = random_spd(s->rank(), rng);
      // g and h are given on the generators; each frame sees them in its own basis.
      const DistortionReport ra =
          analyze_distortion(a.frame, a.constants, a.frame.horizontal_metric(g), a.frame.horizontal_metric(h));
      const DistortionReport rb = analyze_distortion(b, cb, b.horizontal_metric(g), b.horizontal_metric(h));
      const std::string where = at(*s, p) + " frame " + std::to_string(t);
      for (std::size_t i = 0; i < ra.mu.size(); ++i) suite.equal(ra.mu[i], rb.mu[i], "mu " + where, tol);
      suite.equal(ra.H2, rb.H2, "H2 " + where, tol);
      suite.equal(ra.K2, rb.K2, "K2 " + where, tol);
    }
  }
}

void suite_scaling(Suite& suite, const std::vector<const ManifoldSpec*>& specs, std::mt19937_64& rng, double tol) {
  for (const ManifoldSpec* s : specs) {
    for (const auto& p : s->sample_points) {
      const PointGeometry geo = geometry_at(*s, p);
      const RationalMatrix g = geo.frame.horizontal_metric(s->metric_at(p));
      Rational c = random_rational(rng);
      c = c * c + 1;
      const DistortionReport r = analyze_distortion(geo.frame, geo.constants, g, c * g);
      const std::string where = at(*s, p);
      suite.equal(r.H2, 1.0, "H2 of c g " + where, tol);
      suite.equal(r.K2, 1.0, "K2 of c g " + where, tol);
      for (std::size_t l = 0; l < r.mu_by_layer.size(); ++l)
        for (double mu : r.mu_by_layer[l])
          suite.equal(mu, std::pow(c.get_d(), static_cast<double>(l + 1)), "mu_s = c^s " + where, tol);
      if (r.mu_by_layer.size() == 1) {
        const PoppExtension e = popp_extension(geo.frame, geo.constants, g);
        suite.exact(e.exact_blocks.size() == 1 && e.exact_blocks[0] == g, "Riemannian extension = metric " + where);
        const RationalMatrix h = random_spd(s->rank(), rng);
        const DistortionReport rr = analyze_distortion(geo.frame, geo.constants, g, h);
        suite.equal(rr.K2, rr.H2, "Riemannian K2 = H2 " + where, tol);
        suite.exact(rr.Q == s->dimension(), "Riemannian Q = n " + where);
      }
    }
  }
}

void suite_maps(Suite& suite, const Manifest& m, double tol, double contact_tol, Json& rejected) {
  for (const auto& name : m.map_order) {
    const MapSpec& map = m.map(name);
    if (!check_equiregular(*map.source).equiregular || !check_equiregular(*map.target).equiregular) continue;
    bool contact = true;
    for (const auto& p : map.sample_points) contact = contact && contact_defect(map, p, contact_tol).contact;
    if (!contact) {
      rejected.push_back(name);
      continue;
    }
    std::vector<QRReport> reports;
    for (const auto& p : map.sample_points) {
      const std::string where = name + " at " + describe(p);
      try {
        reports.push_back(qr_constants(map, p, contact_tol, tol));
      } catch (const Error& e) {
        suite.fail(where + ": " + e.what());
        continue;
      }
      for (const auto& c : reports.back().theorem_checks.checks) suite.bound(c.slack, c.name + " " + where);
      if (map.source->dimension() == map.target->dimension() && determinant(map.jacobian_at(p)) != 0) {
        suite.bound(-popp_pullback_check(map, p, contact_tol).slack, "Popp pullback " + where);
      }
      const auto ns = heisenberg_index(*map.source);
      const auto nt = heisenberg_index(*map.target);
      if (ns && nt && *ns == 1 && *nt == 1) {
        for (const auto& c : heisenberg_dairbekov(map, p, tol).relations) suite.bound(-c.difference, c.name + " " + where);
      }
    }
    if (reports.empty()) continue;
    const TheoremRelations rel = check_theorem_relations(reports, reports.front().Q, reports.front().k, tol);
    for (const auto& c : rel.checks.checks) suite.bound(c.slack, c.name + " " + name);
  }
}

}  // namespace

CommandResult cmd_selftest(const Manifest& manifest, const SelftestOptions& options) {
  const double tol = options.tol;
  const std::size_t frames = manifest.options.frames;
  const std::size_t pairs = manifest.options.random_pairs;
  const auto specs = equiregular_manifolds(manifest);

  std::vector<Suite> suites;
  Json verdicts = Json::object();
  Json rejected = Json::array();
  auto run = [&](const std::string& name, auto&& body) {
    Suite s(name, tol);
    try {
      body(s);
    } catch (const Error& e) {
      s.fail(std::string("unexpected error: ") + e.what());
    }
    if (options.log) *options.log << s.summary() << '\n';
    suites.push_back(std::move(s));
  };

  std::uint64_t index = 0;
  run("brackets", [&](Suite& s) {
    auto rng = suite_rng(options.seed, index++);
    suite_brackets(s, manifest, rng);
  });
  run("eigen", [&](Suite& s) {
    auto rng = suite_rng(options.seed, index++);
    suite_eigen(s, rng, tol);
  });
  run("flag", [&](Suite& s) { suite_flag(s, manifest, verdicts); });
  run("frame_invariance", [&](Suite& s) {
    auto rng = suite_rng(options.seed, index++);
    suite_frame_invariance(s, specs, frames, rng, tol, options.corrupt_structure_constant);
  });
  {
    Suite bounds("bounds", tol), step2("step2", tol);
    auto rng = suite_rng(options.seed, index++);
    try {
      suite_bounds(bounds, step2, specs, pairs, rng, tol);
    } catch (const Error& e) {
      bounds.fail(std::string("unexpected error: ") + e.what());
    }
    for (Suite* s : {&bounds, &step2}) {
      if (options.log) *options.log << s->summary() << '\n';
      suites.push_back(std::move(*s));
    }
  }
  run("distortion_invariance", [&](Suite& s) {
    auto rng = suite_rng(options.seed, index++);
    suite_distortion_invariance(s, specs, frames, rng, tol);
  });
  run("scaling", [&](Suite& s) {
    auto rng = suite_rng(options.seed, index++);
    suite_scaling(s, specs, rng, tol);
  });
  run("maps", [&](Suite& s) { suite_maps(s, manifest, tol, manifest.options.contact_tol, rejected); });

  bool ok = true;
  Json sj = Json::array();
  for (const auto& s : suites) {
    ok = ok && s.passed();
    sj.push_back(s.to_json());
  }
  if (options.log) *options.log << "selftest: " << (ok ? "PASS" : "FAIL") << '\n';
  Json j;
  j["seed"] = options.seed;
  j["tol"] = tol;
  j["equiregular"] = verdicts;
  j["rejected_maps"] = rejected;
  j["suites"] = sj;
  j["passed"] = ok;
  return {j, ok ? kExitSuccess : kExitCheckFailure};
}

}  // namespace poppkit

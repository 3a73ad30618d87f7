#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "poppkit/commands.hpp"

namespace {

using namespace poppkit;

// "bundled" selects the manifest compiled into the library.
Manifest load(const std::string& path) {
  if (path == "bundled") return bundled_manifest();
  return parse_manifest(path);
}

int emit(const CommandResult& result, const std::optional<std::string>& json_path, bool print) {
  const std::string text = dump_json(result.report) + "\n";
  if (json_path) {
    std::ofstream out(*json_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write '" << *json_path << "'\n";
      return kExitInputError;
    }
    out << text;
  }
  if (print) std::cout << text;
  if (result.report.contains("error")) std::cerr << "error: " << result.report["error"].get<std::string>() << "\n";
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Popp measure and distortion checks for polynomial subRiemannian structures"};
  app.require_subcommand(1);
  std::optional<double> tol;
  std::optional<std::string> json_path;
  app.add_option("--tol", tol, "Relative tolerance (default 1e-9)")->check(CLI::PositiveNumber);
  app.add_option("--json", json_path, "Also write the JSON report to this path");

  std::string manifest_path, target;

  auto* analyze = app.add_subcommand("analyze", "Flag, growth vector, Q and Popp density at each sample point");
  analyze->add_option("manifest", manifest_path, "Manifest file, or 'bundled'")->required();
  analyze->add_option("manifold", target, "Manifold name")->required();

  DistortOptions distort_options;
  std::optional<std::size_t> random;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> metric_b;
  auto* distort = app.add_subcommand("distort", "Distortion eigenvalues and bound checks for a metric pair");
  distort->add_option("manifest", manifest_path, "Manifest file, or 'bundled'")->required();
  distort->add_option("manifold", target, "Manifold name")->required();
  auto* metric_opt = distort->add_option("--metric-b", metric_b, "Second metric, rows ';' entries ','");
  auto* random_opt = distort->add_option("--random", random, "Number of random second metrics");
  metric_opt->excludes(random_opt);
  distort->add_option("--seed", seed, "Random seed");

  double contact_tol = 0.0;
  auto* qrcheck = app.add_subcommand("qrcheck", "Quasiregularity constants of a map");
  qrcheck->add_option("manifest", manifest_path, "Manifest file, or 'bundled'")->required();
  qrcheck->add_option("map", target, "Map name")->required();
  qrcheck->add_option("--contact-tol", contact_tol, "Accept contact defects up to this value")
      ->check(CLI::NonNegativeNumber);

  std::uint64_t selftest_seed = 7;
  std::string selftest_manifest = "bundled";
  bool corrupt = false;
  auto* selftest = app.add_subcommand("selftest", "Run every property suite");
  selftest->add_option("--seed", selftest_seed, "Random seed");
  selftest->add_option("--manifest", selftest_manifest, "Manifest file, or 'bundled'");
  selftest->add_flag("--corrupt-structure-constant", corrupt, "Fault injection for testing the harness")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (*analyze) {
      const Manifest m = load(manifest_path);
      return emit(cmd_analyze(m, target), json_path, true);
    }
    if (*distort) {
      const Manifest m = load(manifest_path);
      distort_options.metric_b = metric_b;
      distort_options.random = random;
      distort_options.seed = seed;
      distort_options.tol = tol.value_or(m.options.tol);
      return emit(cmd_distort(m, target, distort_options), json_path, true);
    }
    if (*qrcheck) {
      const Manifest m = load(manifest_path);
      return emit(cmd_qrcheck(m, target, tol.value_or(m.options.tol), contact_tol), json_path, true);
    }
    if (*selftest) {
      const Manifest m = load(selftest_manifest);
      SelftestOptions options;
      options.seed = selftest_seed;
      options.tol = tol.value_or(m.options.tol);
      options.corrupt_structure_constant = corrupt;
      options.log = &std::cout;
      return emit(cmd_selftest(m, options), json_path, false);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitInputError;
}

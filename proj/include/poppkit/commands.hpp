#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"
#include "poppkit/manifest.hpp"

namespace poppkit {

using Json = nlohmann::ordered_json;

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitCheckFailure = 1;
inline constexpr int kExitInputError = 2;

struct CommandResult {
  Json report;
  int exit_code = kExitSuccess;
};

/// JSON text with every double printed to 17 significant digits.
std::string dump_json(const Json& j, int indent = 2);

Json to_json(const FlagReport& flag);
Json to_json(const DistortionReport& report);
Json to_json(const BoundFlags& flags);
Json to_json(const QRReport& report);

CommandResult cmd_analyze(const Manifest& manifest, const std::string& manifold);

struct DistortOptions {
  /// Second metric as rows separated by ';' and entries by ','; entries are
  /// polynomials in the manifold coordinates.
  std::optional<std::string> metric_b;
  std::optional<std::size_t> random;
  std::optional<std::uint64_t> seed;
  double tol = kDefaultTolerance;
};

CommandResult cmd_distort(const Manifest& manifest, const std::string& manifold,
                          const DistortOptions& options);

CommandResult cmd_qrcheck(const Manifest& manifest, const std::string& map, double tol,
                          double contact_tol = 0.0);

struct SelftestOptions {
  std::uint64_t seed = 7;
  double tol = kDefaultTolerance;
  /// Fault injection: perturbs one structure constant in one random frame.
  bool corrupt_structure_constant = false;
  /// Per-suite summary lines go here when set.
  std::ostream* log = nullptr;
};

CommandResult cmd_selftest(const Manifest& manifest, const SelftestOptions& options);

/// Parses "a,b;c,d" into a k x k polynomial matrix.
PolynomialMatrix parse_metric_rows(const std::string& text, const std::vector<std::string>& vars);

}  // namespace poppkit

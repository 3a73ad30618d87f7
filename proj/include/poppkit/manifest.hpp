#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "poppkit/maps.hpp"

namespace poppkit {

struct ManifestOptions {
  double tol = kDefaultTolerance;
  std::optional<std::uint64_t> seed;
  std::size_t random_pairs = 100;
  std::size_t frames = 20;
  double contact_tol = 0.0;
};

struct Manifest {
  std::map<std::string, std::shared_ptr<const ManifoldSpec>> manifolds;
  std::map<std::string, MapSpec> maps;
  std::vector<std::string> manifold_order;  // declaration order
  std::vector<std::string> map_order;
  ManifestOptions options;

  /// InputError naming the missing entry.
  const ManifoldSpec& manifold(const std::string& name) const;
  const MapSpec& map(const std::string& name) const;
};

/// Sections [options], [manifold.NAME] and [map.NAME] holding `key = value`
/// lines. Values are strings, numbers or (possibly multi-line) arrays.
/// Comments start with '#'. Errors carry the line and column.
Manifest parse_manifest_text(std::string_view text, const std::string& origin = "<text>");
Manifest parse_manifest(const std::filesystem::path& path);

/// The manifest compiled into the library.
const std::string& bundled_manifest_text();
Manifest bundled_manifest();

}  // namespace poppkit

#pragma once

#include "fsi/generators.hpp"
#include "fsi/majorization.hpp"

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fsi::cli {

/// Target spectrum for `feasibility` and `realize`.
struct CanonicalMu {};                      // μ = λ#
struct FloodMu { double level = 0.0; };     // μ = NC water-filling of λ# at level
struct ExplicitMu { RealLists values; };    // one list of length n per fiber
using MuSpec = std::variant<CanonicalMu, FloodMu, ExplicitMu>;

struct RunConfig {
  int k = 1;
  int M = 1;
  Index L = 1;
  double rank_tol = tolerance::rank;
  std::uint64_t seed = 0;
  GeneratorSpec generators_W;
  std::optional<GeneratorSpec> generators_V;  // empty means "same-as-W"

  std::optional<double> w;
  std::optional<double> w_factor;             // w = w_factor·w0, at least 1
  std::optional<double> c;                    // empty means "auto"
  std::vector<std::string> phi;
  MuSpec mu = CanonicalMu{};

  std::string format = "json";
  bool include_timings = false;

  std::string config_hash;  // FNV-1a of the normalized config text
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"analyze",     "angles",        "aliasing",
                                              "canonical-dual", "tight-check", "optimal-dual",
                                              "potentials",  "feasibility",   "realize"};
  return names;
}

std::uint64_t fnv1a(std::string_view bytes);

/// Validates against the published schema and converts. Violations raise
/// ValidationError("schema_violation") naming the offending path.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

}  // namespace fsi::cli

#include "fsi/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace fsi::cli {

namespace {

using nlohmann::json;

[[noreturn]] void violation(const std::string& path, const std::string& what) {
  throw ValidationError("schema_violation", path + ": " + what);
}

void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
  const std::set<std::string> names(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items()) {
    if (!names.count(key)) violation(path + "." + key, "unknown field");
  }
}

const json& require(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) violation(path + "." + key, "missing required field");
  return obj.at(key);
}

std::int64_t integer(const json& v, const std::string& path, std::int64_t lo, std::int64_t hi) {
  if (!v.is_number_integer()) violation(path, "expected an integer");
  const auto x = v.get<std::int64_t>();
  if (x < lo || x > hi) violation(path, "expected an integer in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return x;
}

double number(const json& v, const std::string& path) {
  if (!v.is_number()) violation(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) violation(path, "expected a finite number");
  return x;
}

double nonnegative(const json& v, const std::string& path) {
  const double x = number(v, path);
  if (x < 0.0) violation(path, "expected a number >= 0");
  return x;
}

double positive(const json& v, const std::string& path) {
  const double x = number(v, path);
  if (!(x > 0.0)) violation(path, "expected a number > 0");
  return x;
}

Complex entry(const json& v, const std::string& path) {
  if (v.is_number()) return {number(v, path), 0.0};
  if (v.is_array() && v.size() == 2) return {number(v[0], path + "[0]"), number(v[1], path + "[1]")};
  violation(path, "expected a number or a [re, im] pair");
}

Matrix<Complex> matrix(const json& v, const std::string& path, Index rows) {
  if (!v.is_array() || static_cast<Index>(v.size()) != rows) {
    violation(path, "expected an array of " + std::to_string(rows) + " rows");
  }
  Index cols = -1;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_array()) violation(path + "[" + std::to_string(i) + "]", "expected a row array");
    if (cols < 0) cols = static_cast<Index>(v[i].size());
    if (static_cast<Index>(v[i].size()) != cols) violation(path + "[" + std::to_string(i) + "]", "ragged row");
  }
  Matrix<Complex> m(rows, std::max<Index>(cols, 0));
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      const auto p = path + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
      m(i, j) = entry(v[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)], p);
    }
  }
  return m;
}

GeneratorSpec generators(const json& v, const std::string& path, Index L, Index fibers, int k,
                         std::uint64_t seed, std::uint64_t default_stream) {
  if (!v.is_object()) violation(path, "expected an object");
  const auto& kind_v = require(v, path, "kind");
  if (!kind_v.is_string()) violation(path + ".kind", "expected a string");
  const auto kind = kind_v.get<std::string>();
  if (kind == "explicit") {
    only_keys(v, path, {"kind", "fibers"});
    const auto& list = require(v, path, "fibers");
    if (!list.is_array() || static_cast<Index>(list.size()) != fibers) {
      violation(path + ".fibers", "expected one matrix per fiber (" + std::to_string(fibers) + ")");
    }
    ExplicitGenerators out;
    for (std::size_t i = 0; i < list.size(); ++i) {
      out.fibers.push_back(matrix(list[i], path + ".fibers[" + std::to_string(i) + "]", L));
    }
    return out;
  }
  if (kind == "analytic") {
    only_keys(v, path, {"kind", "profiles"});
    const auto& list = require(v, path, "profiles");
    if (!list.is_array() || list.empty()) violation(path + ".profiles", "expected a non-empty array");
    AnalyticGenerators out;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const auto p = path + ".profiles[" + std::to_string(i) + "]";
      const auto& item = list[i];
      if (!item.is_object()) violation(p, "expected an object");
      only_keys(item, p, {"shape", "parameter", "amplitude", "shift"});
      AnalyticProfile profile;
      const auto& shape = require(item, p, "shape");
      const std::string s = shape.is_string() ? shape.get<std::string>() : "";
      if (s == "geometric") {
        profile.kind = ProfileKind::geometric;
      } else if (s == "gaussian") {
        profile.kind = ProfileKind::gaussian;
      } else if (s == "cauchy") {
        profile.kind = ProfileKind::cauchy;
      } else {
        violation(p + ".shape", "expected one of geometric, gaussian, cauchy");
      }
      if (item.contains("parameter")) profile.parameter = positive(item["parameter"], p + ".parameter");
      if (profile.kind == ProfileKind::geometric && profile.parameter <= 1.0) {
        violation(p + ".parameter", "geometric rate must exceed 1");
      }
      if (item.contains("amplitude")) profile.amplitude = number(item["amplitude"], p + ".amplitude");
      if (item.contains("shift")) {
        const auto& sh = item["shift"];
        if (!sh.is_array() || static_cast<int>(sh.size()) != k) {
          violation(p + ".shift", "expected an array of length k");
        }
        profile.shift.resize(k);
        for (int a = 0; a < k; ++a) profile.shift(a) = number(sh[static_cast<std::size_t>(a)], p + ".shift");
      }
      out.profiles.push_back(profile);
    }
    return out;
  }
  if (kind == "random") {
    only_keys(v, path, {"kind", "count", "rank", "fiber_ranks", "scale", "stream"});
    RandomGenerators out;
    out.count = integer(require(v, path, "count"), path + ".count", 1, 64);
    out.seed = seed;
    out.stream = default_stream;
    if (v.contains("stream")) out.stream = static_cast<std::uint64_t>(integer(v["stream"], path + ".stream", 0, INT64_MAX));
    if (v.contains("scale")) out.scale = positive(v["scale"], path + ".scale");
    if (v.contains("rank") && v.contains("fiber_ranks")) violation(path, "rank and fiber_ranks are exclusive");
    if (v.contains("rank")) out.rank = integer(v["rank"], path + ".rank", 0, 64);
    if (v.contains("fiber_ranks")) {
      const auto& list = v["fiber_ranks"];
      if (!list.is_array() || static_cast<Index>(list.size()) != fibers) {
        violation(path + ".fiber_ranks", "expected one rank per fiber (" + std::to_string(fibers) + ")");
      }
      for (std::size_t i = 0; i < list.size(); ++i) {
        out.fiber_ranks.push_back(integer(list[i], path + ".fiber_ranks[" + std::to_string(i) + "]", 0, 64));
      }
    }
    return out;
  }
  violation(path + ".kind", "expected one of explicit, analytic, random");
}

}  // namespace

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunConfig parse_config(const json& doc) {
  const std::string root = "config";
  if (!doc.is_object()) violation(root, "expected an object");
  only_keys(doc, root, {"grid", "L", "rank_tol", "seed", "generators_W", "generators_V", "params", "format",
                        "include_timings"});
  RunConfig cfg;

  const auto& grid = require(doc, root, "grid");
  if (!grid.is_object()) violation(root + ".grid", "expected an object");
  only_keys(grid, root + ".grid", {"k", "M"});
  cfg.k = static_cast<int>(integer(require(grid, root + ".grid", "k"), root + ".grid.k", 1, 3));
  cfg.M = static_cast<int>(integer(require(grid, root + ".grid", "M"), root + ".grid.M", 1, 4096));
  cfg.L = integer(require(doc, root, "L"), root + ".L", 1, 256);
  if (doc.contains("rank_tol")) cfg.rank_tol = positive(doc["rank_tol"], root + ".rank_tol");
  if (doc.contains("seed")) cfg.seed = static_cast<std::uint64_t>(integer(doc["seed"], root + ".seed", 0, INT64_MAX));

  // Grid size is checked here so explicit field lengths can be validated.
  const TorusGrid g = build_grid(cfg.k, cfg.M);
  cfg.generators_W = generators(require(doc, root, "generators_W"), root + ".generators_W", cfg.L, g.size(), cfg.k,
                                cfg.seed, 0);
  if (doc.contains("generators_V")) {
    const auto& v = doc["generators_V"];
    if (v.is_string()) {
      if (v.get<std::string>() != "same-as-W") violation(root + ".generators_V", "expected \"same-as-W\" or a spec");
    } else {
      cfg.generators_V = generators(v, root + ".generators_V", cfg.L, g.size(), cfg.k, cfg.seed, 1);
    }
  }

  if (doc.contains("params")) {
    const auto& p = doc["params"];
    const std::string path = root + ".params";
    if (!p.is_object()) violation(path, "expected an object");
    only_keys(p, path, {"w", "w_factor", "c", "phi", "mu"});
    if (p.contains("w") && p.contains("w_factor")) violation(path, "w and w_factor are exclusive");
    if (p.contains("w")) cfg.w = nonnegative(p["w"], path + ".w");
    if (p.contains("w_factor")) {
      cfg.w_factor = number(p["w_factor"], path + ".w_factor");
      if (*cfg.w_factor < 1.0) violation(path + ".w_factor", "expected a number >= 1");
    }
    if (p.contains("c")) {
      if (p["c"].is_string()) {
        if (p["c"].get<std::string>() != "auto") violation(path + ".c", "expected a number or \"auto\"");
      } else {
        cfg.c = nonnegative(p["c"], path + ".c");
      }
    }
    if (p.contains("phi")) {
      const auto& list = p["phi"];
      if (!list.is_array() || list.empty()) violation(path + ".phi", "expected a non-empty array of preset names");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const auto item = path + ".phi[" + std::to_string(i) + "]";
        if (!list[i].is_string()) violation(item, "expected a string");
        try {
          (void)ConvexSpec::from_name(list[i].get<std::string>());
        } catch (const ValidationError&) {
          violation(item, "unknown preset '" + list[i].get<std::string>() + "'");
        }
        cfg.phi.push_back(list[i].get<std::string>());
      }
    }
    if (p.contains("mu")) {
      const auto& mu = p["mu"];
      const std::string mp = path + ".mu";
      if (mu.is_string()) {
        if (mu.get<std::string>() != "canonical") violation(mp, "expected \"canonical\", {\"flood\": c} or lists");
        cfg.mu = CanonicalMu{};
      } else if (mu.is_object()) {
        only_keys(mu, mp, {"flood"});
        cfg.mu = FloodMu{nonnegative(require(mu, mp, "flood"), mp + ".flood")};
      } else if (mu.is_array()) {
        if (static_cast<Index>(mu.size()) != g.size()) {
          violation(mp, "expected one list per fiber (" + std::to_string(g.size()) + ")");
        }
        ExplicitMu out;
        for (std::size_t i = 0; i < mu.size(); ++i) {
          const auto item = mp + "[" + std::to_string(i) + "]";
          if (!mu[i].is_array()) violation(item, "expected an array of numbers");
          Eigen::VectorXd values(static_cast<Index>(mu[i].size()));
          for (std::size_t j = 0; j < mu[i].size(); ++j) {
            values(static_cast<Index>(j)) = number(mu[i][j], item + "[" + std::to_string(j) + "]");
          }
          out.values.push_back(values);
        }
        cfg.mu = std::move(out);
      } else {
        violation(mp, "expected \"canonical\", {\"flood\": c} or lists");
      }
    }
  }
  if (cfg.phi.empty()) {
    for (const auto& phi : ConvexSpec::presets()) cfg.phi.push_back(phi.name);
  }

  if (doc.contains("format")) {
    const auto& f = doc["format"];
    if (!f.is_string() || (f.get<std::string>() != "json" && f.get<std::string>() != "csv")) {
      violation(root + ".format", "expected \"json\" or \"csv\"");
    }
    cfg.format = f.get<std::string>();
  }
  if (doc.contains("include_timings")) {
    if (!doc["include_timings"].is_boolean()) violation(root + ".include_timings", "expected a boolean");
    cfg.include_timings = doc["include_timings"].get<bool>();
  }

  // nlohmann::json keeps keys sorted, so dump() is a normal form.
  std::ostringstream hex;
  hex << std::hex;
  hex.width(16);
  hex.fill('0');
  hex << fnv1a(doc.dump());
  cfg.config_hash = hex.str();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config_unreadable", "cannot open config file '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config_parse", std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

}  // namespace fsi::cli

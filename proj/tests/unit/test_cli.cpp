#include <doctest.h>

#include "fsi/cli/run.hpp"
#include "fsi/parallel.hpp"

#include <sstream>

using namespace fsi;
using namespace fsi::cli;
using nlohmann::json;

namespace {

/// L = 3, M = 4, F(x) = [e1 e2 0] on every fiber unless `fibers` is given.
json orthonormal_config() {
  json fiber = json::array({json::array({1, 0, 0}), json::array({0, 1, 0}), json::array({0, 0, 0})});
  return json{{"grid", {{"k", 1}, {"M", 4}}},
              {"L", 3},
              {"generators_W", {{"kind", "explicit"}, {"fibers", json::array({fiber, fiber, fiber, fiber})}}},
              {"generators_V", "same-as-W"}};
}

json random_config(std::uint64_t seed) {
  return json{{"grid", {{"k", 1}, {"M", 8}}},
              {"L", 6},
              {"seed", seed},
              {"generators_W", {{"kind", "random"}, {"count", 4}, {"fiber_ranks", {3, 2, 1, 0, 2, 3, 1, 2}}}},
              {"generators_V", {{"kind", "random"}, {"count", 4}, {"fiber_ranks", {3, 2, 1, 0, 2, 3, 1, 2}}}},
              {"params", {{"w_factor", 1.7}}}};
}

Tree run_json(const json& doc, const std::string& command) { return run(parse_config(doc), command); }

std::size_t column(const Tree& report, const std::string& name) {
  const auto& cols = report["table"]["columns"];
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j] == name) return j;
  }
  FAIL("missing column " << name);
  return 0;
}

int code_of(const json& doc, const std::string& command, std::string* code = nullptr,
            std::vector<Index>* fibers = nullptr) {
  try {
    (void)run_json(doc, command);
  } catch (const Error& e) {
    if (code) *code = e.code();
    if (fibers) *fibers = e.fibers();
    return exit_code(e);
  }
  return 0;
}

}  // namespace

TEST_CASE("fnv1a reference values and config hash normal form") {
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("foobar") == 0x85944171f73967e8ULL);
  const auto a = parse_config(json::parse(R"({"L": 3, "grid": {"M": 2, "k": 1},
      "generators_W": {"kind": "random", "count": 2}})"));
  const auto b = parse_config(json::parse(R"({"generators_W": {"count": 2, "kind": "random"},
      "grid": {"k": 1, "M": 2}, "L": 3})"));
  CHECK(a.config_hash == b.config_hash);
  CHECK(a.config_hash.size() == 16);
}

TEST_CASE("analyze on an orthonormal system") {
  const auto report = run_json(orthonormal_config(), "analyze");
  CHECK(report["command"] == "analyze");
  CHECK(report["summary"]["is_frame"] == true);
  CHECK(report["summary"]["lower_bound"].get<double>() == doctest::Approx(1.0));
  CHECK(report["summary"]["upper_bound"].get<double>() == doctest::Approx(1.0));
  std::vector<std::string> keys;
  for (const auto& [k, _] : report.items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"command", "metadata", "summary", "table"});
}

TEST_CASE("aliasing vanishes for V = W") {
  const auto report = run_json(orthonormal_config(), "aliasing");
  CHECK(report["summary"]["direct"].get<double>() <= 1e-14);
  CHECK(report["summary"]["formula"].get<double>() <= 1e-14);
  auto cfg = random_config(3);
  cfg["generators_V"] = "same-as-W";
  CHECK(run_json(cfg, "aliasing")["summary"]["formula"].get<double>() <= 1e-12);
}

TEST_CASE("optimal-dual at w = w0 reports the canonical spectra") {
  auto cfg = random_config(5);
  const auto canonical = run_json(cfg, "canonical-dual");
  cfg["params"] = {{"w", canonical["summary"]["w0"]}};
  const auto optimal = run_json(cfg, "optimal-dual");
  const auto n = optimal["metadata"]["n"].get<int>();
  for (std::size_t x = 0; x < optimal["table"]["rows"].size(); ++x) {
    for (int j = 1; j <= n; ++j) {
      const double mu = optimal["table"]["rows"][x][column(optimal, "mu_" + std::to_string(j))].get<double>();
      const double lam = canonical["table"]["rows"][x][column(canonical, "lambda_" + std::to_string(j))].get<double>();
      CHECK(mu == doctest::Approx(lam).epsilon(1e-12));
    }
  }
}

TEST_CASE("JSON emission round-trips and prints 17 significant digits") {
  for (const auto& command : commands()) {
    auto cfg = random_config(11);
    cfg["params"]["mu"] = "canonical";
    const auto report = run_json(cfg, command);
    const std::string text = emit_json(report);
    CHECK(Tree::parse(text) == report);
    CHECK(emit_json(Tree::parse(text)) == text);
  }
  Tree t;
  t["x"] = 0.1;
  t["inf"] = std::numeric_limits<double>::infinity();
  CHECK(emit_json(t) == "{\n  \"x\": 0.10000000000000001,\n  \"inf\": \"inf\"\n}\n");
}

TEST_CASE("CSV has one row per Spec fiber and a fixed column prefix") {
  const auto report = run_json(random_config(2), "canonical-dual");
  const std::string csv = emit_csv(report);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("fiber_index,x1,d,", 0) == 0);
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  CHECK(rows == 7);  // fiber 3 has d = 0

  auto empty = orthonormal_config();
  for (auto& f : empty["generators_W"]["fibers"]) {
    for (auto& row : f) row = json::array({0, 0, 0});
  }
  const std::string header_only = emit_csv(run_json(empty, "analyze"));
  CHECK(header_only == "fiber_index,x1,d,rank,lambda_1,lambda_2,lambda_3\n");
}

TEST_CASE("error paths carry codes, exit codes and fibers") {
  std::string code;
  std::vector<Index> fibers;

  auto bad = orthonormal_config();
  bad["grid"]["M"] = 0;
  CHECK(code_of(bad, "analyze", &code) == 2);
  CHECK(code == "schema_violation");
  bad = orthonormal_config();
  bad["colour"] = "blue";
  CHECK_THROWS_WITH_AS(parse_config(bad), doctest::Contains("config.colour"), ValidationError);
  bad = orthonormal_config();
  bad["params"] = {{"phi", {"quartic"}}};
  CHECK_THROWS_WITH_AS(parse_config(bad), doctest::Contains("config.params.phi[0]"), ValidationError);
  CHECK_THROWS_AS(run(parse_config(orthonormal_config()), "frobnicate"), ValidationError);

  // V = span{e3}, W = span{e1}: not a direct sum on any fiber.
  auto split = orthonormal_config();
  json w_fiber = json::array({json::array({1}), json::array({0}), json::array({0})});
  json v_fiber = json::array({json::array({0}), json::array({0}), json::array({1})});
  split["generators_W"]["fibers"] = json::array({w_fiber, w_fiber, w_fiber, w_fiber});
  split["generators_V"] = {{"kind", "explicit"}, {"fibers", json::array({v_fiber, w_fiber, w_fiber, v_fiber})}};
  CHECK(code_of(split, "angles", &code, &fibers) == 3);
  CHECK(code == "direct_sum_failure");
  CHECK(fibers == std::vector<Index>{0, 3});

  // λ# = (1, 1, 0) with d = 2, n = 3; μ₂ below λ₂ on fiber 2.
  auto infeasible = orthonormal_config();
  infeasible["params"] = {{"mu", {{1, 1, 0}, {2, 1, 0}, {1, 0.5, 0}, {1, 1, 0}}}};
  const auto report = run_json(infeasible, "feasibility");
  CHECK(report["summary"]["feasible"] == false);
  CHECK(report["summary"]["failing_fibers"] == Tree::array({2}));
  CHECK(code_of(infeasible, "realize", &code, &fibers) == 3);
  CHECK(code == "infeasible_spectrum");
  CHECK(fibers == std::vector<Index>{2});

  auto unreachable = orthonormal_config();
  unreachable["params"] = {{"w", 1.0}};
  CHECK(code_of(unreachable, "optimal-dual", &code) == 2);
  CHECK(code == "norm_below_canonical");
}

TEST_CASE("output does not depend on the thread count") {
  const auto cfg = parse_config(random_config(9));
  for (const auto& command : commands()) {
    set_thread_count(1);
    const std::string one = emit_json(run(cfg, command));
    set_thread_count(3);
    const std::string three = emit_json(run(cfg, command));
    set_thread_count(0);
    const std::string all = emit_json(run(cfg, command));
    CHECK(one == three);
    CHECK(one == all);
  }
  set_thread_count(1);
}

#include "fsi/cli/run.hpp"

#include "fsi/optimal_duals.hpp"

#include <algorithm>
#include <chrono>
#include <optional>

namespace fsi::cli {

namespace {

using Cx = Complex;

/// Everything a command may need, built on demand in a fixed order.
struct Context {
  const RunConfig& cfg;
  TorusGrid grid;
  SystemField<Cx> F;
  SubspaceField<Cx> W;
  std::optional<SubspaceField<Cx>> V_;
  std::optional<FrameAnalysis<Cx>> analysis_;
  std::optional<ObliquePair<Cx>> pair_;
  std::optional<CanonicalDual<Cx>> canon_;

  explicit Context(const RunConfig& c) : cfg(c), grid(build_grid(c.k, c.M)) {
    F = ingest_generators<Cx>(grid, cfg.L, cfg.generators_W);
    W = subspace_from_system(F, cfg.rank_tol);
  }

  Index n() const { return F.generator_count; }

  const SubspaceField<Cx>& V() {
    if (!V_) {
      V_ = cfg.generators_V ? subspace_from_system(ingest_generators<Cx>(grid, cfg.L, *cfg.generators_V), cfg.rank_tol)
                            : W;
    }
    return *V_;
  }
  const FrameAnalysis<Cx>& analysis() {
    if (!analysis_) analysis_ = analyze(F, W, cfg.rank_tol);
    return *analysis_;
  }
  const ObliquePair<Cx>& pair() {
    if (!pair_) pair_ = check_oblique_sum(V(), W);
    return *pair_;
  }
  const CanonicalDual<Cx>& canon() {
    if (!canon_) canon_ = canonical_dual_analysis(analysis(), W, pair());
    return *canon_;
  }
};

Tree indices(const std::vector<Index>& v) {
  Tree out = Tree::array();
  for (Index i : v) out.push_back(i);
  return out;
}

/// Column builder that always starts with fiber_index, x1..xk, d.
struct Table {
  Tree columns = Tree::array();
  Tree rows = Tree::array();

  Table(int k, std::initializer_list<std::string> extra) {
    columns.push_back("fiber_index");
    for (int a = 1; a <= k; ++a) columns.push_back("x" + std::to_string(a));
    columns.push_back("d");
    for (const auto& c : extra) columns.push_back(c);
  }
  void add(const std::string& name) { columns.push_back(name); }
  void add_indexed(const std::string& stem, Index count) {
    for (Index j = 1; j <= count; ++j) add(stem + "_" + std::to_string(j));
  }
  Tree row(const TorusGrid& grid, Index fiber, Index d) const {
    Tree r = Tree::array();
    r.push_back(fiber);
    const Eigen::VectorXd x = grid.point(fiber);
    for (Index a = 0; a < x.size(); ++a) r.push_back(x(a));
    r.push_back(d);
    return r;
  }
  Tree tree() const {
    Tree t;
    t["columns"] = columns;
    t["rows"] = rows;
    return t;
  }
};

void push_values(Tree& row, const Eigen::VectorXd& v, Index count) {
  for (Index j = 0; j < count; ++j) row.push_back(j < v.size() ? v(j) : 0.0);
}

double condition(const Eigen::VectorXd& lam, Index d) { return d > 0 ? lam(0) / lam(d - 1) : 1.0; }

SpectrumField target_mu(Context& ctx) {
  const auto& canon = ctx.canon();
  const Index n = ctx.n();
  SpectrumField mu{ctx.grid, n, RealLists(static_cast<std::size_t>(ctx.grid.size()))};
  if (std::holds_alternative<CanonicalMu>(ctx.cfg.mu)) {
    for (Index x = 0; x < ctx.grid.size(); ++x) mu.values[static_cast<std::size_t>(x)] = canon.lambda(x);
  } else if (const auto* flood = std::get_if<FloodMu>(&ctx.cfg.mu)) {
    for (Index x = 0; x < ctx.grid.size(); ++x) {
      Eigen::VectorXd v = nc_waterfill_values(canon.lambda(x), canon.d(x), n, flood->level);
      std::sort(v.data(), v.data() + v.size(), std::greater<double>());
      mu.values[static_cast<std::size_t>(x)] = v;
    }
  } else {
    const auto& lists = std::get<ExplicitMu>(ctx.cfg.mu).values;
    for (std::size_t x = 0; x < lists.size(); ++x) {
      if (lists[x].size() != n) {
        throw ValidationError("schema_violation", "config.params.mu[" + std::to_string(x) +
                                                      "]: expected " + std::to_string(n) + " values",
                              {static_cast<Index>(x)});
      }
      mu.values[x] = lists[x];
    }
  }
  return mu;
}

Tree run_analyze(Context& ctx, Tree& summary) {
  const auto& a = ctx.analysis();
  const auto bounds = frame_bounds(a, ctx.W);
  const auto profile = weight_profile(ctx.W);
  summary["is_frame"] = bounds.is_frame;
  summary["lower_bound"] = bounds.lower;
  summary["upper_bound"] = bounds.upper;
  summary["deficient_fibers"] = indices(bounds.deficient);
  summary["bessel_bound"] = a.bessel_bound;
  summary["norm_squared"] = trace_integral(a);
  summary["dimension_constant"] = profile.constant;
  summary["spectrum_mass"] = profile.spectrum_mass;
  Table t(ctx.grid.dimension(), {"rank"});
  t.add_indexed("lambda", ctx.n());
  for (Index x = 0; x < ctx.grid.size(); ++x) {
    const auto slot = static_cast<std::size_t>(x);
    Tree r = t.row(ctx.grid, x, ctx.W.dim(x));
    r.push_back(a.rank[slot]);
    push_values(r, a.eigen.values[slot], ctx.n());
    t.rows.push_back(r);
  }
  return t.tree();
}

SubspaceField<Cx> complement_field(const SubspaceField<Cx>& w) {
  SubspaceField<Cx> out{w.grid, w.ambient_dim, {}};
  for (Index i = 0; i < w.size(); ++i) out.bases.push_back(orthogonal_complement<Cx>(w[i], w.ambient_dim));
  return out;
}

Tree run_angles(Context& ctx, Tree& summary) {
  const auto& pair = ctx.pair();
  const auto dix = dixmier_angle(ctx.V(), complement_field(ctx.W));
  const auto ap = aperture_angle(ctx.V(), ctx.W);
  summary["dixmier_inf"] = pair.dixmier_inf;
  summary["aperture_sup"] = pair.aperture_sup;
  summary["projection_norm_sup"] = pair.proj_norm_sup;
  summary["norm_times_sine"] = pair.proj_norm_sup * std::sin(pair.dixmier_inf);
  Table t(ctx.grid.dimension(), {"cos_dixmier", "dixmier", "cos_aperture", "aperture", "projection_norm"});
  for (Index x = 0; x < ctx.grid.size(); ++x) {
    Tree r = t.row(ctx.grid, x, ctx.V().dim(x));
    r.push_back(dix.cosines(x));
    r.push_back(dix.angles(x));
    r.push_back(ap.cosines(x));
    r.push_back(ap.angles(x));
    r.push_back(ctx.V().dim(x) > 0 ? spectral_norm(pair[x]) : 0.0);
    t.rows.push_back(r);
  }
  return t.tree();
}

Tree run_aliasing(Context& ctx, Tree& summary) {
  const auto& pair = ctx.pair();
  const auto report = aliasing_norm(pair);
  const auto ap = aperture_angle(ctx.V(), ctx.W);
  summary["direct"] = report.direct;
  summary["formula"] = report.formula;
  summary["worst_fiber"] = report.worst_fiber;
  Table t(ctx.grid.dimension(), {"aperture", "tan_aperture", "aliasing"});
  const Index L = ctx.cfg.L;
  for (Index x = 0; x < ctx.grid.size(); ++x) {
    Tree r = t.row(ctx.grid, x, ctx.V().dim(x));
    const Matrix<Cx> complement = Matrix<Cx>::Identity(L, L) - ctx.W.projector(x);
    r.push_back(ap.angles(x));
    r.push_back(ctx.V().dim(x) > 0 ? std::tan(ap.angles(x)) : 0.0);
    r.push_back(spectral_norm(pair.adjoint_projection(x) * complement));
    t.rows.push_back(r);
  }
  return t.tree();
}

Tree run_canonical(Context& ctx, Tree& summary) {
  const auto& canon = ctx.canon();
  const auto check = verify_duality(ctx.F, canon.generators, ctx.pair());
  summary["w0"] = trace_integral(canon.analysis);
  summary["norm_sharp"] = tight_dual_exists(canon).norm_sharp;
  summary["duality_holds"] = check.holds;
  summary["duality_residual"] = check.max_residual;
  Table t(ctx.grid.dimension(), {"generator_norm_squared", "condition"});
  t.add_indexed("lambda", ctx.n());
  for (Index x = 0; x < ctx.grid.size(); ++x) {
    Tree r = t.row(ctx.grid, x, canon.d(x));
    r.push_back(canon.generators[x].squaredNorm());
    r.push_back(condition(canon.lambda(x), canon.d(x)));
    push_values(r, canon.lambda(x), ctx.n());
    t.rows.push_back(r);
  }
  return t.tree();
}

Tree run_tight(Context& ctx, Tree& summary) {
  const auto& canon = ctx.canon();
  const auto verdict = tight_dual_exists(canon, ctx.cfg.c);
  summary["mode"] = ctx.cfg.c ? "given" : "auto";
  summary["tested_c"] = verdict.tested_c;
  summary["norm_sharp"] = verdict.norm_sharp;
  summary["feasible"] = verdict.feasible;
  summary["every_c_above_norm"] = verdict.every_c_above_norm;
  summary["minimal_c"] = verdict.minimal_c ? Tree(*verdict.minimal_c) : Tree();
  summary["failing_fibers"] = indices(verdict.failing);
  summary["description"] = verdict.description;
  Table t(ctx.grid.dimension(), {"slot_budget", "deficit_rank", "ok"});
  t.add_indexed("lambda", ctx.n());
  const double c = verdict.tested_c;
  for (Index x = 0; x < ctx.grid.size(); ++x) {
    const Index d = canon.d(x);
    Index rank = 0;
    for (Index j = 0; j < d; ++j) {
      if (c - canon.lambda(x)(j) > tolerance::spectrum_slack * c) ++rank;
    }
    Tree r = t.row(ctx.grid, x, d);
    r.push_back(std::min(d, ctx.n() - d));
    r.push_back(rank);
    r.push_back(std::find(verdict.failing.begin(), verdict.failing.end(), x) == verdict.failing.end());
    push_values(r, canon.lambda(x), ctx.n());
    t.rows.push_back(r);
  }
  return t.tree();
}

Tree run_optimal(Context& ctx, Tree& summary) {
  if (!ctx.cfg.w && !ctx.cfg.w_factor) {
    throw ValidationError("schema_violation", "config.params: optimal-dual needs w or w_factor");
  }
  const auto& canon = ctx.canon();
  const double w = ctx.cfg.w ? *ctx.cfg.w : *ctx.cfg.w_factor * trace_integral(canon.analysis);
  const auto result = optimal_dual(canon, ctx.V(), w);
  const auto check = verify_duality(ctx.F, result.design.G, ctx.pair());
  const auto cond = condition_improvement_check(result, canon);
  std::optional<ConvexSpec> strict;
  for (const auto& name : ctx.cfg.phi) {
    const auto phi = ConvexSpec::from_name(name);
    if (phi.strictly_convex()) {
      strict = phi;
      break;
    }
  }
  if (!strict) strict = ConvexSpec::from_name("square");
  const auto probe = uniqueness_probe(result, canon, *strict);
  summary["w_target"] = result.w_target;
  summary["w0"] = result.w0;
  summary["c_level"] = result.c_level;
  summary["achieved_norm"] = result.achieved_norm;
  summary["duality_holds"] = check.holds;
  summary["duality_residual"] = check.max_residual;
  Tree u;
  u["phi"] = strict->name;
  u["b_matches"] = probe.b_matches;
  u["spectrum_matches"] = probe.spectrum_matches;
  u["commutes"] = probe.commutes;
  u["b_residual"] = probe.b_residual;
  u["spectrum_residual"] = probe.spectrum_residual;
  u["commutator"] = probe.commutator;
  summary["uniqueness"] = u;
  Tree c;
  c["improves"] = cond.improves;
  c["failing_fibers"] = indices(cond.failing);
  c["premise_failing_fibers"] = indices(cond.premise_failing);
  summary["condition"] = c;
  Tree pots = Tree::array();
  const auto opt = analyze(result.design.G, ctx.V(), ctx.cfg.rank_tol);
  for (const auto& name : ctx.cfg.phi) {
    const auto phi = ConvexSpec::from_name(name);
    Tree p;
    p["phi"] = phi.name;
    p["optimal"] = convex_potential(opt, ctx.V(), phi);
    p["canonical"] = convex_potential(canon.analysis, ctx.V(), phi);
    pots.push_back(p);
  }
  summary["potentials"] = pots;
  Table t(ctx.grid.dimension(), {"kept", "condition_optimal", "condition_canonical"});
  t.add_indexed("mu", ctx.n());
  for (Index x = 0; x < ctx.grid.size(); ++x) {
    const auto slot = static_cast<std::size_t>(x);
    Tree r = t.row(ctx.grid, x, canon.d(x));
    r.push_back(result.kept[slot]);
    r.push_back(cond.optimal(x));
    r.push_back(cond.canonical(x));
    push_values(r, result.mu.values[slot], ctx.n());
    t.rows.push_back(r);
  }
  return t.tree();
}

Tree run_potentials(Context& ctx, Tree& summary) {
  const auto& a = ctx.analysis();
  summary["norm_squared"] = trace_integral(a);
  summary["dimension_constant"] = weight_profile(ctx.W).constant;
  Tree list = Tree::array();
  std::vector<ConvexSpec> phis;
  for (const auto& name : ctx.cfg.phi) {
    phis.push_back(ConvexSpec::from_name(name));
    const auto rep = potential_bound(a, ctx.W, phis.back());
    Tree p;
    p["phi"] = rep.phi;
    p["value"] = rep.value;
    p["applicable"] = rep.applicable;
    p["lower_bound"] = rep.applicable ? Tree(rep.lower_bound) : Tree();
    p["tightness_gap"] = rep.applicable ? Tree(rep.tightness_gap) : Tree();
    p["is_tight"] = rep.is_tight;
    list.push_back(p);
  }
  summary["potentials"] = list;
  Table t(ctx.grid.dimension(), {});
  for (const auto& phi : phis) t.add("potential_" + phi.name);
  for (Index x = 0; x < ctx.grid.size(); ++x) {
    const auto slot = static_cast<std::size_t>(x);
    const Index d = ctx.W.dim(x);
    const Index r = std::min(a.rank[slot], d);
    Tree row = t.row(ctx.grid, x, d);
    for (const auto& phi : phis) {
      double local = static_cast<double>(d - r) * phi(0.0);
      for (Index j = 0; j < r; ++j) local += phi(a.eigen.values[slot](j));
      row.push_back(local);
    }
    t.rows.push_back(row);
  }
  return t.tree();
}

Tree run_feasibility(Context& ctx, Tree& summary) {
  const auto& canon = ctx.canon();
  const auto mu = target_mu(ctx);
  const auto rep = feasible_spectrum(mu, canon);
  summary["feasible"] = rep.feasible;
  summary["failing_fibers"] = indices(rep.failing);
  Table t(ctx.grid.dimension(), {"ok", "reason"});
  t.add_indexed("mu", ctx.n());
  t.add_indexed("lambda", ctx.n());
  for (Index x = 0; x < ctx.grid.size(); ++x) {
    const auto slot = static_cast<std::size_t>(x);
    Tree r = t.row(ctx.grid, x, canon.d(x));
    r.push_back(rep.reasons[slot].empty());
    r.push_back(rep.reasons[slot]);
    push_values(r, mu.values[slot], ctx.n());
    push_values(r, canon.lambda(x), ctx.n());
    t.rows.push_back(r);
  }
  return t.tree();
}

Tree run_realize(Context& ctx, Tree& summary) {
  const auto& canon = ctx.canon();
  const auto mu = target_mu(ctx);
  const auto design = realize_spectrum(mu, canon, ctx.V());
  const auto check = verify_duality(ctx.F, design.G, ctx.pair());
  const auto again = analyze(design.G, ctx.V(), ctx.cfg.rank_tol);
  double err = 0.0;
  for (Index x = 0; x < ctx.grid.size(); ++x) {
    const auto slot = static_cast<std::size_t>(x);
    err = std::max(err, (again.eigen.values[slot] - mu.values[slot]).cwiseAbs().maxCoeff());
  }
  summary["duality_holds"] = check.holds;
  summary["duality_residual"] = check.max_residual;
  summary["spectrum_error"] = err;
  summary["norm_squared"] = norm_squared(design.G);
  Table t(ctx.grid.dimension(), {"perturbation_rank"});
  t.add_indexed("mu", ctx.n());
  t.add_indexed("achieved", ctx.n());
  for (Index x = 0; x < ctx.grid.size(); ++x) {
    const auto slot = static_cast<std::size_t>(x);
    Tree r = t.row(ctx.grid, x, canon.d(x));
    r.push_back(numerical_rank(singular_values<Cx>(design.B[x]), ctx.cfg.rank_tol));
    push_values(r, mu.values[slot], ctx.n());
    push_values(r, again.eigen.values[slot], ctx.n());
    t.rows.push_back(r);
  }
  return t.tree();
}

}  // namespace

Tree run(const RunConfig& config, const std::string& command) {
  const auto& names = commands();
  if (std::find(names.begin(), names.end(), command) == names.end()) {
    throw ValidationError("unknown_command", "unknown command '" + command + "'");
  }
  const auto start = std::chrono::steady_clock::now();
  Context ctx(config);
  Tree summary = Tree::object();
  Tree table;
  if (command == "analyze") {
    table = run_analyze(ctx, summary);
  } else if (command == "angles") {
    table = run_angles(ctx, summary);
  } else if (command == "aliasing") {
    table = run_aliasing(ctx, summary);
  } else if (command == "canonical-dual") {
    table = run_canonical(ctx, summary);
  } else if (command == "tight-check") {
    table = run_tight(ctx, summary);
  } else if (command == "optimal-dual") {
    table = run_optimal(ctx, summary);
  } else if (command == "potentials") {
    table = run_potentials(ctx, summary);
  } else if (command == "feasibility") {
    table = run_feasibility(ctx, summary);
  } else {
    table = run_realize(ctx, summary);
  }

  Tree meta;
  meta["tool"] = "fsi_tool";
  meta["version"] = tool_version;
  meta["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                  std::to_string(EIGEN_MINOR_VERSION);
  meta["config_hash"] = config.config_hash;
  meta["seed"] = config.seed;
  meta["k"] = config.k;
  meta["M"] = config.M;
  meta["fibers"] = ctx.grid.size();
  meta["L"] = config.L;
  meta["n"] = ctx.n();
  if (config.include_timings) {
    const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - start;
    meta["elapsed_ms"] = elapsed.count();
  }

  Tree report;
  report["command"] = command;
  report["metadata"] = meta;
  report["summary"] = summary;
  report["table"] = table;
  return report;
}

}  // namespace fsi::cli

#include "fsi/majorization.hpp"

#include "fsi/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fsi {

StepFunction::StepFunction(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const auto& a = atoms_[i];
    if (!std::isfinite(a.value) || a.value < 0.0) {
      throw ValidationError("invalid_atom", "atom " + std::to_string(i) + " has a negative or non-finite value");
    }
    if (!std::isfinite(a.mass) || !(a.mass > 0.0)) {
      throw ValidationError("invalid_atom", "atom " + std::to_string(i) + " has a non-positive mass");
    }
  }
}

double StepFunction::total_mass() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.mass;
  return s;
}

double StepFunction::integral() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.mass * a.value;
  return s;
}

double StepFunction::ess_inf() const {
  if (atoms_.empty()) return 0.0;
  double v = atoms_.front().value;
  for (const auto& a : atoms_) v = std::min(v, a.value);
  return v;
}

double StepFunction::ess_sup() const {
  double v = 0.0;
  for (const auto& a : atoms_) v = std::max(v, a.value);
  return v;
}

StepFunction StepFunction::normalized() const {
  const double total = total_mass();
  if (!(total > 0.0)) throw ValidationError("invalid_atom", "cannot normalize an empty step function");
  std::vector<Atom> out = atoms_;
  for (auto& a : out) a.mass /= total;
  return StepFunction(std::move(out));
}

double RearrangedFunction::operator()(double s) const {
  if (values.empty() || s < 0.0 || s >= total()) return 0.0;
  const auto it = std::upper_bound(breaks.begin(), breaks.end(), s);
  return values[static_cast<std::size_t>(it - breaks.begin()) - 1];
}

double RearrangedFunction::cumulative(double s) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (s <= breaks[i]) break;
    acc += values[i] * (std::min(s, breaks[i + 1]) - breaks[i]);
  }
  return acc;
}

RearrangedFunction rearrange(const StepFunction& f) {
  std::vector<std::size_t> order(f.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const auto& atoms = f.atoms();
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return atoms[a].value > atoms[b].value; });
  RearrangedFunction out;
  out.breaks.push_back(0.0);
  for (std::size_t idx : order) {
    const auto& a = atoms[idx];
    if (!out.values.empty() && out.values.back() == a.value) {
      out.breaks.back() += a.mass;
    } else {
      out.values.push_back(a.value);
      out.breaks.push_back(out.breaks.back() + a.mass);
    }
  }
  return out;
}

namespace {

std::vector<double> merged_breaks(const RearrangedFunction& a, const RearrangedFunction& b) {
  std::vector<double> s = a.breaks;
  s.insert(s.end(), b.breaks.begin(), b.breaks.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

}  // namespace

bool submajorizes(const StepFunction& g, const StepFunction& f, double tol) {
  const auto gs = rearrange(g);
  const auto fs = rearrange(f);
  // Both cumulative integrals are piecewise linear between merged breakpoints.
  for (double s : merged_breaks(gs, fs)) {
    if (gs.cumulative(s) > fs.cumulative(s) + tol) return false;
  }
  return true;
}

bool majorizes(const StepFunction& g, const StepFunction& f, double tol) {
  return submajorizes(g, f, tol) && std::abs(g.integral() - f.integral()) <= tol;
}

ConvexSpec ConvexSpec::power(double p) {
  if (!std::isfinite(p) || p < 1.0) throw ValidationError("unknown_phi", "power exponent must be >= 1");
  ConvexSpec s;
  s.kind = Kind::power;
  s.exponent = p;
  if (p == 1.0) {
    s.name = "linear";
  } else if (p == 2.0) {
    s.name = "square";
  } else if (p == 3.0) {
    s.name = "cube";
  } else {
    s.name = "power:" + std::to_string(p);
  }
  return s;
}

ConvexSpec ConvexSpec::expm1() {
  ConvexSpec s;
  s.kind = Kind::expm1;
  s.name = "expm1";
  return s;
}

ConvexSpec ConvexSpec::xlog1p() {
  ConvexSpec s;
  s.kind = Kind::xlog1p;
  s.name = "xlog1p";
  return s;
}

ConvexSpec ConvexSpec::from_name(const std::string& name) {
  if (name == "linear") return power(1.0);
  if (name == "square") return power(2.0);
  if (name == "cube") return power(3.0);
  if (name == "expm1") return expm1();
  if (name == "xlog1p") return xlog1p();
  const std::string prefix = "power:";
  if (name.rfind(prefix, 0) == 0) {
    std::size_t used = 0;
    double p = 0.0;
    try {
      p = std::stod(name.substr(prefix.size()), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != name.size() - prefix.size()) {
      throw ValidationError("unknown_phi", "malformed power preset '" + name + "'");
    }
    return power(p);
  }
  throw ValidationError("unknown_phi", "unknown convex preset '" + name + "'");
}

std::vector<ConvexSpec> ConvexSpec::presets() {
  return {power(1.0), power(2.0), power(3.0), expm1(), xlog1p()};
}

double ConvexSpec::operator()(double x) const {
  switch (kind) {
    case Kind::power:
      if (exponent == 1.0) return x;
      if (exponent == 2.0) return x * x;
      return std::pow(x, exponent);
    case Kind::expm1:
      return std::expm1(x);
    case Kind::xlog1p:
      return x * std::log1p(x);
  }
  return 0.0;
}

double convex_integral(const StepFunction& f, const ConvexSpec& phi) {
  double s = 0.0;
  for (const auto& a : f.atoms()) s += a.mass * phi(a.value);
  return s;
}

double convex_integral(const RearrangedFunction& f, const ConvexSpec& phi) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) s += (f.breaks[i + 1] - f.breaks[i]) * phi(f.values[i]);
  return s;
}

StepFunction waterfill(const StepFunction& f, double c) {
  if (!std::isfinite(c) || c < f.ess_inf()) {
    throw ValidationError("invalid_level", "water level is below the essential infimum");
  }
  std::vector<Atom> out = f.atoms();
  for (auto& a : out) a.value = std::max(a.value, c);
  return StepFunction(std::move(out));
}

double waterfill_level(const StepFunction& f, double w) {
  if (f.size() == 0) throw ValidationError("invalid_atom", "water-filling needs a nonempty step function");
  const double base = f.integral();
  if (!std::isfinite(w) || w < base - 1e-12 * (1.0 + std::abs(base))) {
    throw ValidationError("invalid_level", "target integral is below the integral of f");
  }
  // Distinct values ascending with the mass at or below each one.
  std::vector<Atom> sorted = f.atoms();
  std::sort(sorted.begin(), sorted.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
  std::vector<double> levels;
  std::vector<double> mass_below;
  for (const auto& a : sorted) {
    if (!levels.empty() && levels.back() == a.value) {
      mass_below.back() += a.mass;
    } else {
      levels.push_back(a.value);
      mass_below.push_back((mass_below.empty() ? 0.0 : mass_below.back()) + a.mass);
    }
  }
  auto phi = [&](double c) {
    double s = 0.0;
    for (const auto& a : f.atoms()) s += a.mass * std::max(a.value, c);
    return s;
  };
  // Largest k with φ(v_k) ≤ w; φ is nondecreasing so bisection applies.
  std::size_t lo = 0, hi = levels.size();
  while (hi - lo > 1) {
    const std::size_t mid = (lo + hi) / 2;
    if (phi(levels[mid]) <= w) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double excess = std::max(0.0, w - phi(levels[lo]));
  return levels[lo] + excess / mass_below[lo];
}

WaterfillRearrangement rearrange_waterfilled_check(const StepFunction& f, double c, double tol) {
  const auto fc = rearrange(waterfill(f, c));
  const auto fs = rearrange(f);
  WaterfillRearrangement out;
  for (const auto& a : f.atoms()) {
    if (a.value > c) out.s0 += a.mass;
  }
  RearrangedFunction expected;
  expected.breaks.push_back(0.0);
  for (std::size_t i = 0; i < fs.values.size() && fs.breaks[i] < out.s0; ++i) {
    expected.values.push_back(fs.values[i]);
    expected.breaks.push_back(std::min(fs.breaks[i + 1], out.s0));
  }
  if (fs.total() > out.s0) {
    expected.values.push_back(c);
    expected.breaks.push_back(fs.total());
  }
  const auto grid = merged_breaks(fc, expected);
  out.holds = std::abs(fc.total() - expected.total()) <= tol;
  // Breakpoints summed in different orders may differ by roundoff; slivers carry no mass.
  for (std::size_t i = 0; out.holds && i + 1 < grid.size(); ++i) {
    if (grid[i + 1] - grid[i] <= tol * std::max(1.0, fs.total())) continue;
    const double mid = 0.5 * (grid[i] + grid[i + 1]);
    if (std::abs(fc(mid) - expected(mid)) > tol) out.holds = false;
  }
  return out;
}

}  // namespace fsi

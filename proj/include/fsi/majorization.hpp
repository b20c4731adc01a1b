#pragma once

#include "fsi/core.hpp"

#include <string>
#include <vector>

namespace fsi {

struct Atom {
  double value = 0.0;
  double mass = 0.0;
};

/// A nonnegative step function on a finite measure space: one atom per cell.
/// Masses are positive; values are finite and nonnegative.
class StepFunction {
 public:
  StepFunction() = default;
  explicit StepFunction(std::vector<Atom> atoms);
  StepFunction(std::initializer_list<Atom> atoms) : StepFunction(std::vector<Atom>(atoms)) {}

  static StepFunction constant(double value, double mass = 1.0) { return StepFunction({{value, mass}}); }

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  double total_mass() const;
  double integral() const;
  double ess_inf() const;
  double ess_sup() const;
  /// Same values, masses scaled to total 1.
  StepFunction normalized() const;

 private:
  std::vector<Atom> atoms_;
};

/// Right-continuous non-increasing step function on [0, total): value[i] on
/// [breaks[i], breaks[i+1]). breaks has one more entry than values.
struct RearrangedFunction {
  std::vector<double> breaks;
  std::vector<double> values;

  double total() const { return breaks.empty() ? 0.0 : breaks.back(); }
  double operator()(double s) const;
  /// ∫₀ˢ f*(t) dt.
  double cumulative(double s) const;
};

RearrangedFunction rearrange(const StepFunction& f);

/// g ≺_w f: ∫₀ˢ g* ≤ ∫₀ˢ f* for all s, checked at every merged breakpoint.
bool submajorizes(const StepFunction& g, const StepFunction& f, double tol = tolerance::integral);
/// g ≺ f: submajorization plus equal integrals.
bool majorizes(const StepFunction& g, const StepFunction& f, double tol = tolerance::integral);

/// A convex function on [0, ∞) from a fixed family.
struct ConvexSpec {
  enum class Kind { power, expm1, xlog1p };
  Kind kind = Kind::power;
  double exponent = 1.0;
  std::string name = "linear";

  static ConvexSpec power(double p);
  static ConvexSpec expm1();
  static ConvexSpec xlog1p();
  /// "linear", "square", "cube", "expm1", "xlog1p" or "power:<p>".
  static ConvexSpec from_name(const std::string& name);
  static std::vector<ConvexSpec> presets();

  double operator()(double x) const;
  bool nondecreasing() const { return true; }
  bool strictly_convex() const { return kind != Kind::power || exponent > 1.0; }
};

/// Σ mass·φ(value).
double convex_integral(const StepFunction& f, const ConvexSpec& phi);
/// ∫₀^total φ(f*(t)) dt, computed from the rearrangement.
double convex_integral(const RearrangedFunction& f, const ConvexSpec& phi);

/// f_c = max{f, c}; requires c ≥ ess inf f.
StepFunction waterfill(const StepFunction& f, double c);

/// The unique c ≥ ess inf f with ∫ max{f, c} = w; requires w ≥ ∫ f.
double waterfill_level(const StepFunction& f, double w);

struct WaterfillRearrangement {
  bool holds = false;
  double s0 = 0.0;
};

/// Compares (f_c)* against f* on [0, s₀) and c on [s₀, total), where
/// s₀ = µ{f > c}.
WaterfillRearrangement rearrange_waterfilled_check(const StepFunction& f, double c, double tol = 1e-12);

}  // namespace fsi

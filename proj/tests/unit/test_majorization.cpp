#include <doctest.h>

#include "fsi/errors.hpp"
#include "fsi/majorization.hpp"
#include "fsi/rng.hpp"

#include <cmath>

using namespace fsi;
using doctest::Approx;

namespace {

const StepFunction two_atoms{{2.0, 0.5}, {0.0, 0.5}};

StepFunction random_step(RandomStream& rng, int max_atoms = 8) {
  const int n = rng.integer(1, max_atoms);
  std::vector<Atom> atoms;
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    atoms.push_back({rng.uniform(0.0, 5.0), rng.uniform(0.05, 1.0)});
    total += atoms.back().mass;
  }
  for (auto& a : atoms) a.mass /= total;
  return StepFunction(atoms);
}

}  // namespace

TEST_CASE("step function validation") {
  CHECK_THROWS_AS(StepFunction({{-1.0, 1.0}}), ValidationError);
  CHECK_THROWS_AS(StepFunction({{1.0, 0.0}}), ValidationError);
  CHECK_THROWS_AS(StepFunction({{NAN, 1.0}}), ValidationError);
}

TEST_CASE("rearrange examples") {
  auto r = rearrange(StepFunction{{2.0, 0.7}, {5.0, 0.3}});
  REQUIRE(r.values.size() == 2);
  CHECK(r.values[0] == 5.0);
  CHECK(r.breaks[1] == Approx(0.3));
  CHECK(r(0.29) == 5.0);
  CHECK(r(0.3) == 2.0);  // right-continuous
  CHECK(r(0.999) == 2.0);

  r = rearrange(StepFunction::constant(1.7));
  CHECK(r.values.size() == 1);
  CHECK(r(0.0) == 1.7);

  r = rearrange(two_atoms);
  CHECK(r(0.25) == 2.0);
  CHECK(r(0.75) == 0.0);
}

TEST_CASE("rearrangement merges ties without changing the function") {
  const StepFunction f{{1.0, 0.25}, {3.0, 0.25}, {1.0, 0.5}};
  const auto r = rearrange(f);
  CHECK(r.values.size() == 2);
  CHECK(r.breaks[1] == 0.25);
  CHECK(r.total() == 1.0);
}

TEST_CASE("submajorization and majorization examples") {
  const auto one = StepFunction::constant(1.0);
  CHECK(submajorizes(one, two_atoms));
  CHECK(majorizes(one, two_atoms));
  CHECK(submajorizes(two_atoms, two_atoms));
  CHECK(majorizes(two_atoms, two_atoms));
  CHECK_FALSE(submajorizes(two_atoms, one));

  const auto low = StepFunction::constant(0.9);
  CHECK(submajorizes(low, two_atoms));
  CHECK_FALSE(majorizes(low, two_atoms));
}

TEST_CASE("convex presets") {
  CHECK(convex_integral(StepFunction::constant(3.0), ConvexSpec::from_name("square")) == Approx(9.0));
  CHECK(convex_integral(two_atoms, ConvexSpec::from_name("square")) == Approx(2.0));
  CHECK(convex_integral(two_atoms, ConvexSpec::from_name("linear")) == Approx(1.0));
  CHECK(ConvexSpec::from_name("expm1")(1.0) == Approx(std::exp(1.0) - 1.0));
  CHECK(ConvexSpec::from_name("xlog1p")(1.0) == Approx(std::log(2.0)));
  CHECK(ConvexSpec::from_name("power:1.5")(4.0) == Approx(8.0));
  CHECK_FALSE(ConvexSpec::from_name("linear").strictly_convex());
  CHECK(ConvexSpec::from_name("cube").strictly_convex());
  CHECK_THROWS_AS(ConvexSpec::from_name("sqrt"), ValidationError);
  CHECK_THROWS_AS(ConvexSpec::from_name("power:0.5"), ValidationError);
  CHECK_THROWS_AS(ConvexSpec::from_name("power:2x"), ValidationError);
}

TEST_CASE("waterfill examples") {
  auto f = waterfill(StepFunction::constant(1.0), 1.0);
  CHECK(f.atoms()[0].value == 1.0);

  f = waterfill(two_atoms, 1.0);
  CHECK(f.atoms()[0].value == 2.0);
  CHECK(f.atoms()[1].value == 1.0);
  CHECK(f.atoms()[1].mass == 0.5);

  f = waterfill(StepFunction{{3.0, 0.25}, {1.0, 0.75}}, 2.0);
  CHECK(f.atoms()[0].value == 3.0);
  CHECK(f.atoms()[1].value == 2.0);

  CHECK_THROWS_AS(waterfill(StepFunction::constant(1.0), 0.5), ValidationError);
}

TEST_CASE("waterfill_level examples") {
  CHECK(waterfill_level(two_atoms, 1.5) == Approx(1.0).epsilon(1e-15));
  CHECK(waterfill_level(two_atoms, 1.0) == 0.0);
  CHECK(waterfill_level(StepFunction::constant(1.0), 2.0) == Approx(2.0).epsilon(1e-15));
  // Above every value the level is the uniform excess.
  CHECK(waterfill_level(two_atoms, 3.0) == Approx(3.0));
  CHECK_THROWS_AS(waterfill_level(two_atoms, 0.5), ValidationError);
}

TEST_CASE("waterfill_level solves the mass equation on random inputs") {
  RandomStream rng(11, 0);
  for (int trial = 0; trial < 300; ++trial) {
    const auto f = random_step(rng);
    const double w = f.integral() + rng.uniform(0.0, 4.0);
    const double c = waterfill_level(f, w);
    CHECK(c >= f.ess_inf());
    CHECK(std::abs(waterfill(f, c).integral() - w) <= 1e-12 * (1.0 + w));
  }
}

TEST_CASE("rearranged waterfill formula") {
  auto r = rearrange_waterfilled_check(two_atoms, 1.0);
  CHECK(r.holds);
  CHECK(r.s0 == 0.5);

  r = rearrange_waterfilled_check(StepFunction::constant(2.0), 2.0);
  CHECK(r.holds);
  CHECK(r.s0 == 0.0);

  r = rearrange_waterfilled_check(StepFunction{{3.0, 0.25}, {1.0, 0.75}}, 2.0);
  CHECK(r.holds);
  CHECK(r.s0 == 0.25);
}

TEST_CASE("rearrangement laws on random step functions") {
  RandomStream rng(5, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto f = random_step(rng);
    const auto fs = rearrange(f);
    for (const auto& phi : ConvexSpec::presets()) {
      CHECK(std::abs(convex_integral(f, phi) - convex_integral(fs, phi)) <= 1e-10);
      CHECK(phi(f.integral()) <= convex_integral(f, phi) + 1e-10);
    }
    // Shift rule.
    const double c = rng.uniform(0.0, 2.0);
    std::vector<Atom> shifted = f.atoms();
    for (auto& a : shifted) a.value += c;
    const auto ss = rearrange(StepFunction(shifted));
    for (double s = 0.0; s < 1.0; s += 0.01) CHECK(ss(s) == Approx(fs(s) + c));
    // Monotone rearrangement.
    std::vector<Atom> above = f.atoms();
    for (auto& a : above) a.value += rng.uniform(0.0, 1.0);
    const auto as = rearrange(StepFunction(above));
    for (double s = 0.0; s < 1.0; s += 0.01) CHECK(as(s) >= fs(s) - 1e-12);
  }
}

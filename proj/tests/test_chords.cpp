#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spinchain/chords.hpp"
#include "spinchain/equilibrium.hpp"
#include "spinchain/errors.hpp"

using namespace spinchain;

namespace {

QuenchSpec quench(double a, double beta0 = 1.3, double beta1 = 1.2, double b = 1.2) {
  QuenchSpec s;
  s.b = b;
  s.beta0 = beta0;
  s.beta1 = beta1;
  s.a = a;
  return s;
}

}  // namespace

TEST_CASE("chord closed form") {
  for (double a : {0.01, 0.02, 0.05, 0.1}) {
    const ChordResult c = reeb_chord(quench(a));
    CHECK(std::abs(c.p - std::tanh(a / (c.T1 - c.T0))) < 1e-14);
    CHECK(std::abs(c.q_star + 1.2 * c.p - c.T0 * std::atanh(c.p)) < 1e-12);
    CHECK(std::abs(a + c.q_star + 1.2 * c.p - c.T1 * std::atanh(c.p)) < 1e-12);
    CHECK(chord_residual_initial(quench(a), c) < 1e-12);
    CHECK(chord_residual_terminal(quench(a), c) < 1e-12);
    CHECK(c.stable == (c.p > c.x1));
    CHECK(c.length == doctest::Approx(std::abs(c.z1 - c.z0)).epsilon(1e-15));

    const oracle::ChordSolution n = oracle::chord_newton(1.2, c.T0, c.T1, a, 0.5, 0.0);
    REQUIRE(n.converged);
    CHECK(std::abs(n.p - c.p) < 1e-10);
    CHECK(std::abs(n.q - c.q_star) < 1e-10);
  }

  const ChordResult sharp = reeb_chord(quench(0.5));
  CHECK(std::abs(sharp.p - std::tanh(0.5 / (sharp.T1 - sharp.T0))) < 1e-14);

  const ChordResult big = reeb_chord(quench(10 * (1 / 1.2 - 1 / 1.3)));
  CHECK(big.p > 0.9999);
  CHECK(big.stable);

  const ChordResult swapped = reeb_chord(quench(0.05, 1.2, 1.3));
  CHECK(swapped.swapped);
  CHECK(swapped.T1 > swapped.T0);

  QuenchSpec literal = quench(0.05);
  literal.literal_b_absent = true;
  CHECK(reeb_chord(literal).p == doctest::Approx(reeb_chord(quench(0.05)).p).epsilon(1e-15));

  CHECK_THROWS_AS(reeb_chord(quench(0.0)), DomainError);
  CHECK_THROWS_AS(reeb_chord(quench(0.1, 1.2, 1.2)), DomainError);
  CHECK_THROWS_AS(reeb_chord(quench(0.1, 0.5, 1.2)), ConfigError);
}

TEST_CASE("stability threshold") {
  for (double T : {0.5, 0.7, 1 / 1.2}) {
    const double x = stability_threshold(1.2, T);
    CHECK(x > 0.0);
    CHECK(x < 1.0);
    CHECK(std::abs(1.2 * x - T * std::atanh(x)) < 1e-12);
  }
  CHECK(stability_threshold(1.0, 1.5) == 0.0);
}

TEST_CASE("chord fixed point") {
  const ChordResult c = reeb_chord(quench(0.2));
  REQUIRE(c.stable);
  const ChordFixedPointReport r = chord_fixed_point_check(quench(0.2), c);
  CHECK(r.drift_vanishes);
  CHECK(r.flow_stationary);
  CHECK(r.instant);
  CHECK(std::abs(r.drift_glauber) < 1e-10);

  ChordResult off = c;
  off.q_star += 0.05;
  const ChordFixedPointReport o = chord_fixed_point_check(quench(0.2), off);
  CHECK_FALSE(o.drift_vanishes);
  CHECK_FALSE(o.instant);

  const ChordResult weak = reeb_chord(quench(0.01));
  CHECK_FALSE(weak.stable);
  CHECK_FALSE(chord_fixed_point_check(quench(0.01), weak).instant);
}

TEST_CASE("toy fields") {
  const ToyH quad = quadratic_toy();
  for (double p : linspace(-0.9, 0.9, 19))
    for (double q : linspace(-0.9, 0.9, 19)) {
      const ToyFields f = toy_fields(quad, p, q);
      CHECK(f.v == doctest::Approx(q - p).epsilon(1e-13));
      CHECK(f.w == doctest::Approx(q - p).epsilon(1e-13));
    }

  const ToyH h = quartic_toy();
  for (double q : {-1.5, 0.0, 0.5, 1.9}) {
    const double P = toy_inverse_derivative(h, q);
    CHECK(P + P * P * P == doctest::Approx(q).epsilon(1e-14));
    CHECK(toy_conjugate(h, q) == doctest::Approx(q * P - h.h(P)).epsilon(1e-14));
  }
  CHECK_THROWS_AS(toy_inverse_derivative(h, 2.5), DomainError);

  const ScalarProductReport sp = toy_scalar_product_check(h);
  CHECK(sp.positive);
  CHECK(sp.c > 0.0);
  CHECK(sp.min_product >= 0.0);
}

TEST_CASE("toy flows") {
  const ToyH h = quartic_toy();
  const double q = 0.5, p0 = -0.9;
  const double P = toy_inverse_derivative(h, q), zs = toy_conjugate(h, q);
  for (ToyFlow flow : {ToyFlow::gradient, ToyFlow::contact}) {
    const ToyTrajectory tr = toy_flow(h, flow, p0, q, q * p0 - h.h(p0), 40.0, 1e-3);
    const ToySample& end = tr.samples.back();
    CHECK(std::abs(end.p - P) < 1e-8);
    CHECK(std::abs(end.z - zs) < 1e-8);
    const HaslachReport hr = haslach_admissibility(h, tr);
    CHECK(hr.admissible);
    CHECK(hr.min_lambda >= 0.0);
    // max over the band |p - P| <= 1e-6, so of order h''(P)^2 1e-12
    CHECK(hr.lambda_at_equilibrium < 1e-11);
  }
  const ToyFields at = toy_fields(h, P, q);
  CHECK(std::abs(at.v * at.w) < 1e-24);
  CHECK(std::string(to_string(ToyFlow::contact)) == "contact");
  CHECK_THROWS_AS(toy_flow(h, ToyFlow::gradient, p0, q, 0.0, 1.0, 0.0), ConfigError);
}

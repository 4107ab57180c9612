#include <doctest.h>

#include <cmath>

#include "spinchain/core_model.hpp"
#include "spinchain/drift.hpp"
#include "spinchain/equilibrium.hpp"
#include "spinchain/errors.hpp"

using namespace spinchain;

namespace {

ModelParams params(double b, double beta, double q, int N = 100, double c = 0.2) {
  ModelParams p;
  p.b = b;
  p.beta = beta;
  p.q = q;
  p.N = N;
  p.c = c;
  return p;
}

int sign(double x) { return (x > 0) - (x < 0); }

}  // namespace

TEST_CASE("drift fields and their zeros") {
  const ModelParams p = params(1.2, 1.2, 0.0);
  CHECK(drift_fp(p, 0.0) == 0.0);
  CHECK(drift_glauber(p, 0.0) == 0.0);
  CHECK_THROWS_AS(drift_fp(p, 1.0), DomainError);
  CHECK_NOTHROW(drift_glauber(p, 1.0));

  for (double q : {-0.05, 0.0, 0.02, 0.3}) {
    const ModelParams pq = p.with_field(q);
    for (const auto& r : mean_field_roots(1.2, 1.2, q)) {
      CHECK(std::abs(drift_fp(pq, r.p)) < 1e-10);
      CHECK(std::abs(drift_glauber(pq, r.p)) < 1e-10);
    }
  }

  // between the unstable root and the right minimum the flow pushes right
  const double ps = spontaneous_magnetization(1.2, 1.2);
  CHECK(drift_fp(p, 0.5 * ps) < 0.0);
  CHECK(drift_fp(p, 0.5 * (ps + 1.0)) > 0.0);
  CHECK(drift_fp(p, -0.5 * ps) > 0.0);
  CHECK(drift_fp(p, -0.5 * (ps + 1.0)) < 0.0);

  const ModelParams f8 = params(1.0, 1.8, -0.08);
  for (double m : linspace(-0.999, 0.999, 2001)) CHECK(sign(drift_fp(f8, m)) == sign(drift_glauber(f8, m)));
}

TEST_CASE("stable fixed points are minima") {
  for (double q : {0.0, 0.02, -0.1}) {
    const ModelParams p = params(1.2, 1.2, q);
    for (const auto& r : mean_field_roots(1.2, 1.2, q)) {
      const double h = 1e-4;
      // -drift_G points back towards a stable root from both sides
      const bool attracting = drift_glauber(p, r.p + h) > 0.0 && drift_glauber(p, r.p - h) < 0.0;
      const double F2 = reduced_free_energy(1.2, 1.2, q, r.p + h) - 2 * reduced_free_energy(1.2, 1.2, q, r.p) +
                        reduced_free_energy(1.2, 1.2, q, r.p - h);
      CHECK(attracting == (F2 > 0.0));
      CHECK(attracting == (r.kind != BranchKind::unstable));
    }
  }
}

TEST_CASE("mu ratio") {
  const ModelParams p = params(1.0, 1.8, -0.08);
  for (double m : linspace(-0.999, 0.999, 2001)) {
    const double mu = mu_ratio(p, m);
    CHECK(mu > 0.0);
    const double u = p.c * (1 - m * std::tanh(p.beta * (p.q + p.b * m)));
    CHECK(std::abs(drift_factor_exact(p, m) - 4 * p.c * mu / u) < 1e-12 * (1 + std::abs(4 * p.c * mu / u)));
    CHECK(std::abs(drift_glauber(p, m) - drift_factor_exact(p, m) * drift_fp(p, m)) < 1e-12);
    CHECK(drift_factor_as_stated(p, m) == doctest::Approx(4 * u * mu).epsilon(1e-14));
  }

  // removable singularity at a shared zero: the limit is beta when q = 0, m = 0
  const ModelParams z = params(1.2, 0.5, 0.0);
  CHECK(mu_ratio(z, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
  const double two_sided = 0.5 * (mu_ratio(z, 1e-4) + mu_ratio(z, -1e-4));
  CHECK(mu_ratio(z, 0.0) == doctest::Approx(two_sided).epsilon(1e-7));
  const ModelParams ordered = params(1.2, 1.2, 0.0);
  const double ps = spontaneous_magnetization(1.2, 1.2);
  CHECK(mu_ratio(ordered, ps) == doctest::Approx(0.5 * (mu_ratio(ordered, ps + 1e-4) + mu_ratio(ordered, ps - 1e-4))).epsilon(1e-7));

  CHECK_THROWS_AS(mu_ratio(params(1.0, 1.0, 0.0), 0.0), NumericalError);
  CHECK_THROWS_AS(mu_ratio(p, -1.0), DomainError);
}

TEST_CASE("discrete drifts") {
  const ModelParams p = params(1.0, 1.8, -0.08, 200);
  const WassersteinStructure s = build_structure(p);
  double scale = 0.0;
  const Density rho = restrict_profile(default_profile(), 200, &scale);
  CHECK(rho.mass() == doctest::Approx(100.0).epsilon(1e-13));
  double sum = 0.0;
  for (double x : discrete_drift_fp(p, s, rho)) sum += x;
  CHECK(std::abs(sum) < 1e-9);

  const LumpedGenerator gen = build_generator(p);
  sum = 0.0;
  for (double x : discrete_drift_glauber(gen, rho)) sum += x;
  CHECK(std::abs(sum) < 1e-9);

  // a constant profile pulls out of the continuum target
  const SmoothProfile one{[](double) { return 1.0; }, [](double) { return 0.0; }};
  const SmoothProfile three{[](double) { return 3.0; }, [](double) { return 0.0; }};
  for (double m : {-0.5, 0.1, 0.6}) {
    CHECK(continuum_drift_fp(p, three, 1.0, m) == doctest::Approx(3 * continuum_drift_fp(p, one, 1.0, m)).epsilon(1e-14));
    const double h = 1e-5;
    const double uF = (drift_fp(p, m + h) - drift_fp(p, m - h)) / (2 * h);
    CHECK(continuum_drift_fp(p, one, 1.0, m) == doctest::Approx(uF).epsilon(1e-7));
  }

  // the stationary vector is annihilated by N W_N + N(K - I)
  const ProbabilityVector st(stationary_vector(gen));
  const Density rs = probability_to_density(st);
  const auto w = discrete_drift_glauber(gen, rs);
  const auto k = gen.apply_NK_minus_I(std::vector<double>(rs.values().begin(), rs.values().end()));
  double wmax = 0.0;
  for (double x : w) wmax = std::max(wmax, std::abs(x));
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(w[i] + k[i]) < 1e-10 * wmax);
}

TEST_CASE("rate fits") {
  double slope = 0.0, icpt = 0.0;
  loglog_fit({1, 2, 4, 8}, {3, 1.5, 0.75, 0.375}, slope, icpt);
  CHECK(slope == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(icpt == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  CHECK_THROWS_AS(loglog_fit({1}, {1}, slope, icpt), DomainError);
  CHECK_THROWS_AS(loglog_fit({1, 2}, {1, 0}, slope, icpt), DomainError);

  const ModelParams p = params(1.0, 1.8, -0.08);
  const std::vector<int> ladder{100, 200, 400, 800};
  const RateFit fp = drift_rate_fit(p, ladder, DriftKind::fokker_planck);
  const RateFit g = drift_rate_fit(p, ladder, DriftKind::glauber);
  CHECK(fp.slope > -1.3);
  CHECK(fp.slope < -0.7);
  CHECK(g.slope > -1.3);
  CHECK(g.slope < -0.7);
  CHECK(fp.errors.size() == ladder.size());
}

TEST_CASE("magnetization ode") {
  const ModelParams p = params(1.2, 1.2, 0.0);
  const double ps = spontaneous_magnetization(1.2, 1.2);
  for (const auto& s : suzuki_kubo_flow(p, ps, 5.0)) CHECK(s.m == doctest::Approx(ps).epsilon(1e-12));
  const auto tr = suzuki_kubo_flow(p, 0.05, 200.0);
  CHECK(tr.back().m == doctest::Approx(ps).epsilon(1e-8));
  for (std::size_t k = 1; k < tr.size(); ++k)
    CHECK(reduced_free_energy(1.2, 1.2, 0.0, tr[k].m) <= reduced_free_energy(1.2, 1.2, 0.0, tr[k - 1].m) + 1e-15);
  const auto left = suzuki_kubo_flow(p.with_field(0.01), -0.9, 200.0);
  const auto roots = mean_field_roots(1.2, 1.2, 0.01);
  CHECK(left.back().m == doctest::Approx(roots.front().p).epsilon(1e-8));
  CHECK_THROWS_AS(suzuki_kubo_flow(p, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(suzuki_kubo_flow(p, 0.0, 1.0, 0.0), ConfigError);
}

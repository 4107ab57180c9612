#include <doctest.h>

#include <bit>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "spinchain/core_model.hpp"
#include "spinchain/errors.hpp"

using namespace spinchain;

namespace {

ModelParams params(double b, double beta, double q, int N) {
  ModelParams p;
  p.b = b;
  p.beta = beta;
  p.q = q;
  p.N = N;
  return p;
}

Density random_density(std::mt19937_64& rng, int N) {
  std::uniform_real_distribution<double> U(0.05, 2.0);
  std::vector<double> v(N + 1);
  for (auto& x : v) x = U(rng);
  return Density::normalized(v);
}

}  // namespace

TEST_CASE("model params validation") {
  CHECK_NOTHROW(params(1, 1, 0, 4).validate());
  CHECK_THROWS_AS(params(0, 1, 0, 4).validate(), ConfigError);
  CHECK_THROWS_AS(params(1, -1, 0, 4).validate(), ConfigError);
  CHECK_THROWS_AS(params(1, 1, 0, 0).validate(), ConfigError);
  ModelParams p = params(1, 1, 0, 4);
  p.c = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  CHECK(params(1.2, 1.2, 0, 4).phase_transition_regime());
  CHECK_FALSE(params(1.0, 0.5, 0, 4).phase_transition_regime());
  CHECK_FALSE(params(1.0, 1.0, 0, 4).phase_transition_regime());
}

TEST_CASE("state space") {
  const StateSpace s(5);
  CHECK(s.size() == 6);
  CHECK(s.point(0) == -1.0);
  CHECK(s.point(5) == 1.0);
  CHECK(s.weight() * s.size() == doctest::Approx(2.0 * 6 / 5));
  CHECK(lattice_index(4, 0.5) == 3);
  CHECK_THROWS_AS(lattice_index(4, 0.3), DomainError);
}

TEST_CASE("density invariants") {
  CHECK_NOTHROW(Density({0.25, 0.25}));
  CHECK_THROWS_AS(Density({1.0, 0.5}), DomainError);
  CHECK_THROWS_AS(Density({1.0, 0.0}), DomainError);
  const Density d = Density::normalized({1, 2, 3, 4});
  CHECK(d.mass() == doctest::Approx(1.5).epsilon(1e-14));
  CHECK_NOTHROW(ProbabilityVector({0.25, 0.75}));
  CHECK_THROWS(ProbabilityVector({0.25, 0.5}));
}

TEST_CASE("reduced free energy") {
  CHECK(f_reduced(params(1, 1, 0, 2), 0.0) == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
  for (double b : {1.2, 2.0})
    for (double beta : {1.0, 1.5}) {
      CHECK(reduced_free_energy(b, beta, 0.0, 1.0) == doctest::Approx(-b / 2).epsilon(1e-15));
      CHECK(reduced_free_energy(b, beta, 0.0, -1.0) == doctest::Approx(-b / 2).epsilon(1e-15));
    }
  for (int k = -20; k <= 20; ++k) {
    const double m = k / 21.0;
    CHECK(reduced_free_energy(1.3, 0.9, 0.0, m) == reduced_free_energy(1.3, 0.9, 0.0, -m));
  }
  CHECK_THROWS_AS(f_reduced(params(1, 1, 0, 2), 1.5), DomainError);
  const double m = 0.37, h = 1e-6;
  const double fd = (reduced_free_energy(1.1, 0.8, 0.2, m + h) - reduced_free_energy(1.1, 0.8, 0.2, m - h)) / (2 * h);
  CHECK(reduced_free_energy_dm(1.1, 0.8, 0.2, m) == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("log binomial") {
  CHECK(log_binomial_exact(4, 0.0) == doctest::Approx(std::log(6.0)).epsilon(1e-15));
  CHECK(log_binomial_exact(17, 1.0) == 0.0);
  CHECK(log_binomial_exact(17, -1.0) == 0.0);
  for (int N : {7, 100, 1000})
    for (int k = 0; k <= N; k += std::max(1, N / 10))
      CHECK(log_binomial_exact(N, -1.0 + 2.0 * k / N) == doctest::Approx(oracle::log_binomial(N, k)).epsilon(1e-13));
  const double e = std::abs(log_binomial_asymptotic(200, 0.5) - log_binomial_exact(200, 0.5));
  CHECK(e < 1.0 / (200.0 * 200.0));
}

TEST_CASE("remainder") {
  const double expected = std::log(2.0 / 100) + 0.5 * std::log(200 * std::numbers::pi) - std::log(2.0) + 3.0 / 1200;
  CHECK(remainder_asymptotic(100, 0.0) == doctest::Approx(expected).epsilon(1e-14));
  for (int k = 1; k < 20; ++k) {
    const double m = -1.0 + k / 10.0;
    CHECK(remainder_asymptotic(50, m) == doctest::Approx(remainder_asymptotic(50, -m)).epsilon(1e-15));
  }
  CHECK_THROWS_AS(remainder_asymptotic(50, 1.0), DomainError);
  CHECK(remainder_gauge_discrepancy(37) == doctest::Approx(std::log(37.0)).epsilon(1e-14));

  // the asymptotic remainder tracks the exact one; the error decays at least like N^-2
  double prev = 1.0;
  for (int N : {100, 200, 400}) {
    double e = 0.0;
    for (int k = 1; k < N; ++k) {
      const double m = -1.0 + 2.0 * k / N;
      if (std::abs(m) > 0.9) continue;
      e = std::max(e, std::abs(remainder_asymptotic(N, m) - remainder_exact(N, m)));
    }
    CHECK(e < prev / 3.9);
    prev = e;
  }
}

TEST_CASE("effective hamiltonian") {
  const ModelParams p = params(1.0, 1.3, 0.2, 400);
  CHECK(std::abs(h_effective(p, 0.3, HamiltonianMode::exact) - h_effective(p, 0.3, HamiltonianMode::asymptotic)) <
        1e-3 / p.beta);
  const ModelParams one = params(1e-12, 2.0, 0.0, 1);
  CHECK(h_effective(one, 1.0) == doctest::Approx(std::log(2.0) / 2.0).epsilon(1e-11));
  CHECK(h_effective(one, -1.0) == doctest::Approx(std::log(2.0) / 2.0).epsilon(1e-11));

  for (auto mode : {HamiltonianMode::exact, HamiltonianMode::asymptotic}) {
    const double h = 1e-5;
    const auto Hp = hamiltonian_vector(p.with_field(p.q + h), mode);
    const auto Hm = hamiltonian_vector(p.with_field(p.q - h), mode);
    const StateSpace s(p.N);
    for (std::size_t i = 0; i < s.size(); i += 20)
      CHECK((Hp[i] - Hm[i]) / (2 * h) == doctest::Approx(-p.N * s.point(i)).epsilon(1e-7));
  }
  const auto H = hamiltonian_vector(p, HamiltonianMode::asymptotic);
  CHECK(std::isfinite(H.front()));
  CHECK(std::isfinite(H.back()));
}

TEST_CASE("entropy") {
  for (int N : {1, 6, 50}) {
    const Density u(std::vector<double>(N + 1, N / (2.0 * (N + 1))));
    CHECK(entropy(u) == doctest::Approx(-std::log(N / (2.0 * (N + 1)))).epsilon(1e-14));
  }
  CHECK(entropy(Density({0.25, 0.25})) == doctest::Approx(std::log(4.0)));
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const Density a = random_density(rng, 12), b = random_density(rng, 12);
    std::vector<double> mid(13);
    for (int i = 0; i <= 12; ++i) mid[i] = 0.5 * (a[i] + b[i]);
    CHECK(entropy(Density::normalized(mid)) > 0.5 * (entropy(a) + entropy(b)));
  }
}

TEST_CASE("pressure") {
  CHECK(std::abs(pressure(Density(std::vector<double>(11, 5.0 / 11)))) < 1e-15);
  std::vector<double> v(11, 1e-12);
  v[7] = 5.0;
  CHECK(pressure(Density::normalized(v)) == doctest::Approx(-1.0 + 2.0 * 7 / 10).epsilon(1e-9));
  CHECK(std::abs(pressure(gibbs(params(1.0, 0.5, 0.0, 40)))) < 1e-12);
}

TEST_CASE("free energy functional") {
  std::mt19937_64 rng(11);
  const ModelParams p = params(1.2, 1.1, 0.3, 30);
  for (int t = 0; t < 10; ++t) {
    const Density r = random_density(rng, 30);
    CHECK(psi_rescaled(p, r) - psi_rescaled(p.with_field(0.0), r) == doctest::Approx(0.3 * pressure(r)).epsilon(1e-12));
  }
  const Density g = gibbs(p);
  const double psi_g = psi_rescaled(p, g);
  CHECK(psi_g == doctest::Approx(log_partition_and_fN(p).f_n).epsilon(1e-13));
  for (int t = 0; t < 100; ++t) CHECK(psi_g >= psi_rescaled(p, random_density(rng, 30)));
}

TEST_CASE("gibbs density") {
  const Density g = gibbs(params(1.2, 1.4, 0.0, 31));
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] == doctest::Approx(g[g.size() - 1 - i]).epsilon(1e-14));

  const double beta = 0.7, q = 0.4;
  const Density two = gibbs(params(1e-12, beta, q, 1));
  const ProbabilityVector pi({two[0] * 2.0, two[1] * 2.0});
  CHECK(pi[1] == doctest::Approx(std::exp(beta * q) / (2 * std::cosh(beta * q))).epsilon(1e-11));

  const std::vector<double> ref = oracle::gibbs(1.2, 1.4, 0.1, 64);
  const Density lib = gibbs(params(1.2, 1.4, 0.1, 64));
  for (int i = 0; i <= 64; ++i) CHECK(lib[i] == doctest::Approx(ref[i]).epsilon(1e-11));

  // no underflow to zero for a strongly ordered large system
  const Density big = gibbs(params(2.0, 3.0, 0.5, 2000));
  for (std::size_t i = 0; i < big.size(); ++i) CHECK(big[i] > 0.0);
}

TEST_CASE("partition function") {
  const double beta = 0.9;
  for (int N : {1, 3, 8, 12})
    for (double q : {-0.5, 0.0, 0.35}) {
      // direct sum over the 2^N configurations
      double z = 0.0;
      for (unsigned s = 0; s < (1u << N); ++s) {
        const int up = std::popcount(s);
        const double m = (2.0 * up - N) / N;
        z += std::exp(beta * N * q * m);
      }
      const double direct = std::log(z) / (beta * N);
      const double fn = log_partition_and_fN(params(1e-12, beta, q, N)).f_n;
      CHECK(fn == doctest::Approx(std::log(2 * std::cosh(beta * q)) / beta).epsilon(1e-10));
      CHECK(fn == doctest::Approx(direct).epsilon(1e-10));
    }
  const ModelParams p = params(1.2, 1.2, 0.0, 60);
  for (double q : {0.1, 0.4, 0.9})
    CHECK(log_partition_and_fN(p.with_field(q)).f_n == doctest::Approx(log_partition_and_fN(p.with_field(-q)).f_n).epsilon(1e-14));
  const double h = 1e-3;
  for (double q = -0.8; q <= 0.8; q += 0.1) {
    const double d2 = log_partition_and_fN(p.with_field(q + h)).f_n - 2 * log_partition_and_fN(p.with_field(q)).f_n +
                      log_partition_and_fN(p.with_field(q - h)).f_n;
    CHECK(d2 >= -1e-10);
  }
}

TEST_CASE("log sum exp") {
  const std::vector<double> x{1000.0, 1000.0};
  CHECK(log_sum_exp(x) == doctest::Approx(1000.0 + std::log(2.0)));
  const std::vector<double> y{-1e4, 0.0};
  CHECK(log_sum_exp(y) == doctest::Approx(0.0));
}

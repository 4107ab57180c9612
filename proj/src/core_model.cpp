#include "spinchain/core_model.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spinchain/errors.hpp"

namespace spinchain {

namespace {

constexpr double kMassTolerance = 1e-12;
constexpr double kEntropyClamp = 1e-300;

double x_log_x(double x) { return x <= 0.0 ? 0.0 : x * std::log(x); }

void check_mass(double mass, int N, const char* what) {
  const double target = 0.5 * N;
  if (std::abs(mass - target) > kMassTolerance * std::max(1.0, target)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << what << ": mass " << mass << " differs from N/2 = " << target;
    throw DomainError(msg.str());
  }
}

}  // namespace

void ModelParams::validate() const {
  if (!(b > 0.0)) throw ConfigError("coupling b must be > 0");
  if (!(beta > 0.0)) throw ConfigError("inverse temperature beta must be > 0");
  if (!std::isfinite(q)) throw ConfigError("field q must be finite");
  if (N < 1) throw ConfigError("spin count N must be >= 1");
  if (!(c > 0.0)) throw ConfigError("rate constant c must be > 0");
}

StateSpace::StateSpace(int N) : N_(N) {
  if (N < 1) throw DomainError("state space needs N >= 1");
}

std::vector<double> StateSpace::points() const {
  std::vector<double> pts(size());
  for (std::size_t j = 0; j < pts.size(); ++j) pts[j] = point(j);
  return pts;
}

Density::Density(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) throw DomainError("density needs at least two points");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) {
      std::ostringstream msg;
      msg << "density value at index " << i << " is not strictly positive";
      throw DomainError(msg.str());
    }
  }
  check_mass(mass(), N(), "density");
}

Density Density::normalized(std::vector<double> values) {
  if (values.size() < 2) throw DomainError("density needs at least two points");
  double total = 0.0;
  for (double v : values) {
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("normalized(): values must be positive");
    total += v;
  }
  const double scale = 0.5 * static_cast<double>(values.size() - 1) / total;
  for (double& v : values) v *= scale;
  return Density(std::move(values));
}

double Density::mass() const {
  double total = 0.0;
  for (double v : values_) total += v;
  return total;
}

Density make_density_unchecked(std::vector<double> values) {
  return Density(std::move(values), Density::Trusted{});
}

ProbabilityVector::ProbabilityVector(std::vector<double> masses) : masses_(std::move(masses)) {
  if (masses_.size() < 2) throw DomainError("probability vector needs at least two points");
  double total = 0.0;
  for (std::size_t i = 0; i < masses_.size(); ++i) {
    if (!(masses_[i] >= 0.0) || !std::isfinite(masses_[i])) {
      std::ostringstream msg;
      msg << "probability mass at index " << i << " is negative";
      throw DomainError(msg.str());
    }
    total += masses_[i];
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "probability vector sums to " << total;
    throw DomainError(msg.str());
  }
}

double mixing_entropy(double m) {
  // Summed as A(m) + A(-m) so that the result is exactly even in m.
  const double up = 0.5 * (1.0 + m);
  const double down = 0.5 * (1.0 - m);
  return x_log_x(up) + x_log_x(down);
}

double reduced_free_energy(double b, double beta, double q, double m) {
  return -q * m - 0.5 * b * m * m + mixing_entropy(m) / beta;
}

double reduced_free_energy_dm(double b, double beta, double q, double m) {
  return -q - b * m + std::atanh(m) / beta;
}

double reduced_free_energy_dm2(double b, double beta, double m) {
  return -b + 1.0 / (beta * (1.0 - m * m));
}

double f_reduced(const ModelParams& params, double m) {
  if (!(std::abs(m) <= 1.0)) throw DomainError("f_reduced: |m| > 1");
  return reduced_free_energy(params.b, params.beta, params.q, m);
}

double theta(const ModelParams& params, double m) {
  return std::tanh(params.beta * (params.q + params.b * m));
}

LogFactorials::LogFactorials(int max_n) : table_(static_cast<std::size_t>(std::max(max_n, 0)) + 1, 0.0) {
  // Kahan-compensated running sum of ln k.
  double sum = 0.0;
  double carry = 0.0;
  for (std::size_t k = 2; k < table_.size(); ++k) {
    const double term = std::log(static_cast<double>(k)) - carry;
    const double next = sum + term;
    carry = (next - sum) - term;
    sum = next;
    table_[k] = sum;
  }
}

int lattice_index(int N, double m) {
  if (N < 1) throw DomainError("lattice_index: N must be >= 1");
  const double k = 0.5 * (1.0 + m) * N;
  const double rounded = std::round(k);
  if (std::abs(k - rounded) > 1e-9 || rounded < 0.0 || rounded > N) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "m = " << m << " is not a point of M_" << N;
    throw DomainError(msg.str());
  }
  return static_cast<int>(rounded);
}

double log_binomial_exact(int N, double m) {
  const int k = lattice_index(N, m);
  const LogFactorials lf(N);
  return lf(N) - (lf(k) + lf(N - k));
}

double log_binomial_asymptotic(int N, double m) {
  if (!(std::abs(m) < 1.0)) throw DomainError("log_binomial_asymptotic: |m| must be < 1");
  const double n = N;
  const double s = 4.0 / (1.0 - m * m);
  return -n * mixing_entropy(m) - 0.5 * std::log(2.0 * std::numbers::pi * n) + 0.5 * std::log(s) +
         (1.0 - s) / (12.0 * n);
}

double remainder_asymptotic(int N, double m) {
  if (N < 1) throw DomainError("remainder_asymptotic: N must be >= 1");
  if (!(std::abs(m) < 1.0)) throw DomainError("remainder_asymptotic: logarithmic singularity at |m| = 1");
  const double n = N;
  const double s = 4.0 / (1.0 - m * m);
  return std::log(2.0 / n) + 0.5 * std::log(2.0 * std::numbers::pi * n) - 0.5 * std::log(s) -
         (1.0 - s) / (12.0 * n);
}

double remainder_exact(int N, double m) {
  return std::log(2.0 / N) - log_binomial_exact(N, m) - N * mixing_entropy(m);
}

double remainder_gauge_discrepancy(int N) {
  const double n = N;
  const double quoted = 0.5 * std::log(8.0 * std::numbers::pi * n);
  const double used = std::log(2.0 / n) + 0.5 * std::log(2.0 * std::numbers::pi * n);
  return quoted - used;
}

double h_effective(const ModelParams& params, double m, HamiltonianMode mode) {
  const int N = params.N;
  if (mode == HamiltonianMode::asymptotic) {
    lattice_index(N, m);
    return N * f_reduced(params, m) + remainder_asymptotic(N, m) / params.beta;
  }
  const double hbar = -params.q * m - 0.5 * params.b * m * m;
  return N * hbar - log_binomial_exact(N, m) / params.beta + std::log(2.0 / N) / params.beta;
}

std::vector<double> remainder_vector(int N, HamiltonianMode mode) {
  const StateSpace space(N);
  const LogFactorials lf(N);
  std::vector<double> exact(space.size());
  for (std::size_t i = 0; i < exact.size(); ++i) {
    const double m = space.point(i);
    exact[i] = std::log(2.0 / N) - (lf(N) - (lf(static_cast<int>(i)) + lf(N - static_cast<int>(i)))) -
               N * mixing_entropy(m);
  }
  if (mode == HamiltonianMode::exact || N < 2) return exact;

  std::vector<double> r(space.size());
  for (std::size_t i = 1; i + 1 < r.size(); ++i) r[i] = remainder_asymptotic(N, space.point(i));
  const std::size_t last = r.size() - 1;
  r[0] = r[1] + (exact[0] - exact[1]);
  r[last] = r[last - 1] + (exact[last] - exact[last - 1]);
  return r;
}

std::vector<double> hamiltonian_vector(const ModelParams& params, HamiltonianMode mode) {
  params.validate();
  const int N = params.N;
  const StateSpace space(N);
  std::vector<double> H(space.size());
  if (mode == HamiltonianMode::exact) {
    const LogFactorials lf(N);
    const double gauge = std::log(2.0 / N) / params.beta;
    for (std::size_t i = 0; i < H.size(); ++i) {
      const double m = space.point(i);
      const int k = static_cast<int>(i);
      const double hbar = -params.q * m - 0.5 * params.b * m * m;
      H[i] = N * hbar - (lf(N) - (lf(k) + lf(N - k))) / params.beta + gauge;
    }
    return H;
  }
  const std::vector<double> r = remainder_vector(N, mode);
  for (std::size_t i = 0; i < H.size(); ++i) {
    H[i] = N * reduced_free_energy(params.b, params.beta, params.q, space.point(i)) + r[i] / params.beta;
  }
  return H;
}

double entropy(const Density& rho) {
  double sum = 0.0;
  for (double v : rho.values()) {
    if (v > kEntropyClamp) sum += v * std::log(v);
  }
  return -(2.0 / rho.N()) * sum;
}

double pressure(const Density& rho) {
  const StateSpace space(rho.N());
  double sum = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) sum += space.point(i) * rho[i];
  return space.weight() * sum;
}

double free_energy(const ModelParams& params, const Density& rho, std::span<const double> hamiltonian) {
  if (hamiltonian.size() != rho.size()) throw DomainError("free_energy: size mismatch");
  double energy = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) energy += hamiltonian[i] * rho[i];
  energy *= 2.0 / rho.N();
  return -entropy(rho) / params.beta + energy;
}

double free_energy(const ModelParams& params, const Density& rho, HamiltonianMode mode) {
  if (params.N != rho.N()) throw DomainError("free_energy: density size does not match N");
  const std::vector<double> H = hamiltonian_vector(params, mode);
  return free_energy(params, rho, H);
}

double psi_rescaled(const ModelParams& params, const Density& rho, std::span<const double> hamiltonian) {
  return -free_energy(params, rho, hamiltonian) / rho.N();
}

double psi_rescaled(const ModelParams& params, const Density& rho, HamiltonianMode mode) {
  return -free_energy(params, rho, mode) / rho.N();
}

double log_sum_exp(std::span<const double> x) {
  if (x.empty()) throw DomainError("log_sum_exp: empty input");
  const double top = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(top)) return top;
  double sum = 0.0;
  for (double v : x) sum += std::exp(v - top);
  return top + std::log(sum);
}

Density gibbs_from_hamiltonian(const ModelParams& params, std::span<const double> hamiltonian) {
  const std::size_t n = hamiltonian.size();
  std::vector<double> exponents(n);
  for (std::size_t i = 0; i < n; ++i) exponents[i] = -params.beta * hamiltonian[i];
  const double lse = log_sum_exp(exponents);
  const double half_n = 0.5 * static_cast<double>(n - 1);
  std::vector<double> rho(n);
  for (std::size_t i = 0; i < n; ++i) rho[i] = std::max(half_n * std::exp(exponents[i] - lse), DBL_MIN);
  return make_density_unchecked(std::move(rho));
}

Density gibbs(const ModelParams& params, HamiltonianMode mode) {
  const std::vector<double> H = hamiltonian_vector(params, mode);
  return gibbs_from_hamiltonian(params, H);
}

PartitionFunction log_partition_and_fN(const ModelParams& params, HamiltonianMode mode) {
  const std::vector<double> H = hamiltonian_vector(params, mode);
  std::vector<double> exponents(H.size());
  for (std::size_t i = 0; i < H.size(); ++i) exponents[i] = -params.beta * H[i];
  PartitionFunction out;
  out.log_z = std::log(2.0 / params.N) + log_sum_exp(exponents);
  out.f_n = out.log_z / (params.beta * params.N);
  return out;
}

double l1_distance(const Density& rho, const Density& sigma) {
  if (rho.size() != sigma.size()) throw DomainError("l1_distance: size mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i) sum += std::abs(rho[i] - sigma[i]);
  return (2.0 / rho.N()) * sum;
}

}  // namespace spinchain

#pragma once

// Curie-Weiss model data on the lumped state space M_N = {-1, -1+2/N, ..., 1}:
// effective Hamiltonian, entropy, free energy, Gibbs density, partition
// function and pressure.
//
// Conventions. Densities are taken with respect to the counting measure
// mu_N(m) = 2/N, so a density rho satisfies sum_i rho_i = N/2. The per-spin
// energy is hbar(q, m) = -q m - b m^2 / 2 (the total configuration energy is
// N * hbar). Energies carry units of 1/beta.

#include <cstddef>
#include <span>
#include <vector>

namespace spinchain {

struct ModelParams {
  double b = 1.0;     // coupling constant, > 0
  double beta = 1.0;  // inverse temperature, > 0
  double q = 0.0;     // external field
  int N = 2;          // number of spins, >= 1
  double c = 0.2;     // Glauber rate constant, > 0

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;
  bool phase_transition_regime() const { return b * beta > 1.0; }
  ModelParams with_field(double field) const {
    ModelParams copy = *this;
    copy.q = field;
    return copy;
  }
  ModelParams with_size(int spins) const {
    ModelParams copy = *this;
    copy.N = spins;
    return copy;
  }
};

enum class HamiltonianMode {
  exact,       // log-factorial multiplicities; finite at m = +-1
  asymptotic,  // N F + r_N / beta with the Stirling remainder r_N
};

/// The N+1 magnetization values m_j = -1 + 2 j / N (0-based j).
class StateSpace {
 public:
  explicit StateSpace(int N);
  int N() const { return N_; }
  std::size_t size() const { return static_cast<std::size_t>(N_) + 1; }
  double point(std::size_t j) const { return -1.0 + 2.0 * static_cast<double>(j) / N_; }
  /// mu_N mass of a single point.
  double weight() const { return 2.0 / N_; }
  std::vector<double> points() const;

 private:
  int N_;
};

/// Strictly positive density on M_N with sum_i rho_i = N/2.
class Density {
 public:
  /// Validates positivity and mass (relative tolerance 1e-12).
  explicit Density(std::vector<double> values);
  /// Rescales positive values to mass N/2 before validating.
  static Density normalized(std::vector<double> values);

  int N() const { return static_cast<int>(values_.size()) - 1; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const { return values_; }
  double mass() const;

 private:
  struct Trusted {};
  Density(std::vector<double> values, Trusted) : values_(std::move(values)) {}
  friend Density make_density_unchecked(std::vector<double> values);

  std::vector<double> values_;
};

/// For internal producers whose output is positive and normalized by
/// construction (up to round-off). Not part of the validated surface.
Density make_density_unchecked(std::vector<double> values);

/// Probability masses pi_i >= 0 on M_N summing to one.
class ProbabilityVector {
 public:
  explicit ProbabilityVector(std::vector<double> masses);
  int N() const { return static_cast<int>(masses_.size()) - 1; }
  std::size_t size() const { return masses_.size(); }
  double operator[](std::size_t i) const { return masses_[i]; }
  std::span<const double> values() const { return masses_; }

 private:
  std::vector<double> masses_;
};

/// A point (p, q, z) of the thermodynamic phase space with the Gibbs contact
/// form dz - p dq: p magnetization, q field, z minus free energy per spin.
struct ThermoPoint {
  double p = 0.0;
  double q = 0.0;
  double z = 0.0;
};

// --- scalar model functions -------------------------------------------------

/// c(m) = (1+m)/2 ln((1+m)/2) + (1-m)/2 ln((1-m)/2), with x ln x -> 0.
double mixing_entropy(double m);

/// F_{b,beta}(q, m) = -q m - b m^2/2 + c(m)/beta on [-1, 1].
double reduced_free_energy(double b, double beta, double q, double m);
/// dF/dm = -q - b m + atanh(m)/beta, for |m| < 1.
double reduced_free_energy_dm(double b, double beta, double q, double m);
/// d^2F/dm^2 = -b + 1/(beta (1 - m^2)), for |m| < 1.
double reduced_free_energy_dm2(double b, double beta, double m);

/// F_{b,beta}(q, m) with parameters taken from `params`. Throws DomainError
/// for |m| > 1.
double f_reduced(const ModelParams& params, double m);

/// theta(m) = tanh(beta (q + b m)).
double theta(const ModelParams& params, double m);

/// ln n! for 0 <= n <= N, accumulated with compensated summation.
class LogFactorials {
 public:
  explicit LogFactorials(int max_n);
  double operator()(int n) const { return table_[static_cast<std::size_t>(n)]; }
  double log_binomial(int n, int k) const { return (*this)(n) - ((*this)(k) + (*this)(n - k)); }

 private:
  std::vector<double> table_;
};

/// Lattice index k = (1+m) N / 2 of m in M_N; throws DomainError if m is not
/// a lattice point (tolerance 1e-9 on k).
int lattice_index(int N, double m);

/// ln C(N, (1+m) N / 2).
double log_binomial_exact(int N, double m);

/// Stirling approximation of ln C_N(m) including the 1/(12N) term.
double log_binomial_asymptotic(int N, double m);

/// r_N(m) = ln(2/N) + ln(2 pi N)/2 - ln(4/(1-m^2))/2 - (1 - 4/(1-m^2))/(12N)
/// for |m| < 1. Throws DomainError at |m| >= 1.
double remainder_asymptotic(int N, double m);

/// The remainder implied by the exact multiplicities,
/// ln(2/N) - ln C_N(m) - N c(m); finite on all of M_N.
double remainder_exact(int N, double m);

/// Difference between the additive constant ln(8 pi N)/2 quoted alongside
/// the effective Hamiltonian and the constant ln(2/N) + ln(2 pi N)/2 used
/// here. Equals ln N; exposed for diagnostics only.
double remainder_gauge_discrepancy(int N);

/// Effective Hamiltonian H_N(q, m) at a lattice point m.
///   exact:      N hbar(q,m) - ln C_N(m)/beta + ln(2/N)/beta
///   asymptotic: N F(q,m) + r_N(m)/beta   (DomainError at m = +-1)
double h_effective(const ModelParams& params, double m,
                   HamiltonianMode mode = HamiltonianMode::exact);

/// Remainder values on all of M_N. In asymptotic mode the two endpoint
/// values are extended so that the differences across the boundary edges
/// match the exact remainder (r_N itself diverges at m = +-1).
std::vector<double> remainder_vector(int N, HamiltonianMode mode);

/// H_N(q, m_i) for all i. In asymptotic mode uses `remainder_vector`.
std::vector<double> hamiltonian_vector(const ModelParams& params,
                                       HamiltonianMode mode = HamiltonianMode::exact);

// --- functionals of a density ------------------------------------------------

/// S(rho) = -(2/N) sum rho_i ln rho_i; rho ln rho is clamped to 0 for
/// rho <= 1e-300.
double entropy(const Density& rho);

/// p = (2/N) sum m_i rho_i, the magnetization.
double pressure(const Density& rho);

/// Phi(q, rho) = -S(rho)/beta + (2/N) sum H_i rho_i.
double free_energy(const ModelParams& params, const Density& rho,
                   HamiltonianMode mode = HamiltonianMode::exact);
/// Same, with a precomputed Hamiltonian vector.
double free_energy(const ModelParams& params, const Density& rho,
                   std::span<const double> hamiltonian);

/// Psi_N(q, rho) = -Phi(q, rho) / N, concave in rho.
double psi_rescaled(const ModelParams& params, const Density& rho,
                    HamiltonianMode mode = HamiltonianMode::exact);
double psi_rescaled(const ModelParams& params, const Density& rho,
                    std::span<const double> hamiltonian);

/// Gibbs density exp(-beta H_i) / Z via a log-sum-exp shift. Values that
/// would underflow are clamped to the smallest normal double.
Density gibbs(const ModelParams& params, HamiltonianMode mode = HamiltonianMode::exact);
Density gibbs_from_hamiltonian(const ModelParams& params, std::span<const double> hamiltonian);

struct PartitionFunction {
  double log_z = 0.0;  // ln Z_N(q), Z = (2/N) sum exp(-beta H_i)
  double f_n = 0.0;    // f_N(q) = ln Z / (beta N)
};

PartitionFunction log_partition_and_fN(const ModelParams& params,
                                       HamiltonianMode mode = HamiltonianMode::exact);

/// ln sum_i exp(x_i), shifted so the largest exponent is zero.
double log_sum_exp(std::span<const double> x);

/// L1(mu_N) distance (2/N) sum |rho_i - sigma_i|.
double l1_distance(const Density& rho, const Density& sigma);

}  // namespace spinchain

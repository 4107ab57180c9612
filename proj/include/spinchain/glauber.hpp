#pragma once

// Lumped Glauber dynamics on M_N: rates, generator, stationary vector,
// master equation and the comparison with the full spin-flip chain.

#include <cstddef>
#include <string>
#include <vector>

#include "spinchain/core_model.hpp"
#include "spinchain/parallel.hpp"
#include "spinchain/wasserstein.hpp"

namespace spinchain {

/// Pi_-(m) = c (1 + m) (1 - theta(m - 2/N)).
double Pi_minus(const ModelParams& params, double m);
/// Pi_+(m) = c (1 - m) (1 + theta(m + 2/N)).
double Pi_plus(const ModelParams& params, double m);

/// Largest c keeping every diagonal entry of P_N non-negative.
double max_admissible_c(const ModelParams& params);

class LumpedGenerator {
 public:
  LumpedGenerator(const ModelParams& params, const WassersteinStructure& structure);

  int N() const { return N_; }
  std::size_t size() const { return diag_.size(); }
  const ModelParams& params() const { return params_; }

  /// P(i, i-1) = Pi_+(m_{i-1}); P(i, i+1) = Pi_-(m_{i+1}); P(i, i) = 1 - Pi_- - Pi_+.
  double lower(std::size_t i) const { return lower_[i]; }  // P(i+1, i)
  double upper(std::size_t i) const { return upper_[i]; }  // P(i, i+1)
  double diag(std::size_t i) const { return diag_[i]; }
  double P(std::size_t i, std::size_t j) const;
  /// W = P - K.
  double W(std::size_t i, std::size_t j) const;
  double K(std::size_t i, std::size_t j) const;

  /// G x = N (P - I) x.
  std::vector<double> apply_G(const std::vector<double>& x) const;
  /// N W x and N (K - I) x.
  std::vector<double> apply_NW(const std::vector<double>& x) const;
  std::vector<double> apply_NK_minus_I(const std::vector<double>& x) const;

  double max_column_sum_error() const;
  /// Largest |G - N(K - I) - N W| entry; zero up to rounding.
  double split_residual() const { return split_residual_; }
  double max_exit_rate() const;
  double g_norm_inf() const;

 private:
  int N_;
  ModelParams params_;
  std::vector<double> lower_, upper_, diag_;
  std::vector<double> k_off_, k_diag_;
  double split_residual_ = 0.0;
};

LumpedGenerator build_generator(const ModelParams& params, const WassersteinStructure& structure);
LumpedGenerator build_generator(const ModelParams& params);

/// Stationary probability vector of the birth-death chain, from the zero-flux
/// relation pi_i P(i+1, i) = pi_{i+1} P(i, i+1) accumulated in log space.
std::vector<double> stationary_vector(const LumpedGenerator& gen);

/// Lumped Gibbs masses proportional to C_N(m) exp(-beta h(m)), h the total
/// energy -N(q m + b m^2 / 2).
std::vector<double> lumped_gibbs_masses(const ModelParams& params);

struct GlauberControls {
  double kappa = 0.5;            // dt_max = kappa / (N max exit rate)
  double dt_min = 1e-12;
  double negative_tol = 1e-12;
  double residual_tol = 0.0;     // stop once ||G pi||_1 falls below; 0 disables
  double record_interval = 0.0;  // 0: t_end / 200
};

struct GlauberTrajectory {
  std::vector<double> t;
  std::vector<std::vector<double>> pi;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  double max_mass_drift = 0.0;
  double min_component = 0.0;
  double final_residual = 0.0;
  std::string stop_reason;
};

GlauberTrajectory glauber_evolve(const LumpedGenerator& gen, const ProbabilityVector& pi0, double t_end,
                                 const GlauberControls& controls = {});

enum class FlipEnergy {
  from_hamiltonian,  // Delta = (h(sigma') - h(sigma)) / 2 with h the total energy
  two_over_n,        // Delta = q + b(m - 2/N) (down) and -q - b(m + 2/N) (up)
};

struct LumpReport {
  int N = 0;
  ModelParams params;
  FlipEnergy flip = FlipEnergy::from_hamiltonian;
  std::vector<double> lumped_up, lumped_down;  // per level, per unit time
  std::vector<double> target_up, target_down;  // N Pi_+(m), N Pi_-(m)
  double within_level_spread = 0.0;            // rates depend on m only
  double max_discrepancy = 0.0;
};

/// Builds the 2^N single-flip chain with rates 2c(1 - tanh(beta Delta)),
/// lumps it by magnetization and compares with N Pi_+-. N <= 14.
LumpReport full_chain_lump_check(const ModelParams& params, FlipEnergy flip = FlipEnergy::from_hamiltonian,
                                 Exec exec = Exec::parallel);

ProbabilityVector density_to_probability(const Density& rho);
Density probability_to_density(const ProbabilityVector& pi);

}  // namespace spinchain

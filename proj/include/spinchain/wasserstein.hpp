#pragma once

// Discrete Wasserstein (Maas) structure on densities over M_N and the
// Fokker-Planck flow it generates.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "spinchain/core_model.hpp"

namespace spinchain {

/// Antisymmetric edge field on the path graph; a[i] = A(i, i+1) = -A(i+1, i).
struct EdgeField {
  std::vector<double> a;
  std::size_t size() const { return a.size(); }
};

class WassersteinStructure {
 public:
  /// u_values[i] = u(m_i) for i = 0..N; each must lie in (0, 1/2).
  WassersteinStructure(int N, std::vector<double> u_values);

  int N() const { return N_; }
  std::size_t size() const { return u_.size(); }
  std::span<const double> u_values() const { return u_; }
  /// K(i, i+1) = K(i+1, i) = u(m_{i+1}).
  double off(std::size_t i) const { return u_[i + 1]; }
  double diag(std::size_t i) const;
  double max_u() const;

  std::vector<double> apply_K(std::span<const double> x) const;
  /// Dense copy, row-major; for tests.
  std::vector<double> dense_K() const;

 private:
  int N_;
  std::vector<double> u_;
};

/// u(m) = c (1 - m theta(m)), the choice matched to Glauber dynamics.
double glauber_u(const ModelParams& params, double m);

WassersteinStructure build_structure(const ModelParams& params,
                                     const std::function<double(double)>& u);
WassersteinStructure build_structure(const ModelParams& params);

/// Logarithmic mean (x - y) / (ln x - ln y), ell(x, x) = x.
double log_mean(double x, double y);

/// (grad psi)(i, i+1) = (N/2) (psi_i - psi_{i+1}).
EdgeField disc_grad(std::span<const double> psi);
/// (div A)_i = -(N/2) sum_j K_ij A_ij.
std::vector<double> disc_div(const EdgeField& A, const WassersteinStructure& s);

/// Logarithmic means of neighbouring density values.
EdgeField rho_hat(const Density& rho);

/// <phi, psi> = (2/N) sum phi_i psi_i.
double pairing(std::span<const double> phi, std::span<const double> psi);
/// (A, B) = (1/N) sum_ij K_ij A_ij B_ij.
double edge_inner(const WassersteinStructure& s, const EdgeField& A, const EdgeField& B);

/// Mean-zero phi with v = -div(rho_hat * grad phi). v is projected onto the
/// mean-zero subspace first.
std::vector<double> solve_potential(const WassersteinStructure& s, const Density& rho,
                                    std::span<const double> v);

double w_inner(const WassersteinStructure& s, const Density& rho, std::span<const double> v,
               std::span<const double> w);
double w_norm(const WassersteinStructure& s, const Density& rho, std::span<const double> v);

/// Wasserstein gradient of Psi_N(q, .), an ascent direction.
std::vector<double> grad_psi_w(const WassersteinStructure& s, const ModelParams& params,
                               const Density& rho, HamiltonianMode mode = HamiltonianMode::exact);
/// Same, with a precomputed Hamiltonian vector.
std::vector<double> grad_psi_w(const WassersteinStructure& s, const ModelParams& params,
                               const Density& rho, std::span<const double> hamiltonian);

struct FpControls {
  double kappa = 0.5;           // dt_max = kappa / (N^2 max u)
  double dt_min = 1e-12;
  double grad_tol = 1e-8;       // stop once the W-norm of the gradient drops below
  double psi_tol = 1e-12;       // allowed per-step decrease of Psi_N
  double record_interval = 0.0; // 0: t_end / 200
  HamiltonianMode mode = HamiltonianMode::exact;
};

struct FpTrajectory {
  std::vector<double> t;
  std::vector<Density> rho;
  std::vector<double> psi;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t floor_hits = 0;
  bool psi_monotone = true;
  double worst_psi_drop = 0.0;
  double max_mass_drift = 0.0;
  double final_grad_norm = 0.0;
  bool converged = false;
  std::string stop_reason;
};

FpTrajectory fp_evolve(const WassersteinStructure& s, const ModelParams& params, const Density& rho0,
                       double t_end, const FpControls& controls = {});

struct ThermoSample {
  double t = 0.0;
  ThermoPoint point;
  double psi = 0.0;
};

/// (pressure, q, Psi_N) along a trajectory.
std::vector<ThermoSample> thermo_trajectory(const ModelParams& params, const FpTrajectory& traj,
                                            HamiltonianMode mode = HamiltonianMode::exact);

}  // namespace spinchain

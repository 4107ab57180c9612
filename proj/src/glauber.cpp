#include "spinchain/glauber.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>

#include "spinchain/errors.hpp"

namespace spinchain {

namespace {

double clamp_m(double m) { return std::clamp(m, -1.0, 1.0); }

double exit_weight(const ModelParams& params, double m) {
  const double d = 2.0 / params.N;
  return (1.0 + m) * (1.0 - theta(params, clamp_m(m - d))) + (1.0 - m) * (1.0 + theta(params, clamp_m(m + d)));
}

}  // namespace

double Pi_minus(const ModelParams& params, double m) {
  return params.c * (1.0 + m) * (1.0 - theta(params, clamp_m(m - 2.0 / params.N)));
}

double Pi_plus(const ModelParams& params, double m) {
  return params.c * (1.0 - m) * (1.0 + theta(params, clamp_m(m + 2.0 / params.N)));
}

double max_admissible_c(const ModelParams& params) {
  const StateSpace space(params.N);
  double worst = 0.0;
  for (std::size_t i = 0; i < space.size(); ++i) worst = std::max(worst, exit_weight(params, space.point(i)));
  return 1.0 / worst;
}

LumpedGenerator::LumpedGenerator(const ModelParams& params, const WassersteinStructure& structure)
    : N_(params.N), params_(params) {
  params.validate();
  if (structure.N() != params.N) throw ConfigError("build_generator: structure size does not match N");
  const StateSpace space(N_);
  const std::size_t n = space.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double expected = glauber_u(params, space.point(i));
    if (std::abs(structure.u_values()[i] - expected) > 1e-14)
      throw ConfigError("build_generator: structure u does not match c (1 - m theta(m))");
  }

  lower_.resize(n - 1);
  upper_.resize(n - 1);
  diag_.resize(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    lower_[i] = Pi_plus(params, space.point(i));
    upper_[i] = Pi_minus(params, space.point(i + 1));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double m = space.point(i);
    diag_[i] = 1.0 - Pi_minus(params, m) - Pi_plus(params, m);
    if (diag_[i] < 0.0) {
      throw ConfigError("rate constant c = " + std::to_string(params.c) +
                        " makes P_N negative; maximal admissible c = " + std::to_string(max_admissible_c(params)));
    }
  }
  k_off_.resize(n - 1);
  k_diag_.resize(n);
  for (std::size_t i = 0; i + 1 < n; ++i) k_off_[i] = structure.off(i);
  for (std::size_t i = 0; i < n; ++i) k_diag_[i] = structure.diag(i);

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = (i > 0 ? i - 1 : 0); j <= std::min(n - 1, i + 1); ++j) {
      const double g = N_ * (P(i, j) - (i == j ? 1.0 : 0.0));
      const double split = N_ * (K(i, j) - (i == j ? 1.0 : 0.0)) + N_ * W(i, j);
      split_residual_ = std::max(split_residual_, std::abs(g - split));
    }
  }
}

double LumpedGenerator::P(std::size_t i, std::size_t j) const {
  if (i == j) return diag_[i];
  if (j + 1 == i) return lower_[j];
  if (i + 1 == j) return upper_[i];
  return 0.0;
}

double LumpedGenerator::K(std::size_t i, std::size_t j) const {
  if (i == j) return k_diag_[i];
  if (j + 1 == i) return k_off_[j];
  if (i + 1 == j) return k_off_[i];
  return 0.0;
}

double LumpedGenerator::W(std::size_t i, std::size_t j) const { return P(i, j) - K(i, j); }

std::vector<double> LumpedGenerator::apply_G(const std::vector<double>& x) const {
  const std::size_t n = size();
  std::vector<double> y(n, 0.0);
  // net flux across each edge; every flux enters one row and leaves another
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double net = N_ * (lower_[i] * x[i] - upper_[i] * x[i + 1]);
    y[i] -= net;
    y[i + 1] += net;
  }
  return y;
}

std::vector<double> LumpedGenerator::apply_NW(const std::vector<double>& x) const {
  const std::size_t n = size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = W(i, i) * x[i];
    if (i > 0) acc += W(i, i - 1) * x[i - 1];
    if (i + 1 < n) acc += W(i, i + 1) * x[i + 1];
    y[i] = N_ * acc;
  }
  return y;
}

std::vector<double> LumpedGenerator::apply_NK_minus_I(const std::vector<double>& x) const {
  const std::size_t n = size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    if (i > 0) acc += k_off_[i - 1] * (x[i - 1] - x[i]);
    if (i + 1 < n) acc += k_off_[i] * (x[i + 1] - x[i]);
    y[i] = N_ * acc;
  }
  return y;
}

double LumpedGenerator::max_column_sum_error() const {
  const std::size_t n = size();
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double s = diag_[j];
    if (j > 0) s += upper_[j - 1];
    if (j + 1 < n) s += lower_[j];
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

double LumpedGenerator::max_exit_rate() const {
  double worst = 0.0;
  for (double d : diag_) worst = std::max(worst, 1.0 - d);
  return worst;
}

double LumpedGenerator::g_norm_inf() const {
  const std::size_t n = size();
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double row = std::abs(diag_[i] - 1.0);
    if (i > 0) row += lower_[i - 1];
    if (i + 1 < n) row += upper_[i];
    worst = std::max(worst, N_ * row);
  }
  return worst;
}

LumpedGenerator build_generator(const ModelParams& params, const WassersteinStructure& structure) {
  return LumpedGenerator(params, structure);
}

LumpedGenerator build_generator(const ModelParams& params) {
  return LumpedGenerator(params, build_structure(params));
}

std::vector<double> stationary_vector(const LumpedGenerator& gen) {
  const std::size_t n = gen.size();
  std::vector<double> logw(n, 0.0);
  for (std::size_t i = 0; i + 1 < n; ++i) logw[i + 1] = logw[i] + std::log(gen.lower(i)) - std::log(gen.upper(i));
  const double lse = log_sum_exp(logw);
  std::vector<double> pi(n);
  for (std::size_t i = 0; i < n; ++i) pi[i] = std::exp(logw[i] - lse);
  return pi;
}

std::vector<double> lumped_gibbs_masses(const ModelParams& params) {
  const StateSpace space(params.N);
  const LogFactorials lf(params.N);
  std::vector<double> logw(space.size());
  for (std::size_t i = 0; i < logw.size(); ++i) {
    const double m = space.point(i);
    const double h = -params.N * (params.q * m + 0.5 * params.b * m * m);
    logw[i] = lf.log_binomial(params.N, static_cast<int>(i)) - params.beta * h;
  }
  const double lse = log_sum_exp(logw);
  std::vector<double> pi(logw.size());
  for (std::size_t i = 0; i < pi.size(); ++i) pi[i] = std::exp(logw[i] - lse);
  return pi;
}

GlauberTrajectory glauber_evolve(const LumpedGenerator& gen, const ProbabilityVector& pi0, double t_end,
                                 const GlauberControls& controls) {
  if (pi0.size() != gen.size()) throw DomainError("glauber_evolve: size mismatch");
  if (!(t_end >= 0.0)) throw ConfigError("glauber_evolve: t_end must be >= 0");
  const std::size_t n = gen.size();
  const double dt_max = controls.kappa / (gen.N() * gen.max_exit_rate());
  const double record_dt = controls.record_interval > 0.0 ? controls.record_interval : t_end / 200.0;

  GlauberTrajectory traj;
  std::vector<double> x(pi0.values().begin(), pi0.values().end());
  traj.t.push_back(0.0);
  traj.pi.push_back(x);
  traj.min_component = *std::min_element(x.begin(), x.end());

  auto residual = [&](const std::vector<double>& v) {
    double r = 0.0;
    for (double e : gen.apply_G(v)) r += std::abs(e);
    return r;
  };

  double t = 0.0;
  double dt = dt_max;
  double next_record = record_dt;
  std::vector<double> y(n), carry(n, 0.0), next_carry(n, 0.0);
  double res = residual(x);
  while (true) {
    if (controls.residual_tol > 0.0 && res < controls.residual_tol) {
      traj.stop_reason = "residual";
      break;
    }
    if (t >= t_end) {
      traj.stop_reason = "t_end";
      break;
    }
    const double h = std::min(dt, t_end - t);
    const auto k1 = gen.apply_G(x);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + 0.5 * h * k1[i];
    const auto k2 = gen.apply_G(y);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + 0.5 * h * k2[i];
    const auto k3 = gen.apply_G(y);
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + h * k3[i];
    const auto k4 = gen.apply_G(y);
    double lowest = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double inc = h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) - carry[i];
      y[i] = x[i] + inc;
      next_carry[i] = (y[i] - x[i]) - inc;
      lowest = std::min(lowest, y[i]);
    }
    if (lowest < -controls.negative_tol) {
      ++traj.rejected;
      dt = 0.5 * h;
      if (dt < controls.dt_min)
        throw StiffnessError("glauber_evolve: step size fell below dt_min; reduce N or the rate constant");
      continue;
    }
    traj.min_component = std::min(traj.min_component, lowest);
    for (std::size_t i = 0; i < n; ++i) {
      if (y[i] < 0.0) {
        y[i] = 0.0;
        next_carry[i] = 0.0;
      }
    }
    x.swap(y);
    carry.swap(next_carry);
    t += h;
    ++traj.accepted;
    double mass = 0.0;
    for (double v : x) mass += v;
    traj.max_mass_drift = std::max(traj.max_mass_drift, std::abs(mass - 1.0));
    if (h == dt) dt = std::min(2.0 * dt, dt_max);
    if (controls.residual_tol > 0.0) res = residual(x);
    if (t >= next_record || t >= t_end) {
      traj.t.push_back(t);
      traj.pi.push_back(x);
      while (next_record <= t) next_record += record_dt;
    }
  }
  traj.final_residual = residual(x);
  if (traj.t.back() != t) {
    traj.t.push_back(t);
    traj.pi.push_back(x);
  }
  return traj;
}

LumpReport full_chain_lump_check(const ModelParams& params, FlipEnergy flip, Exec exec) {
  params.validate();
  const int N = params.N;
  if (N > 14) throw SizeError("full_chain_lump_check: N must be <= 14 (2^N states)");
  const long states = 1L << N;
  const double d = 2.0 / N;

  auto total_energy = [&](double m) { return -N * (params.q * m + 0.5 * params.b * m * m); };
  auto rate = [&](double delta) { return 2.0 * params.c * (1.0 - std::tanh(params.beta * delta)); };

  std::vector<double> up(static_cast<std::size_t>(states)), down(static_cast<std::size_t>(states));
  auto body = [&](long s) {
    const auto bits = static_cast<std::uint32_t>(s);
    double up_total = 0.0, down_total = 0.0;
    const int ones = std::popcount(bits);
    const double m = static_cast<double>(2 * ones - N) / N;
    for (int j = 0; j < N; ++j) {
      const bool plus = (bits >> j) & 1U;
      const double m_new = plus ? m - d : m + d;
      double delta;
      if (flip == FlipEnergy::from_hamiltonian) {
        delta = 0.5 * (total_energy(m_new) - total_energy(m));
      } else {
        delta = plus ? params.q + params.b * (m - d) : -params.q - params.b * (m + d);
      }
      (plus ? down_total : up_total) += rate(delta);
    }
    up[s] = up_total;
    down[s] = down_total;
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static) num_threads(thread_cap())
    for (long s = 0; s < states; ++s) body(s);
  } else {
    for (long s = 0; s < states; ++s) body(s);
  }

  LumpReport report;
  report.N = N;
  report.params = params;
  report.flip = flip;
  const std::size_t levels = static_cast<std::size_t>(N) + 1;
  report.lumped_up.assign(levels, 0.0);
  report.lumped_down.assign(levels, 0.0);
  std::vector<double> count(levels, 0.0);
  std::vector<double> lo_up(levels, 1e300), hi_up(levels, -1e300), lo_dn(levels, 1e300), hi_dn(levels, -1e300);
  for (long s = 0; s < states; ++s) {
    const std::size_t k = static_cast<std::size_t>(std::popcount(static_cast<std::uint32_t>(s)));
    report.lumped_up[k] += up[s];
    report.lumped_down[k] += down[s];
    count[k] += 1.0;
    lo_up[k] = std::min(lo_up[k], up[s]);
    hi_up[k] = std::max(hi_up[k], up[s]);
    lo_dn[k] = std::min(lo_dn[k], down[s]);
    hi_dn[k] = std::max(hi_dn[k], down[s]);
  }
  const StateSpace space(N);
  report.target_up.resize(levels);
  report.target_down.resize(levels);
  for (std::size_t k = 0; k < levels; ++k) {
    report.lumped_up[k] /= count[k];
    report.lumped_down[k] /= count[k];
    const double m = space.point(k);
    report.target_up[k] = N * Pi_plus(params, m);
    report.target_down[k] = N * Pi_minus(params, m);
    report.within_level_spread =
        std::max({report.within_level_spread, hi_up[k] - lo_up[k], hi_dn[k] - lo_dn[k]});
    report.max_discrepancy = std::max({report.max_discrepancy, std::abs(report.lumped_up[k] - report.target_up[k]),
                                       std::abs(report.lumped_down[k] - report.target_down[k])});
  }
  return report;
}

ProbabilityVector density_to_probability(const Density& rho) {
  const double w = 2.0 / rho.N();
  std::vector<double> pi(rho.size());
  for (std::size_t i = 0; i < pi.size(); ++i) pi[i] = w * rho[i];
  return ProbabilityVector(std::move(pi));
}

Density probability_to_density(const ProbabilityVector& pi) {
  const double w = 0.5 * pi.N();
  std::vector<double> rho(pi.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = w * pi[i];
  return Density(std::move(rho));
}

}  // namespace spinchain

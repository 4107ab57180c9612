#include "spinchain/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spinchain/errors.hpp"

namespace spinchain {

WassersteinStructure::WassersteinStructure(int N, std::vector<double> u_values)
    : N_(N), u_(std::move(u_values)) {
  if (N < 1) throw DomainError("WassersteinStructure: N must be >= 1");
  if (u_.size() != static_cast<std::size_t>(N) + 1)
    throw ConfigError("WassersteinStructure: expected N+1 values of u");
  std::ostringstream bad;
  bad.precision(17);
  bool any = false;
  const StateSpace space(N);
  for (std::size_t i = 0; i < u_.size(); ++i) {
    if (!(u_[i] > 0.0 && u_[i] < 0.5)) {
      bad << (any ? ", " : "") << "m=" << space.point(i) << " (u=" << u_[i] << ")";
      any = true;
    }
  }
  if (any) throw ConfigError("u outside (0, 1/2) at " + bad.str());
}

double WassersteinStructure::diag(std::size_t i) const {
  double d = 1.0;
  if (i > 0) d -= u_[i];
  if (i + 1 < u_.size()) d -= u_[i + 1];
  return d;
}

double WassersteinStructure::max_u() const { return *std::max_element(u_.begin(), u_.end()); }

std::vector<double> WassersteinStructure::apply_K(std::span<const double> x) const {
  const std::size_t n = size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = diag(i) * x[i];
    if (i > 0) acc += off(i - 1) * x[i - 1];
    if (i + 1 < n) acc += off(i) * x[i + 1];
    y[i] = acc;
  }
  return y;
}

std::vector<double> WassersteinStructure::dense_K() const {
  const std::size_t n = size();
  std::vector<double> k(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    k[i * n + i] = diag(i);
    if (i + 1 < n) k[i * n + i + 1] = k[(i + 1) * n + i] = off(i);
  }
  return k;
}

double glauber_u(const ModelParams& params, double m) { return params.c * (1.0 - m * theta(params, m)); }

WassersteinStructure build_structure(const ModelParams& params, const std::function<double(double)>& u) {
  params.validate();
  const StateSpace space(params.N);
  std::vector<double> values(space.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = u(space.point(i));
  return WassersteinStructure(params.N, std::move(values));
}

WassersteinStructure build_structure(const ModelParams& params) {
  return build_structure(params, [&](double m) { return glauber_u(params, m); });
}

double log_mean(double x, double y) {
  if (!(x > 0.0) || !(y > 0.0)) throw DomainError("log_mean: arguments must be > 0");
  if (x == y) return x;
  const double d = x - y;
  if (std::abs(d) < 1e-8 * std::max(x, y)) {
    // ell = A / (1 + r^2/3 + r^4/5 + ...) with A the arithmetic mean, r = d/(x+y)
    const double r = d / (x + y);
    const double r2 = r * r;
    return 0.5 * (x + y) / (1.0 + r2 / 3.0 + r2 * r2 / 5.0);
  }
  return d / (std::log(x) - std::log(y));
}

EdgeField disc_grad(std::span<const double> psi) {
  if (psi.size() < 2) throw DomainError("disc_grad: need at least two values");
  const double half_n = 0.5 * static_cast<double>(psi.size() - 1);
  EdgeField g;
  g.a.resize(psi.size() - 1);
  for (std::size_t i = 0; i < g.a.size(); ++i) g.a[i] = half_n * (psi[i] - psi[i + 1]);
  return g;
}

std::vector<double> disc_div(const EdgeField& A, const WassersteinStructure& s) {
  if (A.size() + 1 != s.size()) throw DomainError("disc_div: size mismatch");
  const double half_n = 0.5 * s.N();
  std::vector<double> out(s.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double acc = 0.0;
    if (i + 1 < out.size()) acc += s.off(i) * A.a[i];
    if (i > 0) acc -= s.off(i - 1) * A.a[i - 1];
    out[i] = -half_n * acc;
  }
  return out;
}

EdgeField rho_hat(const Density& rho) {
  EdgeField r;
  r.a.resize(rho.size() - 1);
  for (std::size_t i = 0; i < r.a.size(); ++i) r.a[i] = log_mean(rho[i], rho[i + 1]);
  return r;
}

double pairing(std::span<const double> phi, std::span<const double> psi) {
  if (phi.size() != psi.size() || phi.size() < 2) throw DomainError("pairing: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) acc += phi[i] * psi[i];
  return 2.0 / static_cast<double>(phi.size() - 1) * acc;
}

double edge_inner(const WassersteinStructure& s, const EdgeField& A, const EdgeField& B) {
  if (A.size() + 1 != s.size() || B.size() != A.size()) throw DomainError("edge_inner: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < A.size(); ++i) acc += s.off(i) * A.a[i] * B.a[i];
  return 2.0 / s.N() * acc;
}

std::vector<double> solve_potential(const WassersteinStructure& s, const Density& rho,
                                    std::span<const double> v) {
  const std::size_t n = s.size();
  if (v.size() != n || rho.size() != n) throw DomainError("solve_potential: size mismatch");
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(n);

  // Path-graph Laplacian: the fluxes J_i = (N^2/4) w_i (phi_i - phi_{i+1})
  // are the prefix sums of v, so the bidiagonal factor is solved directly.
  const double scale = 0.25 * s.N() * s.N();
  std::vector<double> phi(n, 0.0);
  double flux = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    flux += v[i] - mean;
    const double w = scale * s.off(i) * log_mean(rho[i], rho[i + 1]);
    if (!(w > 0.0) || !std::isfinite(w)) throw InternalError("solve_potential: singular edge weight");
    phi[i + 1] = phi[i] - flux / w;
  }
  double shift = 0.0;
  for (double x : phi) shift += x;
  shift /= static_cast<double>(n);
  for (double& x : phi) x -= shift;
  return phi;
}

double w_inner(const WassersteinStructure& s, const Density& rho, std::span<const double> v,
               std::span<const double> w) {
  const std::vector<double> phi_v = solve_potential(s, rho, v);
  const std::vector<double> phi_w = solve_potential(s, rho, w);
  EdgeField gv = disc_grad(phi_v);
  const EdgeField gw = disc_grad(phi_w);
  const EdgeField r = rho_hat(rho);
  for (std::size_t i = 0; i < gv.size(); ++i) gv.a[i] *= r.a[i];
  return edge_inner(s, gv, gw);
}

double w_norm(const WassersteinStructure& s, const Density& rho, std::span<const double> v) {
  return std::sqrt(std::max(0.0, w_inner(s, rho, v, v)));
}

std::vector<double> grad_psi_w(const WassersteinStructure& s, const ModelParams& params,
                               const Density& rho, std::span<const double> hamiltonian) {
  const std::size_t n = s.size();
  if (rho.size() != n || hamiltonian.size() != n) throw DomainError("grad_psi_w: size mismatch");
  const double N = s.N();
  EdgeField flux = disc_grad(hamiltonian);
  for (std::size_t i = 0; i < flux.size(); ++i) flux.a[i] *= log_mean(rho[i], rho[i + 1]);
  std::vector<double> out = disc_div(flux, s);
  const double diffusion = N / (4.0 * params.beta);
  for (std::size_t i = 0; i < n; ++i) {
    double lap = 0.0;
    if (i > 0) lap += s.off(i - 1) * (rho[i - 1] - rho[i]);
    if (i + 1 < n) lap += s.off(i) * (rho[i + 1] - rho[i]);
    out[i] = diffusion * lap + out[i] / N;
  }
  return out;
}

std::vector<double> grad_psi_w(const WassersteinStructure& s, const ModelParams& params,
                               const Density& rho, HamiltonianMode mode) {
  const std::vector<double> H = hamiltonian_vector(params, mode);
  return grad_psi_w(s, params, rho, H);
}

namespace {

bool all_positive(const std::vector<double>& x) {
  for (double v : x)
    if (!(v > 0.0)) return false;
  return true;
}

}  // namespace

FpTrajectory fp_evolve(const WassersteinStructure& s, const ModelParams& params, const Density& rho0,
                       double t_end, const FpControls& controls) {
  params.validate();
  if (rho0.size() != s.size() || params.N != s.N()) throw DomainError("fp_evolve: size mismatch");
  if (!(t_end >= 0.0)) throw ConfigError("fp_evolve: t_end must be >= 0");

  const std::vector<double> H = hamiltonian_vector(params, controls.mode);
  const std::size_t n = s.size();
  const double N = s.N();
  const double half_n = 0.5 * N;
  const double floor = 1e-14 * half_n;
  const double dt_max = controls.kappa / (N * N * s.max_u());
  const double record_dt = controls.record_interval > 0.0 ? controls.record_interval : t_end / 200.0;

  FpTrajectory traj;
  std::vector<double> x(rho0.values().begin(), rho0.values().end());
  Density cur = make_density_unchecked(x);
  double psi = psi_rescaled(params, cur, H);
  double t = 0.0;
  double dt = dt_max;
  double next_record = record_dt;
  traj.t.push_back(t);
  traj.rho.push_back(cur);
  traj.psi.push_back(psi);

  auto rhs = [&](const std::vector<double>& y) {
    return grad_psi_w(s, params, make_density_unchecked(y), H);
  };

  std::vector<double> y(n), k1, k2, k3, k4;
  double gnorm = w_norm(s, cur, rhs(x));
  while (true) {
    if (gnorm < controls.grad_tol) {
      traj.converged = true;
      traj.stop_reason = "gradient_norm";
      break;
    }
    if (t >= t_end) {
      traj.stop_reason = "t_end";
      break;
    }
    const double h = std::min(dt, t_end - t);
    k1 = rhs(x);
    bool ok = true;
    for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + 0.5 * h * k1[i];
    ok = all_positive(y);
    if (ok) {
      k2 = rhs(y);
      for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + 0.5 * h * k2[i];
      ok = all_positive(y);
    }
    if (ok) {
      k3 = rhs(y);
      for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + h * k3[i];
      ok = all_positive(y);
    }
    double psi_new = psi;
    if (ok) {
      k4 = rhs(y);
      for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      ok = all_positive(y);
      if (ok) {
        psi_new = psi_rescaled(params, make_density_unchecked(y), H);
        ok = psi_new >= psi - controls.psi_tol;
      }
    }
    if (!ok) {
      ++traj.rejected;
      dt = 0.5 * h;
      if (dt < controls.dt_min)
        throw StiffnessError("fp_evolve: step size fell below dt_min; reduce N or the rate constant");
      continue;
    }

    bool floored = false;
    for (double& v : y) {
      if (v < floor) {
        v = floor;
        floored = true;
      }
    }
    if (floored) {
      ++traj.floor_hits;
      double mass = 0.0;
      for (double v : y) mass += v;
      for (double& v : y) v *= half_n / mass;
      psi_new = psi_rescaled(params, make_density_unchecked(y), H);
    }
    if (psi_new < psi) {
      traj.worst_psi_drop = std::max(traj.worst_psi_drop, psi - psi_new);
      if (psi - psi_new > controls.psi_tol) traj.psi_monotone = false;
    }
    x.swap(y);
    t += h;
    psi = psi_new;
    ++traj.accepted;
    double mass = 0.0;
    for (double v : x) mass += v;
    traj.max_mass_drift = std::max(traj.max_mass_drift, std::abs(mass - half_n));
    if (h == dt) dt = std::min(2.0 * dt, dt_max);

    cur = make_density_unchecked(x);
    gnorm = w_norm(s, cur, rhs(x));
    if (t >= next_record || t >= t_end || gnorm < controls.grad_tol) {
      traj.t.push_back(t);
      traj.rho.push_back(cur);
      traj.psi.push_back(psi);
      while (next_record <= t) next_record += record_dt;
    }
  }
  traj.final_grad_norm = gnorm;
  if (traj.t.back() != t) {
    traj.t.push_back(t);
    traj.rho.push_back(cur);
    traj.psi.push_back(psi);
  }
  return traj;
}

std::vector<ThermoSample> thermo_trajectory(const ModelParams& params, const FpTrajectory& traj,
                                            HamiltonianMode mode) {
  const std::vector<double> H = hamiltonian_vector(params, mode);
  std::vector<ThermoSample> out;
  out.reserve(traj.t.size());
  for (std::size_t k = 0; k < traj.t.size(); ++k) {
    const double psi = psi_rescaled(params, traj.rho[k], H);
    out.push_back(ThermoSample{traj.t[k], ThermoPoint{pressure(traj.rho[k]), params.q, psi}, psi});
  }
  return out;
}

}  // namespace spinchain

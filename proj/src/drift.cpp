#include "spinchain/drift.hpp"

#include <algorithm>
#include <cmath>

#include "spinchain/errors.hpp"

namespace spinchain {

namespace {

constexpr double kLhopitalSwitch = 1e-8;
constexpr double kFoldTol = 1e-12;

double dtheta(const ModelParams& params, double m) {
  const double t = theta(params, m);
  return params.beta * params.b * (1.0 - t * t);
}

}  // namespace

double drift_fp(const ModelParams& params, double m) {
  if (!(std::abs(m) < 1.0)) throw DomainError("drift_fp: |m| must be < 1");
  return glauber_u(params, m) * reduced_free_energy_dm(params.b, params.beta, params.q, m);
}

double drift_glauber(const ModelParams& params, double m) {
  if (!(std::abs(m) <= 1.0)) throw DomainError("drift_glauber: |m| must be <= 1");
  return 4.0 * params.c * (m - theta(params, m));
}

double mu_ratio(const ModelParams& params, double m) {
  if (!(std::abs(m) < 1.0)) throw DomainError("mu_ratio: |m| must be < 1");
  const double den = reduced_free_energy_dm(params.b, params.beta, params.q, m);
  if (std::abs(den) >= kLhopitalSwitch) return (m - theta(params, m)) / den;
  const double d2 = reduced_free_energy_dm2(params.b, params.beta, m);
  if (std::abs(d2) < kFoldTol) throw NumericalError("mu_ratio: unresolved singularity, F'' vanishes at a root");
  return (1.0 - dtheta(params, m)) / d2;
}

double drift_factor_as_stated(const ModelParams& params, double m) {
  return 4.0 * glauber_u(params, m) * mu_ratio(params, m);
}

double drift_factor_exact(const ModelParams& params, double m) {
  return 4.0 * params.c * mu_ratio(params, m) / glauber_u(params, m);
}

DriftField sample_drift(const ModelParams& params, const std::vector<double>& grid,
                        const std::function<double(const ModelParams&, double)>& field, std::string label) {
  DriftField out;
  out.m = grid;
  out.label = std::move(label);
  out.values.reserve(grid.size());
  for (double m : grid) out.values.push_back(field(params, m));
  return out;
}

SmoothProfile default_profile() {
  SmoothProfile p;
  p.value = [](double m) { return std::exp(-(m - 0.2) * (m - 0.2)) * (1.0 + 0.3 * m); };
  p.derivative = [](double m) {
    const double e = std::exp(-(m - 0.2) * (m - 0.2));
    return e * (0.3 - 2.0 * (m - 0.2) * (1.0 + 0.3 * m));
  };
  return p;
}

Density restrict_profile(const SmoothProfile& profile, int N, double* scale) {
  const StateSpace space(N);
  std::vector<double> values(space.size());
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = profile.value(space.point(i));
    total += values[i];
  }
  const double s = 0.5 * N / total;
  for (double& v : values) v *= s;
  if (scale != nullptr) *scale = s;
  return Density(std::move(values));
}

std::vector<double> discrete_drift_fp(const ModelParams& params, const WassersteinStructure& s,
                                      const Density& rho, HamiltonianMode mode) {
  const std::vector<double> H = hamiltonian_vector(params, mode);
  EdgeField flux = disc_grad(H);
  for (std::size_t i = 0; i < flux.size(); ++i) flux.a[i] *= log_mean(rho[i], rho[i + 1]);
  std::vector<double> out = disc_div(flux, s);
  for (double& v : out) v /= params.N;
  return out;
}

std::vector<double> discrete_drift_glauber(const LumpedGenerator& gen, const Density& rho) {
  return gen.apply_NW(std::vector<double>(rho.values().begin(), rho.values().end()));
}

double continuum_drift_fp(const ModelParams& params, const SmoothProfile& profile, double scale, double m) {
  const double t = theta(params, m);
  const double u = params.c * (1.0 - m * t);
  const double du = -params.c * (t + m * dtheta(params, m));
  const double f1 = reduced_free_energy_dm(params.b, params.beta, params.q, m);
  const double f2 = reduced_free_energy_dm2(params.b, params.beta, m);
  const double r = scale * profile.value(m);
  const double dr = scale * profile.derivative(m);
  return du * f1 * r + u * f2 * r + u * f1 * dr;
}

double continuum_drift_glauber(const ModelParams& params, const SmoothProfile& profile, double scale, double m) {
  const double r = scale * profile.value(m);
  const double dr = scale * profile.derivative(m);
  return 4.0 * params.c * ((1.0 - dtheta(params, m)) * r + (m - theta(params, m)) * dr);
}

void loglog_fit(const std::vector<double>& x, const std::vector<double>& y, double& slope, double& intercept) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("loglog_fit: need at least two pairs");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("loglog_fit: values must be > 0");
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  intercept = (sy - slope * sx) / n;
}

RateFit drift_rate_fit(const ModelParams& params, const std::vector<int>& ladder, DriftKind kind, double window,
                       const SmoothProfile& profile, HamiltonianMode mode) {
  RateFit fit;
  fit.N_values = ladder;
  std::vector<double> xs;
  for (int N : ladder) {
    const ModelParams p = params.with_size(N);
    const StateSpace space(N);
    double scale = 1.0;
    const Density rho = restrict_profile(profile, N, &scale);
    const WassersteinStructure s = build_structure(p);
    std::vector<double> disc;
    if (kind == DriftKind::fokker_planck) {
      disc = discrete_drift_fp(p, s, rho, mode);
    } else {
      disc = discrete_drift_glauber(build_generator(p, s), rho);
    }
    double err = 0.0;
    for (std::size_t i = 0; i < space.size(); ++i) {
      const double m = space.point(i);
      if (std::abs(m) > window) continue;
      const double target = kind == DriftKind::fokker_planck ? continuum_drift_fp(p, profile, scale, m)
                                                             : continuum_drift_glauber(p, profile, scale, m);
      err = std::max(err, std::abs(disc[i] - target));
    }
    fit.errors.push_back(err);
    xs.push_back(N);
  }
  loglog_fit(xs, fit.errors, fit.slope, fit.intercept);
  return fit;
}

std::vector<MagnetizationSample> suzuki_kubo_flow(const ModelParams& params, double m0, double t_end, double dt) {
  if (!(std::abs(m0) < 1.0)) throw DomainError("suzuki_kubo_flow: |m0| must be < 1");
  if (!(dt > 0.0)) throw ConfigError("suzuki_kubo_flow: dt must be > 0");
  auto f = [&](double m) { return -4.0 * params.c * (m - theta(params, m)); };
  std::vector<MagnetizationSample> out;
  out.push_back({0.0, m0});
  double m = m0;
  const long steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
  for (long k = 1; k <= steps; ++k) {
    const double h = std::min(dt, t_end - (k - 1) * dt);
    const double k1 = f(m);
    const double k2 = f(m + 0.5 * h * k1);
    const double k3 = f(m + 0.5 * h * k2);
    const double k4 = f(m + h * k3);
    m += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.push_back({(k - 1) * dt + h, m});
  }
  return out;
}

}  // namespace spinchain

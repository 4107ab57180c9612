#pragma once

// Drift fields of the Fokker-Planck and Glauber dynamics, their ratio mu,
// the finite-N discrete drifts and the Suzuki-Kubo magnetization ODE.

#include <functional>
#include <string>
#include <vector>

#include "spinchain/core_model.hpp"
#include "spinchain/glauber.hpp"
#include "spinchain/wasserstein.hpp"

namespace spinchain {

/// u(m) F'(m), u = c(1 - m theta(m)).
double drift_fp(const ModelParams& params, double m);
/// 4c(m - theta(m)).
double drift_glauber(const ModelParams& params, double m);
/// (m - theta) / F'(m); limit (1 - theta') / F'' where F' vanishes.
double mu_ratio(const ModelParams& params, double m);

/// The factor 4 u mu and the factor 4 c mu / u relating Drift_G to Drift_FP.
double drift_factor_as_stated(const ModelParams& params, double m);
double drift_factor_exact(const ModelParams& params, double m);

struct DriftField {
  std::vector<double> m;
  std::vector<double> values;
  std::string label;
};

DriftField sample_drift(const ModelParams& params, const std::vector<double>& grid,
                        const std::function<double(const ModelParams&, double)>& field, std::string label);

/// Smooth positive profile with its derivative.
struct SmoothProfile {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

/// exp(-(m - 0.2)^2) (1 + 0.3 m); positive on [-1, 1].
SmoothProfile default_profile();

/// Restriction of the profile to M_N, rescaled to mass N/2. `scale` receives
/// the rescaling factor.
Density restrict_profile(const SmoothProfile& profile, int N, double* scale = nullptr);

/// (1/N) div(rho_hat * grad H): div(rho_hat grad F) + div(rho_hat grad r_N)/(N beta).
std::vector<double> discrete_drift_fp(const ModelParams& params, const WassersteinStructure& s,
                                      const Density& rho, HamiltonianMode mode = HamiltonianMode::asymptotic);
/// N W_N rho.
std::vector<double> discrete_drift_glauber(const LumpedGenerator& gen, const Density& rho);

/// (u F' rho)' and 4c((m - theta) rho)' for rho = scale * profile.
double continuum_drift_fp(const ModelParams& params, const SmoothProfile& profile, double scale, double m);
double continuum_drift_glauber(const ModelParams& params, const SmoothProfile& profile, double scale, double m);

enum class DriftKind { fokker_planck, glauber };

struct RateFit {
  std::vector<int> N_values;
  std::vector<double> errors;
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares line through (ln x, ln y).
void loglog_fit(const std::vector<double>& x, const std::vector<double>& y, double& slope, double& intercept);

/// Max error over |m| <= window of the discrete drift against its target,
/// for each N of the ladder, with the fitted log-log slope.
RateFit drift_rate_fit(const ModelParams& params, const std::vector<int>& ladder, DriftKind kind,
                       double window = 0.8, const SmoothProfile& profile = default_profile(),
                       HamiltonianMode mode = HamiltonianMode::asymptotic);

struct MagnetizationSample {
  double t = 0.0;
  double m = 0.0;
};

/// RK4 for dm/dt = -4c(m - theta(m)) with fixed step dt.
std::vector<MagnetizationSample> suzuki_kubo_flow(const ModelParams& params, double m0, double t_end,
                                                  double dt = 1e-2);

}  // namespace spinchain

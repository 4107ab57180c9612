#pragma once

// Equilibrium Legendrian curves: finite N (from the partition function) and
// the infinite-N Curie-Weiss Legendrian with its branches and limit curve.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spinchain/core_model.hpp"
#include "spinchain/parallel.hpp"

namespace spinchain {

enum class BranchKind { stable, metastable, unstable, none };

std::string_view to_string(BranchKind kind);

struct BranchPoint {
  double p = 0.0;
  double q = 0.0;
  double z = 0.0;
  BranchKind kind = BranchKind::stable;
};

struct ThermoCurve {
  std::vector<ThermoPoint> samples;
  std::vector<BranchKind> kinds;  // empty or one per sample
  std::string label;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
};

/// All roots of p = tanh(beta (q + b p)) in (-1, 1), sorted by p, classified
/// by the values of F(q, .) at the roots.
std::vector<BranchPoint> mean_field_roots(double b, double beta, double q);

/// Point of the Curie-Weiss Legendrian parametrized by p.
ThermoPoint lambda_inf_point(double b, double beta, double p);

/// Samples lambda_inf_point over p_grid; kinds come from mean_field_roots at
/// q(p).
ThermoCurve lambda_inf_curve(double b, double beta, std::span<const double> p_grid,
                             Exec exec = Exec::parallel);

/// Largest |dz - pbar dq| over consecutive samples (pbar the average of the
/// two p values).
double contact_residual(const ThermoCurve& curve);

/// (pressure(gibbs(q)), q, f_N(q)) for each q.
ThermoCurve finite_legendrian(const ModelParams& params, std::span<const double> q_grid,
                              HamiltonianMode mode = HamiltonianMode::exact,
                              Exec exec = Exec::parallel);

/// f(q) = max_m (-F(q, m)), the limiting free energy per spin.
double f_limit(double b, double beta, double q);

/// Positive stable root at q = 0 (zero when b beta <= 1).
double spontaneous_magnetization(double b, double beta);

struct LimitSegment {
  double p_lo = 0.0;
  double p_hi = 0.0;
  double q = 0.0;
  double z = 0.0;
};

/// The vertical piece of the limit curve: q = 0, p in [-p*, p*], z = f(0).
LimitSegment limit_segment(double b, double beta);
/// The alternative endpoints (p = -1, 1; q = 0; z = 0), kept for
/// diagnostics.
LimitSegment limit_segment_as_stated();

/// Stable branch over [q_lo, q_hi] minus q = 0 plus the subdifferential
/// segment at q = 0. `points` samples per side, cubic-clustered towards 0.
ThermoCurve limit_curve(double b, double beta, double q_lo, double q_hi, int points = 2001);

/// Symmetric Hausdorff distance of two polylines in (p, q, z), using
/// point-to-segment distances.
double hausdorff_distance(const ThermoCurve& a, const ThermoCurve& b, Exec exec = Exec::parallel);

/// q values s^3 (q_max), s uniform in [-1, 1]; dense near zero.
std::vector<double> cubic_q_grid(double q_max, int points);

std::vector<double> linspace(double lo, double hi, int points);

}  // namespace spinchain

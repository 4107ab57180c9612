#pragma once

// Legendre-Fenchel transforms on grids, convex and concave envelopes of
// F(0, .), finite-N basin bounds and the limiting basin shape.

#include <span>
#include <vector>

#include "spinchain/core_model.hpp"
#include "spinchain/parallel.hpp"

namespace spinchain {

struct GridFunction {
  std::vector<double> x;
  std::vector<double> g;

  std::size_t size() const { return x.size(); }
  /// Throws DomainError unless size >= 3 and x is strictly increasing.
  void validate() const;
  /// Linear interpolation, clamped to the end values outside [x_0, x_K].
  double interpolate(double at) const;
};

/// g^(s) = max_k (s x_k - g_k) for every slope (any order). Works through the
/// lower hull of g, so the cost is linear after sorting the slopes.
GridFunction legendre_transform(const GridFunction& g, std::span<const double> slopes);

/// Slopes of the lower-hull edges of g, plus one slope beyond each end.
std::vector<double> conjugate_breakpoints(const GridFunction& g);

/// Double conjugate on the grid of g (the convex envelope).
GridFunction convex_envelope(const GridFunction& g);
/// -(double conjugate of -g) (the concave envelope).
GridFunction concave_envelope(const GridFunction& g);

struct EnvelopePair {
  double b = 0.0;
  double beta = 0.0;
  GridFunction F;      // F(0, p)
  GridFunction lower;  // G-
  GridFunction upper;  // G+

  /// Off-grid values: min(F, interpolated G-) and max(F, interpolated G+).
  double lower_at(double p) const;
  double upper_at(double p) const;
};

/// {-1} U linspace(-1 + eps, 1 - eps, points) U {1}.
std::vector<double> envelope_grid(int points = 2001, double eps = 1e-4);

/// Envelopes of F_{b,beta}(0, .) on p_grid; -1 and 1 are added when absent.
EnvelopePair envelopes(double b, double beta, std::span<const double> p_grid);
EnvelopePair envelopes(double b, double beta);

/// alpha^- = p0 q0 - sup Psi_N(q0, rho) over densities with mean p0, by
/// exponential tilting (the maximizer is a Gibbs density at a shifted field).
double finite_alpha_plus(const ModelParams& params, double p0);
/// alpha^+ = p0 q0 - inf Psi_N(q0, rho) over the closure, attained on one- or
/// two-point supports. O(N^2); N <= 2000.
double finite_alpha_minus_bound(const ModelParams& params, double p0, Exec exec = Exec::parallel);

/// Same numbers under role names: the lower bound alpha^- and the upper alpha^+.
inline double alpha_lower(const ModelParams& params, double p0) { return finite_alpha_plus(params, p0); }
inline double alpha_upper(const ModelParams& params, double p0, Exec exec = Exec::parallel) {
  return finite_alpha_minus_bound(params, p0, exec);
}

/// Field at which the tilted Gibbs density has mean p0.
double tilt_field(const ModelParams& params, double p0);

enum class Membership { inside, boundary, outside };

const char* to_string(Membership m);

/// Position of pq - z relative to [G-(p), G+(p)], with a 1e-9 boundary band.
Membership basin_membership_inf(double b, double beta, const ThermoPoint& point, const EnvelopePair& env);

struct MonotonicityFacts {
  bool p_plus_increasing = true;   // positive stable root grows with beta
  bool p_minus_decreasing = true;  // negative stable root falls with beta
  bool F_increasing_in_beta = true;
  double endpoint_value_error = 0.0;  // max |F(0, +-1) + b/2|
};

struct BasinComparison {
  double b = 0.0, beta0 = 0.0, beta1 = 0.0;
  std::size_t samples = 0;
  bool inclusion = false;
  bool disjoint = false;
  double inclusion_margin = 0.0;  // min over samples of min(F - G-, G+ - F)
  double disjoint_margin = 0.0;   // min over samples of max(G- - F, F - G+)
  MonotonicityFacts facts;
};

/// Tests the stable part of the graph of F_{b,beta0}(0, .) against the
/// envelopes of beta1.
BasinComparison compare_basins(double b, double beta0, double beta1, std::span<const double> grid);

MonotonicityFacts monotonicity_facts(double b, double beta_lo, double beta_hi, std::span<const double> grid,
                                     int steps = 11);

}  // namespace spinchain

#pragma once

// Reeb chords between the Curie-Weiss Legendrians of a quench, and the toy
// contact model with a strictly convex h.

#include <functional>
#include <string>
#include <vector>

#include "spinchain/core_model.hpp"

namespace spinchain {

struct QuenchSpec {
  double b = 1.0;
  double beta0 = 1.0;
  double beta1 = 1.0;
  double a = 0.0;                 // field shift
  bool literal_b_absent = false;  // q + p = T atanh p instead of q + b p = T atanh p

  void validate() const;
};

struct ChordResult {
  double p = 0.0;
  double q_star = 0.0;
  double z0 = 0.0;
  double z1 = 0.0;
  double length = 0.0;
  bool stable = false;
  double x1 = 0.0;
  double T0 = 0.0;
  double T1 = 0.0;
  bool swapped = false;
};

/// Positive root of b x = T atanh(x) (zero when b <= T).
double stability_threshold(double b, double T);

ChordResult reeb_chord(const QuenchSpec& spec);

struct ChordFixedPointReport {
  double drift_fp = 0.0;         // terminal Fokker-Planck drift at p
  double drift_glauber = 0.0;    // terminal Glauber drift at p
  double flow_deviation = 0.0;   // max |m(t) - p| of the Suzuki-Kubo flow from p
  bool drift_vanishes = false;   // both drifts below 1e-10
  bool flow_stationary = false;  // deviation below 1e-8
  bool instant = false;          // stable chord with both properties
};

ChordFixedPointReport chord_fixed_point_check(const QuenchSpec& spec, const ChordResult& chord,
                                              double t_end = 50.0);

/// Terminal mean-field residuals at (p, q); zero for the chord point.
double chord_residual_initial(const QuenchSpec& spec, const ChordResult& chord);
double chord_residual_terminal(const QuenchSpec& spec, const ChordResult& chord);

// --- toy contact model -------------------------------------------------------

struct ToyH {
  std::function<double(double)> h;
  std::function<double(double)> dh;
  std::function<double(double)> d2h;
  double p_lo = -1.0;
  double p_hi = 1.0;
};

/// h(p) = p^2/2 + p^4/4 on [-1, 1].
ToyH quartic_toy();
/// h(p) = p^2/2 on [-1, 1].
ToyH quadratic_toy();

/// (h')^{-1}(q) by guarded Newton with bisection; DomainError outside h'([p_lo, p_hi]).
double toy_inverse_derivative(const ToyH& h, double q);
/// h*(q) = q P - h(P), P = (h')^{-1}(q).
double toy_conjugate(const ToyH& h, double q);

struct ToyFields {
  double v = 0.0;  // q - h'(p)
  double w = 0.0;  // -p + (h')^{-1}(q)
};

ToyFields toy_fields(const ToyH& h, double p, double q);

struct ScalarProductReport {
  std::size_t samples = 0;
  double c = 0.0;  // min (v, w) / |p - P|^2 off equilibrium
  bool positive = false;
  double min_product = 0.0;
};

ScalarProductReport toy_scalar_product_check(const ToyH& h, int np = 101, int nq = 101);

enum class ToyFlow { gradient, contact };

const char* to_string(ToyFlow flow);

struct ToySample {
  double t = 0.0;
  double p = 0.0;
  double q = 0.0;
  double z = 0.0;
};

struct ToyTrajectory {
  ToyFlow flow = ToyFlow::gradient;
  std::vector<ToySample> samples;
};

/// Gradient flow p' = v, z' = v p' (z starts on z = q p - h(p)); contact flow
/// p' = w, z' = -z + h*(q). Fixed-step RK4.
ToyTrajectory toy_flow(const ToyH& h, ToyFlow flow, double p0, double q, double z0, double t_end,
                       double dt = 1e-2);

struct HaslachReport {
  std::size_t checked = 0;
  double min_lambda = 0.0;          // over samples with |p - P| > 1e-6
  double lambda_at_equilibrium = 0.0;
  bool admissible = false;
};

/// lambda(gamma') = (v, p') along the trajectory.
HaslachReport haslach_admissibility(const ToyH& h, const ToyTrajectory& traj);

}  // namespace spinchain

#include "spinchain/chords.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spinchain/drift.hpp"
#include "spinchain/equilibrium.hpp"
#include "spinchain/errors.hpp"

namespace spinchain {

void QuenchSpec::validate() const {
  if (!(b > 0.0 && beta0 > 0.0 && beta1 > 0.0)) throw ConfigError("quench: b, beta0, beta1 must be > 0");
  if (!(b * beta0 > 1.0 && b * beta1 > 1.0)) throw ConfigError("quench: need b beta0 > 1 and b beta1 > 1");
  if (!std::isfinite(a)) throw ConfigError("quench: a must be finite");
}

double stability_threshold(double b, double T) {
  if (!(b > T)) return 0.0;
  // g(x) = b x - T atanh(x) is positive just right of 0 and tends to -inf at 1
  double lo = 0.5 * (1.0 - T / b), hi = 1.0;
  while (b * lo - T * std::atanh(lo) <= 0.0) lo *= 0.5;
  for (int k = 0; k < 200 && hi - lo > 1e-16; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (b * mid - T * std::atanh(mid) > 0.0) lo = mid;
    else hi = mid;
  }
  double x = 0.5 * (lo + hi);
  for (int k = 0; k < 3; ++k) {
    const double d = b - T / (1.0 - x * x);
    if (d == 0.0) break;
    const double next = x - (b * x - T * std::atanh(x)) / d;
    if (!(next > 0.0 && next < 1.0)) break;
    x = next;
  }
  return x;
}

ChordResult reeb_chord(const QuenchSpec& spec_in) {
  spec_in.validate();
  if (!(spec_in.a > 0.0)) throw DomainError("reeb_chord: field shift a must be > 0");
  QuenchSpec spec = spec_in;
  ChordResult r;
  r.T0 = 1.0 / spec.beta0;
  r.T1 = 1.0 / spec.beta1;
  if (r.T1 == r.T0) throw DomainError("reeb_chord: degenerate quench, T1 = T0");
  if (r.T1 < r.T0) {
    std::swap(spec.beta0, spec.beta1);
    std::swap(r.T0, r.T1);
    r.swapped = true;
  }
  const double coupling = spec.literal_b_absent ? 1.0 : spec.b;
  r.p = std::tanh(spec.a / (r.T1 - r.T0));
  r.q_star = r.T0 * std::atanh(r.p) - coupling * r.p;
  r.x1 = stability_threshold(spec.b, r.T1);
  r.stable = r.p > r.x1;
  if (r.p < 1.0) {
    r.z0 = lambda_inf_point(spec.b, spec.beta0, r.p).z;
    r.z1 = lambda_inf_point(spec.b, spec.beta1, r.p).z;
  } else {
    r.z0 = r.z1 = std::numeric_limits<double>::infinity();
  }
  r.length = std::abs(r.z1 - r.z0);
  return r;
}

double chord_residual_initial(const QuenchSpec& spec, const ChordResult& chord) {
  const double coupling = spec.literal_b_absent ? 1.0 : spec.b;
  return chord.q_star + coupling * chord.p - chord.T0 * std::atanh(chord.p);
}

double chord_residual_terminal(const QuenchSpec& spec, const ChordResult& chord) {
  const double coupling = spec.literal_b_absent ? 1.0 : spec.b;
  return spec.a + chord.q_star + coupling * chord.p - chord.T1 * std::atanh(chord.p);
}

ChordFixedPointReport chord_fixed_point_check(const QuenchSpec& spec, const ChordResult& chord, double t_end) {
  ModelParams terminal;
  terminal.b = spec.b;
  terminal.beta = 1.0 / chord.T1;
  terminal.q = chord.q_star + spec.a;
  terminal.N = 2;
  ChordFixedPointReport rep;
  rep.drift_fp = drift_fp(terminal, chord.p);
  rep.drift_glauber = drift_glauber(terminal, chord.p);
  for (const auto& s : suzuki_kubo_flow(terminal, chord.p, t_end))
    rep.flow_deviation = std::max(rep.flow_deviation, std::abs(s.m - chord.p));
  rep.drift_vanishes = std::abs(rep.drift_fp) < 1e-10 && std::abs(rep.drift_glauber) < 1e-10;
  rep.flow_stationary = rep.flow_deviation < 1e-8;
  rep.instant = chord.stable && rep.drift_vanishes && rep.flow_stationary;
  return rep;
}

ToyH quartic_toy() {
  ToyH h;
  h.h = [](double p) { return 0.5 * p * p + 0.25 * p * p * p * p; };
  h.dh = [](double p) { return p + p * p * p; };
  h.d2h = [](double p) { return 1.0 + 3.0 * p * p; };
  return h;
}

ToyH quadratic_toy() {
  ToyH h;
  h.h = [](double p) { return 0.5 * p * p; };
  h.dh = [](double p) { return p; };
  h.d2h = [](double) { return 1.0; };
  return h;
}

double toy_inverse_derivative(const ToyH& h, double q) {
  double lo = h.p_lo, hi = h.p_hi;
  const double qlo = h.dh(lo), qhi = h.dh(hi);
  if (!(q >= qlo && q <= qhi)) throw DomainError("toy_inverse_derivative: q outside the image of h'");
  if (q == qlo) return lo;
  if (q == qhi) return hi;
  double p = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double r = h.dh(p) - q;
    if (r == 0.0) return p;
    if (r < 0.0) lo = p;
    else hi = p;
    double next = p - r / h.d2h(p);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - p) <= 1e-15 * std::max(1.0, std::abs(p)) || hi - lo < 1e-15) return next;
    p = next;
  }
  return p;
}

double toy_conjugate(const ToyH& h, double q) {
  const double P = toy_inverse_derivative(h, q);
  return q * P - h.h(P);
}

ToyFields toy_fields(const ToyH& h, double p, double q) {
  return ToyFields{q - h.dh(p), -p + toy_inverse_derivative(h, q)};
}

ScalarProductReport toy_scalar_product_check(const ToyH& h, int np, int nq) {
  ScalarProductReport rep;
  rep.c = std::numeric_limits<double>::infinity();
  rep.min_product = std::numeric_limits<double>::infinity();
  rep.positive = true;
  const std::vector<double> ps = linspace(h.p_lo, h.p_hi, np);
  const std::vector<double> qs = linspace(h.dh(h.p_lo), h.dh(h.p_hi), nq);
  for (double q : qs) {
    const double P = toy_inverse_derivative(h, q);
    for (double p : ps) {
      const double gap = p - P;
      if (std::abs(gap) <= 1e-12) continue;
      const ToyFields f = toy_fields(h, p, q);
      const double prod = f.v * f.w;
      ++rep.samples;
      rep.min_product = std::min(rep.min_product, prod);
      if (!(prod > 0.0)) rep.positive = false;
      rep.c = std::min(rep.c, prod / (gap * gap));
    }
  }
  return rep;
}

const char* to_string(ToyFlow flow) { return flow == ToyFlow::gradient ? "grad" : "contact"; }

ToyTrajectory toy_flow(const ToyH& h, ToyFlow flow, double p0, double q, double z0, double t_end, double dt) {
  if (!(dt > 0.0)) throw ConfigError("toy_flow: dt must be > 0");
  const double P = toy_inverse_derivative(h, q);
  const double hstar = q * P - h.h(P);
  auto rhs = [&](double p, double z, double& dp, double& dz) {
    if (flow == ToyFlow::gradient) {
      dp = q - h.dh(p);
      dz = dp * dp;
    } else {
      dp = P - p;
      dz = -z + hstar;
    }
  };
  ToyTrajectory traj;
  traj.flow = flow;
  double p = p0, z = z0, t = 0.0;
  traj.samples.push_back({t, p, q, z});
  const long steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
  for (long k = 1; k <= steps; ++k) {
    const double step = std::min(dt, t_end - t);
    double a1, b1, a2, b2, a3, b3, a4, b4;
    rhs(p, z, a1, b1);
    rhs(p + 0.5 * step * a1, z + 0.5 * step * b1, a2, b2);
    rhs(p + 0.5 * step * a2, z + 0.5 * step * b2, a3, b3);
    rhs(p + step * a3, z + step * b3, a4, b4);
    p += step / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
    z += step / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
    t += step;
    traj.samples.push_back({t, p, q, z});
  }
  return traj;
}

HaslachReport haslach_admissibility(const ToyH& h, const ToyTrajectory& traj) {
  HaslachReport rep;
  rep.min_lambda = std::numeric_limits<double>::infinity();
  rep.admissible = true;
  for (const auto& s : traj.samples) {
    const ToyFields f = toy_fields(h, s.p, s.q);
    const double pdot = traj.flow == ToyFlow::gradient ? f.v : f.w;
    const double lambda = f.v * pdot;
    const double P = toy_inverse_derivative(h, s.q);
    if (std::abs(s.p - P) <= 1e-6) {
      rep.lambda_at_equilibrium = std::max(rep.lambda_at_equilibrium, std::abs(lambda));
      continue;
    }
    ++rep.checked;
    rep.min_lambda = std::min(rep.min_lambda, lambda);
    if (!(lambda > 1e-12)) rep.admissible = false;
  }
  if (rep.checked == 0) rep.admissible = false;
  return rep;
}

}  // namespace spinchain

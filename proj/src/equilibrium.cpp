#include "spinchain/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spinchain/errors.hpp"

namespace spinchain {

namespace {

constexpr int kScanCells = 10000;
constexpr double kBisectTol = 1e-13;
constexpr double kTieTol = 1e-12;

double mf_residual(double b, double beta, double q, double p) {
  return p - std::tanh(beta * (q + b * p));
}

double mf_residual_dp(double b, double beta, double q, double p) {
  const double t = std::tanh(beta * (q + b * p));
  return 1.0 - beta * b * (1.0 - t * t);
}

double polish(double b, double beta, double q, double lo, double hi) {
  double flo = mf_residual(b, beta, q, lo);
  while (hi - lo > kBisectTol) {
    const double mid = 0.5 * (lo + hi);
    const double fmid = mf_residual(b, beta, q, mid);
    if (fmid == 0.0) return mid;
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  double p = 0.5 * (lo + hi);
  for (int k = 0; k < 3; ++k) {
    const double d = mf_residual_dp(b, beta, q, p);
    if (d == 0.0) break;
    const double next = p - mf_residual(b, beta, q, p) / d;
    if (next <= -1.0 || next >= 1.0) break;
    p = next;
  }
  return p;
}

double point_segment_distance(const ThermoPoint& x, const ThermoPoint& a, const ThermoPoint& b) {
  const double dp = b.p - a.p, dq = b.q - a.q, dz = b.z - a.z;
  const double len2 = dp * dp + dq * dq + dz * dz;
  double t = 0.0;
  if (len2 > 0.0) {
    t = ((x.p - a.p) * dp + (x.q - a.q) * dq + (x.z - a.z) * dz) / len2;
    t = std::clamp(t, 0.0, 1.0);
  }
  const double ep = a.p + t * dp - x.p, eq = a.q + t * dq - x.q, ez = a.z + t * dz - x.z;
  return std::sqrt(ep * ep + eq * eq + ez * ez);
}

double point_polyline_distance(const ThermoPoint& x, const ThermoCurve& c) {
  if (c.size() == 1) return point_segment_distance(x, c.samples[0], c.samples[0]);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < c.size(); ++k)
    best = std::min(best, point_segment_distance(x, c.samples[k], c.samples[k + 1]));
  return best;
}

double directed_hausdorff(const ThermoCurve& a, const ThermoCurve& b, Exec exec) {
  const long n = static_cast<long>(a.size());
  double worst = 0.0;
  if (exec == Exec::parallel) {
#pragma omp parallel for reduction(max : worst) schedule(static) num_threads(thread_cap())
    for (long i = 0; i < n; ++i) worst = std::max(worst, point_polyline_distance(a.samples[i], b));
  } else {
    for (long i = 0; i < n; ++i) worst = std::max(worst, point_polyline_distance(a.samples[i], b));
  }
  return worst;
}

double stable_root(double b, double beta, double q) {
  const auto roots = mean_field_roots(b, beta, q);
  double best_p = roots.front().p;
  double best_f = std::numeric_limits<double>::infinity();
  for (const auto& r : roots) {
    const double f = reduced_free_energy(b, beta, q, r.p);
    if (f < best_f) {
      best_f = f;
      best_p = r.p;
    }
  }
  return best_p;
}

}  // namespace

std::string_view to_string(BranchKind kind) {
  switch (kind) {
    case BranchKind::stable: return "stable";
    case BranchKind::metastable: return "metastable";
    case BranchKind::unstable: return "unstable";
    case BranchKind::none: return "none";
  }
  return "none";
}

std::vector<BranchPoint> mean_field_roots(double b, double beta, double q) {
  if (!(b > 0.0) || !(beta > 0.0)) throw DomainError("mean_field_roots: b and beta must be > 0");
  std::vector<double> ps;
  const double h = 2.0 / kScanCells;
  double x0 = -1.0;
  double g0 = mf_residual(b, beta, q, x0);
  for (int k = 1; k <= kScanCells; ++k) {
    const double x1 = -1.0 + k * h;
    const double g1 = mf_residual(b, beta, q, x1);
    if (g1 == 0.0 && k < kScanCells) {
      ps.push_back(x1);
    } else if (g0 != 0.0 && (g0 < 0.0) != (g1 < 0.0)) {
      ps.push_back(polish(b, beta, q, x0, x1));
    }
    x0 = x1;
    g0 = g1;
  }
  std::sort(ps.begin(), ps.end());

  std::vector<BranchPoint> out;
  out.reserve(ps.size());
  double fmin = std::numeric_limits<double>::infinity();
  for (double p : ps) {
    BranchPoint r;
    r.p = p;
    r.q = q;
    r.z = -reduced_free_energy(b, beta, q, p);
    r.kind = reduced_free_energy_dm2(b, beta, p) > 0.0 ? BranchKind::stable : BranchKind::unstable;
    if (r.kind == BranchKind::stable) fmin = std::min(fmin, -r.z);
    out.push_back(r);
  }
  for (auto& r : out) {
    if (r.kind == BranchKind::stable && -r.z > fmin + kTieTol) r.kind = BranchKind::metastable;
  }
  return out;
}

ThermoPoint lambda_inf_point(double b, double beta, double p) {
  if (!(std::abs(p) < 1.0)) throw DomainError("lambda_inf_point: |p| must be < 1");
  ThermoPoint x;
  x.p = p;
  x.q = -b * p + std::atanh(p) / beta;
  x.z = std::log(4.0 / (1.0 - p * p)) / (2.0 * beta) - 0.5 * b * p * p;
  return x;
}

ThermoCurve lambda_inf_curve(double b, double beta, std::span<const double> p_grid, Exec exec) {
  ThermoCurve curve;
  curve.label = "lambda_inf";
  const long n = static_cast<long>(p_grid.size());
  curve.samples.resize(p_grid.size());
  curve.kinds.assign(p_grid.size(), BranchKind::none);
  auto body = [&](long i) {
    const ThermoPoint x = lambda_inf_point(b, beta, p_grid[i]);
    curve.samples[i] = x;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : mean_field_roots(b, beta, x.q)) {
      const double d = std::abs(r.p - x.p);
      if (d < best) {
        best = d;
        curve.kinds[i] = r.kind;
      }
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 16) num_threads(thread_cap())
    for (long i = 0; i < n; ++i) body(i);
  } else {
    for (long i = 0; i < n; ++i) body(i);
  }
  return curve;
}

double contact_residual(const ThermoCurve& curve) {
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < curve.size(); ++k) {
    const auto& a = curve.samples[k];
    const auto& c = curve.samples[k + 1];
    worst = std::max(worst, std::abs((c.z - a.z) - 0.5 * (a.p + c.p) * (c.q - a.q)));
  }
  return worst;
}

ThermoCurve finite_legendrian(const ModelParams& params, std::span<const double> q_grid,
                              HamiltonianMode mode, Exec exec) {
  params.validate();
  const StateSpace space(params.N);
  const std::vector<double> h0 = hamiltonian_vector(params.with_field(0.0), mode);
  const std::vector<double> m = space.points();
  const double N = params.N;

  ThermoCurve curve;
  curve.label = "finite_N";
  curve.samples.resize(q_grid.size());
  auto body = [&](long i) {
    const double q = q_grid[i];
    std::vector<double> expo(h0.size());
    for (std::size_t j = 0; j < h0.size(); ++j) expo[j] = -params.beta * (h0[j] - N * q * m[j]);
    const double lse = log_sum_exp(expo);
    double mean = 0.0;
    for (std::size_t j = 0; j < h0.size(); ++j) mean += m[j] * std::exp(expo[j] - lse);
    const double log_z = std::log(2.0 / N) + lse;
    curve.samples[i] = ThermoPoint{mean, q, log_z / (params.beta * N)};
  };
  const long n = static_cast<long>(q_grid.size());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static) num_threads(thread_cap())
    for (long i = 0; i < n; ++i) body(i);
  } else {
    for (long i = 0; i < n; ++i) body(i);
  }
  return curve;
}

double f_limit(double b, double beta, double q) {
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& r : mean_field_roots(b, beta, q)) best = std::max(best, r.z);
  return best;
}

double spontaneous_magnetization(double b, double beta) {
  if (b * beta <= 1.0) return 0.0;
  return std::abs(stable_root(b, beta, 0.0));
}

LimitSegment limit_segment(double b, double beta) {
  const double ps = spontaneous_magnetization(b, beta);
  return LimitSegment{-ps, ps, 0.0, f_limit(b, beta, 0.0)};
}

LimitSegment limit_segment_as_stated() { return LimitSegment{-1.0, 1.0, 0.0, 0.0}; }

ThermoCurve limit_curve(double b, double beta, double q_lo, double q_hi, int points) {
  if (!(q_lo < 0.0 && q_hi > 0.0)) throw DomainError("limit_curve: interval must contain 0 in its interior");
  if (points < 2) throw DomainError("limit_curve: need at least two points per side");
  ThermoCurve curve;
  curve.label = "limit";
  auto push_stable = [&](double q) {
    const double p = stable_root(b, beta, q);
    curve.samples.push_back(ThermoPoint{p, q, -reduced_free_energy(b, beta, q, p)});
    curve.kinds.push_back(BranchKind::stable);
  };
  for (int k = 0; k < points; ++k) {
    const double s = 1.0 - static_cast<double>(k) / points;
    push_stable(q_lo * s * s * s);
  }
  const LimitSegment seg = limit_segment(b, beta);
  if (seg.p_hi > 0.0) {
    for (int k = 0; k <= points; ++k) {
      const double p = seg.p_lo + (seg.p_hi - seg.p_lo) * k / points;
      curve.samples.push_back(ThermoPoint{p, 0.0, seg.z});
      curve.kinds.push_back(BranchKind::none);
    }
  } else {
    curve.samples.push_back(ThermoPoint{0.0, 0.0, seg.z});
    curve.kinds.push_back(BranchKind::stable);
  }
  for (int k = points - 1; k >= 0; --k) {
    const double s = 1.0 - static_cast<double>(k) / points;
    push_stable(q_hi * s * s * s);
  }
  return curve;
}

double hausdorff_distance(const ThermoCurve& a, const ThermoCurve& b, Exec exec) {
  if (a.empty() || b.empty()) throw DomainError("hausdorff_distance: empty curve");
  return std::max(directed_hausdorff(a, b, exec), directed_hausdorff(b, a, exec));
}

std::vector<double> cubic_q_grid(double q_max, int points) {
  std::vector<double> s = linspace(-1.0, 1.0, points);
  for (double& v : s) v = q_max * v * v * v;
  return s;
}

std::vector<double> linspace(double lo, double hi, int points) {
  if (points < 2) throw DomainError("linspace: need at least two points");
  std::vector<double> x(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) x[k] = lo + (hi - lo) * k / (points - 1);
  x.back() = hi;
  return x;
}

}  // namespace spinchain

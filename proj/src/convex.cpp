#include "spinchain/convex.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <limits>
#include <numeric>

#include "spinchain/equilibrium.hpp"
#include "spinchain/errors.hpp"

namespace spinchain {

namespace {

constexpr double kBoundaryBand = 1e-9;

std::vector<std::size_t> lower_hull(const GridFunction& f) {
  std::vector<std::size_t> hull;
  for (std::size_t k = 0; k < f.size(); ++k) {
    while (hull.size() >= 2) {
      const std::size_t o = hull[hull.size() - 2], a = hull.back();
      const double cross = (f.x[a] - f.x[o]) * (f.g[k] - f.g[o]) - (f.g[a] - f.g[o]) * (f.x[k] - f.x[o]);
      if (cross > 0.0) break;
      hull.pop_back();
    }
    hull.push_back(k);
  }
  return hull;
}

GridFunction negated(const GridFunction& f) {
  GridFunction out = f;
  for (double& v : out.g) v = -v;
  return out;
}

struct TiltState {
  double mean = 0.0;
  double var = 0.0;
};

TiltState tilt_moments(const std::vector<double>& H, const std::vector<double>& m, double beta, double lambda) {
  std::vector<double> expo(H.size());
  for (std::size_t i = 0; i < H.size(); ++i) expo[i] = -beta * H[i] + lambda * m[i];
  const double lse = log_sum_exp(expo);
  TiltState s;
  for (std::size_t i = 0; i < H.size(); ++i) s.mean += m[i] * std::exp(expo[i] - lse);
  for (std::size_t i = 0; i < H.size(); ++i) {
    const double d = m[i] - s.mean;
    s.var += d * d * std::exp(expo[i] - lse);
  }
  return s;
}

double solve_tilt(const std::vector<double>& H, const std::vector<double>& m, double beta, double p0) {
  auto mean = [&](double l) { return tilt_moments(H, m, beta, l).mean; };
  double lo = -1.0, hi = 1.0;
  for (int k = 0; k < 200 && mean(lo) > p0; ++k) lo *= 2.0;
  for (int k = 0; k < 200 && mean(hi) < p0; ++k) hi *= 2.0;
  double lambda = std::clamp(0.0, lo, hi);
  for (int it = 0; it < 100; ++it) {
    const TiltState s = tilt_moments(H, m, beta, lambda);
    const double r = s.mean - p0;
    if (std::abs(r) <= 1e-15) return lambda;
    if (r < 0.0) lo = lambda;
    else hi = lambda;
    double next = s.var > 0.0 ? lambda - r / s.var : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == lambda || hi - lo <= 4.0 * DBL_EPSILON * std::max(1.0, std::abs(lambda))) return next;
    lambda = next;
  }
  const double r = tilt_moments(H, m, beta, lambda).mean - p0;
  if (std::abs(r) > 1e-12) throw NumericalError("tilt: Newton did not converge in 100 iterations");
  return lambda;
}

}  // namespace

void GridFunction::validate() const {
  if (x.size() != g.size()) throw DomainError("GridFunction: abscissae and ordinates differ in length");
  if (x.size() < 3) throw DomainError("GridFunction: need at least three points");
  for (std::size_t k = 1; k < x.size(); ++k)
    if (!(x[k] > x[k - 1])) throw DomainError("GridFunction: abscissae must be strictly increasing");
}

double GridFunction::interpolate(double at) const {
  if (at <= x.front()) return g.front();
  if (at >= x.back()) return g.back();
  const auto it = std::upper_bound(x.begin(), x.end(), at);
  const std::size_t k = static_cast<std::size_t>(it - x.begin());
  const double t = (at - x[k - 1]) / (x[k] - x[k - 1]);
  return g[k - 1] + t * (g[k] - g[k - 1]);
}

GridFunction legendre_transform(const GridFunction& f, std::span<const double> slopes) {
  f.validate();
  const std::vector<std::size_t> hull = lower_hull(f);
  std::vector<double> edge(hull.size() - 1);
  for (std::size_t k = 0; k + 1 < hull.size(); ++k)
    edge[k] = (f.g[hull[k + 1]] - f.g[hull[k]]) / (f.x[hull[k + 1]] - f.x[hull[k]]);

  std::vector<std::size_t> order(slopes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return slopes[a] < slopes[b]; });

  GridFunction out;
  out.x.assign(slopes.begin(), slopes.end());
  out.g.resize(slopes.size());
  std::size_t v = 0;
  for (std::size_t idx : order) {
    const double s = slopes[idx];
    while (v < edge.size() && edge[v] < s) ++v;
    const std::size_t k = hull[v];
    out.g[idx] = s * f.x[k] - f.g[k];
  }
  return out;
}

std::vector<double> conjugate_breakpoints(const GridFunction& f) {
  f.validate();
  const std::vector<std::size_t> hull = lower_hull(f);
  std::vector<double> s;
  s.reserve(hull.size() + 1);
  for (std::size_t k = 0; k + 1 < hull.size(); ++k)
    s.push_back((f.g[hull[k + 1]] - f.g[hull[k]]) / (f.x[hull[k + 1]] - f.x[hull[k]]));
  const double first = s.front(), last = s.back();
  s.insert(s.begin(), first - 1.0);
  s.push_back(last + 1.0);
  return s;
}

GridFunction convex_envelope(const GridFunction& f) {
  const std::vector<double> slopes = conjugate_breakpoints(f);
  const GridFunction conj = legendre_transform(f, slopes);
  GridFunction env = legendre_transform(conj, f.x);
  for (std::size_t k = 0; k < env.size(); ++k) env.g[k] = std::min(env.g[k], f.g[k]);
  return env;
}

GridFunction concave_envelope(const GridFunction& f) {
  return negated(convex_envelope(negated(f)));
}

double EnvelopePair::lower_at(double p) const {
  return std::min(reduced_free_energy(b, beta, 0.0, p), lower.interpolate(p));
}

double EnvelopePair::upper_at(double p) const {
  return std::max(reduced_free_energy(b, beta, 0.0, p), upper.interpolate(p));
}

std::vector<double> envelope_grid(int points, double eps) {
  std::vector<double> grid = linspace(-1.0 + eps, 1.0 - eps, points);
  grid.insert(grid.begin(), -1.0);
  grid.push_back(1.0);
  return grid;
}

EnvelopePair envelopes(double b, double beta, std::span<const double> p_grid) {
  if (!(b > 0.0) || !(beta > 0.0)) throw DomainError("envelopes: b and beta must be > 0");
  EnvelopePair env;
  env.b = b;
  env.beta = beta;
  env.F.x.assign(p_grid.begin(), p_grid.end());
  if (env.F.x.empty() || env.F.x.front() > -1.0) env.F.x.insert(env.F.x.begin(), -1.0);
  if (env.F.x.back() < 1.0) env.F.x.push_back(1.0);
  env.F.g.resize(env.F.x.size());
  for (std::size_t k = 0; k < env.F.x.size(); ++k) {
    const double p = env.F.x[k];
    if (std::abs(p) > 1.0) throw DomainError("envelopes: grid leaves [-1, 1]");
    env.F.g[k] = std::abs(p) == 1.0 ? -0.5 * b : reduced_free_energy(b, beta, 0.0, p);
  }
  env.F.validate();
  env.lower = convex_envelope(env.F);
  env.upper = concave_envelope(env.F);
  return env;
}

EnvelopePair envelopes(double b, double beta) {
  const std::vector<double> grid = envelope_grid();
  return envelopes(b, beta, grid);
}

double tilt_field(const ModelParams& params, double p0) {
  params.validate();
  if (!(std::abs(p0) < 1.0)) throw DomainError("tilt_field: p0 must lie in (-1, 1)");
  const std::vector<double> H = hamiltonian_vector(params);
  const std::vector<double> m = StateSpace(params.N).points();
  const double lambda = solve_tilt(H, m, params.beta, p0);
  return params.q + lambda / (params.beta * params.N);
}

double finite_alpha_plus(const ModelParams& params, double p0) {
  params.validate();
  if (!(std::abs(p0) < 1.0)) throw DomainError("finite_alpha_plus: p0 must lie in (-1, 1)");
  const std::vector<double> H = hamiltonian_vector(params);
  const std::vector<double> m = StateSpace(params.N).points();
  const double lambda = solve_tilt(H, m, params.beta, p0);
  std::vector<double> expo(H.size());
  for (std::size_t i = 0; i < H.size(); ++i) expo[i] = -params.beta * H[i] + lambda * m[i];
  const double lse = log_sum_exp(expo);
  std::vector<double> rho(H.size());
  for (std::size_t i = 0; i < H.size(); ++i) rho[i] = std::max(0.5 * params.N * std::exp(expo[i] - lse), DBL_MIN);
  const Density dens = make_density_unchecked(std::move(rho));
  return p0 * params.q - psi_rescaled(params, dens, H);
}

double finite_alpha_minus_bound(const ModelParams& params, double p0, Exec exec) {
  params.validate();
  if (params.N > 2000) throw SizeError("finite_alpha_minus_bound: N must be <= 2000");
  const std::vector<double> H = hamiltonian_vector(params);
  const std::vector<double> m = StateSpace(params.N).points();
  if (!(p0 >= m.front() && p0 <= m.back())) throw DomainError("finite_alpha_minus_bound: no admissible pair for p0");
  const double N = params.N;
  const double half_n = 0.5 * N;
  const double beta = params.beta;

  auto psi_pair = [&](std::size_t i, std::size_t j, double w) {
    const double ri = half_n * (1.0 - w), rj = half_n * w;
    double xlx = 0.0;
    if (ri > 0.0) xlx += ri * std::log(ri);
    if (rj > 0.0) xlx += rj * std::log(rj);
    const double S = -(2.0 / N) * xlx;
    const double E = (1.0 - w) * H[i] + w * H[j];
    return -(-S / beta + E) / N;
  };

  const long n = static_cast<long>(m.size());
  double best = std::numeric_limits<double>::infinity();
  auto row = [&](long i) {
    double local = std::numeric_limits<double>::infinity();
    if (m[i] > p0) return local;
    if (m[i] == p0) local = psi_pair(i, i, 0.0);
    for (long j = i + 1; j < n; ++j) {
      if (m[j] <= p0) continue;
      const double w = (p0 - m[i]) / (m[j] - m[i]);
      local = std::min(local, psi_pair(i, j, w));
    }
    return local;
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for reduction(min : best) schedule(dynamic, 8) num_threads(thread_cap())
    for (long i = 0; i < n; ++i) best = std::min(best, row(i));
  } else {
    for (long i = 0; i < n; ++i) best = std::min(best, row(i));
  }
  return p0 * params.q - best;
}

const char* to_string(Membership mem) {
  switch (mem) {
    case Membership::inside: return "inside";
    case Membership::boundary: return "boundary";
    case Membership::outside: return "outside";
  }
  return "outside";
}

Membership basin_membership_inf(double b, double beta, const ThermoPoint& point, const EnvelopePair& env) {
  if (env.b != b || env.beta != beta) throw DomainError("basin_membership_inf: envelopes built for other parameters");
  if (!(std::abs(point.p) < 1.0)) return Membership::outside;
  const double y = point.p * point.q - point.z;
  const double lo = env.lower_at(point.p);
  const double hi = env.upper_at(point.p);
  if (std::abs(y - lo) <= kBoundaryBand || std::abs(y - hi) <= kBoundaryBand) return Membership::boundary;
  if (y > lo && y < hi) return Membership::inside;
  return Membership::outside;
}

MonotonicityFacts monotonicity_facts(double b, double beta_lo, double beta_hi, std::span<const double> grid,
                                     int steps) {
  MonotonicityFacts facts;
  const std::vector<double> betas = linspace(beta_lo, beta_hi, steps);
  double prev_p = -1.0;
  for (std::size_t k = 0; k < betas.size(); ++k) {
    const double beta = betas[k];
    const auto roots = mean_field_roots(b, beta, 0.0);
    double p_plus = 0.0, p_minus = 0.0;
    for (const auto& r : roots) {
      if (r.kind == BranchKind::unstable) continue;
      p_plus = std::max(p_plus, r.p);
      p_minus = std::min(p_minus, r.p);
    }
    if (k > 0 && !(p_plus > prev_p)) facts.p_plus_increasing = false;
    if (k > 0 && !(p_minus < -prev_p)) facts.p_minus_decreasing = false;
    prev_p = p_plus;
    facts.endpoint_value_error = std::max({facts.endpoint_value_error,
                                           std::abs(reduced_free_energy(b, beta, 0.0, 1.0) + 0.5 * b),
                                           std::abs(reduced_free_energy(b, beta, 0.0, -1.0) + 0.5 * b)});
    if (k > 0) {
      for (double p : grid) {
        if (!(std::abs(p) < 1.0)) continue;
        if (!(reduced_free_energy(b, beta, 0.0, p) > reduced_free_energy(b, betas[k - 1], 0.0, p)))
          facts.F_increasing_in_beta = false;
      }
    }
  }
  return facts;
}

BasinComparison compare_basins(double b, double beta0, double beta1, std::span<const double> grid) {
  if (!(b * beta0 > 1.0 && b * beta1 > 1.0)) throw DomainError("compare_basins: need b beta0 > 1 and b beta1 > 1");
  BasinComparison rep;
  rep.b = b;
  rep.beta0 = beta0;
  rep.beta1 = beta1;
  const EnvelopePair env = envelopes(b, beta1, grid);
  const double p_star0 = spontaneous_magnetization(b, beta0);
  rep.inclusion_margin = std::numeric_limits<double>::infinity();
  rep.disjoint_margin = std::numeric_limits<double>::infinity();
  for (double p : grid) {
    if (!(std::abs(p) < 1.0) || !(std::abs(p) > p_star0)) continue;
    const double F = reduced_free_energy(b, beta0, 0.0, p);
    const double lo = env.lower_at(p);
    const double hi = env.upper_at(p);
    rep.inclusion_margin = std::min(rep.inclusion_margin, std::min(F - lo, hi - F));
    rep.disjoint_margin = std::min(rep.disjoint_margin, std::max(lo - F, F - hi));
    ++rep.samples;
  }
  rep.inclusion = rep.samples > 0 && rep.inclusion_margin > 0.0;
  rep.disjoint = rep.samples > 0 && rep.disjoint_margin > 0.0;
  rep.facts = monotonicity_facts(b, std::min(beta0, beta1), std::max(beta0, beta1), grid);
  return rep;
}

}  // namespace spinchain

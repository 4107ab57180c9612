#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {

std::vector<double> dense_solve(Matrix A, std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
    if (A[piv][col] == 0.0) throw std::runtime_error("dense_solve: singular");
    std::swap(A[piv], A[col]);
    std::swap(rhs[piv], rhs[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = A[r][col] / A[col][col];
      if (f == 0.0) continue;
      for (std::size_t k = col; k < n; ++k) A[r][k] -= f * A[col][k];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= A[i][k] * x[k];
    x[i] = s / A[i][i];
  }
  return x;
}

Matrix kernel(const std::vector<double>& u) {
  const std::size_t n = u.size();
  Matrix K(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i + 1 < n; ++i) K[i][i + 1] = K[i + 1][i] = u[i + 1];
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) s += K[i][j];
    K[i][i] = 1.0 - s;
  }
  return K;
}

double glauber_u(double b, double beta, double q, double c, double m) {
  return c * (1.0 - m * std::tanh(beta * (q + b * m)));
}

std::vector<double> scaled_laplacian(const Matrix& K, const std::vector<double>& x) {
  const std::size_t n = x.size();
  const double N = static_cast<double>(n - 1);
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += (K[i][j] - (i == j ? 1.0 : 0.0)) * x[j];
    y[i] = N * N / 4.0 * s;
  }
  return y;
}

namespace {

double log_mean(double x, double y) {
  if (x == y) return x;
  return (x - y) / (std::log(x) - std::log(y));
}

}  // namespace

std::vector<double> potential(const Matrix& K, const std::vector<double>& rho, const std::vector<double>& v) {
  // L phi = v with L_ij = -(N/2)^2 K_ij l(rho_i, rho_j) off the diagonal and
  // zero row sums; bordered with the constraint sum phi = 0.
  const std::size_t n = rho.size();
  const double N = static_cast<double>(n - 1);
  Matrix A(n + 1, std::vector<double>(n + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j || K[i][j] == 0.0) continue;
      const double w = N * N / 4.0 * K[i][j] * log_mean(rho[i], rho[j]);
      A[i][j] -= w;
      A[i][i] += w;
    }
    A[i][n] = 1.0;
    A[n][i] = 1.0;
  }
  std::vector<double> rhs(v);
  double mean = 0.0;
  for (double x : rhs) mean += x;
  mean /= static_cast<double>(n);
  for (double& x : rhs) x -= mean;
  rhs.push_back(0.0);
  std::vector<double> sol = dense_solve(A, rhs);
  sol.pop_back();
  return sol;
}

double pairing(const std::vector<double>& a, const std::vector<double>& b) {
  const double N = static_cast<double>(a.size() - 1);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return 2.0 / N * s;
}

std::vector<double> gibbs(double b, double beta, double q, int N) {
  std::vector<double> logw(N + 1);
  double mx = -INFINITY;
  for (int k = 0; k <= N; ++k) {
    const double m = -1.0 + 2.0 * k / N;
    logw[k] = log_binomial(N, k) + beta * N * (q * m + 0.5 * b * m * m);
    mx = std::max(mx, logw[k]);
  }
  std::vector<double> w(N + 1);
  double s = 0.0;
  for (int k = 0; k <= N; ++k) s += (w[k] = std::exp(logw[k] - mx));
  for (double& x : w) x *= (N / 2.0) / s;
  return w;
}

std::vector<double> stationary(const std::vector<double>& up, const std::vector<double>& down) {
  // Generator columns sum to zero; replace the last balance row by sum = 1.
  const std::size_t n = up.size() + 1;
  Matrix G(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i + 1 < n; ++i) {
    G[i + 1][i] += up[i];
    G[i][i] -= up[i];
    G[i][i + 1] += down[i];
    G[i + 1][i + 1] -= down[i];
  }
  std::vector<double> rhs(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) G[n - 1][j] = 1.0;
  rhs[n - 1] = 1.0;
  return dense_solve(G, rhs);
}

double log_binomial(int N, int k) {
  return std::lgamma(N + 1.0) - std::lgamma(k + 1.0) - std::lgamma(N - k + 1.0);
}

double free_energy_limit(double b, double beta, double q) {
  auto g = [&](double m) {
    const double a = 0.5 * (1.0 + m), c = 0.5 * (1.0 - m);
    const double ent = (a > 0.0 ? a * std::log(a) : 0.0) + (c > 0.0 ? c * std::log(c) : 0.0);
    return q * m + 0.5 * b * m * m - ent / beta;
  };
  const int n = 20000;
  int best = 0;
  double bestv = -INFINITY;
  for (int k = 0; k <= n; ++k) {
    const double v = g(-1.0 + 2.0 * k / n);
    if (v > bestv) bestv = v, best = k;
  }
  double lo = -1.0 + 2.0 * std::max(best - 1, 0) / n, hi = -1.0 + 2.0 * std::min(best + 1, n) / n;
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = g(x1), f2 = g(x2);
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    if (f1 < f2) {
      lo = x1, x1 = x2, f1 = f2;
      x2 = lo + r * (hi - lo), f2 = g(x2);
    } else {
      hi = x2, x2 = x1, f2 = f1;
      x1 = hi - r * (hi - lo), f1 = g(x1);
    }
  }
  return std::max({bestv, f1, f2});
}

std::vector<double> convex_hull_values(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < x.size(); ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], b = hull.back();
      const double cross = (x[b] - x[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (x[i] - x[a]);
      if (cross <= 0.0) hull.pop_back();
      else break;
    }
    hull.push_back(i);
  }
  std::vector<double> out(x.size());
  std::size_t seg = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    while (seg + 2 < hull.size() && x[hull[seg + 1]] <= x[i]) ++seg;
    const std::size_t a = hull[seg], b = hull[std::min(seg + 1, hull.size() - 1)];
    if (a == b || x[b] == x[a]) out[i] = y[a];
    else out[i] = y[a] + (y[b] - y[a]) * (x[i] - x[a]) / (x[b] - x[a]);
  }
  return out;
}

ChordSolution chord_newton(double b, double T0, double T1, double a, double p0, double q0) {
  ChordSolution s{p0, q0, 0, false};
  for (int it = 1; it <= 100; ++it) {
    const double at = std::atanh(s.p);
    const double r1 = s.q + b * s.p - T0 * at;
    const double r2 = a + s.q + b * s.p - T1 * at;
    const double d = 1.0 / (1.0 - s.p * s.p);
    // Jacobian rows: (b - T0 d, 1), (b - T1 d, 1)
    const double j11 = b - T0 * d, j21 = b - T1 * d;
    const double det = j11 - j21;
    if (det == 0.0) break;
    const double dp = (r1 - r2) / det;
    const double dq = r1 - j11 * dp;
    double pn = s.p - dp;
    if (pn >= 1.0) pn = 0.5 * (s.p + 1.0);
    if (pn <= -1.0) pn = 0.5 * (s.p - 1.0);
    s.q -= dq;
    s.p = pn;
    s.iterations = it;
    if (std::abs(dp) < 1e-15 && std::abs(dq) < 1e-15) {
      s.converged = true;
      break;
    }
  }
  if (!s.converged) {
    const double at = std::atanh(s.p);
    s.converged = std::abs(s.q + b * s.p - T0 * at) < 1e-13 && std::abs(a + s.q + b * s.p - T1 * at) < 1e-13;
  }
  return s;
}

}  // namespace oracle

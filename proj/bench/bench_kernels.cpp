// Serial reference paths against the OpenMP kernels: wall time and agreement.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>

#include "spinchain/convex.hpp"
#include "spinchain/equilibrium.hpp"
#include "spinchain/glauber.hpp"
#include "spinchain/parallel.hpp"

using namespace spinchain;

namespace {

template <class F>
double best_of(int reps, F&& f) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void report(const char* name, double ts, double tp, bool same) {
  std::printf("%-22s serial %9.4f s  parallel %9.4f s  speedup %5.2f  %s\n", name, ts, tp, ts / tp,
              same ? "identical" : "MISMATCH");
}

bool same_curve(const ThermoCurve& a, const ThermoCurve& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.samples[i].p != b.samples[i].p || a.samples[i].q != b.samples[i].q || a.samples[i].z != b.samples[i].z)
      return false;
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_env();
  const int reps = argc > 1 ? std::max(1, std::atoi(argv[1])) : 3;
  std::printf("threads: %d, best of %d\n", thread_cap(), reps);

  ModelParams p;
  p.b = 1.2;
  p.beta = 1.2;
  p.N = 400;

  const std::vector<double> qs = cubic_q_grid(1.0, 4001);
  {
    ThermoCurve a, b;
    const double ts = best_of(reps, [&] { a = finite_legendrian(p, qs, HamiltonianMode::exact, Exec::serial); });
    const double tp = best_of(reps, [&] { b = finite_legendrian(p, qs, HamiltonianMode::exact, Exec::parallel); });
    report("finite_legendrian", ts, tp, same_curve(a, b));
  }
  {
    const std::vector<double> ps = linspace(-0.999, 0.999, 4001);
    ThermoCurve a, b;
    const double ts = best_of(reps, [&] { a = lambda_inf_curve(p.b, p.beta, ps, Exec::serial); });
    const double tp = best_of(reps, [&] { b = lambda_inf_curve(p.b, p.beta, ps, Exec::parallel); });
    report("lambda_inf_curve", ts, tp, same_curve(a, b) && a.kinds == b.kinds);
  }
  {
    const ThermoCurve fin = finite_legendrian(p, qs);
    const ThermoCurve lim = limit_curve(p.b, p.beta, -1.0, 1.0, 2001);
    double a = 0.0, b = 0.0;
    const double ts = best_of(reps, [&] { a = hausdorff_distance(fin, lim, Exec::serial); });
    const double tp = best_of(reps, [&] { b = hausdorff_distance(fin, lim, Exec::parallel); });
    report("hausdorff_distance", ts, tp, a == b);
  }
  {
    const ModelParams q = p.with_size(1600);
    double a = 0.0, b = 0.0;
    const double ts = best_of(reps, [&] { a = alpha_upper(q, 0.3, Exec::serial); });
    const double tp = best_of(reps, [&] { b = alpha_upper(q, 0.3, Exec::parallel); });
    report("alpha_upper pair scan", ts, tp, a == b);
  }
  {
    const ModelParams q = p.with_size(14).with_field(0.1);
    LumpReport a, b;
    const double ts = best_of(reps, [&] { a = full_chain_lump_check(q, FlipEnergy::two_over_n, Exec::serial); });
    const double tp = best_of(reps, [&] { b = full_chain_lump_check(q, FlipEnergy::two_over_n, Exec::parallel); });
    report("full_chain_lump_check", ts, tp, a.lumped_up == b.lumped_up && a.lumped_down == b.lumped_down);
  }
  return 0;
}

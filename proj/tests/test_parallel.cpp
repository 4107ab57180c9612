#include <doctest.h>

#include <omp.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "spinchain/convex.hpp"
#include "spinchain/equilibrium.hpp"
#include "spinchain/glauber.hpp"
#include "spinchain/io.hpp"
#include "spinchain/parallel.hpp"

using namespace spinchain;
namespace fs = std::filesystem;

namespace {

ModelParams params(double b, double beta, double q, int N) {
  ModelParams p;
  p.b = b;
  p.beta = beta;
  p.q = q;
  p.N = N;
  return p;
}

bool same(const ThermoCurve& a, const ThermoCurve& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a.samples[i].p != b.samples[i].p || a.samples[i].q != b.samples[i].q || a.samples[i].z != b.samples[i].z)
      return false;
  return true;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CapGuard {
  int saved = thread_cap();
  ~CapGuard() { set_thread_cap(saved); }
};

}  // namespace

TEST_CASE("thread cap") {
  CapGuard guard;
  CHECK(thread_cap() >= 1);
  set_thread_cap(3);
  CHECK(thread_cap() == 3);
  int seen = 0;
#pragma omp parallel num_threads(thread_cap())
  {
#pragma omp single
    seen = omp_get_num_threads();
  }
  CHECK(seen <= 3);
  set_thread_cap(0);
  CHECK(thread_cap() >= 1);
}

TEST_CASE("serial and parallel kernels agree bitwise") {
  CapGuard guard;
  const ModelParams p = params(1.2, 1.2, 0.0, 120);
  const std::vector<double> qs = cubic_q_grid(1.0, 301);
  const ThermoCurve ref = finite_legendrian(p, qs, HamiltonianMode::exact, Exec::serial);
  const ThermoCurve inf_ref = lambda_inf_curve(1.2, 1.2, linspace(-0.99, 0.99, 401), Exec::serial);
  const ThermoCurve lim = limit_curve(1.2, 1.2, -1.0, 1.0, 301);
  const double h_ref = hausdorff_distance(ref, lim, Exec::serial);
  const double a_ref = alpha_upper(p, 0.3, Exec::serial);
  const LumpReport l_ref = full_chain_lump_check(params(1.2, 1.2, 0.1, 10), FlipEnergy::two_over_n, Exec::serial);

  for (int threads : {1, 2, 4}) {
    set_thread_cap(threads);
    CHECK(same(finite_legendrian(p, qs, HamiltonianMode::exact, Exec::parallel), ref));
    const ThermoCurve inf = lambda_inf_curve(1.2, 1.2, linspace(-0.99, 0.99, 401), Exec::parallel);
    CHECK(same(inf, inf_ref));
    CHECK(inf.kinds == inf_ref.kinds);
    CHECK(hausdorff_distance(ref, lim, Exec::parallel) == h_ref);
    CHECK(alpha_upper(p, 0.3, Exec::parallel) == a_ref);
    const LumpReport l = full_chain_lump_check(params(1.2, 1.2, 0.1, 10), FlipEnergy::two_over_n, Exec::parallel);
    CHECK(l.lumped_up == l_ref.lumped_up);
    CHECK(l.lumped_down == l_ref.lumped_down);
    CHECK(l.max_discrepancy == l_ref.max_discrepancy);
  }
}

TEST_CASE("outputs do not depend on the thread count") {
  CapGuard guard;
  nlohmann::json j = nlohmann::json::parse(R"({
    "model": {"b": 1.2, "beta": 1.2, "q": 0.0, "N": 50},
    "grids": {"q": {"min": -1, "max": 1, "points": 101, "spacing": "cubic"},
              "p": {"min": -0.99, "max": 0.99, "points": 101},
              "N_ladder": [50, 100]},
    "basin": {"beta0": [1.3], "p0": [0.0]}
  })");
  const ExperimentConfig cfg = parse_config(j);
  const fs::path root = fs::temp_directory_path() / "spinchain_unit_threads";
  fs::remove_all(root);
  std::vector<std::vector<fs::path>> runs;
  for (int threads : {1, 4}) {
    set_thread_cap(threads);
    const fs::path d = root / std::to_string(threads);
    std::vector<fs::path> files = run_subcommand("equilibrium", cfg, d);
    const auto more = run_subcommand("basin", cfg, d);
    files.insert(files.end(), more.begin(), more.end());
    runs.push_back(files);
  }
  REQUIRE(runs[0].size() == runs[1].size());
  for (std::size_t k = 0; k < runs[0].size(); ++k) {
    CHECK(slurp(runs[0][k]) == slurp(runs[1][k]));
    CHECK(slurp(runs[0][k].string() + ".meta.json") == slurp(runs[1][k].string() + ".meta.json"));
  }
}

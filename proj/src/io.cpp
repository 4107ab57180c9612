#include "spinchain/io.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "spinchain/equilibrium.hpp"

namespace spinchain {

using nlohmann::json;

const std::map<std::string, std::string>& module_versions() {
  static const std::map<std::string, std::string> versions{
      {"spinchain", kVersion},
      {"core_model", "1.0"},
      {"equilibrium_legendrian", "1.0"},
      {"wasserstein_fp", "1.0"},
      {"glauber", "1.0"},
      {"drift_bridge", "1.0"},
      {"convex_geometry", "1.0"},
      {"chords_contact", "1.0"},
      {"cli_io", "1.0"},
  };
  return versions;
}

std::vector<double> GridSpec::build() const {
  if (!values.empty()) return values;
  if (spacing == "cubic") {
    if (std::abs(min + max) > 1e-15 * std::max(1.0, std::abs(max)))
      throw ConfigError("grid: cubic spacing needs a symmetric range");
    return cubic_q_grid(max, points);
  }
  return linspace(min, max, points);
}

namespace {

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!ok.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <class T>
void read(const json& obj, const char* key, T& target, const std::string& where) {
  if (!obj.contains(key)) return;
  try {
    target = obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

GridSpec read_grid(const json& j, GridSpec grid, const std::string& where) {
  if (j.is_array()) {
    grid.values = j.get<std::vector<double>>();
    return grid;
  }
  check_keys(j, where, {"min", "max", "points", "spacing", "values"});
  read(j, "min", grid.min, where);
  read(j, "max", grid.max, where);
  read(j, "points", grid.points, where);
  read(j, "spacing", grid.spacing, where);
  read(j, "values", grid.values, where);
  return grid;
}

void check_grid(const GridSpec& g, const std::string& where) {
  if (!g.values.empty()) {
    for (std::size_t i = 0; i < g.values.size(); ++i) {
      if (!std::isfinite(g.values[i])) throw ConfigError(where + ": non-finite value");
      if (i > 0 && !(g.values[i] > g.values[i - 1])) throw ConfigError(where + ": values must be strictly increasing");
    }
    return;
  }
  if (g.spacing != "linear" && g.spacing != "cubic") throw ConfigError(where + ": spacing must be linear or cubic");
  if (g.points < 2) throw ConfigError(where + ": points must be >= 2");
  if (!(std::isfinite(g.min) && std::isfinite(g.max) && g.max > g.min))
    throw ConfigError(where + ": need finite min < max");
}

void check_ladder(const std::vector<int>& ladder, const std::string& where) {
  if (ladder.empty()) throw ConfigError(where + ": empty");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] < 1) throw ConfigError(where + ": entries must be >= 1");
    if (i > 0 && !(ladder[i] > ladder[i - 1])) throw ConfigError(where + ": must be strictly increasing");
  }
}

void check_positive(double v, const std::string& name) {
  if (!(v > 0.0 && std::isfinite(v))) throw ConfigError(name + " must be positive and finite");
}

}  // namespace

void ExperimentConfig::validate() const {
  params.validate();
  check_grid(q_grid, "grids.q");
  check_grid(p_grid, "grids.p");
  q_grid.build();
  for (double p : p_grid.build())
    if (!(p > -1.0 && p < 1.0)) throw ConfigError("grids.p: values must lie in (-1, 1)");
  check_ladder(N_ladder, "grids.N_ladder");
  check_ladder(drift_ladder, "drift.ladder");
  check_positive(t_end, "integrator.t_end");
  check_positive(kappa, "integrator.kappa");
  if (kappa > 1.0) throw ConfigError("integrator.kappa must be <= 1");
  check_positive(grad_tol, "integrator.grad_tol");
  check_positive(psi_tol, "integrator.psi_tol");
  check_positive(residual_tol, "integrator.residual_tol");
  if (record_interval < 0.0 || !std::isfinite(record_interval))
    throw ConfigError("integrator.record_interval must be >= 0");
  if (!std::isfinite(fp_initial_field)) throw ConfigError("fp.initial_field must be finite");
  if (!(glauber_initial_m >= -1.0 && glauber_initial_m <= 1.0))
    throw ConfigError("glauber.initial_m must lie in [-1, 1]");
  if (lump_N_max < 2 || lump_N_max > 14) throw ConfigError("glauber.lump_N_max must lie in [2, 14]");
  check_positive(drift_window, "drift.window");
  if (drift_window >= 1.0) throw ConfigError("drift.window must be < 1");
  for (double b0 : basin_beta0) check_positive(b0, "basin.beta0");
  for (double p0 : basin_p0)
    if (!(p0 > -1.0 && p0 < 1.0)) throw ConfigError("basin.p0 values must lie in (-1, 1)");
  check_positive(quench_beta0, "quench.beta0");
  check_positive(quench_beta1, "quench.beta1");
  if (!std::isfinite(quench_a)) throw ConfigError("quench.a must be finite");
  if (!(toy_p0 >= -1.0 && toy_p0 <= 1.0)) throw ConfigError("toy.p0 must lie in [-1, 1]");
  if (!(toy_q >= -2.0 && toy_q <= 2.0)) throw ConfigError("toy.q must lie in [-2, 2]");
  check_positive(toy_t_end, "toy.t_end");
  check_positive(toy_dt, "toy.dt");
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig cfg;
  check_keys(j, "config",
             {"experiment", "model", "hamiltonian", "grids", "integrator", "fp", "glauber", "drift", "basin", "quench",
              "toy", "seed"});
  read(j, "experiment", cfg.experiment, "config");
  if (j.contains("model")) {
    const json& m = j["model"];
    check_keys(m, "model", {"b", "beta", "q", "N", "c"});
    read(m, "b", cfg.params.b, "model");
    read(m, "beta", cfg.params.beta, "model");
    read(m, "q", cfg.params.q, "model");
    read(m, "N", cfg.params.N, "model");
    read(m, "c", cfg.params.c, "model");
  }
  if (j.contains("hamiltonian")) {
    std::string mode;
    read(j, "hamiltonian", mode, "config");
    if (mode == "exact") cfg.mode = HamiltonianMode::exact;
    else if (mode == "asymptotic") cfg.mode = HamiltonianMode::asymptotic;
    else throw ConfigError("hamiltonian must be exact or asymptotic");
  }
  if (j.contains("grids")) {
    const json& g = j["grids"];
    check_keys(g, "grids", {"q", "p", "N_ladder"});
    if (g.contains("q")) cfg.q_grid = read_grid(g["q"], cfg.q_grid, "grids.q");
    if (g.contains("p")) cfg.p_grid = read_grid(g["p"], cfg.p_grid, "grids.p");
    read(g, "N_ladder", cfg.N_ladder, "grids");
  }
  if (j.contains("integrator")) {
    const json& i = j["integrator"];
    check_keys(i, "integrator", {"t_end", "kappa", "grad_tol", "psi_tol", "residual_tol", "record_interval"});
    read(i, "t_end", cfg.t_end, "integrator");
    read(i, "kappa", cfg.kappa, "integrator");
    read(i, "grad_tol", cfg.grad_tol, "integrator");
    read(i, "psi_tol", cfg.psi_tol, "integrator");
    read(i, "residual_tol", cfg.residual_tol, "integrator");
    read(i, "record_interval", cfg.record_interval, "integrator");
  }
  if (j.contains("fp")) {
    check_keys(j["fp"], "fp", {"initial_field"});
    read(j["fp"], "initial_field", cfg.fp_initial_field, "fp");
  }
  if (j.contains("glauber")) {
    check_keys(j["glauber"], "glauber", {"initial_m", "lump_N_max"});
    read(j["glauber"], "initial_m", cfg.glauber_initial_m, "glauber");
    read(j["glauber"], "lump_N_max", cfg.lump_N_max, "glauber");
  }
  if (j.contains("drift")) {
    check_keys(j["drift"], "drift", {"window", "ladder"});
    read(j["drift"], "window", cfg.drift_window, "drift");
    read(j["drift"], "ladder", cfg.drift_ladder, "drift");
  }
  if (j.contains("basin")) {
    check_keys(j["basin"], "basin", {"beta0", "p0"});
    read(j["basin"], "beta0", cfg.basin_beta0, "basin");
    read(j["basin"], "p0", cfg.basin_p0, "basin");
  }
  if (j.contains("quench")) {
    const json& q = j["quench"];
    check_keys(q, "quench", {"beta0", "beta1", "a", "literal_b_absent"});
    read(q, "beta0", cfg.quench_beta0, "quench");
    read(q, "beta1", cfg.quench_beta1, "quench");
    read(q, "a", cfg.quench_a, "quench");
    read(q, "literal_b_absent", cfg.quench_literal_b_absent, "quench");
  }
  if (j.contains("toy")) {
    const json& t = j["toy"];
    check_keys(t, "toy", {"p0", "q", "t_end", "dt"});
    read(t, "p0", cfg.toy_p0, "toy");
    read(t, "q", cfg.toy_q, "toy");
    read(t, "t_end", cfg.toy_t_end, "toy");
    read(t, "dt", cfg.toy_dt, "toy");
  }
  if (j.contains("seed") && !j["seed"].is_null()) {
    std::uint64_t seed = 0;
    read(j, "seed", seed, "config");
    cfg.seed = seed;
  }
  cfg.validate();
  cfg.raw = j;
  cfg.canonical = j.dump();
  cfg.hash = fnv1a64(cfg.canonical);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config parse error: " + std::string(e.what()));
  }
  return parse_config(j);
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw ConfigError("cannot open output file '" + path.string() + "'");
  row(header);
}

void CsvWriter::row(const std::vector<double>& values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out_ << ',';
    out_ << format_double(values[i]);
  }
  out_ << '\n';
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
}

json tolerance_settings(const ExperimentConfig& cfg) {
  return json{{"grad_tol", cfg.grad_tol},   {"psi_tol", cfg.psi_tol},     {"residual_tol", cfg.residual_tol},
              {"kappa", cfg.kappa},         {"dt_min", 1e-12},            {"glauber_negative_tol", 1e-12},
              {"root_tol", 1e-12},          {"density_mass_rtol", 1e-12}, {"membership_band", 1e-9},
              {"chord_drift_tol", 1e-10},   {"chord_flow_tol", 1e-8}};
}

void write_sidecar(const std::filesystem::path& file, const ExperimentConfig& cfg, const std::string& subcommand,
                   const json& extra) {
  json meta{{"file", file.filename().string()},
            {"subcommand", subcommand},
            {"experiment", cfg.experiment},
            {"config_hash", "fnv1a64:" + hex64(cfg.hash)},
            {"config", cfg.raw},
            {"versions", module_versions()},
            {"tolerances", tolerance_settings(cfg)},
            {"float_format", "%.17g"}};
  for (const auto& [k, v] : extra.items()) meta[k] = v;
  std::filesystem::path side = file;
  side += ".meta.json";
  std::ofstream out(side, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot open output file '" + side.string() + "'");
  out << meta.dump(2) << '\n';
}

void write_json(const std::filesystem::path& file, const json& doc, const ExperimentConfig& cfg,
                const std::string& subcommand) {
  {
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open output file '" + file.string() + "'");
    out << doc.dump(2) << '\n';
  }
  write_sidecar(file, cfg, subcommand);
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::domain: return static_cast<int>(ExitCode::domain);
    case ErrorCode::configuration: return static_cast<int>(ExitCode::usage);
    case ErrorCode::numerical: return static_cast<int>(ExitCode::numerical);
    case ErrorCode::stiffness: return static_cast<int>(ExitCode::stiffness);
    case ErrorCode::size: return static_cast<int>(ExitCode::size);
    case ErrorCode::internal: return static_cast<int>(ExitCode::internal);
  }
  return static_cast<int>(ExitCode::internal);
}

std::string error_json(const std::string& code, const std::string& message, int exit_code) {
  return json{{"error", code}, {"message", message}, {"exit_code", exit_code}}.dump();
}

}  // namespace spinchain

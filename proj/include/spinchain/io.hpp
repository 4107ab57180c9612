#pragma once

// Experiment configuration, deterministic CSV/JSON output with sidecars, and
// the subcommand runners behind the command-line tool.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spinchain/core_model.hpp"
#include "spinchain/errors.hpp"

namespace spinchain {

inline constexpr const char* kVersion = "0.1.0";

/// Module name -> version string, written into every sidecar.
const std::map<std::string, std::string>& module_versions();

struct GridSpec {
  double min = -1.0;
  double max = 1.0;
  int points = 101;
  std::string spacing = "linear";  // linear | cubic
  std::vector<double> values;      // explicit list, overrides the range

  std::vector<double> build() const;
};

struct ExperimentConfig {
  std::string experiment = "default";
  ModelParams params;
  HamiltonianMode mode = HamiltonianMode::exact;
  GridSpec q_grid{-1.0, 1.0, 4001, "cubic", {}};
  GridSpec p_grid{-0.999, 0.999, 2001, "linear", {}};
  std::vector<int> N_ladder{50, 100, 200, 400};

  // integrator
  double t_end = 1000.0;
  double kappa = 0.5;
  double grad_tol = 1e-8;
  double psi_tol = 1e-12;
  double residual_tol = 1e-11;
  double record_interval = 0.0;

  double fp_initial_field = 0.4;
  double glauber_initial_m = 1.0;
  int lump_N_max = 10;
  double drift_window = 0.8;
  std::vector<int> drift_ladder{100, 200, 400, 800, 1600};
  std::vector<double> basin_beta0{1.3, 1.1};
  std::vector<double> basin_p0{-0.5, 0.0, 0.5};

  double quench_beta0 = 1.3;
  double quench_beta1 = 1.2;
  double quench_a = 0.5;
  bool quench_literal_b_absent = false;

  double toy_p0 = -0.9;
  double toy_q = 0.5;
  double toy_t_end = 40.0;
  double toy_dt = 1e-3;

  std::optional<std::uint64_t> seed;

  nlohmann::json raw;
  std::string canonical;
  std::uint64_t hash = 0;

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

/// printf("%.17g").
std::string format_double(double v);

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  /// Numbers and text mixed; text is written verbatim.
  void row(const std::vector<std::string>& cells);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

/// Tolerances recorded in sidecars.
nlohmann::json tolerance_settings(const ExperimentConfig& cfg);

/// Writes <file>.meta.json next to `file`.
void write_sidecar(const std::filesystem::path& file, const ExperimentConfig& cfg, const std::string& subcommand,
                   const nlohmann::json& extra = nlohmann::json::object());

/// Writes a JSON document plus its sidecar.
void write_json(const std::filesystem::path& file, const nlohmann::json& doc, const ExperimentConfig& cfg,
                const std::string& subcommand);

/// Exit codes of the command-line tool.
enum class ExitCode : int {
  ok = 0,
  acceptance_failure = 1,
  usage = 2,
  domain = 3,
  numerical = 4,
  stiffness = 5,
  size = 6,
  internal = 7,
};

int exit_code_for(ErrorCode code);

/// JSON error record {"error": ..., "message": ..., "exit_code": ...}.
std::string error_json(const std::string& code, const std::string& message, int exit_code);

/// Runs one of equilibrium, fp, glauber, drift, basin, chord, toy. Returns the
/// files written.
std::vector<std::filesystem::path> run_subcommand(const std::string& name, const ExperimentConfig& cfg,
                                                  const std::filesystem::path& out_dir);

const std::vector<std::string>& subcommand_names();

}  // namespace spinchain

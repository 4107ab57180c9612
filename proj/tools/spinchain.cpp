#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>

#include "../tests/acceptance/acceptance.hpp"
#include "spinchain/errors.hpp"
#include "spinchain/io.hpp"
#include "spinchain/parallel.hpp"

namespace fs = std::filesystem;
using namespace spinchain;

namespace {

int fail(const std::string& code, const std::string& message, int exit_code) {
  std::cerr << error_json(code, message, exit_code) << std::endl;
  return exit_code;
}

int run_all(const ExperimentConfig& cfg, const fs::path& out) {
  fs::create_directories(out);
  const auto results = acceptance::run(std::cout);
  const fs::path csv = out / "acceptance.csv";
  {
    CsvWriter w(csv, {"id", "name", "pass", "seconds", "detail"});
    for (const auto& r : results) {
      std::string detail = r.detail;
      for (char& c : detail)
        if (c == '"') c = '\'';
      w.row(std::vector<std::string>{std::to_string(r.id), r.name, r.pass ? "1" : "0", format_double(r.seconds),
                                     "\"" + detail + "\""});
    }
  }
  write_sidecar(csv, cfg, "all");
  int passed = 0;
  for (const auto& r : results) passed += r.pass;
  std::cout << "acceptance: " << passed << "/" << results.size() << " passed" << std::endl;
  return passed == static_cast<int>(results.size()) ? 0 : static_cast<int>(ExitCode::acceptance_failure);
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_env();

  CLI::App app{"Curie-Weiss contact-geometry experiments"};
  app.set_version_flag("--version", std::string(kVersion));
  std::string subcommand, subcommand_flag, config_path, out_dir;
  std::ostringstream names;
  for (const auto& n : subcommand_names()) names << n << ' ';
  app.add_option("command", subcommand, "one of: " + names.str());
  app.add_option("--subcommand", subcommand_flag, "alternative to the positional subcommand");
  app.add_option("--config", config_path, "experiment configuration (JSON)")->required();
  app.add_option("--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage_error", e.what(), static_cast<int>(ExitCode::usage));
  }

  if (subcommand.empty()) subcommand = subcommand_flag;
  else if (!subcommand_flag.empty() && subcommand_flag != subcommand)
    return fail("usage_error", "conflicting subcommands '" + subcommand + "' and '" + subcommand_flag + "'",
                static_cast<int>(ExitCode::usage));
  const auto& known = subcommand_names();
  if (std::find(known.begin(), known.end(), subcommand) == known.end())
    return fail("usage_error", "unknown subcommand '" + subcommand + "'", static_cast<int>(ExitCode::usage));

  try {
    const ExperimentConfig cfg = load_config(config_path);
    if (subcommand == "all") return run_all(cfg, out_dir);
    for (const auto& f : run_subcommand(subcommand, cfg, out_dir)) std::cout << f.string() << '\n';
    return 0;
  } catch (const Error& e) {
    return fail(std::string(to_string(e.code())), e.what(), exit_code_for(e.code()));
  } catch (const std::exception& e) {
    return fail("internal_error", e.what(), static_cast<int>(ExitCode::internal));
  }
}

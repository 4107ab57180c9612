#pragma once

#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace spinchain::acceptance {

struct Result {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

Result maas_identities();
Result riesz_gradient();
Result fp_relaxation();
Result glauber_lumping();
Result drift_correspondence();
Result thermodynamic_limit();
Result envelopes_and_basins();
Result reeb_chords();
Result toy_contact_model();
Result stirling_consistency();

struct Criterion {
  int id;
  const char* name;
  std::function<Result()> run;
};

const std::vector<Criterion>& criteria();

/// "PASS  3 fp_relaxation (2.41 s) : detail"
std::string format_line(const Result& r);

/// Runs the selected criteria (all when `only` is empty), printing one line
/// per criterion to `out` as it finishes.
std::vector<Result> run(std::ostream& out, const std::vector<int>& only = {});

}  // namespace spinchain::acceptance

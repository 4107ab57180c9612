#include <cstdlib>
#include <iostream>
#include <string>

#include "acceptance.hpp"
#include "spinchain/parallel.hpp"

int main(int argc, char** argv) {
  spinchain::apply_thread_env();
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  const auto results = spinchain::acceptance::run(std::cout, only);
  int passed = 0;
  for (const auto& r : results) passed += r.pass;
  std::cout << "acceptance: " << passed << "/" << results.size() << " passed" << std::endl;
  return passed == static_cast<int>(results.size()) ? 0 : 1;
}

#include <cstdio>

#include "cliqueopt/checks/acceptance.hpp"

int main() {
  std::size_t failed = 0;
  cliqueopt::checks::run_acceptance([&](const cliqueopt::checks::CriterionResult& r) {
    std::printf("%s\n", cliqueopt::checks::format_result(r).c_str());
    std::fflush(stdout);
    failed += r.passed ? 0 : 1;
  });
  std::printf("%zu of 8 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}

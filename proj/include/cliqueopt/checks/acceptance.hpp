#pragma once

#include <functional>
#include <string>
#include <vector>

namespace cliqueopt::checks {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool passed = false;
  /// Counts, worst slacks and any per-part verdicts.
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

CriterionResult check_operator_properties();         // 1
CriterionResult check_cpgd_rate_bound();             // 2
CriterionResult check_acpgd_rate_bound();            // 3
CriterionResult check_hk_diagnostics();              // 4
CriterionResult check_complete_graph_equivalence();  // 5
CriterionResult check_distributed_equivalence();     // 6
CriterionResult check_allocation_experiment();       // 7
CriterionResult check_oracles();                     // 8

/// Runs all criteria in order, calling `on_result` as each finishes.
std::vector<CriterionResult> run_acceptance(const std::function<void(const CriterionResult&)>& on_result = {});

/// "PASS  3  ACPGD rate bound ... (1.2 s)"
std::string format_result(const CriterionResult& r);

}  // namespace cliqueopt::checks

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace mvpp {

struct SubCheck {
  std::string test_name;
  double statistic = 0.0;
  double threshold = 0.0;
  // "<=", ">=", ">" or "==".
  std::string comparator = "<=";
  bool pass = false;
};

struct Diagnostic {
  std::string name;
  double value = 0.0;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  std::vector<SubCheck> checks;
  std::vector<Diagnostic> diagnostics;
  // Quantile pairs (sample, reference) for visual inspection.
  std::vector<std::pair<double, double>> qq;
  bool pass() const;
};

struct VerifyOptions {
  std::uint64_t seed = 20240917;
  // Shifts the depth and profile centrings by +1; the trees suite must then fail.
  bool inject_fault = false;
};

struct VerifyReport {
  std::string suite;
  std::uint64_t seed = 0;
  bool fault_injected = false;
  std::vector<CriterionResult> criteria;
  bool pass() const;
};

// Criteria 1..11; criterion 12 compares two full reports and lives with the callers.
CriterionResult run_criterion(int id, const VerifyOptions& opt);
std::vector<int> suite_criteria(const std::string& suite);
std::vector<std::string> suite_names();
VerifyReport run_verify_suite(const std::string& suite, const VerifyOptions& opt);

std::string report_json(const VerifyReport& r);
// One line per check.
std::string report_text(const VerifyReport& r);

}  // namespace mvpp

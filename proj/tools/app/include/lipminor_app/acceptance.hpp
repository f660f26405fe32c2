#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace lipminor::app {

enum class Profile { kQuick, kFull };

[[nodiscard]] const char* to_string(Profile p);
// Throws InputError for anything but "quick" or "full".
[[nodiscard]] Profile parse_profile(const std::string& name);

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string summary;  // one line
  nlohmann::json detail = nlohmann::json::object();
  double seconds = 0.0;
};

struct SuiteOptions {
  Profile profile = Profile::kFull;
  std::uint64_t seed = 20240601;
  // Empty runs criteria 1..14.
  std::vector<int> only;
  // Perturbs the reference constant of criterion 4, to show that the suite
  // notices a wrong oracle.
  bool tamper = false;
  unsigned threads = 0;
  // Called after each criterion finishes.
  std::function<void(const CriterionResult&)> on_result;
};

inline constexpr int kCriterionCount = 14;

[[nodiscard]] std::vector<CriterionResult> run_acceptance(const SuiteOptions& options);

// "[PASS] 3 T sign: ..." style line.
[[nodiscard]] std::string format_result_line(const CriterionResult& r);

[[nodiscard]] nlohmann::json suite_summary(const SuiteOptions& options,
                                           const std::vector<CriterionResult>& results);

}  // namespace lipminor::app

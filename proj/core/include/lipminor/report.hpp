#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lipminor/experiments.hpp"

namespace lipminor::report {

// {"run_config": ..., "version": ...}; embedded in every output file.
[[nodiscard]] nlohmann::json provenance(const nlohmann::json& run_config);

// Compact provenance JSON for a leading '#' line of a CSV file.
[[nodiscard]] std::string provenance_comment(const nlohmann::json& run_config);

void write_table_csv(std::ostream& out, const experiments::Table& table,
                     const nlohmann::json& run_config);

// Pretty-printed JSON followed by a newline. Throws InputError when the file
// cannot be written.
void write_json_file(const std::filesystem::path& file, const nlohmann::json& j);

// Writes report.json, raw.csv, one <series>.csv per plot series and
// timing.json (the only file that varies between identical runs) into dir,
// creating it if needed. Returns the files written.
std::vector<std::filesystem::path> write_experiment(const std::filesystem::path& dir,
                                                    const experiments::ExperimentReport& report,
                                                    const nlohmann::json& run_config);

}  // namespace lipminor::report

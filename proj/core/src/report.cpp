#include "lipminor/report.hpp"

#include <fstream>
#include <ostream>

#include "lipminor/error.hpp"
#include "lipminor/path_csv.hpp"

namespace lipminor::report {

using nlohmann::json;

json provenance(const json& run_config) {
  return {{"run_config", run_config}, {"version", LIPMINOR_VERSION}};
}

std::string provenance_comment(const json& run_config) { return provenance(run_config).dump(); }

void write_table_csv(std::ostream& out, const experiments::Table& table, const json& run_config) {
  out << "# " << provenance_comment(run_config) << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    out << (c ? "," : "") << table.columns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << format_double(row[c]);
    out << '\n';
  }
}

void write_json_file(const std::filesystem::path& file, const json& j) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw InputError("cannot write '" + file.string() + "'");
  out << j.dump(2) << '\n';
  if (!out) throw InputError("error while writing '" + file.string() + "'");
}

namespace {

void write_csv_file(const std::filesystem::path& file, const experiments::Table& table,
                    const json& run_config) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw InputError("cannot write '" + file.string() + "'");
  write_table_csv(out, table, run_config);
  if (!out) throw InputError("error while writing '" + file.string() + "'");
}

}  // namespace

std::vector<std::filesystem::path> write_experiment(const std::filesystem::path& dir,
                                                    const experiments::ExperimentReport& report,
                                                    const json& run_config) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw InputError("cannot create output directory '" + dir.string() + "'");

  std::vector<std::filesystem::path> files;
  json summary = report.to_json();
  summary["provenance"] = provenance(run_config);
  files.push_back(dir / "report.json");
  write_json_file(files.back(), summary);

  files.push_back(dir / "raw.csv");
  write_csv_file(files.back(), report.raw, run_config);
  for (const auto& [name, table] : report.series) {
    files.push_back(dir / (name + ".csv"));
    write_csv_file(files.back(), table, run_config);
  }

  files.push_back(dir / "timing.json");
  write_json_file(files.back(), {{"name", report.name}, {"runtime_seconds", report.runtime_seconds}});
  return files;
}

}  // namespace lipminor::report

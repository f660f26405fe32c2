#include "lipminor/path_csv.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <vector>

#include "lipminor/error.hpp"

namespace lipminor {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

double parse_number(std::string_view field, std::size_t line, const char* column) {
  field = trim(field);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), x);
  if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
    throw InputError("path csv line " + std::to_string(line) + ": cannot parse " + column +
                     " from '" + std::string(field) + "'");
  }
  return x;
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), ptr);
}

CadlagPath read_path_csv(std::istream& in) {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<JumpMark> jumps;
  std::string raw;
  std::size_t line = 0;
  bool have_header = false;
  while (std::getline(in, raw)) {
    ++line;
    const std::string_view row = trim(raw);
    if (row.empty() || row.front() == '#') continue;
    if (!have_header) {
      if (row != "t,value,left_value") {
        throw InputError("path csv line " + std::to_string(line) +
                         ": expected header 't,value,left_value'");
      }
      have_header = true;
      continue;
    }
    const auto c1 = row.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : row.find(',', c1 + 1);
    if (c2 == std::string_view::npos || row.find(',', c2 + 1) != std::string_view::npos) {
      throw InputError("path csv line " + std::to_string(line) + ": expected 3 fields");
    }
    const double t = parse_number(row.substr(0, c1), line, "t");
    const double v = parse_number(row.substr(c1 + 1, c2 - c1 - 1), line, "value");
    if (!times.empty() && !(t > times.back())) {
      throw InputError("path csv line " + std::to_string(line) + ": t not strictly increasing");
    }
    const std::string_view left = trim(row.substr(c2 + 1));
    if (!left.empty()) {
      const double lv = parse_number(left, line, "left_value");
      if (lv == v) {
        throw InputError("path csv line " + std::to_string(line) +
                         ": left_value equals value (not a jump)");
      }
      jumps.push_back({times.size(), lv});
    }
    times.push_back(t);
    values.push_back(v);
  }
  if (!have_header) throw InputError("path csv: missing header");
  return CadlagPath(std::move(times), std::move(values), std::move(jumps));
}

CadlagPath read_path_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InputError("cannot open path csv '" + file.string() + "'");
  return read_path_csv(in);
}

void write_path_csv(std::ostream& out, const CadlagPath& path, std::string_view comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "t,value,left_value\n";
  const auto jumps = path.jumps();
  std::size_t jp = 0;
  for (std::size_t i = 0; i < path.size(); ++i) {
    out << format_double(path.time(i)) << ',' << format_double(path.value(i)) << ',';
    if (jp < jumps.size() && jumps[jp].index == i) out << format_double(jumps[jp++].left_value);
    out << '\n';
  }
}

void write_minorant_csv(std::ostream& out, const CadlagPath& path,
                        const MinorantResult& result, std::string_view comment) {
  if (result.size() != path.size()) {
    throw InputError("write_minorant_csv: minorant does not match path length");
  }
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "t,m,contact,contaminated\n";
  for (std::size_t i = 0; i < path.size(); ++i) {
    out << format_double(path.time(i)) << ',' << format_double(result.m[i]) << ','
        << (result.is_contact(i) ? 1 : 0) << ',' << (result.is_contaminated(i) ? 1 : 0) << '\n';
  }
}

}  // namespace lipminor

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "lipminor/minorant.hpp"
#include "lipminor/path.hpp"

namespace lipminor {

// Path CSV: header `t,value,left_value`, one row per sample, left_value blank
// where the path does not jump. Lines starting with '#' are comments.
// Parse failures throw InputError naming the offending line.
[[nodiscard]] CadlagPath read_path_csv(std::istream& in);
[[nodiscard]] CadlagPath read_path_csv(const std::filesystem::path& file);

// `comment`, when non-empty, is written first as a single '# ' line.
void write_path_csv(std::ostream& out, const CadlagPath& path, std::string_view comment = {});

// Minorant CSV: header `t,m,contact,contaminated` with 0/1 flags.
void write_minorant_csv(std::ostream& out, const CadlagPath& path,
                        const MinorantResult& result, std::string_view comment = {});

// Shortest decimal representation that round-trips.
[[nodiscard]] std::string format_double(double x);

}  // namespace lipminor

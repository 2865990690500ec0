#pragma once

#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "phishlex/types.hpp"

namespace phishlex::csvio {

// Parsed CSV contents. Rows that could not be parsed (bad quoting, field
// count differing from the header) are skipped and reported in `malformed`,
// indexed by their 0-based data-row ordinal.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<RowError> malformed;
};

Table parse(std::string_view text, bool has_header);

// Throws FileNotFoundError / EmptyFileError.
Table read_file(const std::string& path, bool has_header);

std::string escape(std::string_view field);
void write_row(std::ostream& out, std::span<const std::string> fields);

}  // namespace phishlex::csvio

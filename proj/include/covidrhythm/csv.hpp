#pragma once

#include <string>
#include <vector>

namespace covidrhythm::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // 1-based line number of each row in the source file (header is line 1).
  std::vector<std::size_t> line_numbers;

  // Index of a named column; throws ParseError when absent.
  std::size_t column(const std::string& name) const;
  bool has_column(const std::string& name) const;
};

// Reads a comma-separated file with a mandatory header row. Quoting is not
// supported; fields are trimmed of surrounding whitespace.
Table read_file(const std::string& path);
Table parse(const std::string& text);

void write_file(const std::string& path,
                const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows);

std::string format_double(double v);

}  // namespace covidrhythm::csv

#pragma once
#include <string>
#include <vector>

namespace driftlab::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

// Shortest representation that round-trips a double (up to 17 significant
// digits).
std::string format_double(double v);

// UTF-8, comma separated, LF line endings, one header row.
void write(const std::string& path, const Table& t);
Table read(const std::string& path);

}  // namespace driftlab::csv

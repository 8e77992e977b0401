#pragma once

#include <string>
#include <vector>

namespace eta::csv {

// Round-trip-exact formatting for doubles ("%.17g"); all CSV output goes
// through this so identical values always produce identical bytes.
std::string format_double(double v);

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

void write_table(const std::string& path, const Table& table);
Table read_table(const std::string& path);  // header required

// One-value-per-line scalar column (distribution serialization format).
void write_column(const std::string& path, const std::vector<double>& values);
std::vector<double> read_column(const std::string& path);

void write_text(const std::string& path, const std::string& content);
std::string read_text(const std::string& path);

}  // namespace eta::csv

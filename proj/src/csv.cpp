#include "eta/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace eta::csv {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_table(const std::string& path, const Table& table) {
    std::ostringstream out;
    for (std::size_t i = 0; i < table.header.size(); ++i) {
        if (i) out << ',';
        out << table.header[i];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            throw std::runtime_error("row width does not match header: " + path);
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << format_double(row[i]);
        }
        out << '\n';
    }
    write_text(path, out.str());
}

namespace {

double parse_double(const std::string& tok, const std::string& path) {
    // strtod directly: stod throws out_of_range on subnormal underflow, which
    // legitimate KDE tail densities hit
    const char* begin = tok.c_str();
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(begin, &end);
    bool ok = end != begin;
    if (ok && errno == ERANGE && (v == HUGE_VAL || v == -HUGE_VAL)) ok = false;
    while (ok && *end != '\0') {
        if (*end != ' ' && *end != '\r') ok = false;
        ++end;
    }
    if (!ok) throw std::runtime_error("malformed numeric field '" + tok + "' in " + path);
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

Table read_table(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    Table table;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV file: " + path);
    table.header = split_csv_line(line);
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        const auto toks = split_csv_line(line);
        if (toks.size() != table.header.size())
            throw std::runtime_error("inconsistent column count in " + path);
        std::vector<double> row;
        row.reserve(toks.size());
        for (const auto& t : toks) row.push_back(parse_double(t, path));
        table.rows.push_back(std::move(row));
    }
    return table;
}

void write_column(const std::string& path, const std::vector<double>& values) {
    std::ostringstream out;
    for (double v : values) out << format_double(v) << '\n';
    write_text(path, out.str());
}

std::vector<double> read_column(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        values.push_back(parse_double(line, path));
    }
    return values;
}

}  // namespace eta::csv

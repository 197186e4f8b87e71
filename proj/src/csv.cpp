#include "rvp/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace rvp {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

void CsvTable::add_row(const std::vector<double>& row) {
    if (row.size() != header_.size())
        throw std::invalid_argument("CsvTable: row width mismatch");
    rows_.push_back(row);
}

std::string CsvTable::to_string() const {
    std::string out;
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (i) out += ',';
        out += header_[i];
    }
    out += '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

void CsvTable::write(const std::string& path) const {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("CsvTable: cannot write " + path);
    f << to_string();
}

} // namespace rvp

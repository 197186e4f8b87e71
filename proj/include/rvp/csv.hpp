#pragma once

#include <string>
#include <vector>

namespace rvp {

/// Column-oriented CSV with all floats at 17 significant digits, so reruns
/// of the same seed produce byte-identical files.
class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header);

    void add_row(const std::vector<double>& row);
    std::string to_string() const;
    void write(const std::string& path) const;

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

std::string format_double(double v);

} // namespace rvp

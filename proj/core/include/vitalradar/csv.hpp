#pragma once

// Minimal CSV support for the tables this kit reads and writes: a header row
// followed by comma separated fields, no quoting or embedded commas.

#include <map>
#include <string>
#include <vector>

namespace vitalradar {

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    int column_index(const std::string& name) const;        // -1 when absent
    int require_column(const std::string& name) const;      // InputError when absent
    const std::string& cell(std::size_t row, int col) const;
    double cell_double(std::size_t row, int col) const;

    static CsvTable read_file(const std::string& path);
    static CsvTable read_string(const std::string& text,
                                const std::string& origin = "<string>");
    void write_file(const std::string& path) const;
    std::string to_string() const;
};

std::string format_double(double v);  // shortest round-trip-safe form

}  // namespace vitalradar

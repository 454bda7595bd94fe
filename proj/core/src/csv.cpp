#include "vitalradar/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "vitalradar/errors.hpp"

namespace vitalradar {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
            field.pop_back();
        std::size_t b = field.find_first_not_of(' ');
        out.push_back(b == std::string::npos ? "" : field.substr(b));
    }
    if (!line.empty() && line.back() == ',') out.push_back("");
    return out;
}

}  // namespace

int CsvTable::column_index(const std::string& name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return static_cast<int>(i);
    return -1;
}

int CsvTable::require_column(const std::string& name) const {
    int i = column_index(name);
    if (i < 0) throw InputError("missing CSV column '" + name + "'");
    return i;
}

const std::string& CsvTable::cell(std::size_t row, int col) const {
    if (row >= rows.size() || col < 0 ||
        static_cast<std::size_t>(col) >= rows[row].size())
        throw InputError("CSV cell (" + std::to_string(row) + ", " +
                         std::to_string(col) + ") is out of range");
    return rows[row][static_cast<std::size_t>(col)];
}

double CsvTable::cell_double(std::size_t row, int col) const {
    const std::string& s = cell(row, col);
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw InputError("CSV row " + std::to_string(row + 2) + " column '" +
                         columns.at(static_cast<std::size_t>(col)) +
                         "': expected a number, got '" + s + "'");
    return v;
}

CsvTable CsvTable::read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return read_string(buf.str(), path);
}

CsvTable CsvTable::read_string(const std::string& text, const std::string& origin) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::vector<std::string> fields = split_line(line);
        if (t.columns.empty()) {
            t.columns = std::move(fields);
            continue;
        }
        if (fields.size() != t.columns.size())
            throw InputError(origin + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(t.columns.size()) + " fields, got " +
                             std::to_string(fields.size()));
        t.rows.push_back(std::move(fields));
    }
    if (t.columns.empty()) throw InputError(origin + ": empty CSV");
    return t;
}

std::string CsvTable::to_string() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < columns.size(); ++i)
        out << columns[i] << (i + 1 == columns.size() ? "\n" : ",");
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 == row.size() ? "\n" : ",");
    return out.str();
}

void CsvTable::write_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << to_string();
    if (!out) throw InputError("failed writing '" + path + "'");
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    // shortest form that still round-trips a double
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double back = std::strtod(buf, nullptr);
    for (int prec = 1; prec < 17; ++prec) {
        char tight[40];
        std::snprintf(tight, sizeof(tight), "%.*g", prec, v);
        if (std::strtod(tight, nullptr) == back) return tight;
    }
    return buf;
}

}  // namespace vitalradar

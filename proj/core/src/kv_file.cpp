#include "vitalradar/kv_file.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "vitalradar/errors.hpp"

namespace vitalradar {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& text, const std::string& where) {
    const std::string t = trim(text);
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || *end != '\0')
        throw InputError(where + ": expected a number, got '" + t + "'");
    return v;
}

}  // namespace

KvFile KvFile::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path);
}

KvFile KvFile::parse_string(const std::string& text, const std::string& origin) {
    KvFile kv;
    kv.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string s = trim(line);
        if (s.empty() || s[0] == '#') continue;
        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw InputError(origin + ":" + std::to_string(lineno) +
                             ": expected 'key = value', got '" + s + "'");
        std::string key = trim(s.substr(0, eq));
        std::string value = trim(s.substr(eq + 1));
        if (key.empty())
            throw InputError(origin + ":" + std::to_string(lineno) + ": empty key");
        if (kv.values_.count(key))
            throw InputError(origin + ":" + std::to_string(lineno) +
                             ": duplicate key '" + key + "' (first at line " +
                             std::to_string(kv.lines_[key]) + ")");
        kv.values_[key] = value;
        kv.lines_[key] = lineno;
    }
    return kv;
}

bool KvFile::has(const std::string& key) const { return values_.count(key) != 0; }

std::string KvFile::where(const std::string& key) const {
    auto it = lines_.find(key);
    std::string loc = origin_;
    if (it != lines_.end()) loc += ":" + std::to_string(it->second);
    return loc + ": key '" + key + "'";
}

std::string KvFile::get_string(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
        throw InputError(origin_ + ": missing required key '" + key + "'");
    return it->second;
}

double KvFile::get_double(const std::string& key) const {
    return parse_double(get_string(key), where(key));
}

long long KvFile::get_int(const std::string& key) const {
    double v = get_double(key);
    long long i = static_cast<long long>(std::llround(v));
    if (std::abs(v - static_cast<double>(i)) > 1e-9)
        throw InputError(where(key) + ": expected an integer, got '" +
                         values_.at(key) + "'");
    return i;
}

std::uint64_t KvFile::get_u64(const std::string& key) const {
    const std::string t = get_string(key);
    char* end = nullptr;
    std::uint64_t v = std::strtoull(t.c_str(), &end, 0);
    if (end == t.c_str() || *end != '\0')
        throw InputError(where(key) + ": expected an unsigned integer, got '" + t + "'");
    return v;
}

std::string KvFile::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

double KvFile::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

long long KvFile::get_int(const std::string& key, long long fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::vector<double> KvFile::get_double_list(const std::string& key) const {
    const std::string raw = get_string(key);
    std::vector<double> out;
    if (raw.find(':') != std::string::npos) {
        // lo:step:hi inclusive ramp
        std::istringstream ss(raw);
        std::string a, b, c;
        if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c))
            throw InputError(where(key) + ": ramp must be 'lo:step:hi'");
        double lo = parse_double(a, where(key));
        double step = parse_double(b, where(key));
        double hi = parse_double(c, where(key));
        if (step <= 0 || hi < lo)
            throw InputError(where(key) + ": ramp must have step > 0 and hi >= lo");
        for (double v = lo; v <= hi + 1e-9 * step; v += step) out.push_back(v);
        return out;
    }
    std::istringstream ss(raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(parse_double(item, where(key)));
    }
    if (out.empty()) throw InputError(where(key) + ": empty list");
    return out;
}

std::vector<std::string> KvFile::keys_with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (auto it = values_.lower_bound(prefix); it != values_.end(); ++it) {
        if (it->first.compare(0, prefix.size(), prefix) != 0) break;
        out.push_back(it->first);
    }
    return out;
}

}  // namespace vitalradar

#pragma once

// Reader for the small "key = value" text format used by configs, scenes and
// weight files. Lines are either blank, a "#" comment, or "key = value".
// Keys are dotted paths (subject.0.range_m); values keep their raw text until
// a typed getter is called, so errors can point at file and line.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace vitalradar {

class KvFile {
  public:
    static KvFile parse_file(const std::string& path);
    static KvFile parse_string(const std::string& text,
                               const std::string& origin = "<string>");

    bool has(const std::string& key) const;

    std::string get_string(const std::string& key) const;
    double get_double(const std::string& key) const;
    long long get_int(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    long long get_int(const std::string& key, long long fallback) const;

    // Comma separated list, or "lo:step:hi" expanded to an inclusive ramp.
    std::vector<double> get_double_list(const std::string& key) const;

    std::vector<std::string> keys_with_prefix(const std::string& prefix) const;
    const std::map<std::string, std::string>& entries() const { return values_; }
    const std::string& origin() const { return origin_; }

    // "origin:line: key 'k'" prefix for error messages.
    std::string where(const std::string& key) const;

  private:
    std::string origin_;
    std::map<std::string, std::string> values_;
    std::map<std::string, int> lines_;
};

}  // namespace vitalradar

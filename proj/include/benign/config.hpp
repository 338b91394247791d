#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace benign::config {

/// Flat `key = value` settings with `#` comments and comma-separated lists.
/// Unknown or duplicated keys are rejected at parse time; typed getters throw
/// ConfigError naming the key on conversion failure.
class RunConfig {
public:
    static RunConfig parse(std::istream& in, const std::string& source = "<config>");
    static RunConfig load(const std::filesystem::path& path);

    static const std::vector<std::string>& known_keys();

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, std::string value);

    std::string get_string(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    std::int64_t get_int(const std::string& key) const;
    std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
    std::uint64_t get_uint(const std::string& key) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_double_list(const std::string& key) const;
    std::vector<std::int64_t> get_int_list(const std::string& key) const;

private:
    struct Entry {
        std::string value;
        std::size_t line = 0;
    };
    const Entry& require(const std::string& key) const;

    std::string source_;
    std::map<std::string, Entry> values_;
};

}  // namespace benign::config

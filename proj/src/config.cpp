#include "benign/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>

#include "benign/errors.hpp"

namespace benign::config {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = value.find(',', start);
        out.push_back(trim(value.substr(start, pos == std::string::npos ? std::string::npos : pos - start)));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

template <typename T>
bool convert(const std::string& text, T& out) {
    const auto* first = text.data();
    const auto* last = text.data() + text.size();
    const auto [p, ec] = std::from_chars(first, last, out);
    return !text.empty() && ec == std::errc() && p == last;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
    throw ConfigError("key '" + key + "': cannot read '" + value + "' as " + expected);
}

}  // namespace

const std::vector<std::string>& RunConfig::known_keys() {
    static const std::vector<std::string> keys{
        "dataset.kind", "dataset.path", "d",           "n_list",        "n_test",       "m",
        "lr",           "iterations",   "noise_std",   "gamma_list",    "seeds",        "base_seed",
        "mc_samples",   "log_schedule", "out_dir",     "abalone_columns", "wine_variant", "constant_C",
        "eps",          "delta",        "model",       "diagnostics",
    };
    return keys;
}

RunConfig RunConfig::parse(std::istream& in, const std::string& source) {
    RunConfig cfg;
    cfg.source_ = source;
    const auto& keys = known_keys();
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        if (cfg.values_.count(key)) {
            throw ConfigError(source + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
        cfg.values_[key] = Entry{value, line_no};
    }
    return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    return parse(in, path.string());
}

void RunConfig::set(const std::string& key, std::string value) {
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ConfigError("unknown key '" + key + "'");
    values_[key] = Entry{std::move(value), 0};
}

const RunConfig::Entry& RunConfig::require(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
    return it->second;
}

std::string RunConfig::get_string(const std::string& key) const { return require(key).value; }

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
}

double RunConfig::get_double(const std::string& key) const {
    const auto& v = require(key).value;
    double out = 0.0;
    if (!convert(v, out)) bad_value(key, v, "a number");
    return out;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

std::int64_t RunConfig::get_int(const std::string& key) const {
    const auto& v = require(key).value;
    std::int64_t out = 0;
    if (!convert(v, out)) bad_value(key, v, "an integer");
    return out;
}

std::int64_t RunConfig::get_int(const std::string& key, std::int64_t fallback) const {
    return has(key) ? get_int(key) : fallback;
}

std::uint64_t RunConfig::get_uint(const std::string& key) const {
    const auto& v = require(key).value;
    std::uint64_t out = 0;
    if (!convert(v, out)) bad_value(key, v, "a nonnegative integer");
    return out;
}

std::uint64_t RunConfig::get_uint(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? get_uint(key) : fallback;
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = require(key).value;
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    bad_value(key, v, "a boolean");
}

std::vector<double> RunConfig::get_double_list(const std::string& key) const {
    const auto& v = require(key).value;
    std::vector<double> out;
    for (const auto& item : split_list(v)) {
        double x = 0.0;
        if (!convert(item, x)) bad_value(key, item, "a number");
        out.push_back(x);
    }
    return out;
}

std::vector<std::int64_t> RunConfig::get_int_list(const std::string& key) const {
    const auto& v = require(key).value;
    std::vector<std::int64_t> out;
    for (const auto& item : split_list(v)) {
        std::int64_t x = 0;
        if (!convert(item, x)) bad_value(key, item, "an integer");
        out.push_back(x);
    }
    return out;
}

}  // namespace benign::config

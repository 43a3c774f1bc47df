#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace ergolab {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Flat key-value experiment configuration: one `key = value` pair per line,
/// `#` comments, comma-separated lists for series parameters.
class ExperimentConfig {
public:
    ExperimentConfig() = default;
    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig parse_file(const std::string& path);

    bool has(const std::string& key) const { return kv_.count(key) > 0; }
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }

    std::string get_str(const std::string& key) const;
    std::string get_str(const std::string& key, const std::string& dflt) const;
    std::uint64_t get_u64(const std::string& key) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t dflt) const;
    std::int64_t get_i64(const std::string& key, std::int64_t dflt) const;
    double get_f64(const std::string& key) const;
    double get_f64(const std::string& key, double dflt) const;
    bool get_bool(const std::string& key, bool dflt) const;
    std::vector<double> get_f64_list(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const { return kv_; }
    nlohmann::json echo() const;

private:
    std::map<std::string, std::string> kv_;
};

} // namespace ergolab

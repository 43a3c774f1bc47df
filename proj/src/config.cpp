#include "ergolab/config.hpp"

#include <fstream>
#include <sstream>

namespace ergolab {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

} // namespace

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        cfg.kv_[key] = value;
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::string ExperimentConfig::get_str(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) throw ConfigError("missing required key: " + key);
    return it->second;
}

std::string ExperimentConfig::get_str(const std::string& key, const std::string& dflt) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? dflt : it->second;
}

std::uint64_t ExperimentConfig::get_u64(const std::string& key) const {
    try {
        return std::stoull(get_str(key));
    } catch (const std::invalid_argument&) {
        throw ConfigError("key " + key + " is not an unsigned integer");
    }
}

std::uint64_t ExperimentConfig::get_u64(const std::string& key, std::uint64_t dflt) const {
    return has(key) ? get_u64(key) : dflt;
}

std::int64_t ExperimentConfig::get_i64(const std::string& key, std::int64_t dflt) const {
    if (!has(key)) return dflt;
    try {
        return std::stoll(get_str(key));
    } catch (const std::invalid_argument&) {
        throw ConfigError("key " + key + " is not an integer");
    }
}

double ExperimentConfig::get_f64(const std::string& key) const {
    try {
        return std::stod(get_str(key));
    } catch (const std::invalid_argument&) {
        throw ConfigError("key " + key + " is not a number");
    }
}

double ExperimentConfig::get_f64(const std::string& key, double dflt) const {
    return has(key) ? get_f64(key) : dflt;
}

bool ExperimentConfig::get_bool(const std::string& key, bool dflt) const {
    if (!has(key)) return dflt;
    const std::string v = get_str(key);
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off") return false;
    throw ConfigError("key " + key + " is not a boolean");
}

std::vector<double> ExperimentConfig::get_f64_list(const std::string& key) const {
    std::vector<double> out;
    std::istringstream in(get_str(key));
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::invalid_argument&) {
            throw ConfigError("key " + key + ": bad list element '" + item + "'");
        }
    }
    return out;
}

nlohmann::json ExperimentConfig::echo() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : kv_) j[k] = v;
    return j;
}

} // namespace ergolab

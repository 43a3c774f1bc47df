#include "ergolab/record.hpp"

#include <fstream>

namespace ergolab {

std::string library_version() { return "0.1.0"; }

ResultRecord::ResultRecord() {
    j = nlohmann::json::object();
    j["version"] = library_version();
    j["results"] = nlohmann::json::object();
    j["series"] = nlohmann::json::object();
    j["verdicts"] = nlohmann::json::object();
}

void ResultRecord::set_config(const nlohmann::json& echo) { j["config"] = echo; }

void ResultRecord::set_scalar(const std::string& name, const ValueWithError& v) {
    j["results"][name] = {{"value", v.value}, {"se", v.se}, {"samples", v.samples}};
}

void ResultRecord::set_scalar(const std::string& name, double v) { j["results"][name] = v; }

void ResultRecord::set_series(const std::string& name, const std::vector<double>& xs) {
    j["series"][name] = xs;
}

void ResultRecord::set_verdict(const std::string& name, bool pass) { j["verdicts"][name] = pass; }

void ResultRecord::set_text(const std::string& name, const std::string& v) { j["results"][name] = v; }

void ResultRecord::set_wall_time_ms(double ms) { j["wall_time_ms"] = ms; }

std::string ResultRecord::to_jsonl() const { return j.dump(); }

void append_jsonl(const std::string& path, const ResultRecord& rec) {
    std::ofstream out(path, std::ios::app);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << rec.to_jsonl() << "\n";
}

void write_series_csv(const std::string& path, const std::vector<std::string>& headers,
                      const std::vector<std::vector<double>>& columns) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    for (std::size_t i = 0; i < headers.size(); ++i) out << (i ? "," : "") << headers[i];
    out << "\n";
    std::size_t rows = 0;
    for (const auto& c : columns) rows = std::max(rows, c.size());
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << (c ? "," : "") << (r < columns[c].size() ? std::to_string(columns[c][r]) : "");
        out << "\n";
    }
}

} // namespace ergolab

#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ergolab/stats.hpp"

namespace ergolab {

std::string library_version();

/// Self-describing result of one experiment run: config echo, named scalars
/// with errors, per-n series, verdicts, wall time.
struct ResultRecord {
    nlohmann::json j;

    ResultRecord();
    void set_config(const nlohmann::json& echo);
    void set_scalar(const std::string& name, const ValueWithError& v);
    void set_scalar(const std::string& name, double v);
    void set_series(const std::string& name, const std::vector<double>& xs);
    void set_verdict(const std::string& name, bool pass);
    void set_text(const std::string& name, const std::string& v);
    void set_wall_time_ms(double ms);
    std::string to_jsonl() const; // single line
};

void append_jsonl(const std::string& path, const ResultRecord& rec);

/// CSV with one row per n; columns named in `headers` (first column is n).
void write_series_csv(const std::string& path, const std::vector<std::string>& headers,
                      const std::vector<std::vector<double>>& columns);

} // namespace ergolab

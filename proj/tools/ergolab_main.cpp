#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ergolab/runner.hpp"
#include "ergolab/suite.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::uint64_t workers = 0;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "experiment config file (key = value lines)");
    cmd->add_option("--out", flags.out_path, "append the result record to this JSONL file");
    cmd->add_option("--seed", flags.seed, "master seed (overrides config)")->each([&](const std::string&) {
        flags.seed_set = true;
    });
    cmd->add_option("--workers", flags.workers, "worker thread count");
}

int run_op(const std::string& operation, const CommonFlags& flags,
           const std::vector<std::pair<std::string, std::string>>& extra) {
    ergolab::ExperimentConfig cfg;
    if (!flags.config_path.empty()) cfg = ergolab::ExperimentConfig::parse_file(flags.config_path);
    cfg.set("operation", operation);
    if (flags.seed_set) cfg.set("seed", std::to_string(flags.seed));
    if (flags.workers) cfg.set("workers", std::to_string(flags.workers));
    if (!flags.out_path.empty()) cfg.set("out", flags.out_path);
    for (const auto& [k, v] : extra)
        if (!cfg.has(k)) cfg.set(k, v);
    const auto outcome = ergolab::run_experiment(cfg);
    std::cout << outcome.record.to_jsonl() << "\n";
    return outcome.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ergolab: stationary random graphs, walk entropy and the Radon-Nikodym cocycle"};
    app.require_subcommand(1);

    const std::vector<std::string> ops = {"generate",     "walk",          "entropy", "speed",
                                          "range",        "growth",        "inequality", "stationarity",
                                          "reversibility", "mtp",          "cocycle", "percolation"};
    std::map<std::string, CommonFlags> flags;
    std::map<std::string, std::vector<std::string>> raw_sets;
    for (const auto& op : ops) {
        auto* cmd = app.add_subcommand(op, op + " experiment");
        add_common(cmd, flags[op]);
        cmd->add_option("--set", raw_sets[op], "extra config entries, key=value (repeatable)");
    }

    auto* suite_cmd = app.add_subcommand("suite", "run the acceptance or invariants battery");
    std::string suite_name = "invariants";
    std::string suite_only;
    std::uint64_t suite_seed = 1;
    std::uint64_t suite_workers = 1;
    suite_cmd->add_option("name", suite_name, "acceptance | invariants")->required();
    suite_cmd->add_option("--only", suite_only, "run a single criterion (e.g. A9)");
    suite_cmd->add_option("--seed", suite_seed, "master seed");
    suite_cmd->add_option("--workers", suite_workers, "worker thread count");

    CLI11_PARSE(app, argc, argv);

    for (const auto& op : ops) {
        if (!app.got_subcommand(op)) continue;
        std::vector<std::pair<std::string, std::string>> extra;
        for (const auto& kv : raw_sets[op]) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) {
                std::cerr << "--set expects key=value, got: " << kv << "\n";
                return ergolab::kConfigError;
            }
            extra.emplace_back(kv.substr(0, eq), kv.substr(eq + 1));
        }
        return run_op(op, flags[op], extra);
    }
    if (app.got_subcommand("suite")) {
        std::vector<ergolab::CheckResult> results;
        if (suite_name == "acceptance") {
            results = ergolab::run_acceptance(
                suite_only.empty() ? std::nullopt : std::make_optional(suite_only), suite_seed,
                static_cast<std::uint32_t>(suite_workers));
        } else if (suite_name == "invariants") {
            results = ergolab::run_invariants(suite_seed);
        } else {
            std::cerr << "unknown suite: " << suite_name << "\n";
            return ergolab::kConfigError;
        }
        bool all_pass = true;
        for (const auto& r : results) {
            std::cout << ergolab::format_check_line(r) << "\n";
            all_pass = all_pass && r.pass;
        }
        return all_pass ? ergolab::kOk : ergolab::kVerdictFailure;
    }
    return ergolab::kConfigError;
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_set>

#include <json.hpp>

#include "ergolab/config.hpp"
#include "ergolab/rng.hpp"
#include "ergolab/record.hpp"
#include "ergolab/runner.hpp"

using namespace ergolab;

namespace {

struct CliRun {
    int exit_code;
    std::string stdout_text;
};

CliRun run_cli(const std::string& args, const std::string& env = "") {
    const std::string out_path = "/tmp/ergolab_cli_out.txt";
    const std::string cmd = env + " " ERGOLAB_CLI_PATH " " + args + " > " + out_path + " 2>/dev/null";
    const int rc = std::system(cmd.c_str());
    std::ifstream in(out_path);
    std::stringstream ss;
    ss << in.rdbuf();
    return {WEXITSTATUS(rc), ss.str()};
}

} // namespace

TEST_CASE("config parsing: key-value lines, comments, lists, errors") {
    const auto cfg = ExperimentConfig::parse("a = 1\n# comment\nlist = 0.5, 0.25,0.25\nname = grandfather\n");
    CHECK(cfg.get_u64("a") == 1);
    CHECK(cfg.get_str("name") == "grandfather");
    const auto xs = cfg.get_f64_list("list");
    REQUIRE(xs.size() == 3);
    CHECK(xs[0] == 0.5);
    CHECK_THROWS_AS((void)cfg.get_str("missing"), ConfigError);
    CHECK_THROWS_AS((void)ExperimentConfig::parse("novalue\n"), ConfigError);
}

TEST_CASE("derive_seed: distinct replicas, stability, avalanche") {
    CHECK(derive_seed(1, 0) == derive_seed(1, 0));
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    // collision scan over many replica indices
    std::unordered_set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 1000000; ++i) seen.insert(derive_seed(12345, i));
    CHECK(seen.size() == 1000000);
}

TEST_CASE("run_experiment: records carry results, errors map to exit codes") {
    ExperimentConfig cfg;
    cfg.set("operation", "entropy");
    cfg.set("ensemble", "lattice");
    cfg.set("d", "1");
    cfg.set("n_max", "8");
    cfg.set("seed", "5");
    const auto out = run_experiment(cfg);
    CHECK(out.exit_code == kOk);
    CHECK(out.record.j["results"].contains("h"));
    CHECK(out.record.j["series"]["h_n"].size() == 9);

    ExperimentConfig bad;
    bad.set("operation", "entropy");
    bad.set("ensemble", "nonsense");
    CHECK(run_experiment(bad).exit_code == kConfigError);

    ExperimentConfig horizon;
    horizon.set("operation", "growth");
    horizon.set("ensemble", "canopy");
    horizon.set("horizon", "4");
    horizon.set("n_max", "32");
    CHECK(run_experiment(horizon).exit_code == kHorizonError);

    // failing stationarity verdict maps to the verdict exit code
    ExperimentConfig verdict;
    verdict.set("operation", "stationarity");
    verdict.set("ensemble", "finite");
    verdict.set("graph", "path");
    verdict.set("n", "3");
    verdict.set("rooting", "uniform");
    verdict.set("r", "1");
    const auto v = run_experiment(verdict);
    CHECK(v.exit_code == kVerdictFailure);
    CHECK(v.record.j["results"]["tv"].get<double>() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("cli: replay determinism and seed override") {
    const std::string args = "speed --set ensemble=grandfather --set n=50 --set samples=200 --seed 9";
    const auto r1 = run_cli(args);
    const auto r2 = run_cli(args);
    CHECK(r1.exit_code == 0);
    auto strip_time = [](const std::string& text) {
        auto j = nlohmann::json::parse(text);
        j.erase("wall_time_ms");
        return j;
    };
    CHECK(strip_time(r1.stdout_text) == strip_time(r2.stdout_text));

    const auto r3 = run_cli(args, "ERGOLAB_SEED=10");
    CHECK(r3.exit_code == 0);
    CHECK(strip_time(r3.stdout_text) != strip_time(r1.stdout_text));
    const auto j = nlohmann::json::parse(r3.stdout_text);
    CHECK(j["seed"] == 10);
}

TEST_CASE("cli: generate emits an edge list, walk emits a path") {
    const auto gen = run_cli("generate --set ensemble=lattice --set d=2 --set radius=2");
    CHECK(gen.exit_code == 0);
    const auto j = nlohmann::json::parse(gen.stdout_text);
    const std::string edges = j["results"]["edge_list"];
    CHECK(edges.rfind("root ", 0) == 0);
    CHECK(j["results"]["vertices"].get<double>() == 13.0);

    const auto walk = run_cli("walk --set ensemble=grandfather --set n=16 --seed 4");
    CHECK(walk.exit_code == 0);
    const auto jw = nlohmann::json::parse(walk.stdout_text);
    CHECK(jw["series"]["path"].size() == 17);
}

TEST_CASE("cli: config file plus JSONL output") {
    const std::string cfg_path = "/tmp/ergolab_test_cfg.txt";
    const std::string out_path = "/tmp/ergolab_test_records.jsonl";
    std::remove(out_path.c_str());
    {
        std::ofstream cfg(cfg_path);
        cfg << "ensemble = lattice\nd = 1\nn = 100\nsamples = 100\nseed = 2\n";
    }
    const std::string args = "range --config " + cfg_path + " --out " + out_path;
    CHECK(run_cli(args).exit_code == 0);
    CHECK(run_cli(args).exit_code == 0);
    std::ifstream in(out_path);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
        const auto j = nlohmann::json::parse(line);
        CHECK(j["results"].contains("range_over_n"));
        ++lines;
    }
    CHECK(lines == 2);
}

TEST_CASE("cli: cocycle on the grandfather graph reports the exact table") {
    const auto r = run_cli("cocycle --set ensemble=grandfather --set r=2 --seed 3");
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.stdout_text);
    CHECK(j["results"]["classes"].size() == 4);
    CHECK(j["results"]["ballistic_bound"].get<double>() == doctest::Approx(7.0 / 24.0).epsilon(1e-9));
    CHECK(j["results"]["cycle_max_abs_log"].get<double>() < 1e-10);
}

TEST_CASE("cli: entropy series CSV output") {
    const std::string csv_path = "/tmp/ergolab_series.csv";
    std::remove(csv_path.c_str());
    const auto r = run_cli("entropy --set ensemble=lattice --set d=1 --set n_max=6 --set csv=" + csv_path);
    CHECK(r.exit_code == 0);
    std::ifstream in(csv_path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "n,h_n,se");
    int rows = 0;
    std::string line;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 7);
}

TEST_CASE("cli: percolation sampling") {
    const auto r = run_cli("percolation --set d=1 --set beta=1.0 --set s=1.5 --set L=500 --seed 6");
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.stdout_text);
    CHECK(j["results"]["edges"].get<double>() > 100);
    CHECK(j["results"]["cluster_size"].get<double>() >= 1);
}

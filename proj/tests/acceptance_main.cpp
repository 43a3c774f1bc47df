// Acceptance battery driver: one pass/fail line per criterion.
#include <cstring>
#include <iostream>
#include <optional>
#include <string>

#include "ergolab/suite.hpp"

int main(int argc, char** argv) {
    std::optional<std::string> only;
    bool invariants = false;
    std::uint64_t seed = 1;
    std::uint32_t workers = 1;
    for (int i = 1; i < argc; ++i) {
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = argv[++i];
        else if (std::strcmp(argv[i], "--invariants") == 0) invariants = true;
        else if (std::strcmp(argv[i], "--seed") == 0 && i + 1 < argc) seed = std::stoull(argv[++i]);
        else if (std::strcmp(argv[i], "--workers") == 0 && i + 1 < argc) workers = std::stoul(argv[++i]);
        else {
            std::cerr << "usage: acceptance [--only A<k>] [--invariants] [--seed S] [--workers W]\n";
            return 2;
        }
    }
    const auto results = invariants ? ergolab::run_invariants(seed) : ergolab::run_acceptance(only, seed, workers);
    if (results.empty()) {
        std::cerr << "no checks selected\n";
        return 2;
    }
    bool all = true;
    for (const auto& r : results) {
        std::cout << ergolab::format_check_line(r) << std::endl;
        all = all && r.pass;
    }
    return all ? 0 : 1;
}

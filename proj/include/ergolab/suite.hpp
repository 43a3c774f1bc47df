#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ergolab {

struct CheckResult {
    std::string id;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0;
};

/// The acceptance battery: 13 numbered criteria, each a self-contained
/// experiment with pinned tolerances. `only` restricts to one criterion
/// ("A1".."A13").
std::vector<CheckResult> run_acceptance(const std::optional<std::string>& only = std::nullopt,
                                        std::uint64_t seed = 1, std::uint32_t workers = 1);

/// Fast cross-module invariant battery (replay determinism, signature
/// soundness, conservation laws, cocycle laws).
std::vector<CheckResult> run_invariants(std::uint64_t seed = 1);

/// Render one result as a single pass/fail line.
std::string format_check_line(const CheckResult& r);

} // namespace ergolab

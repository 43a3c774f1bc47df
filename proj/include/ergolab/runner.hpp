#pragma once

#include <string>

#include "ergolab/config.hpp"
#include "ergolab/generators.hpp"
#include "ergolab/record.hpp"

namespace ergolab {

/// Exit codes: 0 success, 2 config error, 3 verdict failure, 4 horizon or
/// resource error.
enum ExitCode : int { kOk = 0, kConfigError = 2, kVerdictFailure = 3, kHorizonError = 4 };

/// Build the ensemble named by config keys (`ensemble = ...` plus its
/// parameters, optional `bias = degree` / `unbias = degree` modifiers).
Ensemble make_ensemble(const ExperimentConfig& cfg);

struct RunOutcome {
    ResultRecord record;
    int exit_code = kOk;
};

/// Execute one experiment: `operation = entropy | speed | range | growth |
/// inequality | stationarity | reversibility | mtp | cocycle | walk |
/// generate | percolation`. Appends to `out` (JSONL) when configured.
RunOutcome run_experiment(const ExperimentConfig& cfg);

} // namespace ergolab

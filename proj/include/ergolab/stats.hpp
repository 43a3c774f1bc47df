#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ergolab/generators.hpp"
#include "ergolab/graph.hpp"
#include "ergolab/signature.hpp"
#include "ergolab/walk.hpp"

namespace ergolab {

struct ValueWithError {
    double value = 0;
    double se = 0; // standard error of the mean (0 for exact evaluations)
    std::uint64_t samples = 0;

    double upper(double z = 3.0) const { return value + z * se; }
    double lower(double z = 3.0) const { return value - z * se; }
};

// ---------------------------------------------------------------------------
// entropy series

struct EntropySeries {
    std::uint64_t n_max = 0;
    bool exact = false;        // deterministic ensemble, single exact evaluation
    std::uint64_t samples = 0;
    std::vector<double> h;     // \hat h_n, n = 0..n_max
    std::vector<double> se;
    std::vector<double> inc;   // \hat h_{n+1} - \hat h_n, n = 0..n_max-1
    std::vector<double> inc_se;
};

/// Mean entropy sequence h_n = E[H_n(G, rho)] by exact per-graph
/// distribution propagation, averaged over `samples` replicas (one exact
/// evaluation for deterministic ensembles).
EntropySeries estimate_h_series(const Ensemble& ens, std::uint64_t n_max, std::uint64_t samples,
                                std::uint64_t seed, std::uint32_t workers = 1);

struct EntropyRate {
    ValueWithError h;            // bias-corrected tail-increment estimate
    double tail_increment = 0;   // raw last-window increment (upper-biased)
    double h_over_n = 0;         // cross-check: \hat h_{n_max} / n_max
    bool monotone_ok = true;     // increments non-increasing within 3 se
};

/// Mean entropy h from the tail increments of the series. The increments
/// decrease to h like h + a/n (the boundary-fluctuation term), so the
/// estimate extrapolates the 1/n fit from the windows at n_max and n_max/2;
/// the raw tail increment and h_n / n are reported as cross-checks.
EntropyRate entropy_rate(const EntropySeries& series);

/// E[H(F_k | F^n)] = k h_1 + h_{n-k} - h_n evaluated on the series.
double conditional_entropy_expectation(const EntropySeries& series, std::uint64_t k, std::uint64_t n);

// ---------------------------------------------------------------------------
// speed / range / growth

ValueWithError speed_estimate(const Ensemble& ens, std::uint64_t n, std::uint64_t samples, std::uint64_t seed,
                              std::uint32_t workers = 1);

struct RangeEstimate {
    ValueWithError range_over_n; // R_n / n
    ValueWithError non_return;   // fraction of walks never revisiting X_0 within n steps
    std::uint64_t n = 0;
};

RangeEstimate range_estimate(const Ensemble& ens, std::uint64_t n, std::uint64_t samples, std::uint64_t seed,
                             std::uint32_t workers = 1);

struct GrowthEstimate {
    ValueWithError v;                 // tail slope of E[log #B(rho, n)]
    std::vector<double> log_ball;     // E[log #B(rho, n)], n = 0..n_max
    std::vector<double> log_ball_se;
    bool exact = false;
};

GrowthEstimate growth_estimate(const Ensemble& ens, std::uint64_t n_max, std::uint64_t samples,
                               std::uint64_t seed, std::uint32_t workers = 1);

// ---------------------------------------------------------------------------
// fundamental inequality

struct InequalityOptions {
    std::uint64_t n_entropy = 16;
    std::uint64_t n_speed = 200;
    std::uint64_t n_growth = 16;
    std::uint64_t samples = 2000;
    std::uint64_t seed = 1;
    std::uint32_t workers = 1;
    double zero_threshold = 0.02; // nats/step: "h = 0" verdict cutoff
};

struct InequalityReport {
    ValueWithError s, v, h;
    bool lower_ok = false; // s^2/2 <= h within slack
    bool upper_ok = false; // h <= v s within slack
    bool liouville = false;
    std::string verdict; // "liouville (h ~ 0)", "liouville (v ~ 0)", "no verdict"
    bool violation = false;
};

InequalityReport fundamental_inequality_report(const Ensemble& ens, const InequalityOptions& opts);

// ---------------------------------------------------------------------------
// class distributions and the stationarity battery

struct ClassDistribution {
    std::uint32_t radius = 0;
    bool bi_rooted = false;
    bool exact = false;
    std::uint64_t samples = 0;
    std::unordered_map<BallSignature, double, BallSignatureHash> prob;
};

enum class PairOrder { Forward, Reversed };

/// Law of the r-ball class of (G, X_t); bi-rooted variant of
/// (G, X_t, X_{t+1}) (or the reversed pair). Exact by enumeration for
/// finite-law ensembles and for deterministic ensembles (exact walk
/// propagation); Monte Carlo otherwise.
ClassDistribution class_distribution(const Ensemble& ens, std::uint64_t t, std::uint32_t r,
                                     std::uint64_t samples, std::uint64_t seed, bool bi_rooted = false,
                                     PairOrder order = PairOrder::Forward, std::uint32_t workers = 1);

double total_variation(const ClassDistribution& a, const ClassDistribution& b);

/// Bootstrap 95% quantile of the TV distance between two N-sample
/// empiricals drawn from the pooled law (the null for "same distribution").
double tv_null_quantile(const ClassDistribution& a, const ClassDistribution& b, std::uint64_t n_samples,
                        std::uint64_t seed, std::uint32_t resamples = 1000);

struct TvTestReport {
    double tv = 0;
    bool exact = false;
    double null_q95 = 0; // bootstrap 95% quantile of TV under the null
    bool pass = false;
    std::uint64_t samples = 0;
    std::uint32_t radius = 0;
};

/// TV between the class laws at time 0 and time n (Definition of
/// stationarity projected to radius r). Exact-zero is required of exact
/// ensembles; Monte Carlo runs get a bootstrap null quantile.
TvTestReport stationarity_test(const Ensemble& ens, std::uint64_t n, std::uint32_t r, std::uint64_t samples,
                               std::uint64_t seed, std::uint32_t workers = 1);

/// TV between the bi-rooted laws of (G, X_0, X_1) and (G, X_1, X_0).
TvTestReport reversibility_test(const Ensemble& ens, std::uint32_t r, std::uint64_t samples,
                                std::uint64_t seed, std::uint32_t workers = 1);

// ---------------------------------------------------------------------------
// mass transport

/// Bounded test function measurable through the bi-rooted r-ball: receives
/// the extracted pair ball and the two root ids inside it.
using MassTransportF = std::function<double(const RootedMultigraph& ball, VertexId x, VertexId y)>;

struct MtpReport {
    ValueWithError sent;     // E[sum_x F(G, rho, x)]
    ValueWithError received; // E[sum_x F(G, x, rho)]
    bool exact = false;
    bool pass = false;
};

MtpReport mtp_test(const Ensemble& ens, const MassTransportF& f, std::uint32_t r, std::uint64_t samples,
                   std::uint64_t seed, std::uint32_t workers = 1);

/// Built-in mass transport functions.
MassTransportF mtp_indicator_adjacent();
MassTransportF mtp_class_hash(std::uint32_t r); // pseudorandom in [0,1], class-measurable

// ---------------------------------------------------------------------------
// degree biasing

struct BiasOptions {
    double degree_cap = 256; // acceptance-rejection proposal ceiling
};

/// Reweight the ensemble by deg(rho) (the degree-biased direction of the
/// unimodular <-> reversible correspondence). Exact reweighting for
/// finite-law ensembles, acceptance-rejection otherwise; proposals above
/// the cap are rejected and counted.
Ensemble bias_by_degree(const Ensemble& ens, BiasOptions opts = {});

/// Reweight by deg(rho)^{-1} (the inverse direction).
Ensemble unbias_by_degree(const Ensemble& ens);

} // namespace ergolab

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ergolab/generators.hpp"
#include "ergolab/signature.hpp"
#include "ergolab/stats.hpp"
#include "ergolab/walk.hpp"

namespace ergolab {

struct UnknownClassError : std::runtime_error {
    explicit UnknownClassError(const std::string& what) : std::runtime_error(what) {}
};

/// Per bi-rooted-class forward/backward mass and the Radon-Nikodym ratio.
struct EdgeClassEntry {
    BallSignature cls;      // class of (G, X_0, X_1) at radius r
    BallSignature reversed; // class of the reversed pair
    double mu_fwd = 0;      // forward mass
    double mu_bwd = 0;      // backward mass
    double delta = 0;       // mu_bwd / mu_fwd, clamped to [1/M, M]
    std::uint64_t count = 0;
    bool bwd_only = false;  // seen under the reversed law only (undersampling artifact)
};

class EdgeClassTable {
public:
    std::uint32_t radius = 0;
    double degree_bound = 0; // M
    bool exact = false;
    std::uint64_t samples = 0;
    std::uint64_t bwd_only_classes = 0;
    std::vector<EdgeClassEntry> entries;

    const EdgeClassEntry* find(const BallSignature& cls) const;
    /// Delta of the class; throws UnknownClassError for unseen classes.
    double delta_of(const BallSignature& cls) const;
    /// Delta of the edge (x, y) of g, classified at the table's radius.
    double delta_of_edge(const RootedMultigraph& g, VertexId x, VertexId y) const;
};

/// Estimate mu_fwd, mu_bwd and Delta over bi-rooted r-ball classes of the
/// walked edge. Exact by enumeration for finite-law ensembles and for
/// deterministic ensembles; Monte Carlo otherwise. Classes observed only
/// under the reversed law are flagged and assigned the ceiling M.
EdgeClassTable estimate_delta(const Ensemble& ens, std::uint32_t r, std::uint64_t samples, std::uint64_t seed,
                              std::uint32_t workers = 1);

/// Product of per-edge Delta values along the path (1 for the empty path).
double delta_along_path(const EdgeClassTable& table, const RootedMultigraph& g, const WalkPath& path);

struct ElogDelta {
    ValueWithError value;   // E[log Delta(G, X_0, X_1)] under the forward law
    double ballistic_bound; // |E log Delta| / log M
};

ElogDelta elog_delta(const EdgeClassTable& table, std::uint64_t bootstrap_seed = 7, std::uint32_t resamples = 1000);

/// Max over the sampled vertices of |deg(x)^{-1} sum_y m(x,y) Delta(x,y) - 1|.
double harmonicity_check(const EdgeClassTable& table, const RootedMultigraph& g,
                         std::span<const VertexId> vertices);

struct CycleCheckReport {
    double max_abs_log = 0;
    std::uint64_t cycles_checked = 0;
};

/// Max |log prod Delta| over sampled closed cycles: walk-until-return loops
/// (capped at max_len) plus the triangles through the sampled start points.
CycleCheckReport cycle_product_check(const EdgeClassTable& table, const RootedMultigraph& g,
                                     std::uint64_t n_cycles, std::uint64_t max_len, Rng& rng);

} // namespace ergolab

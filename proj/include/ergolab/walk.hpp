#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ergolab/graph.hpp"
#include "ergolab/rng.hpp"

namespace ergolab {

/// Sampled simple-random-walk trajectory X_0..X_n.
struct WalkPath {
    std::vector<VertexId> vertices;
    std::uint64_t seed = 0;

    std::uint64_t length() const { return vertices.empty() ? 0 : vertices.size() - 1; }
};

/// Exact time-n law of the walk: sparse probability vector over vertices,
/// stored densely over the graph's intern ids.
struct WalkDistribution {
    std::uint64_t time = 0;
    std::vector<double> mass;      // indexed by VertexId
    std::vector<VertexId> support; // ids with positive mass, ascending
    double pruned = 0.0;           // total mass dropped by pruning so far

    static WalkDistribution point(VertexId v);
    double mass_of(VertexId v) const { return v < mass.size() ? mass[v] : 0.0; }
    double total() const;
};

struct DegreeBoundViolation : std::runtime_error {
    explicit DegreeBoundViolation(const std::string& what) : std::runtime_error(what) {}
};

/// One step of the uniform-edge walk: neighbor u is chosen with probability
/// multiplicity(v,u)/deg(v). On simple graphs this is the simple random walk.
VertexId walk_step(const RootedMultigraph& g, VertexId v, Rng& rng);

WalkPath simulate_path(const RootedMultigraph& g, VertexId start, std::uint64_t n, Rng& rng);

/// One exact step of the transition operator. Atoms below `prune` are
/// dropped with their mass accounted in `pruned`. EdgeCache::NoStore keeps
/// huge propagations within memory budget (adjacency recomputed from the
/// oracle instead of cached).
WalkDistribution propagate_distribution(const RootedMultigraph& g, const WalkDistribution& dist,
                                        EdgeCache cache = EdgeCache::Store, double prune = 1e-15);

/// Shannon entropy (nats) of the distribution: sum of -p log p.
double marginal_entropy(const WalkDistribution& dist);

/// Entropy of one step from v: sum over neighbors of -q log q with
/// q = multiplicity/deg.
double step_entropy(const RootedMultigraph& g, VertexId v);

/// H_a^b: entropy of (X_a, ..., X_b), computed by the Markov chain rule
/// H_a + sum_{i=a}^{b-1} E[step_entropy(X_i)]. Equals the direct path-sum
/// definition.
double joint_entropy(const RootedMultigraph& g, VertexId root, std::uint64_t a, std::uint64_t b);

/// Direct conditional entropy H(X_1..X_k | X_n) from the exact joint law
/// (path enumeration up to time k, exact propagation to time n).
double conditional_path_entropy(const RootedMultigraph& g, VertexId root, std::uint64_t k, std::uint64_t n);

struct VaropoulosCarneReport {
    std::uint64_t n = 0;
    double degree_bound = 0;
    double max_ratio = 0;        // max over support of P(X_t = x) / bound(x)
    std::uint64_t atoms_checked = 0;
    bool pass = false;           // max_ratio <= 1
};

/// Checks P(X_n = x) <= 2 sqrt(M) exp(-d(root,x)^2 / 2n) on the exact
/// support of the time-n law (every time 1..n when `all_times`). Throws
/// DegreeBoundViolation if a vertex seen by the walk has degree above M.
VaropoulosCarneReport varopoulos_carne_check(const RootedMultigraph& g, VertexId root, std::uint64_t n,
                                             double degree_bound, bool all_times = false);

/// Series resistance sum_{k=k_from+1}^{k_to} k^-2 of the reinforced spine
/// between depths k_from and k_to.
double spine_resistance(std::uint64_t k_from, std::uint64_t k_to);

} // namespace ergolab

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ergolab/graph.hpp"
#include "ergolab/rng.hpp"

namespace ergolab {

// ---------------------------------------------------------------------------
// epsilon / xi recursion

/// The deterministic branching sequence: eps_1 = 1, eps_{k+1} = 1 if
/// xi_k > k^4 and 2 otherwise, with xi_k the running product. xi grows like
/// k^4 up to bounded oscillation.
struct EpsilonSequence {
    std::vector<std::int32_t> epsilons; // epsilons[k-1] = eps_k, k = 1..k_max
    std::vector<std::uint64_t> xis;     // xis[k] = xi_k, k = 0..k_max, xi_0 = 1

    std::int32_t epsilon(std::uint64_t k) const { return epsilons.at(k - 1); }
    /// xi_k with the conventions xi_0 = xi_{-1} = 1.
    std::uint64_t xi(std::int64_t k) const { return k <= 0 ? 1 : xis.at(static_cast<std::size_t>(k)); }
    std::uint64_t k_max() const { return epsilons.size(); }

    /// Empirical envelope constants: min and max of xi_k / k^4 over k >= 1.
    std::pair<double, double> envelope_constants() const;
};

EpsilonSequence epsilon_sequence(std::uint64_t k_max);

// ---------------------------------------------------------------------------
// deterministic graphs

/// The grandfather graph: 3-regular tree oriented by a distinguished end
/// (one father toward the end, two sons), plus an edge from every vertex to
/// its grandfather. 8-regular and vertex-transitive. Vertex labels carry the
/// Busemann level (father = level + 1).
RootedMultigraph grandfather_graph();

/// Z^d rooted at the origin, unit multiplicities.
RootedMultigraph lattice(std::uint32_t d);

/// The k-regular infinite tree rooted anywhere.
RootedMultigraph regular_tree(std::uint32_t k);

/// Finite canopy tree T_n: height n, one top vertex at depth n, every
/// depth-d vertex (d >= 1) has eps_d children at depth d-1. Rooted at the
/// top vertex; vertex labels carry the depth.
RootedMultigraph canopy_tree(std::uint32_t n);

/// Infinite canopy tree T_inf (one-ended limit of the T_n seen from the
/// top), lazily materialized up to `depth_horizon`; `reinforced` replaces
/// each depth-k edge by k^2 parallel edges (the T^R construction). Rooted at
/// the spine vertex of depth `root_depth`.
RootedMultigraph canopy_tree_infinite(std::uint32_t depth_horizon, std::uint32_t root_depth = 0,
                                      bool reinforced = false);

/// T^R: replace each depth-k edge by k^2 parallel edges. Works on finite
/// trees carrying depth labels and on the lazy infinite canopy.
RootedMultigraph reinforce_edges(const RootedMultigraph& tree);

/// Exact vertex count of B(u, r) in T_inf for a vertex of depth `d`
/// (closed recursion on the eps sequence; no materialization).
std::uint64_t canopy_ball_size(const EpsilonSequence& seq, std::uint64_t depth, std::uint64_t r);

// ---------------------------------------------------------------------------
// root-depth law of T^R_n

struct RootDepthDistribution {
    std::uint32_t n = 0;
    /// Oriented-edge enumeration: mass[k] = sum of degrees of depth-k
    /// vertices of T^R_n; exact integers.
    std::vector<std::uint64_t> oriented_edge_mass; // size n+1
    std::uint64_t total_oriented_edges = 0;
    std::vector<double> enumerated;  // oriented_edge_mass / total
    /// Closed-form values (k^2 xi_n/xi_{k-1} + (k+1)^2 xi_n/xi_k) / total;
    /// the ancestor term does not exist for k = n, so entries are valid for
    /// k < n only.
    std::vector<double> closed_form;
    std::vector<std::uint64_t> closed_form_mass; // same, exact integers
};

RootDepthDistribution root_depth_distribution(std::uint32_t n);

// ---------------------------------------------------------------------------
// long-range percolation

enum class LatticeNorm { Euclidean, L1 };

/// One sample of long-range percolation on the box [-L, L]^d: independent
/// edges with probability min(1, beta |x-y|^{-s}). Kept as a raw sample
/// (the box graph may have isolated vertices); clusters are extracted as
/// rooted multigraphs.
class LongRangePercolation {
public:
    LongRangePercolation(std::uint32_t d, double beta, double s_exp, std::int64_t box_half_width,
                         std::uint64_t seed, LatticeNorm norm = LatticeNorm::Euclidean);

    std::uint32_t dimension() const { return d_; }
    std::int64_t box_half_width() const { return L_; }
    std::uint64_t edge_count() const { return edges_; }
    std::int64_t degree_of_origin() const;
    bool has_edge(const std::vector<std::int64_t>& x, const std::vector<std::int64_t>& y) const;

    /// Connected component of the origin, rooted at the origin; nullopt if
    /// the origin is isolated. Vertex labels carry the linear index of the
    /// lattice point.
    std::optional<RootedMultigraph> cluster_of_origin() const;

    /// Lattice coordinates of a cluster vertex label.
    std::vector<std::int64_t> point_of_label(std::int64_t label) const;

private:
    std::uint64_t point_index(const std::vector<std::int64_t>& x) const;
    std::uint32_t d_;
    std::int64_t L_;
    std::uint64_t side_;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> edge_list_;
    std::uint64_t edges_ = 0;
};

// ---------------------------------------------------------------------------
// ensembles

/// Exactly enumerable root law over a fixed finite graph.
struct ExactRootLaw {
    RootedMultigraph graph;
    std::vector<std::pair<VertexId, double>> weights; // sum to 1
};

/// A seedable distribution over rooted multigraphs: deterministic map
/// (seed, replica) -> graph. Deterministic kinds return the same graph for
/// every replica (fresh lazy instance each call).
struct Ensemble {
    std::string kind;
    nlohmann::json params;
    bool deterministic = false;
    bool transitive = false;
    double degree_bound = -1; // M when known, else -1
    std::shared_ptr<const ExactRootLaw> exact;
    std::function<RootedMultigraph(std::uint64_t, std::uint64_t)> sampler;
    /// Rejections of proposals above the degree cap (degree biasing only).
    std::shared_ptr<std::atomic<std::uint64_t>> cap_rejections;

    RootedMultigraph sample(std::uint64_t seed, std::uint64_t replica) const { return sampler(seed, replica); }
};

Ensemble grandfather_ensemble();
Ensemble lattice_ensemble(std::uint32_t d);
Ensemble regular_tree_ensemble(std::uint32_t k);
Ensemble canopy_infinite_ensemble(std::uint32_t depth_horizon, std::uint32_t root_depth, bool reinforced);

enum class Rooting { Uniform, DegreeBiased };

/// The fixed finite graph re-rooted at random,
/// uniformly or proportionally to degree. Exactly enumerable.
Ensemble finite_graph_ensemble(const RootedMultigraph& graph, Rooting rooting);

struct GWOptions {
    std::uint32_t max_children = 64; // truncation cap, renormalized
    bool flag_truncated = false;     // set by the factory when truncation bites
};

/// Augmented Galton-Watson ensemble: two independent GW trees with the given
/// offspring distribution, roots joined by an edge, rooted at the first
/// root. Lazily grown; expansion is deterministic given (seed, replica).
Ensemble augmented_galton_watson(const std::vector<double>& offspring, GWOptions opts = {});

struct LrpOptions {
    LatticeNorm norm = LatticeNorm::Euclidean;
    std::uint32_t max_resample = 64; // retries when the origin is isolated
};

/// Cluster-of-origin ensemble of long-range percolation, conditioned on the
/// origin not being isolated (isolated draws are resampled and counted in
/// params["resampled"] of the record echo).
Ensemble lrp_cluster_ensemble(std::uint32_t d, double beta, double s_exp, std::int64_t box_half_width,
                              LrpOptions opts = {});

} // namespace ergolab

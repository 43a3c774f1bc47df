#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ergolab/graph.hpp"

namespace ergolab {

/// Canonical code of the isomorphism class of a rooted (or bi-rooted)
/// radius-r ball, multiplicity-aware.
///
/// Codes are assigned through a process-wide registry: a strong
/// Weisfeiler-Leman invariant digest, disambiguated by an exact isomorphism
/// check against the previously seen representatives of the same digest.
/// Equal codes therefore hold iff the balls are isomorphic.
struct BallSignature {
    std::uint32_t radius = 0;
    bool bi_rooted = false;
    std::array<std::uint64_t, 2> digest{0, 0};
    std::uint32_t disambiguator = 0;

    friend bool operator==(const BallSignature& a, const BallSignature& b) {
        return a.radius == b.radius && a.bi_rooted == b.bi_rooted && a.digest == b.digest &&
               a.disambiguator == b.disambiguator;
    }
    friend bool operator<(const BallSignature& a, const BallSignature& b) {
        if (a.radius != b.radius) return a.radius < b.radius;
        if (a.bi_rooted != b.bi_rooted) return a.bi_rooted < b.bi_rooted;
        if (a.digest != b.digest) return a.digest < b.digest;
        return a.disambiguator < b.disambiguator;
    }

    std::string hex() const;
    std::uint64_t hash() const;
};

struct BallSignatureHash {
    std::size_t operator()(const BallSignature& s) const { return s.hash(); }
};

namespace detail {

/// Materialized ball in plain arrays, the unit of signature computation and
/// exact isomorphism checks.
struct CompactGraph {
    std::uint32_t n = 0;
    std::vector<std::vector<std::pair<std::uint32_t, std::int32_t>>> adj; // sorted by neighbor
    std::uint32_t root1 = 0;
    std::uint32_t root2 = UINT32_MAX; // UINT32_MAX if single-rooted

    std::uint64_t edge_count() const;
};

CompactGraph compact_ball(const RootedMultigraph& g, VertexId center, std::uint32_t radius,
                          std::optional<VertexId> second);

/// Iterated multiplicity-aware color refinement; returns the stable colors.
std::vector<std::uint64_t> refine_colors(const CompactGraph& g);

/// Exact rooted (bi-rooted) isomorphism between two refined balls.
bool isomorphic(const CompactGraph& a, const std::vector<std::uint64_t>& ca, const CompactGraph& b,
                const std::vector<std::uint64_t>& cb);

BallSignature signature_of_compact(const CompactGraph& g, std::uint32_t radius);

} // namespace detail

/// Canonical code of the radius-r ball around `center`; when `second_root`
/// is given, of the bi-rooted ball B(center,r) ∪ B(second,r) with the
/// ordered root pair.
BallSignature ball_signature(const RootedMultigraph& g, VertexId center, std::uint32_t radius,
                             std::optional<VertexId> second_root = std::nullopt);

/// Largest r <= r_max at which the rooted r-balls of the two graphs are
/// isomorphic. Radius-0 balls always match. The caller converts to the
/// local distance via 1/(1+r).
std::uint32_t local_matching_radius(const RootedMultigraph& g1, const RootedMultigraph& g2,
                                    std::uint32_t r_max);

} // namespace ergolab

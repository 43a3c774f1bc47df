#include "ergolab/walk.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace ergolab {

WalkDistribution WalkDistribution::point(VertexId v) {
    WalkDistribution d;
    d.time = 0;
    d.mass.resize(v + 1, 0.0);
    d.mass[v] = 1.0;
    d.support.push_back(v);
    return d;
}

double WalkDistribution::total() const {
    double t = 0;
    for (VertexId v : support) t += mass[v];
    return t;
}

VertexId walk_step(const RootedMultigraph& g, VertexId v, Rng& rng) {
    const auto nbrs = g.neighbors(v);
    std::int64_t deg = 0;
    for (const auto& e : nbrs) deg += e.multiplicity;
    std::int64_t pick = static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(deg)));
    for (const auto& e : nbrs) {
        pick -= e.multiplicity;
        if (pick < 0) return e.to;
    }
    return nbrs.back().to; // unreachable
}

WalkPath simulate_path(const RootedMultigraph& g, VertexId start, std::uint64_t n, Rng& rng) {
    WalkPath p;
    p.vertices.reserve(n + 1);
    p.vertices.push_back(start);
    VertexId x = start;
    for (std::uint64_t i = 0; i < n; ++i) {
        x = walk_step(g, x, rng);
        p.vertices.push_back(x);
    }
    return p;
}

WalkDistribution propagate_distribution(const RootedMultigraph& g, const WalkDistribution& dist,
                                        EdgeCache cache, double prune) {
    WalkDistribution next;
    next.time = dist.time + 1;
    next.pruned = dist.pruned;
    next.mass.resize(g.vertex_count(), 0.0);
    std::vector<Edge> scratch;
    for (VertexId v : dist.support) {
        const double p = dist.mass[v];
        if (p <= 0) continue;
        scratch.clear();
        g.for_each_edge(v, [&](VertexId u, std::int32_t m) { scratch.push_back(Edge{u, m}); }, cache);
        std::int64_t deg = 0;
        for (const auto& e : scratch) deg += e.multiplicity;
        const double inv = p / static_cast<double>(deg);
        for (const auto& e : scratch) {
            if (e.to >= next.mass.size())
                next.mass.resize(std::max<std::size_t>(e.to + 1, next.mass.size() + next.mass.size() / 2), 0.0);
            next.mass[e.to] += inv * e.multiplicity;
        }
    }
    next.support.reserve(dist.support.size() * 2);
    for (VertexId v = 0; v < next.mass.size(); ++v) {
        if (next.mass[v] <= 0) continue;
        if (next.mass[v] < prune) {
            next.pruned += next.mass[v];
            next.mass[v] = 0;
            continue;
        }
        next.support.push_back(v);
    }
    return next;
}

double marginal_entropy(const WalkDistribution& dist) {
    double h = 0;
    for (VertexId v : dist.support) {
        const double p = dist.mass[v];
        if (p > 0) h -= p * std::log(p);
    }
    return h;
}

double step_entropy(const RootedMultigraph& g, VertexId v) {
    std::vector<Edge> scratch;
    g.for_each_edge(v, [&](VertexId u, std::int32_t m) { scratch.push_back(Edge{u, m}); });
    std::int64_t deg = 0;
    for (const auto& e : scratch) deg += e.multiplicity;
    double h = 0;
    for (const auto& e : scratch) {
        const double q = static_cast<double>(e.multiplicity) / static_cast<double>(deg);
        h -= q * std::log(q);
    }
    return h;
}

double joint_entropy(const RootedMultigraph& g, VertexId root, std::uint64_t a, std::uint64_t b) {
    if (a > b) throw std::invalid_argument("joint_entropy requires a <= b");
    WalkDistribution dist = WalkDistribution::point(root);
    for (std::uint64_t i = 0; i < a; ++i) dist = propagate_distribution(g, dist);
    double h = marginal_entropy(dist);
    for (std::uint64_t i = a; i < b; ++i) {
        for (VertexId v : dist.support) h += dist.mass[v] * step_entropy(g, v);
        dist = propagate_distribution(g, dist);
    }
    return h;
}

double conditional_path_entropy(const RootedMultigraph& g, VertexId root, std::uint64_t k, std::uint64_t n) {
    if (k < 1 || k > n) throw std::invalid_argument("need 1 <= k <= n");
    // enumerate all length-k paths with their probabilities
    struct PathState {
        VertexId end;
        double prob;
    };
    std::vector<PathState> paths{{root, 1.0}};
    for (std::uint64_t i = 0; i < k; ++i) {
        std::vector<PathState> next;
        next.reserve(paths.size() * 4);
        for (const auto& ps : paths) {
            const auto nbrs = g.neighbors(ps.end);
            std::int64_t deg = 0;
            for (const auto& e : nbrs) deg += e.multiplicity;
            for (const auto& e : nbrs)
                next.push_back({e.to, ps.prob * static_cast<double>(e.multiplicity) / static_cast<double>(deg)});
        }
        paths = std::move(next);
    }
    // exact law of X_n given X_k = x, memoized per distinct endpoint
    std::unordered_map<VertexId, WalkDistribution> tail;
    for (const auto& ps : paths) {
        if (tail.count(ps.end)) continue;
        WalkDistribution d = WalkDistribution::point(ps.end);
        for (std::uint64_t i = k; i < n; ++i) d = propagate_distribution(g, d, EdgeCache::Store, 0.0);
        tail.emplace(ps.end, std::move(d));
    }
    double joint = 0; // H(X_1..X_k, X_n)
    for (const auto& ps : paths) {
        const auto& d = tail.at(ps.end);
        for (VertexId x : d.support) {
            const double p = ps.prob * d.mass[x];
            if (p > 0) joint -= p * std::log(p);
        }
    }
    WalkDistribution dn = WalkDistribution::point(root);
    for (std::uint64_t i = 0; i < n; ++i) dn = propagate_distribution(g, dn, EdgeCache::Store, 0.0);
    return joint - marginal_entropy(dn);
}

VaropoulosCarneReport varopoulos_carne_check(const RootedMultigraph& g, VertexId root, std::uint64_t n,
                                             double degree_bound, bool all_times) {
    VaropoulosCarneReport rep;
    rep.n = n;
    rep.degree_bound = degree_bound;

    const bool lazy = g.is_lazy();
    const EdgeCache cache = lazy ? EdgeCache::NoStore : EdgeCache::Store;
    const bool have_hint =
        lazy && g.oracle()->distance(g.key_bytes(root), g.key_bytes(root)).has_value();
    std::vector<std::uint32_t> bfs_dist;
    if (!have_hint) {
        const auto verts = g.ball_vertices(root, static_cast<std::uint32_t>(n));
        bfs_dist.assign(g.vertex_count(), UINT32_MAX);
        for (const auto& [v, d] : verts) bfs_dist[v] = d;
    }
    const double front = 2.0 * std::sqrt(degree_bound);
    auto check_time = [&](const WalkDistribution& dist) {
        const double t = static_cast<double>(dist.time);
        for (VertexId x : dist.support) {
            const double p = dist.mass[x];
            if (p <= 0) continue;
            const std::uint64_t d = have_hint ? g.distance(root, x) : bfs_dist[x];
            const double bound =
                front * std::exp(-static_cast<double>(d) * static_cast<double>(d) / (2.0 * t));
            rep.max_ratio = std::max(rep.max_ratio, p / bound);
            ++rep.atoms_checked;
        }
    };

    WalkDistribution dist = WalkDistribution::point(root);
    std::vector<Edge> scratch;
    for (std::uint64_t i = 0; i < n; ++i) {
        // one pass per support vertex: degree check and mass distribution
        WalkDistribution next;
        next.time = dist.time + 1;
        next.mass.resize(g.vertex_count(), 0.0);
        for (VertexId v : dist.support) {
            const double p = dist.mass[v];
            scratch.clear();
            g.for_each_edge(v, [&](VertexId u, std::int32_t m) { scratch.push_back(Edge{u, m}); }, cache);
            std::int64_t deg = 0;
            for (const auto& e : scratch) deg += e.multiplicity;
            if (static_cast<double>(deg) > degree_bound)
                throw DegreeBoundViolation("vertex degree " + std::to_string(deg) + " exceeds bound " +
                                           std::to_string(degree_bound));
            const double inv = p / static_cast<double>(deg);
            for (const auto& e : scratch) {
                if (e.to >= next.mass.size())
                    next.mass.resize(std::max<std::size_t>(e.to + 1, next.mass.size() + next.mass.size() / 2),
                                     0.0);
                next.mass[e.to] += inv * e.multiplicity;
            }
        }
        next.support.reserve(dist.support.size() * 2);
        for (VertexId v = 0; v < next.mass.size(); ++v)
            if (next.mass[v] > 0) next.support.push_back(v);
        dist = std::move(next);
        if (all_times || i + 1 == n) check_time(dist);
    }
    rep.pass = rep.max_ratio <= 1.0;
    return rep;
}

double spine_resistance(std::uint64_t k_from, std::uint64_t k_to) {
    if (k_from >= k_to) throw std::invalid_argument("need k_from < k_to");
    double r = 0;
    for (std::uint64_t k = k_to; k > k_from; --k) r += 1.0 / (static_cast<double>(k) * static_cast<double>(k));
    return r;
}

} // namespace ergolab

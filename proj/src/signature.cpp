#include "ergolab/signature.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <mutex>
#include <unordered_map>

#include "ergolab/rng.hpp"

namespace ergolab {

namespace {

inline std::uint64_t combine(std::uint64_t h, std::uint64_t x) {
    return mix64(h ^ (x + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2)));
}

} // namespace

std::string BallSignature::hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(36);
    auto emit = [&](std::uint64_t x) {
        for (int i = 15; i >= 0; --i) out.push_back(digits[(x >> (4 * i)) & 15]);
    };
    emit(digest[0]);
    emit(digest[1]);
    out.push_back(':');
    out += std::to_string(disambiguator);
    return out;
}

std::uint64_t BallSignature::hash() const {
    std::uint64_t h = combine(digest[0], digest[1]);
    h = combine(h, (static_cast<std::uint64_t>(radius) << 2) | (bi_rooted ? 2 : 0));
    return combine(h, disambiguator);
}

namespace detail {

std::uint64_t CompactGraph::edge_count() const {
    std::uint64_t m = 0;
    for (const auto& a : adj) m += a.size();
    return m / 2;
}

CompactGraph compact_ball(const RootedMultigraph& g, VertexId center, std::uint32_t radius,
                          std::optional<VertexId> second) {
    std::vector<std::pair<VertexId, std::uint32_t>> verts = g.ball_vertices(center, radius);
    if (second && *second != center) {
        // union with the ball around the second root
        std::unordered_map<VertexId, std::uint32_t> seen;
        for (const auto& [v, d] : verts) seen.emplace(v, d);
        for (const auto& [v, d] : g.ball_vertices(*second, radius)) {
            (void)d;
            if (!seen.count(v)) {
                seen.emplace(v, 0);
                verts.emplace_back(v, 0);
            }
        }
    }
    std::unordered_map<VertexId, std::uint32_t> index;
    index.reserve(verts.size() * 2);
    for (std::uint32_t i = 0; i < verts.size(); ++i) index.emplace(verts[i].first, i);

    CompactGraph cg;
    cg.n = static_cast<std::uint32_t>(verts.size());
    cg.adj.resize(cg.n);
    cg.root1 = 0; // BFS order starts at center
    if (second) cg.root2 = index.at(*second);
    for (std::uint32_t i = 0; i < cg.n; ++i) {
        g.for_each_edge(verts[i].first, [&](VertexId y, std::int32_t m) {
            auto it = index.find(y);
            if (it == index.end()) return;
            cg.adj[i].emplace_back(it->second, m);
        });
        std::sort(cg.adj[i].begin(), cg.adj[i].end());
    }
    return cg;
}

std::vector<std::uint64_t> refine_colors(const CompactGraph& g) {
    const std::uint32_t n = g.n;
    std::vector<std::uint64_t> color(n), next(n);
    for (std::uint32_t v = 0; v < n; ++v) {
        std::uint64_t h = 0x5175C0DE;
        h = combine(h, v == g.root1 ? 1 : (v == g.root2 ? 2 : 0));
        std::int64_t deg = 0;
        for (const auto& [u, m] : g.adj[v]) {
            (void)u;
            deg += m;
        }
        h = combine(h, static_cast<std::uint64_t>(deg));
        h = combine(h, g.adj[v].size());
        color[v] = h;
    }
    auto class_count = [&](const std::vector<std::uint64_t>& c) {
        std::vector<std::uint64_t> s(c);
        std::sort(s.begin(), s.end());
        return std::unique(s.begin(), s.end()) - s.begin();
    };
    std::int64_t classes = class_count(color);
    std::vector<std::pair<std::int32_t, std::uint64_t>> sig;
    for (std::uint32_t round = 0; round < n + 1; ++round) {
        for (std::uint32_t v = 0; v < n; ++v) {
            sig.clear();
            for (const auto& [u, m] : g.adj[v]) sig.emplace_back(m, color[u]);
            std::sort(sig.begin(), sig.end());
            std::uint64_t h = combine(0x0C01, color[v]);
            for (const auto& [m, c] : sig) h = combine(combine(h, static_cast<std::uint64_t>(m)), c);
            next[v] = h;
        }
        std::swap(color, next);
        const std::int64_t nc = class_count(color);
        if (nc == classes) break; // stable partition
        classes = nc;
    }
    return color;
}

bool isomorphic(const CompactGraph& a, const std::vector<std::uint64_t>& ca, const CompactGraph& b,
                const std::vector<std::uint64_t>& cb) {
    const std::uint32_t n = a.n;
    if (n != b.n) return false;
    if ((a.root2 == UINT32_MAX) != (b.root2 == UINT32_MAX)) return false;
    {
        std::vector<std::uint64_t> sa(ca), sb(cb);
        std::sort(sa.begin(), sa.end());
        std::sort(sb.begin(), sb.end());
        if (sa != sb) return false;
    }
    if (ca[a.root1] != cb[b.root1]) return false;
    if (a.root2 != UINT32_MAX && ca[a.root2] != cb[b.root2]) return false;

    // candidate vertices of b per color
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> by_color;
    for (std::uint32_t v = 0; v < n; ++v) by_color[cb[v]].push_back(v);

    // match in BFS order from the roots so each new vertex is pinned by at
    // least one matched neighbor (except component seeds)
    std::vector<std::uint32_t> order;
    order.reserve(n);
    {
        std::vector<char> seen(n, 0);
        std::vector<std::uint32_t> queue;
        auto bfs_from = [&](std::uint32_t s) {
            if (seen[s]) return;
            seen[s] = 1;
            queue.push_back(s);
            std::size_t head = order.size();
            order.push_back(s);
            while (head < order.size()) {
                const std::uint32_t x = order[head++];
                for (const auto& [y, m] : a.adj[x]) {
                    (void)m;
                    if (!seen[y]) {
                        seen[y] = 1;
                        order.push_back(y);
                    }
                }
            }
        };
        bfs_from(a.root1);
        if (a.root2 != UINT32_MAX) bfs_from(a.root2);
        for (std::uint32_t v = 0; v < n; ++v) bfs_from(v);
    }

    std::vector<std::uint32_t> match(n, UINT32_MAX), rmatch(n, UINT32_MAX);

    auto consistent = [&](std::uint32_t va, std::uint32_t vb) {
        if (ca[va] != cb[vb]) return false;
        if (va == a.root1 && vb != b.root1) return false;
        if (vb == b.root1 && va != a.root1) return false;
        if (a.root2 != UINT32_MAX) {
            if (va == a.root2 && vb != b.root2) return false;
            if (vb == b.root2 && va != a.root2) return false;
        }
        // edges of va into the matched set must map exactly, and vb must not
        // have extra edges into the matched image
        std::uint32_t matched_a = 0;
        for (const auto& [u, m] : a.adj[va]) {
            if (match[u] == UINT32_MAX) continue;
            ++matched_a;
            const auto& row = b.adj[vb];
            auto it = std::lower_bound(row.begin(), row.end(), std::make_pair(match[u], INT32_MIN));
            if (it == row.end() || it->first != match[u] || it->second != m) return false;
        }
        std::uint32_t matched_b = 0;
        for (const auto& [u, m] : b.adj[vb]) {
            (void)m;
            if (rmatch[u] != UINT32_MAX) ++matched_b;
        }
        return matched_a == matched_b;
    };

    // depth-first search over the order with backtracking
    struct Frame {
        std::uint32_t va;
        const std::vector<std::uint32_t>* cands;
        std::size_t next;
    };
    std::vector<Frame> stack;
    stack.push_back({order[0], &by_color[ca[order[0]]], 0});
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (match[f.va] != UINT32_MAX) {
            rmatch[match[f.va]] = UINT32_MAX;
            match[f.va] = UINT32_MAX;
        }
        bool advanced = false;
        while (f.next < f.cands->size()) {
            const std::uint32_t vb = (*f.cands)[f.next++];
            if (rmatch[vb] != UINT32_MAX) continue;
            if (!consistent(f.va, vb)) continue;
            match[f.va] = vb;
            rmatch[vb] = f.va;
            advanced = true;
            break;
        }
        if (!advanced) {
            stack.pop_back();
            continue;
        }
        if (stack.size() == n) return true;
        const std::uint32_t va = order[stack.size()];
        stack.push_back({va, &by_color[ca[va]], 0});
    }
    return false;
}

namespace {

std::array<std::uint64_t, 2> invariant_digest(const CompactGraph& g, const std::vector<std::uint64_t>& color,
                                              std::uint32_t radius) {
    std::vector<std::uint64_t> sorted(color);
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::array<std::uint64_t, 3>> edges;
    for (std::uint32_t v = 0; v < g.n; ++v) {
        for (const auto& [u, m] : g.adj[v]) {
            if (u < v) continue;
            edges.push_back({std::min(color[v], color[u]), std::max(color[v], color[u]),
                             static_cast<std::uint64_t>(m)});
        }
    }
    std::sort(edges.begin(), edges.end());
    std::array<std::uint64_t, 2> out;
    for (int half = 0; half < 2; ++half) {
        std::uint64_t h = half ? 0xE2077A6Bull : 0x51677A77ull;
        h = combine(h, g.n);
        h = combine(h, radius);
        h = combine(h, g.root2 == UINT32_MAX ? 0 : 1);
        h = combine(h, color[g.root1]);
        if (g.root2 != UINT32_MAX) h = combine(h, color[g.root2]);
        for (std::uint64_t c : sorted) h = combine(h, c);
        for (const auto& e : edges) h = combine(combine(combine(h, e[0]), e[1]), e[2]);
        out[half] = h;
    }
    return out;
}

/// Registry bucket: representatives sharing one invariant digest,
/// disambiguated by exact isomorphism.
struct Bucket {
    std::vector<std::pair<CompactGraph, std::vector<std::uint64_t>>> reps;
};

struct Registry {
    std::mutex mu;
    std::map<std::array<std::uint64_t, 2>, Bucket> buckets;

    static Registry& instance() {
        static Registry r;
        return r;
    }
};

} // namespace

BallSignature signature_of_compact(const CompactGraph& g, std::uint32_t radius) {
    const auto color = refine_colors(g);
    BallSignature sig;
    sig.radius = radius;
    sig.bi_rooted = g.root2 != UINT32_MAX;
    sig.digest = invariant_digest(g, color, radius);

    Registry& reg = Registry::instance();
    std::lock_guard lk(reg.mu);
    Bucket& bucket = reg.buckets[sig.digest];
    for (std::uint32_t i = 0; i < bucket.reps.size(); ++i) {
        if (isomorphic(g, color, bucket.reps[i].first, bucket.reps[i].second)) {
            sig.disambiguator = i;
            return sig;
        }
    }
    bucket.reps.emplace_back(g, color);
    sig.disambiguator = static_cast<std::uint32_t>(bucket.reps.size() - 1);
    return sig;
}

} // namespace detail

BallSignature ball_signature(const RootedMultigraph& g, VertexId center, std::uint32_t radius,
                             std::optional<VertexId> second_root) {
    const auto cg = detail::compact_ball(g, center, radius, second_root);
    return detail::signature_of_compact(cg, radius);
}

std::uint32_t local_matching_radius(const RootedMultigraph& g1, const RootedMultigraph& g2,
                                    std::uint32_t r_max) {
    std::uint32_t best = 0;
    for (std::uint32_t r = 1; r <= r_max; ++r) {
        if (!(ball_signature(g1, g1.root(), r) == ball_signature(g2, g2.root(), r))) break;
        best = r;
    }
    return best;
}

} // namespace ergolab

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <sstream>

#include "ergolab/generators.hpp"
#include "ergolab/graph.hpp"
#include "ergolab/rng.hpp"
#include "ergolab/signature.hpp"

using namespace ergolab;

namespace {

// Test-only oracle: exhaustive permutation search for a rooted isomorphism,
// independent of the refinement machinery.
struct SmallGraph {
    std::uint32_t n;
    std::uint32_t root;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::int32_t> edges; // u < v

    std::int32_t mult(std::uint32_t a, std::uint32_t b) const {
        auto it = edges.find({std::min(a, b), std::max(a, b)});
        return it == edges.end() ? 0 : it->second;
    }
};

bool brute_force_rooted_iso(const SmallGraph& a, const SmallGraph& b) {
    if (a.n != b.n || a.edges.size() != b.edges.size()) return false;
    std::vector<std::uint32_t> perm(a.n, UINT32_MAX);
    std::vector<bool> used(b.n, false);
    std::function<bool(std::uint32_t)> place = [&](std::uint32_t v) -> bool {
        if (v == a.n) return true;
        for (std::uint32_t w = 0; w < b.n; ++w) {
            if (used[w]) continue;
            if ((v == a.root) != (w == b.root)) continue;
            bool ok = true;
            for (std::uint32_t u = 0; u < v; ++u) {
                if (a.mult(v, u) != b.mult(w, perm[u])) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            perm[v] = w;
            used[w] = true;
            if (place(v + 1)) return true;
            used[w] = false;
            perm[v] = UINT32_MAX;
        }
        return false;
    };
    return place(0);
}

SmallGraph random_small_multigraph(Rng& rng) {
    SmallGraph g;
    g.n = 2 + static_cast<std::uint32_t>(rng.uniform_below(6));
    // random spanning tree, then extra edges
    for (std::uint32_t v = 1; v < g.n; ++v) {
        const auto u = static_cast<std::uint32_t>(rng.uniform_below(v));
        g.edges[{u, v}] = 1 + static_cast<std::int32_t>(rng.uniform_below(3));
    }
    const auto extra = rng.uniform_below(g.n);
    for (std::uint64_t i = 0; i < extra; ++i) {
        const auto u = static_cast<std::uint32_t>(rng.uniform_below(g.n));
        const auto v = static_cast<std::uint32_t>(rng.uniform_below(g.n));
        if (u == v) continue;
        g.edges[{std::min(u, v), std::max(u, v)}] = 1 + static_cast<std::int32_t>(rng.uniform_below(3));
    }
    g.root = static_cast<std::uint32_t>(rng.uniform_below(g.n));
    return g;
}

SmallGraph relabel(const SmallGraph& g, Rng& rng) {
    std::vector<std::uint32_t> perm(g.n);
    for (std::uint32_t i = 0; i < g.n; ++i) perm[i] = i;
    for (std::uint32_t i = g.n; i > 1; --i) std::swap(perm[i - 1], perm[rng.uniform_below(i)]);
    SmallGraph out;
    out.n = g.n;
    out.root = perm[g.root];
    for (const auto& [e, m] : g.edges) {
        const auto u = perm[e.first], v = perm[e.second];
        out.edges[{std::min(u, v), std::max(u, v)}] = m;
    }
    return out;
}

RootedMultigraph to_graph(const SmallGraph& g) {
    RootedMultigraph::Builder b;
    for (std::uint32_t i = 0; i < g.n; ++i) b.add_vertex();
    for (const auto& [e, m] : g.edges) b.add_edge(e.first, e.second, m);
    return b.build(g.root);
}

} // namespace

TEST_CASE("builder validates the multigraph invariants") {
    RootedMultigraph::Builder b;
    const auto u = b.add_vertex();
    const auto v = b.add_vertex();
    CHECK_THROWS_AS(b.add_edge(u, u, 1), std::invalid_argument);
    CHECK_THROWS_AS(b.add_edge(u, v, 0), std::invalid_argument);
    b.add_edge(u, v, 2);
    const auto g = b.build(u);
    CHECK(g.degree(u) == 2);
    CHECK(g.degree(v) == 2);
    CHECK(g.vertex_count() == 2);

    RootedMultigraph::Builder disconnected;
    disconnected.add_vertex();
    disconnected.add_vertex();
    disconnected.add_vertex();
    disconnected.add_edge(0, 1, 1);
    CHECK_THROWS_AS(disconnected.build(0), std::invalid_argument);
}

TEST_CASE("edge list round trip") {
    RootedMultigraph::Builder b;
    for (int i = 0; i < 4; ++i) b.add_vertex();
    b.add_edge(0, 1, 1);
    b.add_edge(1, 2, 3);
    b.add_edge(2, 3, 1);
    b.add_edge(3, 0, 2);
    const auto g = b.build(1);
    std::stringstream ss;
    g.write_edge_list(ss);
    const auto h = RootedMultigraph::read_edge_list(ss);
    CHECK(h.vertex_count() == 4);
    CHECK(ball_signature(g, g.root(), 3) == ball_signature(h, h.root(), 3));
}

TEST_CASE("balls: radius 0, Z^2 diamond, grandfather sphere") {
    const auto z2 = lattice(2);
    CHECK(z2.ball(z2.root(), 0).vertex_count() == 1);
    CHECK(z2.ball(z2.root(), 1).vertex_count() == 5);
    CHECK(z2.ball(z2.root(), 2).vertex_count() == 13);

    const auto gf = grandfather_graph();
    const auto b1 = gf.ball(gf.root(), 1);
    CHECK(b1.vertex_count() == 9);
    CHECK(gf.degree(gf.root()) == 8);
}

TEST_CASE("grandfather neighbor level offsets") {
    const auto gf = grandfather_graph();
    const auto root_level = *gf.vertex_label(gf.root());
    std::multiset<std::int64_t> offsets;
    for (const auto& e : gf.neighbors(gf.root())) offsets.insert(*gf.vertex_label(e.to) - root_level);
    CHECK(offsets == std::multiset<std::int64_t>{-2, -2, -2, -2, -1, -1, +1, +2});
}

TEST_CASE("graph distance: exact values and hint vs BFS") {
    const auto z2 = lattice(2);
    const VertexId origin = z2.root();
    CHECK(z2.distance(origin, origin) == 0);
    // (0,0) to (2,3) via repeated stepping
    VertexId target = origin;
    auto step_to = [&](int dim, int dir) {
        for (const auto& e : z2.neighbors(target)) {
            // decode via oracle describe: simpler to walk the lattice by construction order
            (void)dim;
            (void)dir;
            (void)e;
        }
    };
    (void)step_to;
    // reach (2,3) by BFS search over descriptions
    const auto ball = z2.ball_vertices(origin, 5);
    bool found = false;
    for (const auto& [v, d] : ball) {
        if (z2.describe(v) == "(2,3)") {
            CHECK(d == 5);
            CHECK(z2.distance(origin, v) == 5);
            found = true;
        }
    }
    CHECK(found);

    const auto gf = grandfather_graph();
    // grandfather of the root sits at level +2 and distance 1
    for (const auto& e : gf.neighbors(gf.root())) {
        if (*gf.vertex_label(e.to) - *gf.vertex_label(gf.root()) == 2) CHECK(gf.distance(gf.root(), e.to) == 1);
    }
    // closed-form distance agrees with BFS on a sample of near pairs
    Rng rng(7);
    const auto verts = gf.ball_vertices(gf.root(), 3);
    for (int trial = 0; trial < 40; ++trial) {
        const auto [u, du] = verts[rng.uniform_below(verts.size())];
        const auto [v, dv] = verts[rng.uniform_below(verts.size())];
        (void)du;
        (void)dv;
        // BFS reference: run a bounded BFS from u
        std::uint64_t bfs = UINT64_MAX;
        for (const auto& [w, d] : gf.ball_vertices(u, 6)) {
            if (w == v) {
                bfs = d;
                break;
            }
        }
        REQUIRE(bfs != UINT64_MAX);
        CHECK(gf.distance(u, v) == bfs);
    }
}

TEST_CASE("canopy and regular tree distance hints agree with BFS") {
    for (bool reinforced : {false, true}) {
        const auto t = canopy_tree_infinite(64, 2, reinforced);
        Rng rng(11 + (reinforced ? 1 : 0));
        const auto verts = t.ball_vertices(t.root(), 4);
        for (int trial = 0; trial < 30; ++trial) {
            const auto u = verts[rng.uniform_below(verts.size())].first;
            const auto v = verts[rng.uniform_below(verts.size())].first;
            std::uint64_t bfs = UINT64_MAX;
            for (const auto& [w, d] : t.ball_vertices(u, 8)) {
                if (w == v) {
                    bfs = d;
                    break;
                }
            }
            REQUIRE(bfs != UINT64_MAX);
            CHECK(t.distance(u, v) == bfs);
        }
    }
    const auto tree = regular_tree(3);
    Rng rng(13);
    const auto verts = tree.ball_vertices(tree.root(), 4);
    for (int trial = 0; trial < 30; ++trial) {
        const auto u = verts[rng.uniform_below(verts.size())].first;
        const auto v = verts[rng.uniform_below(verts.size())].first;
        std::uint64_t bfs = UINT64_MAX;
        for (const auto& [w, d] : tree.ball_vertices(u, 8)) {
            if (w == v) {
                bfs = d;
                break;
            }
        }
        CHECK(tree.distance(u, v) == bfs);
    }
}

TEST_CASE("signature soundness against brute-force permutation search") {
    Rng rng(101);
    int iso_pairs = 0, noniso_pairs = 0;
    for (int trial = 0; trial < 150; ++trial) {
        const SmallGraph a = random_small_multigraph(rng);
        const SmallGraph b = trial % 2 == 0 ? relabel(a, rng) : random_small_multigraph(rng);
        const bool oracle = brute_force_rooted_iso(a, b);
        const auto ga = to_graph(a);
        const auto gb = to_graph(b);
        // radius large enough to cover the whole graph
        const bool codes_equal = ball_signature(ga, ga.root(), 8) == ball_signature(gb, gb.root(), 8);
        CHECK(codes_equal == oracle);
        oracle ? ++iso_pairs : ++noniso_pairs;
    }
    CHECK(iso_pairs > 20);
    CHECK(noniso_pairs > 20);
}

TEST_CASE("transitive graphs have a single signature class") {
    const auto gf = grandfather_graph();
    const auto sig_root = ball_signature(gf, gf.root(), 2);
    for (const auto& [v, d] : gf.ball_vertices(gf.root(), 2)) {
        (void)d;
        CHECK(ball_signature(gf, v, 2) == sig_root);
    }
    const auto z1 = lattice(1);
    const auto s0 = ball_signature(z1, z1.root(), 3);
    for (const auto& e : z1.neighbors(z1.root())) CHECK(ball_signature(z1, e.to, 3) == s0);
}

TEST_CASE("signatures distinguish rooted structure") {
    const auto t3 = canopy_tree(3);
    // top vertex (depth 3) vs a leaf (depth 0)
    VertexId leaf = 0;
    for (VertexId v = 0; v < t3.vertex_count(); ++v)
        if (*t3.vertex_label(v) == 0) leaf = v;
    CHECK_FALSE(ball_signature(t3, t3.root(), 1) == ball_signature(t3, leaf, 1));

    const auto gf = grandfather_graph();
    const auto tree = regular_tree(3);
    CHECK_FALSE(ball_signature(gf, gf.root(), 1) == ball_signature(tree, tree.root(), 1));
}

TEST_CASE("local matching radius") {
    const auto gf = grandfather_graph();
    const auto gf2 = grandfather_graph();
    CHECK(local_matching_radius(gf, gf2, 4) == 4);
    const auto z2 = lattice(2);
    CHECK(local_matching_radius(gf, z2, 4) == 0);

    // T_7 rooted at a depth-2 vertex vs T_inf rooted at depth 2
    const auto t7 = canopy_tree(7);
    VertexId depth2 = 0;
    bool have = false;
    for (VertexId v = 0; v < t7.vertex_count() && !have; ++v) {
        if (*t7.vertex_label(v) == 2) {
            depth2 = v;
            have = true;
        }
    }
    REQUIRE(have);
    const auto tinf = canopy_tree_infinite(64, 2, false);
    CHECK(local_matching_radius(t7.rerooted(depth2), tinf, 6) >= 4);
}

TEST_CASE("monotone consistency: the r-ball determines smaller signatures") {
    const auto gf = grandfather_graph();
    const auto ball3 = gf.ball(gf.root(), 3);
    for (std::uint32_t r = 0; r <= 2; ++r)
        CHECK(ball_signature(ball3, ball3.root(), r) == ball_signature(gf, gf.root(), r));
}

TEST_CASE("lazy expansion is deterministic") {
    const auto ens = augmented_galton_watson({0.1, 0.4, 0.5});
    const auto g1 = ens.sample(42, 5);
    const auto g2 = ens.sample(42, 5);
    for (std::uint32_t r = 1; r <= 5; ++r) CHECK(ball_signature(g1, g1.root(), r) == ball_signature(g2, g2.root(), r));
    const auto g3 = ens.sample(43, 5);
    bool differs = false;
    for (std::uint32_t r = 1; r <= 5; ++r)
        if (!(ball_signature(g1, g1.root(), r) == ball_signature(g3, g3.root(), r))) differs = true;
    CHECK(differs);
}

TEST_CASE("horizon exceeded surfaces as the typed error") {
    const auto t = canopy_tree_infinite(4, 0, false);
    CHECK_THROWS_AS((void)t.ball_vertices(t.root(), 6), HorizonExceeded);
}

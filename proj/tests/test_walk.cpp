#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "ergolab/generators.hpp"
#include "ergolab/walk.hpp"

using namespace ergolab;

namespace {

RootedMultigraph path3() {
    RootedMultigraph::Builder b;
    for (int i = 0; i < 3; ++i) b.add_vertex();
    b.add_edge(0, 1, 1);
    b.add_edge(1, 2, 1);
    return b.build(0);
}

// Test-only oracle: H_a^b by explicit path enumeration.
double path_sum_entropy(const RootedMultigraph& g, VertexId root, std::uint64_t a, std::uint64_t b) {
    struct P {
        VertexId end;
        double prob;
    };
    std::vector<P> paths{{root, 1.0}};
    // prefix to time a collapses onto the marginal of X_a
    WalkDistribution start = WalkDistribution::point(root);
    for (std::uint64_t i = 0; i < a; ++i) start = propagate_distribution(g, start, EdgeCache::Store, 0.0);
    paths.clear();
    for (VertexId v : start.support) paths.push_back({v, start.mass[v]});
    // then full path enumeration between times a and b
    std::map<std::vector<VertexId>, double> joint;
    struct Frame {
        std::vector<VertexId> trace;
        double prob;
    };
    std::vector<Frame> stack;
    for (const auto& p : paths) stack.push_back({{p.end}, p.prob});
    double h = 0;
    while (!stack.empty()) {
        Frame f = stack.back();
        stack.pop_back();
        if (f.trace.size() == b - a + 1) {
            h -= f.prob * std::log(f.prob);
            continue;
        }
        const auto nbrs = g.neighbors(f.trace.back());
        std::int64_t deg = 0;
        for (const auto& e : nbrs) deg += e.multiplicity;
        for (const auto& e : nbrs) {
            Frame next = f;
            next.trace.push_back(e.to);
            next.prob = f.prob * static_cast<double>(e.multiplicity) / static_cast<double>(deg);
            stack.push_back(std::move(next));
        }
    }
    return h;
}

} // namespace

TEST_CASE("walk step respects multiplicities") {
    // single neighbor: always taken
    const auto p3 = path3();
    Rng rng(1);
    for (int i = 0; i < 20; ++i) CHECK(walk_step(p3, 0, rng) == 1);

    // T^R depth-2 vertex: parent bundle 9 against two child bundles of 4
    const auto tr = canopy_tree_infinite(64, 2, true);
    const auto nbrs = tr.neighbors(tr.root());
    REQUIRE(nbrs.size() == 3);
    std::int64_t deg = 0;
    for (const auto& e : nbrs) deg += e.multiplicity;
    CHECK(deg == 17);
    std::uint64_t up = 0;
    const std::uint64_t N = 40000;
    Rng rng2(2);
    for (std::uint64_t i = 0; i < N; ++i) {
        const VertexId to = walk_step(tr, tr.root(), rng2);
        if (*tr.vertex_label(to) == 3) ++up;
    }
    const double p = 9.0 / 17.0;
    CHECK(std::abs(static_cast<double>(up) / N - p) < 4.0 * std::sqrt(p * (1 - p) / N));

    // grandfather: step-type frequencies (2,1,4,1)/8 by level offset
    const auto gf = grandfather_graph();
    std::map<std::int64_t, std::uint64_t> offsets;
    Rng rng3(3);
    VertexId x = gf.root();
    const std::uint64_t steps = 40000;
    for (std::uint64_t i = 0; i < steps; ++i) {
        const auto lvl = *gf.vertex_label(x);
        x = walk_step(gf, x, rng3);
        ++offsets[*gf.vertex_label(x) - lvl];
    }
    const std::map<std::int64_t, double> expect{{-1, 0.25}, {+1, 0.125}, {-2, 0.5}, {+2, 0.125}};
    for (const auto& [off, p_exp] : expect) {
        const double phat = static_cast<double>(offsets[off]) / steps;
        CHECK(std::abs(phat - p_exp) < 4.0 * std::sqrt(p_exp * (1 - p_exp) / steps));
    }
}

TEST_CASE("simulate_path basics") {
    const auto z1 = lattice(1);
    Rng rng(5);
    const auto p0 = simulate_path(z1, z1.root(), 0, rng);
    CHECK(p0.vertices == std::vector<VertexId>{z1.root()});

    // consecutive vertices adjacent
    const auto gf = grandfather_graph();
    const auto path = simulate_path(gf, gf.root(), 50, rng);
    for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i)
        CHECK(gf.distance(path.vertices[i], path.vertices[i + 1]) == 1);

    // Z^1: P(X_2 = 0) = 1/2
    std::uint64_t back = 0;
    const std::uint64_t N = 100000;
    for (std::uint64_t i = 0; i < N; ++i) {
        Rng r(derive_seed(11, i));
        const auto p = simulate_path(z1, z1.root(), 2, r);
        if (p.vertices.back() == z1.root()) ++back;
    }
    CHECK(std::abs(static_cast<double>(back) / N - 0.5) < 4.0 * std::sqrt(0.25 / N));
}

TEST_CASE("exact propagation: one step, conservation, return probability") {
    const auto z1 = lattice(1);
    auto d = propagate_distribution(z1, WalkDistribution::point(z1.root()));
    CHECK(d.support.size() == 2);
    for (VertexId v : d.support) CHECK(d.mass[v] == doctest::Approx(0.5));

    const auto gf = grandfather_graph();
    WalkDistribution dg = WalkDistribution::point(gf.root());
    dg = propagate_distribution(gf, dg, EdgeCache::NoStore, 0.0);
    dg = propagate_distribution(gf, dg, EdgeCache::NoStore, 0.0);
    CHECK(dg.mass_of(gf.root()) == doctest::Approx(1.0 / 8.0).epsilon(1e-12));
    CHECK(dg.total() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("propagation matches sampling frequencies") {
    const auto gf = grandfather_graph();
    WalkDistribution d = WalkDistribution::point(gf.root());
    for (int i = 0; i < 4; ++i) d = propagate_distribution(gf, d, EdgeCache::Store, 0.0);
    std::unordered_map<VertexId, std::uint64_t> counts;
    const std::uint64_t N = 100000;
    for (std::uint64_t i = 0; i < N; ++i) {
        Rng r(derive_seed(23, i));
        VertexId x = gf.root();
        for (int t = 0; t < 4; ++t) x = walk_step(gf, x, r);
        ++counts[x];
    }
    // the five most likely atoms within 4 sigma
    std::vector<VertexId> top(d.support.begin(), d.support.end());
    std::sort(top.begin(), top.end(), [&](VertexId a, VertexId b) { return d.mass[a] > d.mass[b]; });
    for (std::size_t i = 0; i < 5 && i < top.size(); ++i) {
        const double p = d.mass[top[i]];
        const double phat = static_cast<double>(counts[top[i]]) / N;
        CHECK(std::abs(phat - p) < 4.0 * std::sqrt(p * (1 - p) / N));
    }
}

TEST_CASE("entropies: marginal, step, and the chain rule against path enumeration") {
    // delta distribution and uniform distribution
    WalkDistribution delta = WalkDistribution::point(0);
    CHECK(marginal_entropy(delta) == 0.0);
    WalkDistribution unif;
    unif.mass.assign(5, 0.2);
    for (VertexId v = 0; v < 5; ++v) unif.support.push_back(v);
    CHECK(marginal_entropy(unif) == doctest::Approx(std::log(5.0)).epsilon(1e-12));

    // step entropy: simple degree-d vertex, and a (1,3) multiplicity split
    const auto gf = grandfather_graph();
    CHECK(step_entropy(gf, gf.root()) == doctest::Approx(std::log(8.0)).epsilon(1e-12));
    RootedMultigraph::Builder b;
    for (int i = 0; i < 3; ++i) b.add_vertex();
    b.add_edge(0, 1, 1);
    b.add_edge(0, 2, 3);
    const auto m13 = b.build(0);
    const double expect = -(0.25 * std::log(0.25) + 0.75 * std::log(0.75));
    CHECK(step_entropy(m13, 0) == doctest::Approx(expect).epsilon(1e-12));

    // T^R depth-0 leaf: a single parallel-edge bundle
    const auto tr = canopy_tree_infinite(16, 0, true);
    CHECK(step_entropy(tr, tr.root()) == 0.0);

    // H_a^a equals the marginal entropy at time a
    WalkDistribution d = WalkDistribution::point(gf.root());
    for (int a = 0; a <= 3; ++a) {
        CHECK(joint_entropy(gf, gf.root(), a, a) == doctest::Approx(marginal_entropy(d)).epsilon(1e-10));
        d = propagate_distribution(gf, d, EdgeCache::Store, 0.0);
    }

    // chain rule equals the path-sum definition on small graphs
    const auto p3 = path3();
    for (std::uint64_t a = 0; a <= 2; ++a)
        for (std::uint64_t span = 0; span <= 3; ++span)
            CHECK(joint_entropy(p3, 0, a, a + span) ==
                  doctest::Approx(path_sum_entropy(p3, 0, a, a + span)).epsilon(1e-10));
    const auto tr3 = reinforce_edges(canopy_tree(3));
    for (std::uint64_t a = 0; a <= 1; ++a)
        for (std::uint64_t span = 0; span <= 2; ++span)
            CHECK(joint_entropy(tr3, tr3.root(), a, a + span) ==
                  doctest::Approx(path_sum_entropy(tr3, tr3.root(), a, a + span)).epsilon(1e-10));
}

TEST_CASE("entropy-volume inequality") {
    const auto gf = grandfather_graph();
    WalkDistribution d = WalkDistribution::point(gf.root());
    for (int n = 1; n <= 6; ++n) {
        d = propagate_distribution(gf, d, EdgeCache::Store, 0.0);
        CHECK(marginal_entropy(d) <= std::log(static_cast<double>(gf.ball_vertices(gf.root(), n).size())) + 1e-12);
    }
}

TEST_CASE("Varopoulos-Carne: trivial support bound, pass cases, degree violation") {
    const auto z2 = lattice(2);
    const auto rep = varopoulos_carne_check(z2, z2.root(), 8, 4.0, true);
    CHECK(rep.pass);
    CHECK(rep.max_ratio > 0);
    // support stays within the ball: every atom at distance <= n was checked
    CHECK(rep.atoms_checked > 0);

    const auto gf = grandfather_graph();
    CHECK_THROWS_AS((void)varopoulos_carne_check(gf, gf.root(), 3, 7.0), DegreeBoundViolation);
}

TEST_CASE("conditional path entropy sanity") {
    const auto gf = grandfather_graph();
    // H(X_1 | X_2) = 2 H_1 - H_2 on a transitive graph
    WalkDistribution d = WalkDistribution::point(gf.root());
    d = propagate_distribution(gf, d, EdgeCache::Store, 0.0);
    const double h1 = marginal_entropy(d);
    d = propagate_distribution(gf, d, EdgeCache::Store, 0.0);
    const double h2 = marginal_entropy(d);
    CHECK(conditional_path_entropy(gf, gf.root(), 1, 2) == doctest::Approx(2 * h1 - h2).epsilon(1e-10));
}

TEST_CASE("spine resistance") {
    const double basel = std::numbers::pi * std::numbers::pi / 6.0;
    CHECK(spine_resistance(0, 10) < basel);
    CHECK(spine_resistance(0, 1000000) < basel);
    CHECK(spine_resistance(1, 2) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(spine_resistance(1, 1000000) - spine_resistance(1, 1000) < 1e-3);
    CHECK_THROWS_AS((void)spine_resistance(5, 5), std::invalid_argument);
}

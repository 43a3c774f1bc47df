#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ergolab/generators.hpp"
#include "ergolab/stats.hpp"
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

} // namespace

TEST_CASE("entropy series: exact evaluation on deterministic ensembles") {
    const auto s = estimate_h_series(grandfather_ensemble(), 4, 1, 1);
    CHECK(s.exact);
    CHECK(s.h[0] == 0.0);
    CHECK(s.h[1] == doctest::Approx(std::log(8.0)).epsilon(1e-12));
    for (double se : s.se) CHECK(se == 0.0);
    // matches direct propagation
    const auto g = grandfather_graph();
    WalkDistribution d = WalkDistribution::point(g.root());
    for (int n = 1; n <= 4; ++n) {
        d = propagate_distribution(g, d, EdgeCache::Store, 0.0);
        CHECK(s.h[n] == doctest::Approx(marginal_entropy(d)).epsilon(1e-12));
    }
}

TEST_CASE("entropy series: Monte Carlo cross-check of h_1 on AGW") {
    const auto agw = augmented_galton_watson({0.0, 0.5, 0.5});
    const auto s = estimate_h_series(agw, 3, 4000, 7);
    // H_1 = log(deg(root)), root degree is 1 + offspring
    const double expect = 0.5 * std::log(2.0) + 0.5 * std::log(3.0);
    CHECK(std::abs(s.h[1] - expect) < 4.0 * s.se[1] + 1e-9);
    CHECK(s.h[0] == 0.0);
}

TEST_CASE("entropy rate: Z^2 is flat, increments decrease, h <= h_1") {
    const auto s = estimate_h_series(lattice_ensemble(2), 64, 1, 1);
    const auto rate = entropy_rate(s);
    CHECK(rate.monotone_ok);
    CHECK(rate.h.value < 0.05);
    CHECK(rate.h.value <= s.h[1]);
    CHECK(rate.tail_increment >= rate.h.value - 1e-12); // raw increment is upper-biased
    CHECK(rate.h_over_n >= rate.h.value - 1e-9);
}

TEST_CASE("entropy rate flags non-monotone increments") {
    EntropySeries s;
    s.n_max = 4;
    s.samples = 10;
    s.h = {0, 1.0, 1.2, 1.9, 2.0};
    s.se.assign(5, 0.0);
    s.inc = {1.0, 0.2, 0.7, 0.1};
    s.inc_se.assign(4, 0.0);
    CHECK_FALSE(entropy_rate(s).monotone_ok);
}

TEST_CASE("conditional entropy expectation: algebraic cases") {
    const auto s = estimate_h_series(grandfather_ensemble(), 6, 1, 1);
    // k = n: k h_1 - h_k >= 0 (conditioning reduces entropy)
    for (std::uint64_t k = 1; k <= 4; ++k)
        CHECK(conditional_entropy_expectation(s, k, k) >= -1e-12);
    // constant increments mean independence: the expression vanishes
    EntropySeries lin;
    lin.n_max = 6;
    lin.h.resize(7);
    for (int n = 0; n <= 6; ++n) lin.h[n] = 0.7 * n;
    lin.se.assign(7, 0.0);
    lin.inc.assign(6, 0.7);
    lin.inc_se.assign(6, 0.0);
    for (std::uint64_t k = 1; k <= 4; ++k)
        for (std::uint64_t n = k; n <= 6; ++n)
            CHECK(conditional_entropy_expectation(lin, k, n) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("speed on a finite graph tends to zero") {
    const auto tr5 = finite_graph_ensemble(reinforce_edges(canopy_tree(5)), Rooting::DegreeBiased);
    const auto s = speed_estimate(tr5, 400, 2000, 3);
    CHECK(s.value < 0.06); // D_n bounded by the diameter
}

TEST_CASE("growth estimates") {
    // 3-regular tree: v -> log 2
    const auto tree = growth_estimate(regular_tree_ensemble(3), 20, 1, 1);
    CHECK(tree.exact);
    CHECK(std::abs(tree.v.value - std::log(2.0)) < 0.02);
    // Z^2: polynomial growth
    const auto z2 = growth_estimate(lattice_ensemble(2), 64, 1, 1);
    CHECK(z2.v.value < 0.05);
    CHECK(z2.log_ball[1] == doctest::Approx(std::log(5.0)).epsilon(1e-12));
}

TEST_CASE("canopy growth via the closed-form ball sizes") {
    const auto t = growth_estimate(canopy_infinite_ensemble(300, 0, false), 100, 1, 1);
    CHECK(t.exact);
    CHECK(t.v.value < 0.05);
}

TEST_CASE("class distributions: transitive collapse and exact enumeration") {
    for (std::uint64_t t : {0ull, 1ull, 2ull}) {
        const auto d = class_distribution(grandfather_ensemble(), t, 2, 0, 1);
        CHECK(d.exact);
        CHECK(d.prob.size() == 1);
        CHECK(d.prob.begin()->second == doctest::Approx(1.0).epsilon(1e-12));
    }
    // uniform-rooted P3 at time 0: end class 2/3, center class 1/3
    const auto ens = finite_graph_ensemble(path3(), Rooting::Uniform);
    const auto d0 = class_distribution(ens, 0, 1, 0, 1);
    REQUIRE(d0.prob.size() == 2);
    std::vector<double> masses;
    for (const auto& [k, p] : d0.prob) masses.push_back(p);
    std::sort(masses.begin(), masses.end());
    CHECK(masses[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(masses[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    // bi-rooted variant sums to 1
    const auto db = class_distribution(ens, 0, 1, 0, 1, true);
    double total = 0;
    for (const auto& [k, p] : db.prob) total += p;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("stationarity: exact verdicts") {
    const auto p3 = path3();
    const auto uniform = stationarity_test(finite_graph_ensemble(p3, Rooting::Uniform), 1, 1, 0, 1);
    CHECK(uniform.exact);
    CHECK(uniform.tv == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK_FALSE(uniform.pass);

    const auto biased = stationarity_test(finite_graph_ensemble(p3, Rooting::DegreeBiased), 1, 1, 0, 1);
    CHECK(biased.exact);
    CHECK(biased.tv <= 1e-12);
    CHECK(biased.pass);
}

TEST_CASE("reversibility: the grandfather graph fails with TV 1/2") {
    const auto rep = reversibility_test(grandfather_ensemble(), 2, 0, 1);
    CHECK(rep.exact);
    CHECK(rep.tv == doctest::Approx(0.5).epsilon(1e-10));
    CHECK_FALSE(rep.pass);
}

TEST_CASE("mass transport: adjacency indicator gives the mean degree") {
    RootedMultigraph::Builder c8;
    for (int i = 0; i < 8; ++i) c8.add_vertex();
    for (int i = 0; i < 8; ++i) c8.add_edge(i, (i + 1) % 8, 1);
    const auto ens = finite_graph_ensemble(c8.build(0), Rooting::Uniform);
    const auto rep = mtp_test(ens, mtp_indicator_adjacent(), 1, 0, 1);
    CHECK(rep.exact);
    CHECK(rep.pass);
    CHECK(rep.sent.value == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(rep.received.value == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("mass transport: symmetric functions balance identically, even sampled") {
    // F symmetric in its two roots: both sides agree sample by sample
    const MassTransportF sym = [](const RootedMultigraph& ball, VertexId x, VertexId y) {
        const auto s1 = ball_signature(ball, x, 1, y);
        const auto s2 = ball_signature(ball, y, 1, x);
        return static_cast<double>((s1.hash() ^ s2.hash()) % 1000) / 1000.0;
    };
    const auto agw = augmented_galton_watson({0.0, 0.5, 0.5});
    const auto rep = mtp_test(agw, sym, 1, 60, 5);
    CHECK(rep.sent.value == doctest::Approx(rep.received.value).epsilon(1e-12));
}

TEST_CASE("degree biasing: exact reweighting matches degree-biased rooting") {
    const auto p3 = path3();
    const auto uniform = finite_graph_ensemble(p3, Rooting::Uniform);
    const auto biased = bias_by_degree(uniform);
    REQUIRE(biased.exact);
    // weights proportional to degree: (1, 2, 1) / 4
    CHECK(biased.exact->weights[0].second == doctest::Approx(0.25).epsilon(1e-12));
    CHECK(biased.exact->weights[1].second == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(biased.exact->weights[2].second == doctest::Approx(0.25).epsilon(1e-12));
    // identical to the degree-biased rooting ensemble
    const auto ex2 = finite_graph_ensemble(p3, Rooting::DegreeBiased);
    for (int i = 0; i < 3; ++i)
        CHECK(biased.exact->weights[i].second == doctest::Approx(ex2.exact->weights[i].second).epsilon(1e-12));
    // unbias undoes it
    const auto undone = unbias_by_degree(biased);
    for (int i = 0; i < 3; ++i)
        CHECK(undone.exact->weights[i].second == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("degree biasing by rejection: cap rejections are counted") {
    const auto agw = augmented_galton_watson({0.0, 0.5, 0.5});
    BiasOptions opts;
    opts.degree_cap = 2; // degree-3 roots must be rejected and counted
    const auto biased = bias_by_degree(agw, opts);
    REQUIRE(biased.cap_rejections);
    for (std::uint64_t i = 0; i < 50; ++i) {
        const auto g = biased.sample(13, i);
        CHECK(g.degree(g.root()) <= 2);
    }
    CHECK(biased.cap_rejections->load() > 0);
}

TEST_CASE("estimators are invariant in the worker count") {
    const auto agw = augmented_galton_watson({0.0, 0.5, 0.5});
    const auto s1 = estimate_h_series(agw, 6, 400, 11, 1);
    const auto s4 = estimate_h_series(agw, 6, 400, 11, 4);
    for (std::uint64_t n = 0; n <= 6; ++n) {
        CHECK(s1.h[n] == s4.h[n]);
        CHECK(s1.se[n] == s4.se[n]);
    }
    const auto v1 = speed_estimate(agw, 50, 400, 11, 1);
    const auto v4 = speed_estimate(agw, 50, 400, 11, 4);
    CHECK(v1.value == v4.value);
    CHECK(v1.se == v4.se);
}

TEST_CASE("fundamental inequality: recurrent lattice gets the liouville verdict") {
    InequalityOptions o;
    o.n_entropy = 32;
    o.n_growth = 32;
    o.n_speed = 400;
    o.samples = 500;
    o.seed = 3;
    const auto rep = fundamental_inequality_report(lattice_ensemble(1), o);
    CHECK(rep.liouville);
    CHECK(rep.lower_ok);
    CHECK(rep.upper_ok);
    CHECK_FALSE(rep.violation);
}

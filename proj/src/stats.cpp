#include "ergolab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <unordered_set>

namespace ergolab {

namespace {

constexpr double kExactTol = 1e-10;

template <typename F>
void parallel_replicas(std::uint64_t samples, std::uint32_t workers, F&& body) {
    if (workers <= 1 || samples < 2) {
        for (std::uint64_t i = 0; i < samples; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<std::uint64_t> next{0};
    const std::uint32_t n = std::min<std::uint64_t>(workers, samples);
    pool.reserve(n);
    for (std::uint32_t w = 0; w < n; ++w) {
        pool.emplace_back([&] {
            for (std::uint64_t i = next.fetch_add(1); i < samples; i = next.fetch_add(1)) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

ValueWithError mean_with_se(const std::vector<double>& xs) {
    ValueWithError out;
    out.samples = xs.size();
    if (xs.empty()) return out;
    double sum = 0;
    for (double x : xs) sum += x;
    out.value = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0;
        for (double x : xs) ss += (x - out.value) * (x - out.value);
        out.se = std::sqrt(ss / (static_cast<double>(xs.size()) * static_cast<double>(xs.size() - 1)));
    }
    return out;
}

/// Exact entropy sequence H_0..H_n of the walk from `start` on one graph.
std::vector<double> entropy_sequence(const RootedMultigraph& g, VertexId start, std::uint64_t n_max) {
    const EdgeCache cache = g.is_lazy() ? EdgeCache::NoStore : EdgeCache::Store;
    std::vector<double> h(n_max + 1);
    WalkDistribution dist = WalkDistribution::point(start);
    h[0] = 0.0;
    for (std::uint64_t n = 1; n <= n_max; ++n) {
        dist = propagate_distribution(g, dist, cache);
        h[n] = marginal_entropy(dist);
    }
    return h;
}

} // namespace

// ---------------------------------------------------------------------------

EntropySeries estimate_h_series(const Ensemble& ens, std::uint64_t n_max, std::uint64_t samples,
                                std::uint64_t seed, std::uint32_t workers) {
    EntropySeries out;
    out.n_max = n_max;
    out.h.assign(n_max + 1, 0.0);
    out.se.assign(n_max + 1, 0.0);
    out.inc.assign(n_max, 0.0);
    out.inc_se.assign(n_max, 0.0);

    if (ens.exact) {
        // finite root law: h_n = sum_u w(u) H_n(G, u), exact
        out.exact = true;
        out.samples = 0;
        for (const auto& [u, w] : ens.exact->weights) {
            const auto h = entropy_sequence(ens.exact->graph, u, n_max);
            for (std::uint64_t n = 0; n <= n_max; ++n) out.h[n] += w * h[n];
        }
        for (std::uint64_t n = 0; n < n_max; ++n) out.inc[n] = out.h[n + 1] - out.h[n];
        return out;
    }
    if (ens.deterministic) {
        out.exact = true;
        out.samples = 1;
        const RootedMultigraph g = ens.sample(seed, 0);
        out.h = entropy_sequence(g, g.root(), n_max);
        for (std::uint64_t n = 0; n < n_max; ++n) out.inc[n] = out.h[n + 1] - out.h[n];
        return out;
    }

    out.samples = samples;
    std::vector<std::vector<double>> per(samples);
    parallel_replicas(samples, workers, [&](std::uint64_t i) {
        const RootedMultigraph g = ens.sample(seed, i);
        per[i] = entropy_sequence(g, g.root(), n_max);
    });
    std::vector<double> sum(n_max + 1, 0.0), ss(n_max + 1, 0.0);
    std::vector<double> isum(n_max, 0.0), iss(n_max, 0.0);
    for (std::uint64_t i = 0; i < samples; ++i) {
        for (std::uint64_t n = 0; n <= n_max; ++n) {
            sum[n] += per[i][n];
            ss[n] += per[i][n] * per[i][n];
        }
        for (std::uint64_t n = 0; n < n_max; ++n) {
            const double d = per[i][n + 1] - per[i][n];
            isum[n] += d;
            iss[n] += d * d;
        }
    }
    const auto N = static_cast<double>(samples);
    for (std::uint64_t n = 0; n <= n_max; ++n) {
        out.h[n] = sum[n] / N;
        if (samples > 1) {
            const double var = std::max(0.0, (ss[n] - N * out.h[n] * out.h[n]) / (N - 1));
            out.se[n] = std::sqrt(var / N);
        }
    }
    for (std::uint64_t n = 0; n < n_max; ++n) {
        out.inc[n] = isum[n] / N;
        if (samples > 1) {
            const double var = std::max(0.0, (iss[n] - N * out.inc[n] * out.inc[n]) / (N - 1));
            out.inc_se[n] = std::sqrt(var / N);
        }
    }
    return out;
}

EntropyRate entropy_rate(const EntropySeries& series) {
    if (series.n_max < 3) throw std::invalid_argument("entropy_rate needs n_max >= 3");
    EntropyRate out;
    const std::uint64_t tail = std::max<std::uint64_t>(1, series.n_max / 8);
    auto window_mean = [&](std::uint64_t hi, std::uint64_t len) {
        // mean increment over (hi - len, hi], as (value, variance of mean)
        const std::uint64_t lo = hi > len ? hi - len : 0;
        double sum = 0, var = 0;
        for (std::uint64_t n = lo; n < hi; ++n) {
            sum += series.inc[n];
            var += series.inc_se[n] * series.inc_se[n];
        }
        const auto m = static_cast<double>(hi - lo);
        return std::pair<double, double>{sum / m, var / (m * m)};
    };
    const auto [i1, v1] = window_mean(series.n_max, tail);
    const auto [i2, v2] = window_mean(series.n_max / 2, std::max<std::uint64_t>(1, tail / 2));
    out.tail_increment = i1;
    out.h.value = std::max(0.0, 2.0 * i1 - i2); // increments ~ h + a/n: extrapolate the 1/n term away
    out.h.se = std::sqrt(4.0 * v1 + v2);
    out.h.samples = series.samples;
    out.h_over_n = series.h[series.n_max] / static_cast<double>(series.n_max);
    for (std::uint64_t n = 0; n + 1 < series.n_max; ++n) {
        const double slack = 3.0 * (series.inc_se[n] + series.inc_se[n + 1]) + 1e-12;
        if (series.inc[n + 1] > series.inc[n] + slack) out.monotone_ok = false;
    }
    return out;
}

double conditional_entropy_expectation(const EntropySeries& series, std::uint64_t k, std::uint64_t n) {
    if (k < 1 || k > n || n > series.n_max) throw std::invalid_argument("need 1 <= k <= n <= n_max");
    return static_cast<double>(k) * series.h[1] + series.h[n - k] - series.h[n];
}

// ---------------------------------------------------------------------------

ValueWithError speed_estimate(const Ensemble& ens, std::uint64_t n, std::uint64_t samples, std::uint64_t seed,
                              std::uint32_t workers) {
    std::vector<double> vals(samples);
    parallel_replicas(samples, workers, [&](std::uint64_t i) {
        const RootedMultigraph g = ens.sample(seed, i);
        Rng rng(derive_seed(derive_seed(seed, 0x5bed) ^ 1, i));
        VertexId x = g.root();
        for (std::uint64_t t = 0; t < n; ++t) x = walk_step(g, x, rng);
        vals[i] = static_cast<double>(g.distance(g.root(), x)) / static_cast<double>(n);
    });
    return mean_with_se(vals);
}

RangeEstimate range_estimate(const Ensemble& ens, std::uint64_t n, std::uint64_t samples, std::uint64_t seed,
                             std::uint32_t workers) {
    std::vector<double> range(samples), nonret(samples);
    parallel_replicas(samples, workers, [&](std::uint64_t i) {
        const RootedMultigraph g = ens.sample(seed, i);
        Rng rng(derive_seed(derive_seed(seed, 0x7a9e) ^ 2, i));
        VertexId x = g.root();
        std::unordered_set<VertexId> visited{x};
        bool returned = false;
        for (std::uint64_t t = 0; t < n; ++t) {
            x = walk_step(g, x, rng);
            if (x == g.root()) returned = true;
            visited.insert(x);
        }
        range[i] = static_cast<double>(visited.size()) / static_cast<double>(n);
        nonret[i] = returned ? 0.0 : 1.0;
    });
    RangeEstimate out;
    out.n = n;
    out.range_over_n = mean_with_se(range);
    out.non_return = mean_with_se(nonret);
    return out;
}

namespace {

/// log #B(root, n) for n = 0..n_max on one graph.
std::vector<double> log_ball_sequence(const RootedMultigraph& g, VertexId root, std::uint64_t n_max) {
    std::vector<double> out(n_max + 1, 0.0);
    bool hinted = true;
    for (std::uint64_t n = 0; n <= n_max; ++n) {
        const auto hint = g.ball_size_hint(root, n);
        if (!hint) {
            hinted = false;
            break;
        }
        out[n] = std::log(static_cast<double>(*hint));
    }
    if (hinted) return out;
    const auto verts = g.ball_vertices(root, static_cast<std::uint32_t>(n_max));
    std::vector<std::uint64_t> count(n_max + 1, 0);
    for (const auto& [v, d] : verts) {
        (void)v;
        ++count[d];
    }
    std::uint64_t acc = 0;
    for (std::uint64_t n = 0; n <= n_max; ++n) {
        acc += count[n];
        out[n] = std::log(static_cast<double>(acc));
    }
    return out;
}

double tail_slope(const std::vector<double>& curve) {
    const std::uint64_t n_max = curve.size() - 1;
    const std::uint64_t w = std::max<std::uint64_t>(1, n_max / 5);
    return (curve[n_max] - curve[n_max - w]) / static_cast<double>(w);
}

} // namespace

GrowthEstimate growth_estimate(const Ensemble& ens, std::uint64_t n_max, std::uint64_t samples,
                               std::uint64_t seed, std::uint32_t workers) {
    GrowthEstimate out;
    if (ens.exact) {
        out.exact = true;
        out.log_ball.assign(n_max + 1, 0.0);
        out.log_ball_se.assign(n_max + 1, 0.0);
        std::vector<double> curve(n_max + 1, 0.0);
        double v = 0;
        for (const auto& [u, w] : ens.exact->weights) {
            const auto lb = log_ball_sequence(ens.exact->graph, u, n_max);
            for (std::uint64_t n = 0; n <= n_max; ++n) curve[n] += w * lb[n];
            v += w * tail_slope(lb);
        }
        out.log_ball = curve;
        out.v.value = v;
        out.v.samples = 0;
        return out;
    }
    if (ens.deterministic) {
        out.exact = true;
        const RootedMultigraph g = ens.sample(seed, 0);
        out.log_ball = log_ball_sequence(g, g.root(), n_max);
        out.log_ball_se.assign(n_max + 1, 0.0);
        out.v.value = tail_slope(out.log_ball);
        out.v.samples = 1;
        return out;
    }
    std::vector<std::vector<double>> per(samples);
    std::vector<double> slopes(samples);
    parallel_replicas(samples, workers, [&](std::uint64_t i) {
        const RootedMultigraph g = ens.sample(seed, i);
        per[i] = log_ball_sequence(g, g.root(), n_max);
        slopes[i] = tail_slope(per[i]);
    });
    out.log_ball.assign(n_max + 1, 0.0);
    out.log_ball_se.assign(n_max + 1, 0.0);
    for (std::uint64_t n = 0; n <= n_max; ++n) {
        std::vector<double> col(samples);
        for (std::uint64_t i = 0; i < samples; ++i) col[i] = per[i][n];
        const auto m = mean_with_se(col);
        out.log_ball[n] = m.value;
        out.log_ball_se[n] = m.se;
    }
    out.v = mean_with_se(slopes);
    return out;
}

// ---------------------------------------------------------------------------

InequalityReport fundamental_inequality_report(const Ensemble& ens, const InequalityOptions& opts) {
    InequalityReport rep;
    const auto series = estimate_h_series(ens, opts.n_entropy, opts.samples, opts.seed, opts.workers);
    const auto rate = entropy_rate(series);
    rep.h = rate.h;
    rep.s = speed_estimate(ens, opts.n_speed, opts.samples, derive_seed(opts.seed, 0x51), opts.workers);
    const auto growth = growth_estimate(ens, opts.n_growth, std::max<std::uint64_t>(1, opts.samples / 4),
                                        derive_seed(opts.seed, 0x52), opts.workers);
    rep.v = growth.v;

    // the estimates of s, v, h are all biased upward at finite scale; the
    // zero-threshold acts as the resolution floor of the inequality checks
    const double res = opts.zero_threshold;
    const double sig_lo = std::sqrt(rep.s.value * rep.s.value * rep.s.se * rep.s.se + rep.h.se * rep.h.se);
    rep.lower_ok = rep.s.value * rep.s.value / 2.0 <= rep.h.value + 3.0 * sig_lo + res;
    const double sig_hi = std::sqrt(rep.h.se * rep.h.se + rep.s.value * rep.s.value * rep.v.se * rep.v.se +
                                    rep.v.value * rep.v.value * rep.s.se * rep.s.se);
    rep.upper_ok = rep.h.value <= rep.v.value * rep.s.value + 3.0 * sig_hi + res;
    rep.violation = !(rep.lower_ok && rep.upper_ok);

    if (rep.h.upper(3.0) < opts.zero_threshold) {
        rep.liouville = true;
        rep.verdict = "liouville (h ~ 0)";
    } else if (rep.v.upper(3.0) < opts.zero_threshold) {
        rep.liouville = true;
        rep.verdict = "liouville (v ~ 0)";
    } else {
        rep.verdict = "no verdict";
    }
    return rep;
}

// ---------------------------------------------------------------------------
// class distributions

namespace {

void add_mass(ClassDistribution& d, const BallSignature& sig, double w) { d.prob[sig] += w; }

ClassDistribution exact_class_distribution(const RootedMultigraph& g,
                                           const std::vector<std::pair<VertexId, double>>& roots,
                                           std::uint64_t t, std::uint32_t r, bool bi_rooted, PairOrder order) {
    ClassDistribution out;
    out.radius = r;
    out.bi_rooted = bi_rooted;
    out.exact = true;
    for (const auto& [u, w] : roots) {
        WalkDistribution dist = WalkDistribution::point(u);
        for (std::uint64_t i = 0; i < t; ++i) dist = propagate_distribution(g, dist, EdgeCache::Store, 0.0);
        for (VertexId x : dist.support) {
            const double px = w * dist.mass[x];
            if (px <= 0) continue;
            if (!bi_rooted) {
                add_mass(out, ball_signature(g, x, r), px);
            } else {
                const auto nbrs = g.neighbors(x);
                std::int64_t deg = 0;
                for (const auto& e : nbrs) deg += e.multiplicity;
                for (const auto& e : nbrs) {
                    const double q = px * static_cast<double>(e.multiplicity) / static_cast<double>(deg);
                    const BallSignature sig = order == PairOrder::Forward
                                                  ? ball_signature(g, x, r, e.to)
                                                  : ball_signature(g, e.to, r, x);
                    add_mass(out, sig, q);
                }
            }
        }
    }
    return out;
}

} // namespace

ClassDistribution class_distribution(const Ensemble& ens, std::uint64_t t, std::uint32_t r,
                                     std::uint64_t samples, std::uint64_t seed, bool bi_rooted,
                                     PairOrder order, std::uint32_t workers) {
    if (ens.exact)
        return exact_class_distribution(ens.exact->graph, ens.exact->weights, t, r, bi_rooted, order);
    if (ens.deterministic) {
        const RootedMultigraph g = ens.sample(seed, 0);
        return exact_class_distribution(g, {{g.root(), 1.0}}, t, r, bi_rooted, order);
    }
    ClassDistribution out;
    out.radius = r;
    out.bi_rooted = bi_rooted;
    out.samples = samples;
    std::vector<BallSignature> sigs(samples);
    parallel_replicas(samples, workers, [&](std::uint64_t i) {
        const RootedMultigraph g = ens.sample(seed, i);
        Rng rng(derive_seed(derive_seed(seed, 0xc1a5) ^ 3, i));
        VertexId x = g.root();
        for (std::uint64_t k = 0; k < t; ++k) x = walk_step(g, x, rng);
        if (!bi_rooted) {
            sigs[i] = ball_signature(g, x, r);
        } else {
            const VertexId y = walk_step(g, x, rng);
            sigs[i] = order == PairOrder::Forward ? ball_signature(g, x, r, y) : ball_signature(g, y, r, x);
        }
    });
    const double w = 1.0 / static_cast<double>(samples);
    for (const auto& s : sigs) add_mass(out, s, w);
    return out;
}

double total_variation(const ClassDistribution& a, const ClassDistribution& b) {
    double tv = 0;
    for (const auto& [k, p] : a.prob) {
        const auto it = b.prob.find(k);
        tv += std::abs(p - (it == b.prob.end() ? 0.0 : it->second));
    }
    for (const auto& [k, q] : b.prob) {
        if (!a.prob.count(k)) tv += q;
    }
    return tv / 2.0;
}

double tv_null_quantile(const ClassDistribution& a, const ClassDistribution& b, std::uint64_t n_samples,
                        std::uint64_t seed, std::uint32_t resamples) {
    std::vector<double> pooled;
    pooled.reserve(a.prob.size() + b.prob.size());
    std::vector<const BallSignature*> keys;
    std::unordered_map<BallSignature, double, BallSignatureHash> pool;
    for (const auto& [k, p] : a.prob) pool[k] += p / 2;
    for (const auto& [k, q] : b.prob) pool[k] += q / 2;
    std::vector<double> cdf;
    cdf.reserve(pool.size());
    double acc = 0;
    for (const auto& [k, p] : pool) {
        (void)k;
        acc += p;
        cdf.push_back(acc);
    }
    Rng rng(derive_seed(seed, 0xb007));
    std::vector<double> tvs(resamples);
    std::vector<std::uint32_t> ca(pool.size()), cb(pool.size());
    for (std::uint32_t rix = 0; rix < resamples; ++rix) {
        std::fill(ca.begin(), ca.end(), 0);
        std::fill(cb.begin(), cb.end(), 0);
        for (std::uint64_t i = 0; i < n_samples; ++i) {
            const double u = rng.uniform() * acc;
            ++ca[std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin()];
            const double u2 = rng.uniform() * acc;
            ++cb[std::lower_bound(cdf.begin(), cdf.end(), u2) - cdf.begin()];
        }
        double tv = 0;
        for (std::size_t k = 0; k < ca.size(); ++k)
            tv += std::abs(static_cast<double>(ca[k]) - static_cast<double>(cb[k]));
        tvs[rix] = tv / (2.0 * static_cast<double>(n_samples));
    }
    std::sort(tvs.begin(), tvs.end());
    return tvs[static_cast<std::size_t>(0.95 * (resamples - 1))];
}

TvTestReport stationarity_test(const Ensemble& ens, std::uint64_t n, std::uint32_t r, std::uint64_t samples,
                               std::uint64_t seed, std::uint32_t workers) {
    TvTestReport rep;
    rep.radius = r;
    if (ens.exact || ens.deterministic) {
        const auto d0 = class_distribution(ens, 0, r, samples, seed);
        const auto dn = class_distribution(ens, n, r, samples, seed);
        rep.tv = total_variation(d0, dn);
        rep.exact = true;
        rep.pass = rep.tv <= kExactTol;
        return rep;
    }
    // paired sampling: one walk per replica supplies both time-0 and time-n classes
    std::vector<BallSignature> s0(samples), sn(samples);
    parallel_replicas(samples, workers, [&](std::uint64_t i) {
        const RootedMultigraph g = ens.sample(seed, i);
        Rng rng(derive_seed(derive_seed(seed, 0x57a7) ^ 4, i));
        VertexId x = g.root();
        s0[i] = ball_signature(g, x, r);
        for (std::uint64_t k = 0; k < n; ++k) x = walk_step(g, x, rng);
        sn[i] = ball_signature(g, x, r);
    });
    ClassDistribution d0, dn;
    d0.radius = dn.radius = r;
    d0.samples = dn.samples = samples;
    const double w = 1.0 / static_cast<double>(samples);
    for (std::uint64_t i = 0; i < samples; ++i) {
        add_mass(d0, s0[i], w);
        add_mass(dn, sn[i], w);
    }
    rep.tv = total_variation(d0, dn);
    rep.samples = samples;
    rep.null_q95 = tv_null_quantile(d0, dn, samples, seed);
    rep.pass = rep.tv <= rep.null_q95;
    return rep;
}

TvTestReport reversibility_test(const Ensemble& ens, std::uint32_t r, std::uint64_t samples,
                                std::uint64_t seed, std::uint32_t workers) {
    TvTestReport rep;
    rep.radius = r;
    if (ens.exact || ens.deterministic) {
        const auto fwd = class_distribution(ens, 0, r, samples, seed, true, PairOrder::Forward);
        const auto rev = class_distribution(ens, 0, r, samples, seed, true, PairOrder::Reversed);
        rep.tv = total_variation(fwd, rev);
        rep.exact = true;
        rep.pass = rep.tv <= kExactTol;
        return rep;
    }
    std::vector<BallSignature> sf(samples), sr(samples);
    parallel_replicas(samples, workers, [&](std::uint64_t i) {
        const RootedMultigraph g = ens.sample(seed, i);
        Rng rng(derive_seed(derive_seed(seed, 0x4eb5) ^ 5, i));
        const VertexId x = g.root();
        const VertexId y = walk_step(g, x, rng);
        sf[i] = ball_signature(g, x, r, y);
        sr[i] = ball_signature(g, y, r, x);
    });
    ClassDistribution df, dr;
    df.radius = dr.radius = r;
    df.bi_rooted = dr.bi_rooted = true;
    df.samples = dr.samples = samples;
    const double w = 1.0 / static_cast<double>(samples);
    for (std::uint64_t i = 0; i < samples; ++i) {
        add_mass(df, sf[i], w);
        add_mass(dr, sr[i], w);
    }
    rep.tv = total_variation(df, dr);
    rep.samples = samples;
    rep.null_q95 = tv_null_quantile(df, dr, samples, seed);
    rep.pass = rep.tv <= rep.null_q95;
    return rep;
}

// ---------------------------------------------------------------------------
// mass transport

namespace {

RootedMultigraph pair_ball(const RootedMultigraph& g, VertexId x, VertexId y, std::uint32_t r, VertexId& bx,
                           VertexId& by) {
    auto verts = g.ball_vertices(x, r);
    {
        std::unordered_set<VertexId> seen;
        seen.reserve(verts.size() * 2);
        for (const auto& [v, d] : verts) {
            (void)d;
            seen.insert(v);
        }
        for (const auto& [v, d] : g.ball_vertices(y, r)) {
            (void)d;
            if (seen.insert(v).second) verts.emplace_back(v, 0);
        }
    }
    std::unordered_map<VertexId, VertexId> index;
    index.reserve(verts.size() * 2);
    RootedMultigraph::Builder b;
    for (const auto& [v, d] : verts) {
        (void)d;
        index.emplace(v, b.add_vertex());
    }
    for (const auto& [v, d] : verts) {
        (void)d;
        g.for_each_edge(v, [&](VertexId u, std::int32_t m) {
            const auto it = index.find(u);
            if (it == index.end()) return;
            if (it->second > index.at(v)) b.add_edge(index.at(v), it->second, m);
        });
    }
    bx = index.at(x);
    by = index.at(y);
    return b.build(bx, /*require_connected=*/false);
}

std::pair<double, double> mtp_sides_at_root(const RootedMultigraph& g, VertexId rho, std::uint32_t r,
                                            const MassTransportF& f) {
    double sent = 0, received = 0;
    for (const auto& [x, d] : g.ball_vertices(rho, r)) {
        (void)d;
        VertexId bx, by;
        const RootedMultigraph ball = pair_ball(g, rho, x, r, bx, by);
        sent += f(ball, bx, by);
        received += f(ball, by, bx);
    }
    return {sent, received};
}

} // namespace

MtpReport mtp_test(const Ensemble& ens, const MassTransportF& f, std::uint32_t r, std::uint64_t samples,
                   std::uint64_t seed, std::uint32_t workers) {
    MtpReport rep;
    if (ens.exact) {
        rep.exact = true;
        for (const auto& [u, w] : ens.exact->weights) {
            const auto [s, rcv] = mtp_sides_at_root(ens.exact->graph, u, r, f);
            rep.sent.value += w * s;
            rep.received.value += w * rcv;
        }
        rep.pass = std::abs(rep.sent.value - rep.received.value) <=
                   kExactTol * std::max(1.0, std::abs(rep.sent.value));
        return rep;
    }
    std::vector<double> sent(samples), received(samples);
    parallel_replicas(samples, workers, [&](std::uint64_t i) {
        const RootedMultigraph g = ens.sample(seed, i);
        const auto [s, rcv] = mtp_sides_at_root(g, g.root(), r, f);
        sent[i] = s;
        received[i] = rcv;
    });
    rep.sent = mean_with_se(sent);
    rep.received = mean_with_se(received);
    const double sig = std::sqrt(rep.sent.se * rep.sent.se + rep.received.se * rep.received.se);
    rep.pass = std::abs(rep.sent.value - rep.received.value) <= 3.0 * sig + kExactTol;
    return rep;
}

MassTransportF mtp_indicator_adjacent() {
    return [](const RootedMultigraph& ball, VertexId x, VertexId y) -> double {
        if (x == y) return 0.0;
        for (const Edge& e : ball.neighbors(x))
            if (e.to == y) return 1.0;
        return 0.0;
    };
}

MassTransportF mtp_class_hash(std::uint32_t r) {
    return [r](const RootedMultigraph& ball, VertexId x, VertexId y) -> double {
        const BallSignature sig = ball_signature(ball, x, r, y);
        return static_cast<double>(sig.hash() % 100000) / 100000.0;
    };
}

// ---------------------------------------------------------------------------
// degree biasing

namespace {

Ensemble exact_reweighted(const Ensemble& base, bool by_degree, const std::string& suffix) {
    auto law = std::make_shared<ExactRootLaw>(*base.exact);
    double total = 0;
    for (auto& [v, w] : law->weights) {
        const double deg = static_cast<double>(law->graph.degree(v));
        w *= by_degree ? deg : 1.0 / deg;
        total += w;
    }
    for (auto& [v, w] : law->weights) w /= total;
    auto cdf = std::make_shared<std::vector<double>>();
    double acc = 0;
    for (const auto& [v, w] : law->weights) {
        acc += w;
        cdf->push_back(acc);
    }
    Ensemble e;
    e.kind = base.kind + suffix;
    e.params = base.params;
    e.deterministic = false;
    e.transitive = false;
    e.degree_bound = base.degree_bound;
    e.exact = law;
    e.sampler = [law, cdf](std::uint64_t seed, std::uint64_t replica) {
        Rng rng(derive_seed(seed, replica));
        const double u = rng.uniform();
        const auto it = std::upper_bound(cdf->begin(), cdf->end(), u);
        const VertexId root = static_cast<VertexId>(std::min<std::size_t>(it - cdf->begin(), cdf->size() - 1));
        return law->graph.rerooted(root);
    };
    return e;
}

} // namespace

Ensemble bias_by_degree(const Ensemble& ens, BiasOptions opts) {
    if (ens.exact) return exact_reweighted(ens, true, "|deg_biased");
    Ensemble e;
    e.kind = ens.kind + "|deg_biased";
    e.params = ens.params;
    e.params["degree_cap"] = opts.degree_cap;
    e.deterministic = false;
    e.transitive = false;
    e.degree_bound = std::min(ens.degree_bound < 0 ? opts.degree_cap : ens.degree_bound, opts.degree_cap);
    e.cap_rejections = std::make_shared<std::atomic<std::uint64_t>>(0);
    const Ensemble base = ens;
    const double cap = opts.degree_cap;
    auto rejections = e.cap_rejections;
    e.sampler = [base, cap, rejections](std::uint64_t seed, std::uint64_t replica) {
        const std::uint64_t s0 = derive_seed(seed ^ 0xB1A5B1A5ull, replica);
        for (std::uint64_t attempt = 0;; ++attempt) {
            const RootedMultigraph g = base.sample(s0, attempt);
            const double deg = static_cast<double>(g.degree(g.root()));
            Rng acc(derive_seed(s0, attempt ^ 0xACCull));
            if (deg > cap) {
                rejections->fetch_add(1);
                continue; // degree-cap-exceeded: rejected and counted
            }
            if (acc.uniform() < deg / cap) return g;
        }
    };
    return e;
}

Ensemble unbias_by_degree(const Ensemble& ens) {
    if (ens.exact) return exact_reweighted(ens, false, "|deg_unbiased");
    Ensemble e;
    e.kind = ens.kind + "|deg_unbiased";
    e.params = ens.params;
    e.deterministic = false;
    e.transitive = false;
    e.degree_bound = ens.degree_bound;
    const Ensemble base = ens;
    e.sampler = [base](std::uint64_t seed, std::uint64_t replica) {
        const std::uint64_t s0 = derive_seed(seed ^ 0x0B1A5ull, replica);
        for (std::uint64_t attempt = 0;; ++attempt) {
            const RootedMultigraph g = base.sample(s0, attempt);
            const double deg = static_cast<double>(g.degree(g.root()));
            Rng acc(derive_seed(s0, attempt ^ 0xACCull));
            if (acc.uniform() < 1.0 / deg) return g;
        }
    };
    return e;
}

} // namespace ergolab

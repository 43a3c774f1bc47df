#include "ergolab/cocycle.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>
#include <unordered_map>

namespace ergolab {

const EdgeClassEntry* EdgeClassTable::find(const BallSignature& cls) const {
    for (const auto& e : entries)
        if (e.cls == cls) return &e;
    return nullptr;
}

double EdgeClassTable::delta_of(const BallSignature& cls) const {
    const auto* e = find(cls);
    if (!e) throw UnknownClassError("edge class not present in table: " + cls.hex());
    return e->delta;
}

double EdgeClassTable::delta_of_edge(const RootedMultigraph& g, VertexId x, VertexId y) const {
    return delta_of(ball_signature(g, x, radius, y));
}

namespace {

struct MassAccumulator {
    std::map<BallSignature, double> fwd, bwd;
    std::map<BallSignature, BallSignature> reversed_of;
    std::map<BallSignature, std::uint64_t> counts;

    void add(const BallSignature& f, const BallSignature& r, double w, std::uint64_t count) {
        fwd[f] += w;
        bwd[r] += w;
        reversed_of.emplace(f, r);
        reversed_of.emplace(r, f);
        counts[f] += count;
    }
};

EdgeClassTable finish_table(MassAccumulator& acc, std::uint32_t r, double M, bool exact,
                            std::uint64_t samples) {
    EdgeClassTable table;
    table.radius = r;
    table.degree_bound = M;
    table.exact = exact;
    table.samples = samples;
    std::map<BallSignature, EdgeClassEntry> merged;
    for (const auto& [cls, w] : acc.fwd) {
        EdgeClassEntry e;
        e.cls = cls;
        e.mu_fwd = w;
        e.reversed = acc.reversed_of.at(cls);
        e.count = acc.counts.count(cls) ? acc.counts.at(cls) : 0;
        merged.emplace(cls, e);
    }
    for (const auto& [cls, w] : acc.bwd) {
        auto it = merged.find(cls);
        if (it == merged.end()) {
            EdgeClassEntry e;
            e.cls = cls;
            e.mu_bwd = w;
            e.reversed = acc.reversed_of.at(cls);
            e.bwd_only = true; // reversed-law-only classes are an undersampling artifact
            merged.emplace(cls, e);
        } else {
            it->second.mu_bwd = w;
        }
    }
    for (auto& [cls, e] : merged) {
        (void)cls;
        if (e.bwd_only) {
            e.delta = M; // conservative ceiling for bound checks
            ++table.bwd_only_classes;
        } else {
            e.delta = e.mu_bwd / e.mu_fwd;
            if (M > 0) e.delta = std::clamp(e.delta, 1.0 / M, M);
        }
        table.entries.push_back(e);
    }
    return table;
}

} // namespace

EdgeClassTable estimate_delta(const Ensemble& ens, std::uint32_t r, std::uint64_t samples, std::uint64_t seed,
                              std::uint32_t workers) {
    const double M = ens.degree_bound;
    MassAccumulator acc;
    if (ens.exact) {
        for (const auto& [u, wu] : ens.exact->weights) {
            const RootedMultigraph& g = ens.exact->graph;
            const auto nbrs = g.neighbors(u);
            std::int64_t deg = 0;
            for (const auto& e : nbrs) deg += e.multiplicity;
            for (const auto& e : nbrs) {
                const double w = wu * static_cast<double>(e.multiplicity) / static_cast<double>(deg);
                acc.add(ball_signature(g, u, r, e.to), ball_signature(g, e.to, r, u), w, 0);
            }
        }
        return finish_table(acc, r, M, true, 0);
    }
    if (ens.deterministic && ens.transitive) {
        // stationary by transitivity: X_0 sits at the root of the one graph
        const RootedMultigraph g = ens.sample(seed, 0);
        const VertexId u = g.root();
        const auto nbrs = g.neighbors(u);
        std::int64_t deg = 0;
        for (const auto& e : nbrs) deg += e.multiplicity;
        for (const auto& e : nbrs) {
            const double w = static_cast<double>(e.multiplicity) / static_cast<double>(deg);
            acc.add(ball_signature(g, u, r, e.to), ball_signature(g, e.to, r, u), w, 0);
        }
        return finish_table(acc, r, M, true, 0);
    }
    struct Obs {
        BallSignature fwd, bwd;
    };
    std::vector<Obs> obs(samples);
    const auto run = [&](std::uint64_t i) {
        const RootedMultigraph g = ens.sample(seed, i);
        Rng rng(derive_seed(derive_seed(seed, 0xde17a) ^ 6, i));
        const VertexId x = g.root();
        const VertexId y = walk_step(g, x, rng);
        obs[i] = Obs{ball_signature(g, x, r, y), ball_signature(g, y, r, x)};
    };
    if (workers <= 1) {
        for (std::uint64_t i = 0; i < samples; ++i) run(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::uint64_t> next{0};
        for (std::uint32_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::uint64_t i = next.fetch_add(1); i < samples; i = next.fetch_add(1)) run(i);
            });
        for (auto& t : pool) t.join();
    }
    const double w = 1.0 / static_cast<double>(samples);
    for (const auto& o : obs) acc.add(o.fwd, o.bwd, w, 1);
    return finish_table(acc, r, M, false, samples);
}

double delta_along_path(const EdgeClassTable& table, const RootedMultigraph& g, const WalkPath& path) {
    double prod = 1.0;
    for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i)
        prod *= table.delta_of_edge(g, path.vertices[i], path.vertices[i + 1]);
    return prod;
}

ElogDelta elog_delta(const EdgeClassTable& table, std::uint64_t bootstrap_seed, std::uint32_t resamples) {
    ElogDelta out;
    double e = 0;
    for (const auto& entry : table.entries) {
        if (entry.mu_fwd <= 0) continue;
        e += entry.mu_fwd * std::log(entry.delta);
    }
    out.value.value = e;
    out.value.samples = table.samples;
    if (!table.exact && table.samples > 1) {
        // multinomial bootstrap over the observed class counts
        std::vector<double> logd;
        std::vector<double> cdf;
        double acc = 0;
        for (const auto& entry : table.entries) {
            if (entry.mu_fwd <= 0) continue;
            acc += entry.mu_fwd;
            cdf.push_back(acc);
            logd.push_back(std::log(entry.delta));
        }
        Rng rng(bootstrap_seed);
        std::vector<double> vals(resamples);
        for (std::uint32_t b = 0; b < resamples; ++b) {
            double s = 0;
            for (std::uint64_t i = 0; i < table.samples; ++i) {
                const double u = rng.uniform() * acc;
                s += logd[std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin()];
            }
            vals[b] = s / static_cast<double>(table.samples);
        }
        double mean = 0;
        for (double v : vals) mean += v;
        mean /= resamples;
        double var = 0;
        for (double v : vals) var += (v - mean) * (v - mean);
        out.value.se = std::sqrt(var / (resamples - 1));
    }
    out.ballistic_bound = table.degree_bound > 1 ? std::abs(e) / std::log(table.degree_bound) : 0.0;
    return out;
}

double harmonicity_check(const EdgeClassTable& table, const RootedMultigraph& g,
                         std::span<const VertexId> vertices) {
    double worst = 0;
    for (VertexId x : vertices) {
        const auto nbrs = g.neighbors(x);
        std::int64_t deg = 0;
        for (const auto& e : nbrs) deg += e.multiplicity;
        double s = 0;
        for (const auto& e : nbrs)
            s += static_cast<double>(e.multiplicity) * table.delta_of_edge(g, x, e.to);
        worst = std::max(worst, std::abs(s / static_cast<double>(deg) - 1.0));
    }
    return worst;
}

CycleCheckReport cycle_product_check(const EdgeClassTable& table, const RootedMultigraph& g,
                                     std::uint64_t n_cycles, std::uint64_t max_len, Rng& rng) {
    CycleCheckReport rep;
    const VertexId start = g.root();

    // triangles through the start vertex
    {
        const auto nbrs = g.neighbors(start);
        std::uint64_t found = 0;
        for (const auto& e1 : nbrs) {
            for (const auto& e2 : g.neighbors(e1.to)) {
                if (e2.to == start) { // back-and-forth length-2 cycle
                    const double p = table.delta_of_edge(g, start, e1.to) *
                                     table.delta_of_edge(g, e1.to, start);
                    rep.max_abs_log = std::max(rep.max_abs_log, std::abs(std::log(p)));
                    ++rep.cycles_checked;
                    continue;
                }
                bool closes = false;
                for (const auto& e3 : nbrs)
                    if (e3.to == e2.to) closes = true;
                if (!closes) continue;
                const double p = table.delta_of_edge(g, start, e1.to) *
                                 table.delta_of_edge(g, e1.to, e2.to) *
                                 table.delta_of_edge(g, e2.to, start);
                rep.max_abs_log = std::max(rep.max_abs_log, std::abs(std::log(p)));
                ++rep.cycles_checked;
                if (++found >= n_cycles) break;
            }
            if (found >= n_cycles) break;
        }
    }

    // random-walk loops: walk until first return to the start, capped
    for (std::uint64_t c = 0; c < n_cycles; ++c) {
        WalkPath path;
        path.vertices.push_back(start);
        VertexId x = start;
        bool closed = false;
        for (std::uint64_t t = 0; t < max_len; ++t) {
            x = walk_step(g, x, rng);
            path.vertices.push_back(x);
            if (x == start) {
                closed = true;
                break;
            }
        }
        if (!closed) continue;
        const double p = delta_along_path(table, g, path);
        rep.max_abs_log = std::max(rep.max_abs_log, std::abs(std::log(p)));
        ++rep.cycles_checked;
    }
    return rep;
}

} // namespace ergolab

#include "ergolab/runner.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ergolab/cocycle.hpp"
#include "ergolab/stats.hpp"
#include "ergolab/walk.hpp"

namespace ergolab {

namespace {

RootedMultigraph make_finite_graph(const ExperimentConfig& cfg) {
    const std::string kind = cfg.get_str("graph");
    if (kind == "canopy_tree") return canopy_tree(static_cast<std::uint32_t>(cfg.get_u64("n")));
    if (kind == "canopy_reinforced")
        return reinforce_edges(canopy_tree(static_cast<std::uint32_t>(cfg.get_u64("n"))));
    if (kind == "path") {
        const auto n = cfg.get_u64("n", 3);
        RootedMultigraph::Builder b;
        for (std::uint64_t i = 0; i < n; ++i) b.add_vertex();
        for (std::uint64_t i = 0; i + 1 < n; ++i) b.add_edge(i, i + 1, 1);
        return b.build(0);
    }
    if (kind == "cycle") {
        const auto n = cfg.get_u64("n", 8);
        RootedMultigraph::Builder b;
        for (std::uint64_t i = 0; i < n; ++i) b.add_vertex();
        for (std::uint64_t i = 0; i < n; ++i) b.add_edge(i, (i + 1) % n, 1);
        return b.build(0);
    }
    if (kind == "file") {
        std::ifstream in(cfg.get_str("path"));
        if (!in) throw ConfigError("cannot open graph file: " + cfg.get_str("path"));
        return RootedMultigraph::read_edge_list(in);
    }
    throw ConfigError("unknown finite graph kind: " + kind);
}

std::uint64_t effective_seed(const ExperimentConfig& cfg) {
    if (const char* env = std::getenv("ERGOLAB_SEED")) return std::strtoull(env, nullptr, 10);
    return cfg.get_u64("seed", 1);
}

} // namespace

Ensemble make_ensemble(const ExperimentConfig& cfg) {
    const std::string kind = cfg.get_str("ensemble");
    Ensemble e;
    if (kind == "grandfather") {
        e = grandfather_ensemble();
    } else if (kind == "lattice") {
        e = lattice_ensemble(static_cast<std::uint32_t>(cfg.get_u64("d", 2)));
    } else if (kind == "regular_tree") {
        e = regular_tree_ensemble(static_cast<std::uint32_t>(cfg.get_u64("k", 3)));
    } else if (kind == "canopy" || kind == "canopy_reinforced") {
        e = canopy_infinite_ensemble(static_cast<std::uint32_t>(cfg.get_u64("horizon", 20000)),
                                     static_cast<std::uint32_t>(cfg.get_u64("root_depth", 0)),
                                     kind == "canopy_reinforced");
    } else if (kind == "agw") {
        e = augmented_galton_watson(cfg.get_f64_list("offspring"));
    } else if (kind == "lrp_cluster") {
        LrpOptions opts;
        if (cfg.get_str("norm", "euclidean") == "l1") opts.norm = LatticeNorm::L1;
        e = lrp_cluster_ensemble(static_cast<std::uint32_t>(cfg.get_u64("d", 1)), cfg.get_f64("beta"),
                                 cfg.get_f64("s"), cfg.get_i64("L", 1000), opts);
    } else if (kind == "finite") {
        const RootedMultigraph g = make_finite_graph(cfg);
        const std::string rooting = cfg.get_str("rooting", "degree_biased");
        e = finite_graph_ensemble(g, rooting == "uniform" ? Rooting::Uniform : Rooting::DegreeBiased);
    } else {
        throw ConfigError("unknown ensemble kind: " + kind);
    }
    if (cfg.get_str("bias", "") == "degree") {
        BiasOptions opts;
        opts.degree_cap = cfg.get_f64("degree_cap", 256);
        e = bias_by_degree(e, opts);
    }
    if (cfg.get_str("unbias", "") == "degree") e = unbias_by_degree(e);
    if (cfg.has("degree_bound")) e.degree_bound = cfg.get_f64("degree_bound");
    return e;
}

RunOutcome run_experiment(const ExperimentConfig& cfg) {
    RunOutcome out;
    const auto t0 = std::chrono::steady_clock::now();
    ResultRecord& rec = out.record;
    rec.set_config(cfg.echo());
    try {
        const std::string op = cfg.get_str("operation");
        const std::uint64_t seed = effective_seed(cfg);
        const auto workers = static_cast<std::uint32_t>(cfg.get_u64("workers", 1));
        const std::uint64_t samples = cfg.get_u64("samples", 1000);
        rec.j["operation"] = op;
        rec.j["seed"] = seed;

        if (op == "generate") {
            const Ensemble ens = make_ensemble(cfg);
            RootedMultigraph g = ens.sample(seed, cfg.get_u64("replica", 0));
            const auto radius = static_cast<std::uint32_t>(cfg.get_u64("radius", 3));
            if (g.is_lazy()) g = g.ball(g.root(), radius);
            std::ostringstream ss;
            g.write_edge_list(ss);
            rec.set_text("edge_list", ss.str());
            rec.set_scalar("vertices", static_cast<double>(g.vertex_count()));
        } else if (op == "walk") {
            const Ensemble ens = make_ensemble(cfg);
            const RootedMultigraph g = ens.sample(seed, cfg.get_u64("replica", 0));
            Rng rng(derive_seed(seed, 0xa1));
            const auto path = simulate_path(g, g.root(), cfg.get_u64("n", 100), rng);
            std::vector<double> verts(path.vertices.size());
            for (std::size_t i = 0; i < path.vertices.size(); ++i)
                verts[i] = static_cast<double>(path.vertices[i]);
            rec.set_series("path", verts);
            rec.set_scalar("end_distance",
                           static_cast<double>(g.distance(path.vertices.front(), path.vertices.back())));
        } else if (op == "entropy") {
            const Ensemble ens = make_ensemble(cfg);
            const auto series = estimate_h_series(ens, cfg.get_u64("n_max", 16), samples, seed, workers);
            const auto rate = entropy_rate(series);
            rec.set_series("h_n", series.h);
            rec.set_series("h_n_se", series.se);
            rec.set_series("increments", series.inc);
            rec.set_scalar("h", rate.h);
            rec.set_scalar("h_over_n", rate.h_over_n);
            rec.set_verdict("monotone_increments", rate.monotone_ok);
            if (cfg.has("csv")) {
                std::vector<double> ns(series.h.size());
                for (std::size_t i = 0; i < ns.size(); ++i) ns[i] = static_cast<double>(i);
                write_series_csv(cfg.get_str("csv"), {"n", "h_n", "se"}, {ns, series.h, series.se});
            }
            if (!rate.monotone_ok) out.exit_code = kVerdictFailure;
        } else if (op == "speed") {
            const Ensemble ens = make_ensemble(cfg);
            rec.set_scalar("speed", speed_estimate(ens, cfg.get_u64("n", 200), samples, seed, workers));
        } else if (op == "range") {
            const Ensemble ens = make_ensemble(cfg);
            const auto r = range_estimate(ens, cfg.get_u64("n", 1000), samples, seed, workers);
            rec.set_scalar("range_over_n", r.range_over_n);
            rec.set_scalar("non_return", r.non_return);
        } else if (op == "growth") {
            const Ensemble ens = make_ensemble(cfg);
            const auto g = growth_estimate(ens, cfg.get_u64("n_max", 16), samples, seed, workers);
            rec.set_scalar("v", g.v);
            rec.set_series("log_ball", g.log_ball);
            if (cfg.has("csv")) {
                std::vector<double> ns(g.log_ball.size());
                for (std::size_t i = 0; i < ns.size(); ++i) ns[i] = static_cast<double>(i);
                write_series_csv(cfg.get_str("csv"), {"n", "log_ball", "se"}, {ns, g.log_ball, g.log_ball_se});
            }
        } else if (op == "inequality") {
            const Ensemble ens = make_ensemble(cfg);
            InequalityOptions opts;
            opts.n_entropy = cfg.get_u64("n_entropy", 16);
            opts.n_speed = cfg.get_u64("n_speed", 200);
            opts.n_growth = cfg.get_u64("n_growth", 16);
            opts.samples = samples;
            opts.seed = seed;
            opts.workers = workers;
            opts.zero_threshold = cfg.get_f64("zero_threshold", 0.02);
            const auto rep = fundamental_inequality_report(ens, opts);
            rec.set_scalar("s", rep.s);
            rec.set_scalar("v", rep.v);
            rec.set_scalar("h", rep.h);
            rec.set_verdict("lower_ok", rep.lower_ok);
            rec.set_verdict("upper_ok", rep.upper_ok);
            rec.set_verdict("liouville", rep.liouville);
            rec.set_text("verdict", rep.verdict);
            if (rep.violation) out.exit_code = kVerdictFailure;
        } else if (op == "stationarity") {
            const Ensemble ens = make_ensemble(cfg);
            const auto rep = stationarity_test(ens, cfg.get_u64("n", 1),
                                               static_cast<std::uint32_t>(cfg.get_u64("r", 2)), samples,
                                               seed, workers);
            rec.set_scalar("tv", rep.tv);
            rec.set_scalar("null_q95", rep.null_q95);
            rec.set_verdict("stationary", rep.pass);
            rec.set_verdict("exact", rep.exact);
            if (!rep.pass) out.exit_code = kVerdictFailure;
        } else if (op == "reversibility") {
            const Ensemble ens = make_ensemble(cfg);
            const auto rep = reversibility_test(ens, static_cast<std::uint32_t>(cfg.get_u64("r", 2)),
                                                samples, seed, workers);
            rec.set_scalar("tv", rep.tv);
            rec.set_scalar("null_q95", rep.null_q95);
            rec.set_verdict("reversible", rep.pass);
            rec.set_verdict("exact", rep.exact);
            if (!rep.pass) out.exit_code = kVerdictFailure;
        } else if (op == "mtp") {
            const Ensemble ens = make_ensemble(cfg);
            const auto r = static_cast<std::uint32_t>(cfg.get_u64("r", 2));
            const std::string fname = cfg.get_str("f", "class_hash");
            const MassTransportF f = fname == "adjacent" ? mtp_indicator_adjacent() : mtp_class_hash(r);
            const auto rep = mtp_test(ens, f, r, samples, seed, workers);
            rec.set_scalar("sent", rep.sent);
            rec.set_scalar("received", rep.received);
            rec.set_verdict("mass_transport", rep.pass);
            if (!rep.pass) out.exit_code = kVerdictFailure;
        } else if (op == "cocycle") {
            const Ensemble ens = make_ensemble(cfg);
            const auto r = static_cast<std::uint32_t>(cfg.get_u64("r", 2));
            const auto table = estimate_delta(ens, r, samples, seed, workers);
            nlohmann::json classes = nlohmann::json::array();
            for (const auto& e : table.entries) {
                classes.push_back({{"class", e.cls.hex()},
                                   {"reversed", e.reversed.hex()},
                                   {"mu_fwd", e.mu_fwd},
                                   {"mu_bwd", e.mu_bwd},
                                   {"delta", e.delta},
                                   {"bwd_only", e.bwd_only}});
            }
            rec.j["results"]["classes"] = classes;
            const auto el = elog_delta(table);
            rec.set_scalar("elog_delta", el.value);
            rec.set_scalar("ballistic_bound", el.ballistic_bound);
            const RootedMultigraph g = ens.sample(seed, 0);
            rec.set_scalar("harmonicity_deviation",
                           harmonicity_check(table, g, std::vector<VertexId>{g.root()}));
            Rng rng(derive_seed(seed, 0xcc));
            const auto cyc = cycle_product_check(table, g, cfg.get_u64("cycles", 100),
                                                 cfg.get_u64("max_len", 50), rng);
            rec.set_scalar("cycle_max_abs_log", cyc.max_abs_log);
            rec.set_scalar("cycles_checked", static_cast<double>(cyc.cycles_checked));
            if (cyc.max_abs_log > 1e-6 && table.exact) out.exit_code = kVerdictFailure;
        } else if (op == "percolation") {
            LrpOptions opts;
            LongRangePercolation sample(static_cast<std::uint32_t>(cfg.get_u64("d", 1)), cfg.get_f64("beta"),
                                        cfg.get_f64("s"), cfg.get_i64("L", 1000), seed, opts.norm);
            rec.set_scalar("edges", static_cast<double>(sample.edge_count()));
            rec.set_scalar("deg_origin", static_cast<double>(sample.degree_of_origin()));
            const auto cluster = sample.cluster_of_origin();
            rec.set_scalar("cluster_size",
                           cluster ? static_cast<double>(cluster->vertex_count()) : 0.0);
        } else {
            throw ConfigError("unknown operation: " + op);
        }
    } catch (const ConfigError& e) {
        rec.set_text("error", e.what());
        out.exit_code = kConfigError;
    } catch (const HorizonExceeded& e) {
        rec.set_text("error", e.what());
        out.exit_code = kHorizonError;
    } catch (const std::bad_alloc&) {
        rec.set_text("error", "out of memory");
        out.exit_code = kHorizonError;
    }
    const auto t1 = std::chrono::steady_clock::now();
    rec.set_wall_time_ms(std::chrono::duration<double, std::milli>(t1 - t0).count());
    if (cfg.has("out")) append_jsonl(cfg.get_str("out"), rec);
    return out;
}

} // namespace ergolab

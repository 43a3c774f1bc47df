#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ergolab/cocycle.hpp"
#include "ergolab/config.hpp"
#include "ergolab/generators.hpp"
#include "ergolab/runner.hpp"
#include "ergolab/signature.hpp"
#include "ergolab/stats.hpp"
#include "ergolab/suite.hpp"
#include "ergolab/walk.hpp"

namespace py = pybind11;
using namespace ergolab;

namespace {

py::object json_to_py(const nlohmann::json& j) {
    switch (j.type()) {
        case nlohmann::json::value_t::null:
            return py::none();
        case nlohmann::json::value_t::boolean:
            return py::bool_(j.get<bool>());
        case nlohmann::json::value_t::number_integer:
            return py::int_(j.get<std::int64_t>());
        case nlohmann::json::value_t::number_unsigned:
            return py::int_(j.get<std::uint64_t>());
        case nlohmann::json::value_t::number_float:
            return py::float_(j.get<double>());
        case nlohmann::json::value_t::string:
            return py::str(j.get<std::string>());
        case nlohmann::json::value_t::array: {
            py::list out;
            for (const auto& item : j) out.append(json_to_py(item));
            return out;
        }
        case nlohmann::json::value_t::object: {
            py::dict out;
            for (auto it = j.begin(); it != j.end(); ++it) out[py::str(it.key())] = json_to_py(it.value());
            return out;
        }
        default:
            return py::none();
    }
}

py::dict value_to_py(const ValueWithError& v) {
    py::dict d;
    d["value"] = v.value;
    d["se"] = v.se;
    d["samples"] = v.samples;
    return d;
}

py::dict series_to_py(const EntropySeries& s) {
    py::dict d;
    d["n_max"] = s.n_max;
    d["exact"] = s.exact;
    d["samples"] = s.samples;
    d["h"] = s.h;
    d["se"] = s.se;
    d["increments"] = s.inc;
    const auto rate = entropy_rate(s);
    py::dict r;
    r["h"] = value_to_py(rate.h);
    r["tail_increment"] = rate.tail_increment;
    r["h_over_n"] = rate.h_over_n;
    r["monotone_ok"] = rate.monotone_ok;
    d["rate"] = r;
    return d;
}

} // namespace

PYBIND11_MODULE(_ergolab, m) {
    m.doc() = "Stationary random rooted graphs: generators, exact walk engine, entropy and "
              "speed estimators, stationarity tests and the Radon-Nikodym cocycle.";

    py::register_exception<HorizonExceeded>(m, "HorizonExceeded");
    py::register_exception<UnknownClassError>(m, "UnknownClassError");
    py::register_exception<ConfigError>(m, "ConfigError");

    py::class_<BallSignature>(m, "BallSignature")
        .def_property_readonly("radius", [](const BallSignature& s) { return s.radius; })
        .def_property_readonly("bi_rooted", [](const BallSignature& s) { return s.bi_rooted; })
        .def("hex", &BallSignature::hex)
        .def("__eq__", [](const BallSignature& a, const BallSignature& b) { return a == b; })
        .def("__hash__", &BallSignature::hash)
        .def("__repr__", [](const BallSignature& s) { return "BallSignature(" + s.hex() + ")"; });

    py::class_<RootedMultigraph>(m, "RootedMultigraph")
        .def_property_readonly("root", &RootedMultigraph::root)
        .def("vertex_count", &RootedMultigraph::vertex_count)
        .def("degree", &RootedMultigraph::degree)
        .def("neighbors",
             [](const RootedMultigraph& g, VertexId v) {
                 py::list out;
                 for (const auto& e : g.neighbors(v)) out.append(py::make_tuple(e.to, e.multiplicity));
                 return out;
             })
        .def("distance", &RootedMultigraph::distance)
        .def("ball", &RootedMultigraph::ball, py::arg("center"), py::arg("radius"))
        .def("ball_vertices",
             [](const RootedMultigraph& g, VertexId center, std::uint32_t r) {
                 py::list out;
                 for (const auto& [v, d] : g.ball_vertices(center, r)) out.append(py::make_tuple(v, d));
                 return out;
             })
        .def("vertex_label",
             [](const RootedMultigraph& g, VertexId v) -> py::object {
                 const auto lab = g.vertex_label(v);
                 return lab ? py::cast(*lab) : py::none();
             })
        .def("describe", &RootedMultigraph::describe)
        .def("rerooted", &RootedMultigraph::rerooted)
        .def("signature",
             [](const RootedMultigraph& g, VertexId center, std::uint32_t r,
                std::optional<VertexId> second) { return ball_signature(g, center, r, second); },
             py::arg("center"), py::arg("radius"), py::arg("second_root") = py::none())
        .def("edge_list",
             [](const RootedMultigraph& g) {
                 std::ostringstream ss;
                 g.write_edge_list(ss);
                 return ss.str();
             })
        .def("__repr__", [](const RootedMultigraph& g) {
            return "RootedMultigraph(vertices=" + std::to_string(g.vertex_count()) +
                   (g.is_lazy() ? ", lazy" : "") + ")";
        });

    py::class_<Ensemble>(m, "Ensemble")
        .def_readonly("kind", &Ensemble::kind)
        .def_readonly("deterministic", &Ensemble::deterministic)
        .def_readonly("transitive", &Ensemble::transitive)
        .def_readonly("degree_bound", &Ensemble::degree_bound)
        .def_property_readonly("params", [](const Ensemble& e) { return json_to_py(e.params); })
        .def("sample", &Ensemble::sample, py::arg("seed"), py::arg("replica"))
        .def("__repr__", [](const Ensemble& e) { return "Ensemble(" + e.kind + ")"; });

    // graphs and ensembles
    m.def("grandfather_graph", &grandfather_graph);
    m.def("lattice", &lattice, py::arg("d"));
    m.def("regular_tree", &regular_tree, py::arg("k"));
    m.def("canopy_tree", &canopy_tree, py::arg("n"));
    m.def("canopy_tree_infinite", &canopy_tree_infinite, py::arg("depth_horizon"),
          py::arg("root_depth") = 0, py::arg("reinforced") = false);
    m.def("reinforce_edges", &reinforce_edges);
    m.def("grandfather_ensemble", &grandfather_ensemble);
    m.def("lattice_ensemble", &lattice_ensemble, py::arg("d"));
    m.def("regular_tree_ensemble", &regular_tree_ensemble, py::arg("k"));
    m.def("canopy_infinite_ensemble", &canopy_infinite_ensemble, py::arg("depth_horizon"),
          py::arg("root_depth"), py::arg("reinforced"));
    m.def("augmented_galton_watson",
          [](const std::vector<double>& offspring) { return augmented_galton_watson(offspring); },
          py::arg("offspring"));
    m.def("lrp_cluster_ensemble",
          [](std::uint32_t d, double beta, double s, std::int64_t L) {
              return lrp_cluster_ensemble(d, beta, s, L);
          },
          py::arg("d"), py::arg("beta"), py::arg("s"), py::arg("L"));
    m.def("finite_graph_ensemble",
          [](const RootedMultigraph& g, const std::string& rooting) {
              return finite_graph_ensemble(g,
                                           rooting == "uniform" ? Rooting::Uniform : Rooting::DegreeBiased);
          },
          py::arg("graph"), py::arg("rooting") = "degree_biased");
    m.def("bias_by_degree",
          [](const Ensemble& e, double cap) {
              BiasOptions opts;
              opts.degree_cap = cap;
              return bias_by_degree(e, opts);
          },
          py::arg("ensemble"), py::arg("degree_cap") = 256.0);
    m.def("unbias_by_degree", &unbias_by_degree);

    // epsilon/xi recursion and the reinforced-tree root law
    m.def("epsilon_sequence", [](std::uint64_t k_max) {
        const auto seq = epsilon_sequence(k_max);
        py::dict d;
        d["epsilons"] = seq.epsilons;
        d["xis"] = seq.xis;
        const auto [lo, hi] = seq.envelope_constants();
        d["envelope"] = py::make_tuple(lo, hi);
        return d;
    });
    m.def("canopy_ball_size",
          [](std::uint64_t k_max, std::uint64_t depth, std::uint64_t r) {
              return canopy_ball_size(epsilon_sequence(k_max), depth, r);
          },
          py::arg("k_max"), py::arg("depth"), py::arg("r"));
    m.def("root_depth_distribution", [](std::uint32_t n) {
        const auto rd = root_depth_distribution(n);
        py::dict d;
        d["enumerated"] = rd.enumerated;
        d["closed_form"] = rd.closed_form;
        d["oriented_edge_mass"] = rd.oriented_edge_mass;
        d["total_oriented_edges"] = rd.total_oriented_edges;
        return d;
    });

    // walk engine
    m.def("simulate_walk",
          [](const RootedMultigraph& g, std::uint64_t n, std::uint64_t seed) {
              Rng rng(seed);
              return simulate_path(g, g.root(), n, rng).vertices;
          },
          py::arg("graph"), py::arg("n"), py::arg("seed"));
    m.def("joint_entropy", &joint_entropy, py::arg("graph"), py::arg("root"), py::arg("a"), py::arg("b"));
    m.def("step_entropy", &step_entropy);
    m.def("spine_resistance", &spine_resistance, py::arg("k_from"), py::arg("k_to"));
    m.def("varopoulos_carne_check",
          [](const RootedMultigraph& g, std::uint64_t n, double M, bool all_times) {
              const auto rep = varopoulos_carne_check(g, g.root(), n, M, all_times);
              py::dict d;
              d["max_ratio"] = rep.max_ratio;
              d["atoms_checked"] = rep.atoms_checked;
              d["pass"] = rep.pass;
              return d;
          },
          py::arg("graph"), py::arg("n"), py::arg("degree_bound"), py::arg("all_times") = false);

    // estimators
    m.def("entropy_series",
          [](const Ensemble& e, std::uint64_t n_max, std::uint64_t samples, std::uint64_t seed,
             std::uint32_t workers) {
              return series_to_py(estimate_h_series(e, n_max, samples, seed, workers));
          },
          py::arg("ensemble"), py::arg("n_max"), py::arg("samples") = 1000, py::arg("seed") = 1,
          py::arg("workers") = 1);
    m.def("speed",
          [](const Ensemble& e, std::uint64_t n, std::uint64_t samples, std::uint64_t seed,
             std::uint32_t workers) { return value_to_py(speed_estimate(e, n, samples, seed, workers)); },
          py::arg("ensemble"), py::arg("n") = 200, py::arg("samples") = 1000, py::arg("seed") = 1,
          py::arg("workers") = 1);
    m.def("walk_range",
          [](const Ensemble& e, std::uint64_t n, std::uint64_t samples, std::uint64_t seed,
             std::uint32_t workers) {
              const auto r = range_estimate(e, n, samples, seed, workers);
              py::dict d;
              d["range_over_n"] = value_to_py(r.range_over_n);
              d["non_return"] = value_to_py(r.non_return);
              return d;
          },
          py::arg("ensemble"), py::arg("n") = 1000, py::arg("samples") = 1000, py::arg("seed") = 1,
          py::arg("workers") = 1);
    m.def("growth",
          [](const Ensemble& e, std::uint64_t n_max, std::uint64_t samples, std::uint64_t seed,
             std::uint32_t workers) {
              const auto g = growth_estimate(e, n_max, samples, seed, workers);
              py::dict d;
              d["v"] = value_to_py(g.v);
              d["log_ball"] = g.log_ball;
              d["exact"] = g.exact;
              return d;
          },
          py::arg("ensemble"), py::arg("n_max") = 16, py::arg("samples") = 200, py::arg("seed") = 1,
          py::arg("workers") = 1);
    m.def("fundamental_inequality",
          [](const Ensemble& e, std::uint64_t n_entropy, std::uint64_t n_speed, std::uint64_t n_growth,
             std::uint64_t samples, std::uint64_t seed, std::uint32_t workers, double zero_threshold) {
              InequalityOptions o;
              o.n_entropy = n_entropy;
              o.n_speed = n_speed;
              o.n_growth = n_growth;
              o.samples = samples;
              o.seed = seed;
              o.workers = workers;
              o.zero_threshold = zero_threshold;
              const auto rep = fundamental_inequality_report(e, o);
              py::dict d;
              d["s"] = value_to_py(rep.s);
              d["v"] = value_to_py(rep.v);
              d["h"] = value_to_py(rep.h);
              d["lower_ok"] = rep.lower_ok;
              d["upper_ok"] = rep.upper_ok;
              d["liouville"] = rep.liouville;
              d["verdict"] = rep.verdict;
              return d;
          },
          py::arg("ensemble"), py::arg("n_entropy") = 16, py::arg("n_speed") = 200,
          py::arg("n_growth") = 16, py::arg("samples") = 2000, py::arg("seed") = 1, py::arg("workers") = 1,
          py::arg("zero_threshold") = 0.02);
    m.def("stationarity",
          [](const Ensemble& e, std::uint64_t n, std::uint32_t r, std::uint64_t samples, std::uint64_t seed,
             std::uint32_t workers) {
              const auto rep = stationarity_test(e, n, r, samples, seed, workers);
              py::dict d;
              d["tv"] = rep.tv;
              d["exact"] = rep.exact;
              d["null_q95"] = rep.null_q95;
              d["pass"] = rep.pass;
              return d;
          },
          py::arg("ensemble"), py::arg("n") = 1, py::arg("r") = 2, py::arg("samples") = 2000,
          py::arg("seed") = 1, py::arg("workers") = 1);
    m.def("reversibility",
          [](const Ensemble& e, std::uint32_t r, std::uint64_t samples, std::uint64_t seed,
             std::uint32_t workers) {
              const auto rep = reversibility_test(e, r, samples, seed, workers);
              py::dict d;
              d["tv"] = rep.tv;
              d["exact"] = rep.exact;
              d["null_q95"] = rep.null_q95;
              d["pass"] = rep.pass;
              return d;
          },
          py::arg("ensemble"), py::arg("r") = 2, py::arg("samples") = 2000, py::arg("seed") = 1,
          py::arg("workers") = 1);
    m.def("mass_transport",
          [](const Ensemble& e, const std::string& f, std::uint32_t r, std::uint64_t samples,
             std::uint64_t seed, std::uint32_t workers) {
              const MassTransportF fn = f == "adjacent" ? mtp_indicator_adjacent() : mtp_class_hash(r);
              const auto rep = mtp_test(e, fn, r, samples, seed, workers);
              py::dict d;
              d["sent"] = value_to_py(rep.sent);
              d["received"] = value_to_py(rep.received);
              d["exact"] = rep.exact;
              d["pass"] = rep.pass;
              return d;
          },
          py::arg("ensemble"), py::arg("f") = "class_hash", py::arg("r") = 2, py::arg("samples") = 2000,
          py::arg("seed") = 1, py::arg("workers") = 1);
    m.def("cocycle",
          [](const Ensemble& e, std::uint32_t r, std::uint64_t samples, std::uint64_t seed,
             std::uint32_t workers) {
              const auto table = estimate_delta(e, r, samples, seed, workers);
              py::list classes;
              for (const auto& entry : table.entries) {
                  py::dict c;
                  c["cls"] = entry.cls.hex();
                  c["reversed"] = entry.reversed.hex();
                  c["mu_fwd"] = entry.mu_fwd;
                  c["mu_bwd"] = entry.mu_bwd;
                  c["delta"] = entry.delta;
                  c["bwd_only"] = entry.bwd_only;
                  classes.append(c);
              }
              const auto el = elog_delta(table);
              py::dict d;
              d["classes"] = classes;
              d["exact"] = table.exact;
              d["elog_delta"] = value_to_py(el.value);
              d["ballistic_bound"] = el.ballistic_bound;
              return d;
          },
          py::arg("ensemble"), py::arg("r") = 2, py::arg("samples") = 2000, py::arg("seed") = 1,
          py::arg("workers") = 1);

    // experiment runner and batteries
    m.def("run",
          [](const std::string& config_text) {
              const auto cfg = ExperimentConfig::parse(config_text);
              const auto out = run_experiment(cfg);
              py::dict d;
              d["record"] = json_to_py(out.record.j);
              d["exit_code"] = out.exit_code;
              return d;
          },
          py::arg("config_text"));
    m.def("run_suite",
          [](const std::string& name, std::uint64_t seed, std::uint32_t workers) {
              const auto results = name == "acceptance" ? run_acceptance(std::nullopt, seed, workers)
                                                        : run_invariants(seed);
              py::list out;
              for (const auto& r : results) {
                  py::dict d;
                  d["id"] = r.id;
                  d["name"] = r.name;
                  d["pass"] = r.pass;
                  d["detail"] = r.detail;
                  d["seconds"] = r.seconds;
                  out.append(d);
              }
              return out;
          },
          py::arg("name"), py::arg("seed") = 1, py::arg("workers") = 1);

    m.attr("__version__") = library_version();
}

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "wds/completion.hpp"
#include "wds/hydraulics.hpp"
#include "wds/io.hpp"
#include "wds/network.hpp"
#include "wds/observability.hpp"
#include "wds/structure.hpp"
#include "wds/testkit.hpp"

namespace py = pybind11;

namespace {

// Python dict/list <-> JSON goes through the json module as text.
wds::io::json to_json(const py::object& obj) {
    auto dumps = py::module_::import("json").attr("dumps");
    return wds::io::json::parse(dumps(obj).cast<std::string>());
}

py::object to_python(const wds::io::json& j) {
    return py::module_::import("json").attr("loads")(j.dump());
}

wds::ObservationSet observations_from(const py::object& obj) { return wds::io::observations_from_json(to_json(obj)); }

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Hydraulic state completion for water distribution networks";

    py::register_exception<wds::NetworkError>(m, "NetworkError", PyExc_ValueError);
    py::register_exception<wds::ObservationError>(m, "ObservationError", PyExc_ValueError);
    py::register_exception<wds::io::FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<wds::testkit::InfeasibleConfig>(m, "InfeasibleConfig", PyExc_ValueError);
    auto completion_error = py::register_exception<wds::CompletionError>(m, "CompletionError", PyExc_RuntimeError);
    py::register_exception<wds::InconsistentObservations>(m, "InconsistentObservations", completion_error.ptr());
    py::register_exception<wds::NonConvergence>(m, "NonConvergence", completion_error.ptr());
    py::register_exception<wds::DecompositionMismatch>(m, "DecompositionMismatch", completion_error.ptr());

    m.attr("HAZEN_WILLIAMS_EXPONENT") = wds::kHazenWilliamsExponent;

    py::class_<wds::Network>(m, "Network")
        .def_static(
            "from_dict", [](const py::object& d) { return wds::build_network(wds::io::network_spec_from_json(to_json(d))); },
            py::arg("spec"))
        .def("to_dict", [](const wds::Network& n) { return to_python(wds::io::network_to_json(n)); })
        .def_property_readonly("node_ids",
                               [](const wds::Network& n) {
                                   std::vector<std::string> ids;
                                   for (const auto& v : n.nodes()) ids.push_back(v.id);
                                   return ids;
                               })
        .def_property_readonly("pipe_ids",
                               [](const wds::Network& n) {
                                   std::vector<std::string> ids;
                                   for (const auto& p : n.pipes()) ids.push_back(p.id);
                                   return ids;
                               })
        .def_property_readonly("reservoirs", &wds::Network::reservoirs)
        .def_property_readonly("consumers", &wds::Network::consumers)
        .def_property_readonly("resistances", &wds::Network::resistances)
        .def("__repr__", [](const wds::Network& n) {
            return "<Network nodes=" + std::to_string(n.node_count()) + " pipes=" + std::to_string(n.pipe_count()) +
                   " reservoirs=" + std::to_string(n.reservoir_count()) + ">";
        });

    py::class_<wds::HydraulicState>(m, "HydraulicState")
        .def(py::init<>())
        .def_readwrite("heads", &wds::HydraulicState::heads)
        .def_readwrite("flows", &wds::HydraulicState::flows)
        .def_readwrite("demands", &wds::HydraulicState::demands);

    py::class_<wds::ResidualReport>(m, "ResidualReport")
        .def_readonly("energy_inf_norm", &wds::ResidualReport::energy_inf_norm)
        .def_readonly("mass_inf_norm", &wds::ResidualReport::mass_inf_norm)
        .def_readonly("max_energy_pipe", &wds::ResidualReport::max_energy_pipe)
        .def_readonly("max_mass_node", &wds::ResidualReport::max_mass_node)
        .def("physically_correct", &wds::ResidualReport::physically_correct, py::arg("tol"));

    py::class_<wds::SolveReport>(m, "SolveReport")
        .def_readonly("state", &wds::SolveReport::state)
        .def_readonly("iterations", &wds::SolveReport::iterations)
        .def_readonly("final_residual", &wds::SolveReport::final_residual)
        .def_property_readonly("theorem", [](const wds::SolveReport& r) { return std::string(wds::to_string(r.theorem)); })
        .def_readonly("warnings", &wds::SolveReport::warnings);

    py::class_<wds::EdgeDecomposition>(m, "EdgeDecomposition")
        .def_readonly("independent", &wds::EdgeDecomposition::independent)
        .def_readonly("dependent", &wds::EdgeDecomposition::dependent);

    m.def("resistance",
          [](double length, double diameter, double roughness) { return wds::resistance({length, diameter, roughness}); },
          py::arg("length_m"), py::arg("diameter_m"), py::arg("roughness"));
    m.def("incidence_matrix", [](const wds::Network& n) { return wds::IncidenceMatrix(n).entries(); });
    m.def("submatrix_rank",
          [](const wds::Network& n, const std::vector<std::size_t>& rows) {
              return wds::submatrix_rank(wds::IncidenceMatrix(n), rows).rank;
          });
    m.def("select_independent_edges", [](const wds::Network& n) { return wds::select_independent_edges(n); });
    m.def("cycle_space_basis", [](const wds::Network& n) { return wds::cycle_space_basis(n).vectors; });
    m.def(
        "image_membership",
        [](const wds::Network& n, const Eigen::VectorXd& target, double tol) -> py::object {
            auto r = wds::image_membership(n, target, tol);
            if (auto* hit = std::get_if<wds::Member>(&r)) return py::make_tuple(true, hit->consumer_heads, hit->residual);
            return py::make_tuple(false, py::none(), std::get<wds::NotMember>(r).residual);
        },
        py::arg("net"), py::arg("target"), py::arg("tol") = wds::kDefaultMembershipTolerance,
        "Returns (is_member, consumer_heads or None, relative_residual).");

    m.def("head_loss", &wds::head_loss, py::arg("q"), py::arg("r"));
    m.def("invert_head_loss", &wds::invert_head_loss, py::arg("dh"), py::arg("r"));
    m.def("demands_from_flows", &wds::demands_from_flows);
    m.def("residuals", &wds::residuals);
    m.def("monotonicity_gap", &wds::monotonicity_gap);

    m.def("complete_from_heads", &wds::complete_from_heads, py::arg("net"), py::arg("heads"));
    m.def("complete_from_reservoir_heads_and_flows", &wds::complete_from_reservoir_heads_and_flows, py::arg("net"),
          py::arg("reservoir_heads"), py::arg("flows"), py::arg("tol") = wds::kDefaultMembershipTolerance);
    m.def("complete_from_forest_flows", &wds::complete_from_forest_flows, py::arg("net"), py::arg("reservoir_heads"),
          py::arg("forest_flows"), py::arg("decomposition"));
    m.def(
        "solve_reservoir_heads_demands",
        [](const wds::Network& n, const Eigen::VectorXd& h_r, const Eigen::VectorXd& d, int max_iterations,
           double tolerance, bool randomized, std::uint64_t seed) {
            wds::SolverOptions opts;
            opts.max_iterations = max_iterations;
            opts.tolerance = tolerance;
            opts.initial_strategy = randomized ? wds::InitialStrategy::Randomized : wds::InitialStrategy::ForestBalanced;
            opts.seed = seed;
            return wds::solve_reservoir_heads_demands(n, h_r, d, opts);
        },
        py::arg("net"), py::arg("reservoir_heads"), py::arg("demands"), py::arg("max_iterations") = 100,
        py::arg("tolerance") = wds::kSolverTolerance, py::arg("randomized_start") = false, py::arg("seed") = 0);

    m.def(
        "solve",
        [](const wds::Network& n, const py::object& obs, const std::string& theorem) {
            const auto o = observations_from(obs);
            std::optional<wds::Theorem> t;
            for (auto c : {wds::Theorem::AllHeads, wds::Theorem::HeadsAndFlows, wds::Theorem::ForestFlows,
                           wds::Theorem::DemandDriven})
                if (theorem == wds::to_string(c)) t = c;
            if (theorem == "auto") {
                const auto v = wds::classify_observation_pattern(n, o, {.prefer_flow_consistency = true});
                t = wds::theorem_for(v.verdict);
                if (!t) throw wds::MissingObservation("pattern not covered: " + v.detail);
            }
            if (!t) throw std::invalid_argument("unknown theorem '" + theorem + "'");
            return wds::complete(n, o, *t);
        },
        py::arg("net"), py::arg("observations"), py::arg("theorem") = "auto");
    m.def(
        "classify",
        [](const wds::Network& n, const py::object& pattern, bool prefer_flow_consistency) {
            return to_python(wds::io::verdict_to_json(
                wds::classify_observation_pattern(n, observations_from(pattern), {prefer_flow_consistency})));
        },
        py::arg("net"), py::arg("pattern"), py::arg("prefer_flow_consistency") = false);
    m.def("state_to_dict",
          [](const wds::Network& n, const wds::HydraulicState& s) { return to_python(wds::io::state_to_json(n, s)); });

    m.def(
        "random_network",
        [](std::uint64_t seed, std::size_t reservoirs, std::size_t consumers, std::size_t extra_edges) {
            wds::testkit::GeneratorConfig cfg;
            cfg.seed = seed;
            cfg.reservoirs = reservoirs;
            cfg.consumers = consumers;
            cfg.extra_edges = extra_edges;
            return wds::testkit::random_connected_wds(cfg);
        },
        py::arg("seed"), py::arg("reservoirs"), py::arg("consumers"), py::arg("extra_edges"));
    m.def("random_ground_truth_state", &wds::testkit::random_ground_truth_state, py::arg("net"), py::arg("seed"),
          py::arg("head_range") = std::pair<double, double>{50.0, 150.0});
}

#include "wds/cli.hpp"

#include "wds/completion.hpp"
#include "wds/io.hpp"
#include "wds/observability.hpp"
#include "wds/structure.hpp"
#include "wds/testkit.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <map>
#include <optional>
#include <ostream>

namespace wds::cli {

namespace {

using io::json;

void emit(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

Network load_network(const std::string& path) {
    const auto spec = io::network_spec_from_json(io::read_json_file(path));
    return build_network(spec);
}

int cmd_validate(const std::string& path, std::ostream& out, std::ostream& err) {
    const auto spec = io::network_spec_from_json(io::read_json_file(path));
    try {
        const auto net = build_network(spec);
        const auto dec = select_independent_edges(net);
        emit(out, {{"valid", true},
                   {"nodes", net.node_count()},
                   {"pipes", net.pipe_count()},
                   {"reservoirs", net.reservoir_count()},
                   {"consumers", net.consumer_count()},
                   {"cycle_space_dimension", dec.dependent.size()}});
        return kOk;
    } catch (const NetworkError& e) {
        emit(out, {{"valid", false}, {"error", to_string(e.kind())}, {"message", e.what()}});
        err << "invalid network: " << e.what() << '\n';
        return kFailed;
    }
}

int cmd_analyze(const std::string& net_path, const std::string& pattern_path, bool prefer_flows, std::ostream& out) {
    const auto net = load_network(net_path);
    const auto pattern = io::observations_from_json(io::read_json_file(pattern_path));
    const auto verdict = classify_observation_pattern(net, pattern, {prefer_flows});
    auto j = io::verdict_to_json(verdict);
    if (verdict.verdict == Verdict::DeterminedForestFlows) {
        std::vector<std::size_t> known;
        for (std::size_t e = 0; e < net.pipe_count(); ++e)
            if (pattern.flows.count(net.pipe(e).id)) known.push_back(e);
        j["forest"] = io::decomposition_to_json(net, select_independent_edges(net, known));
    }
    emit(out, j);
    return kOk;
}

const std::map<std::string, std::optional<Theorem>> kTheorems = {
    {"auto", std::nullopt},
    {"all-heads", Theorem::AllHeads},
    {"heads-flows", Theorem::HeadsAndFlows},
    {"forest-flows", Theorem::ForestFlows},
    {"demand-driven", Theorem::DemandDriven},
};

struct SolveArgs {
    std::string net_path;
    std::string obs_path;
    std::string theorem = "auto";
    std::optional<double> tol;
    std::optional<int> max_iter;
};

int cmd_solve(const SolveArgs& a, std::ostream& out, std::ostream& err) {
    const auto net = load_network(a.net_path);
    const auto obs = io::observations_from_json(io::read_json_file(a.obs_path));
    validate_observations(net, obs);

    std::optional<Theorem> theorem = kTheorems.at(a.theorem);
    if (!theorem) {
        // Complete flow sets go to the heads-and-flows solver so that
        // inconsistent values are reported rather than silently overridden.
        const auto verdict = classify_observation_pattern(net, obs, {.prefer_flow_consistency = true});
        theorem = theorem_for(verdict.verdict);
        if (!theorem) {
            emit(out, {{"error", "NotCovered"}, {"verdict", io::verdict_to_json(verdict)}});
            err << "not covered: " << verdict.detail << '\n';
            return kNotCovered;
        }
    }

    SolverOptions opts;
    double membership_tol = kDefaultMembershipTolerance;
    if (a.tol) opts.tolerance = membership_tol = *a.tol;
    if (a.max_iter) opts.max_iterations = *a.max_iter;

    try {
        emit(out, io::report_to_json(net, complete(net, obs, *theorem, opts, membership_tol)));
        return kOk;
    } catch (const MissingObservation& e) {
        emit(out, {{"error", "NotCovered"}, {"theorem", to_string(*theorem)}, {"message", e.what()}});
        err << "not covered: " << e.what() << '\n';
        return kNotCovered;
    } catch (const InconsistentObservations& e) {
        emit(out, {{"error", "InconsistentObservations"}, {"residual", e.residual()}, {"message", e.what()}});
        err << e.what() << '\n';
        return kInconsistent;
    } catch (const NonConvergence& e) {
        emit(out, {{"error", "NonConvergence"},
                   {"iterations", e.iterations()},
                   {"residual", e.residual()},
                   {"message", e.what()}});
        err << e.what() << '\n';
        return kNonConvergence;
    }
}

int cmd_check(const std::string& net_path, const std::string& state_path, double tol, std::ostream& out) {
    const auto net = load_network(net_path);
    const auto state = io::state_from_json(net, io::read_json_file(state_path));
    const auto report = residuals(net, state);
    auto j = io::residual_to_json(report);
    j["tolerance"] = tol;
    j["physically_correct"] = report.physically_correct(tol);
    emit(out, j);
    return report.physically_correct(tol) ? kOk : kFailed;
}

struct GenerateArgs {
    testkit::GeneratorConfig cfg;
    std::string state_out;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
    const auto net = testkit::random_connected_wds(a.cfg);
    if (!a.state_out.empty()) {
        const auto state = testkit::random_ground_truth_state(net, a.cfg.seed, a.cfg.head_range);
        std::ofstream f(a.state_out);
        if (!f) throw io::FormatError("cannot write '" + a.state_out + "'");
        f << io::state_to_json(net, state).dump(2) << '\n';
    }
    emit(out, io::network_to_json(net));
    return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Hydraulic state completion for water distribution networks", "wds"};
    app.require_subcommand(1);

    std::string net_path;
    std::string aux_path;
    bool prefer_flows = false;
    double check_tol = kSolverTolerance;
    SolveArgs solve;
    GenerateArgs gen;

    auto* validate = app.add_subcommand("validate", "Validate a network file");
    validate->add_option("network", net_path, "Network JSON")->required();

    auto* analyze = app.add_subcommand("analyze", "Classify an observation pattern");
    analyze->add_option("network", net_path, "Network JSON")->required();
    analyze->add_option("--pattern", aux_path, "Observation JSON (values ignored)")->required();
    analyze->add_flag("--prefer-flow-consistency", prefer_flows,
                      "Report complete flow sets as conditionally determined");

    auto* solve_cmd = app.add_subcommand("solve", "Complete the hydraulic state from observations");
    solve_cmd->add_option("network", solve.net_path, "Network JSON")->required();
    solve_cmd->add_option("--obs", solve.obs_path, "Observation JSON")->required();
    solve_cmd->add_option("--theorem", solve.theorem, "Completion to run")
        ->check(CLI::IsMember({"auto", "all-heads", "heads-flows", "forest-flows", "demand-driven"}));
    solve_cmd->add_option("--tol", solve.tol, "Solver / consistency tolerance")->check(CLI::PositiveNumber);
    solve_cmd->add_option("--max-iter", solve.max_iter, "Newton iteration cap")->check(CLI::NonNegativeNumber);

    auto* check = app.add_subcommand("check", "Residuals of a hydraulic state");
    check->add_option("network", net_path, "Network JSON")->required();
    check->add_option("--state", aux_path, "State JSON")->required();
    check->add_option("--tol", check_tol, "Tolerance on both residual norms")->check(CLI::PositiveNumber);

    auto* generate = app.add_subcommand("generate", "Write a random connected network");
    generate->add_option("--seed", gen.cfg.seed, "Generator seed")->required();
    generate->add_option("--reservoirs", gen.cfg.reservoirs, "Reservoir count")->required()->check(CLI::PositiveNumber);
    generate->add_option("--consumers", gen.cfg.consumers, "Consumer count")->required()->check(CLI::PositiveNumber);
    generate->add_option("--extra-edges", gen.cfg.extra_edges, "Pipes beyond a spanning tree")->required();
    generate->add_option("--state-out", gen.state_out, "Also write a ground-truth state here");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        err << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (*validate) return cmd_validate(net_path, out, err);
        if (*analyze) return cmd_analyze(net_path, aux_path, prefer_flows, out);
        if (*solve_cmd) return cmd_solve(solve, out, err);
        if (*check) return cmd_check(net_path, aux_path, check_tol, out);
        if (*generate) return cmd_generate(gen, out);
    } catch (const io::FormatError& e) {
        err << "input error: " << e.what() << '\n';
        return kDataError;
    } catch (const NetworkError& e) {
        err << "invalid network: " << e.what() << '\n';
        return kDataError;
    } catch (const ObservationError& e) {
        err << "invalid observations: " << e.what() << '\n';
        return kDataError;
    } catch (const testkit::InfeasibleConfig& e) {
        err << "usage error: " << e.what() << '\n';
        return kUsage;
    }
    err << "usage error: no subcommand\n";
    return kUsage;
}

}  // namespace wds::cli

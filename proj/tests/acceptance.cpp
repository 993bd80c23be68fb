// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include "wds/completion.hpp"
#include "wds/exact.hpp"
#include "wds/hydraulics.hpp"
#include "wds/observability.hpp"
#include "wds/random.hpp"
#include "wds/structure.hpp"
#include "wds/testkit.hpp"

#include "support/networks.hpp"

#include <Eigen/LU>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

using namespace wds;

namespace {

struct Outcome {
    bool pass = true;
    std::string note;
    std::size_t cases = 0;
    std::ostringstream failures;
    int failure_count = 0;

    void require(bool ok, const std::string& what) {
        ++cases;
        if (ok) return;
        pass = false;
        if (failure_count++ < 3) failures << (failure_count > 1 ? "; " : "") << what;
    }
};

double inf_dist(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return a.size() == 0 ? 0.0 : (a - b).lpNorm<Eigen::Infinity>();
}

/// Random connected network with node count in [3, 40].
Network sample_network(std::uint64_t seed) {
    Rng pick(seed ^ 0x9e3779b97f4a7c15ULL);
    testkit::GeneratorConfig cfg;
    cfg.seed = seed;
    const std::size_t nodes = 3 + pick.below(38);
    cfg.reservoirs = 1 + pick.below(std::min<std::uint64_t>(3, nodes - 1));
    cfg.consumers = nodes - cfg.reservoirs;
    cfg.extra_edges = pick.below(nodes / 2 + 2);
    return testkit::random_connected_wds(cfg);
}

std::vector<Network> sample_networks(std::size_t count, std::uint64_t base) {
    std::vector<Network> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) out.push_back(sample_network(base + i));
    return out;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
}

std::map<std::size_t, double> pick_flows(const Eigen::VectorXd& q, const std::vector<std::size_t>& pipes) {
    std::map<std::size_t, double> out;
    for (auto e : pipes) out[e] = q[static_cast<Eigen::Index>(e)];
    return out;
}

// ---------------------------------------------------------------------------

void rank_theorem(Outcome& o) {
    const auto nets = sample_networks(200, 1000);
    Rng rng(1);
    for (std::size_t k = 0; k < nets.size(); ++k) {
        const auto& net = nets[k];
        const auto b = incidence_matrix(net);
        const auto n = net.node_count();
        for (int t = 0; t < 5; ++t) {
            std::vector<std::size_t> all(n);
            std::iota(all.begin(), all.end(), std::size_t{0});
            for (std::size_t i = n; i-- > 1;) std::swap(all[i], all[rng.below(i + 1)]);
            const std::size_t size = 1 + rng.below(n - 1);
            std::vector<std::size_t> subset(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(size));
            const auto r = submatrix_rank(b, subset);
            const Eigen::FullPivLU<Eigen::MatrixXd> lu(b.row_submatrix(subset).cast<double>());
            o.require(r.rank == size && static_cast<std::size_t>(lu.rank()) == size && r.proper_subset,
                      "network " + std::to_string(k) + " |S|=" + std::to_string(size) + " rank " + std::to_string(r.rank));
        }
    }
    o.note = "1000 subsets of 200 networks";
}

void forest_decomposition(Outcome& o) {
    const auto nets = sample_networks(200, 1000);
    for (std::size_t k = 0; k < nets.size(); ++k) {
        const auto& net = nets[k];
        const auto dec = select_independent_edges(net);
        const auto tag = "network " + std::to_string(k);
        o.require(dec.independent.size() == net.consumer_count(), tag + ": |Ei| != n_c");

        std::vector<std::size_t> parent(net.node_count());
        std::iota(parent.begin(), parent.end(), std::size_t{0});
        bool acyclic = true;
        for (auto e : dec.independent) {
            const auto a = find_root(parent, net.pipe(e).tail);
            const auto c = find_root(parent, net.pipe(e).head);
            if (a == c) acyclic = false;
            parent[a] = c;
        }
        o.require(acyclic, tag + ": forest has a cycle");

        const auto block = incidence_matrix(net).submatrix(net.consumers(), dec.independent);
        o.require(exact_determinant(block) != Rational(0), tag + ": singular forest block");

        std::vector<int> reservoirs_in(net.node_count(), 0);
        for (auto v : net.reservoirs()) ++reservoirs_in[find_root(parent, v)];
        bool one_each = true;
        for (auto v : net.consumers()) one_each = one_each && reservoirs_in[find_root(parent, v)] == 1;
        o.require(one_each, tag + ": consumer tree without exactly one reservoir");
    }
    o.note = "200 networks";
}

void strict_monotonicity(Outcome& o) {
    Rng rng(3);
    std::size_t pairs = 0;
    for (std::uint64_t seed = 0; pairs < 1000; ++seed) {
        const auto net = sample_network(3000 + seed);
        const auto np = static_cast<Eigen::Index>(net.pipe_count());
        for (int t = 0; t < 10 && pairs < 1000; ++t, ++pairs) {
            Eigen::VectorXd q1(np), q2(np);
            for (Eigen::Index e = 0; e < np; ++e) {
                q1[e] = rng.uniform(-2.0, 2.0);
                // Mostly small differences, sometimes a single coordinate only.
                q2[e] = t % 3 == 0 ? q1[e] : q1[e] + rng.uniform(-1.0, 1.0) * std::pow(10.0, -rng.uniform(0.0, 6.0));
            }
            if (t % 3 == 0) q2[static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(np)))] += 1e-7;
            const double gap = monotonicity_gap(net, q1, q2);
            long double oracle = 0.0L;
            for (Eigen::Index e = 0; e < np; ++e) {
                const long double r = net.resistances()[e];
                auto f = [&](long double q) { return r * q * std::pow(std::fabs(q), 0.852L); };
                oracle += (f(q1[e]) - f(q2[e])) * (static_cast<long double>(q1[e]) - q2[e]);
            }
            o.require(gap > 0.0, "pair " + std::to_string(pairs) + ": gap " + std::to_string(gap));
            o.require(std::fabs(gap - static_cast<double>(oracle)) <= 1e-9 * std::max(1.0, std::fabs(gap)) + 1e-14,
                      "pair " + std::to_string(pairs) + ": disagrees with oracle");
            o.require(std::fabs(monotonicity_gap(net, q1, q1)) <= 1e-14, "q1 = q2 gap is nonzero");
        }
    }
    o.note = "1000 pairs";
}

void round_trip(Outcome& o) {
    const auto nets = sample_networks(100, 5000);
    double worst = 0.0;
    for (std::size_t k = 0; k < nets.size(); ++k) {
        const auto& net = nets[k];
        const auto truth = testkit::random_ground_truth_state(net, 5000 + k);
        const auto h_r = reservoir_heads(net, truth);
        const auto tag = "network " + std::to_string(k);

        auto judge = [&](const SolveReport& r, const char* which) {
            const double err = std::max({inf_dist(r.state.heads, truth.heads), inf_dist(r.state.flows, truth.flows),
                                         inf_dist(r.state.demands, truth.demands)});
            worst = std::max(worst, err);
            o.require(err <= 1e-8, tag + " " + which + ": error " + std::to_string(err));
            o.require(r.final_residual.energy_inf_norm <= 1e-10 && r.final_residual.mass_inf_norm <= 1e-10,
                      tag + " " + which + ": residual too large");
        };
        judge(complete_from_heads(net, truth.heads), "all-heads");
        judge(complete_from_reservoir_heads_and_flows(net, h_r, truth.flows), "heads-flows");
        const auto dec = select_independent_edges(net);
        judge(complete_from_forest_flows(net, h_r, pick_flows(truth.flows, dec.independent), dec), "forest-flows");
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "100 networks x 3 completions, worst error %.2e", worst);
    o.note = buf;
}

void demand_driven(Outcome& o) {
    const auto nets = sample_networks(100, 5000);
    double worst = 0.0;
    double worst_spread = 0.0;
    int max_iterations = 0;
    for (std::size_t k = 0; k < nets.size(); ++k) {
        const auto& net = nets[k];
        const auto truth = testkit::random_ground_truth_state(net, 5000 + k);
        const auto h_r = reservoir_heads(net, truth);
        const auto tag = "network " + std::to_string(k);
        try {
            const auto base = solve_reservoir_heads_demands(net, h_r, truth.demands);
            max_iterations = std::max(max_iterations, base.iterations);
            const double err = std::max(inf_dist(base.state.heads, truth.heads), inf_dist(base.state.flows, truth.flows));
            worst = std::max(worst, err);
            o.require(base.iterations <= 100, tag + ": too many iterations");
            o.require(base.final_residual.physically_correct(1e-8), tag + ": residual above 1e-8");
            o.require(err <= 1e-6, tag + ": error " + std::to_string(err));
            for (std::uint64_t start = 1; start <= 4; ++start) {
                SolverOptions opts;
                opts.initial_strategy = InitialStrategy::Randomized;
                opts.seed = 77 * k + start;
                const auto other = solve_reservoir_heads_demands(net, h_r, truth.demands, opts);
                const double spread =
                    std::max(inf_dist(other.state.heads, base.state.heads), inf_dist(other.state.flows, base.state.flows));
                worst_spread = std::max(worst_spread, spread);
                o.require(spread <= 1e-6, tag + ": multi-start spread " + std::to_string(spread));
            }
        } catch (const NonConvergence& e) {
            o.require(false, tag + ": " + e.what());
        }
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "100 networks x 5 starts, worst error %.2e, spread %.2e, max %d iterations", worst,
                  worst_spread, max_iterations);
    o.note = buf;
}

void inconsistency_detection(Outcome& o) {
    const auto nets = sample_networks(100, 5000);
    std::size_t cyclic = 0;
    std::size_t perturbed = 0;
    for (std::size_t k = 0; k < nets.size(); ++k) {
        const auto& net = nets[k];
        const auto dec = select_independent_edges(net);
        if (dec.dependent.empty()) continue;
        ++cyclic;
        const auto truth = testkit::random_ground_truth_state(net, 5000 + k);
        const auto h_r = reservoir_heads(net, truth);
        const auto tag = "network " + std::to_string(k);

        const Eigen::VectorXd target = head_losses(net, truth.flows) -
                                       incidence_matrix(net).reservoir_rows().transpose() * h_r;
        const auto membership = image_membership(net, target);
        const auto* hit = std::get_if<Member>(&membership);
        o.require(hit && hit->residual <= 1e-9, tag + ": consistent flows rejected");
        try {
            complete_from_reservoir_heads_and_flows(net, h_r, truth.flows);
            o.require(true, "");
        } catch (const InconsistentObservations&) {
            o.require(false, tag + ": consistent flows raised InconsistentObservations");
        }

        for (auto chord : dec.dependent) {
            ++perturbed;
            Eigen::VectorXd q = truth.flows;
            q[static_cast<Eigen::Index>(chord)] += 1e-3;
            bool raised = false;
            try {
                complete_from_reservoir_heads_and_flows(net, h_r, q);
            } catch (const InconsistentObservations&) {
                raised = true;
            }
            o.require(raised, tag + ": chord " + net.pipe(chord).id + " perturbation undetected");
        }
    }
    o.note = std::to_string(cyclic) + " cyclic networks, " + std::to_string(perturbed) + " chord perturbations";
}

void micro_networks(Outcome& o) {
    // 100 - 2 * 0.5^1.852 and 99 - 0.5^1.852, evaluated with 40-digit arithmetic.
    constexpr double kSinglePipeHead = 99.44598382606753701;
    constexpr double kSeriesTailHead = 98.72299191303376850;

    const auto single = solve_reservoir_heads_demands(test::single_pipe(2.0), Eigen::VectorXd::Constant(1, 100.0),
                                                      Eigen::VectorXd::Constant(1, 0.5));
    const double e1 = std::fabs(single.state.heads[1] - kSinglePipeHead);
    o.require(e1 <= 1e-9, "single pipe head off by " + std::to_string(e1));
    o.require(std::fabs(single.state.flows[0] - 0.5) <= 1e-9, "single pipe flow");

    const auto series = solve_reservoir_heads_demands(test::series_line(), Eigen::VectorXd::Constant(1, 100.0),
                                                      Eigen::Vector2d(0.5, 0.5));
    const Eigen::Vector3d heads(100.0, 99.0, kSeriesTailHead);
    const Eigen::Vector2d flows(1.0, 0.5);
    const double e2 = std::max(inf_dist(series.state.heads, heads), inf_dist(series.state.flows, flows));
    o.require(e2 <= 1e-9, "series line off by " + std::to_string(e2));

    char buf[96];
    std::snprintf(buf, sizeof buf, "single pipe error %.1e, series line error %.1e", e1, e2);
    o.note = buf;
}

void symmetric_form(Outcome& o) {
    for (std::uint64_t k = 0; k < 50; ++k) {
        const auto net = sample_network(7000 + k);
        const auto s = testkit::random_ground_truth_state(net, 7000 + k);
        const auto sym = expand_symmetric(net, s.flows);
        const auto np = static_cast<Eigen::Index>(net.pipe_count());
        bool antisymmetric = true;
        for (Eigen::Index e = 0; e < np; ++e) antisymmetric = antisymmetric && sym.flows[e] == -sym.flows[np + e];
        o.require(antisymmetric, "state " + std::to_string(k) + ": q_uv != -q_vu");
        const std::vector<Eigen::Index> rows(net.consumers().begin(), net.consumers().end());
        const Eigen::MatrixXd bc = sym.incidence(rows, Eigen::all).cast<double>();
        o.require((bc * sym.flows + 2.0 * s.demands).lpNorm<Eigen::Infinity>() <= 1e-12,
                  "state " + std::to_string(k) + ": B q_sym != -2 d");
    }
    o.note = "50 states";
}

ObservationSet random_pattern(const Network& net, const HydraulicState& s, Rng& rng) {
    ObservationSet p;
    const auto kind = rng.below(5);
    for (std::size_t v = 0; v < net.node_count(); ++v) {
        const bool reservoir = net.node(v).role == NodeRole::Reservoir;
        const bool keep = kind == 0 || (reservoir ? rng.uniform01() < 0.95 : rng.uniform01() < 0.1);
        if (keep) p.heads[net.node(v).id] = s.heads[static_cast<Eigen::Index>(v)];
    }
    const double flow_share = kind == 1 ? 1.0 : rng.uniform01();
    for (std::size_t e = 0; e < net.pipe_count(); ++e)
        if (rng.uniform01() < flow_share) p.flows[net.pipe(e).id] = s.flows[static_cast<Eigen::Index>(e)];
    if (kind == 2)
        for (std::size_t c = 0; c < net.consumer_count(); ++c)
            p.demands[net.node(net.consumers()[c]).id] = s.demands[static_cast<Eigen::Index>(c)];
    return p;
}

void classifier_soundness(Outcome& o) {
    Rng rng(9);
    std::map<Verdict, int> seen;
    for (std::uint64_t k = 0; k < 50; ++k) {
        const auto net = sample_network(9000 + k);
        const auto truth = testkit::random_ground_truth_state(net, 9000 + k);
        const auto tag = "network " + std::to_string(k);
        for (int t = 0; t < 20; ++t) {
            const auto pattern = random_pattern(net, truth, rng);
            for (bool prefer : {false, true}) {
                const auto v = classify_observation_pattern(net, pattern, {.prefer_flow_consistency = prefer});
                ++seen[v.verdict];
                if (v.verdict == Verdict::UndeterminedRankDeficient) {
                    std::vector<std::size_t> known;
                    for (std::size_t e = 0; e < net.pipe_count(); ++e)
                        if (pattern.flows.count(net.pipe(e).id)) known.push_back(e);
                    const Eigen::MatrixXd block = incidence_matrix(net).submatrix(net.consumers(), known).cast<double>();
                    const auto oracle_rank = known.empty() ? 0 : Eigen::FullPivLU<Eigen::MatrixXd>(block).rank();
                    o.require(v.flow_rank < net.consumer_count() &&
                                  static_cast<std::size_t>(oracle_rank) < net.consumer_count(),
                              tag + ": rank-deficient verdict, ranks " + std::to_string(v.flow_rank) + "/" + std::to_string(oracle_rank) + " of " + std::to_string(net.consumer_count()) + " flows " + std::to_string(known.size()));
                }
                const auto theorem = theorem_for(v.verdict);
                if (!theorem) continue;
                try {
                    const auto r = complete(net, pattern, *theorem);
                    const double err = std::max(inf_dist(r.state.heads, truth.heads), inf_dist(r.state.flows, truth.flows));
                    o.require(err <= 1e-6, tag + ": " + to_string(v.verdict) + " solve off by " + std::to_string(err));
                } catch (const std::exception& e) {
                    o.require(false, tag + ": " + to_string(v.verdict) + " solve failed: " + e.what());
                }
            }
        }
    }
    std::ostringstream note;
    note << "50 networks, verdicts:";
    for (const auto& [v, n] : seen) note << ' ' << to_string(v) << '=' << n;
    o.note = note.str();
    for (auto v : {Verdict::DeterminedAllHeads, Verdict::DeterminedForestFlows, Verdict::ConditionallyDeterminedFlows,
                   Verdict::DeterminedDemandDriven, Verdict::UndeterminedRankDeficient})
        o.require(seen[v] > 0, std::string("verdict never exercised: ") + to_string(v));
}

struct Criterion {
    int id;
    const char* name;
    double budget_s;  // 0 means no runtime bound
    std::function<void(Outcome&)> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "rank of proper node subsets", 5.0, rank_theorem},
        {2, "forest decomposition", 0.0, forest_decomposition},
        {3, "strict monotonicity", 0.0, strict_monotonicity},
        {4, "round-trip completions", 10.0, round_trip},
        {5, "demand-driven solver", 30.0, demand_driven},
        {6, "inconsistency detection", 0.0, inconsistency_detection},
        {7, "analytic micro-networks", 0.0, micro_networks},
        {8, "symmetric-form equivalence", 0.0, symmetric_form},
        {9, "classifier soundness", 0.0, classifier_soundness},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("uncaught: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0.0 && secs > c.budget_s) o.require(false, "runtime budget exceeded");
        if (!o.pass) ++failed;
        std::printf("%s  %d  %-30s %7.3f s  %zu checks  %s", o.pass ? "PASS" : "FAIL", c.id, c.name, secs, o.cases,
                    o.note.c_str());
        if (!o.pass) std::printf("  [%d failures: %s]", o.failure_count, o.failures.str().c_str());
        std::printf("\n");
    }
    std::printf("%s: %zu/%zu criteria passed\n", failed ? "FAIL" : "PASS", criteria.size() - failed, criteria.size());
    return failed ? 1 : 0;
}

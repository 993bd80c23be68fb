#include "wds/completion.hpp"

#include "wds/random.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace wds {

namespace {

Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }

std::string format_value(double v) {
    std::ostringstream os;
    os.precision(3);
    os << v;
    return os.str();
}

void check_reservoir_heads(const Network& net, const Eigen::VectorXd& h_r) {
    if (static_cast<std::size_t>(h_r.size()) != net.reservoir_count())
        throw std::invalid_argument("need one head per reservoir");
}

Eigen::VectorXd assemble_heads(const Network& net, const Eigen::VectorXd& h_r, const Eigen::VectorXd& h_c) {
    Eigen::VectorXd h(idx(net.node_count()));
    for (std::size_t k = 0; k < net.reservoir_count(); ++k) h[idx(net.reservoirs()[k])] = h_r[idx(k)];
    for (std::size_t k = 0; k < net.consumer_count(); ++k) h[idx(net.consumers()[k])] = h_c[idx(k)];
    return h;
}

// B_Vr^T h_r restricted to the given pipes.
Eigen::VectorXd reservoir_head_terms(const Network& net, const Eigen::VectorXd& h_r,
                                     const std::vector<std::size_t>& pipes) {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(idx(pipes.size()));
    for (std::size_t k = 0; k < pipes.size(); ++k) {
        const auto& p = net.pipe(pipes[k]);
        if (auto s = net.reservoir_slot(p.tail); s != npos) out[idx(k)] += h_r[idx(s)];
        if (auto s = net.reservoir_slot(p.head); s != npos) out[idx(k)] -= h_r[idx(s)];
    }
    return out;
}

std::vector<std::size_t> all_pipes(const Network& net) {
    std::vector<std::size_t> v(net.pipe_count());
    for (std::size_t e = 0; e < v.size(); ++e) v[e] = e;
    return v;
}

SolveReport finish(const Network& net, HydraulicState state, Theorem theorem, int iterations) {
    SolveReport report;
    report.final_residual = residuals(net, state);
    report.state = std::move(state);
    report.theorem = theorem;
    report.iterations = iterations;
    for (std::size_t v = 0; v < net.node_count(); ++v) {
        const double h = report.state.heads[idx(v)];
        if (h < 0.0)
            report.warnings.push_back("negative head " + format_value(h) + " m at node '" + net.node(v).id + "'");
    }
    return report;
}

bool is_decomposition_of(const Network& net, const EdgeDecomposition& dec) {
    if (dec.independent.size() != net.consumer_count()) return false;
    std::vector<int> seen(net.pipe_count(), 0);
    for (auto e : dec.independent) {
        if (e >= net.pipe_count() || seen[e]++) return false;
    }
    for (auto e : dec.dependent) {
        if (e >= net.pipe_count() || seen[e]++) return false;
    }
    return dec.independent.size() + dec.dependent.size() == net.pipe_count();
}

// Solves B_{Vc,Ei}^T h_c = f(q_Ei) - B_{Vr,Ei}^T h_r.
Eigen::VectorXd forest_heads(const Network& net, const IncidenceMatrix& b, const Eigen::VectorXd& h_r,
                             const std::vector<std::size_t>& forest, const Eigen::VectorXd& forest_q) {
    const Eigen::MatrixXd bt = b.submatrix(net.consumers(), forest).cast<double>().transpose();
    Eigen::VectorXd rhs = reservoir_head_terms(net, h_r, forest);
    for (std::size_t k = 0; k < forest.size(); ++k)
        rhs[idx(k)] = head_loss(forest_q[idx(k)], net.pipe(forest[k]).resistance) - rhs[idx(k)];
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(bt);
    if (!lu.isInvertible()) throw DecompositionMismatch("forest pipes do not form an invertible consumer block");
    return lu.solve(rhs);
}

}  // namespace

const char* to_string(Theorem t) {
    switch (t) {
        case Theorem::AllHeads: return "all-heads";
        case Theorem::HeadsAndFlows: return "heads-flows";
        case Theorem::ForestFlows: return "forest-flows";
        case Theorem::DemandDriven: return "demand-driven";
    }
    return "unknown";
}

InconsistentObservations::InconsistentObservations(double residual)
    : CompletionError("InconsistentObservations: flows are not compatible with any consumer heads (energy misfit " +
                      format_value(residual) + ")"),
      residual_(residual) {}

NonConvergence::NonConvergence(int iterations, double residual)
    : CompletionError("NonConvergence: residual " + format_value(residual) + " after " + std::to_string(iterations) +
                      " iterations"),
      iterations_(iterations),
      residual_(residual) {}

void validate_observations(const Network& net, const ObservationSet& obs) {
    for (const auto& [id, v] : obs.heads) {
        if (!net.find_node(id)) throw ObservationError("head observed at unknown node '" + id + "'");
        if (!std::isfinite(v)) throw ObservationError("head at '" + id + "' is not finite");
    }
    for (const auto& [id, v] : obs.flows) {
        if (!net.find_pipe(id)) throw ObservationError("flow observed on unknown pipe '" + id + "'");
        if (!std::isfinite(v)) throw ObservationError("flow on '" + id + "' is not finite");
    }
    for (const auto& [id, v] : obs.demands) {
        auto n = net.find_node(id);
        if (!n) throw ObservationError("demand observed at unknown node '" + id + "'");
        if (net.node(*n).role != NodeRole::Consumer)
            throw ObservationError("demand observed at reservoir '" + id + "'; demands belong to consumers");
        if (!std::isfinite(v)) throw ObservationError("demand at '" + id + "' is not finite");
    }
}

Eigen::VectorXd reservoir_heads(const Network& net, const HydraulicState& s) {
    Eigen::VectorXd h_r(idx(net.reservoir_count()));
    for (std::size_t k = 0; k < net.reservoir_count(); ++k) h_r[idx(k)] = s.heads[idx(net.reservoirs()[k])];
    return h_r;
}

SolveReport complete_from_heads(const Network& net, const Eigen::VectorXd& heads) {
    if (static_cast<std::size_t>(heads.size()) != net.node_count())
        throw std::invalid_argument("need one head per node");
    HydraulicState s;
    s.heads = heads;
    s.flows.resize(idx(net.pipe_count()));
    for (std::size_t e = 0; e < net.pipe_count(); ++e) {
        const auto& p = net.pipe(e);
        s.flows[idx(e)] = invert_head_loss(heads[idx(p.tail)] - heads[idx(p.head)], p.resistance);
    }
    s.demands = demands_from_flows(net, s.flows);
    return finish(net, std::move(s), Theorem::AllHeads, 0);
}

SolveReport complete_from_reservoir_heads_and_flows(const Network& net, const Eigen::VectorXd& reservoir_heads,
                                                    const Eigen::VectorXd& flows, double tol) {
    check_reservoir_heads(net, reservoir_heads);
    const Eigen::VectorXd target = head_losses(net, flows) - reservoir_head_terms(net, reservoir_heads, all_pipes(net));
    auto membership = image_membership(net, target, tol);
    if (const auto* miss = std::get_if<NotMember>(&membership))
        throw InconsistentObservations(miss->residual * std::max(1.0, target.lpNorm<Eigen::Infinity>()));
    const auto& hit = std::get<Member>(membership);

    HydraulicState s;
    s.heads = assemble_heads(net, reservoir_heads, hit.consumer_heads);
    s.flows = flows;
    s.demands = demands_from_flows(net, flows);
    return finish(net, std::move(s), Theorem::HeadsAndFlows, 0);
}

SolveReport complete_from_forest_flows(const Network& net, const Eigen::VectorXd& reservoir_heads,
                                       const std::map<std::size_t, double>& forest_flows,
                                       const EdgeDecomposition& dec) {
    check_reservoir_heads(net, reservoir_heads);
    if (!is_decomposition_of(net, dec)) throw DecompositionMismatch("edge decomposition does not partition the pipes");
    const std::set<std::size_t> expected(dec.independent.begin(), dec.independent.end());
    std::set<std::size_t> given;
    for (const auto& kv : forest_flows) given.insert(kv.first);
    if (given != expected) throw DecompositionMismatch("known flows must be keyed by exactly the forest pipes");

    const IncidenceMatrix b(net);
    Eigen::VectorXd q_i(idx(dec.independent.size()));
    for (std::size_t k = 0; k < dec.independent.size(); ++k) q_i[idx(k)] = forest_flows.at(dec.independent[k]);
    const Eigen::VectorXd h_c = forest_heads(net, b, reservoir_heads, dec.independent, q_i);

    HydraulicState s;
    s.heads = assemble_heads(net, reservoir_heads, h_c);
    s.flows.resize(idx(net.pipe_count()));
    for (std::size_t k = 0; k < dec.independent.size(); ++k) s.flows[idx(dec.independent[k])] = q_i[idx(k)];
    for (auto e : dec.dependent) {
        const auto& p = net.pipe(e);
        s.flows[idx(e)] = invert_head_loss(s.heads[idx(p.tail)] - s.heads[idx(p.head)], p.resistance);
    }
    s.demands = demands_from_flows(net, s.flows);
    return finish(net, std::move(s), Theorem::ForestFlows, 0);
}

namespace {

// Stacked unknowns x = [h_c; q]; F = [B^T h - f(q); B_Vc q + d].
class DemandDrivenSystem {
public:
    DemandDrivenSystem(const Network& net, const Eigen::VectorXd& h_r, const Eigen::VectorXd& d)
        : net_(net),
          nc_(idx(net.consumer_count())),
          np_(idx(net.pipe_count())),
          bc_(IncidenceMatrix(net).consumer_rows()),
          reservoir_terms_(reservoir_head_terms(net, h_r, all_pipes(net))),
          demands_(d) {}

    Eigen::Index size() const { return nc_ + np_; }

    Eigen::VectorXd residual(const Eigen::VectorXd& x) const {
        const auto h = x.head(nc_);
        const auto q = x.tail(np_);
        Eigen::VectorXd f(size());
        f.head(np_) = bc_.transpose() * h + reservoir_terms_ - head_losses(net_, q);
        f.tail(nc_) = bc_ * q + demands_;
        return f;
    }

    Eigen::MatrixXd jacobian(const Eigen::VectorXd& x, double zero_flow_epsilon) const {
        Eigen::MatrixXd j = Eigen::MatrixXd::Zero(size(), size());
        j.topLeftCorner(np_, nc_) = bc_.transpose();
        for (Eigen::Index e = 0; e < np_; ++e) {
            const double q = std::max(std::abs(x[nc_ + e]), zero_flow_epsilon);
            j(e, nc_ + e) = -head_loss_derivative(q, net_.resistances()[e]);
        }
        j.bottomRightCorner(nc_, np_) = bc_;
        return j;
    }

private:
    const Network& net_;
    Eigen::Index nc_;
    Eigen::Index np_;
    Eigen::MatrixXd bc_;
    Eigen::VectorXd reservoir_terms_;
    Eigen::VectorXd demands_;
};

Eigen::VectorXd initial_guess(const Network& net, const Eigen::VectorXd& h_r, const Eigen::VectorXd& d,
                              const SolverOptions& opts) {
    const IncidenceMatrix b(net);
    const auto dec = select_independent_edges(net);
    const Eigen::MatrixXd forest = b.submatrix(net.consumers(), dec.independent).cast<double>();
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(forest);
    const Eigen::VectorXd q_i = lu.solve(-d);

    Eigen::VectorXd q = Eigen::VectorXd::Zero(idx(net.pipe_count()));
    for (std::size_t k = 0; k < dec.independent.size(); ++k) q[idx(dec.independent[k])] = q_i[idx(k)];
    Eigen::VectorXd h_c = forest_heads(net, b, h_r, dec.independent, q_i);

    if (opts.initial_strategy == InitialStrategy::Randomized) {
        Rng rng(opts.seed);
        const double flow_scale = opts.random_spread * std::max(0.1, d.lpNorm<Eigen::Infinity>());
        const double head_scale = 10.0 * opts.random_spread;
        // Circulations keep the start mass-balanced.
        for (const auto& cycle : cycle_space_basis(net, dec).vectors) {
            const double c = rng.uniform(-flow_scale, flow_scale);
            for (std::size_t e = 0; e < cycle.size(); ++e) q[idx(e)] += c * cycle[e];
        }
        for (Eigen::Index k = 0; k < h_c.size(); ++k) h_c[k] += rng.uniform(-head_scale, head_scale);
    }

    Eigen::VectorXd x(h_c.size() + q.size());
    x << h_c, q;
    return x;
}

}  // namespace

SolveReport solve_reservoir_heads_demands(const Network& net, const Eigen::VectorXd& reservoir_heads,
                                          const Eigen::VectorXd& demands, const SolverOptions& opts) {
    check_reservoir_heads(net, reservoir_heads);
    if (static_cast<std::size_t>(demands.size()) != net.consumer_count())
        throw std::invalid_argument("need one demand per consumer");
    if (opts.max_iterations < 0 || !(opts.tolerance > 0.0) || !(opts.zero_flow_epsilon > 0.0))
        throw std::invalid_argument("invalid solver options");

    const DemandDrivenSystem system(net, reservoir_heads, demands);
    Eigen::VectorXd x = initial_guess(net, reservoir_heads, demands, opts);
    Eigen::VectorXd f = system.residual(x);
    double norm = f.lpNorm<Eigen::Infinity>();

    // Once within tolerance, a few extra steps drive the residual towards
    // round-off; near zero flows a small residual alone does not pin q.
    constexpr int kPolishSteps = 3;
    int iterations = 0;
    int polish = 0;
    bool converged = norm <= opts.tolerance;
    while (iterations < opts.max_iterations && (!converged || polish < kPolishSteps) && norm > 0.0) {
        const Eigen::PartialPivLU<Eigen::MatrixXd> lu(system.jacobian(x, opts.zero_flow_epsilon));
        const Eigen::VectorXd step = lu.solve(-f);
        if (!step.allFinite()) break;

        double t = 1.0;
        bool accepted = false;
        Eigen::VectorXd trial;
        Eigen::VectorXd trial_f;
        double trial_norm = norm;
        for (int halving = 0; halving <= 30; ++halving, t *= 0.5) {
            trial = x + t * step;
            trial_f = system.residual(trial);
            trial_norm = trial_f.lpNorm<Eigen::Infinity>();
            if (trial_norm < norm) {
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        x = std::move(trial);
        f = std::move(trial_f);
        norm = trial_norm;
        ++iterations;
        if (converged) ++polish;
        converged = converged || norm <= opts.tolerance;
    }
    if (!converged) throw NonConvergence(iterations, norm);

    const auto nc = idx(net.consumer_count());
    HydraulicState s;
    s.heads = assemble_heads(net, reservoir_heads, x.head(nc));
    s.flows = x.tail(idx(net.pipe_count()));
    s.demands = demands;
    return finish(net, std::move(s), Theorem::DemandDriven, iterations);
}

namespace {

Eigen::VectorXd observed_reservoir_heads(const Network& net, const ObservationSet& obs) {
    Eigen::VectorXd h_r(idx(net.reservoir_count()));
    for (std::size_t k = 0; k < net.reservoir_count(); ++k) {
        const auto& id = net.node(net.reservoirs()[k]).id;
        auto it = obs.heads.find(id);
        if (it == obs.heads.end()) throw MissingObservation("missing head at reservoir '" + id + "'");
        h_r[idx(k)] = it->second;
    }
    return h_r;
}

}  // namespace

SolveReport complete(const Network& net, const ObservationSet& obs, Theorem theorem, const SolverOptions& opts,
                     double membership_tol) {
    validate_observations(net, obs);
    switch (theorem) {
        case Theorem::AllHeads: {
            Eigen::VectorXd h(idx(net.node_count()));
            for (std::size_t v = 0; v < net.node_count(); ++v) {
                auto it = obs.heads.find(net.node(v).id);
                if (it == obs.heads.end()) throw MissingObservation("missing head at node '" + net.node(v).id + "'");
                h[idx(v)] = it->second;
            }
            return complete_from_heads(net, h);
        }
        case Theorem::HeadsAndFlows: {
            const auto h_r = observed_reservoir_heads(net, obs);
            Eigen::VectorXd q(idx(net.pipe_count()));
            for (std::size_t e = 0; e < net.pipe_count(); ++e) {
                auto it = obs.flows.find(net.pipe(e).id);
                if (it == obs.flows.end()) throw MissingObservation("missing flow on pipe '" + net.pipe(e).id + "'");
                q[idx(e)] = it->second;
            }
            return complete_from_reservoir_heads_and_flows(net, h_r, q, membership_tol);
        }
        case Theorem::ForestFlows: {
            const auto h_r = observed_reservoir_heads(net, obs);
            std::vector<std::size_t> known;
            for (std::size_t e = 0; e < net.pipe_count(); ++e)
                if (obs.flows.count(net.pipe(e).id)) known.push_back(e);
            const auto dec = select_independent_edges(net, known);
            std::map<std::size_t, double> forest_flows;
            for (auto e : dec.independent) {
                auto it = obs.flows.find(net.pipe(e).id);
                if (it == obs.flows.end())
                    throw MissingObservation("observed flows do not contain a forest: rank " +
                                           std::to_string(consumer_column_rank(net, known)) + " < " +
                                           std::to_string(net.consumer_count()));
                forest_flows.emplace(e, it->second);
            }
            auto report = complete_from_forest_flows(net, h_r, forest_flows, dec);
            for (auto e : dec.dependent)
                if (obs.flows.count(net.pipe(e).id))
                    report.warnings.push_back("observed flow on chord pipe '" + net.pipe(e).id +
                                              "' was not used; the forest determines it");
            return report;
        }
        case Theorem::DemandDriven: {
            const auto h_r = observed_reservoir_heads(net, obs);
            Eigen::VectorXd d(idx(net.consumer_count()));
            for (std::size_t k = 0; k < net.consumer_count(); ++k) {
                const auto& id = net.node(net.consumers()[k]).id;
                auto it = obs.demands.find(id);
                if (it == obs.demands.end()) throw MissingObservation("missing demand at consumer '" + id + "'");
                d[idx(k)] = it->second;
            }
            return solve_reservoir_heads_demands(net, h_r, d, opts);
        }
    }
    throw std::logic_error("unhandled theorem");
}

}  // namespace wds

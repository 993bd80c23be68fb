#pragma once

#include "wds/hydraulics.hpp"
#include "wds/network.hpp"
#include "wds/structure.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace wds {

/// Observed values keyed by node / pipe id.
struct ObservationSet {
    std::map<std::string, double> heads;
    std::map<std::string, double> flows;
    std::map<std::string, double> demands;
};

class ObservationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A value the requested completion needs was not observed.
class MissingObservation : public ObservationError {
public:
    using ObservationError::ObservationError;
};

/// Throws ObservationError for unknown ids or demands on reservoir nodes.
void validate_observations(const Network& net, const ObservationSet& obs);

enum class Theorem { AllHeads, HeadsAndFlows, ForestFlows, DemandDriven };

const char* to_string(Theorem t);

struct SolveReport {
    HydraulicState state;
    int iterations = 0;
    ResidualReport final_residual;
    Theorem theorem = Theorem::AllHeads;
    std::vector<std::string> warnings;
};

class CompletionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The observed flows admit no physically correct completion. residual() is
/// the absolute least-squares energy misfit ||B_Vc^T h - t||_inf.
class InconsistentObservations : public CompletionError {
public:
    explicit InconsistentObservations(double residual);
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class NonConvergence : public CompletionError {
public:
    NonConvergence(int iterations, double residual);
    int iterations() const noexcept { return iterations_; }
    double residual() const noexcept { return residual_; }

private:
    int iterations_;
    double residual_;
};

class DecompositionMismatch : public CompletionError {
public:
    using CompletionError::CompletionError;
};

/// Flows from head differences pipe by pipe, demands from mass balance.
SolveReport complete_from_heads(const Network& net, const Eigen::VectorXd& heads);

/// Consumer heads from reservoir heads and all flows. Throws
/// InconsistentObservations when D(q)q - B_Vr^T h_r is not in im(B_Vc^T).
SolveReport complete_from_reservoir_heads_and_flows(const Network& net, const Eigen::VectorXd& reservoir_heads,
                                                    const Eigen::VectorXd& flows,
                                                    double tol = kDefaultMembershipTolerance);

/// Full state from reservoir heads and the flows on the forest pipes of
/// `dec`. `forest_flows` must be keyed by exactly dec.independent.
SolveReport complete_from_forest_flows(const Network& net, const Eigen::VectorXd& reservoir_heads,
                                       const std::map<std::size_t, double>& forest_flows,
                                       const EdgeDecomposition& dec);

enum class InitialStrategy {
    /// Forest flows balancing the demands, zero chord flows.
    ForestBalanced,
    /// Forest-balanced start plus random circulations and random heads; used
    /// for multi-start uniqueness checks.
    Randomized,
};

struct SolverOptions {
    int max_iterations = 100;
    double tolerance = kSolverTolerance;
    /// Lower bound on |q| inside the Jacobian only.
    double zero_flow_epsilon = 1e-8;
    InitialStrategy initial_strategy = InitialStrategy::ForestBalanced;
    std::uint64_t seed = 0;
    /// Magnitude of the random perturbations of the Randomized start.
    double random_spread = 1.0;
};

/// Consumer heads and flows from reservoir heads and consumer demands, by
/// damped Newton iteration on the stacked energy/mass system.
SolveReport solve_reservoir_heads_demands(const Network& net, const Eigen::VectorXd& reservoir_heads,
                                          const Eigen::VectorXd& demands, const SolverOptions& opts = {});

/// Runs the solver for `theorem` on keyed observations. Values outside the
/// theorem's hypothesis are ignored; missing ones raise ObservationError.
SolveReport complete(const Network& net, const ObservationSet& obs, Theorem theorem,
                     const SolverOptions& opts = {}, double membership_tol = kDefaultMembershipTolerance);

/// Heads of all nodes / reservoirs from a state, in canonical order.
Eigen::VectorXd reservoir_heads(const Network& net, const HydraulicState& s);

}  // namespace wds

#pragma once

#include "wds/network.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace wds {

/// Heads per node (m), signed flow per pipe w.r.t. its canonical orientation
/// (m^3/s), demand per consumer (m^3/s, positive = withdrawal).
struct HydraulicState {
    Eigen::VectorXd heads;
    Eigen::VectorXd flows;
    Eigen::VectorXd demands;
};

/// Throws std::invalid_argument unless the vector lengths match the network.
void check_dimensions(const Network& net, const HydraulicState& s);

/// Hazen-Williams head loss r * q * |q|^(x-1).
double head_loss(double q, double r);

/// d(head_loss)/dq = x * r * |q|^(x-1).
double head_loss_derivative(double q, double r);

/// Flow producing head drop dh: sgn(dh) * (|dh| / r)^(1/x).
double invert_head_loss(double dh, double r);

/// Element-wise head loss over all pipes.
Eigen::VectorXd head_losses(const Network& net, const Eigen::VectorXd& flows);

/// Net inflow (inflow minus outflow) per consumer, i.e. -B_Vc q.
Eigen::VectorXd demands_from_flows(const Network& net, const Eigen::VectorXd& flows);

struct ResidualReport {
    double energy_inf_norm = 0.0;
    double mass_inf_norm = 0.0;
    std::string max_energy_pipe;
    std::string max_mass_node;

    bool physically_correct(double tol) const { return energy_inf_norm <= tol && mass_inf_norm <= tol; }
};

inline constexpr double kSolverTolerance = 1e-8;
inline constexpr double kConstructionTolerance = 1e-12;

/// Energy residual per pipe: (h_tail - h_head) - r q |q|^(x-1).
Eigen::VectorXd energy_residuals(const Network& net, const HydraulicState& s);

/// Mass residual per consumer: d_v - (inflow - outflow).
Eigen::VectorXd mass_residuals(const Network& net, const HydraulicState& s);

ResidualReport residuals(const Network& net, const HydraulicState& s);

/// <f(q1) - f(q2), q1 - q2> with f_e(q) = r_e q_e |q_e|^(x-1). Strictly
/// positive for q1 != q2.
double monotonicity_gap(const Network& net, const Eigen::VectorXd& q1, const Eigen::VectorXd& q2);

/// The state written on the symmetric directed graph: every pipe e = (u,v)
/// yields edges e_uv (column e) and e_vu (column n_p + e) with q_vu = -q_uv.
struct SymmetricForm {
    IntMatrix incidence;  // n_n x 2 n_p
    Eigen::VectorXd flows;
};

SymmetricForm expand_symmetric(const Network& net, const Eigen::VectorXd& flows);

}  // namespace wds

#include "wds/hydraulics.hpp"

#include <cmath>
#include <stdexcept>

namespace wds {

void check_dimensions(const Network& net, const HydraulicState& s) {
    if (static_cast<std::size_t>(s.heads.size()) != net.node_count() ||
        static_cast<std::size_t>(s.flows.size()) != net.pipe_count() ||
        static_cast<std::size_t>(s.demands.size()) != net.consumer_count())
        throw std::invalid_argument("hydraulic state dimensions do not match the network");
}

double head_loss(double q, double r) {
    const double a = std::abs(q);
    return r * q * std::pow(a, kHazenWilliamsExponent - 1.0);
}

double head_loss_derivative(double q, double r) {
    return kHazenWilliamsExponent * r * std::pow(std::abs(q), kHazenWilliamsExponent - 1.0);
}

double invert_head_loss(double dh, double r) {
    if (dh == 0.0) return 0.0;
    const double mag = std::pow(std::abs(dh) / r, 1.0 / kHazenWilliamsExponent);
    return dh > 0.0 ? mag : -mag;
}

Eigen::VectorXd head_losses(const Network& net, const Eigen::VectorXd& flows) {
    if (static_cast<std::size_t>(flows.size()) != net.pipe_count())
        throw std::invalid_argument("flow vector must have one entry per pipe");
    Eigen::VectorXd out(flows.size());
    for (Eigen::Index e = 0; e < flows.size(); ++e) out[e] = head_loss(flows[e], net.resistances()[e]);
    return out;
}

Eigen::VectorXd demands_from_flows(const Network& net, const Eigen::VectorXd& flows) {
    if (static_cast<std::size_t>(flows.size()) != net.pipe_count())
        throw std::invalid_argument("flow vector must have one entry per pipe");
    Eigen::VectorXd d = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.consumer_count()));
    for (std::size_t e = 0; e < net.pipe_count(); ++e) {
        const auto& p = net.pipe(e);
        const double q = flows[static_cast<Eigen::Index>(e)];
        if (auto s = net.consumer_slot(p.tail); s != npos) d[static_cast<Eigen::Index>(s)] -= q;
        if (auto s = net.consumer_slot(p.head); s != npos) d[static_cast<Eigen::Index>(s)] += q;
    }
    return d;
}

Eigen::VectorXd energy_residuals(const Network& net, const HydraulicState& s) {
    check_dimensions(net, s);
    Eigen::VectorXd res(static_cast<Eigen::Index>(net.pipe_count()));
    for (std::size_t e = 0; e < net.pipe_count(); ++e) {
        const auto& p = net.pipe(e);
        const auto i = static_cast<Eigen::Index>(e);
        res[i] = (s.heads[static_cast<Eigen::Index>(p.tail)] - s.heads[static_cast<Eigen::Index>(p.head)]) -
                 head_loss(s.flows[i], p.resistance);
    }
    return res;
}

Eigen::VectorXd mass_residuals(const Network& net, const HydraulicState& s) {
    check_dimensions(net, s);
    return s.demands - demands_from_flows(net, s.flows);
}

ResidualReport residuals(const Network& net, const HydraulicState& s) {
    const Eigen::VectorXd energy = energy_residuals(net, s);
    const Eigen::VectorXd mass = mass_residuals(net, s);
    ResidualReport report;
    Eigen::Index at = 0;
    if (energy.size() > 0) {
        report.energy_inf_norm = energy.cwiseAbs().maxCoeff(&at);
        report.max_energy_pipe = net.pipe(static_cast<std::size_t>(at)).id;
    }
    report.mass_inf_norm = mass.cwiseAbs().maxCoeff(&at);
    report.max_mass_node = net.node(net.consumers()[static_cast<std::size_t>(at)]).id;
    return report;
}

namespace {

// f(a) - f(b) without cancellation when a and b are close and share a sign.
double head_loss_difference(double a, double b, double r) {
    if (a == b) return 0.0;
    if (a == 0.0 || b == 0.0 || (a > 0.0) != (b > 0.0)) return head_loss(a, r) - head_loss(b, r);
    const double ma = std::abs(a);
    const double mb = std::abs(b);
    const double rel = std::expm1(kHazenWilliamsExponent * std::log1p((ma - mb) / mb));
    const double diff = r * std::pow(mb, kHazenWilliamsExponent) * rel;
    return a > 0.0 ? diff : -diff;
}

}  // namespace

double monotonicity_gap(const Network& net, const Eigen::VectorXd& q1, const Eigen::VectorXd& q2) {
    if (static_cast<std::size_t>(q1.size()) != net.pipe_count() || q2.size() != q1.size())
        throw std::invalid_argument("flow vectors must have one entry per pipe");
    // Neumaier-compensated sum; every term is non-negative, so the
    // compensation only guards against absorption of small terms.
    double sum = 0.0;
    double carry = 0.0;
    for (Eigen::Index e = 0; e < q1.size(); ++e) {
        const double r = net.resistances()[e];
        const double term = head_loss_difference(q1[e], q2[e], r) * (q1[e] - q2[e]);
        const double t = sum + term;
        carry += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
        sum = t;
    }
    return sum + carry;
}

SymmetricForm expand_symmetric(const Network& net, const Eigen::VectorXd& flows) {
    if (static_cast<std::size_t>(flows.size()) != net.pipe_count())
        throw std::invalid_argument("flow vector must have one entry per pipe");
    const auto np = static_cast<Eigen::Index>(net.pipe_count());
    SymmetricForm sym;
    sym.incidence = IntMatrix::Zero(static_cast<Eigen::Index>(net.node_count()), 2 * np);
    sym.flows.resize(2 * np);
    for (Eigen::Index e = 0; e < np; ++e) {
        const auto& p = net.pipe(static_cast<std::size_t>(e));
        const auto tail = static_cast<Eigen::Index>(p.tail);
        const auto head = static_cast<Eigen::Index>(p.head);
        sym.incidence(tail, e) = 1;
        sym.incidence(head, e) = -1;
        sym.incidence(head, np + e) = 1;
        sym.incidence(tail, np + e) = -1;
        sym.flows[e] = flows[e];
        sym.flows[np + e] = -flows[e];
    }
    return sym;
}

}  // namespace wds

#include "wds/network.hpp"

#include <cmath>
#include <numeric>

namespace wds {

double resistance(const PipeParams& p) {
    return kHazenWilliamsCoefficient * p.length_m * std::pow(p.diameter_m, -kDiameterExponent) *
           std::pow(p.roughness, -kRoughnessExponent);
}

const char* to_string(NetworkErrorKind kind) {
    switch (kind) {
        case NetworkErrorKind::EmptyId: return "EmptyId";
        case NetworkErrorKind::DuplicateId: return "DuplicateId";
        case NetworkErrorKind::UnknownEndpoint: return "UnknownEndpoint";
        case NetworkErrorKind::SelfLoop: return "SelfLoop";
        case NetworkErrorKind::NonpositiveParameter: return "NonpositiveParameter";
        case NetworkErrorKind::NoReservoir: return "NoReservoir";
        case NetworkErrorKind::NoConsumer: return "NoConsumer";
        case NetworkErrorKind::Disconnected: return "Disconnected";
    }
    return "Unknown";
}

std::optional<std::size_t> Network::find_node(const std::string& id) const {
    auto it = node_index_.find(id);
    if (it == node_index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::size_t> Network::find_pipe(const std::string& id) const {
    auto it = pipe_index_.find(id);
    if (it == pipe_index_.end()) return std::nullopt;
    return it->second;
}

NetworkSpec Network::to_spec() const {
    NetworkSpec spec;
    spec.nodes.reserve(nodes_.size());
    for (const auto& n : nodes_) spec.nodes.push_back({n.id, n.role});
    spec.pipes.reserve(pipes_.size());
    for (const auto& p : pipes_) spec.pipes.push_back({p.id, nodes_[p.tail].id, nodes_[p.head].id, p.params});
    return spec;
}

namespace {

[[noreturn]] void reject(NetworkErrorKind kind, const std::string& msg) {
    throw NetworkError(kind, std::string(to_string(kind)) + ": " + msg);
}

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

}  // namespace

Network build_network(const NetworkSpec& spec) {
    Network net;
    net.nodes_.reserve(spec.nodes.size());
    for (const auto& n : spec.nodes) {
        if (n.id.empty()) reject(NetworkErrorKind::EmptyId, "node with empty id");
        if (!net.node_index_.emplace(n.id, net.nodes_.size()).second)
            reject(NetworkErrorKind::DuplicateId, "node id '" + n.id + "' appears twice");
        net.nodes_.push_back({n.id, n.role});
    }

    net.pipes_.reserve(spec.pipes.size());
    for (const auto& p : spec.pipes) {
        if (p.id.empty()) reject(NetworkErrorKind::EmptyId, "pipe with empty id");
        if (!net.pipe_index_.emplace(p.id, net.pipes_.size()).second)
            reject(NetworkErrorKind::DuplicateId, "pipe id '" + p.id + "' appears twice");
        auto tail = net.find_node(p.from);
        auto head = net.find_node(p.to);
        if (!tail) reject(NetworkErrorKind::UnknownEndpoint, "pipe '" + p.id + "' starts at unknown node '" + p.from + "'");
        if (!head) reject(NetworkErrorKind::UnknownEndpoint, "pipe '" + p.id + "' ends at unknown node '" + p.to + "'");
        if (*tail == *head) reject(NetworkErrorKind::SelfLoop, "pipe '" + p.id + "' connects '" + p.from + "' to itself");
        if (!positive_finite(p.params.length_m) || !positive_finite(p.params.diameter_m) ||
            !positive_finite(p.params.roughness))
            reject(NetworkErrorKind::NonpositiveParameter,
                   "pipe '" + p.id + "' needs length, diameter and roughness > 0");
        net.pipes_.push_back({p.id, *tail, *head, p.params, resistance(p.params)});
    }

    net.slot_.assign(net.nodes_.size(), {npos, npos});
    for (std::size_t i = 0; i < net.nodes_.size(); ++i) {
        if (net.nodes_[i].role == NodeRole::Reservoir) {
            net.slot_[i].first = net.reservoirs_.size();
            net.reservoirs_.push_back(i);
        } else {
            net.slot_[i].second = net.consumers_.size();
            net.consumers_.push_back(i);
        }
    }
    if (net.reservoirs_.empty()) reject(NetworkErrorKind::NoReservoir, "network has no reservoir node");
    if (net.consumers_.empty()) reject(NetworkErrorKind::NoConsumer, "network has no consumer node");

    std::vector<std::size_t> parent(net.nodes_.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    std::size_t components = net.nodes_.size();
    for (const auto& p : net.pipes_) {
        auto a = find_root(parent, p.tail);
        auto b = find_root(parent, p.head);
        if (a != b) {
            parent[a] = b;
            --components;
        }
    }
    if (components != 1)
        reject(NetworkErrorKind::Disconnected,
               "underlying undirected graph has " + std::to_string(components) + " components");

    net.adjacency_.assign(net.nodes_.size(), {});
    net.resistances_.resize(static_cast<Eigen::Index>(net.pipes_.size()));
    for (std::size_t e = 0; e < net.pipes_.size(); ++e) {
        net.adjacency_[net.pipes_[e].tail].push_back(e);
        net.adjacency_[net.pipes_[e].head].push_back(e);
        net.resistances_[static_cast<Eigen::Index>(e)] = net.pipes_[e].resistance;
    }
    return net;
}

IncidenceMatrix::IncidenceMatrix(const Network& net)
    : entries_(IntMatrix::Zero(static_cast<Eigen::Index>(net.node_count()),
                               static_cast<Eigen::Index>(net.pipe_count()))),
      consumers_(net.consumers()),
      reservoirs_(net.reservoirs()) {
    for (std::size_t e = 0; e < net.pipe_count(); ++e) {
        const auto& p = net.pipe(e);
        const auto col = static_cast<Eigen::Index>(e);
        entries_(static_cast<Eigen::Index>(p.tail), col) = 1;
        entries_(static_cast<Eigen::Index>(p.head), col) = -1;
        col_ids_.push_back(p.id);
    }
    for (const auto& n : net.nodes()) row_ids_.push_back(n.id);
}

IntMatrix IncidenceMatrix::submatrix(std::span<const std::size_t> rows, std::span<const std::size_t> cols) const {
    std::vector<Eigen::Index> r(rows.begin(), rows.end());
    std::vector<Eigen::Index> c(cols.begin(), cols.end());
    for (auto i : r)
        if (i < 0 || i >= entries_.rows()) throw std::out_of_range("incidence row index out of range");
    for (auto j : c)
        if (j < 0 || j >= entries_.cols()) throw std::out_of_range("incidence column index out of range");
    return entries_(r, c);
}

IntMatrix IncidenceMatrix::row_submatrix(std::span<const std::size_t> rows) const {
    std::vector<std::size_t> all(cols());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return submatrix(rows, all);
}

Eigen::MatrixXd IncidenceMatrix::consumer_rows() const { return row_submatrix(consumers_).cast<double>(); }

Eigen::MatrixXd IncidenceMatrix::reservoir_rows() const { return row_submatrix(reservoirs_).cast<double>(); }

}  // namespace wds

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace wds {

/// Hazen-Williams flow exponent.
inline constexpr double kHazenWilliamsExponent = 1.852;

/// Coefficient of the SI Hazen-Williams resistance formula.
inline constexpr double kHazenWilliamsCoefficient = 10.67;
inline constexpr double kDiameterExponent = 4.8704;
inline constexpr double kRoughnessExponent = 1.852;

enum class NodeRole { Reservoir, Consumer };

struct PipeParams {
    double length_m = 0.0;
    double diameter_m = 0.0;
    double roughness = 0.0;  // Hazen-Williams C, dimensionless
};

/// Pipe resistance r = 10.67 * l * D^-4.8704 * C^-1.852 (SI units).
double resistance(const PipeParams& p);

struct NodeSpec {
    std::string id;
    NodeRole role = NodeRole::Consumer;
};

struct PipeSpec {
    std::string id;
    std::string from;
    std::string to;
    PipeParams params;
};

/// Unvalidated description of a network, e.g. as read from JSON.
struct NetworkSpec {
    std::vector<NodeSpec> nodes;
    std::vector<PipeSpec> pipes;
};

enum class NetworkErrorKind {
    EmptyId,
    DuplicateId,
    UnknownEndpoint,
    SelfLoop,
    NonpositiveParameter,
    NoReservoir,
    NoConsumer,
    Disconnected,
};

const char* to_string(NetworkErrorKind kind);

class NetworkError : public std::runtime_error {
public:
    NetworkError(NetworkErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    NetworkErrorKind kind() const noexcept { return kind_; }

private:
    NetworkErrorKind kind_;
};

struct Node {
    std::string id;
    NodeRole role;
};

/// A physical pipe stored once, oriented tail -> head. The reverse directed
/// edge of the symmetric model is implied with opposite flow sign.
struct Pipe {
    std::string id;
    std::size_t tail;
    std::size_t head;
    PipeParams params;
    double resistance;
};

inline constexpr std::size_t npos = static_cast<std::size_t>(-1);

/// Validated, immutable water distribution network. Nodes and pipes keep the
/// insertion order of the spec they were built from; that order is the row
/// and column order of every matrix and vector in the library.
class Network {
public:
    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t pipe_count() const noexcept { return pipes_.size(); }
    std::size_t reservoir_count() const noexcept { return reservoirs_.size(); }
    std::size_t consumer_count() const noexcept { return consumers_.size(); }

    const std::vector<Node>& nodes() const noexcept { return nodes_; }
    const std::vector<Pipe>& pipes() const noexcept { return pipes_; }
    const Node& node(std::size_t i) const { return nodes_.at(i); }
    const Pipe& pipe(std::size_t i) const { return pipes_.at(i); }

    /// Node indices of reservoirs / consumers, in canonical order.
    const std::vector<std::size_t>& reservoirs() const noexcept { return reservoirs_; }
    const std::vector<std::size_t>& consumers() const noexcept { return consumers_; }

    /// Position of a node within consumers() (or reservoirs()), npos if it has the other role.
    std::size_t consumer_slot(std::size_t node) const { return slot_.at(node).second; }
    std::size_t reservoir_slot(std::size_t node) const { return slot_.at(node).first; }

    std::optional<std::size_t> find_node(const std::string& id) const;
    std::optional<std::size_t> find_pipe(const std::string& id) const;

    const Eigen::VectorXd& resistances() const noexcept { return resistances_; }

    /// Pipe indices incident to a node.
    const std::vector<std::size_t>& incident_pipes(std::size_t node) const { return adjacency_.at(node); }

    NetworkSpec to_spec() const;

private:
    friend Network build_network(const NetworkSpec& spec);
    Network() = default;

    std::vector<Node> nodes_;
    std::vector<Pipe> pipes_;
    std::vector<std::size_t> reservoirs_;
    std::vector<std::size_t> consumers_;
    std::vector<std::pair<std::size_t, std::size_t>> slot_;
    std::vector<std::vector<std::size_t>> adjacency_;
    std::unordered_map<std::string, std::size_t> node_index_;
    std::unordered_map<std::string, std::size_t> pipe_index_;
    Eigen::VectorXd resistances_;
};

/// Validates a spec. Throws NetworkError with the first violated rule.
Network build_network(const NetworkSpec& spec);

using IntMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic>;

/// Node x pipe incidence matrix: +1 at the tail, -1 at the head of each pipe.
class IncidenceMatrix {
public:
    explicit IncidenceMatrix(const Network& net);

    std::size_t rows() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
    std::size_t cols() const noexcept { return static_cast<std::size_t>(entries_.cols()); }
    int operator()(std::size_t node, std::size_t pipe) const {
        return entries_(static_cast<Eigen::Index>(node), static_cast<Eigen::Index>(pipe));
    }

    const IntMatrix& entries() const noexcept { return entries_; }

    /// Restriction to the given rows (all columns), in the requested order.
    IntMatrix row_submatrix(std::span<const std::size_t> rows) const;
    /// Restriction to the given rows and columns, in the requested order.
    IntMatrix submatrix(std::span<const std::size_t> rows, std::span<const std::size_t> cols) const;

    /// Rows of consumer (reservoir) nodes, as doubles, in canonical order.
    Eigen::MatrixXd consumer_rows() const;
    Eigen::MatrixXd reservoir_rows() const;

    const std::vector<std::string>& row_ids() const noexcept { return row_ids_; }
    const std::vector<std::string>& col_ids() const noexcept { return col_ids_; }

private:
    IntMatrix entries_;
    std::vector<std::string> row_ids_;
    std::vector<std::string> col_ids_;
    std::vector<std::size_t> consumers_;
    std::vector<std::size_t> reservoirs_;
};

inline IncidenceMatrix incidence_matrix(const Network& net) { return IncidenceMatrix(net); }

}  // namespace wds

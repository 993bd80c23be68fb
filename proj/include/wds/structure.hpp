#pragma once

#include "wds/network.hpp"

#include <Eigen/Dense>

#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

namespace wds {

class StructureError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct SubmatrixRank {
    std::size_t rank = 0;
    /// False when the rows are the full node set, where the rank is n_n - 1
    /// rather than the subset size.
    bool proper_subset = true;
};

/// Exact rank of the incidence rows indexed by `rows` (node indices).
/// Throws StructureError for an empty, duplicate or out-of-range selection.
SubmatrixRank submatrix_rank(const IncidenceMatrix& b, std::span<const std::size_t> rows);

/// Forest (independent) and chord (dependent) pipes w.r.t. the consumer rows.
struct EdgeDecomposition {
    std::vector<std::size_t> independent;
    std::vector<std::size_t> dependent;
};

/// Greedy scan over pipes in canonical order: a pipe becomes independent iff
/// its consumer-row column raises the rank of the columns kept so far.
EdgeDecomposition select_independent_edges(const Network& net);

/// Same scan, but `preferred` pipes are offered first (in the given order),
/// then the remaining pipes in canonical order.
EdgeDecomposition select_independent_edges(const Network& net, std::span<const std::size_t> preferred);

/// Rank of the consumer-row columns of the given pipes.
std::size_t consumer_column_rank(const Network& net, std::span<const std::size_t> pipes);

/// One fundamental cycle per chord: coefficient 1 on the chord, balancing
/// coefficients on forest pipes, zero elsewhere.
struct CycleBasis {
    std::vector<std::size_t> chords;
    std::vector<std::vector<int>> vectors;  // each of length n_p
};

CycleBasis cycle_space_basis(const Network& net);
CycleBasis cycle_space_basis(const Network& net, const EdgeDecomposition& dec);

inline constexpr double kDefaultMembershipTolerance = 1e-9;

struct Member {
    Eigen::VectorXd consumer_heads;
    double residual = 0.0;
};

struct NotMember {
    double residual = 0.0;
};

using ImageMembership = std::variant<Member, NotMember>;

/// Least-squares test of target in im(B_Vc^T). The relative residual
/// ||B_Vc^T h - target||_inf / max(1, ||target||_inf) is compared against tol.
ImageMembership image_membership(const Network& net, const Eigen::VectorXd& target,
                                 double tol = kDefaultMembershipTolerance);

}  // namespace wds

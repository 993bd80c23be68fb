#pragma once

#include "wds/network.hpp"

#include <boost/rational.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace wds {

using Rational = boost::rational<std::int64_t>;

/// Exact rank of an integer matrix by rational Gaussian elimination.
std::size_t exact_rank(const IntMatrix& m);

/// Exact determinant of a square integer matrix.
Rational exact_determinant(const IntMatrix& m);

/// Solves m * x = rhs exactly. Throws std::domain_error if m is singular.
std::vector<Rational> exact_solve(const IntMatrix& m, std::span<const Rational> rhs);

/// Incrementally built basis of a column space. Columns are offered one at a
/// time; a column is accepted iff it raises the rank of the accepted set.
class ColumnBasis {
public:
    explicit ColumnBasis(std::size_t dim) : dim_(dim) {}

    bool try_add(std::span<const int> column);
    std::size_t rank() const noexcept { return basis_.size(); }

private:
    std::size_t dim_;
    std::vector<std::vector<Rational>> basis_;
    std::vector<std::size_t> pivots_;
};

}  // namespace wds

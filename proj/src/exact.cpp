#include "wds/exact.hpp"

#include <stdexcept>
#include <utility>

namespace wds {

namespace {

using RationalMatrix = std::vector<std::vector<Rational>>;

// Mixed rational/int comparison does not terminate with Boost 1.74.
bool is_zero(const Rational& x) { return x.numerator() == 0; }

RationalMatrix to_rational(const IntMatrix& m) {
    RationalMatrix out(static_cast<std::size_t>(m.rows()), std::vector<Rational>(static_cast<std::size_t>(m.cols())));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = Rational(m(i, j));
    return out;
}

// Reduces a to row echelon form in place; returns the pivot columns. The sign
// of every row swap is folded into `sign`.
std::vector<std::size_t> eliminate(RationalMatrix& a, int& sign) {
    std::vector<std::size_t> pivots;
    const std::size_t rows = a.size();
    const std::size_t cols = rows == 0 ? 0 : a[0].size();
    std::size_t r = 0;
    sign = 1;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t p = r;
        while (p < rows && is_zero(a[p][c])) ++p;
        if (p == rows) continue;
        if (p != r) {
            std::swap(a[p], a[r]);
            sign = -sign;
        }
        for (std::size_t i = r + 1; i < rows; ++i) {
            if (is_zero(a[i][c])) continue;
            const Rational f = a[i][c] / a[r][c];
            for (std::size_t j = c; j < cols; ++j) a[i][j] -= f * a[r][j];
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

}  // namespace

std::size_t exact_rank(const IntMatrix& m) {
    auto a = to_rational(m);
    int sign = 1;
    return eliminate(a, sign).size();
}

Rational exact_determinant(const IntMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("determinant of a non-square matrix");
    auto a = to_rational(m);
    int sign = 1;
    if (eliminate(a, sign).size() != a.size()) return Rational(0);
    Rational det(sign);
    for (std::size_t i = 0; i < a.size(); ++i) det *= a[i][i];
    return det;
}

std::vector<Rational> exact_solve(const IntMatrix& m, std::span<const Rational> rhs) {
    const auto n = static_cast<std::size_t>(m.rows());
    if (m.cols() != m.rows() || rhs.size() != n) throw std::invalid_argument("exact_solve: dimension mismatch");
    auto a = to_rational(m);
    for (std::size_t i = 0; i < n; ++i) a[i].push_back(rhs[i]);
    int sign = 1;
    auto pivots = eliminate(a, sign);
    if (pivots.size() != n || (n > 0 && pivots.back() != n - 1)) throw std::domain_error("exact_solve: singular matrix");
    std::vector<Rational> x(n);
    for (std::size_t k = n; k-- > 0;) {
        Rational s = a[k][n];
        for (std::size_t j = k + 1; j < n; ++j) s -= a[k][j] * x[j];
        x[k] = s / a[k][k];
    }
    return x;
}

bool ColumnBasis::try_add(std::span<const int> column) {
    if (column.size() != dim_) throw std::invalid_argument("ColumnBasis: column has wrong length");
    std::vector<Rational> c(column.begin(), column.end());
    for (std::size_t k = 0; k < basis_.size(); ++k) {
        const Rational f = c[pivots_[k]];
        if (is_zero(f)) continue;
        for (std::size_t i = 0; i < dim_; ++i) c[i] -= f * basis_[k][i];
    }
    std::size_t p = 0;
    while (p < dim_ && is_zero(c[p])) ++p;
    if (p == dim_) return false;
    const Rational lead = c[p];
    for (auto& v : c) v /= lead;
    basis_.push_back(std::move(c));
    pivots_.push_back(p);
    return true;
}

}  // namespace wds

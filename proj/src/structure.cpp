#include "wds/structure.hpp"

#include "wds/exact.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cassert>

namespace wds {

SubmatrixRank submatrix_rank(const IncidenceMatrix& b, std::span<const std::size_t> rows) {
    if (rows.empty()) throw StructureError("EmptySubset: row selection is empty");
    std::vector<std::size_t> sorted(rows.begin(), rows.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw StructureError("row selection contains duplicates");
    if (sorted.back() >= b.rows()) throw StructureError("row selection out of range");

    SubmatrixRank out;
    out.rank = exact_rank(b.row_submatrix(rows));
    out.proper_subset = rows.size() < b.rows();
    // Every proper node subset of a connected graph has full row rank.
    assert(!out.proper_subset || out.rank == rows.size());
    return out;
}

namespace {

std::vector<int> consumer_column(const Network& net, std::size_t pipe) {
    std::vector<int> col(net.consumer_count(), 0);
    const auto& p = net.pipe(pipe);
    if (auto s = net.consumer_slot(p.tail); s != npos) col[s] += 1;
    if (auto s = net.consumer_slot(p.head); s != npos) col[s] -= 1;
    return col;
}

}  // namespace

EdgeDecomposition select_independent_edges(const Network& net) { return select_independent_edges(net, {}); }

EdgeDecomposition select_independent_edges(const Network& net, std::span<const std::size_t> preferred) {
    std::vector<std::size_t> order;
    order.reserve(net.pipe_count());
    std::vector<bool> seen(net.pipe_count(), false);
    for (auto e : preferred) {
        if (e >= net.pipe_count()) throw StructureError("preferred pipe index out of range");
        if (!seen[e]) order.push_back(e);
        seen[e] = true;
    }
    for (std::size_t e = 0; e < net.pipe_count(); ++e)
        if (!seen[e]) order.push_back(e);

    ColumnBasis basis(net.consumer_count());
    std::vector<bool> independent(net.pipe_count(), false);
    std::size_t kept = 0;
    for (auto e : order) {
        if (kept == net.consumer_count()) break;
        if (basis.try_add(consumer_column(net, e))) {
            independent[e] = true;
            ++kept;
        }
    }
    EdgeDecomposition dec;
    // Forest pipes keep scan order; chords keep canonical order.
    for (auto e : order)
        if (independent[e]) dec.independent.push_back(e);
    for (std::size_t e = 0; e < net.pipe_count(); ++e)
        if (!independent[e]) dec.dependent.push_back(e);
    return dec;
}

std::size_t consumer_column_rank(const Network& net, std::span<const std::size_t> pipes) {
    ColumnBasis basis(net.consumer_count());
    for (auto e : pipes) {
        if (e >= net.pipe_count()) throw StructureError("pipe index out of range");
        basis.try_add(consumer_column(net, e));
    }
    return basis.rank();
}

CycleBasis cycle_space_basis(const Network& net) { return cycle_space_basis(net, select_independent_edges(net)); }

CycleBasis cycle_space_basis(const Network& net, const EdgeDecomposition& dec) {
    if (dec.independent.size() != net.consumer_count() ||
        dec.independent.size() + dec.dependent.size() != net.pipe_count())
        throw StructureError("edge decomposition does not match the network");
    const IncidenceMatrix b(net);
    const IntMatrix forest = b.submatrix(net.consumers(), dec.independent);

    CycleBasis basis;
    for (auto chord : dec.dependent) {
        const auto col = consumer_column(net, chord);
        std::vector<Rational> rhs(col.size());
        std::transform(col.begin(), col.end(), rhs.begin(), [](int v) { return Rational(-v); });
        const auto coeff = exact_solve(forest, rhs);

        std::vector<int> v(net.pipe_count(), 0);
        v[chord] = 1;
        for (std::size_t k = 0; k < coeff.size(); ++k) {
            // The forest block is totally unimodular, so coefficients are integral.
            if (coeff[k].denominator() != 1) throw std::logic_error("non-integral fundamental cycle coefficient");
            v[dec.independent[k]] = static_cast<int>(coeff[k].numerator());
        }
        basis.chords.push_back(chord);
        basis.vectors.push_back(std::move(v));
    }
    return basis;
}

ImageMembership image_membership(const Network& net, const Eigen::VectorXd& target, double tol) {
    if (static_cast<std::size_t>(target.size()) != net.pipe_count())
        throw std::invalid_argument("image_membership: target must have one entry per pipe");
    const Eigen::MatrixXd bct = IncidenceMatrix(net).consumer_rows().transpose();
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(bct);
    Eigen::VectorXd h = qr.solve(target);
    const double scale = std::max(1.0, target.lpNorm<Eigen::Infinity>());
    const double residual = (bct * h - target).lpNorm<Eigen::Infinity>() / scale;
    if (residual <= tol) return Member{std::move(h), residual};
    return NotMember{residual};
}

}  // namespace wds

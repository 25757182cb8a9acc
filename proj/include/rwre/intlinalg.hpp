#ifndef RWRE_INTLINALG_HPP
#define RWRE_INTLINALG_HPP

#include <cstdint>
#include <numeric>
#include <vector>

#include "rwre/lattice.hpp"

namespace rwre {

// Exact integer linear algebra on small matrices (d is the lattice dimension,
// rows are jump vectors or their differences). Fraction-free elimination keeps
// everything in int64; inputs here are tiny so overflow is not a concern.

inline Lattice reduce_by_gcd(Lattice v) {
    std::int64_t g = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) g = std::gcd(g, std::abs(v[i]));
    if (g > 1) for (Eigen::Index i = 0; i < v.size(); ++i) v[i] /= g;
    return v;
}

struct IntRowEchelon {
    std::vector<Lattice> basis;      // independent rows spanning the input rows
    std::vector<int> pivot_cols;
    int rank = 0;
};

inline IntRowEchelon int_row_echelon(std::vector<Lattice> rows, Eigen::Index dim) {
    IntRowEchelon out;
    std::vector<Lattice> work;
    for (auto& r : rows) {
        Lattice v = r;
        // eliminate against existing pivots
        for (std::size_t k = 0; k < work.size(); ++k) {
            const int pc = out.pivot_cols[k];
            if (v[pc] == 0) continue;
            const std::int64_t a = work[k][pc];
            const std::int64_t b = v[pc];
            const std::int64_t g = std::gcd(std::abs(a), std::abs(b));
            v = reduce_by_gcd((v * (a / g) - work[k] * (b / g)).eval());
        }
        int pc = -1;
        for (Eigen::Index c = 0; c < dim; ++c) {
            if (v[c] != 0) { pc = static_cast<int>(c); break; }
        }
        if (pc >= 0) {
            work.push_back(reduce_by_gcd(v));
            out.pivot_cols.push_back(pc);
        }
    }
    out.basis = std::move(work);
    out.rank = static_cast<int>(out.basis.size());
    return out;
}

// Integer basis of { u : B u = 0 } for the echelon basis B. One kernel vector
// per free column, produced by exact back substitution over rationals and
// cleared to integers.
inline std::vector<Lattice> int_kernel(const IntRowEchelon& ech, Eigen::Index dim) {
    std::vector<bool> is_pivot(static_cast<std::size_t>(dim), false);
    for (int pc : ech.pivot_cols) is_pivot[static_cast<std::size_t>(pc)] = true;

    std::vector<Lattice> kernel;
    for (Eigen::Index free_c = 0; free_c < dim; ++free_c) {
        if (is_pivot[static_cast<std::size_t>(free_c)]) continue;
        // rational solution u with u[free_c] = 1, tracked as numerators over a
        // common denominator
        std::vector<std::int64_t> num(static_cast<std::size_t>(dim), 0);
        std::int64_t den = 1;
        num[static_cast<std::size_t>(free_c)] = 1;
        for (int k = ech.rank - 1; k >= 0; --k) {
            const Lattice& row = ech.basis[static_cast<std::size_t>(k)];
            const int pc = ech.pivot_cols[static_cast<std::size_t>(k)];
            std::int64_t s = 0;
            for (Eigen::Index c = 0; c < dim; ++c) {
                if (c == pc) continue;
                s += row[c] * num[static_cast<std::size_t>(c)];
            }
            // row . u = 0  =>  u[pc] = -s / (row[pc] * den); rescale.
            const std::int64_t piv = row[pc];
            for (auto& x : num) x *= piv;
            den *= piv;
            num[static_cast<std::size_t>(pc)] = -s;
        }
        Lattice v(dim);
        for (Eigen::Index c = 0; c < dim; ++c) v[c] = num[static_cast<std::size_t>(c)];
        if (den < 0) v = -v;
        kernel.push_back(reduce_by_gcd(v));
    }
    return kernel;
}

} // namespace rwre

#endif

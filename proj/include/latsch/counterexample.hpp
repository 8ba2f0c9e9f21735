#pragma once

#include <vector>

#include "latsch/domain.hpp"
#include "latsch/field.hpp"
#include "latsch/rational.hpp"
#include "latsch/stencil.hpp"

namespace latsch {

struct Counterexample {
    ExteriorDomain domain;
    FieldQ boundary_field;        // zero on the interior, +-1 pattern on the boundary
    Rational lambda;              // 1/2 by convention; the identity is lambda-free
    int kernel_dimension = 0;
};

namespace detail {

/// Kernel of a 0/1 adjacency constraint matrix over the rationals, by exact
/// Gauss-Jordan elimination. Returns a basis as column vectors.
inline std::vector<std::vector<Rational>> rational_kernel(
    std::vector<std::vector<Rational>> A, int ncols) {
    int nrows = static_cast<int>(A.size());
    std::vector<int> pivot_of_col(static_cast<size_t>(ncols), -1);
    int rank = 0;
    for (int c = 0; c < ncols && rank < nrows; ++c) {
        int piv = -1;
        for (int r = rank; r < nrows; ++r)
            if (!A[static_cast<size_t>(r)][static_cast<size_t>(c)].is_zero()) {
                piv = r;
                break;
            }
        if (piv < 0) continue;
        std::swap(A[static_cast<size_t>(rank)], A[static_cast<size_t>(piv)]);
        Rational inv = Rational(1) / A[static_cast<size_t>(rank)][static_cast<size_t>(c)];
        for (int cc = 0; cc < ncols; ++cc) A[static_cast<size_t>(rank)][static_cast<size_t>(cc)] *= inv;
        for (int r = 0; r < nrows; ++r) {
            if (r == rank) continue;
            Rational f = A[static_cast<size_t>(r)][static_cast<size_t>(c)];
            if (f.is_zero()) continue;
            for (int cc = 0; cc < ncols; ++cc)
                A[static_cast<size_t>(r)][static_cast<size_t>(cc)] -=
                    f * A[static_cast<size_t>(rank)][static_cast<size_t>(cc)];
        }
        pivot_of_col[static_cast<size_t>(c)] = rank;
        ++rank;
    }
    std::vector<std::vector<Rational>> basis;
    for (int c = 0; c < ncols; ++c) {
        if (pivot_of_col[static_cast<size_t>(c)] >= 0) continue;
        std::vector<Rational> v(static_cast<size_t>(ncols), Rational(0));
        v[static_cast<size_t>(c)] = Rational(1);
        for (int cc = 0; cc < ncols; ++cc) {
            int pr = pivot_of_col[static_cast<size_t>(cc)];
            if (pr >= 0) v[static_cast<size_t>(cc)] = -A[static_cast<size_t>(pr)][static_cast<size_t>(c)];
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

}  // namespace detail

/// The fourth-quadrant staircase with a field that kills unique continuation:
/// u = 0 on the interior of Omega_ext and nonzero on its boundary, solving
/// (H_ext - 1/2) u = 0 on the interior exactly. With u vanishing inside, the
/// interior equation at n reduces to  sum_{m ~ n, m in boundary} u(m) = 0,
/// a 0/1 linear system over the boundary sites; any nonzero kernel vector is
/// a counterexample, and the staircase's reentrant corner supplies one.
/// All arithmetic is rational, so the residual is a literal zero.
inline Counterexample build_counterexample(int steps = 3) {
    std::set<Site> obstacle = obstacle_figure2_staircase(steps);
    int extent = 0;
    for (const Site& n : obstacle) extent = std::max(extent, n.norm_inf());
    ExteriorDomain domain = classify_domain(2, obstacle, extent + 4);

    std::vector<Site> bnd = domain.boundary_sites();
    std::map<Site, int> bidx;
    for (size_t i = 0; i < bnd.size(); ++i) bidx[bnd[i]] = static_cast<int>(i);

    // one constraint per interior site adjacent to the boundary
    std::vector<std::vector<Rational>> rows;
    std::set<Site> row_sites;
    for (const Site& b : bnd)
        for (const Site& q : neighbors(b))
            if (domain.contains(q) && domain.is_interior(q)) row_sites.insert(q);
    for (const Site& q : row_sites) {
        std::vector<Rational> row(bnd.size(), Rational(0));
        for (const Site& m : neighbors(q)) {
            auto it = bidx.find(m);
            if (it != bidx.end()) row[static_cast<size_t>(it->second)] = Rational(1);
        }
        rows.push_back(std::move(row));
    }

    auto basis = detail::rational_kernel(std::move(rows), static_cast<int>(bnd.size()));
    if (basis.empty()) throw Error("staircase boundary system has a trivial kernel");

    // deterministic representative: first basis vector, normalized so the
    // entry of largest magnitude is +1
    std::vector<Rational>& v = basis.front();
    Rational best(0);
    for (const Rational& x : v)
        if (x.abs() > best.abs()) best = x;
    FieldQ field(2);
    for (size_t i = 0; i < bnd.size(); ++i) {
        Rational val = v[i] / best;
        if (!val.is_zero()) field.set(bnd[i], val);
    }

    Counterexample ce{std::move(domain), std::move(field), Rational(1, 2),
                      static_cast<int>(basis.size())};
    return ce;
}

/// Exact residual max |(H_ext - lambda) u| over the windowed interior.
inline Rational interior_residual_exact(const ExteriorDomain& domain, const FieldQ& u,
                                        const Rational& lambda) {
    FieldQ zeroV(2);
    FieldQ r = apply_schrodinger(zeroV, lambda, u);
    Rational worst(0);
    domain.window().for_each([&](const Site& n) {
        if (domain.contains(n) && domain.is_interior(n)) {
            Rational a = r.at(n).abs();
            if (worst < a) worst = a;
        }
    });
    return worst;
}

}  // namespace latsch

#pragma once

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "latsch/domain.hpp"
#include "latsch/errors.hpp"
#include "latsch/field.hpp"

namespace latsch {

/// Compressed sparse rows, symmetric content stored fully for matvec ease.
struct SparseSym {
    int n = 0;
    std::vector<int> row_ptr;
    std::vector<int> col;
    std::vector<double> val;

    static SparseSym from_triplets(int n, std::map<std::pair<int, int>, double> trip) {
        SparseSym A;
        A.n = n;
        A.row_ptr.assign(static_cast<size_t>(n) + 1, 0);
        for (const auto& [ij, v] : trip) A.row_ptr[static_cast<size_t>(ij.first) + 1]++;
        for (int i = 0; i < n; ++i) A.row_ptr[static_cast<size_t>(i) + 1] += A.row_ptr[static_cast<size_t>(i)];
        A.col.resize(trip.size());
        A.val.resize(trip.size());
        std::vector<int> fill(A.row_ptr.begin(), A.row_ptr.end() - 1);
        for (const auto& [ij, v] : trip) {
            int slot = fill[static_cast<size_t>(ij.first)]++;
            A.col[static_cast<size_t>(slot)] = ij.second;
            A.val[static_cast<size_t>(slot)] = v;
        }
        return A;
    }

    void matvec(const double* x, double* y) const {
        for (int i = 0; i < n; ++i) {
            double s = 0;
            for (int k = row_ptr[static_cast<size_t>(i)]; k < row_ptr[static_cast<size_t>(i) + 1]; ++k)
                s += val[static_cast<size_t>(k)] * x[col[static_cast<size_t>(k)]];
            y[i] = s;
        }
    }
    std::vector<double> matvec(const std::vector<double>& x) const {
        std::vector<double> y(static_cast<size_t>(n));
        matvec(x.data(), y.data());
        return y;
    }

    double entry(int i, int j) const {
        for (int k = row_ptr[static_cast<size_t>(i)]; k < row_ptr[static_cast<size_t>(i) + 1]; ++k)
            if (col[static_cast<size_t>(k)] == j) return val[static_cast<size_t>(k)];
        return 0.0;
    }

    /// max |A - A^T| entrywise; zero for everything this module assembles
    double symmetry_defect() const {
        double worst = 0;
        for (int i = 0; i < n; ++i)
            for (int k = row_ptr[static_cast<size_t>(i)]; k < row_ptr[static_cast<size_t>(i) + 1]; ++k)
                worst = std::max(worst,
                                 std::abs(val[static_cast<size_t>(k)] - entry(col[static_cast<size_t>(k)], i)));
        return worst;
    }
};

enum class BcKind { whole_space_box, dirichlet, robin };

inline std::string to_string(BcKind k) {
    switch (k) {
        case BcKind::whole_space_box: return "whole_space_box";
        case BcKind::dirichlet: return "dirichlet";
        case BcKind::robin: return "robin";
    }
    return "?";
}

/// Sparse symmetric realization of -Delta_disc + V on an enumerated site set,
/// with the boundary handling folded in per bc_kind.
struct AssembledOperator {
    int dim = 0;
    BcKind bc = BcKind::whole_space_box;
    std::vector<Site> site_index;        // lexicographic
    SparseSym matrix;
    std::map<Site, double> robin_c;      // boundary coefficients, robin only

    int size() const { return matrix.n; }
    int index_of(const Site& n) const {
        auto it = std::lower_bound(site_index.begin(), site_index.end(), n);
        if (it == site_index.end() || !(*it == n)) return -1;
        return static_cast<int>(it - site_index.begin());
    }
};

/// Assemble over a classified site set.
///   dirichlet        rows/cols over interior sites only (u = 0 on the boundary)
///   robin            all sites; boundary rows are the graph-Laplacian normal
///                    derivative plus (c + V) on the diagonal
///   whole_space_box  all sites as full-stencil rows with hard zero padding
/// Couplings leaving the site set are dropped (Dirichlet truncation).
inline AssembledOperator assemble(const ClassifiedSet& omega, const FieldR& V, BcKind bc,
                                  const std::map<Site, double>& robin_c = {}) {
    if (!V.is_real_valued()) throw NonRealPotential("assemble: potential must be real");
    const int d = omega.dim();
    const double diag_free = 0.5 * d;

    AssembledOperator op;
    op.dim = d;
    op.bc = bc;
    op.robin_c = robin_c;

    std::vector<int> rowmap(static_cast<size_t>(omega.size()), -1);
    for (int i = 0; i < omega.size(); ++i) {
        bool keep = (bc != BcKind::dirichlet) || omega.is_interior(i);
        if (keep) {
            rowmap[static_cast<size_t>(i)] = static_cast<int>(op.site_index.size());
            op.site_index.push_back(omega.site(i));
        }
    }

    std::map<std::pair<int, int>, double> trip;
    auto put = [&](int i, int j, double v) {
        if (v != 0.0) trip[{i, j}] += v;
    };

    for (int i = 0; i < omega.size(); ++i) {
        int r = rowmap[static_cast<size_t>(i)];
        if (r < 0) continue;
        const Site& n = omega.site(i);
        bool stencil_row = (bc != BcKind::robin) || omega.is_interior(i);
        if (bc == BcKind::whole_space_box) stencil_row = true;

        if (stencil_row) {
            put(r, r, diag_free + V.at(n));
            for (const Site& m : neighbors(n)) {
                int j = omega.index_of(m);
                if (j < 0) continue;                       // zero padding outside the set
                int cjl = rowmap[static_cast<size_t>(j)];
                if (cjl < 0) continue;                     // dirichlet: boundary column dropped
                put(r, cjl, -0.25);
            }
        } else {
            // robin boundary row: normal derivative + c + V
            auto it = robin_c.find(n);
            if (it == robin_c.end())
                throw MissingRobinCoefficient("no Robin coefficient at a boundary site");
            int interior_nbrs = 0;
            for (const Site& m : neighbors(n)) {
                int j = omega.index_of(m);
                if (j >= 0 && omega.is_interior(j)) {
                    ++interior_nbrs;
                    put(r, rowmap[static_cast<size_t>(j)], -0.25);
                }
            }
            put(r, r, 0.25 * interior_nbrs + it->second + V.at(n));
        }
    }
    op.matrix = SparseSym::from_triplets(static_cast<int>(op.site_index.size()), std::move(trip));
    return op;
}

inline AssembledOperator assemble(const ExteriorDomain& domain, const FieldR& V, BcKind bc,
                                  const std::map<Site, double>& robin_c = {}) {
    return assemble(domain.windowed(), V, bc, robin_c);
}

/// Solid box of `side` sites per axis, roughly centered on the origin, with
/// every row a full stencil row (hard zero outside: the Dirichlet truncation
/// of the whole-space operator).
inline AssembledOperator assemble_whole_space_box(int dim, int side, const FieldR& V) {
    int lo = -side / 2;
    Box b = Box::cube(dim, lo, lo + side - 1);
    ClassifiedSet cs = ClassifiedSet::box(dim, b);
    return assemble(cs, V, BcKind::whole_space_box);
}

inline std::map<Site, double> uniform_robin(const ClassifiedSet& omega, double c) {
    std::map<Site, double> out;
    for (const Site& n : omega.boundary_sites()) out[n] = c;
    return out;
}

/// MatrixMarket coordinate output (symmetric, lower triangle, 1-based).
inline std::string to_matrix_market(const SparseSym& A) {
    std::string out = "%%MatrixMarket matrix coordinate real symmetric\n";
    std::vector<std::string> lines;
    int nnz_lower = 0;
    for (int i = 0; i < A.n; ++i)
        for (int k = A.row_ptr[static_cast<size_t>(i)]; k < A.row_ptr[static_cast<size_t>(i) + 1]; ++k)
            if (A.col[static_cast<size_t>(k)] <= i) ++nnz_lower;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%d %d %d\n", A.n, A.n, nnz_lower);
    out += buf;
    for (int i = 0; i < A.n; ++i)
        for (int k = A.row_ptr[static_cast<size_t>(i)]; k < A.row_ptr[static_cast<size_t>(i) + 1]; ++k) {
            int j = A.col[static_cast<size_t>(k)];
            if (j > i) continue;
            std::snprintf(buf, sizeof buf, "%d %d %.17g\n", i + 1, j + 1, A.val[static_cast<size_t>(k)]);
            out += buf;
        }
    return out;
}

}  // namespace latsch

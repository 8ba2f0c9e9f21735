#pragma once

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "latsch/assemble.hpp"
#include "latsch/errors.hpp"
#include "latsch/lanczos.hpp"
#include "latsch/rng.hpp"

namespace latsch {

struct EigenPairs {
    std::vector<double> values;    // ascending
    std::vector<double> vectors;   // column-major n x m, empty if not requested
    int n = 0;
};

constexpr int kDenseEigLimit = 20000;

/// Dense symmetric eigensolve (LAPACK dsyevr), full range or [vl, vu).
inline EigenPairs dense_eigensolve(const SparseSym& A, bool vectors = true, bool ranged = false,
                                   double vl = 0, double vu = 0) {
    if (A.n > kDenseEigLimit)
        throw ConvergenceFailure("matrix too large for dense mode");
    const int n = A.n;
    std::vector<double> dense(static_cast<size_t>(n) * static_cast<size_t>(n), 0.0);
    for (int i = 0; i < n; ++i)
        for (int k = A.row_ptr[static_cast<size_t>(i)]; k < A.row_ptr[static_cast<size_t>(i) + 1]; ++k)
            dense[static_cast<size_t>(i) + static_cast<size_t>(A.col[static_cast<size_t>(k)]) * static_cast<size_t>(n)] =
                A.val[static_cast<size_t>(k)];

    EigenPairs out;
    out.n = n;
    out.values.resize(static_cast<size_t>(n));
    std::vector<double> z;
    if (vectors) z.resize(static_cast<size_t>(n) * static_cast<size_t>(n));
    std::vector<lapack_int> isuppz(2 * static_cast<size_t>(n));
    lapack_int m = 0;
    lapack_int info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', ranged ? 'V' : 'A',
                                     'L', n, dense.data(), n, vl, vu, 0, 0, 0.0, &m,
                                     out.values.data(), vectors ? z.data() : nullptr, n,
                                     isuppz.data());
    if (info != 0) throw ConvergenceFailure("dsyevr failed, info=" + std::to_string(info));
    out.values.resize(static_cast<size_t>(m));
    if (vectors) {
        z.resize(static_cast<size_t>(n) * static_cast<size_t>(m));
        out.vectors = std::move(z);
    }
    return out;
}

struct EigenReport {
    int box_size = 0;
    BcKind bc = BcKind::whole_space_box;
    std::vector<double> eigenvalues;
    std::vector<double> localization;     // mass fraction in the probe ball, per pair
    double max_residual = 0;              // max ||Hv - lambda v||
    double ortho_defect = 0;              // max |<v_i, v_j> - delta_ij| (sampled)
    EigenPairs pairs;
};

namespace detail {

inline double pair_residual(const SparseSym& A, const double* v, double lambda) {
    std::vector<double> y(static_cast<size_t>(A.n));
    A.matvec(v, y.data());
    double s = 0;
    for (int i = 0; i < A.n; ++i) {
        double r = y[static_cast<size_t>(i)] - lambda * v[i];
        s += r * r;
    }
    return std::sqrt(s);
}

/// Basis-independent localization: cluster nearly degenerate eigenvalues and
/// take the top eigenvalue of the probe-restricted Gram form on the cluster
/// span; an arbitrary rotation inside a degenerate eigenspace then cannot
/// change the reported number.
inline std::vector<double> cluster_localization(const EigenPairs& p,
                                                const std::vector<int>& probe_rows,
                                                double cluster_gap = 1e-6) {
    std::vector<double> loc(p.values.size(), 0.0);
    size_t m = p.values.size();
    size_t i = 0;
    while (i < m) {
        size_t j = i + 1;
        while (j < m && p.values[j] - p.values[j - 1] <= cluster_gap) ++j;
        size_t k = j - i;
        Eigen::MatrixXd G(probe_rows.size(), k);
        for (size_t c = 0; c < k; ++c)
            for (size_t r = 0; r < probe_rows.size(); ++r)
                G(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                    p.vectors[(i + c) * static_cast<size_t>(p.n) + static_cast<size_t>(probe_rows[r])];
        double v;
        if (k == 1) {
            v = G.col(0).squaredNorm();
        } else {
            Eigen::MatrixXd S = G.transpose() * G;
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
            v = es.eigenvalues().maxCoeff();
        }
        for (size_t c = 0; c < k; ++c) loc[i + c] = v;
        i = j;
    }
    return loc;
}

}  // namespace detail

/// Full eigensolve of an assembled operator: dense below the size limit,
/// Lanczos with full reorthogonalization above (extremal pairs only there).
/// Requesting count < n returns the lowest `count` pairs.
inline EigenReport eigensolve(const AssembledOperator& op, int count = -1,
                              double probe_radius = -1) {
    const SparseSym& A = op.matrix;
    EigenReport rep;
    rep.bc = op.bc;
    if (A.n <= kDenseEigLimit) {
        rep.pairs = dense_eigensolve(A, true);
    } else {
        if (count < 0)
            throw ConvergenceFailure("full spectrum above the dense limit; pass a count");
        auto pairs = lanczos_lowest(A, count);
        rep.pairs.n = A.n;
        for (const auto& p : pairs) {
            rep.pairs.values.push_back(p.value);
            rep.pairs.vectors.insert(rep.pairs.vectors.end(), p.vector.begin(), p.vector.end());
        }
    }
    if (count >= 0 && count < static_cast<int>(rep.pairs.values.size())) {
        rep.pairs.values.resize(static_cast<size_t>(count));
        rep.pairs.vectors.resize(static_cast<size_t>(count) * static_cast<size_t>(A.n));
    }
    rep.eigenvalues = rep.pairs.values;

    size_t m = rep.pairs.values.size();
    for (size_t j = 0; j < m; ++j)
        rep.max_residual = std::max(
            rep.max_residual,
            detail::pair_residual(A, rep.pairs.vectors.data() + j * static_cast<size_t>(A.n),
                                  rep.pairs.values[j]));
    if (rep.max_residual > 1e-8)
        throw ConvergenceFailure("eigen residual above 1e-8");

    // sampled orthonormality check
    CounterRng rng(12345, "eigensolve/ortho");
    for (int t = 0; t < 64 && m > 0; ++t) {
        size_t a = static_cast<size_t>(rng.index(m)), b = static_cast<size_t>(rng.index(m));
        double s = 0;
        const double* va = rep.pairs.vectors.data() + a * static_cast<size_t>(A.n);
        const double* vb = rep.pairs.vectors.data() + b * static_cast<size_t>(A.n);
        for (int i = 0; i < A.n; ++i) s += va[i] * vb[i];
        rep.ortho_defect = std::max(rep.ortho_defect, std::abs(s - (a == b ? 1.0 : 0.0)));
    }

    if (probe_radius >= 0) {
        std::vector<int> rows;
        for (int i = 0; i < A.n; ++i)
            if (op.site_index[static_cast<size_t>(i)].norm() <= probe_radius) rows.push_back(i);
        rep.localization = detail::cluster_localization(rep.pairs, rows);
    }
    return rep;
}

}  // namespace latsch

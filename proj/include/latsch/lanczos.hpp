#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "latsch/assemble.hpp"
#include "latsch/banded.hpp"
#include "latsch/errors.hpp"
#include "latsch/rng.hpp"

namespace latsch {

namespace detail {

/// Lanczos with full reorthogonalization against the whole stored basis.
/// Returns the basis V (n x m, column-major) and the tridiagonal (alpha, beta).
struct LanczosRun {
    std::vector<double> basis;
    std::vector<double> alpha, beta;
    int n = 0, m = 0;
};

inline LanczosRun lanczos_full_reorth(const std::function<void(const double*, double*)>& apply,
                                      int n, int max_steps, std::uint64_t seed,
                                      const std::vector<std::vector<double>>& deflate = {}) {
    LanczosRun run;
    run.n = n;
    CounterRng rng(seed, "lanczos/start");
    std::vector<double> v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = rng.uniform(-1.0, 1.0);
    auto dot = [n](const double* a, const double* b) {
        double s = 0;
        for (int i = 0; i < n; ++i) s += a[i] * b[i];
        return s;
    };
    auto orth_against = [&](std::vector<double>& w) {
        for (const auto& d : deflate) {
            double c = dot(w.data(), d.data());
            for (int i = 0; i < n; ++i) w[static_cast<size_t>(i)] -= c * d[static_cast<size_t>(i)];
        }
        for (int j = 0; j < run.m; ++j) {
            const double* q = run.basis.data() + static_cast<size_t>(j) * static_cast<size_t>(n);
            double c = dot(w.data(), q);
            for (int i = 0; i < n; ++i) w[static_cast<size_t>(i)] -= c * q[i];
        }
    };

    orth_against(v);
    double nv = std::sqrt(dot(v.data(), v.data()));
    if (nv < 1e-14) throw ConvergenceFailure("lanczos: degenerate start vector");
    for (auto& x : v) x /= nv;

    std::vector<double> w(static_cast<size_t>(n));
    for (int step = 0; step < max_steps; ++step) {
        run.basis.insert(run.basis.end(), v.begin(), v.end());
        run.m = step + 1;
        apply(v.data(), w.data());
        double a = dot(w.data(), v.data());
        run.alpha.push_back(a);
        orth_against(w);   // full reorthogonalization, covers the 3-term recurrence too
        double b = std::sqrt(dot(w.data(), w.data()));
        if (b < 1e-12) {   // invariant subspace exhausted
            run.beta.push_back(0);
            break;
        }
        run.beta.push_back(b);
        for (int i = 0; i < n; ++i) v[static_cast<size_t>(i)] = w[static_cast<size_t>(i)] / b;
    }
    return run;
}

struct RitzPair {
    double theta;                  // eigenvalue of the tridiagonal
    std::vector<double> vec;       // Ritz vector in R^n
    double bound;                  // |beta_m s_m|, the classical residual bound
};

inline std::vector<RitzPair> ritz_pairs(const LanczosRun& run) {
    int m = run.m;
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
        T(i, i) = run.alpha[static_cast<size_t>(i)];
        if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = run.beta[static_cast<size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    std::vector<RitzPair> out(static_cast<size_t>(m));
    double beta_last = run.beta.empty() ? 0.0 : run.beta[static_cast<size_t>(m) - 1];
    for (int j = 0; j < m; ++j) {
        out[static_cast<size_t>(j)].theta = es.eigenvalues()(j);
        out[static_cast<size_t>(j)].bound = std::abs(beta_last * es.eigenvectors()(m - 1, j));
        out[static_cast<size_t>(j)].vec.assign(static_cast<size_t>(run.n), 0.0);
        for (int i = 0; i < m; ++i) {
            double c = es.eigenvectors()(i, j);
            const double* q = run.basis.data() + static_cast<size_t>(i) * static_cast<size_t>(run.n);
            for (int r = 0; r < run.n; ++r) out[static_cast<size_t>(j)].vec[static_cast<size_t>(r)] += c * q[r];
        }
    }
    return out;
}

}  // namespace detail

struct WindowPair {
    double value;
    std::vector<double> vector;
};

namespace detail {

/// Exact spectral atoms at integer shifts. The free part of the lattice box
/// operator carries a macroscopically degenerate level at each interior
/// integer (the van Hove shell); eigenvectors of that shell vanishing on the
/// potential support survive a compactly supported perturbation unchanged, so
/// the assembled matrix keeps an exact eigenvalue there with multiplicity up
/// to shell size minus potential rank. Shift-invert slicing must peel these
/// off first: a slice center near the atom is numerically singular, and a
/// single-vector Krylov sweep recovers a high multiplicity only one copy per
/// restart. Inverse iteration from a shift a hair off the integer, deflating
/// as it goes, collects the whole eigenspace in a few solves per copy.
inline std::vector<WindowPair> collect_integer_atoms(const SparseSym& A, double lo, double hi,
                                                     double scale, std::uint64_t seed) {
    std::vector<WindowPair> atoms;
    const int n = A.n;
    for (int k = static_cast<int>(std::ceil(lo)); k < hi; ++k) {
        if (k <= lo) continue;
        // bracket with fixed shifts (no nudging: a nudge larger than the
        // bracket would hide the atom); widen on leading-minor breakdowns
        int m = 0;
        for (double delta = 1e-10 * scale; delta <= 2e-7 * scale; delta *= 4) {
            int below = 0, above = 0;
            if (!band_count_below(A, k - delta, &below)) continue;
            if (!band_count_below(A, k + delta, &above)) continue;
            m = above - below;
            break;
        }
        if (m <= 0) continue;
        BandedShiftedLU lu(A, double(k) + 1e-7 * scale);
        CounterRng rng(seed, "atoms/" + std::to_string(k));
        std::vector<WindowPair> harvested;
        std::vector<std::vector<double>> parked;   // close neighbors, deflated but not counted
        int attempts = 0;
        while (static_cast<int>(harvested.size()) < m && attempts < 4 * m + 16) {
            ++attempts;
            std::vector<double> v(static_cast<size_t>(n));
            for (auto& x : v) x = rng.uniform(-1, 1);
            auto deflate = [&](std::vector<double>& w) {
                for (const auto& h : harvested) {
                    double c = 0;
                    for (int i = 0; i < n; ++i) c += w[static_cast<size_t>(i)] * h.vector[static_cast<size_t>(i)];
                    for (int i = 0; i < n; ++i) w[static_cast<size_t>(i)] -= c * h.vector[static_cast<size_t>(i)];
                }
                for (const auto& p : parked) {
                    double c = 0;
                    for (int i = 0; i < n; ++i) c += w[static_cast<size_t>(i)] * p[static_cast<size_t>(i)];
                    for (int i = 0; i < n; ++i) w[static_cast<size_t>(i)] -= c * p[static_cast<size_t>(i)];
                }
            };
            double rayleigh = 0;
            for (int it = 0; it < 6; ++it) {
                deflate(v);
                lu.solve(v);
                deflate(v);
                double nv = 0;
                for (double x : v) nv += x * x;
                nv = std::sqrt(nv);
                if (nv < 1e-280) break;
                for (auto& x : v) x /= nv;
            }
            std::vector<double> y(static_cast<size_t>(n));
            A.matvec(v.data(), y.data());
            double num = 0, den = 0;
            for (int i = 0; i < n; ++i) {
                num += v[static_cast<size_t>(i)] * y[static_cast<size_t>(i)];
                den += v[static_cast<size_t>(i)] * v[static_cast<size_t>(i)];
            }
            rayleigh = num / den;
            double rn = 0;
            for (int i = 0; i < n; ++i) {
                double r = y[static_cast<size_t>(i)] - rayleigh * v[static_cast<size_t>(i)];
                rn += r * r;
            }
            rn = std::sqrt(rn / den);
            if (rn > 1e-9 * std::max(1.0, scale)) continue;
            if (std::abs(rayleigh - k) <= 1e-10) {
                harvested.push_back({rayleigh, std::move(v)});
            } else {
                parked.push_back(std::move(v));   // a neighbor intruding on the shift
            }
        }
        if (static_cast<int>(harvested.size()) != m)
            throw ConvergenceFailure("atom harvest incomplete at lambda = " + std::to_string(k));
        for (auto& h : harvested) atoms.push_back(std::move(h));
    }
    return atoms;
}

}  // namespace detail

/// All eigenpairs of A in [lo, hi), by inertia-verified spectrum slicing with
/// shift-inverted Lanczos per slice. Slice populations come from Sturm counts
/// of the banded factorization, so completeness is checked, not hoped for:
/// each slice keeps extracting (restarting deflated if needed) until it holds
/// exactly as many converged pairs as the inertia says it must.
inline std::vector<WindowPair> window_eigenpairs(const SparseSym& A, double lo, double hi,
                                                 double residual_tol = 1e-8,
                                                 int target_per_slice = 44,
                                                 std::uint64_t seed = 777) {
    std::vector<WindowPair> out;
    int nslices_probe = 1;
    {
        InertiaCount clo = eigen_count_below(A, lo), chi = eigen_count_below(A, hi);
        int total = chi.count - clo.count;
        if (total == 0) return out;
        nslices_probe = std::clamp((total + target_per_slice - 1) / target_per_slice, 1, 512);
    }
    const int nslices = nslices_probe;

    // slice edges with the shifts the Sturm counts actually used, so the
    // membership filter below sees exactly the counted intervals
    std::vector<InertiaCount> edge(static_cast<size_t>(nslices) + 1);
    for (int j = 0; j <= nslices; ++j)
        edge[static_cast<size_t>(j)] = eigen_count_below(A, lo + (hi - lo) * j / nslices);

    double scale = 0;
    for (double v : A.val) scale = std::max(scale, std::abs(v));

    // exact integer-level atoms come out first and stay deflated below
    std::vector<WindowPair> atoms = detail::collect_integer_atoms(A, lo, hi, scale, seed ^ 0xa70);

    for (int j = 0; j < nslices; ++j) {
        int want = edge[static_cast<size_t>(j) + 1].count - edge[static_cast<size_t>(j)].count;
        double a = edge[static_cast<size_t>(j)].sigma_used;
        double b = edge[static_cast<size_t>(j) + 1].sigma_used;
        std::vector<std::vector<double>> atom_deflate;
        for (const auto& at : atoms) {
            if (at.value >= a && at.value < b) --want;
            // deflate atoms near enough for shift-invert to feel them
            if (at.value >= a - 2 * (b - a) && at.value < b + 2 * (b - a))
                atom_deflate.push_back(at.vector);
        }
        if (want <= 0) {
            if (want < 0)
                throw ConvergenceFailure("atom count exceeds the slice population");
            continue;
        }
        // slice center: first shift whose factorization is comfortably
        // nonsingular (an exact atom or an unlucky eigenvalue can sit at the
        // midpoint)
        double sigma = 0.5 * (a + b);
        std::unique_ptr<BandedShiftedLU> lu;
        for (double frac : {0.5, 0.637, 0.3141, 0.762, 0.218}) {
            sigma = a + frac * (b - a);
            lu = std::make_unique<BandedShiftedLU>(A, sigma);
            if (lu->min_u_diag() > 1e-10 * scale) break;
        }
        auto apply = [&](const double* x, double* y) {
            std::vector<double> t(x, x + A.n);
            lu->solve(t);
            std::copy(t.begin(), t.end(), y);
        };

        std::vector<std::vector<double>> deflate = atom_deflate;
        std::vector<WindowPair> found;
        for (int round = 0; round < 8 && static_cast<int>(found.size()) < want; ++round) {
            int remaining = want - static_cast<int>(found.size());
            int budget = std::min(A.n, (round == 0 ? 5 * remaining / 2 + 24
                                                   : 3 * remaining + 30 + 20 * round));
            auto run = detail::lanczos_full_reorth(apply, A.n, budget,
                                                   seed + 31 * static_cast<std::uint64_t>(j) + round, deflate);
            auto ritz = detail::ritz_pairs(run);
            // deeply converged pairs first, looser acceptance only in late rounds
            double accept_tol = (round < 4 ? 1e-2 * residual_tol : residual_tol);
            for (auto& rp : ritz) {
                if (std::abs(rp.theta) < 1e-14) continue;
                double lambda = sigma + 1.0 / rp.theta;
                if (lambda < a || lambda >= b) continue;
                bool dup = false;
                for (const auto& f : found) {
                    double ip = 0;
                    for (int i = 0; i < A.n; ++i) ip += f.vector[static_cast<size_t>(i)] * rp.vec[static_cast<size_t>(i)];
                    if (std::abs(ip) > 0.5) dup = true;
                }
                if (dup) continue;
                std::vector<double> y(static_cast<size_t>(A.n));
                A.matvec(rp.vec.data(), y.data());
                double rn = 0, vn = 0;
                for (int i = 0; i < A.n; ++i) {
                    double r = y[static_cast<size_t>(i)] - lambda * rp.vec[static_cast<size_t>(i)];
                    rn += r * r;
                    vn += rp.vec[static_cast<size_t>(i)] * rp.vec[static_cast<size_t>(i)];
                }
                if (std::sqrt(rn / vn) > accept_tol * std::max(1.0, scale)) continue;
                double inv = 1.0 / std::sqrt(vn);
                for (auto& x : rp.vec) x *= inv;
                found.push_back({lambda, std::move(rp.vec)});
                if (static_cast<int>(found.size()) == want) break;
            }
            deflate = atom_deflate;
            for (const auto& f : found) deflate.push_back(f.vector);
        }
        if (static_cast<int>(found.size()) != want)
            throw ConvergenceFailure("slice extraction incomplete: wanted " +
                                     std::to_string(want) + ", got " +
                                     std::to_string(found.size()));
        for (auto& f : found) out.push_back(std::move(f));
    }
    for (auto& at : atoms)
        if (at.value >= edge.front().sigma_used && at.value < edge.back().sigma_used)
            out.push_back(std::move(at));
    std::sort(out.begin(), out.end(),
              [](const WindowPair& x, const WindowPair& y) { return x.value < y.value; });
    return out;
}

/// Extremal pairs by plain Lanczos with full reorthogonalization; the
/// above-dense-limit path of eigensolve.
inline std::vector<WindowPair> lanczos_lowest(const SparseSym& A, int count,
                                              double residual_tol = 1e-8,
                                              std::uint64_t seed = 777) {
    auto apply = [&](const double* x, double* y) { A.matvec(x, y); };
    double scale = 0;
    for (double v : A.val) scale = std::max(scale, std::abs(v));
    int budget = std::min(A.n, std::max(4 * count + 40, 80));
    for (int round = 0; round < 5; ++round) {
        auto run = detail::lanczos_full_reorth(apply, A.n, budget, seed + round);
        auto ritz = detail::ritz_pairs(run);
        std::sort(ritz.begin(), ritz.end(),
                  [](const auto& x, const auto& y) { return x.theta < y.theta; });
        std::vector<WindowPair> out;
        bool all_ok = true;
        for (int j = 0; j < count && j < static_cast<int>(ritz.size()); ++j) {
            auto& rp = ritz[static_cast<size_t>(j)];
            std::vector<double> y(static_cast<size_t>(A.n));
            A.matvec(rp.vec.data(), y.data());
            double rn = 0, vn = 0;
            for (int i = 0; i < A.n; ++i) {
                double r = y[static_cast<size_t>(i)] - rp.theta * rp.vec[static_cast<size_t>(i)];
                rn += r * r;
                vn += rp.vec[static_cast<size_t>(i)] * rp.vec[static_cast<size_t>(i)];
            }
            if (std::sqrt(rn / vn) > residual_tol * std::max(1.0, scale)) {
                all_ok = false;
                break;
            }
            double inv = 1.0 / std::sqrt(vn);
            for (auto& x : rp.vec) x *= inv;
            out.push_back({rp.theta, std::move(rp.vec)});
        }
        if (all_ok && static_cast<int>(out.size()) == count) return out;
        budget = std::min(A.n, budget * 2);
    }
    throw ConvergenceFailure("lanczos_lowest: no convergence after budget growth");
}

}  // namespace latsch

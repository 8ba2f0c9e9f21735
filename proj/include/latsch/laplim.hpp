#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "latsch/errors.hpp"
#include "latsch/fermi.hpp"
#include "latsch/fft.hpp"
#include "latsch/field.hpp"
#include "latsch/torus_grid.hpp"

namespace latsch {

/// max |f(x)| over the sampled Fermi surface, including the singular corners.
/// f is the synthesized series of a finitely supported f_hat.
inline double vanish_on_fermi(const FieldC& f_hat, double lambda, const FermiSample& sample) {
    (void)lambda;
    double worst = 0;
    for (const TorusPoint& p : sample.points)
        worst = std::max(worst, std::abs(synthesize_at(f_hat, p)));
    for (const TorusPoint& p : sample.singular)
        worst = std::max(worst, std::abs(synthesize_at(f_hat, p)));
    return worst;
}

struct ResolventSolve {
    double lambda = 0, epsilon = 0;
    int n_grid = 0;
    FieldC coefficients;   // u_eps(n) on |n| <= N/4
};

/// One regularized solve: u_eps = U^* [ f(x) / (h(x) - lambda - i eps) ].
/// The grid division is the exact resolvent of the N-periodized lattice;
/// epsilon keeps the denominator off the Fermi surface and N controls how
/// much of the slowly decaying tail the periodization folds back.
inline ResolventSolve limiting_absorption_solve(const FieldC& f_hat, double lambda,
                                                double epsilon, int N, int coeff_window = -1) {
    int d = f_hat.dim() == 0 ? 2 : f_hat.dim();
    if (epsilon <= 0) throw Error("limiting_absorption_solve: epsilon must be positive");
    if (N < 16 || (N & (N - 1)) != 0) throw Error("limiting_absorption_solve: N must be a power of two");
    if (coeff_window < 0) coeff_window = N / 4;

    // h along one axis; h(x) = sum over axes by separability
    std::vector<double> h1(static_cast<size_t>(N));
    for (int k = 0; k < N; ++k) {
        double x = -3.141592653589793238463 + 6.283185307179586476925287 * k / N;
        double s = std::sin(0.5 * x);
        h1[static_cast<size_t>(k)] = s * s;
    }

    TorusGrid g = synthesize(f_hat, N);
    const std::complex<double> ie(0.0, epsilon);
    if (d == 2) {
        size_t idx = 0;
        for (int k1 = 0; k1 < N; ++k1) {
            double ha = h1[static_cast<size_t>(k1)] - lambda;
            for (int k2 = 0; k2 < N; ++k2, ++idx)
                g.values[idx] /= (ha + h1[static_cast<size_t>(k2)]) - ie;
        }
    } else {
        std::vector<int> k(static_cast<size_t>(d), 0);
        for (size_t idx = 0; idx < g.values.size(); ++idx) {
            double hh = 0;
            for (int i = 0; i < d; ++i) hh += h1[static_cast<size_t>(k[static_cast<size_t>(i)])];
            g.values[idx] /= (hh - lambda) - ie;
            int i = d - 1;
            while (i >= 0 && ++k[static_cast<size_t>(i)] == N) k[static_cast<size_t>(i--)] = 0;
        }
    }

    ResolventSolve out;
    out.lambda = lambda;
    out.epsilon = epsilon;
    out.n_grid = N;
    out.coefficients = coefficients(g, coeff_window);
    return out;
}

// ---------------------------------------------------------------------------
// Extrapolation of the eps -> 0 limit
// ---------------------------------------------------------------------------

namespace detail {

/// Interpolatory Richardson against the basis {1, e ln e, e, e^2 ln e, e^2, ...}.
/// The log terms carry the threshold behavior at integer lambda, where the
/// lattice Green function picks up an eps ln eps series; away from integers
/// their coefficients just come out near zero.
inline std::complex<double> extrapolate_log_basis(const std::vector<double>& eps,
                                                  const std::vector<std::complex<double>>& val) {
    int m = static_cast<int>(eps.size());
    auto basis = [](double e, int j) -> double {
        int k = (j + 1) / 2;
        double v = std::pow(e, k);
        if (j % 2 == 1) v *= std::log(e);
        return v;
    };
    std::vector<std::vector<double>> A(static_cast<size_t>(m), std::vector<double>(static_cast<size_t>(m)));
    std::vector<std::complex<double>> b(val.begin(), val.end());
    for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c) A[static_cast<size_t>(r)][static_cast<size_t>(c)] = basis(eps[static_cast<size_t>(r)], c);
    for (int c = 0; c < m; ++c) {
        int piv = c;
        for (int r = c + 1; r < m; ++r)
            if (std::abs(A[static_cast<size_t>(r)][static_cast<size_t>(c)]) > std::abs(A[static_cast<size_t>(piv)][static_cast<size_t>(c)])) piv = r;
        std::swap(A[static_cast<size_t>(c)], A[static_cast<size_t>(piv)]);
        std::swap(b[static_cast<size_t>(c)], b[static_cast<size_t>(piv)]);
        for (int r = c + 1; r < m; ++r) {
            double f = A[static_cast<size_t>(r)][static_cast<size_t>(c)] / A[static_cast<size_t>(c)][static_cast<size_t>(c)];
            for (int cc = c; cc < m; ++cc) A[static_cast<size_t>(r)][static_cast<size_t>(cc)] -= f * A[static_cast<size_t>(c)][static_cast<size_t>(cc)];
            b[static_cast<size_t>(r)] -= f * b[static_cast<size_t>(c)];
        }
    }
    std::vector<std::complex<double>> x(static_cast<size_t>(m));
    for (int r = m - 1; r >= 0; --r) {
        std::complex<double> s = b[static_cast<size_t>(r)];
        for (int cc = r + 1; cc < m; ++cc) s -= A[static_cast<size_t>(r)][static_cast<size_t>(cc)] * x[static_cast<size_t>(cc)];
        x[static_cast<size_t>(r)] = s / A[static_cast<size_t>(r)][static_cast<size_t>(r)];
    }
    return x[0];
}

/// Thiele continued-fraction extrapolation to eps = 0. The resolvent matrix
/// elements are Cauchy transforms of a band-limited spectral density, which
/// rational interpolation approximates geometrically well away from the
/// integer thresholds.
inline std::complex<double> extrapolate_thiele(const std::vector<double>& eps,
                                               const std::vector<std::complex<double>>& val,
                                               bool* ok) {
    int m = static_cast<int>(eps.size());
    std::vector<std::vector<std::complex<double>>> phi(static_cast<size_t>(m),
                                                       std::vector<std::complex<double>>(static_cast<size_t>(m)));
    for (int i = 0; i < m; ++i) phi[0][static_cast<size_t>(i)] = val[static_cast<size_t>(i)];
    for (int k = 1; k < m; ++k)
        for (int i = k; i < m; ++i) {
            std::complex<double> den = phi[static_cast<size_t>(k) - 1][static_cast<size_t>(i)] -
                                       phi[static_cast<size_t>(k) - 1][static_cast<size_t>(k) - 1];
            if (std::abs(den) < 1e-300) {
                *ok = false;
                return {0, 0};
            }
            phi[static_cast<size_t>(k)][static_cast<size_t>(i)] = (eps[static_cast<size_t>(i)] - eps[static_cast<size_t>(k) - 1]) / den;
        }
    std::complex<double> v = phi[static_cast<size_t>(m) - 1][static_cast<size_t>(m) - 1];
    for (int k = m - 2; k >= 0; --k) {
        if (std::abs(v) < 1e-300) {
            *ok = false;
            return {0, 0};
        }
        v = phi[static_cast<size_t>(k)][static_cast<size_t>(k)] + (0.0 - eps[static_cast<size_t>(k)]) / v;
    }
    *ok = std::isfinite(v.real()) && std::isfinite(v.imag());
    return v;
}

}  // namespace detail

inline bool is_integer_threshold(double lambda) {
    return std::abs(lambda - std::round(lambda)) < 1e-9;
}

/// Extrapolate one coefficient's eps-curve to the boundary value at eps = 0.
inline std::complex<double> extrapolate_to_zero(const std::vector<double>& eps,
                                                const std::vector<std::complex<double>>& val,
                                                double lambda) {
    if (eps.size() != val.size() || eps.size() < 3) throw Error("extrapolate_to_zero: bad input");
    if (!is_integer_threshold(lambda)) {
        bool ok = true;
        auto v = detail::extrapolate_thiele(eps, val, &ok);
        if (ok) return v;
    }
    return detail::extrapolate_log_basis(eps, val);
}

/// All schedule solves at once: one synthesis, then per-epsilon division and
/// analysis. Matches limiting_absorption_solve point for point, but runs the
/// whole schedule through a single transform plan with fused passes, which is
/// what keeps the 4096-grid schedules inside their time budget.
inline std::vector<FieldC> limiting_absorption_schedule(const FieldC& f_hat, double lambda,
                                                        const std::vector<double>& epsilons,
                                                        int N, int coeff_window) {
    int d = f_hat.dim() == 0 ? 2 : f_hat.dim();
    if (N < 16 || (N & (N - 1)) != 0) throw Error("limiting_absorption_schedule: bad N");

    std::vector<double> h1(static_cast<size_t>(N));
    for (int k = 0; k < N; ++k) {
        double x = -3.141592653589793238463 + 6.283185307179586476925287 * k / N;
        double s = std::sin(0.5 * x);
        h1[static_cast<size_t>(k)] = s * s;
    }

    FftPlan plan(d, N);
    const double two_pi = 6.283185307179586476925287;
    // synthesis of f on the grid
    std::fill(plan.data(), plan.data() + plan.size(), std::complex<double>(0, 0));
    {
        double scale = std::pow(two_pi, -0.5 * d);
        std::vector<int> k(static_cast<size_t>(d));
        for (const auto& [n, v] : f_hat.entries()) {
            size_t idx = 0;
            for (int i = 0; i < d; ++i)
                idx = idx * static_cast<size_t>(N) + static_cast<size_t>(detail::wrap_mod(n[i], N));
            plan.data()[idx] += scale * detail::parity_sign(n) * v;
        }
    }
    plan.forward();
    std::vector<std::complex<double>> base(plan.data(), plan.data() + plan.size());

    double coeff_scale = std::pow(two_pi, 0.5 * d) / std::pow(double(N), d);
    std::vector<FieldC> out;
    out.reserve(epsilons.size());
    for (double eps : epsilons) {
        if (eps <= 0) throw Error("limiting_absorption_schedule: epsilon must be positive");
        if (d == 2) {
            std::complex<double>* w = plan.data();
            const std::complex<double>* src = base.data();
            size_t idx = 0;
            for (int k1 = 0; k1 < N; ++k1) {
                double ha = h1[static_cast<size_t>(k1)] - lambda;
                for (int k2 = 0; k2 < N; ++k2, ++idx) {
                    double re = ha + h1[static_cast<size_t>(k2)];
                    double inv = 1.0 / (re * re + eps * eps);
                    // src / (re - i eps) = src * (re + i eps) * inv
                    double sr = src[idx].real(), si = src[idx].imag();
                    w[idx] = {(sr * re - si * eps) * inv, (si * re + sr * eps) * inv};
                }
            }
        } else {
            std::vector<int> k(static_cast<size_t>(d), 0);
            const std::complex<double> ie(0.0, eps);
            for (size_t idx = 0; idx < base.size(); ++idx) {
                double hh = 0;
                for (int i = 0; i < d; ++i) hh += h1[static_cast<size_t>(k[static_cast<size_t>(i)])];
                plan.data()[idx] = base[idx] / ((hh - lambda) - ie);
                int i = d - 1;
                while (i >= 0 && ++k[static_cast<size_t>(i)] == N) k[static_cast<size_t>(i--)] = 0;
            }
        }
        plan.backward();
        FieldC uc(d);
        std::vector<int> k(static_cast<size_t>(d));
        Box::centered(d, coeff_window).for_each([&](const Site& n) {
            size_t idx = 0;
            for (int i = 0; i < d; ++i)
                idx = idx * static_cast<size_t>(N) + static_cast<size_t>(detail::wrap_mod(n[i], N));
            std::complex<double> v = plan.data()[idx] * coeff_scale * detail::parity_sign(n);
            if (std::abs(v) > 0) uc.set(n, v);
        });
        out.push_back(std::move(uc));
    }
    return out;
}

struct RecoverySettings {
    int n_grid_regular = 2048;
    int n_grid_threshold = 4096;
    double eps0_regular = 0.05;
    double eps0_threshold = 0.04;
    int points_regular = 8;
    int points_threshold = 9;
    double ratio = 1.4142135623730951;
};

struct RecoveryResult {
    FieldC u_extrapolated;                 // on the coefficient window
    std::vector<double> epsilons;
    int n_grid = 0;
};

/// eps-extrapolated limiting-absorption solve: run the geometric epsilon
/// schedule, then extrapolate each coefficient in the window to eps = 0.
inline RecoveryResult recover_by_extrapolation(const FieldC& f_hat, double lambda,
                                               int coeff_window,
                                               const RecoverySettings& s = {}) {
    bool thr = is_integer_threshold(lambda);
    int N = thr ? s.n_grid_threshold : s.n_grid_regular;
    int npts = thr ? s.points_threshold : s.points_regular;
    double eps0 = thr ? s.eps0_threshold : s.eps0_regular;

    RecoveryResult out;
    out.n_grid = N;
    for (int k = 0; k < npts; ++k) out.epsilons.push_back(eps0 * std::pow(s.ratio, -k));

    std::vector<FieldC> solves =
        limiting_absorption_schedule(f_hat, lambda, out.epsilons, N, coeff_window);

    FieldC acc(f_hat.dim());
    Box::centered(f_hat.dim(), coeff_window).for_each([&](const Site& n) {
        std::vector<std::complex<double>> vals;
        vals.reserve(static_cast<size_t>(npts));
        for (const auto& sv : solves) vals.push_back(sv.at(n));
        std::complex<double> v = extrapolate_to_zero(out.epsilons, vals, lambda);
        if (std::abs(v) > 0) acc.set(n, v);
    });
    out.u_extrapolated = std::move(acc);
    return out;
}

}  // namespace latsch

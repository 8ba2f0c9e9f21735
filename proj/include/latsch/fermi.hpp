#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <vector>

#include "latsch/errors.hpp"
#include "latsch/torus.hpp"

namespace latsch {

/// Points of the complexified singular set restricted to the real torus:
/// corners of {0, pi}^d with h = lambda. A corner with k coordinates at pi
/// has h = k, so the set is empty unless lambda is an interior integer.
inline std::vector<TorusPoint> singular_points(double lambda, int d) {
    std::vector<TorusPoint> out;
    long k = std::lround(lambda);
    if (std::abs(lambda - static_cast<double>(k)) > 1e-12 || k <= 0 || k >= d) return out;
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
        if (static_cast<int>(__builtin_popcount(mask)) != k) continue;
        std::vector<double> x(static_cast<size_t>(d), 0.0);
        for (int j = 0; j < d; ++j)
            if (mask & (1u << j)) x[static_cast<size_t>(j)] = 3.141592653589793238463;
        out.emplace_back(std::move(x));
    }
    std::sort(out.begin(), out.end(),
              [](const TorusPoint& a, const TorusPoint& b) { return a.x < b.x; });
    return out;
}

struct FermiSample {
    double lambda = 0;
    std::vector<TorusPoint> points;            // |h - lambda| <= 1e-10 each
    std::vector<TorusPoint> singular;          // appended corner points, if any
};

namespace detail {
/// Root of s + sin^2(t/2) = lambda on t in [0, pi], by bisection; h is
/// monotone on the half-period so the bracket is certified. Two algebraically
/// equal objectives keep the sign test cancellation-free on both ends of the
/// period (sin^2 flattens quadratically at 0 and pi, where a naive residual
/// loses half the digits in position).
inline bool bisect_halfperiod(double s, double lambda, double& root) {
    double target = lambda - s;
    if (target < 0.0 || target > 1.0) return false;
    double co_target = (1.0 - lambda) + s;   // 1 - target without cancellation
    auto f = [&](double t) {
        if (target <= 0.5) {
            double u = std::sin(0.5 * t);
            return u * u - target;
        }
        double v = std::cos(0.5 * t);
        return co_target - v * v;
    };
    double lo = 0.0, hi = 3.141592653589793238463;
    if (f(lo) > 0 || f(hi) < 0) return false;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        double mid = 0.5 * (lo + hi);
        (f(mid) < 0 ? lo : hi) = mid;
    }
    root = 0.5 * (lo + hi);
    return true;
}
}  // namespace detail

/// Sample the Fermi surface {h = lambda} by per-axis bisection along grid
/// lines: h is separable and monotone per coordinate half-period, so every
/// grid line carries at most one bracketed root (plus its mirror).
inline FermiSample sample_fermi(double lambda, int d, int resolution) {
    if (lambda <= 0 || lambda >= d) throw Error("sample_fermi: lambda must lie in (0,d)");
    if (resolution < 16) throw Error("sample_fermi: resolution must be >= 16");
    FermiSample fs;
    fs.lambda = lambda;

    std::vector<double> grid(static_cast<size_t>(resolution));
    for (int i = 0; i < resolution; ++i)
        grid[static_cast<size_t>(i)] = -3.141592653589793238463 + 6.283185307179586476925287 * i / resolution;

    std::vector<int> idx(static_cast<size_t>(d - 1), 0);
    for (int axis = 0; axis < d; ++axis) {
        std::fill(idx.begin(), idx.end(), 0);
        while (true) {
            double s = 0;
            for (int j = 0; j < d - 1; ++j) {
                double t = std::sin(0.5 * grid[static_cast<size_t>(idx[static_cast<size_t>(j)])]);
                s += t * t;
            }
            double root;
            if (detail::bisect_halfperiod(s, lambda, root)) {
                auto emit = [&](double t) {
                    std::vector<double> x(static_cast<size_t>(d));
                    int k = 0;
                    for (int j = 0; j < d; ++j)
                        x[static_cast<size_t>(j)] =
                            (j == axis) ? t : grid[static_cast<size_t>(idx[static_cast<size_t>(k++)])];
                    fs.points.emplace_back(std::move(x));
                };
                emit(root);
                if (root > 1e-13 && root < 3.141592653589793238463 - 1e-13) emit(-root);
            }
            int j = d - 2;
            while (j >= 0 && ++idx[static_cast<size_t>(j)] == resolution) idx[static_cast<size_t>(j--)] = 0;
            if (j < 0) break;
            if (d == 1) break;
        }
        if (d == 1) break;
    }
    fs.singular = singular_points(lambda, d);
    return fs;
}

// ---------------------------------------------------------------------------
// The Laurent-cleared polynomial H_lambda(w)
// ---------------------------------------------------------------------------

/// Dense multivariate polynomial as a map from exponent multi-indices.
struct Polynomial {
    int nvars = 0;
    std::map<std::vector<int>, double> coeff;

    void add(const std::vector<int>& e, double c) {
        if (c == 0.0) return;
        auto it = coeff.find(e);
        if (it == coeff.end())
            coeff[e] = c;
        else if ((it->second += c) == 0.0)
            coeff.erase(it);
    }

    std::complex<double> eval(const std::vector<std::complex<double>>& w) const {
        std::complex<double> s = 0;
        for (const auto& [e, c] : coeff) {
            std::complex<double> t = c;
            for (int j = 0; j < nvars; ++j)
                for (int p = 0; p < e[static_cast<size_t>(j)]; ++p) t *= w[static_cast<size_t>(j)];
            s += t;
        }
        return s;
    }
};

/// H_lambda(w) = (d/2 - lambda) prod w_j - 1/4 (sum w_j) prod w_j
///               - 1/4 sum_j prod_{i != j} w_i,
/// i.e. (h(z) - lambda) with w_j = e^{i z_j} after clearing the Laurent
/// denominator prod w_j.
inline Polynomial h_lambda_polynomial(int d, double lambda) {
    if (d < 1 || d > 4) throw Error("h_lambda_polynomial: d must be in [1,4]");
    Polynomial P;
    P.nvars = d;
    std::vector<int> ones(static_cast<size_t>(d), 1);
    P.add(ones, 0.5 * d - lambda);
    for (int j = 0; j < d; ++j) {
        std::vector<int> e = ones;
        e[static_cast<size_t>(j)] = 2;
        P.add(e, -0.25);
        std::vector<int> f = ones;
        f[static_cast<size_t>(j)] = 0;
        P.add(f, -0.25);
    }
    return P;
}

/// | (h(z) - lambda) - H_lambda(e^{iz}) prod e^{-iz_j} | at a complex point.
inline double h_identity_residual(int d, double lambda,
                                  const std::vector<std::complex<double>>& z) {
    Polynomial P = h_lambda_polynomial(d, lambda);
    std::vector<std::complex<double>> w(z.size());
    std::complex<double> prod_inv = 1.0;
    const std::complex<double> I(0.0, 1.0);
    for (size_t j = 0; j < z.size(); ++j) {
        w[j] = std::exp(I * z[j]);
        prod_inv *= std::exp(-I * z[j]);
    }
    std::complex<double> lhs = h_eval(z) - lambda;
    std::complex<double> rhs = P.eval(w) * prod_inv;
    return std::abs(lhs - rhs);
}

}  // namespace latsch

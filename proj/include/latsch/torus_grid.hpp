#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "latsch/errors.hpp"
#include "latsch/fft.hpp"
#include "latsch/field.hpp"
#include "latsch/torus.hpp"

namespace latsch {

/// Uniform samples of a function on [-pi, pi]^d at x_k = -pi + 2 pi k / N,
/// bridged to Fourier coefficients by the unitary series
///   u(x) = (2 pi)^{-d/2} sum_n u_hat(n) e^{-i n x}.
/// The trapezoidal rule is exact for band-limited data, so the bridge is an
/// exact unitary as long as the coefficient support stays below N/2.
struct TorusGrid {
    int dim = 0;
    int n_per_axis = 0;
    std::vector<std::complex<double>> values;   // row-major over k in [0,N)^d
    bool aliasing_risk = false;                 // set when support >= N/2 at synthesis

    double x_of(int k) const {
        return -3.141592653589793238463 +
               6.283185307179586476925287 * k / n_per_axis;
    }

    size_t flat_index(const std::vector<int>& k) const {
        size_t idx = 0;
        for (int i = 0; i < dim; ++i) idx = idx * static_cast<size_t>(n_per_axis) + static_cast<size_t>(k[static_cast<size_t>(i)]);
        return idx;
    }

    /// L^2(T^d) norm under the exact-for-band-limited quadrature.
    double norm_l2() const {
        double s = 0;
        for (const auto& v : values) s += std::norm(v);
        double cell = 1.0;
        for (int i = 0; i < dim; ++i) cell *= 6.283185307179586476925287 / n_per_axis;
        return std::sqrt(s * cell);
    }
};

namespace detail {
inline int wrap_mod(int n, int N) { return ((n % N) + N) % N; }
inline double parity_sign(const Site& n) { return (n.norm1() % 2 == 0) ? 1.0 : -1.0; }
}  // namespace detail

/// Synthesis U: place coefficients into frequency bins and transform. The
/// (-1)^{|n|_1} factor carries the half-period grid offset x_0 = -pi.
inline TorusGrid synthesize(const FieldC& u_hat, int N) {
    int d = u_hat.dim() == 0 ? 2 : u_hat.dim();
    if (N < 2 || (N & (N - 1)) != 0) throw Error("synthesize: N must be a power of two");
    TorusGrid g;
    g.dim = d;
    g.n_per_axis = N;
    g.aliasing_risk = u_hat.support_radius_inf() >= N / 2;

    FftPlan plan(d, N);
    std::fill(plan.data(), plan.data() + plan.size(), std::complex<double>(0, 0));
    double scale = std::pow(6.283185307179586476925287, -0.5 * d);
    std::vector<int> k(static_cast<size_t>(d));
    for (const auto& [n, v] : u_hat.entries()) {
        for (int i = 0; i < d; ++i) k[static_cast<size_t>(i)] = detail::wrap_mod(n[i], N);
        plan.data()[g.flat_index(k)] += scale * detail::parity_sign(n) * v;
    }
    plan.forward();
    g.values.assign(plan.data(), plan.data() + plan.size());
    return g;
}

/// Analysis U^*: inverse transform and read coefficients off the bins,
/// restricted to |n_j| <= window (or the full alias-free range by default).
inline FieldC coefficients(const TorusGrid& g, int window = -1) {
    int N = g.n_per_axis, d = g.dim;
    if (window < 0) window = N / 2 - 1;
    if (window > N / 2 - 1) throw Error("coefficients: window exceeds alias-free range");

    FftPlan plan(d, N);
    std::copy(g.values.begin(), g.values.end(), plan.data());
    plan.backward();

    double scale = std::pow(6.283185307179586476925287, 0.5 * d) / std::pow(double(N), d);
    FieldC out(d);
    std::vector<int> k(static_cast<size_t>(d));
    Box::centered(d, window).for_each([&](const Site& n) {
        for (int i = 0; i < d; ++i) k[static_cast<size_t>(i)] = detail::wrap_mod(n[i], N);
        std::complex<double> v = plan.data()[g.flat_index(k)] * scale * detail::parity_sign(n);
        if (std::abs(v) > 0) out.set(n, v);
    });
    return out;
}

/// Direct evaluation of the series at one torus point (no grid).
inline std::complex<double> synthesize_at(const FieldC& f_hat, const TorusPoint& p) {
    int d = p.dim();
    double scale = std::pow(6.283185307179586476925287, -0.5 * d);
    std::complex<double> s = 0;
    for (const auto& [n, v] : f_hat.entries()) {
        double phase = 0;
        for (int i = 0; i < d; ++i) phase -= n[i] * p[i];
        s += v * std::polar(1.0, phase);
    }
    return scale * s;
}

}  // namespace latsch

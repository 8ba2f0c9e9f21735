#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "latsch/errors.hpp"

namespace latsch {

/// Point of the flat torus, coordinates reduced mod 2*pi into (-pi, pi].
struct TorusPoint {
    std::vector<double> x;

    TorusPoint() = default;
    explicit TorusPoint(std::vector<double> coords) : x(std::move(coords)) { reduce(); }
    TorusPoint(std::initializer_list<double> coords) : x(coords) { reduce(); }

    int dim() const { return static_cast<int>(x.size()); }
    double operator[](int i) const { return x[static_cast<size_t>(i)]; }

    // reduction lands in (-pi, +pi] so the corner points keep the +pi form
    void reduce() {
        constexpr double two_pi = 6.283185307179586476925287;
        for (double& v : x) {
            v = std::remainder(v, two_pi);
            if (v <= -3.141592653589793238463) v += two_pi;
        }
    }
};

/// Band symbol h(x) = 1/2 (d - sum cos x_j) = sum sin^2(x_j/2).
inline double h_eval(const TorusPoint& p) {
    double s = 0;
    for (double v : p.x) {
        double t = std::sin(0.5 * v);
        s += t * t;
    }
    return s;
}

/// Cosine form of the same symbol; the two agree to rounding.
inline double h_eval_cos(const TorusPoint& p) {
    double s = 0;
    for (double v : p.x) s += std::cos(v);
    return 0.5 * (static_cast<double>(p.dim()) - s);
}

inline std::complex<double> h_eval(const std::vector<std::complex<double>>& z) {
    std::complex<double> s = 0;
    for (const auto& v : z) {
        std::complex<double> t = std::sin(0.5 * v);
        s += t * t;
    }
    return s;
}

/// grad h(x) = 1/2 (sin x_1, ..., sin x_d); vanishes exactly at the points
/// with every coordinate congruent to 0 mod pi.
inline std::vector<double> grad_h(const TorusPoint& p) {
    std::vector<double> g(p.x.size());
    for (size_t i = 0; i < p.x.size(); ++i) g[i] = 0.5 * std::sin(p.x[i]);
    return g;
}

inline std::vector<std::complex<double>> grad_h(const std::vector<std::complex<double>>& z) {
    std::vector<std::complex<double>> g(z.size());
    for (size_t i = 0; i < z.size(); ++i) g[i] = 0.5 * std::sin(z[i]);
    return g;
}

inline double norm2(const std::vector<double>& v) {
    double s = 0;
    for (double t : v) s += t * t;
    return std::sqrt(s);
}

}  // namespace latsch

#pragma once

// Test-side oracles: independent computation routes used to freeze expected
// values. Everything here is deliberately naive (exhaustive scans, direct
// quadrature, closed forms) and must stay decoupled from the library paths
// it checks.

#include <cmath>
#include <complex>
#include <map>
#include <set>
#include <vector>

#include "latsch/field.hpp"
#include "latsch/rng.hpp"
#include "latsch/site.hpp"

namespace oracles {

using latsch::Box;
using latsch::CounterRng;
using latsch::FieldC;
using latsch::FieldR;
using latsch::Site;

// -----------------------------------------------------------------------
// lattice geometry
// -----------------------------------------------------------------------

/// Exhaustive boundary enumeration of Omega_ext = Z^d \ interior(obstacle):
/// degree counted site by site over the window.
inline std::set<Site> boundary_by_enumeration(const std::set<Site>& obstacle, int dim,
                                              int window_radius) {
    std::set<Site> interior_obs;
    for (const Site& n : obstacle) {
        bool all_in = true;
        for (const Site& m : latsch::neighbors(n))
            if (!obstacle.count(m)) all_in = false;
        if (all_in) interior_obs.insert(n);
    }
    std::set<Site> boundary;
    Box::centered(dim, window_radius).for_each([&](const Site& n) {
        if (interior_obs.count(n)) return;
        int deg = 0;
        for (const Site& m : latsch::neighbors(n))
            if (!interior_obs.count(m)) ++deg;
        if (deg < 2 * dim) boundary.insert(n);
    });
    return boundary;
}

/// Exhaustive truncated-cone containment scan.
inline bool cone_inside_by_scan(const std::set<Site>& obstacle, int dim, int window_radius,
                                const Site& apex, int axis_1based, int sign) {
    std::set<Site> interior_obs;
    for (const Site& n : obstacle) {
        bool all_in = true;
        for (const Site& m : latsch::neighbors(n))
            if (!obstacle.count(m)) all_in = false;
        if (all_in) interior_obs.insert(n);
    }
    bool ok = true;
    Box::centered(dim, window_radius).for_each([&](const Site& m) {
        int i = axis_1based - 1;
        int along = sign * (m[i] - apex[i]);
        if (along < 0) return;
        int cross = 0;
        for (int k = 0; k < dim; ++k)
            if (k != i) cross += std::abs(m[k] - apex[k]);
        if (cross > along) return;
        if (interior_obs.count(m)) ok = false;
    });
    return ok;
}

// -----------------------------------------------------------------------
// stencils
// -----------------------------------------------------------------------

/// Direct loop evaluation of (Delta_disc u)(n), no shared code with the lib.
inline std::complex<double> laplacian_at(const FieldC& u, const Site& n) {
    int d = n.dim();
    std::complex<double> s = 0;
    for (int j = 0; j < d; ++j) s += u.at(n.shifted(j, +1)) + u.at(n.shifted(j, -1));
    return 0.25 * s - 0.5 * double(d) * u.at(n);
}

inline std::complex<double> schrodinger_at(const FieldC& u, const FieldR& V, double lambda,
                                           const Site& n) {
    return -laplacian_at(u, n) + (V.at(n) - lambda) * u.at(n);
}

// -----------------------------------------------------------------------
// free Dirichlet box closed forms
// -----------------------------------------------------------------------

/// 1-D eigenvalues of the quarter-stencil Dirichlet chain on L sites.
inline std::vector<double> chain_eigenvalues(int L) {
    std::vector<double> out(static_cast<size_t>(L));
    for (int k = 1; k <= L; ++k)
        out[static_cast<size_t>(k) - 1] = 0.5 * (1.0 - std::cos(k * M_PI / (L + 1)));
    return out;
}

/// All eigenvalues of the free box operator in d dimensions (sums of 1-D ones).
inline std::vector<double> box_eigenvalues(int d, int side) {
    std::vector<double> one = chain_eigenvalues(side);
    std::vector<double> acc = {0.0};
    for (int axis = 0; axis < d; ++axis) {
        std::vector<double> next;
        next.reserve(acc.size() * one.size());
        for (double a : acc)
            for (double b : one) next.push_back(a + b);
        acc = std::move(next);
    }
    std::sort(acc.begin(), acc.end());
    return acc;
}

/// sin-product eigenvector value at a (0-based) box offset.
inline double box_eigvec(int side, const std::vector<int>& k, const std::vector<int>& offset) {
    double v = 1.0;
    for (size_t i = 0; i < k.size(); ++i)
        v *= std::sqrt(2.0 / (side + 1)) * std::sin(k[i] * M_PI * (offset[i] + 1.0) / (side + 1));
    return v;
}

/// Free IDS by direct grid counting (independent of any quadrature in the lib).
inline double ids_by_counting(int d, double t, int grid = 2000) {
    long count = 0, total = 0;
    if (d != 2) throw std::runtime_error("ids_by_counting: d=2 only");
    for (int i = 0; i < grid; ++i)
        for (int j = 0; j < grid; ++j) {
            double x = -M_PI + 2 * M_PI * (i + 0.5) / grid;
            double y = -M_PI + 2 * M_PI * (j + 0.5) / grid;
            double h = std::sin(0.5 * x) * std::sin(0.5 * x) + std::sin(0.5 * y) * std::sin(0.5 * y);
            ++total;
            if (h <= t) ++count;
        }
    return double(count) / double(total);
}

// -----------------------------------------------------------------------
// random inputs from the deterministic streams
// -----------------------------------------------------------------------

inline FieldC random_field(CounterRng& rng, int dim, int radius, int count) {
    FieldC f(dim);
    for (int t = 0; t < count; ++t) {
        std::vector<int> c(static_cast<size_t>(dim));
        for (int i = 0; i < dim; ++i)
            c[static_cast<size_t>(i)] = static_cast<int>(rng.uniform(-radius, radius + 1));
        f.set(Site(c), {rng.uniform(-1, 1), rng.uniform(-1, 1)});
    }
    return f;
}

inline FieldR random_potential(CounterRng& rng, int dim, int radius, double lo = -1, double hi = 1) {
    FieldR f(dim);
    Box::centered(dim, radius).for_each([&](const Site& n) { f.set(n, rng.uniform(lo, hi)); });
    return f;
}

/// Random connected site blob grown from the origin.
inline std::set<Site> random_connected_domain(CounterRng& rng, int dim, int target_size) {
    std::set<Site> sites;
    std::vector<Site> frontier;
    Site origin(std::vector<int>(static_cast<size_t>(dim), 0));
    sites.insert(origin);
    frontier.push_back(origin);
    while (static_cast<int>(sites.size()) < target_size && !frontier.empty()) {
        size_t pick = static_cast<size_t>(rng.index(frontier.size()));
        Site base = frontier[pick];
        auto nb = latsch::neighbors(base);
        Site cand = nb[rng.index(nb.size())];
        if (sites.insert(cand).second) frontier.push_back(cand);
    }
    return sites;
}

/// Direct Riemann-sum resolvent coefficient (2-D), the quadrature oracle for
/// the limiting-absorption path; fine uniform grid, midpoint rule.
inline std::complex<double> resolvent_coeff_quadrature(const FieldC& f_hat, double lambda,
                                                       double eps, const Site& n, int grid) {
    std::complex<double> acc = 0;
    for (int i = 0; i < grid; ++i) {
        double x = -M_PI + 2 * M_PI * (i + 0.5) / grid;
        double sx = std::sin(0.5 * x);
        for (int j = 0; j < grid; ++j) {
            double y = -M_PI + 2 * M_PI * (j + 0.5) / grid;
            double sy = std::sin(0.5 * y);
            double h = sx * sx + sy * sy;
            std::complex<double> fx = 0;
            for (const auto& [m, v] : f_hat.entries())
                fx += v * std::polar(1.0, -(m[0] * x + m[1] * y));
            fx /= 2 * M_PI;
            acc += fx / std::complex<double>(h - lambda, -eps) * std::polar(1.0, n[0] * x + n[1] * y);
        }
    }
    double cell = (2 * M_PI / grid) * (2 * M_PI / grid);
    return acc * cell / (2 * M_PI);
}

}  // namespace oracles

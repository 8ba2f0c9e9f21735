#pragma once

#include <complex>

#include "latsch/domain.hpp"
#include "latsch/errors.hpp"
#include "latsch/field.hpp"

namespace latsch {

namespace detail {
template <class S>
struct stencil_consts {
    static S quarter() { return S(0.25); }
    static S half() { return S(0.5); }
};
template <>
struct stencil_consts<Rational> {
    static Rational quarter() { return Rational(1, 4); }
    static Rational half() { return Rational(1, 2); }
};
template <>
struct stencil_consts<std::complex<double>> {
    static std::complex<double> quarter() { return {0.25, 0.0}; }
    static std::complex<double> half() { return {0.5, 0.0}; }
};
}  // namespace detail

/// (Delta_disc u)(n) = 1/4 sum_j (u(n+e_j) + u(n-e_j)) - d/2 u(n).
/// Support grows by at most one step per axis.
template <class S>
LatticeField<S> apply_laplacian(const LatticeField<S>& u) {
    using C = detail::stencil_consts<S>;
    LatticeField<S> out(u.dim());
    const S quarter = C::quarter();
    const S half = C::half();
    for (const auto& [n, v] : u.entries()) {
        out.add(n, S(0) - (half * S(u.dim())) * v);
        for (const Site& m : neighbors(n)) out.add(m, quarter * v);
    }
    return out;
}

/// (-Delta_disc + V - lambda) u with a real potential.
template <class S, class SV, class L>
LatticeField<S> apply_schrodinger(const LatticeField<SV>& V, const L& lambda,
                                  const LatticeField<S>& u) {
    if (!V.is_real_valued()) throw NonRealPotential("potential must be real-valued");
    LatticeField<S> out = apply_laplacian(u);
    LatticeField<S> res(u.dim());
    for (const auto& [n, v] : out.entries()) res.add(n, S(0) - v);
    for (const auto& [n, v] : u.entries()) res.add(n, (S(V.at(n)) - S(lambda)) * v);
    return res;
}

/// Normal derivative at a boundary site of a classified finite domain:
/// quarter-weighted differences against the interior neighbors only.
template <class S>
S normal_derivative(const ClassifiedSet& omega, const LatticeField<S>& u, const Site& n) {
    if (!omega.contains(n) || omega.is_interior(n))
        throw NotBoundarySite("normal_derivative: site is not a boundary site");
    using C = detail::stencil_consts<S>;
    S acc(0);
    for (const Site& m : neighbors(n))
        if (omega.is_interior(m)) acc += C::quarter() * (u.at(n) - u.at(m));
    return acc;
}

/// Both sides of the Green formula, as a pair (interior sum, boundary sum).
/// Products are bilinear (no conjugation), matching the symmetric-form
/// identity the graph Laplacian satisfies.
template <class S>
std::pair<S, S> green_identity_sides(const ClassifiedSet& omega, const LatticeField<S>& u,
                                     const LatticeField<S>& v) {
    LatticeField<S> lu = apply_laplacian(u);
    LatticeField<S> lv = apply_laplacian(v);
    S lhs(0), rhs(0);
    for (int i = 0; i < omega.size(); ++i) {
        const Site& n = omega.site(i);
        if (omega.is_interior(i)) {
            lhs += lu.at(n) * v.at(n) - u.at(n) * lv.at(n);
        } else {
            rhs += normal_derivative(omega, u, n) * v.at(n) -
                   u.at(n) * normal_derivative(omega, v, n);
        }
    }
    return {lhs, rhs};
}

inline double green_residual(const ClassifiedSet& omega, const FieldC& u, const FieldC& v) {
    auto [lhs, rhs] = green_identity_sides(omega, u, v);
    return std::abs(lhs - rhs);
}

inline Rational green_residual_exact(const ClassifiedSet& omega, const FieldQ& u,
                                     const FieldQ& v) {
    auto [lhs, rhs] = green_identity_sides(omega, u, v);
    return (lhs - rhs).abs();
}

}  // namespace latsch

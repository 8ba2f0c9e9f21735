#pragma once

#include <functional>
#include <set>

#include "latsch/cone.hpp"
#include "latsch/domain.hpp"
#include "latsch/errors.hpp"
#include "latsch/field.hpp"
#include "latsch/stencil.hpp"

namespace latsch {

/// Frontier of the hyperplane recursion: two adjacent slabs of field values
/// along a sweep axis. Slabs are (d-1)-dimensional fields over the remaining
/// coordinates. With sign = +1 the frontier sits at levels (m1, m1+1) and the
/// recursion produces level m1-1; sign = -1 mirrors this.
template <class S>
struct SweepState {
    int axis = 0;                 // 0-based sweep axis
    int sign = +1;
    int level = 0;                // coordinate m1 of the near slab
    LatticeField<S> slab_near;    // values at level
    LatticeField<S> slab_far;     // values at level + sign
    S lambda = S(0);
    const LatticeField<S>* potential = nullptr;   // d-dimensional, may be null
};

namespace detail {
template <class S>
Site unslice(const Site& nprime, int axis, int level) {
    Site full(std::vector<int>(static_cast<size_t>(nprime.dim()) + 1, 0));
    int k = 0;
    for (int i = 0; i < full.dim(); ++i) full[i] = (i == axis) ? level : nprime[k++];
    return full;
}
template <class S>
Site slice_site(const Site& n, int axis) {
    std::vector<int> c;
    for (int i = 0; i < n.dim(); ++i)
        if (i != axis) c.push_back(n[i]);
    return Site(std::move(c));
}
}  // namespace detail

/// One step of the proof recursion
///   1/4 u(m1-1, n') = (-Delta^{(d-1)} + V(m1,n') - lambda) u(m1,n')
///                     + 1/2 u(m1,n') - 1/4 u(m1+1,n'),
/// returning the new slab at level - sign. Exact over any scalar ring.
template <class S>
LatticeField<S> sweep_step(const SweepState<S>& st) {
    using C = detail::stencil_consts<S>;
    const S four = S(4);
    LatticeField<S> lap = apply_laplacian(st.slab_near);   // (d-1)-dimensional stencil
    LatticeField<S> out(st.slab_near.dim());

    std::set<Site> supp;
    for (const auto& [n, v] : lap.entries()) supp.insert(n);
    for (const auto& [n, v] : st.slab_near.entries()) supp.insert(n);
    for (const auto& [n, v] : st.slab_far.entries()) supp.insert(n);

    for (const Site& np : supp) {
        S vpot(0);
        if (st.potential) vpot = st.potential->at(detail::unslice<S>(np, st.axis, st.level));
        S val = four * (S(0) - lap.at(np) + (vpot - st.lambda + C::half()) * st.slab_near.at(np)) -
                st.slab_far.at(np);
        out.set(np, val);
    }
    return out;
}

/// Zero region for propagation: any decidable predicate on sites.
using Region = std::function<bool(const Site&)>;

inline Region beyond_radius(double r) {
    return [r](const Site& n) { return n.norm() > r; };
}

struct PropagationResult {
    FieldC field;                          // input with forced zeros applied
    std::vector<std::pair<int, int>> trace;   // (pass, forced zero count)
    bool all_zero_on_domain = false;
};

/// Propagate zeros of a solution of (H_ext - lambda) u = 0 on the interior.
/// A site value is forced to zero when a single sweep-step identity at an
/// interior site has every other stencil entry already known to vanish; the
/// fixpoint of that rule is taken over the window. Values are never invented:
/// only replaced by zeros that the exact identities force.
inline PropagationResult propagate_zeros(const ExteriorDomain& domain, const FieldR& V,
                                         double lambda, const FieldC& u, const Region& known_zero) {
    (void)lambda;   // the forced-zero rule is lambda-independent: it only uses known zeros
    ConeVerdict cv = satisfies_cone_condition(domain);
    if (!cv.satisfied)
        throw ConeConditionViolated("domain fails the cone condition; refusing to propagate");

    Box w = domain.window();
    std::set<Site> zero;     // established zeros within the window
    std::vector<Site> interior;
    w.for_each([&](const Site& n) {
        if (!domain.contains(n)) return;
        if (known_zero(n)) zero.insert(n);
        if (domain.is_interior(n)) interior.push_back(n);
    });
    auto established = [&](const Site& n) {
        if (w.contains(n)) return zero.count(n) > 0;
        return known_zero(n);   // outside the window only the given region is known
    };

    PropagationResult res;
    res.field = u;
    int d = domain.dim();
    int pass = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        int forced = 0;
        for (const Site& q : interior) {
            for (int axis = 0; axis < d; ++axis) {
                for (int sign : {+1, -1}) {
                    Site target = q.shifted(axis, -sign);
                    if (!w.contains(target) || zero.count(target)) continue;
                    bool ready = established(q) && established(q.shifted(axis, sign));
                    for (int j = 0; ready && j < d; ++j) {
                        if (j == axis) continue;
                        ready = established(q.shifted(j, -1)) && established(q.shifted(j, +1));
                    }
                    if (ready) {
                        zero.insert(target);
                        ++forced;
                        changed = true;
                    }
                }
            }
        }
        res.trace.emplace_back(pass++, forced);
    }

    for (const Site& n : zero)
        if (domain.contains(n)) res.field.set(n, {0.0, 0.0});

    res.all_zero_on_domain = true;
    w.for_each([&](const Site& n) {
        if (domain.contains(n) && !zero.count(n)) res.all_zero_on_domain = false;
    });
    return res;
}

}  // namespace latsch

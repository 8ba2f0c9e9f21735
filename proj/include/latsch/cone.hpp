#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "latsch/domain.hpp"
#include "latsch/site.hpp"

namespace latsch {

/// Lattice cone C_{i,+-}(n) = { m : sum_{k != i} |m_k - n_k| <= +-(m_i - n_i) }.
struct Cone {
    int axis;   // 1-based, matching the usual index convention
    int sign;   // +1 or -1
    Site apex;

    bool contains(const Site& m) const {
        int i = axis - 1;
        int along = sign * (m[i] - apex[i]);
        if (along < 0) return false;
        int cross = 0;
        for (int k = 0; k < apex.dim(); ++k)
            if (k != i) cross += std::abs(m[k] - apex[k]);
        return cross <= along;
    }
};

/// Witness search for a cone contained in the exterior domain. Containment of
/// the truncated cone inside the window is decided exactly: a violation can
/// only be a site of the removed obstacle interior, and those are all known.
/// Witnesses are tried axis-ascending, plus before minus.
inline std::optional<std::pair<int, int>> cone_contained(const ExteriorDomain& domain,
                                                         const Site& n) {
    if (!domain.contains(n)) return std::nullopt;
    for (int axis = 1; axis <= domain.dim(); ++axis) {
        for (int sign : {+1, -1}) {
            Cone c{axis, sign, n};
            bool ok = true;
            for (const Site& bad : domain.interior_obstacle())
                if (c.contains(bad)) {
                    ok = false;
                    break;
                }
            if (ok) return std::make_pair(axis, sign);
        }
    }
    return std::nullopt;
}

struct ConeVerdict {
    bool satisfied;
    std::vector<Site> violating_sites;   // lexicographic
};

/// Definition check: every windowed domain site must host some cone.
inline ConeVerdict satisfies_cone_condition(const ExteriorDomain& domain) {
    ConeVerdict v;
    v.satisfied = true;
    domain.window().for_each([&](const Site& n) {
        if (!domain.contains(n)) return;
        if (!cone_contained(domain, n)) {
            v.satisfied = false;
            v.violating_sites.push_back(n);
        }
    });
    return v;
}

}  // namespace latsch

#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <vector>

#include "latsch/errors.hpp"
#include "latsch/site.hpp"

namespace latsch {

/// A finite connected subset of Z^d with the degree / interior / boundary
/// decomposition. deg(n) counts the neighbors inside the set; a site is
/// interior iff deg = 2d.
class ClassifiedSet {
  public:
    ClassifiedSet() : dim_(0) {}

    ClassifiedSet(int dim, std::vector<Site> sites, std::vector<int> degree,
                  std::vector<char> interior)
        : dim_(dim), sites_(std::move(sites)), degree_(std::move(degree)),
          interior_(std::move(interior)) {
        for (size_t i = 0; i < sites_.size(); ++i) index_[sites_[i]] = static_cast<int>(i);
    }

    /// Classify a finite site set on its own terms (degree counted within the set).
    static ClassifiedSet from_sites(int dim, const std::set<Site>& sites) {
        std::vector<Site> list(sites.begin(), sites.end());
        std::vector<int> deg(list.size(), 0);
        std::vector<char> interior(list.size(), 0);
        for (size_t i = 0; i < list.size(); ++i) {
            int d = 0;
            for (const Site& m : neighbors(list[i]))
                if (sites.count(m)) ++d;
            deg[i] = d;
            interior[i] = (d == 2 * dim) ? 1 : 0;
        }
        return ClassifiedSet(dim, std::move(list), std::move(deg), std::move(interior));
    }

    static ClassifiedSet box(int dim, const Box& b) {
        std::set<Site> s;
        b.for_each([&](const Site& n) { s.insert(n); });
        return from_sites(dim, s);
    }

    int dim() const { return dim_; }
    int size() const { return static_cast<int>(sites_.size()); }
    const std::vector<Site>& sites() const { return sites_; }
    const Site& site(int i) const { return sites_[static_cast<size_t>(i)]; }

    int index_of(const Site& n) const {
        auto it = index_.find(n);
        return it == index_.end() ? -1 : it->second;
    }
    bool contains(const Site& n) const { return index_.count(n) > 0; }

    int degree(int i) const { return degree_[static_cast<size_t>(i)]; }
    int degree(const Site& n) const {
        int i = index_of(n);
        if (i < 0) throw Error("ClassifiedSet: site not in set");
        return degree(i);
    }
    bool is_interior(int i) const { return interior_[static_cast<size_t>(i)] != 0; }
    bool is_interior(const Site& n) const {
        int i = index_of(n);
        return i >= 0 && is_interior(i);
    }
    bool is_boundary(const Site& n) const {
        int i = index_of(n);
        return i >= 0 && !is_interior(i);
    }

    std::vector<Site> interior_sites() const {
        std::vector<Site> out;
        for (int i = 0; i < size(); ++i)
            if (is_interior(i)) out.push_back(sites_[static_cast<size_t>(i)]);
        return out;
    }
    std::vector<Site> boundary_sites() const {
        std::vector<Site> out;
        for (int i = 0; i < size(); ++i)
            if (!is_interior(i)) out.push_back(sites_[static_cast<size_t>(i)]);
        return out;
    }

  private:
    int dim_;
    std::vector<Site> sites_;
    std::vector<int> degree_;
    std::vector<char> interior_;
    std::map<Site, int> index_;
};

/// Exterior domain Omega_ext = Z^d minus the interior of a finite obstacle.
/// All classification is exact: degrees are taken against the full infinite
/// domain, which is decidable because the obstacle is finite and strictly
/// inside the bounding window. The window only truncates scans.
class ExteriorDomain {
  public:
    ExteriorDomain(int dim, std::set<Site> obstacle, int bounding_radius)
        : dim_(dim), obstacle_(std::move(obstacle)), radius_(bounding_radius) {
        if (dim_ < 2) throw Error("ExteriorDomain: dimension must be >= 2");
        int extent = 0;
        for (const Site& n : obstacle_) {
            if (n.dim() != dim_) throw Error("ExteriorDomain: obstacle site dimension mismatch");
            extent = std::max(extent, n.norm_inf());
        }
        if (radius_ < extent + 3)
            throw WindowTooSmall("bounding_radius must exceed obstacle extent + 2");
        for (const Site& n : obstacle_) {
            bool inside = true;
            for (const Site& m : neighbors(n))
                if (!obstacle_.count(m)) {
                    inside = false;
                    break;
                }
            if (inside) interior_obstacle_.insert(n);
        }
        check_connectivity();
    }

    int dim() const { return dim_; }
    int bounding_radius() const { return radius_; }
    const std::set<Site>& obstacle() const { return obstacle_; }
    const std::set<Site>& interior_obstacle() const { return interior_obstacle_; }
    Box window() const { return Box::centered(dim_, radius_); }

    /// Membership in Omega_ext (decided exactly, anywhere on the lattice).
    bool contains(const Site& n) const { return !interior_obstacle_.count(n); }

    /// deg_{Omega_ext}(n) against the infinite domain.
    int degree(const Site& n) const {
        if (!contains(n)) throw Error("ExteriorDomain: site not in domain");
        int d = 0;
        for (const Site& m : neighbors(n))
            if (contains(m)) ++d;
        return d;
    }
    bool is_interior(const Site& n) const { return contains(n) && degree(n) == 2 * dim_; }
    bool is_boundary(const Site& n) const { return contains(n) && degree(n) < 2 * dim_; }

    /// The boundary of Omega_ext is finite: exactly the sites adjacent to the
    /// removed obstacle interior. Returned in lexicographic order.
    std::vector<Site> boundary_sites() const {
        std::set<Site> out;
        for (const Site& n : interior_obstacle_)
            for (const Site& m : neighbors(n))
                if (contains(m)) out.insert(m);
        return {out.begin(), out.end()};
    }

    /// Windowed restriction with the true (infinite-domain) classification.
    ClassifiedSet windowed() const {
        std::vector<Site> sites;
        Box w = window();
        w.for_each([&](const Site& n) {
            if (contains(n)) sites.push_back(n);
        });
        std::vector<int> deg(sites.size());
        std::vector<char> interior(sites.size());
        for (size_t i = 0; i < sites.size(); ++i) {
            deg[i] = degree(sites[i]);
            interior[i] = (deg[i] == 2 * dim_) ? 1 : 0;
        }
        return ClassifiedSet(dim_, std::move(sites), std::move(deg), std::move(interior));
    }

  private:
    void check_connectivity() const {
        // Multi-source BFS from the window edge: edge sites are mutually
        // connected through the untruncated outside, so any domain site the
        // sweep misses means Omega_ext splits.
        Box w = window();
        std::set<Site> domain_sites;
        w.for_each([&](const Site& n) {
            if (contains(n)) domain_sites.insert(n);
        });
        std::set<Site> seen;
        std::deque<Site> queue;
        w.for_each([&](const Site& n) {
            if (n.norm_inf() == radius_ && contains(n)) {
                seen.insert(n);
                queue.push_back(n);
            }
        });
        while (!queue.empty()) {
            Site n = queue.front();
            queue.pop_front();
            for (const Site& m : neighbors(n)) {
                if (!w.contains(m) || !contains(m) || seen.count(m)) continue;
                seen.insert(m);
                queue.push_back(m);
            }
        }
        if (seen.size() != domain_sites.size())
            throw DisconnectedDomain("exterior domain splits into components");
    }

    int dim_;
    std::set<Site> obstacle_;
    std::set<Site> interior_obstacle_;
    int radius_;
};

/// classify_domain per the exterior-problem conventions: obstacle finite,
/// window-edge sites identified as connected through infinity.
inline ExteriorDomain classify_domain(const std::set<Site>& obstacle, int bounding_radius) {
    int dim = obstacle.empty() ? 2 : obstacle.begin()->dim();
    return ExteriorDomain(dim, obstacle, bounding_radius);
}
inline ExteriorDomain classify_domain(int dim, const std::set<Site>& obstacle,
                                      int bounding_radius) {
    return ExteriorDomain(dim, obstacle, bounding_radius);
}

// ---------------------------------------------------------------------------
// Named obstacle presets
// ---------------------------------------------------------------------------

/// Rectangular polyhedron {|n_i| <= a_i}.
inline std::set<Site> obstacle_rectangle(const std::vector<int>& half_widths) {
    int d = static_cast<int>(half_widths.size());
    std::vector<int> lo(half_widths.size()), hi(half_widths.size());
    for (size_t i = 0; i < half_widths.size(); ++i) {
        lo[i] = -half_widths[i];
        hi[i] = half_widths[i];
    }
    std::set<Site> out;
    Box(lo, hi).for_each([&](const Site& n) { out.insert(n); });
    (void)d;
    return out;
}

/// Rhombus {sum |n_i| <= c}.
inline std::set<Site> obstacle_rhombus(int dim, int c) {
    std::set<Site> out;
    Box::centered(dim, c).for_each([&](const Site& n) {
        if (n.norm1() <= c) out.insert(n);
    });
    return out;
}

/// d=2 rectangle whose +x edge is a 45-degree sawtooth (unit steps). The
/// obstacle recedes by at most one column per row, which is what keeps a
/// lattice cone inside the exterior at every site.
inline std::set<Site> obstacle_zigzag(int left, int half_height, int x_base, int amplitude) {
    std::set<Site> out;
    int period = 2 * amplitude;
    for (int y = -half_height; y <= half_height; ++y) {
        int phase = ((y + half_height) % period + period) % period;
        int xmax = x_base + amplitude - std::abs(phase - amplitude);
        for (int x = -left; x <= xmax; ++x) out.insert(Site{x, y});
    }
    return out;
}

/// d=2 fourth-quadrant staircase: the right edge drops by (run+1) columns
/// over run+1 rows instead of receding at 45 degrees, so no lattice cone at
/// the reentrant corner fits inside the exterior. `run` is the number of
/// lattice cells per stair face.
inline std::set<Site> obstacle_figure2_staircase(int run = 3) {
    if (run < 2) throw Error("figure2 staircase: run must be >= 2");
    int x0 = run + 4;       // full right edge before the staircase
    int left = 4;           // extent into the other quadrants
    int top = 2;            // rows above the axis
    int h0 = 3;             // rows at full width below the top
    int bottom = h0 + run + 3;
    std::set<Site> out;
    for (int y = top; y >= -bottom; --y) {
        int xmax;
        if (y >= -(h0 - 1))
            xmax = x0;                 // full width
        else if (y == -h0)
            xmax = x0 - 1;             // the run row
        else if (y >= -h0 - run)
            xmax = x0 - 1 - run;       // the vertical face band
        else
            xmax = x0 - 2 - run;       // rectangular tail below
        for (int x = -left; x <= xmax; ++x) out.insert(Site{x, y});
    }
    return out;
}

inline std::set<Site> obstacle_preset(const std::string& name, int dim,
                                      const std::vector<int>& params) {
    if (name == "rectangle") {
        std::vector<int> hw = params;
        if (hw.empty()) hw.assign(static_cast<size_t>(dim), 3);
        while (static_cast<int>(hw.size()) < dim) hw.push_back(hw.back());
        return obstacle_rectangle(hw);
    }
    if (name == "rhombus") return obstacle_rhombus(dim, params.empty() ? 3 : params[0]);
    if (name == "zigzag") {
        if (dim != 2) throw UsageError("zigzag preset is 2-d");
        int amp = params.empty() ? 3 : params[0];
        int hh = params.size() > 1 ? params[1] : 3 * amp;
        return obstacle_zigzag(4, hh, 4, amp);
    }
    if (name == "figure2_staircase") {
        if (dim != 2) throw UsageError("figure2_staircase preset is 2-d");
        return obstacle_figure2_staircase(params.empty() ? 3 : params[0]);
    }
    throw UsageError("unknown domain preset: " + name);
}

}  // namespace latsch

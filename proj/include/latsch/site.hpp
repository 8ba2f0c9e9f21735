#pragma once

#include <cstdint>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace latsch {

/// A lattice point of Z^d, indexed by integer coordinates.
struct Site {
    std::vector<int> coords;

    Site() = default;
    explicit Site(std::vector<int> c) : coords(std::move(c)) {}
    Site(std::initializer_list<int> c) : coords(c) {}

    int dim() const { return static_cast<int>(coords.size()); }
    int operator[](int i) const { return coords[static_cast<size_t>(i)]; }
    int& operator[](int i) { return coords[static_cast<size_t>(i)]; }

    bool operator==(const Site& o) const { return coords == o.coords; }
    bool operator!=(const Site& o) const { return coords != o.coords; }
    // lexicographic order; used everywhere a deterministic site ordering is needed
    bool operator<(const Site& o) const { return coords < o.coords; }

    double norm() const {
        double s = 0;
        for (int c : coords) s += double(c) * double(c);
        return std::sqrt(s);
    }
    std::int64_t norm2() const {
        std::int64_t s = 0;
        for (int c : coords) s += std::int64_t(c) * c;
        return s;
    }
    int norm1() const {
        int s = 0;
        for (int c : coords) s += std::abs(c);
        return s;
    }
    int norm_inf() const {
        int s = 0;
        for (int c : coords) s = std::max(s, std::abs(c));
        return s;
    }

    Site shifted(int axis, int delta) const {
        Site m = *this;
        m[axis] += delta;
        return m;
    }
};

inline std::int64_t dist2(const Site& a, const Site& b) {
    std::int64_t s = 0;
    for (int i = 0; i < a.dim(); ++i) {
        std::int64_t d = std::int64_t(a[i]) - b[i];
        s += d * d;
    }
    return s;
}

/// The 2d nearest neighbors n ± e_j, ordered axis-ascending with minus before plus.
inline std::vector<Site> neighbors(const Site& n) {
    std::vector<Site> out;
    out.reserve(2 * static_cast<size_t>(n.dim()));
    for (int j = 0; j < n.dim(); ++j) {
        out.push_back(n.shifted(j, -1));
        out.push_back(n.shifted(j, +1));
    }
    return out;
}

struct SiteHash {
    size_t operator()(const Site& s) const {
        std::uint64_t h = 1469598103934665603ull;
        for (int c : s.coords) {
            h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(c));
            h *= 1099511628211ull;
        }
        return static_cast<size_t>(h);
    }
};

/// Axis-aligned box [lo_i, hi_i] used for supports and scan windows.
struct Box {
    std::vector<int> lo, hi;

    Box() = default;
    Box(std::vector<int> l, std::vector<int> h) : lo(std::move(l)), hi(std::move(h)) {
        if (lo.size() != hi.size()) throw std::invalid_argument("Box: rank mismatch");
    }
    static Box cube(int d, int lo, int hi) {
        return Box(std::vector<int>(static_cast<size_t>(d), lo),
                   std::vector<int>(static_cast<size_t>(d), hi));
    }
    static Box centered(int d, int radius) { return cube(d, -radius, radius); }

    int dim() const { return static_cast<int>(lo.size()); }
    bool contains(const Site& s) const {
        for (int i = 0; i < dim(); ++i)
            if (s[i] < lo[static_cast<size_t>(i)] || s[i] > hi[static_cast<size_t>(i)]) return false;
        return true;
    }
    std::int64_t volume() const {
        std::int64_t v = 1;
        for (int i = 0; i < dim(); ++i) v *= hi[static_cast<size_t>(i)] - lo[static_cast<size_t>(i)] + 1;
        return v;
    }
    Box grown(int by) const {
        Box b = *this;
        for (auto& v : b.lo) v -= by;
        for (auto& v : b.hi) v += by;
        return b;
    }

    /// Visits every site in lexicographic order.
    template <class F>
    void for_each(F&& f) const {
        Site s(lo);
        while (true) {
            f(const_cast<const Site&>(s));
            int i = dim() - 1;
            while (i >= 0) {
                if (++s[i] <= hi[static_cast<size_t>(i)]) break;
                s[i] = lo[static_cast<size_t>(i)];
                --i;
            }
            if (i < 0) return;
        }
    }
};

}  // namespace latsch

#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <type_traits>

#include "latsch/errors.hpp"
#include "latsch/rational.hpp"
#include "latsch/site.hpp"

namespace latsch {

template <class S>
struct scalar_traits {
    static double abs(const S& v) { return std::abs(v); }
    static bool is_real(const S&) { return true; }
};
template <>
struct scalar_traits<std::complex<double>> {
    static double abs(const std::complex<double>& v) { return std::abs(v); }
    static bool is_real(const std::complex<double>& v) { return v.imag() == 0.0; }
};
template <>
struct scalar_traits<Rational> {
    static double abs(const Rational& v) { return std::fabs(v.to_double()); }
    static bool is_real(const Rational&) { return true; }
};

/// Finitely supported map Z^d -> scalar. Absent sites read as zero.
/// Entries are kept in lexicographic site order so iteration is deterministic.
template <class S>
class LatticeField {
  public:
    using scalar_type = S;
    using map_type = std::map<Site, S>;

    LatticeField() : dim_(0) {}
    explicit LatticeField(int dim) : dim_(dim) {}

    int dim() const { return dim_; }
    const map_type& entries() const { return entries_; }
    bool empty() const { return entries_.empty(); }
    size_t support_size() const { return entries_.size(); }

    S at(const Site& n) const {
        auto it = entries_.find(n);
        return it == entries_.end() ? S(0) : it->second;
    }

    void set(const Site& n, const S& v) {
        if (dim_ == 0) dim_ = n.dim();
        if (n.dim() != dim_) throw Error("LatticeField: dimension mismatch");
        if (v == S(0))
            entries_.erase(n);
        else
            entries_[n] = v;
    }

    void add(const Site& n, const S& v) { set(n, at(n) + v); }

    double support_radius() const {
        double r = 0;
        for (const auto& [n, v] : entries_) r = std::max(r, n.norm());
        return r;
    }
    int support_radius_inf() const {
        int r = 0;
        for (const auto& [n, v] : entries_) r = std::max(r, n.norm_inf());
        return r;
    }

    double norm_l2() const {
        double s = 0;
        for (const auto& [n, v] : entries_) {
            double a = scalar_traits<S>::abs(v);
            s += a * a;
        }
        return std::sqrt(s);
    }
    double norm_max() const {
        double s = 0;
        for (const auto& [n, v] : entries_) s = std::max(s, scalar_traits<S>::abs(v));
        return s;
    }

    bool is_real_valued() const {
        for (const auto& [n, v] : entries_)
            if (!scalar_traits<S>::is_real(v)) return false;
        return true;
    }

    static LatticeField delta(const Site& n, const S& v = S(1)) {
        LatticeField f(n.dim());
        f.set(n, v);
        return f;
    }

    friend LatticeField operator+(const LatticeField& a, const LatticeField& b) {
        LatticeField out(a.dim_ ? a.dim_ : b.dim_);
        out.entries_ = a.entries_;
        for (const auto& [n, v] : b.entries_) out.add(n, v);
        return out;
    }
    friend LatticeField operator-(const LatticeField& a, const LatticeField& b) {
        LatticeField out(a.dim_ ? a.dim_ : b.dim_);
        out.entries_ = a.entries_;
        for (const auto& [n, v] : b.entries_) out.add(n, S(0) - v);
        return out;
    }
    friend LatticeField operator*(const S& c, const LatticeField& a) {
        LatticeField out(a.dim_);
        if (c == S(0)) return out;
        for (const auto& [n, v] : a.entries_) out.entries_[n] = c * v;
        return out;
    }

  private:
    int dim_;
    map_type entries_;
};

using FieldC = LatticeField<std::complex<double>>;
using FieldR = LatticeField<double>;
using FieldQ = LatticeField<Rational>;

inline FieldC to_complex(const FieldR& f) {
    FieldC out(f.dim());
    for (const auto& [n, v] : f.entries()) out.set(n, {v, 0.0});
    return out;
}

}  // namespace latsch

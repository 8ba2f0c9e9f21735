#pragma once

#include <cmath>
#include <cstdint>
#include <string>

namespace latsch {

/// Counter-based deterministic generator. A draw is a pure function of
/// (seed, stream name, counter), so independent experiment streams can be
/// replayed or parallelized without coupling, and identical configs give
/// identical reports byte for byte.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, const std::string& stream)
        : key_(mix(seed ^ fnv1a(stream))), counter_(0) {}

    double uniform() { return uniform_at(counter_++); }

    /// value in [lo, hi)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// integer in [0, n)
    std::uint64_t index(std::uint64_t n) {
        return static_cast<std::uint64_t>(uniform() * double(n)) % n;
    }

    double normal() {
        double u1 = uniform(), u2 = uniform();
        if (u1 <= 0) u1 = 5e-324;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    double uniform_at(std::uint64_t counter) const {
        std::uint64_t z = mix(key_ + 0x9e3779b97f4a7c15ull * (counter + 1));
        return double(z >> 11) * 0x1.0p-53;
    }

    static std::uint64_t fnv1a(const std::string& s) {
        std::uint64_t h = 1469598103934665603ull;
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ull;
        }
        return h;
    }

  private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_;
};

}  // namespace latsch

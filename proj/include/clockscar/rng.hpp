#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace clockscar {

/// Derive an independent stream seed from a master seed and a purpose label,
/// so adding one experiment never shifts another experiment's draws.
inline std::uint64_t sub_seed(std::uint64_t master, std::string_view label) {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a over the label
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    h += master + 0x9e3779b97f4a7c15ull;
    // splitmix64 finalizer
    h ^= h >> 30;
    h *= 0xbf58476d1ce4e5b9ull;
    h ^= h >> 27;
    h *= 0x94d049bb133111ebull;
    h ^= h >> 31;
    return h;
}

// Seeded stream with hand-mapped distributions. std::uniform_real_distribution
// is not pinned by the standard, which would break byte-identical outputs.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : engine_(seed) {}
    RngStream(std::uint64_t master, std::string_view label) : engine_(sub_seed(master, label)) {}

    std::uint64_t raw() { return engine_(); }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on [-1, 1].
    double uniform_pm1() { return 2.0 * uniform01() - 1.0; }

    /// Standard normal via Box-Muller.
    double gaussian() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = 1.0 - uniform01();  // (0, 1]
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        cached_ = r * std::sin(2.0 * M_PI * u2);
        have_cached_ = true;
        return r * std::cos(2.0 * M_PI * u2);
    }

private:
    std::mt19937_64 engine_;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

/// Normalized complex Gaussian vector (Haar-like random state).
inline Eigen::VectorXcd haar_random_state(Eigen::Index dim, RngStream& rng) {
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        double re = rng.gaussian();
        double im = rng.gaussian();
        v(i) = std::complex<double>(re, im);
    }
    v.normalize();
    return v;
}

}  // namespace clockscar

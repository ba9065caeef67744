#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace cta {

// ============================================================
// Error taxonomy
// ============================================================
struct LoadError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct OrderingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct LookupError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct WarmupError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TemporalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ============================================================
// Time helpers (all timestamps are UTC epoch seconds)
// ============================================================
constexpr std::int64_t kSecPerMin  = 60;
constexpr std::int64_t kSecPerHour = 3600;
constexpr std::int64_t kSecPerDay  = 86400;
constexpr double kSecPerYear = 365.25 * 86400.0;

inline std::int64_t utc_day_open(std::int64_t ts) {
    return ts - ((ts % kSecPerDay) + kSecPerDay) % kSecPerDay;
}

inline int utc_hour_of_day(std::int64_t ts) {
    return static_cast<int>((((ts % kSecPerDay) + kSecPerDay) % kSecPerDay) / kSecPerHour);
}

// ============================================================
// Deterministic formatting
// ============================================================

/// Shortest text that reparses to the exact same double.
inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    // trim to shortest round-trip representation
    for (int prec = 1; prec < 17; ++prec) {
        char cand[40];
        std::snprintf(cand, sizeof(cand), "%.*g", prec, v);
        if (std::strtod(cand, nullptr) == v) return cand;
    }
    return buf;
}

inline std::string fmt_fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

/// Round to 8 fractional decimal digits (price/quantity storage precision).
inline double round8(double v) {
    return std::round(v * 1e8) / 1e8;
}

// ============================================================
// Hashing / RNG
// ============================================================

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// splitmix64: tiny deterministic generator, identical on every platform.
/// Used for synthetic data and test input generation.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /// uniform in [0, 1)
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// uniform in [lo, hi)
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    /// standard normal via Box-Muller
    double gaussian() {
        constexpr double two_pi = 6.283185307179586476925286766559;
        double u1 = uniform();
        double u2 = uniform();
        if (u1 < 1e-300) u1 = 1e-300;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
    }

    /// integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        return n ? next() % n : 0;
    }

private:
    std::uint64_t state_;
};

} // namespace cta

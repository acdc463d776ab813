#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace extcal {

// One named verification check: the identity string says exactly what the
// residual measures so reports are self-describing.
struct CheckResult {
    std::string name;
    std::string identity;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct VerificationReport {
    std::string title;
    std::uint64_t seed = 0;
    std::vector<CheckResult> checks;

    bool overall_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }

    void add(std::string name, std::string identity, double residual, double tolerance) {
        checks.push_back(
            {std::move(name), std::move(identity), residual, tolerance, residual <= tolerance});
    }

    // For checks that are plain predicates rather than residual comparisons.
    void add_flag(std::string name, std::string identity, bool ok) {
        checks.push_back({std::move(name), std::move(identity), ok ? 0.0 : 1.0, 0.5, ok});
    }
};

// Deterministic generator (splitmix64) so seeded runs are byte-reproducible
// across standard-library implementations.
struct Rng {
    std::uint64_t state;

    explicit Rng(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1).
    double uniform() { return (next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Integer in [lo, hi] inclusive.
    long long range(long long lo, long long hi) {
        return lo + static_cast<long long>(next() % static_cast<std::uint64_t>(hi - lo + 1));
    }
};

} // namespace extcal

#pragma once

#include <cstdint>
#include <vector>

namespace exclusion {

// Inclusive range of lattice sites [lo, hi] standing in for the infinite
// lattice. `buffer` marks how many sites on each side are sacrificial:
// observables must stay inside [lo+buffer, hi-buffer].
struct Window {
    std::int64_t lo;
    std::int64_t hi;
    std::int64_t buffer = 0;

    void validate() const;  // throws std::invalid_argument
    std::int64_t size() const { return hi - lo + 1; }
    bool contains(std::int64_t site) const { return site >= lo && site <= hi; }
    std::int64_t safe_lo() const { return lo + buffer; }
    std::int64_t safe_hi() const { return hi - buffer; }
    bool symmetric() const { return lo == -hi; }

    bool operator==(const Window&) const = default;
};

// Occupation state of a window, one bit per site.
class Configuration {
public:
    Configuration() = default;
    explicit Configuration(const Window& window);

    const Window& window() const { return window_; }

    bool occupied(std::int64_t site) const {
        const std::uint64_t idx = static_cast<std::uint64_t>(site - window_.lo);
        return (blocks_[idx >> 6] >> (idx & 63)) & 1u;
    }
    void set(std::int64_t site, bool value) {
        const std::uint64_t idx = static_cast<std::uint64_t>(site - window_.lo);
        const std::uint64_t bit = std::uint64_t{1} << (idx & 63);
        if (value) {
            blocks_[idx >> 6] |= bit;
        } else {
            blocks_[idx >> 6] &= ~bit;
        }
    }

    // Total number of particles.
    std::int64_t particle_count() const;

    // Particles at integer sites x with a <= x <= b (real endpoints).
    // Throws std::invalid_argument unless [a, b] lies inside the window.
    std::int64_t count_interval(double a, double b) const;

    // Occupancy bits restricted to [a, b] as 0/1 values, for bit-exact
    // comparisons between runs on different windows.
    std::vector<std::uint8_t> slice(std::int64_t a, std::int64_t b) const;

    bool operator==(const Configuration&) const = default;

private:
    Window window_{0, 0, 0};
    std::vector<std::uint64_t> blocks_;
};

// Coordinatewise order, used by the coupling invariants.
bool dominates(const Configuration& upper, const Configuration& lower);

}  // namespace exclusion

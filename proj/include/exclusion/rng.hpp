#pragma once

#include <cstdint>
#include <array>
#include <cmath>

namespace exclusion {

// Counter-based generator (Philox 4x32, 10 rounds). Every variate is a pure
// function of (seed, site, index, domain), which is what makes window
// extension, replica independence and replay-based oracles exact: no state
// is shared between sites and no draw order is ever implied.
namespace philox {

inline constexpr std::uint32_t kMul0 = 0xD2511F53u;
inline constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kBump0 = 0x9E3779B9u;
inline constexpr std::uint32_t kBump1 = 0xBB67AE85u;

using Block = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

inline void round_once(Block& ctr, const Key& key) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    ctr = Block{hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

inline Block generate(Block ctr, Key key) {
    round_once(ctr, key);
    for (int r = 1; r < 10; ++r) {
        key[0] += kBump0;
        key[1] += kBump1;
        round_once(ctr, key);
    }
    return ctr;
}

}  // namespace philox

// Independent substream domains. Distinct domains never collide, so e.g.
// burn-in dynamics cannot replay the events later used by a measurement run.
enum class RngDomain : std::uint32_t {
    kDynamics = 0,   // per-site Poisson clocks and jump displacements
    kInitial = 1,    // per-site uniforms for initial occupancies
    kSeedMix = 2,    // replica seed derivation
    kObservation = 3,// randomized observation times
    kBurnIn = 4,     // dynamics of burn-in phases
};

// One 128-bit block addressed by (seed, site, index, domain).
inline philox::Block keyed_block(std::uint64_t seed, std::int64_t site,
                                 std::uint64_t index, RngDomain domain) {
    const philox::Key key{static_cast<std::uint32_t>(seed),
                          static_cast<std::uint32_t>(seed >> 32)};
    const philox::Block ctr{static_cast<std::uint32_t>(index),
                            static_cast<std::uint32_t>(index >> 32),
                            static_cast<std::uint32_t>(static_cast<std::uint64_t>(site)),
                            static_cast<std::uint32_t>(domain)};
    return philox::generate(ctr, key);
}

// Uniform double in [0, 1) from 53 random bits.
inline double to_unit_double(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Two independent uniforms per block: slot 0 feeds the exponential waiting
// time, slot 1 the displacement draw.
struct UniformPair {
    double first;
    double second;
};

inline UniformPair keyed_uniform_pair(std::uint64_t seed, std::int64_t site,
                                      std::uint64_t index, RngDomain domain) {
    const philox::Block b = keyed_block(seed, site, index, domain);
    return UniformPair{to_unit_double(b[0], b[1]), to_unit_double(b[2], b[3])};
}

inline double keyed_uniform(std::uint64_t seed, std::int64_t site,
                            std::uint64_t index, RngDomain domain) {
    return keyed_uniform_pair(seed, site, index, domain).first;
}

// Exponential(1) variate. The uniform is in [0,1) so 1-u is in (0,1].
inline double exponential_from_uniform(double u) {
    return -std::log1p(-u);
}

inline std::uint64_t keyed_u64(std::uint64_t seed, std::int64_t site,
                               std::uint64_t index, RngDomain domain) {
    const philox::Block b = keyed_block(seed, site, index, domain);
    return (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
}

// Derived seed for replica `index`; keyed mixing keeps replicas independent
// of one another and of their enumeration order.
inline std::uint64_t replica_seed(std::uint64_t master_seed, std::uint64_t index) {
    return keyed_u64(master_seed, 0, index, RngDomain::kSeedMix);
}

}  // namespace exclusion

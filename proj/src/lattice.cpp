#include "exclusion/lattice.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

namespace exclusion {

namespace {
constexpr std::int64_t kMaxAbsSite = (std::int64_t{1} << 31) - 2;
constexpr std::int64_t kMaxWindowSize = std::int64_t{1} << 26;
}  // namespace

void Window::validate() const {
    if (lo > hi) {
        throw std::invalid_argument("window: requires lo <= hi");
    }
    if (lo < -kMaxAbsSite || hi > kMaxAbsSite) {
        throw std::invalid_argument("window: site bounds exceed supported range");
    }
    if (size() > kMaxWindowSize) {
        throw std::invalid_argument("window: size " + std::to_string(size()) + " exceeds cap");
    }
    if (buffer < 0 || 2 * buffer > size()) {
        throw std::invalid_argument("window: invalid buffer");
    }
}

Configuration::Configuration(const Window& window) : window_(window) {
    window_.validate();
    blocks_.assign(static_cast<std::size_t>((window_.size() + 63) / 64), 0);
}

std::int64_t Configuration::particle_count() const {
    std::int64_t total = 0;
    for (std::uint64_t block : blocks_) total += std::popcount(block);
    return total;
}

std::int64_t Configuration::count_interval(double a, double b) const {
    if (a < static_cast<double>(window_.lo) || b > static_cast<double>(window_.hi)) {
        throw std::invalid_argument("count_interval: interval outside window");
    }
    if (a > b) return 0;
    const std::int64_t first = static_cast<std::int64_t>(std::ceil(a));
    const std::int64_t last = static_cast<std::int64_t>(std::floor(b));
    if (first > last) return 0;

    const std::uint64_t lo_idx = static_cast<std::uint64_t>(first - window_.lo);
    const std::uint64_t hi_idx = static_cast<std::uint64_t>(last - window_.lo);
    const std::size_t lo_block = lo_idx >> 6;
    const std::size_t hi_block = hi_idx >> 6;
    const std::uint64_t lo_mask = ~std::uint64_t{0} << (lo_idx & 63);
    const std::uint64_t hi_mask = ~std::uint64_t{0} >> (63 - (hi_idx & 63));

    if (lo_block == hi_block) {
        return std::popcount(blocks_[lo_block] & lo_mask & hi_mask);
    }
    std::int64_t total = std::popcount(blocks_[lo_block] & lo_mask);
    for (std::size_t i = lo_block + 1; i < hi_block; ++i) {
        total += std::popcount(blocks_[i]);
    }
    total += std::popcount(blocks_[hi_block] & hi_mask);
    return total;
}

std::vector<std::uint8_t> Configuration::slice(std::int64_t a, std::int64_t b) const {
    if (a < window_.lo || b > window_.hi || a > b) {
        throw std::invalid_argument("slice: range outside window");
    }
    std::vector<std::uint8_t> out;
    out.reserve(static_cast<std::size_t>(b - a + 1));
    for (std::int64_t x = a; x <= b; ++x) {
        out.push_back(occupied(x) ? 1 : 0);
    }
    return out;
}

bool dominates(const Configuration& upper, const Configuration& lower) {
    if (upper.window() != lower.window()) return false;
    const Window& w = upper.window();
    for (std::int64_t x = w.lo; x <= w.hi; ++x) {
        if (lower.occupied(x) && !upper.occupied(x)) return false;
    }
    return true;
}

}  // namespace exclusion

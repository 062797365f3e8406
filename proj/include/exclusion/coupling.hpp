#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "exclusion/engine.hpp"
#include "exclusion/lattice.hpp"

namespace exclusion {

// K configurations c_1 <= c_2 <= ... <= c_K on one window, evolving under a
// shared event stream. Level differences c_j - c_{j-1} are the class-j
// particle fields.
class NestedFamily {
public:
    // Validates the coordinatewise nesting; throws std::invalid_argument.
    explicit NestedFamily(std::vector<Configuration> levels);

    int level_count() const { return static_cast<int>(levels_.size()); }
    const Configuration& level(int j) const { return levels_.at(static_cast<std::size_t>(j)); }
    const Window& window() const { return levels_.front().window(); }
    std::vector<Configuration>& levels() { return levels_; }
    const std::vector<Configuration>& levels() const { return levels_; }

    // Class label of a site: 0 when empty, otherwise the smallest j with
    // level j-1 occupied (1-based classes).
    int class_at(std::int64_t site) const;

    bool operator==(const NestedFamily&) const = default;

private:
    std::vector<Configuration> levels_;
};

// Per-site class labels, 0 = empty, 1..K = particle class.
struct ClassView {
    Window window;
    std::vector<int> labels;
};

// Evolves every level by the same event sequence; nesting is preserved and
// each level matches solo evolution under an equal-seed stream.
NestedFamily evolve_nested(NestedFamily family, EventStream& stream, double t,
                           std::span<EventObserver* const> observers = {});

ClassView class_view(const NestedFamily& family);

void write_class_view_csv(const ClassView& view, const std::string& path);

// Keeps occupancy at sites <= m, zeroes the rest.
Configuration truncate_left(Configuration config, std::int64_t m);

// Keeps occupancy at sites > m, zeroes the rest.
Configuration truncate_right(Configuration config, std::int64_t m);

// Merges a dominated pair into one configuration: equals `upper` at sites
// <= 0 and `lower` at sites > 0, i.e. lower + truncate_left(upper - lower, 0).
// Throws unless lower <= upper coordinatewise.
Configuration splice_at_origin(const Configuration& lower, const Configuration& upper);

// Reflected hole configuration x -> 1 - occupancy(-x); an involution.
// Requires a window symmetric about the origin.
Configuration reflect_holes(const Configuration& config);

// Event-stream view driving the reflected hole process; see
// EventStream::reflected.
EventStream reflect_stream(const EventStream& stream);

// Re-splits a four-level family at cut site m, at a restart epoch: with
// classes (1,2,3,4) read off the input levels, the output classes are
//   class 2' = (class 2 + class 4) kept at sites <= m,
//   class 3' = class 2 kept at sites > m,
//   class 4' = class 4 kept at sites > m,
// class 1 and the union of all classes unchanged. Throws unless the family
// has exactly four levels.
NestedFamily resplit_at(const NestedFamily& family, std::int64_t cut);

// Approximate draw from the invariant law of the coupled pair with flat
// product marginals of densities (rho, lambda): the pair starts from shared
// per-site uniforms (lower occupied iff U_x <= rho, upper iff U_x <= lambda)
// and is evolved to a time sampled uniformly in [t_burn, 2*t_burn]. The
// marginals are invariant, so they stay exactly product for all times; only
// the joint law depends on the burn-in length. Burn-in dynamics use an
// event-stream domain disjoint from later measurement runs.
NestedFamily burn_in_coupled(const StepProfileParams& params, const JumpKernel& kernel,
                             const Window& window, double t_burn, std::uint64_t seed);

}  // namespace exclusion

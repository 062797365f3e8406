#include "exclusion/coupling.hpp"

#include <fstream>
#include <stdexcept>
#include <utility>

namespace exclusion {

NestedFamily::NestedFamily(std::vector<Configuration> levels) : levels_(std::move(levels)) {
    if (levels_.empty()) {
        throw std::invalid_argument("nested family: needs at least one level");
    }
    for (std::size_t j = 1; j < levels_.size(); ++j) {
        if (levels_[j].window() != levels_[0].window()) {
            throw std::invalid_argument("nested family: levels on different windows");
        }
        if (!dominates(levels_[j], levels_[j - 1])) {
            throw std::invalid_argument("nested family: levels are not nested");
        }
    }
}

int NestedFamily::class_at(std::int64_t site) const {
    for (std::size_t j = 0; j < levels_.size(); ++j) {
        if (levels_[j].occupied(site)) return static_cast<int>(j) + 1;
    }
    return 0;
}

NestedFamily evolve_nested(NestedFamily family, EventStream& stream, double t,
                           std::span<EventObserver* const> observers) {
    std::vector<Configuration*> configs;
    configs.reserve(family.levels().size());
    for (Configuration& level : family.levels()) configs.push_back(&level);
    evolve_marginals(configs, stream, t, observers);
    return family;
}

ClassView class_view(const NestedFamily& family) {
    const Window& w = family.window();
    ClassView view{w, {}};
    view.labels.reserve(static_cast<std::size_t>(w.size()));
    for (std::int64_t x = w.lo; x <= w.hi; ++x) {
        view.labels.push_back(family.class_at(x));
    }
    return view;
}

void write_class_view_csv(const ClassView& view, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "site,class\n";
    for (std::int64_t x = view.window.lo; x <= view.window.hi; ++x) {
        out << x << ',' << view.labels[static_cast<std::size_t>(x - view.window.lo)] << '\n';
    }
}

Configuration truncate_left(Configuration config, std::int64_t m) {
    const Window& w = config.window();
    for (std::int64_t x = std::max(w.lo, m + 1); x <= w.hi; ++x) {
        config.set(x, false);
    }
    return config;
}

Configuration truncate_right(Configuration config, std::int64_t m) {
    const Window& w = config.window();
    for (std::int64_t x = w.lo; x <= std::min(w.hi, m); ++x) {
        config.set(x, false);
    }
    return config;
}

Configuration splice_at_origin(const Configuration& lower, const Configuration& upper) {
    if (!dominates(upper, lower)) {
        throw std::invalid_argument("splice_at_origin: lower must be dominated by upper");
    }
    Configuration merged = lower;
    const Window& w = merged.window();
    for (std::int64_t x = w.lo; x <= std::min(w.hi, std::int64_t{0}); ++x) {
        if (upper.occupied(x)) merged.set(x, true);
    }
    return merged;
}

Configuration reflect_holes(const Configuration& config) {
    const Window& w = config.window();
    if (!w.symmetric()) {
        throw std::invalid_argument("reflect_holes: window must be symmetric about 0");
    }
    Configuration reflected(w);
    for (std::int64_t x = w.lo; x <= w.hi; ++x) {
        reflected.set(x, !config.occupied(-x));
    }
    return reflected;
}

EventStream reflect_stream(const EventStream& stream) {
    return stream.reflected();
}

NestedFamily resplit_at(const NestedFamily& family, std::int64_t cut) {
    if (family.level_count() != 4) {
        throw std::invalid_argument("resplit_at: requires exactly four levels");
    }
    const Window& w = family.window();
    std::vector<Configuration> levels(4, family.level(0));
    // At a restart epoch the input class 3 is empty; if it is not, it stays
    // class 3 so the union of all classes is preserved either way.
    for (std::int64_t x = w.lo; x <= w.hi; ++x) {
        int routed = 0;
        switch (family.class_at(x)) {
            case 2: routed = x <= cut ? 2 : 3; break;
            case 3: routed = 3; break;
            case 4: routed = x <= cut ? 2 : 4; break;
            default: continue;
        }
        for (int j = routed - 1; j < 4; ++j) levels[static_cast<std::size_t>(j)].set(x, true);
    }
    return NestedFamily(std::move(levels));
}

NestedFamily burn_in_coupled(const StepProfileParams& params, const JumpKernel& kernel,
                             const Window& window, double t_burn, std::uint64_t seed) {
    params.validate();
    if (t_burn < 0.0) {
        throw std::invalid_argument("burn_in_coupled: requires t_burn >= 0");
    }
    const StepProfileParams flat_lower{params.rho, params.rho};
    const StepProfileParams flat_upper{params.lambda, params.lambda};
    Configuration lower = sample_initial_step(window, flat_lower, seed);
    Configuration upper = sample_initial_step(window, flat_upper, seed);

    const double u = keyed_uniform(seed, 0, 0, RngDomain::kObservation);
    const double t_observe = t_burn * (1.0 + u);
    NestedFamily pair(std::vector<Configuration>{std::move(lower), std::move(upper)});
    if (t_observe > 0.0) {
        EventStream stream(seed, kernel, window, RngDomain::kBurnIn);
        pair = evolve_nested(std::move(pair), stream, t_observe);
    }
    return pair;
}

}  // namespace exclusion

#include <cstdint>
#include <string>
#include <vector>

#include "exclusion/coupling.hpp"
#include "exclusion/engine.hpp"
#include "exclusion/harness.hpp"
#include "exclusion/observables.hpp"
#include "exclusion/rng.hpp"

namespace exclusion {

namespace {

// Asserts coordinatewise nesting of the tracked levels after every event.
class NestingMonitor final : public EventObserver {
public:
    explicit NestingMonitor(const std::vector<Configuration*>& levels) : levels_(levels) {}

    void on_event(const Event&, std::int64_t, std::uint64_t) override {
        ++events_;
        for (std::size_t j = 1; j < levels_.size(); ++j) {
            if (!dominates(*levels_[j], *levels_[j - 1])) {
                violations_ += 1;
                return;
            }
        }
    }

    std::int64_t events() const { return events_; }
    std::int64_t violations() const { return violations_; }

private:
    std::vector<Configuration*> levels_;
    std::int64_t events_ = 0;
    std::int64_t violations_ = 0;
};

// Follows particle identities through applied moves of configuration 0; the
// identity-based flux definition lives here and nowhere in the library.
class LabelTracker final : public EventObserver {
public:
    explicit LabelTracker(const Configuration& initial) : window_(initial.window()) {
        labels_.assign(static_cast<std::size_t>(window_.size()), -1);
        for (std::int64_t x = window_.lo; x <= window_.hi; ++x) {
            if (initial.occupied(x)) {
                labels_[static_cast<std::size_t>(x - window_.lo)] =
                    static_cast<int>(starts_.size());
                starts_.push_back(x);
            }
        }
    }

    void on_event(const Event& event, std::int64_t target, std::uint64_t applied_mask) override {
        if (!(applied_mask & 1)) return;
        auto& from = labels_[static_cast<std::size_t>(event.site - window_.lo)];
        labels_[static_cast<std::size_t>(target - window_.lo)] = from;
        from = -1;
    }

    // Particles that started at or left of the boundary and ended strictly
    // right of it, minus the reverse movers.
    std::int64_t label_flux(double boundary) const {
        std::vector<std::int64_t> finals(starts_.size(), 0);
        for (std::int64_t x = window_.lo; x <= window_.hi; ++x) {
            const int id = labels_[static_cast<std::size_t>(x - window_.lo)];
            if (id >= 0) finals[static_cast<std::size_t>(id)] = x;
        }
        std::int64_t flux = 0;
        for (std::size_t i = 0; i < starts_.size(); ++i) {
            const double from = static_cast<double>(starts_[i]);
            const double to = static_cast<double>(finals[i]);
            if (from <= boundary && boundary < to) ++flux;
            if (to <= boundary && boundary < from) --flux;
        }
        return flux;
    }

private:
    Window window_;
    std::vector<int> labels_;
    std::vector<std::int64_t> starts_;
};

std::uint64_t check_seed(std::uint64_t suite_seed, std::uint64_t check, std::uint64_t rep) {
    return replica_seed(suite_seed, check * 1009 + rep);
}

InvariantCheck check_attractiveness(std::uint64_t seed, const JumpKernel& kernel) {
    const Window window{-25, 25, 0};
    std::int64_t events = 0;
    std::int64_t violations = 0;
    for (std::uint64_t rep = 0; rep < 20; ++rep) {
        const std::uint64_t s = check_seed(seed, 1, rep);
        std::vector<Configuration> levels{
            sample_initial_step(window, StepProfileParams{0.2, 0.1}, s),
            sample_initial_step(window, StepProfileParams{0.6, 0.3}, s),
            sample_initial_step(window, StepProfileParams{0.9, 0.8}, s),
        };
        std::vector<Configuration*> pointers{&levels[0], &levels[1], &levels[2]};
        NestingMonitor monitor(pointers);
        EventObserver* observers[] = {&monitor};
        EventStream stream(s, kernel, window);
        evolve_marginals(pointers, stream, 100.0, observers);
        events += monitor.events();
        violations += monitor.violations();
    }
    return InvariantCheck{"attractiveness", violations == 0,
                          std::to_string(events) + " events, " + std::to_string(violations) +
                              " order violations"};
}

InvariantCheck check_marginal_consistency(std::uint64_t seed, const JumpKernel& kernel) {
    const Window window{-30, 30, 0};
    const double checkpoints[] = {10.0, 25.0, 50.0};
    const StepProfileParams level_params[] = {{0.3, 0.1}, {0.7, 0.4}, {1.0, 0.6}};
    int mismatches = 0;
    for (std::uint64_t rep = 0; rep < 10; ++rep) {
        const std::uint64_t s = check_seed(seed, 2, rep);
        std::vector<Configuration> levels;
        for (const StepProfileParams& p : level_params) {
            levels.push_back(sample_initial_step(window, p, s));
        }
        NestedFamily family(levels);
        EventStream joint_stream(s, kernel, window);
        std::vector<Configuration> solo;
        for (const StepProfileParams& p : level_params) {
            solo.push_back(sample_initial_step(window, p, s));
        }
        std::vector<EventStream> solo_streams(3, EventStream(s, kernel, window));
        for (const double t : checkpoints) {
            family = evolve_nested(std::move(family), joint_stream, t);
            for (int j = 0; j < 3; ++j) {
                solo[static_cast<std::size_t>(j)] = evolve_to(
                    std::move(solo[static_cast<std::size_t>(j)]), solo_streams[static_cast<std::size_t>(j)], t);
                if (!(family.level(j) == solo[static_cast<std::size_t>(j)])) ++mismatches;
            }
        }
    }
    return InvariantCheck{"nested-marginal-equality", mismatches == 0,
                          "10 runs x 3 levels x 3 checkpoints, " + std::to_string(mismatches) +
                              " mismatches"};
}

InvariantCheck check_reflection_conjugacy(std::uint64_t seed, const JumpKernel& kernel) {
    const Window window{-30, 30, 0};
    int mismatches = 0;
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
        const std::uint64_t s = check_seed(seed, 3, rep);
        const Configuration initial = sample_initial_step(window, StepProfileParams{0.7, 0.4}, s);
        EventStream stream(s, kernel, window);
        const Configuration evolved = evolve_to(initial, stream, 40.0);

        EventStream mirrored = reflect_stream(EventStream(s, kernel, window));
        const Configuration hole_evolved = evolve_to(reflect_holes(initial), mirrored, 40.0);
        if (!(reflect_holes(evolved) == hole_evolved)) ++mismatches;
    }
    return InvariantCheck{"reflection-conjugacy", mismatches == 0,
                          "5 runs, " + std::to_string(mismatches) + " mismatches"};
}

InvariantCheck check_flux_identity(std::uint64_t seed, const std::vector<JumpKernel>& kernels) {
    const Window window{-40, 40, 0};
    const double boundaries[] = {-10.5, 0.0, 7.0};
    int failures = 0;
    int runs = 0;
    for (const JumpKernel& kernel : kernels) {
        for (std::uint64_t rep = 0; rep < 10; ++rep) {
            const std::uint64_t s = check_seed(seed, 4, rep);
            Configuration config = sample_initial_step(window, StepProfileParams{0.8, 0.3}, s);
            const Configuration initial = config;
            FluxCounter fluxes[] = {FluxCounter(boundaries[0]), FluxCounter(boundaries[1]),
                                    FluxCounter(boundaries[2])};
            EventObserver* observers[] = {&fluxes[0], &fluxes[1], &fluxes[2]};
            EventStream stream(s, kernel, window);
            config = evolve_to(std::move(config), stream, 60.0, observers);
            for (const FluxCounter& flux : fluxes) {
                ++runs;
                if (!flux_identity_check(initial, config, flux.count(), flux.boundary())) {
                    ++failures;
                }
            }
        }
    }
    return InvariantCheck{"flux-identity", failures == 0,
                          std::to_string(runs) + " boundary checks, " + std::to_string(failures) +
                              " failures"};
}

InvariantCheck check_flux_label_oracle(std::uint64_t seed, const JumpKernel& kernel) {
    const Window window{-15, 15, 0};
    const double boundaries[] = {-3.5, 0.0, 4.0};
    int failures = 0;
    int runs = 0;
    for (std::uint64_t rep = 0; rep < 5; ++rep) {
        const std::uint64_t s = check_seed(seed, 5, rep);
        Configuration config = sample_initial_step(window, StepProfileParams{0.6, 0.35}, s);
        LabelTracker labels(config);
        FluxCounter fluxes[] = {FluxCounter(boundaries[0]), FluxCounter(boundaries[1]),
                                FluxCounter(boundaries[2])};
        EventObserver* observers[] = {&labels, &fluxes[0], &fluxes[1], &fluxes[2]};
        EventStream stream(s, kernel, window);
        config = evolve_to(std::move(config), stream, 30.0, observers);
        for (std::size_t i = 0; i < 3; ++i) {
            ++runs;
            if (labels.label_flux(boundaries[i]) != fluxes[i].count()) ++failures;
        }
    }
    return InvariantCheck{"flux-label-oracle", failures == 0,
                          std::to_string(runs) + " comparisons, " + std::to_string(failures) +
                              " disagreements"};
}

InvariantCheck check_subadditivity(std::uint64_t seed, const JumpKernel& kernel) {
    const Window window{-100, 100, 0};
    const StepProfileParams params{0.8, 0.3};
    const int n_max = 20;
    int subadditivity_failures = 0;
    int bound_failures = 0;
    for (std::uint64_t rep = 0; rep < 200; ++rep) {
        const std::uint64_t s = check_seed(seed, 6, rep);
        const NestedFamily pair = burn_in_coupled(params, kernel, window, 5.0, s);
        const SubadditiveRecord record = subadditive_array(params, kernel, 1.0, n_max, s, pair);
        if (!record.subadditivity_holds()) ++subadditivity_failures;
        if (record.at(0, 1) > record.first_epoch_crossings) ++bound_failures;
    }
    const bool passed = subadditivity_failures == 0 && bound_failures == 0;
    return InvariantCheck{"pathwise-subadditivity", passed,
                          "200 seeds, n_max 20: " + std::to_string(subadditivity_failures) +
                              " triangle violations, " + std::to_string(bound_failures) +
                              " crossing-bound violations"};
}

}  // namespace

std::vector<InvariantCheck> run_invariant_suite(std::uint64_t seed) {
    const JumpKernel drift_kernel =
        JumpKernel::from_entries({{1, 2.0 / 3.0}, {-1, 1.0 / 3.0}});
    const JumpKernel spread_kernel = JumpKernel::from_entries({{2, 0.5}, {-1, 0.5}});

    std::vector<InvariantCheck> checks;
    checks.push_back(check_attractiveness(seed, drift_kernel));
    checks.push_back(check_marginal_consistency(seed, drift_kernel));
    checks.push_back(check_reflection_conjugacy(seed, spread_kernel));
    checks.push_back(check_flux_identity(seed, {drift_kernel, spread_kernel}));
    checks.push_back(check_flux_label_oracle(seed, spread_kernel));
    checks.push_back(check_subadditivity(seed, drift_kernel));
    return checks;
}

}  // namespace exclusion

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "exclusion/observables.hpp"
#include "exclusion/rng.hpp"

using namespace exclusion;

namespace {

const JumpKernel kTasep = JumpKernel::parse("1:1");
const JumpKernel kBiased = JumpKernel::parse("1:2/3,-1:1/3");
const JumpKernel kSpread = JumpKernel::parse("2:0.5,-1:0.5");

// Definition-literal computation of the array: for every restart epoch,
// replay the pair to that epoch with its own stream, re-split there, and
// evolve the restarted pair through a shifted stream. Independent of the
// incremental single-pass path used by subadditive_array.
SubadditiveRecord oracle_subadditive(const StepProfileParams& params, const JumpKernel& kernel,
                                     double speed, int n_max, std::uint64_t seed,
                                     const NestedFamily& initial) {
    SubadditiveRecord record(speed, n_max);
    const Window& w = initial.window();
    for (int m = 0; m < n_max; ++m) {
        Configuration lower = initial.level(0);
        Configuration upper = initial.level(1);
        {
            EventStream replay(seed, kernel, w);
            std::vector<Configuration*> pair{&lower, &upper};
            evolve_marginals(pair, replay, static_cast<double>(m) / speed);
        }
        Configuration restarted = lower;
        for (std::int64_t x = w.lo; x <= std::min<std::int64_t>(w.hi, m); ++x) {
            if (upper.occupied(x)) restarted.set(x, true);
        }
        EventStream tail = shift_stream(EventStream(seed, kernel, w),
                                        static_cast<double>(m) / speed);
        std::vector<Configuration*> marginals{&lower, &restarted};
        for (int n = m + 1; n <= n_max; ++n) {
            evolve_marginals(marginals, tail, static_cast<double>(n) / speed);
            const double a = static_cast<double>(n + 1);
            const double b = static_cast<double>(w.hi);
            record.set(m, n, restarted.count_interval(a, b) - lower.count_interval(a, b));
        }
    }
    (void)params;
    return record;
}

}  // namespace

TEST_CASE("flux counter counts signed crossings of applied moves") {
    FluxCounter flux(0.0);
    flux.on_event(Event{0.1, 0, 1}, 1, 1);
    CHECK(flux.count() == 1);
    flux.on_event(Event{0.2, 1, -2}, -1, 1);
    CHECK(flux.count() == 0);
    // Blocked events change nothing even when they would cross.
    flux.on_event(Event{0.3, 0, 1}, 1, 0);
    CHECK(flux.count() == 0);
    // Moves on one side of the boundary change nothing.
    flux.on_event(Event{0.4, 2, 1}, 3, 1);
    CHECK(flux.count() == 0);
}

TEST_CASE("flux identity on trivial runs") {
    const Window window{-5, 5, 0};
    Configuration config(window);
    CHECK(flux_identity_check(config, config, 0, 0.0));
    Configuration moved = config;
    moved.set(-5, true);
    Configuration after = moved;
    after.set(-5, false);
    after.set(1, true);
    CHECK(flux_identity_check(moved, after, 1, 0.0));
    CHECK_FALSE(flux_identity_check(moved, after, 0, 0.0));
}

TEST_CASE("flux identity holds on every randomized run") {
    const Window window{-50, 50, 0};
    const double boundaries[] = {-7.5, 0.0, 12.0};
    for (std::uint64_t seed = 700; seed < 710; ++seed) {
        for (const JumpKernel& kernel : {kBiased, kSpread}) {
            Configuration config = sample_initial_step(window, {0.7, 0.3}, seed);
            const Configuration initial = config;
            FluxCounter fluxes[] = {FluxCounter(boundaries[0]), FluxCounter(boundaries[1]),
                                    FluxCounter(boundaries[2])};
            EventObserver* observers[] = {&fluxes[0], &fluxes[1], &fluxes[2]};
            EventStream stream(seed, kernel, window);
            config = evolve_to(std::move(config), stream, 100.0, observers);
            for (const FluxCounter& flux : fluxes) {
                REQUIRE(flux_identity_check(initial, config, flux.count(), flux.boundary()));
            }
        }
    }
}

TEST_CASE("reflection maps fluxes exactly") {
    // A particle crossing of a half-integer boundary r is a hole crossing
    // the other way; in the reflected run it is a particle crossing of -r.
    const Window window{-20, 20, 0};
    const double r = 3.5;
    for (std::uint64_t seed = 800; seed < 805; ++seed) {
        const Configuration initial = sample_initial_step(window, {0.8, 0.4}, seed);
        FluxCounter flux(r);
        EventObserver* observers[] = {&flux};
        EventStream stream(seed, kSpread, window);
        evolve_to(initial, stream, 30.0, observers);

        FluxCounter mirrored_flux(-r);
        EventObserver* mirrored_observers[] = {&mirrored_flux};
        EventStream mirrored = reflect_stream(EventStream(seed, kSpread, window));
        evolve_to(reflect_holes(initial), mirrored, 30.0, mirrored_observers);

        // Hole moves are the reversed particle moves, so the reflected run's
        // hole flux at -r is exactly -flux; its particle flux equals +flux.
        CHECK(mirrored_flux.count() == flux.count());
    }
}

TEST_CASE("subadditive record basics") {
    SubadditiveRecord record(1.0, 5);
    for (int m = 0; m <= 5; ++m) CHECK(record.at(m, m) == 0);
    CHECK_THROWS_AS(record.at(3, 2), std::out_of_range);
    CHECK_THROWS_AS(SubadditiveRecord(0.0, 5), std::invalid_argument);
}

TEST_CASE("single-pass array equals the restart-replay oracle") {
    const Window window{-40, 40, 0};
    const int n_max = 6;
    for (std::uint64_t seed = 900; seed < 906; ++seed) {
        for (const JumpKernel& kernel : {kBiased, kTasep}) {
            const StepProfileParams params{0.8, 0.3};
            const NestedFamily pair = burn_in_coupled(params, kernel, window, 3.0, seed);
            const SubadditiveRecord fast =
                subadditive_array(params, kernel, 1.0, n_max, seed, pair);
            const SubadditiveRecord slow =
                oracle_subadditive(params, kernel, 1.0, n_max, seed, pair);
            for (int m = 0; m <= n_max; ++m) {
                for (int n = m; n <= n_max; ++n) {
                    REQUIRE(fast.at(m, n) == slow.at(m, n));
                }
            }
        }
    }
}

TEST_CASE("pathwise subadditivity and the crossing bound") {
    const Window window{-60, 60, 0};
    const StepProfileParams params{0.9, 0.2};
    for (std::uint64_t seed = 1000; seed < 1020; ++seed) {
        const NestedFamily pair = burn_in_coupled(params, kBiased, window, 4.0, seed);
        const SubadditiveRecord record = subadditive_array(params, kBiased, 1.0, 12, seed, pair);
        CHECK(record.subadditivity_holds());
        CHECK(record.at(0, 1) <= record.first_epoch_crossings);
    }
}

TEST_CASE("equal densities produce an identically zero array") {
    const Window window{-40, 40, 0};
    const StepProfileParams params{0.5, 0.5};
    const NestedFamily pair = burn_in_coupled(params, kBiased, window, 5.0, 42);
    const SubadditiveRecord record = subadditive_array(params, kBiased, 1.0, 8, 42, pair);
    for (int m = 0; m <= 8; ++m) {
        for (int n = m; n <= 8; ++n) CHECK(record.at(m, n) == 0);
    }
    CHECK(estimate_subadditive_limit(record).value == 0.0);
}

TEST_CASE("subadditive window floor is enforced") {
    const Window tiny{-10, 10, 0};
    const StepProfileParams params{0.8, 0.3};
    const NestedFamily pair = burn_in_coupled(params, kBiased, tiny, 1.0, 3);
    CHECK_THROWS_AS(subadditive_array(params, kBiased, 0.25, 10, 3, pair),
                    std::invalid_argument);
}

TEST_CASE("rarefaction limit estimate lands near the closed form") {
    // Coarse smoke check; the acceptance suite pins this at n_max = 100.
    const Window window{-100, 100, 0};
    const StepProfileParams params{1.0, 0.0};
    double estimate = 0.0;
    const int replicas = 5;
    for (int rep = 0; rep < replicas; ++rep) {
        const std::uint64_t seed = replica_seed(2024, static_cast<std::uint64_t>(rep));
        const NestedFamily pair = burn_in_coupled(params, kTasep, window, 0.0, seed);
        const SubadditiveRecord record = subadditive_array(params, kTasep, 0.5, 24, seed, pair);
        estimate += 0.5 * estimate_subadditive_limit(record).value / replicas;
    }
    // Second-class mass beyond speed 0.5 is 1/16 in the limit.
    CHECK(estimate > 0.01);
    CHECK(estimate < 0.13);
}

TEST_CASE("empirical density") {
    const Window window{-10, 110, 5};
    Configuration empty(window);
    CHECK(empirical_density(empty, 0.0, 1.0, 100.0) == 0.0);

    const Configuration full = sample_initial_step(window, {1.0, 1.0}, 2);
    CHECK(empirical_density(full, 0.0, 1.0, 100.0) == doctest::Approx(101.0 / 100.0));
    CHECK_THROWS_AS(empirical_density(full, -0.2, 1.0, 100.0), std::invalid_argument);
}

TEST_CASE("lln error is centered for constant profiles") {
    const StepProfileParams params{0.5, 0.5};
    const double t = 200.0;
    const double u = -0.5, v = 0.5;
    const int replicas = 20;
    double total_error = 0.0;
    for (int rep = 0; rep < replicas; ++rep) {
        const std::uint64_t seed = replica_seed(31415, static_cast<std::uint64_t>(rep));
        const Window window{-400, 400, 100};
        Configuration config = sample_initial_step(window, params, seed);
        EventStream stream(seed, kBiased, window);
        config = evolve_to(std::move(config), stream, t);
        total_error += lln_error(config, u, v, t, kBiased, params);
    }
    const double sites = (v - u) * t + 1.0;
    const double sigma = std::sqrt(sites * 0.25) / t / std::sqrt(static_cast<double>(replicas));
    const double endpoint_bias = 0.5 * (sites / t - (v - u));
    CHECK(std::abs(total_error / replicas) <= 3.0 * sigma + endpoint_bias);
}

TEST_CASE("bernoulli marginal test behaviour") {
    const Window window{-60, 60, 10};
    const double density = 0.5;

    SUBCASE("fresh product samples pass") {
        std::vector<Configuration> configs;
        for (int rep = 0; rep < 30; ++rep) {
            configs.push_back(sample_initial_step(window, {density, density},
                                                  replica_seed(99, static_cast<std::uint64_t>(rep))));
        }
        const MarginalTestReport report = bernoulli_marginal_test(configs, -50, 50, density);
        CHECK(report.mean_ok);
        CHECK(report.covariance_ok);
        CHECK(report.passed());
    }
    SUBCASE("an evolved invariant measure passes") {
        // The closed boundary perturbs the law within ~(M+3)*t sites, so
        // the observation region needs the full buffer in front of it.
        const Window buffered{-500, 500, 450};
        std::vector<Configuration> configs;
        for (int rep = 0; rep < 30; ++rep) {
            const std::uint64_t seed = replica_seed(137, static_cast<std::uint64_t>(rep));
            Configuration config = sample_initial_step(buffered, {density, density}, seed);
            EventStream stream(seed, kBiased, buffered);
            configs.push_back(evolve_to(std::move(config), stream, 100.0));
        }
        CHECK(bernoulli_marginal_test(configs, -50, 50, density).passed());
    }
    SUBCASE("a deterministic alternating configuration fails the covariance gate") {
        std::vector<Configuration> configs;
        for (int rep = 0; rep < 30; ++rep) {
            Configuration config(window);
            for (std::int64_t x = window.lo; x <= window.hi; ++x) {
                config.set(x, ((x + 60) % 2) == 0);
            }
            configs.push_back(std::move(config));
        }
        const MarginalTestReport report = bernoulli_marginal_test(configs, -50, 50, density);
        CHECK(report.mean_ok);
        CHECK_FALSE(report.covariance_ok);
        CHECK_FALSE(report.passed());
    }
}

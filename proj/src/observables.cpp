#include "exclusion/observables.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace exclusion {

FluxCounter::FluxCounter(double boundary, std::size_t config_index)
    : boundary_(boundary), mask_bit_(std::uint64_t{1} << (config_index < 63 ? config_index : 63)) {
    if (config_index >= 63) {
        throw std::invalid_argument("flux counter: configuration index must be below 63");
    }
}

void FluxCounter::on_event(const Event& event, std::int64_t target, std::uint64_t applied_mask) {
    if (!(applied_mask & mask_bit_)) return;
    const double a = static_cast<double>(event.site);
    const double b = static_cast<double>(target);
    if (a <= boundary_ && boundary_ < b) {
        ++count_;
    } else if (b <= boundary_ && boundary_ < a) {
        --count_;
    }
}

bool flux_identity_check(const Configuration& initial, const Configuration& final_config,
                         std::int64_t flux_count, double boundary) {
    const Window& w = initial.window();
    const double lo = std::max(boundary, static_cast<double>(w.lo) - 1.0);
    std::int64_t gain = 0;
    const std::int64_t first = static_cast<std::int64_t>(std::floor(lo)) + 1;
    for (std::int64_t x = first; x <= w.hi; ++x) {
        if (static_cast<double>(x) <= boundary) continue;
        gain += (final_config.occupied(x) ? 1 : 0) - (initial.occupied(x) ? 1 : 0);
    }
    return gain == flux_count;
}

SubadditiveRecord::SubadditiveRecord(double speed, int n_max) : speed_(speed), n_max_(n_max) {
    if (!(speed > 0.0)) throw std::invalid_argument("subadditive record: requires speed > 0");
    if (n_max < 1) throw std::invalid_argument("subadditive record: requires n_max >= 1");
    entries_.assign(static_cast<std::size_t>(n_max + 1) * static_cast<std::size_t>(n_max + 1), 0);
}

std::int64_t SubadditiveRecord::at(int m, int n) const {
    if (m < 0 || n < m || n > n_max_) {
        throw std::out_of_range("subadditive record: index outside triangle");
    }
    return entries_[static_cast<std::size_t>(m) * static_cast<std::size_t>(n_max_ + 1) +
                    static_cast<std::size_t>(n)];
}

void SubadditiveRecord::set(int m, int n, std::int64_t value) {
    entries_[static_cast<std::size_t>(m) * static_cast<std::size_t>(n_max_ + 1) +
             static_cast<std::size_t>(n)] = value;
}

bool SubadditiveRecord::subadditivity_holds() const {
    for (int m = 0; m <= n_max_; ++m) {
        for (int n = m; n <= n_max_; ++n) {
            if (at(0, n) > at(0, m) + at(m, n)) return false;
        }
    }
    return true;
}

namespace {

// Particles of `upper` minus `lower` strictly right of site n.
std::int64_t excess_right_of(const Configuration& upper, const Configuration& lower,
                             std::int64_t n) {
    const std::int64_t hi = upper.window().hi;
    if (n >= hi) return 0;
    const double a = static_cast<double>(n + 1);
    const double b = static_cast<double>(hi);
    return upper.count_interval(a, b) - lower.count_interval(a, b);
}

}  // namespace

SubadditiveRecord subadditive_array(const StepProfileParams& params, const JumpKernel& kernel,
                                    double speed, int n_max, std::uint64_t seed,
                                    const NestedFamily& initial) {
    params.validate();
    if (initial.level_count() != 2) {
        throw std::invalid_argument("subadditive_array: initial family must be a coupled pair");
    }
    SubadditiveRecord record(speed, n_max);
    const Window& window = initial.window();
    const double horizon = static_cast<double>(n_max) / speed;
    // Hard floor on the window: the mean information reach over the horizon
    // must fit on both sides. Fluctuation margins beyond the mean are the
    // caller's buffer policy, checked dynamically at experiment scale.
    const std::int64_t reach =
        static_cast<std::int64_t>(std::ceil(kernel.first_moment() * horizon));
    if (window.hi < n_max + reach || window.lo > -reach) {
        throw std::invalid_argument("subadditive_array: window too small for horizon");
    }

    // First class and the union of all classes; restarted second-class
    // fields live as extra marginals of the same shared-event evolution.
    Configuration first_class = initial.level(0);
    Configuration all_classes = initial.level(1);
    std::vector<Configuration> restarted;
    restarted.reserve(static_cast<std::size_t>(n_max));
    restarted.push_back(splice_at_origin(first_class, all_classes));

    EventStream stream(seed, kernel, window);
    CrossingCounter origin_crossings(0.0, /*applied_only=*/true);

    for (int n = 1; n <= n_max; ++n) {
        std::vector<Configuration*> marginals;
        marginals.reserve(restarted.size() + 2);
        marginals.push_back(&first_class);
        marginals.push_back(&all_classes);
        for (Configuration& config : restarted) marginals.push_back(&config);

        EventObserver* observers[] = {&origin_crossings};
        const std::span<EventObserver* const> observer_span =
            n == 1 ? std::span<EventObserver* const>(observers) : std::span<EventObserver* const>();
        evolve_marginals(marginals, stream, static_cast<double>(n) / speed, observer_span);
        if (n == 1) record.first_epoch_crossings = origin_crossings.count();

        for (int m = 0; m < n; ++m) {
            record.set(m, n, excess_right_of(restarted[static_cast<std::size_t>(m)], first_class, n));
        }
        if (n < n_max) {
            // Restart the class structure at epoch n: the new second-class
            // field is read off the four-level view re-split at site n.
            const Configuration& base_plus_second = restarted[0];
            NestedFamily four(std::vector<Configuration>{first_class, base_plus_second,
                                                         base_plus_second, all_classes});
            restarted.push_back(resplit_at(four, n).level(1));
        }
    }
    return record;
}

SubadditiveLimit estimate_subadditive_limit(const SubadditiveRecord& record) {
    const int n_max = record.n_max();
    if (n_max < 2) {
        throw std::invalid_argument("estimate_subadditive_limit: requires n_max >= 2");
    }
    const double value = static_cast<double>(record.at(0, n_max)) / n_max;

    // Least-squares slope of X(0,n)/n over the trailing half of the indices.
    const int start = n_max / 2;
    double sum_x = 0.0, sum_y = 0.0, sum_xx = 0.0, sum_xy = 0.0;
    int count = 0;
    for (int n = start; n <= n_max; ++n) {
        const double x = static_cast<double>(n);
        const double y = static_cast<double>(record.at(0, n)) / x;
        sum_x += x;
        sum_y += y;
        sum_xx += x * x;
        sum_xy += x * y;
        ++count;
    }
    const double denom = count * sum_xx - sum_x * sum_x;
    const double slope = denom != 0.0 ? (count * sum_xy - sum_x * sum_y) / denom : 0.0;
    return SubadditiveLimit{value, slope};
}

double empirical_density(const Configuration& config, double u, double v, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("empirical_density: requires t > 0");
    if (!(u < v)) throw std::invalid_argument("empirical_density: requires u < v");
    const Window& w = config.window();
    const double lo = u * t;
    const double hi = v * t;
    if (lo < static_cast<double>(w.safe_lo()) || hi > static_cast<double>(w.safe_hi())) {
        throw std::invalid_argument("empirical_density: interval outside the safe region");
    }
    return static_cast<double>(config.count_interval(lo, hi)) / t;
}

double lln_error(const Configuration& config, double u, double v, double t,
                 const JumpKernel& kernel, const StepProfileParams& params) {
    return empirical_density(config, u, v, t) - integrated_profile(u, v, kernel, params);
}

MarginalTestReport bernoulli_marginal_test(const std::vector<Configuration>& configs,
                                           std::int64_t region_lo, std::int64_t region_hi,
                                           double density) {
    if (configs.empty()) {
        throw std::invalid_argument("bernoulli_marginal_test: needs at least one replica");
    }
    if (region_lo >= region_hi) {
        throw std::invalid_argument("bernoulli_marginal_test: empty region");
    }
    for (const Configuration& config : configs) {
        const Window& w = config.window();
        if (region_lo < w.safe_lo() || region_hi > w.safe_hi()) {
            throw std::invalid_argument("bernoulli_marginal_test: region outside the safe region");
        }
    }

    MarginalTestReport report;
    report.sites = region_hi - region_lo + 1;
    report.replicas = static_cast<std::int64_t>(configs.size());

    double occupied_total = 0.0;
    double covariance_total = 0.0;
    for (std::int64_t x = region_lo; x <= region_hi; ++x) {
        std::int64_t site_occupied = 0;
        for (const Configuration& config : configs) {
            const bool here = config.occupied(x);
            site_occupied += here ? 1 : 0;
            if (x < region_hi) {
                covariance_total += (static_cast<double>(here) - density) *
                                    (static_cast<double>(config.occupied(x + 1)) - density);
            }
        }
        occupied_total += static_cast<double>(site_occupied);
        const double site_mean =
            static_cast<double>(site_occupied) / static_cast<double>(configs.size());
        report.max_site_deviation = std::max(report.max_site_deviation,
                                             std::abs(site_mean - density));
    }

    const double samples = static_cast<double>(report.sites) * static_cast<double>(report.replicas);
    const double pairs = static_cast<double>(report.sites - 1) * static_cast<double>(report.replicas);
    const double variance = density * (1.0 - density);
    report.mean = occupied_total / samples;
    report.mean_band = 3.0 * std::sqrt(variance / samples);
    report.pair_covariance = covariance_total / pairs;
    report.covariance_band = 3.0 * variance / std::sqrt(pairs);
    report.mean_ok = std::abs(report.mean - density) <= report.mean_band;
    report.covariance_ok = std::abs(report.pair_covariance) <= report.covariance_band;
    return report;
}

}  // namespace exclusion

#pragma once

#include <cstdint>
#include <vector>

#include "exclusion/coupling.hpp"
#include "exclusion/engine.hpp"

namespace exclusion {

// Net signed particle current across position `boundary`: +1 when an
// applied move of the tracked configuration jumps from source <= boundary
// to target > boundary, -1 for the reverse; blocked and suppressed events
// change nothing. Tracks configuration `config_index` of the evolving set.
class FluxCounter final : public EventObserver {
public:
    explicit FluxCounter(double boundary, std::size_t config_index = 0);

    void on_event(const Event& event, std::int64_t target, std::uint64_t applied_mask) override;

    double boundary() const { return boundary_; }
    std::int64_t count() const { return count_; }

private:
    double boundary_;
    std::uint64_t mask_bit_;
    std::int64_t count_ = 0;
};

// Conservation form of the flux: the crossing count must equal the net
// particle gain strictly right of the boundary.
bool flux_identity_check(const Configuration& initial, const Configuration& final_config,
                         std::int64_t flux_count, double boundary);

// Upper-triangular array X(m, n) of second-class particle counts beyond
// site n at time n/speed, for the class process restarted at each epoch
// m/speed. X(m, m) = 0 and X(0,n) <= X(0,m) + X(m,n) holds pathwise.
class SubadditiveRecord {
public:
    SubadditiveRecord(double speed, int n_max);

    double speed() const { return speed_; }
    int n_max() const { return n_max_; }

    std::int64_t at(int m, int n) const;
    void set(int m, int n, std::int64_t value);

    // Applied events crossing the origin during the first epoch [0, 1/speed];
    // X(0,1) is bounded by it pathwise.
    std::int64_t first_epoch_crossings = 0;

    // True iff X(0,n) <= X(0,m) + X(m,n) for every 0 <= m <= n <= n_max.
    bool subadditivity_holds() const;

private:
    double speed_;
    int n_max_;
    std::vector<std::int64_t> entries_;
};

// Computes one trajectory's full array for 0 <= m <= n <= n_max. The
// four-class process starts from the coupled pair `initial` (lower level =
// first class; second class = excess particles at sites <= 0; fourth class
// = excess at sites > 0) and evolves under the stream keyed by `seed`. At
// every epoch m/speed the class structure is re-split at site m via
// resplit_at, and the restarted second-class field is carried forward as
// one more marginal of the shared-event evolution, so the whole array costs
// a single pass over the event stream.
// Throws if the window is too small for the horizon n_max/speed.
SubadditiveRecord subadditive_array(const StepProfileParams& params, const JumpKernel& kernel,
                                    double speed, int n_max, std::uint64_t seed,
                                    const NestedFamily& initial);

// X(0, n_max)/n_max together with the least-squares slope of X(0,n)/n over
// the trailing half of the indices (a convergence diagnostic, reported but
// never asserted). The per-index value times `speed` estimates the
// per-unit-time limit of the second-class count beyond the moving front.
struct SubadditiveLimit {
    double value;
    double slope;
};

SubadditiveLimit estimate_subadditive_limit(const SubadditiveRecord& record);

// (particles in [u*t, v*t] at time t) / t. The interval must lie inside the
// window's safe region.
double empirical_density(const Configuration& config, double u, double v, double t);

// Signed deviation of the empirical density from the closed-form prediction.
double lln_error(const Configuration& config, double u, double v, double t,
                 const JumpKernel& kernel, const StepProfileParams& params);

// Product-marginal test over a site range: the grand occupancy mean must sit
// within 3 sigma binomial bands of `density`, and the average adjacent-pair
// covariance (centered at the true density) within 3 sigma of its null
// spread. Per-site deviations are reported but not gated.
struct MarginalTestReport {
    std::int64_t sites = 0;
    std::int64_t replicas = 0;
    double mean = 0.0;
    double mean_band = 0.0;
    double max_site_deviation = 0.0;
    double pair_covariance = 0.0;
    double covariance_band = 0.0;
    bool mean_ok = false;
    bool covariance_ok = false;
    bool passed() const { return mean_ok && covariance_ok; }
};

MarginalTestReport bernoulli_marginal_test(const std::vector<Configuration>& configs,
                                           std::int64_t region_lo, std::int64_t region_hi,
                                           double density);

}  // namespace exclusion

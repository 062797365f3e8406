#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "exclusion/kernel_profile.hpp"
#include "exclusion/lattice.hpp"
#include "exclusion/rng.hpp"

namespace exclusion {

// One clock ring: at `time`, the particle at `site` (if any) attempts to
// jump by `displacement`.
struct Event {
    double time;
    std::int64_t site;
    std::int64_t displacement;

    std::int64_t target() const { return site + displacement; }
};

// Deterministic source of Poisson-clock events for every site of a window.
// The k-th event of site x is a pure function of (seed, x, k): each site
// carries a rate-1 exponential clock whose waiting times and displacement
// draws come from the keyed counter generator. Events are delivered in
// global time order, ties broken towards the smaller site.
class EventStream {
public:
    EventStream(std::uint64_t seed, JumpKernel kernel, Window window,
                RngDomain domain = RngDomain::kDynamics);

    const Window& window() const { return window_; }
    const JumpKernel& kernel() const { return kernel_; }
    std::uint64_t seed() const { return seed_; }
    bool is_reflected() const { return reflected_; }

    // Latest time the stream has been driven or skipped to.
    double now() const { return now_; }

    // Time of the earliest pending event.
    double peek_time() const { return heap_[0].time; }

    // Delivers the earliest pending event and schedules that site's next one.
    Event next_event();

    // Drops, without delivering, every event with time <= s. Afterwards the
    // stream delivers exactly the events with time > s, times unshifted.
    void skip_until(double s);

    // View of the same randomness driving the reflected hole process: each
    // particle event (t, x, z) is delivered as (t, -(x+z), z). Requires a
    // window symmetric about the origin. Reflecting twice restores the
    // original delivery order.
    EventStream reflected() const;

private:
    struct Pending {
        double time;
        std::uint32_t slot;
    };

    void advance_top();
    void sift_down(std::size_t pos);
    std::int64_t site_of(std::uint32_t slot) const { return window_.lo + slot; }

    std::uint64_t seed_;
    JumpKernel kernel_;
    Window window_;
    RngDomain domain_;
    bool reflected_ = false;
    double now_ = 0.0;
    std::vector<Pending> heap_;             // one entry per site
    std::vector<std::uint64_t> next_index_; // per slot: index of pending event
    std::vector<std::int32_t> pending_disp_;
};

// Copy of `stream` that will deliver exactly the events with time > s.
EventStream shift_stream(const EventStream& stream, double s);

// Gets told about every delivered event. `applied_mask` has bit j set when
// configuration j of the evolving set moved a particle (configurations past
// bit 62 are folded into bit 63). Blocked and out-of-window events arrive
// with mask zero.
class EventObserver {
public:
    virtual ~EventObserver() = default;
    virtual void on_event(const Event& event, std::int64_t target,
                          std::uint64_t applied_mask) = 0;
};

// Initial occupancies of the two-sided product profile: site x is occupied
// iff U_x <= lambda (x <= 0) or U_x <= rho (x > 0) with U_x keyed by
// (seed, x), so extending the window preserves existing sites and equal
// seeds share the same uniforms across density choices.
Configuration sample_initial_step(const Window& window, const StepProfileParams& params,
                                  std::uint64_t seed);

// Exclusion move: if `event.site` holds a particle and the target site is
// inside the window and empty, the particle moves; otherwise nothing
// changes (jumps leaving the window are suppressed).
Configuration apply_event(Configuration config, const Event& event);

// Drives every pending event with time <= t into the given configurations,
// which must all live on the stream's window. Every delivered event is
// applied to each configuration independently (shared randomness) and then
// reported to the observers.
void evolve_marginals(std::span<Configuration*> configs, EventStream& stream, double t,
                      std::span<EventObserver* const> observers = {});

// Single-configuration evolution; the result is a pure function of
// (config, stream seed, t).
Configuration evolve_to(Configuration config, EventStream& stream, double t,
                        std::span<EventObserver* const> observers = {});

// Counts delivered events whose jump crosses `boundary`: source <= boundary
// < target or target <= boundary < source. `applied` restricts to events
// that moved a particle in at least one configuration.
class CrossingCounter final : public EventObserver {
public:
    explicit CrossingCounter(double boundary, bool applied_only = false)
        : boundary_(boundary), applied_only_(applied_only) {}
    void on_event(const Event& event, std::int64_t target, std::uint64_t applied_mask) override;
    std::int64_t count() const { return count_; }

private:
    double boundary_;
    bool applied_only_;
    std::int64_t count_ = 0;
};

// Records delivered events for small-run debugging; rows are
// (time, site, displacement, applied).
class EventLog final : public EventObserver {
public:
    struct Row {
        Event event;
        bool applied;
    };
    void on_event(const Event& event, std::int64_t /*target*/, std::uint64_t applied_mask) override {
        rows_.push_back(Row{event, applied_mask != 0});
    }
    const std::vector<Row>& rows() const { return rows_; }

private:
    std::vector<Row> rows_;
};

// CSV dumps named in the engine interface: `site,occupied` snapshots and
// `time,site,displacement,applied` event logs.
void write_snapshot_csv(const Configuration& config, const std::string& path);
void write_event_log_csv(const EventLog& log, const std::string& path);

}  // namespace exclusion

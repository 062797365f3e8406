#include "exclusion/engine.hpp"

#include <fstream>
#include <stdexcept>
#include <utility>

namespace exclusion {

EventStream::EventStream(std::uint64_t seed, JumpKernel kernel, Window window, RngDomain domain)
    : seed_(seed), kernel_(std::move(kernel)), window_(window), domain_(domain) {
    window_.validate();
    const std::size_t n = static_cast<std::size_t>(window_.size());
    heap_.resize(n);
    next_index_.assign(n, 0);
    pending_disp_.assign(n, 0);
    for (std::size_t slot = 0; slot < n; ++slot) {
        const auto [gap_u, disp_u] =
            keyed_uniform_pair(seed_, site_of(static_cast<std::uint32_t>(slot)), 0, domain_);
        heap_[slot] = Pending{exponential_from_uniform(gap_u), static_cast<std::uint32_t>(slot)};
        pending_disp_[slot] =
            static_cast<std::int32_t>(kernel_.sample_displacement(disp_u));
    }
    // Bottom-up heapify over (time, slot).
    for (std::size_t i = n / 2; i-- > 0;) {
        sift_down(i);
    }
}

void EventStream::sift_down(std::size_t pos) {
    const std::size_t n = heap_.size();
    Pending item = heap_[pos];
    while (true) {
        std::size_t child = 2 * pos + 1;
        if (child >= n) break;
        const std::size_t right = child + 1;
        if (right < n && (heap_[right].time < heap_[child].time ||
                          (heap_[right].time == heap_[child].time &&
                           heap_[right].slot < heap_[child].slot))) {
            child = right;
        }
        if (heap_[child].time > item.time ||
            (heap_[child].time == item.time && heap_[child].slot >= item.slot)) {
            break;
        }
        heap_[pos] = heap_[child];
        pos = child;
    }
    heap_[pos] = item;
}

// Replaces the heap top with that site's next event and restores heap order.
void EventStream::advance_top() {
    const std::uint32_t slot = heap_[0].slot;
    const std::uint64_t k = ++next_index_[slot];
    const auto [gap_u, disp_u] = keyed_uniform_pair(seed_, site_of(slot), k, domain_);
    heap_[0].time += exponential_from_uniform(gap_u);
    pending_disp_[slot] = static_cast<std::int32_t>(kernel_.sample_displacement(disp_u));
    sift_down(0);
}

Event EventStream::next_event() {
    const Pending top = heap_[0];
    const std::int64_t site = site_of(top.slot);
    Event event{top.time, site, pending_disp_[top.slot]};
    now_ = top.time;
    advance_top();
    if (reflected_) {
        event = Event{event.time, -(event.site + event.displacement), event.displacement};
    }
    return event;
}

void EventStream::skip_until(double s) {
    while (heap_[0].time <= s) {
        advance_top();
    }
    if (s > now_) now_ = s;
}

EventStream EventStream::reflected() const {
    if (!window_.symmetric()) {
        throw std::invalid_argument("reflected stream: window must be symmetric about 0");
    }
    EventStream copy = *this;
    copy.reflected_ = !copy.reflected_;
    return copy;
}

EventStream shift_stream(const EventStream& stream, double s) {
    if (s < 0.0) {
        throw std::invalid_argument("shift_stream: requires s >= 0");
    }
    EventStream shifted = stream;
    shifted.skip_until(s);
    return shifted;
}

Configuration sample_initial_step(const Window& window, const StepProfileParams& params,
                                  std::uint64_t seed) {
    params.validate();
    Configuration config(window);
    for (std::int64_t x = window.lo; x <= window.hi; ++x) {
        const double u = keyed_uniform(seed, x, 0, RngDomain::kInitial);
        const double density = x <= 0 ? params.lambda : params.rho;
        if (u <= density) config.set(x, true);
    }
    return config;
}

namespace {

// The exclusion move on one configuration; true iff a particle moved.
inline bool apply_in_place(Configuration& config, std::int64_t site, std::int64_t target) {
    if (!config.occupied(site)) return false;
    if (!config.window().contains(target)) return false;  // suppressed at the boundary
    if (config.occupied(target)) return false;
    config.set(site, false);
    config.set(target, true);
    return true;
}

}  // namespace

Configuration apply_event(Configuration config, const Event& event) {
    if (!config.window().contains(event.site)) {
        throw std::invalid_argument("apply_event: event site outside window");
    }
    apply_in_place(config, event.site, event.target());
    return config;
}

void evolve_marginals(std::span<Configuration*> configs, EventStream& stream, double t,
                      std::span<EventObserver* const> observers) {
    if (t < stream.now()) {
        throw std::invalid_argument("evolve: target time precedes stream time");
    }
    const Window& window = stream.window();
    for (const Configuration* config : configs) {
        if (config->window().lo != window.lo || config->window().hi != window.hi) {
            throw std::invalid_argument("evolve: configuration window differs from stream window");
        }
    }
    while (stream.peek_time() <= t) {
        const Event event = stream.next_event();
        const std::int64_t target = event.target();
        std::uint64_t applied_mask = 0;
        if (window.contains(event.site)) {
            for (std::size_t j = 0; j < configs.size(); ++j) {
                if (apply_in_place(*configs[j], event.site, target)) {
                    applied_mask |= std::uint64_t{1} << (j < 63 ? j : 63);
                }
            }
        }
        for (EventObserver* observer : observers) {
            observer->on_event(event, target, applied_mask);
        }
    }
    stream.skip_until(t);
}

Configuration evolve_to(Configuration config, EventStream& stream, double t,
                        std::span<EventObserver* const> observers) {
    Configuration* configs[] = {&config};
    evolve_marginals(configs, stream, t, observers);
    return config;
}

void CrossingCounter::on_event(const Event& event, std::int64_t target,
                               std::uint64_t applied_mask) {
    if (applied_only_ && applied_mask == 0) return;
    const double a = static_cast<double>(event.site);
    const double b = static_cast<double>(target);
    if ((a <= boundary_ && boundary_ < b) || (b <= boundary_ && boundary_ < a)) {
        ++count_;
    }
}

void write_snapshot_csv(const Configuration& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "site,occupied\n";
    const Window& w = config.window();
    for (std::int64_t x = w.lo; x <= w.hi; ++x) {
        out << x << ',' << (config.occupied(x) ? 1 : 0) << '\n';
    }
}

void write_event_log_csv(const EventLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out.precision(17);
    out << "time,site,displacement,applied\n";
    for (const EventLog::Row& row : log.rows()) {
        out << row.event.time << ',' << row.event.site << ',' << row.event.displacement << ','
            << (row.applied ? 1 : 0) << '\n';
    }
}

}  // namespace exclusion

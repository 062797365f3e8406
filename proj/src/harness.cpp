#include "exclusion/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "exclusion/engine.hpp"
#include "exclusion/observables.hpp"
#include "exclusion/rng.hpp"

namespace exclusion {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt_double(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.17g", value);
    return buffer;
}

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = text.find_last_not_of(" \t\r\n");
    return text.substr(begin, end - begin + 1);
}

[[noreturn]] void parse_fail(int line, const std::string& message) {
    throw std::invalid_argument("spec line " + std::to_string(line) + ": " + message);
}

double parse_double(const std::string& text, int line, const std::string& key) {
    try {
        std::size_t used = 0;
        const double value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing");
        return value;
    } catch (const std::exception&) {
        parse_fail(line, "expected a number for '" + key + "', got '" + text + "'");
    }
}

long long parse_int(const std::string& text, int line, const std::string& key) {
    try {
        std::size_t used = 0;
        const long long value = std::stoll(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing");
        return value;
    } catch (const std::exception&) {
        parse_fail(line, "expected an integer for '" + key + "', got '" + text + "'");
    }
}

}  // namespace

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::kLln: return "lln";
        case ExperimentKind::kStationary: return "stationary";
        case ExperimentKind::kShock: return "shock";
        case ExperimentKind::kRarefaction: return "rarefaction";
        case ExperimentKind::kSubadditive: return "subadditive";
        case ExperimentKind::kInvariants: return "invariants";
    }
    return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
    if (name == "lln") return ExperimentKind::kLln;
    if (name == "stationary") return ExperimentKind::kStationary;
    if (name == "shock") return ExperimentKind::kShock;
    if (name == "rarefaction") return ExperimentKind::kRarefaction;
    if (name == "subadditive") return ExperimentKind::kSubadditive;
    if (name == "invariants") return ExperimentKind::kInvariants;
    throw std::invalid_argument("unknown experiment kind '" + name + "'");
}

std::int64_t ExperimentSpec::effective_buffer(double horizon) const {
    if (buffer_override) return *buffer_override;
    const double moment = kernel().first_moment();
    return static_cast<std::int64_t>(std::ceil((moment + 3.0) * horizon));
}

void ExperimentSpec::validate() const {
    kernel();  // throws on a malformed literal
    profile_params().validate();
    if (replicas < 1) throw std::invalid_argument("spec: requires replicas >= 1");
    if (kind == ExperimentKind::kInvariants) return;
    if (intervals.empty()) throw std::invalid_argument("spec: requires at least one interval");
    for (const auto& [u, v] : intervals) {
        if (!(u < v)) throw std::invalid_argument("spec: intervals need u < v");
    }
    if (kind == ExperimentKind::kSubadditive) {
        if (n_max < 2) throw std::invalid_argument("spec: requires n_max >= 2");
        for (const auto& [u, v] : intervals) {
            if (!(u > 0.0)) throw std::invalid_argument("spec: subadditive speeds must be positive");
        }
        if (t_burn && *t_burn < 0.0) throw std::invalid_argument("spec: requires t_burn >= 0");
        return;
    }
    if (!(t_final > 0.0)) throw std::invalid_argument("spec: requires t_final > 0");
    if (kind == ExperimentKind::kStationary && lambda != rho) {
        throw std::invalid_argument("spec: stationary experiments require lambda == rho");
    }
    if (buffer_override && *buffer_override < 1) {
        throw std::invalid_argument("spec: requires buffer >= 1");
    }
}

namespace {

ExperimentSpec parse_lines(const std::vector<std::pair<int, std::string>>& lines) {
    ExperimentSpec spec;
    bool seen_kind = false, seen_kernel = false, seen_lambda = false, seen_rho = false;
    for (const auto& [number, raw] : lines) {
        std::string content = raw;
        const auto hash = content.find('#');
        if (hash != std::string::npos) content = content.substr(0, hash);
        content = trim(content);
        if (content.empty()) continue;
        const auto eq = content.find('=');
        if (eq == std::string::npos) parse_fail(number, "expected 'key = value'");
        const std::string key = trim(content.substr(0, eq));
        const std::string value = trim(content.substr(eq + 1));
        if (value.empty()) parse_fail(number, "missing value for '" + key + "'");

        if (key == "kind") {
            try {
                spec.kind = experiment_kind_from_string(value);
            } catch (const std::exception& e) {
                parse_fail(number, e.what());
            }
            seen_kind = true;
        } else if (key == "kernel") {
            spec.kernel_literal = value;
            seen_kernel = true;
        } else if (key == "lambda") {
            spec.lambda = parse_double(value, number, key);
            seen_lambda = true;
        } else if (key == "rho") {
            spec.rho = parse_double(value, number, key);
            seen_rho = true;
        } else if (key == "t_final" || key == "time") {
            spec.t_final = parse_double(value, number, key);
        } else if (key == "interval") {
            std::istringstream pair_in(value);
            double u = 0.0, v = 0.0;
            if (!(pair_in >> u >> v) || !(pair_in >> std::ws).eof()) {
                parse_fail(number, "interval wants two numbers, got '" + value + "'");
            }
            spec.intervals.emplace_back(u, v);
        } else if (key == "replicas") {
            spec.replicas = static_cast<int>(parse_int(value, number, key));
        } else if (key == "seed") {
            spec.seed = static_cast<std::uint64_t>(parse_int(value, number, key));
        } else if (key == "buffer") {
            spec.buffer_override = parse_int(value, number, key);
        } else if (key == "t_burn") {
            spec.t_burn = parse_double(value, number, key);
        } else if (key == "n_max") {
            spec.n_max = static_cast<int>(parse_int(value, number, key));
        } else {
            parse_fail(number, "unknown key '" + key + "'");
        }
    }
    if (lines.empty()) throw std::invalid_argument("spec: empty document");
    const int last_line = lines.back().first;
    if (!seen_kind) parse_fail(last_line, "missing required key 'kind'");
    if (!seen_kernel) parse_fail(last_line, "missing required key 'kernel'");
    if (!seen_lambda) parse_fail(last_line, "missing required key 'lambda'");
    if (!seen_rho) parse_fail(last_line, "missing required key 'rho'");
    try {
        spec.validate();
    } catch (const std::exception& e) {
        parse_fail(last_line, e.what());
    }
    return spec;
}

std::vector<std::pair<int, std::string>> numbered_lines(const std::string& text) {
    std::vector<std::pair<int, std::string>> lines;
    std::istringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        lines.emplace_back(++number, line);
    }
    return lines;
}

}  // namespace

ExperimentSpec parse_spec(const std::string& text) {
    return parse_lines(numbered_lines(text));
}

std::vector<ExperimentSpec> parse_sweep(const std::string& text) {
    std::vector<ExperimentSpec> specs;
    std::vector<std::pair<int, std::string>> block;
    for (const auto& line : numbered_lines(text)) {
        if (trim(line.second).empty()) {
            if (!block.empty()) specs.push_back(parse_lines(block));
            block.clear();
        } else {
            block.push_back(line);
        }
    }
    if (!block.empty()) specs.push_back(parse_lines(block));
    if (specs.empty()) throw std::invalid_argument("sweep: no experiment blocks found");
    return specs;
}

int worker_budget() {
    if (const char* env = std::getenv("EXCLUSION_LAB_WORKERS")) {
        const int workers = std::atoi(env);
        if (workers >= 1) return workers;
    }
    const unsigned hardware = std::thread::hardware_concurrency();
    return hardware == 0 ? 1 : static_cast<int>(hardware);
}

namespace {

// Runs fn(0..count-1), possibly concurrently; results must be written into
// pre-sized slots so the schedule cannot affect anything observable.
template <typename F>
void parallel_replicas(int count, F&& fn) {
    const int workers = std::min(worker_budget(), count);
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            while (true) {
                const int index = next.fetch_add(1);
                if (index >= count) return;
                try {
                    fn(index);
                } catch (...) {
                    std::scoped_lock lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                }
            }
        });
    }
    for (std::thread& thread : pool) thread.join();
    if (first_error) std::rethrow_exception(first_error);
}

std::int64_t elapsed_ms(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 start)
        .count();
}

struct DensityReplicaResult {
    std::vector<ResultRow> rows;
    std::vector<std::uint8_t> observed_slice;  // for the stationary marginal test
    bool buffer_ok = true;
};

DensityReplicaResult run_density_replica(const ExperimentSpec& spec, const JumpKernel& kernel,
                                         const StepProfileParams& params, int replica) {
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t seed = replica_seed(spec.seed, static_cast<std::uint64_t>(replica));
    const double t = spec.t_final;

    double u_min = spec.intervals.front().first;
    double v_max = spec.intervals.front().second;
    for (const auto& [u, v] : spec.intervals) {
        u_min = std::min(u_min, u);
        v_max = std::max(v_max, v);
    }
    const std::int64_t obs_lo = static_cast<std::int64_t>(std::floor(u_min * t));
    const std::int64_t obs_hi = static_cast<std::int64_t>(std::ceil(v_max * t));
    const std::int64_t buffer = spec.effective_buffer(t);
    const std::int64_t check_buffer = (buffer + 1) / 2;

    const auto final_slice = [&](std::int64_t b) {
        const Window window{obs_lo - b, obs_hi + b, b};
        Configuration config = sample_initial_step(window, params, seed);
        EventStream stream(seed, kernel, window);
        config = evolve_to(std::move(config), stream, t);
        return config;
    };

    const Configuration data = final_slice(buffer);
    const Configuration check = final_slice(check_buffer);

    DensityReplicaResult result;
    result.buffer_ok = data.slice(obs_lo, obs_hi) == check.slice(obs_lo, obs_hi);
    const std::int64_t ms = elapsed_ms(start);
    if (!result.buffer_ok) {
        result.rows.push_back(ResultRow{seed, "diagnostic:buffer", 0.0, 0.0, t,
                                        std::nan(""), std::nan(""), std::nan(""), ms});
        return result;
    }
    for (const auto& [u, v] : spec.intervals) {
        const double empirical = empirical_density(data, u, v, t);
        const double predicted = integrated_profile(u, v, kernel, params);
        result.rows.push_back(ResultRow{seed, to_string(spec.kind), u, v, t, empirical, predicted,
                                        empirical - predicted, ms});
    }
    result.observed_slice = data.slice(obs_lo, obs_hi);
    return result;
}

struct SubadditiveReplicaResult {
    std::vector<ResultRow> rows;
};

SubadditiveReplicaResult run_subadditive_replica(const ExperimentSpec& spec,
                                                 const JumpKernel& kernel,
                                                 const StepProfileParams& params, int replica) {
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t seed = replica_seed(spec.seed, static_cast<std::uint64_t>(replica));

    double slowest = spec.intervals.front().first;
    for (const auto& [u, v] : spec.intervals) slowest = std::min(slowest, u);
    const double horizon = static_cast<double>(spec.n_max) / slowest;
    const std::int64_t buffer = spec.effective_buffer(horizon);
    const std::int64_t check_buffer = (buffer + 1) / 2;

    const Window window{-(spec.n_max + buffer), spec.n_max + buffer, buffer};
    const double t_burn = spec.t_burn ? *spec.t_burn : 10.0 * static_cast<double>(window.size());

    const auto record_for = [&](std::int64_t b, double speed) {
        const Window w{-(spec.n_max + b), spec.n_max + b, b};
        const NestedFamily pair = burn_in_coupled(params, kernel, w, t_burn, seed);
        return subadditive_array(params, kernel, speed, spec.n_max, seed, pair);
    };

    SubadditiveReplicaResult result;
    for (const auto& [u, v] : spec.intervals) {
        const SubadditiveRecord slow = record_for(buffer, u);
        const SubadditiveRecord fast = record_for(buffer, v);
        const SubadditiveRecord slow_check = record_for(check_buffer, u);
        const SubadditiveRecord fast_check = record_for(check_buffer, v);

        bool consistent = true;
        for (int m = 0; m <= spec.n_max && consistent; ++m) {
            for (int n = m; n <= spec.n_max; ++n) {
                if (slow.at(m, n) != slow_check.at(m, n) || fast.at(m, n) != fast_check.at(m, n)) {
                    consistent = false;
                    break;
                }
            }
        }
        const std::int64_t ms = elapsed_ms(start);
        if (!consistent) {
            result.rows.push_back(ResultRow{seed, "diagnostic:buffer", u, v, horizon,
                                            std::nan(""), std::nan(""), std::nan(""), ms});
            continue;
        }
        // Per-index limits scale to per-unit-time limits with the epoch rate.
        const double x_slow = u * estimate_subadditive_limit(slow).value;
        const double x_fast = v * estimate_subadditive_limit(fast).value;
        const double empirical = params.rho * (v - u) + x_slow - x_fast;
        const double predicted = integrated_profile(u, v, kernel, params);
        result.rows.push_back(ResultRow{seed, to_string(spec.kind), u, v,
                                        static_cast<double>(spec.n_max) / u, empirical, predicted,
                                        empirical - predicted, ms});
    }
    return result;
}

void sort_rows(std::vector<ResultRow>& rows) {
    std::stable_sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.seed != b.seed) return a.seed < b.seed;
        if (a.u != b.u) return a.u < b.u;
        return a.v < b.v;
    });
}

}  // namespace

ResultTable run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    const JumpKernel kernel = spec.kernel();
    const StepProfileParams params = spec.profile_params();

    ResultTable table;
    table.metadata.emplace_back("version", kVersion);
    table.metadata.emplace_back("kind", to_string(spec.kind));
    table.metadata.emplace_back("kernel", spec.kernel_literal);
    table.metadata.emplace_back("alpha", fmt_double(kernel.drift()));
    table.metadata.emplace_back("first_moment", fmt_double(kernel.first_moment()));
    table.metadata.emplace_back("lambda", fmt_double(spec.lambda));
    table.metadata.emplace_back("rho", fmt_double(spec.rho));
    table.metadata.emplace_back("replicas", std::to_string(spec.replicas));
    table.metadata.emplace_back("seed", std::to_string(spec.seed));

    if (spec.kind == ExperimentKind::kInvariants) {
        const auto start = std::chrono::steady_clock::now();
        for (const InvariantCheck& check : run_invariant_suite(spec.seed)) {
            table.rows.push_back(ResultRow{spec.seed, "invariants:" + check.name, 0.0, 0.0, 0.0,
                                           check.passed ? 1.0 : 0.0, 1.0,
                                           check.passed ? 0.0 : -1.0, elapsed_ms(start)});
        }
        return table;
    }

    std::string intervals_text;
    for (const auto& [u, v] : spec.intervals) {
        if (!intervals_text.empty()) intervals_text += "; ";
        intervals_text += fmt_double(u) + " " + fmt_double(v);
    }
    table.metadata.emplace_back("intervals", intervals_text);

    if (spec.kind == ExperimentKind::kSubadditive) {
        double slowest = spec.intervals.front().first;
        for (const auto& [u, v] : spec.intervals) slowest = std::min(slowest, u);
        const double horizon = static_cast<double>(spec.n_max) / slowest;
        const std::int64_t buffer = spec.effective_buffer(horizon);
        const Window window{-(spec.n_max + buffer), spec.n_max + buffer, buffer};
        table.metadata.emplace_back("n_max", std::to_string(spec.n_max));
        table.metadata.emplace_back("buffer", std::to_string(buffer));
        table.metadata.emplace_back(
            "t_burn",
            fmt_double(spec.t_burn ? *spec.t_burn : 10.0 * static_cast<double>(window.size())));

        std::vector<SubadditiveReplicaResult> results(static_cast<std::size_t>(spec.replicas));
        parallel_replicas(spec.replicas, [&](int replica) {
            results[static_cast<std::size_t>(replica)] =
                run_subadditive_replica(spec, kernel, params, replica);
        });
        for (const SubadditiveReplicaResult& result : results) {
            table.rows.insert(table.rows.end(), result.rows.begin(), result.rows.end());
        }
        sort_rows(table.rows);
        return table;
    }

    table.metadata.emplace_back("t_final", fmt_double(spec.t_final));
    table.metadata.emplace_back("buffer", std::to_string(spec.effective_buffer(spec.t_final)));

    std::vector<DensityReplicaResult> results(static_cast<std::size_t>(spec.replicas));
    parallel_replicas(spec.replicas, [&](int replica) {
        results[static_cast<std::size_t>(replica)] =
            run_density_replica(spec, kernel, params, replica);
    });
    for (const DensityReplicaResult& result : results) {
        table.rows.insert(table.rows.end(), result.rows.begin(), result.rows.end());
    }

    if (spec.kind == ExperimentKind::kStationary) {
        // Product-marginal test over the observed span, pooling replicas
        // whose buffer check passed.
        double u_min = spec.intervals.front().first;
        double v_max = spec.intervals.front().second;
        for (const auto& [u, v] : spec.intervals) {
            u_min = std::min(u_min, u);
            v_max = std::max(v_max, v);
        }
        const std::int64_t obs_lo = static_cast<std::int64_t>(std::floor(u_min * spec.t_final));
        const std::int64_t obs_hi = static_cast<std::int64_t>(std::ceil(v_max * spec.t_final));
        std::vector<Configuration> observed;
        for (const DensityReplicaResult& result : results) {
            if (!result.buffer_ok) continue;
            Configuration config(Window{obs_lo, obs_hi, 0});
            for (std::int64_t x = obs_lo; x <= obs_hi; ++x) {
                config.set(x, result.observed_slice[static_cast<std::size_t>(x - obs_lo)] != 0);
            }
            observed.push_back(std::move(config));
        }
        if (!observed.empty()) {
            const MarginalTestReport report =
                bernoulli_marginal_test(observed, obs_lo, obs_hi, spec.rho);
            const double a = static_cast<double>(obs_lo);
            const double b = static_cast<double>(obs_hi);
            table.rows.push_back(ResultRow{spec.seed, "stationary:marginal-mean", a, b,
                                           spec.t_final, report.mean, spec.rho,
                                           report.mean - spec.rho, 0});
            table.rows.push_back(ResultRow{spec.seed, "stationary:pair-covariance", a, b,
                                           spec.t_final, report.pair_covariance, 0.0,
                                           report.pair_covariance, 0});
            table.rows.push_back(ResultRow{spec.seed, "stationary:marginal-test", a, b,
                                           spec.t_final, report.passed() ? 1.0 : 0.0, 1.0,
                                           report.passed() ? 0.0 : -1.0, 0});
        }
    }
    sort_rows(table.rows);
    return table;
}

void emit_csv(const ResultTable& table, std::ostream& out) {
    for (const auto& [key, value] : table.metadata) {
        out << "# " << key << " = " << value << '\n';
    }
    out << "seed,kind,u,v,t,empirical,predicted,error,runtime_ms\n";
    for (const ResultRow& row : table.rows) {
        out << row.seed << ',' << row.kind << ',' << fmt_double(row.u) << ',' << fmt_double(row.v)
            << ',' << fmt_double(row.t) << ',' << fmt_double(row.empirical) << ','
            << fmt_double(row.predicted) << ',' << fmt_double(row.error) << ',' << row.runtime_ms
            << '\n';
    }
}

void emit_csv_file(const ResultTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    emit_csv(table, out);
    if (!out) throw std::runtime_error("write failed for " + path);
}

std::string to_csv(const ResultTable& table) {
    std::ostringstream out;
    emit_csv(table, out);
    return out.str();
}

std::vector<std::size_t> verify_csv_predictions(std::istream& in) {
    std::map<std::string, std::string> metadata;
    std::string line;
    bool header_seen = false;
    std::vector<std::size_t> mismatched;
    std::size_t data_row = 0;

    std::optional<JumpKernel> kernel;
    std::optional<StepProfileParams> params;
    std::string kind;

    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) == 0) {
            const auto eq = line.find('=');
            if (eq != std::string::npos) {
                metadata[trim(line.substr(2, eq - 2))] = trim(line.substr(eq + 1));
            }
            continue;
        }
        if (!header_seen) {
            header_seen = true;  // column header line
            kind = metadata.count("kind") ? metadata["kind"] : "";
            if (metadata.count("kernel") && metadata.count("lambda") && metadata.count("rho")) {
                kernel = JumpKernel::parse(metadata["kernel"]);
                params = StepProfileParams{std::stod(metadata["lambda"]), std::stod(metadata["rho"])};
            }
            continue;
        }
        ++data_row;
        std::vector<std::string> fields;
        std::stringstream fields_in(line);
        std::string field;
        while (std::getline(fields_in, field, ',')) fields.push_back(field);
        if (fields.size() != 9) {
            mismatched.push_back(data_row);
            continue;
        }
        if (fields[1] != kind || !kernel || !params) continue;
        const double u = std::stod(fields[2]);
        const double v = std::stod(fields[3]);
        const double stored = std::stod(fields[6]);
        const double recomputed = integrated_profile(u, v, *kernel, *params);
        if (stored != recomputed) mismatched.push_back(data_row);
    }
    return mismatched;
}

}  // namespace exclusion

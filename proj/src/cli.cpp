#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "exclusion/harness.hpp"

namespace exclusion {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read spec file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::vector<std::pair<double, double>> pair_up(const std::vector<double>& flat) {
    std::vector<std::pair<double, double>> intervals;
    for (std::size_t i = 0; i + 1 < flat.size(); i += 2) {
        intervals.emplace_back(flat[i], flat[i + 1]);
    }
    return intervals;
}

int run_profile(const std::string& kernel_literal, double lambda, double rho,
                const std::vector<double>& interval_values) {
    const JumpKernel kernel = JumpKernel::parse(kernel_literal);
    const StepProfileParams params{lambda, rho};
    params.validate();
    const auto [left, right] = characteristic_speeds(kernel, params);
    std::printf("alpha = %.12g\n", kernel.drift());
    std::printf("first_moment = %.12g\n", kernel.first_moment());
    std::printf("speeds = %.12g %.12g\n", left, right);
    for (const auto& [u, v] : pair_up(interval_values)) {
        std::printf("f(%.12g) = %.12g\n", u, burgers_profile(u, kernel, params));
        std::printf("f(%.12g) = %.12g\n", v, burgers_profile(v, kernel, params));
        std::printf("integral[%.12g,%.12g] = %.12g\n", u, v,
                    integrated_profile(u, v, kernel, params));
    }
    return 0;
}

bool table_clean(const ResultTable& table) {
    for (const ResultRow& row : table.rows) {
        if (row.kind.rfind("diagnostic:", 0) == 0) return false;
        if (row.kind.rfind("invariants:", 0) == 0 && row.empirical != 1.0) return false;
        if (row.kind == "stationary:marginal-test" && row.empirical != 1.0) return false;
    }
    return true;
}

void write_table(const ResultTable& table, const std::string& out_path) {
    if (out_path == "-") {
        emit_csv(table, std::cout);
    } else {
        emit_csv_file(table, out_path);
    }
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Seed-reproducible exclusion-process simulator and verification harness"};
    app.require_subcommand(1);

    std::string spec_path;
    std::string out_path = "-";
    std::string kernel_literal;
    double lambda = 0.0;
    double rho = 0.0;
    double t_final = 0.0;
    std::vector<double> interval_values;
    int replicas = 0;
    std::uint64_t seed = 1;
    std::int64_t buffer = 0;

    CLI::App* profile = app.add_subcommand("profile", "Print the closed-form density profile");
    profile->add_option("--kernel", kernel_literal, "kernel literal, e.g. 1:0.667,-1:0.333")
        ->required();
    profile->add_option("--lambda", lambda, "left density")->required();
    profile->add_option("--rho", rho, "right density")->required();
    profile->add_option("--interval", interval_values, "interval endpoints U V (repeatable)")
        ->type_size(2)
        ->required();

    CLI::App* simulate = app.add_subcommand("simulate", "Run one experiment and emit a CSV table");
    simulate->add_option("--spec", spec_path, "experiment spec file");
    simulate->add_option("--out", out_path, "output CSV path, '-' for stdout");
    auto* sim_kernel = simulate->add_option("--kernel", kernel_literal, "kernel literal override");
    auto* sim_lambda = simulate->add_option("--lambda", lambda, "left density override");
    auto* sim_rho = simulate->add_option("--rho", rho, "right density override");
    auto* sim_time = simulate->add_option("--time", t_final, "final time override");
    auto* sim_interval =
        simulate->add_option("--interval", interval_values, "interval U V (repeatable)")
            ->type_size(2);
    auto* sim_replicas = simulate->add_option("--replicas", replicas, "replica count override");
    auto* sim_seed = simulate->add_option("--seed", seed, "master seed override");
    auto* sim_buffer = simulate->add_option("--buffer", buffer, "window buffer override");

    CLI::App* verify = app.add_subcommand("verify", "Run the exact pathwise invariant suite");
    auto* verify_seed = verify->add_option("--seed", seed, "suite seed");

    CLI::App* sweep = app.add_subcommand("sweep", "Run every spec block in a file");
    sweep->add_option("--spec", spec_path, "sweep file (blocks separated by blank lines)")
        ->required();
    sweep->add_option("--out", out_path, "output prefix; tables land in PREFIX.N.csv");
    auto* sweep_seed = sweep->add_option("--seed", seed, "master seed override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (profile->parsed()) {
            return run_profile(kernel_literal, lambda, rho, interval_values);
        }

        if (simulate->parsed()) {
            ExperimentSpec spec;
            if (!spec_path.empty()) {
                spec = parse_spec(read_file(spec_path));
            } else {
                if (sim_kernel->count() == 0 || sim_time->count() == 0 ||
                    sim_interval->count() == 0) {
                    std::cerr << "simulate: without --spec, --kernel, --time and --interval are required\n";
                    return 2;
                }
                spec.kind = ExperimentKind::kLln;
            }
            if (sim_kernel->count() > 0) spec.kernel_literal = kernel_literal;
            if (sim_lambda->count() > 0) spec.lambda = lambda;
            if (sim_rho->count() > 0) spec.rho = rho;
            if (sim_time->count() > 0) spec.t_final = t_final;
            if (sim_interval->count() > 0) spec.intervals = pair_up(interval_values);
            if (sim_replicas->count() > 0) spec.replicas = replicas;
            if (sim_seed->count() > 0) spec.seed = seed;
            if (sim_buffer->count() > 0) spec.buffer_override = buffer;
            spec.validate();

            const ResultTable table = run_experiment(spec);
            write_table(table, out_path);
            return table_clean(table) ? 0 : 1;
        }

        if (verify->parsed()) {
            const std::uint64_t suite_seed = verify_seed->count() > 0 ? seed : 1;
            bool all_passed = true;
            for (const InvariantCheck& check : run_invariant_suite(suite_seed)) {
                std::printf("[%s] %s (%s)\n", check.passed ? "PASS" : "FAIL", check.name.c_str(),
                            check.detail.c_str());
                all_passed = all_passed && check.passed;
            }
            return all_passed ? 0 : 1;
        }

        if (sweep->parsed()) {
            std::vector<ExperimentSpec> specs = parse_sweep(read_file(spec_path));
            bool all_clean = true;
            int index = 0;
            for (ExperimentSpec& spec : specs) {
                if (sweep_seed->count() > 0) spec.seed = seed;
                const ResultTable table = run_experiment(spec);
                ++index;
                const std::string path = out_path == "-"
                                             ? "sweep." + std::to_string(index) + ".csv"
                                             : out_path + "." + std::to_string(index) + ".csv";
                emit_csv_file(table, path);
                std::printf("%s: %zu rows\n", path.c_str(), table.rows.size());
                all_clean = all_clean && table_clean(table);
            }
            return all_clean ? 0 : 1;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}

}  // namespace exclusion

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "exclusion/kernel_profile.hpp"
#include "exclusion/lattice.hpp"

namespace exclusion {

enum class ExperimentKind {
    kLln,
    kStationary,
    kShock,
    kRarefaction,
    kSubadditive,
    kInvariants,
};

std::string to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

// Declarative description of one experiment, parsed from flat
// `key = value` text (one pair per line, `#` comments, unknown keys are
// errors).
struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::kLln;
    std::string kernel_literal;
    double lambda = 0.0;
    double rho = 0.0;
    double t_final = 0.0;
    std::vector<std::pair<double, double>> intervals;
    int replicas = 20;
    std::uint64_t seed = 1;
    std::optional<std::int64_t> buffer_override;
    std::optional<double> t_burn;
    int n_max = 100;  // subadditive experiments

    JumpKernel kernel() const { return JumpKernel::parse(kernel_literal); }
    StepProfileParams profile_params() const { return StepProfileParams{lambda, rho}; }

    // Default window buffer: ceil((M + 3) * t) sites beyond the observed
    // span on each side; mean information reach is M * t, the rest is
    // fluctuation margin.
    std::int64_t effective_buffer(double horizon) const;

    void validate() const;  // throws std::invalid_argument
};

// Parses one spec document. Errors carry the 1-based line number.
ExperimentSpec parse_spec(const std::string& text);

// Parses a sweep file: spec blocks separated by blank lines.
std::vector<ExperimentSpec> parse_sweep(const std::string& text);

struct ResultRow {
    std::uint64_t seed;
    std::string kind;
    double u;
    double v;
    double t;
    double empirical;
    double predicted;
    double error;
    std::int64_t runtime_ms;
};

struct ResultTable {
    std::vector<std::pair<std::string, std::string>> metadata;
    std::vector<ResultRow> rows;
};

// Runs `spec.replicas` independent seeded trajectories (derived seeds via
// keyed mixing) and fills the table; deterministic given the spec, whatever
// the worker count. Every measured replica is backed by a second run at
// half the window buffer; if the two disagree anywhere on the observed
// span, the replica contributes a `diagnostic:buffer` row instead of data.
ResultTable run_experiment(const ExperimentSpec& spec);

// UTF-8 CSV: `#`-prefixed metadata lines, a header, one line per row.
// Stable except for the runtime_ms column, which records wall time.
void emit_csv(const ResultTable& table, std::ostream& out);
void emit_csv_file(const ResultTable& table, const std::string& path);
std::string to_csv(const ResultTable& table);

// Reads a result CSV back and recomputes the predicted column from the
// metadata block; returns the row numbers (1-based data rows) whose stored
// prediction does not match bit-for-bit. Used to guard against stale
// closed-form code.
std::vector<std::size_t> verify_csv_predictions(std::istream& in);

// One exact pathwise check of the verification suite.
struct InvariantCheck {
    std::string name;
    bool passed;
    std::string detail;
};

// Runs every exact pathwise check (attractiveness, marginal consistency,
// reflection conjugacy, flux identity and label-oracle agreement, pathwise
// subadditivity with the origin-crossing bound); zero tolerance, any
// failure is an implementation bug.
std::vector<InvariantCheck> run_invariant_suite(std::uint64_t seed);

// Worker budget for replica execution: EXCLUSION_LAB_WORKERS when set,
// otherwise the hardware concurrency.
int worker_budget();

// `profile`, `simulate`, `verify` and `sweep` subcommands; returns 0 on
// success, 1 on failed checks, 2 on usage or parse errors.
int cli_main(int argc, const char* const* argv);

}  // namespace exclusion

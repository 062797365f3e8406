#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "exclusion/harness.hpp"

using namespace exclusion;

namespace {

// The runtime column records wall time; every other byte is deterministic.
std::string strip_runtime(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::string out;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#' && header_seen) {
            const auto comma = line.rfind(',');
            line = line.substr(0, comma + 1) + "0";
        }
        if (!line.empty() && line[0] != '#') header_seen = true;
        out += line + "\n";
    }
    return out;
}

int count_columns(const std::string& line) {
    int columns = 1;
    for (char c : line) columns += c == ',' ? 1 : 0;
    return columns;
}

}  // namespace

TEST_CASE("spec parsing applies defaults and validates") {
    const ExperimentSpec spec = parse_spec(
        "kind = lln\n"
        "kernel = 1:1\n"
        "lambda = 1\n"
        "rho = 0\n"
        "t_final = 100\n"
        "interval = -1 1\n");
    CHECK(spec.replicas == 20);
    CHECK(spec.seed == 1);
    CHECK_FALSE(spec.buffer_override.has_value());
    CHECK(spec.effective_buffer(spec.t_final) == 400);
    CHECK(spec.intervals.size() == 1);
}

TEST_CASE("spec parsing rejects bad documents with line numbers") {
    SUBCASE("density ordering") {
        try {
            parse_spec("kind = lln\nkernel = 1:1\nlambda = 0.3\nrho = 0.8\n"
                       "t_final = 10\ninterval = -1 1\n");
            FAIL("expected a parse error");
        } catch (const std::invalid_argument& e) {
            const std::string message = e.what();
            CHECK(message.find("rho <= lambda") != std::string::npos);
        }
    }
    SUBCASE("kernel that does not sum to one") {
        CHECK_THROWS_AS(parse_spec("kind = lln\nkernel = 1:0.9\nlambda = 1\nrho = 0\n"
                                   "t_final = 10\ninterval = -1 1\n"),
                        std::invalid_argument);
    }
    SUBCASE("unknown keys carry their line number") {
        try {
            parse_spec("kind = lln\nkernel = 1:1\nlambda = 1\nrho = 0\n"
                       "t_final = 10\ninterval = -1 1\nbogus = 3\n");
            FAIL("expected a parse error");
        } catch (const std::invalid_argument& e) {
            const std::string message = e.what();
            CHECK(message.find("line 7") != std::string::npos);
            CHECK(message.find("bogus") != std::string::npos);
        }
    }
    SUBCASE("missing required keys") {
        CHECK_THROWS_AS(parse_spec("kind = lln\nlambda = 1\nrho = 0\n"), std::invalid_argument);
        CHECK_THROWS_AS(parse_spec("kind = lln\nkernel = 1:1\nlambda = 1\nrho = 0\n"
                                   "t_final = 10\n"),
                        std::invalid_argument);
    }
    SUBCASE("comments and blank lines are fine") {
        const ExperimentSpec spec = parse_spec(
            "# an experiment\nkind = invariants\nkernel = 1:1  # drift one\n"
            "lambda = 0.5\nrho = 0.5\n\n");
        CHECK(spec.kind == ExperimentKind::kInvariants);
    }
}

TEST_CASE("sweep files split on blank lines") {
    const auto specs = parse_sweep(
        "kind = invariants\nkernel = 1:1\nlambda = 0.5\nrho = 0.5\n"
        "\n"
        "# second block\n"
        "kind = lln\nkernel = 1:1\nlambda = 1\nrho = 0\nt_final = 5\ninterval = -1 1\n");
    REQUIRE(specs.size() == 2);
    CHECK(specs[0].kind == ExperimentKind::kInvariants);
    CHECK(specs[1].kind == ExperimentKind::kLln);
}

TEST_CASE("csv shape") {
    ResultTable table;
    table.metadata.emplace_back("kind", "lln");
    SUBCASE("empty tables are metadata plus header") {
        const std::string csv = to_csv(table);
        CHECK(csv == "# kind = lln\nseed,kind,u,v,t,empirical,predicted,error,runtime_ms\n");
    }
    SUBCASE("every row has nine columns") {
        table.rows.push_back(ResultRow{7, "lln", -1.0, 1.0, 10.0, 0.5, 0.5, 0.0, 3});
        std::istringstream in(to_csv(table));
        std::string line;
        std::getline(in, line);  // metadata
        std::getline(in, line);
        CHECK(count_columns(line) == 9);
        std::getline(in, line);
        CHECK(count_columns(line) == 9);
    }
}

TEST_CASE("a small rarefaction experiment lands near the closed form") {
    ExperimentSpec spec = parse_spec(
        "kind = lln\nkernel = 1:1\nlambda = 1\nrho = 0\n"
        "t_final = 50\ninterval = -1 1\nreplicas = 4\nseed = 11\n");
    const ResultTable table = run_experiment(spec);
    REQUIRE(table.rows.size() == 4);
    for (const ResultRow& row : table.rows) {
        CHECK(row.kind == "lln");
        CHECK(row.predicted == 1.0);
        CHECK(std::abs(row.error) < 0.3);
    }
}

TEST_CASE("stationary experiments append the marginal test rows") {
    ExperimentSpec spec = parse_spec(
        "kind = stationary\nkernel = 1:2/3,-1:1/3\nlambda = 0.5\nrho = 0.5\n"
        "t_final = 20\ninterval = -1 1\nreplicas = 6\nseed = 5\n");
    const ResultTable table = run_experiment(spec);
    int data_rows = 0, extra_rows = 0;
    bool marginal_passed = false;
    for (const ResultRow& row : table.rows) {
        if (row.kind == "stationary") ++data_rows;
        if (row.kind.rfind("stationary:", 0) == 0) ++extra_rows;
        if (row.kind == "stationary:marginal-test") marginal_passed = row.empirical == 1.0;
    }
    CHECK(data_rows == 6);
    CHECK(extra_rows == 3);
    CHECK(marginal_passed);
}

TEST_CASE("subadditive experiments emit one combined row per interval") {
    ExperimentSpec spec = parse_spec(
        "kind = subadditive\nkernel = 1:1\nlambda = 1\nrho = 0\n"
        "interval = 0.5 1\nreplicas = 2\nseed = 9\nn_max = 12\nt_burn = 0\n");
    const ResultTable table = run_experiment(spec);
    REQUIRE(table.rows.size() == 2);
    for (const ResultRow& row : table.rows) {
        CHECK(row.kind == "subadditive");
        CHECK(row.u == 0.5);
        CHECK(row.v == 1.0);
        CHECK(row.predicted == integrated_profile(0.5, 1.0, spec.kernel(), spec.profile_params()));
        CHECK(std::abs(row.error) < 0.25);
    }
}

TEST_CASE("the invariants experiment reports every check as passing") {
    ExperimentSpec spec = parse_spec(
        "kind = invariants\nkernel = 1:1\nlambda = 0.5\nrho = 0.5\nseed = 2\n");
    const ResultTable table = run_experiment(spec);
    CHECK(table.rows.size() >= 6);
    for (const ResultRow& row : table.rows) {
        CHECK(row.kind.rfind("invariants:", 0) == 0);
        CHECK(row.empirical == 1.0);
    }
}

TEST_CASE("tables are byte-stable modulo the runtime column") {
    ExperimentSpec spec = parse_spec(
        "kind = lln\nkernel = 1:2/3,-1:1/3\nlambda = 0.8\nrho = 0.2\n"
        "t_final = 15\ninterval = -0.5 0.5\nreplicas = 5\nseed = 77\n");
    const std::string first = strip_runtime(to_csv(run_experiment(spec)));
    const std::string second = strip_runtime(to_csv(run_experiment(spec)));
    CHECK(first == second);

    // The worker budget must not leak into the output.
    setenv("EXCLUSION_LAB_WORKERS", "3", 1);
    const std::string threaded = strip_runtime(to_csv(run_experiment(spec)));
    unsetenv("EXCLUSION_LAB_WORKERS");
    CHECK(threaded == first);
}

TEST_CASE("csv read-back recomputes the predicted column") {
    ExperimentSpec spec = parse_spec(
        "kind = lln\nkernel = 1:1\nlambda = 1\nrho = 0\n"
        "t_final = 10\ninterval = -1 1\nreplicas = 2\nseed = 3\n");
    const std::string csv = to_csv(run_experiment(spec));
    {
        std::istringstream in(csv);
        CHECK(verify_csv_predictions(in).empty());
    }
    {
        // Corrupt one predicted value; the read-back must notice.
        std::istringstream lines(csv);
        std::string line;
        std::string tampered;
        bool header_seen = false;
        bool corrupted = false;
        while (std::getline(lines, line)) {
            if (!line.empty() && line[0] != '#') {
                if (header_seen && !corrupted) {
                    std::vector<std::string> fields;
                    std::stringstream fields_in(line);
                    std::string field;
                    while (std::getline(fields_in, field, ',')) fields.push_back(field);
                    REQUIRE(fields.size() == 9);
                    fields[6] = "2.5";
                    line = fields[0];
                    for (std::size_t i = 1; i < fields.size(); ++i) line += "," + fields[i];
                    corrupted = true;
                }
                header_seen = true;
            }
            tampered += line + "\n";
        }
        REQUIRE(corrupted);
        std::istringstream in(tampered);
        CHECK_FALSE(verify_csv_predictions(in).empty());
    }
}

TEST_CASE("worker budget reads the environment") {
    setenv("EXCLUSION_LAB_WORKERS", "7", 1);
    CHECK(worker_budget() == 7);
    unsetenv("EXCLUSION_LAB_WORKERS");
    CHECK(worker_budget() >= 1);
}

TEST_CASE("cli entry points") {
    SUBCASE("profile") {
        const char* argv[] = {"exclusion-lab", "profile", "--kernel", "1:1", "--lambda", "1",
                              "--rho", "0", "--interval", "-1", "1"};
        CHECK(cli_main(11, argv) == 0);
    }
    SUBCASE("missing spec file exits with a usage error") {
        const char* argv[] = {"exclusion-lab", "simulate", "--spec", "no_such_file.spec"};
        CHECK(cli_main(4, argv) == 2);
    }
    SUBCASE("unknown flags exit with a usage error") {
        const char* argv[] = {"exclusion-lab", "simulate", "--frobnicate"};
        CHECK(cli_main(3, argv) == 2);
    }
    SUBCASE("verify runs the exact suite") {
        const char* argv[] = {"exclusion-lab", "verify", "--seed", "6"};
        CHECK(cli_main(4, argv) == 0);
    }
    SUBCASE("sweep writes one table per block") {
        const std::string sweep_path = "harness_cli_sweep.txt";
        {
            std::ofstream out(sweep_path);
            out << "kind = lln\nkernel = 1:1\nlambda = 1\nrho = 0\n"
                   "t_final = 5\ninterval = -1 1\nreplicas = 1\nseed = 4\n"
                   "\n"
                   "kind = lln\nkernel = -1:1\nlambda = 0.9\nrho = 0.4\n"
                   "t_final = 5\ninterval = 0 1\nreplicas = 1\nseed = 4\n";
        }
        const char* argv[] = {"exclusion-lab", "sweep", "--spec", sweep_path.c_str(),
                              "--out", "harness_sweep_out"};
        CHECK(cli_main(6, argv) == 0);
        for (const char* produced : {"harness_sweep_out.1.csv", "harness_sweep_out.2.csv"}) {
            std::ifstream in(produced);
            CHECK(in.good());
            in.close();
            std::remove(produced);
        }
        std::remove(sweep_path.c_str());
    }
    SUBCASE("simulate writes a csv file") {
        const std::string spec_path = "harness_cli_spec.txt";
        {
            std::ofstream out(spec_path);
            out << "kind = lln\nkernel = 1:1\nlambda = 1\nrho = 0\n"
                   "t_final = 10\ninterval = -1 1\nreplicas = 2\nseed = 4\n";
        }
        const std::string out_path = "harness_cli_out.csv";
        const char* argv[] = {"exclusion-lab", "simulate", "--spec", spec_path.c_str(),
                              "--out", out_path.c_str()};
        CHECK(cli_main(6, argv) == 0);
        std::ifstream produced(out_path);
        REQUIRE(produced.good());
        std::string line;
        std::getline(produced, line);
        CHECK(line.rfind("# version", 0) == 0);
        produced.close();
        std::remove(spec_path.c_str());
        std::remove(out_path.c_str());
    }
}

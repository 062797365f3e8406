#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace exclusion {

// Displacement law p(0,.) of the driving random walk, finite support.
// Probabilities are strictly positive and sum to one (tolerance 1e-12);
// drift and first moment are recomputed from the support on construction.
class JumpKernel {
public:
    struct Entry {
        std::int64_t displacement;
        double probability;

        bool operator==(const Entry&) const = default;
    };

    // Validates and normalizes raw entries: repeated displacements are
    // merged by summing probability. Throws std::invalid_argument on empty
    // support, non-positive probabilities, probability sum off by more than
    // 1e-12, or support containing only displacement zero.
    static JumpKernel from_entries(const std::vector<Entry>& raw_entries);

    // Parses the literal format `displacement:probability` pairs separated
    // by commas, e.g. "1:0.667,-1:0.333". Probabilities may be plain
    // decimals or fractions like "2/3".
    static JumpKernel parse(const std::string& literal);

    const std::vector<Entry>& support() const { return support_; }
    double drift() const { return drift_; }
    double first_moment() const { return first_moment_; }
    std::int64_t max_range() const { return max_range_; }

    // Deterministic draw from p(0,.) given a uniform in [0,1).
    std::int64_t sample_displacement(double uniform) const;

    std::string to_literal() const;

    bool operator==(const JumpKernel&) const = default;

private:
    std::vector<Entry> support_;       // sorted by displacement
    std::vector<double> cumulative_;   // running probability sums
    double drift_ = 0.0;
    double first_moment_ = 0.0;
    std::int64_t max_range_ = 0;
};

// Left/right densities of the two-sided initial profile, 0 <= rho <= lambda <= 1.
struct StepProfileParams {
    double lambda;  // density at sites x <= 0
    double rho;     // density at sites x > 0

    void validate() const;  // throws std::invalid_argument
};

// Characteristic speeds bounding the middle branch of the density profile.
// For drift > 0 these are (alpha(1-2*lambda), alpha(1-2*rho)); for
// drift <= 0 the profile is a single travelling step and the shock speed
// alpha(1-lambda-rho) is returned in both slots.
std::pair<double, double> characteristic_speeds(const JumpKernel& kernel,
                                                const StepProfileParams& params);

// Macroscopic density profile at speed u: the entropic solution of the
// flux alpha*r*(1-r) conservation law with step initial data. For positive
// drift the middle branch is (1 - u/alpha)/2; for drift <= 0 the profile is
// lambda strictly left of the shock speed and rho at and right of it.
double burgers_profile(double u, const JumpKernel& kernel,
                       const StepProfileParams& params);

// Closed-form integral of the profile over [u, v], u < v. Exact piecewise
// evaluation at the branch boundaries, no quadrature. Throws on u >= v.
double integrated_profile(double u, double v, const JumpKernel& kernel,
                          const StepProfileParams& params);

}  // namespace exclusion

#include "exclusion/kernel_profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>

namespace exclusion {

namespace {

constexpr double kProbabilityTolerance = 1e-12;

double parse_probability(const std::string& text) {
    const auto slash = text.find('/');
    std::size_t used = 0;
    if (slash == std::string::npos) {
        const double value = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument("trailing characters in probability '" + text + "'");
        return value;
    }
    const std::string num = text.substr(0, slash);
    const std::string den = text.substr(slash + 1);
    const double a = std::stod(num, &used);
    if (used != num.size()) throw std::invalid_argument("bad fraction numerator '" + num + "'");
    const double b = std::stod(den, &used);
    if (used != den.size() || b == 0.0) throw std::invalid_argument("bad fraction denominator '" + den + "'");
    return a / b;
}

}  // namespace

JumpKernel JumpKernel::from_entries(const std::vector<Entry>& raw_entries) {
    if (raw_entries.empty()) {
        throw std::invalid_argument("jump kernel: empty support");
    }
    std::map<std::int64_t, double> merged;
    for (const Entry& e : raw_entries) {
        if (!(e.probability > 0.0)) {
            throw std::invalid_argument("jump kernel: probabilities must be strictly positive");
        }
        merged[e.displacement] += e.probability;
    }
    double sum = 0.0;
    for (const auto& [z, p] : merged) sum += p;
    if (std::abs(sum - 1.0) > kProbabilityTolerance) {
        throw std::invalid_argument("jump kernel: probabilities sum to " + std::to_string(sum) +
                                    ", expected 1 within 1e-12");
    }
    if (merged.size() == 1 && merged.begin()->first == 0) {
        throw std::invalid_argument("jump kernel: support must contain a nonzero displacement");
    }

    JumpKernel kernel;
    kernel.support_.reserve(merged.size());
    double cum = 0.0;
    for (const auto& [z, p] : merged) {
        kernel.support_.push_back(Entry{z, p});
        cum += p;
        kernel.cumulative_.push_back(cum);
        kernel.drift_ += static_cast<double>(z) * p;
        kernel.first_moment_ += static_cast<double>(std::abs(z)) * p;
        kernel.max_range_ = std::max(kernel.max_range_, std::abs(z));
    }
    kernel.cumulative_.back() = 1.0;
    return kernel;
}

JumpKernel JumpKernel::parse(const std::string& literal) {
    std::vector<Entry> entries;
    std::stringstream stream(literal);
    std::string item;
    while (std::getline(stream, item, ',')) {
        const auto colon = item.find(':');
        if (colon == std::string::npos) {
            throw std::invalid_argument("kernel literal: expected displacement:probability, got '" + item + "'");
        }
        std::size_t used = 0;
        const long long z = std::stoll(item.substr(0, colon), &used);
        if (used != colon) {
            throw std::invalid_argument("kernel literal: bad displacement in '" + item + "'");
        }
        entries.push_back(Entry{z, parse_probability(item.substr(colon + 1))});
    }
    return from_entries(entries);
}

std::int64_t JumpKernel::sample_displacement(double uniform) const {
    for (std::size_t i = 0; i + 1 < cumulative_.size(); ++i) {
        if (uniform < cumulative_[i]) return support_[i].displacement;
    }
    return support_.back().displacement;
}

std::string JumpKernel::to_literal() const {
    std::ostringstream out;
    out.precision(17);
    for (std::size_t i = 0; i < support_.size(); ++i) {
        if (i > 0) out << ',';
        out << support_[i].displacement << ':' << support_[i].probability;
    }
    return out.str();
}

void StepProfileParams::validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0) || !(rho >= 0.0 && rho <= 1.0)) {
        throw std::invalid_argument("profile params: densities must lie in [0,1]");
    }
    if (rho > lambda) {
        throw std::invalid_argument("profile params: requires rho <= lambda");
    }
}

std::pair<double, double> characteristic_speeds(const JumpKernel& kernel,
                                                const StepProfileParams& params) {
    params.validate();
    const double alpha = kernel.drift();
    if (alpha > 0.0) {
        return {alpha * (1.0 - 2.0 * params.lambda), alpha * (1.0 - 2.0 * params.rho)};
    }
    const double shock = alpha * (1.0 - params.lambda - params.rho);
    return {shock, shock};
}

double burgers_profile(double u, const JumpKernel& kernel,
                       const StepProfileParams& params) {
    params.validate();
    const double alpha = kernel.drift();
    if (alpha > 0.0) {
        const auto [left, right] = characteristic_speeds(kernel, params);
        if (u < left) return params.lambda;
        if (u > right) return params.rho;
        return 0.5 * (1.0 - u / alpha);
    }
    const double shock = alpha * (1.0 - params.lambda - params.rho);
    return u < shock ? params.lambda : params.rho;
}

double integrated_profile(double u, double v, const JumpKernel& kernel,
                          const StepProfileParams& params) {
    params.validate();
    if (!(u < v)) {
        throw std::invalid_argument("integrated_profile: requires u < v");
    }
    const double alpha = kernel.drift();
    if (alpha > 0.0) {
        const auto [left, right] = characteristic_speeds(kernel, params);
        // Piece below the fan, inside it, and above it.
        const double lo = std::min(std::max(u, left), right);
        const double hi = std::max(std::min(v, right), left);
        const double flat_left = params.lambda * (std::min(v, left) - std::min(u, left));
        const double flat_right = params.rho * (std::max(v, right) - std::max(u, right));
        // Antiderivative of (1 - s/alpha)/2 is s/2 - s^2/(4 alpha).
        const auto ramp = [alpha](double s) { return 0.5 * s - 0.25 * s * s / alpha; };
        return flat_left + (ramp(hi) - ramp(lo)) + flat_right;
    }
    const double shock = alpha * (1.0 - params.lambda - params.rho);
    const double left_len = std::min(v, shock) - std::min(u, shock);
    const double right_len = std::max(v, shock) - std::max(u, shock);
    return params.lambda * left_len + params.rho * right_len;
}

}  // namespace exclusion

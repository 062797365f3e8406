#pragma once

#include "exclusion/kernel_profile.hpp"

// Independent midpoint-rule integral of the density profile, used to pin
// down the closed-form values asserted in the tests. Deliberately knows
// nothing about the branch boundaries.
inline double quadrature_profile(double u, double v, const exclusion::JumpKernel& kernel,
                                 const exclusion::StepProfileParams& params,
                                 double step = 1e-4) {
    const long long n = static_cast<long long>((v - u) / step) + 1;
    const double h = (v - u) / static_cast<double>(n);
    double total = 0.0;
    for (long long i = 0; i < n; ++i) {
        const double s = u + (static_cast<double>(i) + 0.5) * h;
        total += exclusion::burgers_profile(s, kernel, params);
    }
    return total * h;
}

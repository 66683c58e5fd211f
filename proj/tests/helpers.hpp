#pragma once

#include <algorithm>

#include "singbsde/model.hpp"
#include "singbsde/oracles.hpp"

namespace singbsde::testing {

// Reference market on a coarse grid, small enough for unit tests.
inline ProblemConfig small_config(int paths = 4000, int steps = 20, int n = 0) {
    ProblemConfig c = reference_config();
    c.discretization.n_paths = paths;
    c.discretization.n_steps = steps;
    c.discretization.seed = 11;
    c.discretization.jackknife_folds = 0;
    c.intensity.truncation_n = n;
    c.execution.threads = 1;
    return c;
}

// int_0^t min(1/(1-s), n) ds by quadrature, split at the kink s = 1 - 1/n (T = 1).
inline double hazard_integral(double t, int n) {
    const double kink = std::max(0.0, 1.0 - 1.0 / n);
    const double smooth = simpson([](double s) { return 1.0 / (1.0 - s); }, 0.0, std::min(t, kink), 200,
                                  1e-13);
    return smooth + n * std::max(0.0, t - kink);
}

}  // namespace singbsde::testing

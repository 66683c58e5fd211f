#pragma once

// Brownian BSDE obtained after reducing the default-time problem:
//
//   Y_t = xi_a(T) - int_t^T [ g(s, Z_s) + (lambda_s ^ n) (1 - e^{alpha (xi_a(s) - Y_s)}) / alpha ] ds
//         - int_t^T Z_s dW_s
//
//   g(s, z) = -(alpha/2) dist^2(z + theta/alpha, C) + z.theta + |theta|^2 / (2 alpha)
//
// solved backward on the grid by least-squares Monte Carlo, with the driver
// evaluated at the previous Picard iterate.

#include <Eigen/Dense>

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "singbsde/model.hpp"
#include "singbsde/paths.hpp"

namespace singbsde {

struct DriverParams {
    double alpha = 1.0;
    std::vector<double> theta{0.0};
    ConstraintSet constraint;
    IntensitySpec intensity;
    double maturity = 1.0;
    DriverVariant variant = DriverVariant::kRiskAversionScaled;
};

[[nodiscard]] DriverParams driver_params(const ValidatedConfig& config);

// |theta|^2 / (2 alpha), or |theta|^2 / 2 for DriverVariant::kUnscaled.
[[nodiscard]] double driver_constant(const DriverParams& params);

[[nodiscard]] double driver_gb(const DriverParams& params, double t, std::span<const double> z);

// lambda (1 - e^{alpha u}) / alpha, computed through expm1.
[[nodiscard]] double default_term(double alpha, double lambda, double u);

[[nodiscard]] double driver_full(const DriverParams& params, double t, std::span<const double> z,
                                 double u, int n);

// Exponents alpha * (xi_a - Y) beyond this are treated as divergence.
inline constexpr double kExponentLimit = 700.0;

struct TruncatedBsdeSolution {
    Eigen::MatrixXd Y;  // M x (N+1)
    Eigen::MatrixXd Z;  // M x N
    double y0 = 0.0;
    int picard_iters_used = 0;
    std::vector<double> picard_residuals;  // |y0^L - y0^{L-1}| per iteration
    std::vector<double> sup_gaps;          // max |Y^L - Y^{L-1}| per iteration
    int truncation_n = 0;
    int ridge_fallbacks = 0;               // time steps where the regression needed the ridge
};

// Throws ValidationError if n > 1/dt, ConsistencyError on a grid mismatch,
// ConvergenceError on non-convergence or exponent overflow, and lets
// RegressionError through.
[[nodiscard]] TruncatedBsdeSolution solve_truncated(const ValidatedConfig& config,
                                                    const PathEnsemble& ensemble, int n);

// Sanity ceiling e^{M T} (|xi_b| + M T + sup|xi_a|) with
// M = max(|theta|, driver_constant).
[[nodiscard]] double a_priori_bound(const ValidatedConfig& config);

void write_bsde_path_csv(std::ostream& out, const TruncatedBsdeSolution& solution,
                         std::span<const double> grid, std::size_t path);

}  // namespace singbsde

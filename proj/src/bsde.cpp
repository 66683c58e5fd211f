#include "singbsde/bsde.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <ostream>
#include <string>

#include "singbsde/csv.hpp"
#include "singbsde/errors.hpp"
#include "singbsde/parallel.hpp"
#include "singbsde/regress.hpp"

namespace singbsde {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

[[noreturn]] void overflow(int iteration, std::size_t k, std::vector<double> residuals) {
    throw ConvergenceError("exponential default term overflowed at Picard iteration " +
                               std::to_string(iteration) + ", time index " + std::to_string(k),
                           std::move(residuals));
}

// Root of y -> y - a + base + lam_dt (1 - e^{alpha (xi - y)}) / alpha. The map
// is increasing and concave: the first Newton step lands left of the root and
// the rest approach it monotonically. `guess` only affects the step count.
double solve_implicit(double a, double base, double lam_dt, double alpha, double xi, double guess,
                      bool& overflowed) {
    if (lam_dt == 0.0) return a - base;
    double y = guess;
    for (int it = 0; it < 100; ++it) {
        const double expo = alpha * (xi - y);
        if (expo > kExponentLimit) {
            overflowed = true;
            return y;
        }
        const double em1 = std::expm1(expo);
        const double h = y - a + base - lam_dt * em1 / alpha;
        const double step = h / (1.0 + lam_dt * (em1 + 1.0));
        y -= step;
        // quadratic convergence: the remaining error is of order step^2
        if (std::abs(step) <= 1e-9 * (1.0 + std::abs(y))) break;
    }
    return y;
}

}  // namespace

DriverParams driver_params(const ValidatedConfig& config) {
    DriverParams p;
    p.alpha = config.market().risk_aversion;
    p.theta = config.market().theta;
    p.constraint = config.constraint();
    p.intensity = config.intensity();
    p.maturity = config.market().maturity;
    p.variant = config.config().driver_variant;
    return p;
}

double driver_constant(const DriverParams& params) {
    const double theta2 = dot(params.theta, params.theta);
    return params.variant == DriverVariant::kRiskAversionScaled ? theta2 / (2.0 * params.alpha)
                                                                : theta2 / 2.0;
}

double driver_gb(const DriverParams& params, double /*t*/, std::span<const double> z) {
    double value = dot(z, params.theta) + driver_constant(params);
    if (!params.constraint.is_unconstrained()) {
        std::vector<double> shifted(z.begin(), z.end());
        for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += params.theta[i] / params.alpha;
        value -= 0.5 * params.alpha * params.constraint.distance_squared(shifted);
    }
    return value;
}

double default_term(double alpha, double lambda, double u) {
    if (lambda == 0.0) return 0.0;
    return -lambda * std::expm1(alpha * u) / alpha;
}

double driver_full(const DriverParams& params, double t, std::span<const double> z, double u,
                   int n) {
    const double lambda = lambda_at(params.intensity, t, params.maturity, n);
    return driver_gb(params, t, z) + default_term(params.alpha, lambda, u);
}

TruncatedBsdeSolution solve_truncated(const ValidatedConfig& config, const PathEnsemble& ensemble,
                                      int n) {
    check_truncation_level(n, config.dt());
    const std::size_t steps = config.n_steps();
    if (ensemble.n_steps() != steps || static_cast<std::size_t>(ensemble.W.cols()) != steps + 1) {
        throw ConsistencyError("ensemble grid does not match the configuration");
    }
    const std::size_t m = ensemble.n_paths();
    const auto rows = static_cast<Eigen::Index>(m);
    const auto& disc = config.discretization();
    const unsigned threads = config.execution().threads;
    const DriverParams params = driver_params(config);
    const double alpha = params.alpha;
    const double dt = config.dt();
    const auto& grid = config.grid();
    const bool literal = disc.picard_mode == PicardMode::kLiteral;
    const bool constrained = !params.constraint.is_unconstrained();
    const double theta = params.theta[0];

    // Regression designs depend only on the states: factor them once.
    const Eigen::MatrixXd& states =
        disc.regression_state == RegressionState::kAssetPrice ? ensemble.S : ensemble.W;
    std::vector<std::unique_ptr<LeastSquaresProjector>> projectors(steps);
    int ridge_fallbacks = 0;
    for (std::size_t k = 0; k < steps; ++k) {
        const auto col = static_cast<Eigen::Index>(k);
        projectors[k] = std::make_unique<LeastSquaresProjector>(
            std::span<const double>(states.col(col).data(), m), disc.basis_degree, k, threads);
        if (projectors[k]->ridge_applied()) ++ridge_fallbacks;
    }

    Eigen::VectorXd terminal(rows);
    if (config.intensity().kind == IntensityKind::kSingular) {
        terminal = ensemble.xi_a.col(static_cast<Eigen::Index>(steps));
    } else {
        terminal.setConstant(config.claim().xi_b);
    }

    TruncatedBsdeSolution sol;
    sol.truncation_n = n;
    sol.ridge_fallbacks = ridge_fallbacks;
    sol.Y.resize(rows, static_cast<Eigen::Index>(steps + 1));
    sol.Z.resize(rows, static_cast<Eigen::Index>(steps));

    // Iterate 0: terminal values held flat, Z = 0.
    Eigen::MatrixXd y_prev = terminal.replicate(1, static_cast<Eigen::Index>(steps + 1));
    Eigen::MatrixXd z_prev = Eigen::MatrixXd::Zero(rows, static_cast<Eigen::Index>(steps));
    double y0_prev = terminal.mean();

    std::vector<double> cond_mean(m);
    std::vector<double> z_target(m);
    std::vector<double> z_hat(m);

    for (int iter = 1; iter <= disc.picard_max_iters; ++iter) {
        auto& Y = sol.Y;
        auto& Z = sol.Z;
        Y.col(static_cast<Eigen::Index>(steps)) = terminal;
        for (std::size_t kk = steps; kk-- > 0;) {
            const auto k = static_cast<Eigen::Index>(kk);
            const double* next = Y.col(k + 1).data();
            const double* dw = ensemble.dW.col(k).data();
            for (std::size_t p = 0; p < m; ++p) z_target[p] = next[p] * dw[p];

            projectors[kk]->project(std::span<const double>(next, m), cond_mean);
            projectors[kk]->project(z_target, z_hat);

            const double lam = lambda_at(params.intensity, grid[kk], params.maturity, n);
            const double lam_dt = lam * dt;
            const double constant = driver_constant(params);
            std::vector<char> block_overflow((m + kPathBlock - 1) / kPathBlock, 0);

            for_each_block(m, kPathBlock, threads, [&](std::size_t b, std::size_t begin, std::size_t end) {
                bool local_overflow = false;
                for (std::size_t p = begin; p < end; ++p) {
                    const auto row = static_cast<Eigen::Index>(p);
                    Z(row, k) = z_hat[p] / dt;
                    const double z_old = z_prev(row, k);
                    double g = z_old * theta + constant;
                    if (constrained) {
                        const double shifted = z_old + theta / alpha;
                        g -= 0.5 * alpha * params.constraint.distance_squared(std::span(&shifted, 1));
                    }
                    const double xi = ensemble.xi_a(row, k);
                    if (literal) {
                        const double expo = alpha * (xi - y_prev(row, k));
                        if (expo > kExponentLimit) {
                            local_overflow = true;
                            continue;
                        }
                        Y(row, k) = cond_mean[p] - dt * g - lam_dt * (-std::expm1(expo)) / alpha;
                    } else {
                        Y(row, k) = solve_implicit(cond_mean[p], dt * g, lam_dt, alpha, xi,
                                                   y_prev(row, k), local_overflow);
                    }
                }
                block_overflow[b] = local_overflow ? 1 : 0;
            });
            const bool overflowed =
                std::any_of(block_overflow.begin(), block_overflow.end(), [](char f) { return f != 0; });
            if (overflowed || !Y.col(k).allFinite()) overflow(iter, kk, sol.picard_residuals);
        }

        const double y0 = Y(0, 0);
        sol.picard_residuals.push_back(std::abs(y0 - y0_prev));
        sol.sup_gaps.push_back((Y - y_prev).cwiseAbs().maxCoeff());
        sol.picard_iters_used = iter;
        sol.y0 = y0;
        if (!std::isfinite(y0)) overflow(iter, 0, sol.picard_residuals);
        if (sol.picard_residuals.back() < disc.picard_tol) return sol;
        y_prev = Y;
        z_prev = Z;
        y0_prev = y0;
    }
    throw ConvergenceError("Picard iteration did not reach tolerance " +
                               std::to_string(disc.picard_tol) + " within " +
                               std::to_string(disc.picard_max_iters) + " iterations",
                           sol.picard_residuals);
}

double a_priori_bound(const ValidatedConfig& config) {
    const DriverParams params = driver_params(config);
    const double theta_norm = std::sqrt(dot(params.theta, params.theta));
    const double lip = std::max(theta_norm, driver_constant(params));
    const double t = params.maturity;
    const double sup_xi_a = std::visit(
        [](const auto& kind) -> double {
            using K = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<K, PutOnAsset>) {
                return kind.strike;
            } else if constexpr (std::is_same_v<K, ZeroClaim>) {
                return 0.0;
            } else {
                double s = 0.0;
                for (double v : kind.samples) s = std::max(s, std::abs(v));
                return s;
            }
        },
        config.claim().kind);
    return std::exp(lip * t) * (std::abs(config.claim().xi_b) + lip * t + sup_xi_a);
}

void write_bsde_path_csv(std::ostream& out, const TruncatedBsdeSolution& solution,
                         std::span<const double> grid, std::size_t path) {
    const auto row = static_cast<Eigen::Index>(path);
    if (row >= solution.Y.rows()) throw std::out_of_range("path index beyond the ensemble");
    csv::Writer w(out, {"k", "t", "Y", "Z"});
    const auto steps = solution.Z.cols();
    for (Eigen::Index k = 0; k <= steps; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        if (k < steps) {
            w.row(kk, grid[kk], solution.Y(row, k), solution.Z(row, k));
        } else {
            w.row(kk, grid[kk], solution.Y(row, k), std::string{});
        }
    }
}

}  // namespace singbsde

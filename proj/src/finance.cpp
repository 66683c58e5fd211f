#include "singbsde/finance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "singbsde/csv.hpp"

namespace singbsde {

double value_function(double x, double y0, double alpha) {
    return -std::exp(-alpha * (x - y0));
}

std::vector<double> optimal_strategy(std::span<const double> z_path,
                                     std::span<const double> theta, double alpha,
                                     const ConstraintSet& constraint, double tau_n,
                                     std::span<const double> grid) {
    if (theta.size() != 1) throw std::invalid_argument("optimal_strategy expects one factor");
    if (grid.size() < z_path.size()) throw std::invalid_argument("grid shorter than Z path");
    std::vector<double> p(z_path.size(), 0.0);
    for (std::size_t k = 0; k < z_path.size(); ++k) {
        if (grid[k] > tau_n) continue;
        const double target = z_path[k] + theta[0] / alpha;
        p[k] = constraint.project(std::span(&target, 1))[0];
    }
    return p;
}

std::vector<double> simulate_wealth(std::span<const double> strategy, std::span<const double> dW,
                                    double theta, double dt, double x) {
    if (strategy.size() != dW.size()) throw std::invalid_argument("strategy/increment length mismatch");
    std::vector<double> wealth(strategy.size() + 1);
    wealth[0] = x;
    for (std::size_t k = 0; k < strategy.size(); ++k) {
        wealth[k + 1] = wealth[k] + strategy[k] * (dW[k] + theta * dt);
    }
    return wealth;
}

IndifferencePrice indifference_price(const ValidatedConfig& config, const PathEnsemble& ensemble,
                                     int n) {
    const auto zero_config = config.with_claim(ClaimSpec{ZeroClaim{}, 0.0});
    const auto zero_ensemble = ensemble.with_claim(zero_config.claim(), config.market(), config.grid());
    IndifferencePrice out;
    out.y0_claim = solve_truncated(config, ensemble, n).y0;
    out.y0_zero = solve_truncated(zero_config, zero_ensemble, n).y0;
    out.price = out.y0_claim - out.y0_zero;
    return out;
}

double jackknife_se(std::span<const double> fold_values) {
    const std::size_t f = fold_values.size();
    if (f < 2) return 0.0;
    const double mean = std::accumulate(fold_values.begin(), fold_values.end(), 0.0) / static_cast<double>(f);
    double ss = 0.0;
    for (double v : fold_values) ss += (v - mean) * (v - mean);
    return std::sqrt(static_cast<double>(f - 1) / static_cast<double>(f) * ss);
}

double jackknife_difference_se(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("fold count mismatch");
    std::vector<double> diff(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
    return jackknife_se(diff);
}

SweepResult sweep(const ValidatedConfig& config, std::vector<int> levels, double x) {
    return sweep(config, std::move(levels), x, generate_ensemble(config));
}

SweepResult sweep(const ValidatedConfig& config, std::vector<int> levels, double x,
                  const PathEnsemble& ensemble) {
    if (levels.empty()) throw std::invalid_argument("sweep needs at least one truncation level");
    SweepResult result;
    result.wealth = x;
    std::sort(levels.begin(), levels.end());
    const auto last = std::unique(levels.begin(), levels.end());
    if (last != levels.end()) {
        result.warnings.emplace_back("duplicate truncation levels removed");
        levels.erase(last, levels.end());
    }
    for (int n : levels) check_truncation_level(n, config.dt());

    const auto zero_config = config.with_claim(ClaimSpec{ZeroClaim{}, 0.0});
    const double alpha = config.market().risk_aversion;
    const double maturity = config.market().maturity;

    auto solve_pair = [&](const PathEnsemble& claim_paths, int n) {
        const auto zero_paths = claim_paths.with_claim(zero_config.claim(), config.market(), config.grid());
        return std::pair{solve_truncated(config, claim_paths, n).y0,
                         solve_truncated(zero_config, zero_paths, n).y0};
    };

    for (int n : levels) {
        SweepRow row;
        row.n = n;
        row.p_n = survival_probability(n, maturity);
        std::tie(row.y0, row.y0_zero) = solve_pair(ensemble, n);
        row.value = value_function(x, row.y0, alpha);
        row.price = row.y0 - row.y0_zero;
        result.rows.push_back(std::move(row));
    }

    const auto folds = static_cast<std::size_t>(config.discretization().jackknife_folds);
    if (folds >= 2) {
        for (std::size_t f = 0; f < folds; ++f) {
            const auto reduced = ensemble.without_block(f, folds);
            for (auto& row : result.rows) {
                const auto [y0, y0_zero] = solve_pair(reduced, row.n);
                row.y0_folds.push_back(y0);
                row.price_folds.push_back(y0 - y0_zero);
            }
        }
        for (auto& row : result.rows) {
            row.y0_se = jackknife_se(row.y0_folds);
            row.price_se = jackknife_se(row.price_folds);
        }
    }
    return result;
}

void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    csv::Writer w(out, {"n", "p_n", "y0", "V", "P_n"});
    for (const auto& r : result.rows) w.row(r.n, r.p_n, r.y0, r.value, r.price);
}

void write_sweep_stats_csv(std::ostream& out, const SweepResult& result) {
    csv::Writer w(out, {"n", "y0_zero", "y0_se", "P_n_se"});
    for (const auto& r : result.rows) w.row(r.n, r.y0_zero, r.y0_se, r.price_se);
}

void write_strategy_csv(std::ostream& out, std::span<const double> grid,
                        std::span<const double> p_star, std::span<const double> p_star_nodefault) {
    if (p_star.size() != p_star_nodefault.size()) throw std::invalid_argument("strategy length mismatch");
    csv::Writer w(out, {"k", "t", "p_star", "p_star_nodefault"});
    for (std::size_t k = 0; k < p_star.size(); ++k) w.row(k, grid[k], p_star[k], p_star_nodefault[k]);
}

void write_wealth_csv(std::ostream& out, std::span<const double> grid,
                      std::span<const double> wealth) {
    csv::Writer w(out, {"k", "t", "X"});
    for (std::size_t k = 0; k < wealth.size(); ++k) w.row(k, grid[k], wealth[k]);
}

}  // namespace singbsde

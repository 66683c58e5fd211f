#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "singbsde/bsde.hpp"
#include "singbsde/model.hpp"
#include "singbsde/paths.hpp"

namespace singbsde {

// V(x) = -exp(-alpha (x - y0)).
[[nodiscard]] double value_function(double x, double y0, double alpha);

// p*(t_k) = Pi_C(Z(t_k) + theta / alpha) while t_k <= tau_n, 0 afterwards.
// One Brownian factor: z_path holds Z on the first grid.size() - 1 nodes.
[[nodiscard]] std::vector<double> optimal_strategy(std::span<const double> z_path,
                                                   std::span<const double> theta, double alpha,
                                                   const ConstraintSet& constraint, double tau_n,
                                                   std::span<const double> grid);

// X(t_{k+1}) = X(t_k) + p(t_k) (dW_k + theta dt).
[[nodiscard]] std::vector<double> simulate_wealth(std::span<const double> strategy,
                                                  std::span<const double> dW, double theta,
                                                  double dt, double x);

struct IndifferencePrice {
    double price = 0.0;  // Y0 (claim) - y0 (no claim)
    double y0_claim = 0.0;
    double y0_zero = 0.0;
};

// Both solves share the ensemble's Brownian paths.
[[nodiscard]] IndifferencePrice indifference_price(const ValidatedConfig& config,
                                                   const PathEnsemble& ensemble, int n);

// Delete-a-block jackknife standard error from leave-one-block-out estimates.
[[nodiscard]] double jackknife_se(std::span<const double> fold_values);

// Jackknife standard error of a - b, for estimates computed on the same folds.
[[nodiscard]] double jackknife_difference_se(std::span<const double> a,
                                             std::span<const double> b);

struct SweepRow {
    int n = 0;
    double p_n = 1.0;
    double y0 = 0.0;
    double y0_zero = 0.0;
    double value = 0.0;  // V^n(x)
    double price = 0.0;  // P_n
    double y0_se = 0.0;
    double price_se = 0.0;
    std::vector<double> y0_folds;
    std::vector<double> price_folds;
};

struct SweepResult {
    double wealth = 1.0;
    std::vector<SweepRow> rows;  // sorted by n
    std::vector<std::string> warnings;
};

// One ensemble reused for every level and for the claim / no-claim pair.
// Standard errors use config.discretization().jackknife_folds (0 skips them).
[[nodiscard]] SweepResult sweep(const ValidatedConfig& config, std::vector<int> levels, double x);
[[nodiscard]] SweepResult sweep(const ValidatedConfig& config, std::vector<int> levels, double x,
                                const PathEnsemble& ensemble);

void write_sweep_csv(std::ostream& out, const SweepResult& result);
void write_sweep_stats_csv(std::ostream& out, const SweepResult& result);
void write_strategy_csv(std::ostream& out, std::span<const double> grid,
                        std::span<const double> p_star, std::span<const double> p_star_nodefault);
void write_wealth_csv(std::ostream& out, std::span<const double> grid,
                      std::span<const double> wealth);

}  // namespace singbsde

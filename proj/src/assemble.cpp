#include "singbsde/assemble.hpp"

#include <cmath>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "singbsde/csv.hpp"
#include "singbsde/errors.hpp"

namespace singbsde {

namespace {

// Largest k with grid[k] <= tau.
std::size_t left_node(std::span<const double> grid, double tau) {
    std::size_t k = 0;
    while (k + 1 < grid.size() && grid[k + 1] <= tau) ++k;
    return k;
}

}  // namespace

double claim_at_default(const ValidatedConfig& config, const PathEnsemble& ensemble,
                        std::size_t path_index, double tau) {
    const auto& grid = config.grid();
    const std::size_t k = left_node(grid, tau);
    const auto row = static_cast<Eigen::Index>(path_index);
    const auto col = static_cast<Eigen::Index>(k);
    if (tau == grid[k]) return ensemble.xi_a(row, col);
    auto gen = path_generator(ensemble.seed_used, Stream::kDefaultBridge,
                              ensemble.path_ids[path_index]);
    std::normal_distribution<double> normal;
    const double w_tau = ensemble.W(row, col) + std::sqrt(tau - grid[k]) * normal(gen);
    return claim_value(config.claim(), config.market(), tau, w_tau);
}

GSolution assemble_g_solution(const ValidatedConfig& config, const TruncatedBsdeSolution& bsde,
                              const PathEnsemble& ensemble, std::size_t path_index,
                              const DefaultSample& default_sample) {
    if (default_sample.truncation_n != bsde.truncation_n) {
        throw ConsistencyError("default time sampled with truncation " +
                               std::to_string(default_sample.truncation_n) +
                               " but the BSDE was solved with " +
                               std::to_string(bsde.truncation_n));
    }
    if (path_index >= ensemble.n_paths() ||
        static_cast<Eigen::Index>(path_index) >= bsde.Y.rows()) {
        throw std::out_of_range("path index beyond the ensemble");
    }
    const auto& grid = config.grid();
    const std::size_t steps = config.n_steps();
    if (static_cast<std::size_t>(bsde.Z.cols()) != steps) {
        throw ConsistencyError("BSDE solution grid does not match the configuration");
    }
    const auto row = static_cast<Eigen::Index>(path_index);
    const double tau = default_sample.tau_n;

    GSolution g;
    g.tau_n = tau;
    g.truncation_n = default_sample.truncation_n;
    g.defaulted = default_sample.hit_before_T;
    g.default_index = left_node(grid, tau);
    g.post_default_value = claim_at_default(config, ensemble, path_index, tau);
    g.pre_default_value = bsde.Y(row, static_cast<Eigen::Index>(g.default_index));
    g.jump_size = g.post_default_value - g.pre_default_value;
    g.u_at_default = g.jump_size;

    g.Y.resize(steps + 1);
    g.after_default.resize(steps + 1);
    for (std::size_t k = 0; k <= steps; ++k) {
        const bool after = grid[k] >= tau;
        g.after_default[k] = after ? 1 : 0;
        g.Y[k] = after ? g.post_default_value : bsde.Y(row, static_cast<Eigen::Index>(k));
    }
    g.Z.resize(steps);
    g.U.resize(steps);
    for (std::size_t k = 0; k < steps; ++k) {
        const auto col = static_cast<Eigen::Index>(k);
        const bool alive = grid[k] <= tau;
        g.Z[k] = alive ? bsde.Z(row, col) : 0.0;
        g.U[k] = alive ? ensemble.xi_a(row, col) - bsde.Y(row, col) : 0.0;
    }
    return g;
}

void write_g_solution_csv(std::ostream& out, const GSolution& solution,
                          std::span<const double> grid) {
    csv::Writer w(out, {"k", "t", "Y", "Z", "U", "defaulted"});
    const std::size_t steps = solution.Z.size();
    for (std::size_t k = 0; k <= steps; ++k) {
        const int flag = solution.defaulted && solution.after_default[k] ? 1 : 0;
        if (k < steps) {
            w.row(k, grid[k], solution.Y[k], solution.Z[k], solution.U[k], flag);
        } else {
            w.row(k, grid[k], solution.Y[k], 0.0, 0.0, flag);
        }
    }
}

}  // namespace singbsde

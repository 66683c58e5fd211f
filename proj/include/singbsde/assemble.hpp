#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "singbsde/bsde.hpp"
#include "singbsde/model.hpp"
#include "singbsde/paths.hpp"

namespace singbsde {

// One path of (Y, Z, U) in the filtration enlarged by the default time:
//   Y = Y^b before tau, xi_a(tau) from tau on;
//   Z = Z^b up to tau, 0 after;
//   U = xi_a - Y^b up to tau, 0 after.
struct GSolution {
    double tau_n = 0.0;
    int truncation_n = 0;
    bool defaulted = false;        // tau_n < T
    std::size_t default_index = 0; // largest k with t_k <= tau_n
    double post_default_value = 0.0;  // xi_a(tau_n)
    double pre_default_value = 0.0;   // Y^b at the last grid node before tau_n
    double jump_size = 0.0;           // Y(tau) - Y(tau-)
    double u_at_default = 0.0;        // U(tau)
    std::vector<double> Y;  // N+1 grid values
    std::vector<double> Z;  // N values
    std::vector<double> U;  // N values
    std::vector<char> after_default;  // 1 where t_k >= tau_n, N+1 values
};

// xi_a at an off-grid default time: exact GBM from the left grid node with a
// fresh Gaussian increment of variance tau - t_k from the path's own stream.
[[nodiscard]] double claim_at_default(const ValidatedConfig& config, const PathEnsemble& ensemble,
                                      std::size_t path_index, double tau);

// Throws ConsistencyError if default and bsde were built for different truncation levels.
[[nodiscard]] GSolution assemble_g_solution(const ValidatedConfig& config,
                                            const TruncatedBsdeSolution& bsde,
                                            const PathEnsemble& ensemble, std::size_t path_index,
                                            const DefaultSample& default_sample);

void write_g_solution_csv(std::ostream& out, const GSolution& solution,
                          std::span<const double> grid);

}  // namespace singbsde

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <vector>

#include "singbsde/model.hpp"

namespace singbsde {

// Path-major storage: column k holds every path at grid time t_k.
struct PathEnsemble {
    Eigen::MatrixXd dW;    // M x N Brownian increments
    Eigen::MatrixXd W;     // M x (N+1), W(., 0) = 0
    Eigen::MatrixXd S;     // M x (N+1), exact GBM
    Eigen::MatrixXd xi_a;  // M x (N+1), claim paid at default
    std::uint64_t seed_used = 0;
    std::vector<std::size_t> path_ids;  // original path index, drives per-path substreams

    [[nodiscard]] std::size_t n_paths() const noexcept { return static_cast<std::size_t>(W.rows()); }
    [[nodiscard]] std::size_t n_steps() const noexcept { return static_cast<std::size_t>(dW.cols()); }

    // Same Brownian paths, claim values recomputed for another claim.
    [[nodiscard]] PathEnsemble with_claim(const ClaimSpec& claim, const MarketParams& market,
                                          std::span<const double> grid) const;

    // Paths outside block `fold` of `folds` contiguous blocks (delete-a-block jackknife).
    [[nodiscard]] PathEnsemble without_block(std::size_t fold, std::size_t folds) const;
};

// Independent random streams attached to every path.
enum class Stream : std::uint64_t { kBrownian = 1, kDefaultClock = 2, kDefaultBridge = 3 };

// Generator for (seed, stream, path); identical draws regardless of threading.
[[nodiscard]] std::mt19937_64 path_generator(std::uint64_t seed, Stream stream, std::size_t path);

[[nodiscard]] std::size_t ensemble_bytes(std::size_t n_paths, std::size_t n_steps);

// Throws ResourceError when the ensemble would exceed execution().max_ensemble_bytes.
[[nodiscard]] PathEnsemble generate_ensemble(const ValidatedConfig& config);

struct DefaultSample {
    double phi = 0.0;
    double tau_n = 0.0;
    bool hit_before_T = false;  // tau_n < T strictly
    int truncation_n = 0;
};

// tau_n = inf{t : int_0^t lambda ^ n >= phi} ^ T for the singular intensity.
[[nodiscard]] DefaultSample sample_default_time(double phi, int n, double maturity);

// Generic version through integrated_intensity (also handles the bounded kind and n = 0).
[[nodiscard]] DefaultSample sample_default_time(const IntensitySpec& spec, double phi, int n,
                                                double maturity);

// Exponential(1) clock of one path, from its dedicated stream.
[[nodiscard]] double draw_default_clock(std::uint64_t seed, std::size_t path);

[[nodiscard]] std::vector<DefaultSample> sample_default_times(const ValidatedConfig& config,
                                                              int n);

// P(no default before T) = exp(-int_0^T lambda ^ n ds).
[[nodiscard]] double survival_probability(int n, double maturity);

void write_paths_csv(std::ostream& out, const PathEnsemble& ensemble,
                     std::span<const double> grid);

}  // namespace singbsde

#pragma once

// Flat `key = value` configuration files. Lines starting with '#' and blank
// lines are ignored; unknown keys are rejected.
//
// Keys: maturity, alpha, theta, sigma, mu, s0, strike, lambda_kind,
// truncation_n, n_steps, n_paths, picard_max_iters, picard_tol,
// basis_degree, seed. Optional extensions: claim (put|zero), xi_b,
// lambda_level, driver_variant (scaled|unscaled), regression_state
// (brownian|asset), picard_mode (implicit|literal), jackknife_folds,
// constraint_lower, constraint_upper.
//
// Missing keys keep the values of reference_config().

#include <filesystem>
#include <string>
#include <string_view>

#include "singbsde/model.hpp"

namespace singbsde {

[[nodiscard]] ProblemConfig parse_config(std::string_view text);

// Throws ValidationError (field "config") when the file cannot be read.
[[nodiscard]] ProblemConfig load_config(const std::filesystem::path& path);

// Serializes every key so that parse_config(format_config(c)) == c.
[[nodiscard]] std::string format_config(const ProblemConfig& config);

}  // namespace singbsde

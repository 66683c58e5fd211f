#pragma once

// Oracle comparisons run by the `selftest` subcommand. Every report's
// tolerance is multiplied by `tolerance_scale`; 0 makes any inexact check fail.

#include <iosfwd>
#include <vector>

#include "singbsde/model.hpp"
#include "singbsde/oracles.hpp"

namespace singbsde {

// The Monte Carlo checks use the market, path count and seed of `config`.
[[nodiscard]] std::vector<OracleReport> run_selftest(const ValidatedConfig& config,
                                                     double tolerance_scale = 1.0);

void write_reports_csv(std::ostream& out, const std::vector<OracleReport>& reports);
void print_reports(std::ostream& out, const std::vector<OracleReport>& reports);

}  // namespace singbsde

#pragma once

// Independent reference values: closed forms and quadrature that never touch
// the Monte Carlo solver.

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace singbsde {

struct OracleReport {
    std::string name;
    double oracle_value = 0.0;
    double solver_value = 0.0;
    double abs_error = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

[[nodiscard]] OracleReport make_report(std::string name, double oracle_value, double solver_value,
                                       double tolerance);

using RealFunction = std::function<double(double)>;

// Composite Simpson on [a, b] starting from `panels` panels, doubled until two
// successive estimates differ by less than `tol` times the integral of |f|.
[[nodiscard]] double simpson(const RealFunction& f, double a, double b, int panels = 500,
                             double tol = 1e-10);

// y0_t = -|theta|^2 (T - t) / (2 alpha): the no-claim solution, with z = 0.
[[nodiscard]] double oracle_no_claim(double theta, double alpha, double maturity, double t);

// Zero-rate, zero-drift Black-Scholes put.
[[nodiscard]] double oracle_put_price(double s0, double strike, double sigma, double maturity);

// Y(t) = int_t^T lambda_s e^{-int_t^s lambda} xi(s) ds for lambda_s = 1/(T - s),
// where the weight collapses to 1 / (T - t). Throws DomainError for t >= T.
[[nodiscard]] double oracle_linear_bsde(const RealFunction& xi, double maturity, double t,
                                        int panels = 500);

struct LinearBsdeProfile {
    std::vector<double> values;      // Y on the grid, last node excluded (set to the limit)
    double terminal_limit = 0.0;     // Y(T-) evaluated just below T
    double terminal_value = 0.0;     // xi(T)
    double terminal_mismatch = 0.0;  // |Y(T-) - xi(T)|
    bool admits_solution = true;     // terminal_mismatch below 1e-6
};

[[nodiscard]] LinearBsdeProfile oracle_linear_bsde(const RealFunction& xi, double maturity,
                                                   std::span<const double> grid,
                                                   int panels = 500);

// Forward solution of x' = lambda (e^{xi} - x), x(0) = C, lambda = 1/(T - s),
// through the integrating factor e^{Lambda_t} = T / (T - t). The quadrature
// runs in the variable Lambda so that t = T is reached at Lambda = 40
// (e^{-40} is below double resolution relative to O(1) values).
[[nodiscard]] double singular_ode_state(const RealFunction& xi, double maturity, double t,
                                        double initial_value, int panels = 500);

struct SingularOdeProfile {
    std::vector<double> x;  // on the grid, including T
    std::vector<double> y;  // log x
    double terminal_x = 0.0;
    double forced_terminal_x = 0.0;  // e^{xi(T)}
};

// Throws DomainError if x <= 0 somewhere (inadmissible initial value).
[[nodiscard]] SingularOdeProfile oracle_singular_ode(const RealFunction& xi, double maturity,
                                                     std::span<const double> grid,
                                                     double initial_value, int panels = 500);

}  // namespace singbsde

#include "singbsde/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "singbsde/errors.hpp"

namespace singbsde {

namespace {

constexpr double kTerminalLambda = 40.0;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

struct SimpsonSums {
    double value = 0.0;
    double magnitude = 0.0;  // the same rule applied to |f|
};

SimpsonSums simpson_fixed(const RealFunction& f, double a, double b, int panels) {
    const double h = (b - a) / panels;
    SimpsonSums s;
    for (int i = 0; i <= panels; ++i) {
        const double w = (i == 0 || i == panels) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        const double v = f(a + i * h);
        s.value += w * v;
        s.magnitude += w * std::abs(v);
    }
    s.value *= h / 3.0;
    s.magnitude *= std::abs(h) / 3.0;
    return s;
}

}  // namespace

OracleReport make_report(std::string name, double oracle_value, double solver_value,
                         double tolerance) {
    OracleReport r;
    r.name = std::move(name);
    r.oracle_value = oracle_value;
    r.solver_value = solver_value;
    r.abs_error = std::abs(oracle_value - solver_value);
    r.tolerance = tolerance;
    r.pass = r.abs_error <= tolerance;
    return r;
}

double simpson(const RealFunction& f, double a, double b, int panels, double tol) {
    if (a == b) return 0.0;
    int n = std::max(2, panels + panels % 2);
    SimpsonSums prev = simpson_fixed(f, a, b, n);
    for (int round = 0; round < 14; ++round) {
        n *= 2;
        const SimpsonSums next = simpson_fixed(f, a, b, n);
        if (std::abs(next.value - prev.value) <= tol * next.magnitude) return next.value;
        prev = next;
    }
    return prev.value;
}

double oracle_no_claim(double theta, double alpha, double maturity, double t) {
    return -theta * theta * (maturity - t) / (2.0 * alpha);
}

double oracle_put_price(double s0, double strike, double sigma, double maturity) {
    if (strike <= 0.0) return 0.0;
    const double vol = sigma * std::sqrt(maturity);
    if (vol <= 0.0) return std::max(strike - s0, 0.0);
    const double d1 = (std::log(s0 / strike) + 0.5 * vol * vol) / vol;
    const double d2 = d1 - vol;
    return strike * normal_cdf(-d2) - s0 * normal_cdf(-d1);
}

double oracle_linear_bsde(const RealFunction& xi, double maturity, double t, int panels) {
    if (t >= maturity) throw DomainError("linear BSDE oracle is defined for t < T");
    return simpson(xi, t, maturity, panels, 1e-12) / (maturity - t);
}

LinearBsdeProfile oracle_linear_bsde(const RealFunction& xi, double maturity,
                                     std::span<const double> grid, int panels) {
    LinearBsdeProfile out;
    out.terminal_value = xi(maturity);
    out.terminal_limit = oracle_linear_bsde(xi, maturity, maturity * (1.0 - 1e-9), panels);
    out.terminal_mismatch = std::abs(out.terminal_limit - out.terminal_value);
    out.admits_solution = out.terminal_mismatch < 1e-6;
    out.values.reserve(grid.size());
    for (double t : grid) {
        out.values.push_back(t < maturity ? oracle_linear_bsde(xi, maturity, t, panels)
                                          : out.terminal_limit);
    }
    return out;
}

double singular_ode_state(const RealFunction& xi, double maturity, double t, double initial_value,
                          int panels) {
    if (t < 0.0 || t > maturity) throw DomainError("ODE oracle evaluated outside [0, T]");
    // Lambda_t = log(T / (T - t)); s(l) = T (1 - e^{-l}) inverts it.
    const double big_lambda =
        t >= maturity ? kTerminalLambda
                      : std::min(kTerminalLambda, std::log(maturity / (maturity - t)));
    const auto integrand = [&](double l) {
        return std::exp(xi(-maturity * std::expm1(-l)) + l - big_lambda);
    };
    return initial_value * std::exp(-big_lambda) + simpson(integrand, 0.0, big_lambda, panels, 1e-13);
}

SingularOdeProfile oracle_singular_ode(const RealFunction& xi, double maturity,
                                       std::span<const double> grid, double initial_value,
                                       int panels) {
    SingularOdeProfile out;
    out.x.reserve(grid.size());
    out.y.reserve(grid.size());
    for (double t : grid) {
        const double x = singular_ode_state(xi, maturity, t, initial_value, panels);
        if (!(x > 0.0)) throw DomainError("ODE oracle produced x <= 0; log undefined");
        out.x.push_back(x);
        out.y.push_back(std::log(x));
    }
    out.terminal_x = singular_ode_state(xi, maturity, maturity, initial_value, panels);
    out.forced_terminal_x = std::exp(xi(maturity));
    return out;
}

}  // namespace singbsde

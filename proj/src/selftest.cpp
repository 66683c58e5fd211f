#include "singbsde/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>

#include "singbsde/bsde.hpp"
#include "singbsde/csv.hpp"
#include "singbsde/paths.hpp"

namespace singbsde {

namespace {

ValidatedConfig zero_claim_no_default(const ValidatedConfig& config) {
    auto c = config.config();
    c.claim = ClaimSpec{ZeroClaim{}, 0.0};
    c.intensity.truncation_n = 0;
    return validate(c);
}

double solve_y0(const ValidatedConfig& config, int n) {
    return solve_truncated(config, generate_ensemble(config), n).y0;
}

// theta = 0, alpha = 1e-3 and xi_a(s) = s: the exponential driver is linear
// to O(alpha) and the solution is the average of xi_a over [t, T].
ValidatedConfig linear_case(const ValidatedConfig& config) {
    auto c = config.config();
    c.market.theta = {0.0};
    c.market.mu = 0.0;
    c.market.risk_aversion = 1e-3;
    c.constraint = ConstraintSet{};
    DeterministicFunction fn;
    for (double t : config.grid()) fn.samples.push_back(t);
    c.claim = ClaimSpec{fn, 0.0};
    c.intensity.kind = IntensityKind::kSingular;
    c.intensity.truncation_n = static_cast<int>(std::floor(1.0 / config.dt() + 1e-9));
    return validate(c);
}

OracleReport empirical_survival(const ValidatedConfig& config, int n, double tolerance) {
    const auto samples = sample_default_times(config.with_truncation(n), n);
    const double maturity = config.market().maturity;
    IntensitySpec spec = config.intensity();
    spec.truncation_n = n;
    double worst = 0.0;
    double worst_oracle = 1.0;
    double worst_empirical = 1.0;
    for (double t : config.grid()) {
        const auto alive = std::count_if(samples.begin(), samples.end(), [&](const DefaultSample& s) {
            return t < maturity ? s.tau_n > t : !s.hit_before_T;
        });
        const double empirical = static_cast<double>(alive) / static_cast<double>(samples.size());
        const double exact = std::exp(-integrated_intensity(spec, t, maturity, n));
        if (std::abs(empirical - exact) >= worst) {
            worst = std::abs(empirical - exact);
            worst_oracle = exact;
            worst_empirical = empirical;
        }
    }
    return make_report("empirical_survival_n" + std::to_string(n), worst_oracle, worst_empirical,
                       tolerance);
}

OracleReport projection_check(double tolerance) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
        double lo = u(rng);
        double hi = u(rng);
        if (lo > hi) std::swap(lo, hi);
        const ConstraintSet box{Box{{lo}, {hi}}};
        const double a = u(rng) * 1.5;
        const double p = box.project(std::span(&a, 1))[0];
        // brute force over a fine grid of the interval
        double best = std::abs(a - lo);
        constexpr int kCells = 2000;
        for (int j = 0; j <= kCells; ++j) {
            const double b = lo + (hi - lo) * j / kCells;
            best = std::min(best, std::abs(a - b));
        }
        worst = std::max(worst, std::abs(std::abs(a - p) - best));
        const double inside = 0.5 * (lo + hi);
        worst = std::max(worst, box.distance_squared(std::span(&inside, 1)));
    }
    return make_report("projection_brute_force", 0.0, worst, tolerance);
}

}  // namespace

std::vector<OracleReport> run_selftest(const ValidatedConfig& config, double scale) {
    std::vector<OracleReport> out;
    const auto& market = config.market();
    const double theta = market.theta.at(0);
    const double maturity = market.maturity;
    const double m = static_cast<double>(config.n_paths());

    const auto zero = zero_claim_no_default(config);
    const double no_claim = oracle_no_claim(theta, market.risk_aversion, maturity, 0.0);
    out.push_back(make_report("no_claim_y0", no_claim, solve_y0(zero, 0), 0.05 * scale));

    auto put_cfg = config.config();
    put_cfg.claim = ClaimSpec{PutOnAsset{std::visit(
                                  [](const auto& k) {
                                      if constexpr (requires { k.strike; }) return k.strike;
                                      else return 1.0;
                                  },
                                  config.claim().kind)},
                              0.0};
    put_cfg.intensity.truncation_n = 0;
    const auto put = validate(put_cfg);
    const double strike = std::get<PutOnAsset>(put.claim().kind).strike;
    const auto ensemble = generate_ensemble(put);
    const auto solution = solve_truncated(put, ensemble, 0);
    out.push_back(make_report(
        "put_n0_y0", oracle_put_price(market.s0, strike, market.sigma, maturity) + no_claim,
        solution.y0, 0.08 * scale));

    for (int n : {1, 2, 10, 50}) {
        const double nt = n * maturity;
        const double exact = nt <= 1.0 ? std::exp(-nt) : std::exp(-1.0) / nt;
        out.push_back(make_report("survival_closed_form_n" + std::to_string(n), exact,
                                  survival_probability(n, maturity),
                                  4.0 * std::numeric_limits<double>::epsilon() * scale));
    }
    for (int n : {1, 10}) {
        if (n * config.dt() > 1.0 + 1e-9) continue;
        out.push_back(empirical_survival(config, n, 4.0 / std::sqrt(m) * scale));
    }

    const auto linear = linear_case(config);
    const double linear_oracle =
        oracle_linear_bsde([](double s) { return s; }, maturity, 0.0);
    const auto linear_solution = solve_truncated(linear, generate_ensemble(linear),
                                                 linear.intensity().truncation_n);
    out.push_back(make_report("linear_bsde_y0", linear_oracle, linear_solution.y0, 0.02 * scale));

    const std::vector<std::pair<const char*, RealFunction>> claims = {
        {"ode_terminal_identity", [maturity](double s) { return s / maturity; }},
        {"ode_terminal_sine", [](double s) { return std::sin(2.0 * s); }},
        {"ode_terminal_quadratic", [](double s) { return 0.5 - s * s; }},
    };
    for (const auto& [name, xi] : claims) {
        const double x_t = singular_ode_state(xi, maturity, maturity, 1.0);
        out.push_back(make_report(name, std::exp(xi(maturity)), x_t, 1e-6 * scale));
        const double perturbed = singular_ode_state(xi, maturity, maturity, 1.5);
        out.push_back(make_report(std::string(name) + "_c_invariance", x_t, perturbed, 1e-6 * scale));
    }

    out.push_back(projection_check(4e-3 * scale));

    // The backward sweep starts from the claim itself.
    const auto last = static_cast<Eigen::Index>(put.n_steps());
    const double terminal_gap = (solution.Y.col(last) - ensemble.xi_a.col(last)).cwiseAbs().maxCoeff();
    out.push_back(make_report("terminal_condition", 0.0, terminal_gap, 0.0));
    return out;
}

void write_reports_csv(std::ostream& out, const std::vector<OracleReport>& reports) {
    csv::Writer w(out, {"name", "oracle_value", "solver_value", "abs_error", "tolerance", "pass"});
    for (const auto& r : reports) {
        w.row(r.name, r.oracle_value, r.solver_value, r.abs_error, r.tolerance, r.pass ? 1 : 0);
    }
}

void print_reports(std::ostream& out, const std::vector<OracleReport>& reports) {
    char line[256];
    for (const auto& r : reports) {
        std::snprintf(line, sizeof line, "%-4s %-34s oracle=% .8f solver=% .8f err=%.3e tol=%.3e\n",
                      r.pass ? "PASS" : "FAIL", r.name.c_str(), r.oracle_value, r.solver_value,
                      r.abs_error, r.tolerance);
        out << line;
    }
}

}  // namespace singbsde

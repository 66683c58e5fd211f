#include "singbsde/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "singbsde/errors.hpp"

namespace singbsde {
namespace {

// Plain Monte Carlo of E[(K - s0 e^{sigma sqrt(T) G - sigma^2 T / 2})^+].
double monte_carlo_put(double s0, double strike, double sigma, double maturity, int draws,
                       double& standard_error) {
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> g;
    const double vol = sigma * std::sqrt(maturity);
    double sum = 0.0;
    double sum2 = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double payoff = std::max(strike - s0 * std::exp(vol * g(rng) - 0.5 * vol * vol), 0.0);
        sum += payoff;
        sum2 += payoff * payoff;
    }
    const double mean = sum / draws;
    standard_error = std::sqrt((sum2 / draws - mean * mean) / draws);
    return mean;
}

TEST(OracleTest, NoClaim) {
    EXPECT_DOUBLE_EQ(oracle_no_claim(1.0, 0.25, 1.0, 0.0), -2.0);
    EXPECT_EQ(oracle_no_claim(1.0, 0.25, 1.0, 1.0), 0.0);
    EXPECT_EQ(oracle_no_claim(0.0, 0.25, 1.0, 0.3), 0.0);
}

TEST(OracleTest, PutAgainstMonteCarlo) {
    double se = 0.0;
    const double mc = monte_carlo_put(0.5, 1.0, 1.0, 1.0, 1000000, se);
    const double exact = oracle_put_price(0.5, 1.0, 1.0, 1.0);
    EXPECT_NEAR(exact, 0.5952, 2e-4);
    EXPECT_NEAR(exact, mc, 4.0 * se);
}

TEST(OracleTest, PutLimits) {
    EXPECT_EQ(oracle_put_price(0.5, 0.0, 1.0, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(oracle_put_price(0.5, 1.0, 0.0, 1.0), 0.5);
    EXPECT_NEAR(oracle_put_price(0.5, 1.0, 1e-9, 1.0), 0.5, 1e-12);
}

TEST(OracleTest, Simpson) {
    EXPECT_NEAR(simpson([](double x) { return std::exp(x); }, 0.0, 1.0), std::exp(1.0) - 1.0, 1e-12);
    EXPECT_EQ(simpson([](double) { return 1.0; }, 0.3, 0.3), 0.0);
}

TEST(OracleTest, LinearBsde) {
    const auto identity = [](double s) { return s; };
    for (double t : {0.0, 0.3, 0.9}) {
        EXPECT_NEAR(oracle_linear_bsde(identity, 1.0, t), (1.0 + t) / 2.0, 1e-10);
        EXPECT_NEAR(oracle_linear_bsde([](double) { return 0.7; }, 1.0, t), 0.7, 1e-12);
    }
    EXPECT_THROW((void)oracle_linear_bsde(identity, 1.0, 1.0), DomainError);

    const std::vector<double> grid{0.0, 0.5, 1.0};
    const auto smooth = oracle_linear_bsde(identity, 1.0, grid);
    EXPECT_TRUE(smooth.admits_solution);
    EXPECT_NEAR(smooth.values[1], 0.75, 1e-10);
    EXPECT_NEAR(smooth.terminal_limit, 1.0, 1e-8);

    // xi = 1 on [0, T), 0 at T: the average stays 1 and never meets the terminal value.
    const auto jump = oracle_linear_bsde([](double s) { return s < 1.0 ? 1.0 : 0.0; }, 1.0, grid);
    EXPECT_FALSE(jump.admits_solution);
    EXPECT_NEAR(jump.values[0], 1.0, 1e-6);
    EXPECT_NEAR(jump.terminal_mismatch, 1.0, 1e-6);
}

TEST(OracleTest, SingularOdeForcedTerminalValue) {
    std::vector<double> grid;
    for (int k = 0; k <= 100; ++k) grid.push_back(k / 100.0);
    const std::vector<RealFunction> claims = {
        [](double s) { return s; },
        [](double s) { return std::cos(3.0 * s); },
        [](double s) { return 1.0 - 0.5 * s * s; },
    };
    for (const auto& xi : claims) {
        const auto profile = oracle_singular_ode(xi, 1.0, grid, 1.0);
        EXPECT_NEAR(profile.terminal_x, profile.forced_terminal_x, 1e-6);
        EXPECT_NEAR(profile.y.back(), xi(1.0), 1e-6);
        for (double c : {0.5, 2.0, 10.0}) {
            EXPECT_NEAR(singular_ode_state(xi, 1.0, 1.0, c), profile.terminal_x, 1e-6);
        }
    }
}

TEST(OracleTest, SingularOdeConstantClaimIsFixedPoint) {
    const std::vector<double> grid{0.0, 0.25, 0.5, 0.75, 1.0};
    const auto profile = oracle_singular_ode([](double) { return 0.4; }, 1.0, grid, std::exp(0.4));
    for (double y : profile.y) EXPECT_NEAR(y, 0.4, 1e-9);
}

TEST(OracleTest, SingularOdeSolvesTheOde) {
    // x' = (e^{xi} - x) / (T - t), checked by a central difference
    const auto xi = [](double s) { return std::sin(s); };
    const double t = 0.4;
    const double h = 1e-4;
    const double dx = (singular_ode_state(xi, 1.0, t + h, 1.0) - singular_ode_state(xi, 1.0, t - h, 1.0)) / (2 * h);
    const double x = singular_ode_state(xi, 1.0, t, 1.0);
    EXPECT_NEAR(dx, (std::exp(xi(t)) - x) / (1.0 - t), 1e-6);
}

TEST(OracleTest, InadmissibleInitialValue) {
    const std::vector<double> grid{0.0, 0.5};
    EXPECT_THROW((void)oracle_singular_ode([](double) { return 0.0; }, 1.0, grid, -5.0), DomainError);
}

TEST(OracleTest, ReportPassFlag) {
    EXPECT_TRUE(make_report("a", 1.0, 1.05, 0.1).pass);
    EXPECT_FALSE(make_report("a", 1.0, 1.2, 0.1).pass);
    EXPECT_FALSE(make_report("a", 1.0, 1.0 + 1e-12, 0.0).pass);
    EXPECT_TRUE(make_report("a", 1.0, 1.0, 0.0).pass);
}

}  // namespace
}  // namespace singbsde

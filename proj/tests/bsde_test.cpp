#include "singbsde/bsde.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "singbsde/errors.hpp"
#include "singbsde/oracles.hpp"

namespace singbsde {
namespace {

using testing::small_config;

TEST(DriverTest, ConstantTermVariants) {
    DriverParams p;
    p.alpha = 0.25;
    p.theta = {1.0};
    EXPECT_DOUBLE_EQ(driver_constant(p), 2.0);
    p.variant = DriverVariant::kUnscaled;
    EXPECT_DOUBLE_EQ(driver_constant(p), 0.5);
}

TEST(DriverTest, DistanceTermVanishesInsideConstraint) {
    DriverParams p;
    p.alpha = 0.25;
    p.theta = {1.0};
    p.constraint.kind = Box{{-10.0}, {10.0}};
    const double z = 0.3;  // z + theta / alpha = 4.3, inside the box
    EXPECT_DOUBLE_EQ(driver_gb(p, 0.0, std::span(&z, 1)), 0.3 + 2.0);
    p.constraint.kind = Box{{0.0}, {4.0}};  // 0.3 outside by 0.3
    EXPECT_NEAR(driver_gb(p, 0.0, std::span(&z, 1)), 2.3 - 0.125 * 0.09, 1e-15);
}

TEST(DriverTest, DefaultTermIsStableForSmallAlpha) {
    // lambda (1 - e^{alpha u}) / alpha -> -lambda u as alpha -> 0
    EXPECT_NEAR(default_term(1e-3, 2.0, 0.5), -1.0, 1e-3);
    EXPECT_NEAR(default_term(1e-12, 2.0, 0.5), -1.0, 1e-11);
    EXPECT_EQ(default_term(0.25, 0.0, 100.0), 0.0);
    DriverParams p;
    p.alpha = 0.5;
    p.theta = {0.0};
    const double z = 0.0;
    // lambda at t = 0.5 with n = 50 is 2
    EXPECT_NEAR(driver_full(p, 0.5, std::span(&z, 1), 1.0, 50), 2.0 * -std::expm1(0.5) / 0.5, 1e-14);
}

TEST(SolverTest, NoClaimClosedForm) {
    auto c = small_config(20000, 50);
    c.claim = ClaimSpec{ZeroClaim{}, 0.0};
    const auto v = validate(c);
    const auto sol = solve_truncated(v, generate_ensemble(v), 0);
    EXPECT_NEAR(sol.y0, oracle_no_claim(1.0, 0.25, 1.0, 0.0), 0.05);
    // y_t = -2 (1 - t) on every path
    EXPECT_NEAR(sol.Y.col(25).mean(), -1.0, 0.05);
    // z = 0; only regression noise of order |Y| / sqrt(M dt) remains
    EXPECT_LT(sol.Z.cwiseAbs().mean(), 0.15);
}

TEST(SolverTest, PutWithoutDefault) {
    const auto v = validate(small_config(20000, 50));
    const auto sol = solve_truncated(v, generate_ensemble(v), 0);
    const double oracle = oracle_put_price(0.5, 1.0, 1.0, 1.0) - 2.0;
    EXPECT_NEAR(sol.y0, oracle, 0.08);
    EXPECT_EQ(sol.truncation_n, 0);
    EXPECT_EQ(sol.picard_residuals.size(), static_cast<std::size_t>(sol.picard_iters_used));
    EXPECT_LT(sol.picard_residuals.back(), 1e-4);
}

TEST(SolverTest, LinearSingularCase) {
    auto c = small_config(5000, 50);
    c.market.theta = {0.0};
    c.market.mu = 0.0;
    c.market.risk_aversion = 1e-3;
    DeterministicFunction fn;
    for (int k = 0; k <= 50; ++k) fn.samples.push_back(k / 50.0);
    c.claim = ClaimSpec{fn, 0.0};
    const auto v = validate(c);
    const auto sol = solve_truncated(v, generate_ensemble(v), 50);
    EXPECT_NEAR(sol.y0, 0.5, 0.02);
}

TEST(SolverTest, SolutionBoundedByStrike) {
    // With a driver >= theta^2 / (2 alpha) > 0 wherever Y >= xi_a, Y never exceeds max xi_a = K.
    const auto v = validate(small_config(4000, 50));
    const auto e = generate_ensemble(v);
    for (int n : {1, 10, 50}) {
        const auto sol = solve_truncated(v, e, n);
        EXPECT_LE(sol.Y.maxCoeff(), 1.0 + 1e-6) << n;
        EXPECT_LE(sol.y0, a_priori_bound(v));
    }
}

TEST(SolverTest, IncreasesWithTruncationLevel) {
    const auto v = validate(small_config(4000, 50));
    const auto e = generate_ensemble(v);
    double prev = solve_truncated(v, e, 0).y0;
    for (int n : {1, 2, 10, 50}) {
        const double y0 = solve_truncated(v, e, n).y0;
        EXPECT_GE(y0, prev - 1e-3) << n;
        prev = y0;
    }
}

TEST(SolverTest, LiteralAndImplicitAgreeAtModerateLevel) {
    auto c = small_config(4000, 50);
    const auto v = validate(c);
    const auto e = generate_ensemble(v);
    c.discretization.picard_mode = PicardMode::kLiteral;
    c.discretization.picard_max_iters = 60;
    c.discretization.picard_tol = 1e-7;
    const auto literal = solve_truncated(validate(c), e, 2);
    const auto implicit = solve_truncated(v, e, 2);
    EXPECT_NEAR(literal.y0, implicit.y0, 5e-3);
}

TEST(SolverTest, IdenticalAcrossThreadCounts) {
    auto c = small_config(9000, 20);
    const auto v1 = validate(c);
    c.execution.threads = 4;
    const auto v4 = validate(c);
    const auto e = generate_ensemble(v1);
    const auto a = solve_truncated(v1, e, 10);
    const auto b = solve_truncated(v4, e, 10);
    EXPECT_EQ(a.Y, b.Y);
    EXPECT_EQ(a.Z, b.Z);
}

TEST(SolverTest, TerminalConditionIsTheClaim) {
    const auto v = validate(small_config(2000, 20));
    const auto e = generate_ensemble(v);
    const auto sol = solve_truncated(v, e, 5);
    EXPECT_EQ(sol.Y.col(20), e.xi_a.col(20));
}

TEST(SolverTest, Errors) {
    auto c = small_config(2000, 20);
    const auto v = validate(c);
    const auto e = generate_ensemble(v);
    EXPECT_THROW((void)solve_truncated(v, e, 21), ValidationError);

    const auto other = generate_ensemble(validate(small_config(2000, 10)));
    EXPECT_THROW((void)solve_truncated(v, other, 0), ConsistencyError);

    c.discretization.picard_max_iters = 1;
    c.discretization.picard_tol = 1e-12;
    try {
        (void)solve_truncated(validate(c), e, 5);
        FAIL();
    } catch (const ConvergenceError& err) {
        EXPECT_EQ(err.residuals().size(), 1u);
    }
}

TEST(SolverTest, PathCsv) {
    const auto v = validate(small_config(100, 4));
    const auto sol = solve_truncated(v, generate_ensemble(v), 0);
    std::ostringstream out;
    write_bsde_path_csv(out, sol, v.grid(), 3);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "k,t,Y,Z");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    EXPECT_EQ(rows, 5);
    EXPECT_THROW(write_bsde_path_csv(out, sol, v.grid(), 100), std::out_of_range);
}

}  // namespace
}  // namespace singbsde

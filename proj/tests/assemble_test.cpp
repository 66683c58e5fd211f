#include "singbsde/assemble.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "helpers.hpp"
#include "singbsde/errors.hpp"

namespace singbsde {
namespace {

using testing::small_config;

class AssembleTest : public ::testing::Test {
protected:
    void SetUp() override {
        config_ = std::make_unique<ValidatedConfig>(validate(small_config(2000, 50, 10)));
        ensemble_ = generate_ensemble(*config_);
        bsde_ = solve_truncated(*config_, ensemble_, 10);
        samples_ = sample_default_times(*config_, 10);
    }

    std::unique_ptr<ValidatedConfig> config_;
    PathEnsemble ensemble_;
    TruncatedBsdeSolution bsde_;
    std::vector<DefaultSample> samples_;
};

TEST_F(AssembleTest, InvariantsOnManyPaths) {
    const auto& grid = config_->grid();
    int defaults = 0;
    for (std::size_t p = 0; p < 1000; ++p) {
        const auto g = assemble_g_solution(*config_, bsde_, ensemble_, p, samples_[p]);
        const auto row = static_cast<Eigen::Index>(p);
        defaults += g.defaulted ? 1 : 0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const auto col = static_cast<Eigen::Index>(k);
            if (grid[k] < g.tau_n) {
                ASSERT_EQ(g.Y[k], bsde_.Y(row, col));
                if (k < g.Z.size()) {
                    ASSERT_EQ(g.Z[k], bsde_.Z(row, col));
                    ASSERT_EQ(g.U[k], ensemble_.xi_a(row, col) - bsde_.Y(row, col));
                }
            } else {
                ASSERT_EQ(g.Y[k], g.post_default_value);
            }
            if (grid[k] > g.tau_n && k < g.Z.size()) {
                ASSERT_EQ(g.Z[k], 0.0);
                ASSERT_EQ(g.U[k], 0.0);
            }
        }
        ASSERT_DOUBLE_EQ(g.jump_size, g.post_default_value - g.pre_default_value);
        ASSERT_DOUBLE_EQ(g.u_at_default, g.jump_size);
    }
    // P(tau_10 < 1) = 1 - e^{-1}/10
    EXPECT_NEAR(defaults / 1000.0, 1.0 - std::exp(-1.0) / 10.0, 0.04);
}

TEST_F(AssembleTest, OnGridDefaultUsesGridClaim) {
    // phi chosen so that tau = 1 - e^{-phi} = 0.5 exactly
    const DefaultSample s{std::log(2.0), 0.5, true, 10};
    const auto g = assemble_g_solution(*config_, bsde_, ensemble_, 4, s);
    EXPECT_EQ(g.default_index, 25u);
    EXPECT_EQ(g.post_default_value, ensemble_.xi_a(4, 25));
}

TEST_F(AssembleTest, OffGridClaimIsReproducible) {
    const double a = claim_at_default(*config_, ensemble_, 7, 0.433);
    const double b = claim_at_default(*config_, ensemble_, 7, 0.433);
    EXPECT_EQ(a, b);
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
}

TEST_F(AssembleTest, NoDefaultKeepsBrownianSolution) {
    const DefaultSample s{5.0, 1.0, false, 10};
    const auto g = assemble_g_solution(*config_, bsde_, ensemble_, 0, s);
    EXPECT_FALSE(g.defaulted);
    for (std::size_t k = 0; k < g.Z.size(); ++k) EXPECT_EQ(g.Z[k], bsde_.Z(0, static_cast<Eigen::Index>(k)));
    EXPECT_EQ(g.Y.back(), ensemble_.xi_a(0, 50));
}

TEST_F(AssembleTest, Errors) {
    EXPECT_THROW((void)assemble_g_solution(*config_, bsde_, ensemble_, 0, DefaultSample{1.0, 0.6, true, 2}),
                 ConsistencyError);
    EXPECT_THROW((void)assemble_g_solution(*config_, bsde_, ensemble_, 5000, samples_[0]),
                 std::out_of_range);
}

TEST_F(AssembleTest, Csv) {
    const auto g = assemble_g_solution(*config_, bsde_, ensemble_, 1, samples_[1]);
    std::ostringstream out;
    write_g_solution_csv(out, g, config_->grid());
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "k,t,Y,Z,U,defaulted");
}

}  // namespace
}  // namespace singbsde

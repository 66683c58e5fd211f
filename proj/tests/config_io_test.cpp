#include "singbsde/config_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "singbsde/errors.hpp"

namespace singbsde {
namespace {

constexpr const char* kReference = R"(# reference market
maturity = 1
alpha = 0.25
theta = 1
sigma = 1
mu = 1
s0 = 0.5
strike = 1
lambda_kind = singular
truncation_n = 50
n_steps = 50
n_paths = 100000
picard_max_iters = 20
picard_tol = 1e-4
basis_degree = 3
seed = 20240601
)";

TEST(ConfigIoTest, ParsesFixedKeys) {
    const auto c = parse_config(kReference);
    EXPECT_EQ(c, reference_config());
}

TEST(ConfigIoTest, UnknownKeyIsAnError) {
    try {
        (void)parse_config(std::string(kReference) + "gamma = 3\n");
        FAIL();
    } catch (const ValidationError& e) {
        EXPECT_EQ(e.field(), "gamma");
    }
}

TEST(ConfigIoTest, MalformedValues) {
    EXPECT_THROW((void)parse_config("alpha = abc\n"), ValidationError);
    EXPECT_THROW((void)parse_config("n_steps = 2.5\n"), ValidationError);
    EXPECT_THROW((void)parse_config("just a line\n"), ValidationError);
    EXPECT_THROW((void)parse_config("lambda_kind = weird\n"), ValidationError);
    EXPECT_THROW((void)parse_config("constraint_lower = 0\n"), ValidationError);
}

TEST(ConfigIoTest, RoundTrip) {
    auto c = reference_config();
    c.market.risk_aversion = 0.1 + 0.2;
    c.constraint.kind = Box{{-0.5}, {1.0 / 3.0}};
    c.driver_variant = DriverVariant::kUnscaled;
    c.discretization.picard_mode = PicardMode::kLiteral;
    c.intensity.kind = IntensityKind::kBoundedConstant;
    c.intensity.level = 2.5;
    c.claim.xi_b = 0.25;
    EXPECT_EQ(parse_config(format_config(c)), c);

    c.claim.kind = ZeroClaim{};
    EXPECT_EQ(parse_config(format_config(c)), c);
}

TEST(ConfigIoTest, LoadMissingFile) {
    EXPECT_THROW((void)load_config("/nonexistent/cfg.txt"), ValidationError);
    const auto path = std::filesystem::temp_directory_path() / "singbsde_cfg_test.cfg";
    std::ofstream(path) << kReference;
    EXPECT_EQ(load_config(path), reference_config());
    std::filesystem::remove(path);
}

}  // namespace
}  // namespace singbsde

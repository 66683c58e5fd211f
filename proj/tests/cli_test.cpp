#include "app.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace singbsde {
namespace {

namespace fs = std::filesystem;

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("singbsde_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
        write_config("small.cfg", "");
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path write_config(const std::string& name, const std::string& extra) {
        const auto path = dir_ / name;
        std::ofstream(path) << "maturity = 1\nalpha = 0.25\ntheta = 1\nsigma = 1\nmu = 1\n"
                               "s0 = 0.5\nstrike = 1\nlambda_kind = singular\ntruncation_n = 0\n"
                               "n_steps = 20\nn_paths = 2000\npicard_max_iters = 20\n"
                               "picard_tol = 1e-4\nbasis_degree = 3\nseed = 5\n"
                            << extra;
        return path;
    }

    int run(std::vector<std::string> args) {
        args.insert(args.begin(), "singbsde");
        out_.str("");
        err_.str("");
        return app::run(args, out_, err_);
    }

    std::string read(const fs::path& p) {
        std::ifstream in(p);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    }

    fs::path dir_;
    std::ostringstream out_;
    std::ostringstream err_;
};

TEST_F(CliTest, SolveWritesCsvAndManifestLast) {
    const auto out = (dir_ / "solve").string();
    ASSERT_EQ(run({"solve", "--config", (dir_ / "small.cfg").string(), "--out", out, "--path-index", "3"}), 0)
        << err_.str();
    EXPECT_EQ(read(dir_ / "solve" / "bsde_n0.csv").substr(0, 8), "k,t,Y,Z\n");
    EXPECT_EQ(read(dir_ / "solve" / "assemble_n0.csv").substr(0, 20), "k,t,Y,Z,U,defaulted\n");
    const auto manifest = nlohmann::json::parse(read(dir_ / "solve" / "manifest.json"));
    EXPECT_EQ(manifest["subcommand"], "solve");
    EXPECT_EQ(manifest["seed"], 5);
    EXPECT_EQ(manifest["outputs"].size(), 2u);
    EXPECT_NEAR(manifest["results"]["y0"].get<double>(), -1.405, 0.1);
    EXPECT_FALSE(fs::exists(dir_ / "solve" / "manifest.json.tmp"));
}

TEST_F(CliTest, NumbersUseSeventeenDigits) {
    const auto out = (dir_ / "solve").string();
    ASSERT_EQ(run({"solve", "--config", (dir_ / "small.cfg").string(), "--out", out}), 0);
    std::istringstream csv(read(dir_ / "solve" / "bsde_n0.csv"));
    std::string line;
    std::getline(csv, line);
    std::getline(csv, line);
    std::getline(csv, line);
    const auto y = line.substr(line.find(',', line.find(',') + 1) + 1);
    const auto y_text = y.substr(0, y.find(','));
    const double value = std::stod(y_text);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    EXPECT_EQ(y_text, buf);
}

TEST_F(CliTest, UsageErrors) {
    EXPECT_EQ(run({}), 2);
    EXPECT_EQ(run({"solve"}), 2);
    EXPECT_EQ(run({"solve", "--config", (dir_ / "missing.cfg").string()}), 2);
    EXPECT_EQ(run({"frobnicate", "--config", "x"}), 2);
    const auto unknown = write_config("unknown.cfg", "volatility = 2\n");
    EXPECT_EQ(run({"solve", "--config", unknown.string(), "--out", dir_.string()}), 2);
    EXPECT_NE(err_.str().find("volatility"), std::string::npos);
    const auto too_big = write_config("big.cfg", "truncation_n = 21\n");
    EXPECT_EQ(run({"solve", "--config", too_big.string(), "--out", dir_.string()}), 2);
    EXPECT_NE(err_.str().find("1/dt"), std::string::npos);
    EXPECT_EQ(run({"sweep", "--config", (dir_ / "small.cfg").string(), "--levels", ""}), 2);
    EXPECT_EQ(run({"sweep", "--config", (dir_ / "small.cfg").string(), "--levels", "1,x"}), 2);
    EXPECT_EQ(run({"solve", "--config", (dir_ / "small.cfg").string(), "--path-index", "2000"}), 2);
}

TEST_F(CliTest, NonConvergenceExitCode) {
    const auto cfg = write_config("tight.cfg", "truncation_n = 10\npicard_max_iters = 1\npicard_tol = 1e-12\n");
    EXPECT_EQ(run({"solve", "--config", cfg.string(), "--out", (dir_ / "o").string()}), 3);
    EXPECT_NE(err_.str().find("residuals"), std::string::npos);
}

TEST_F(CliTest, SweepWritesTable) {
    const auto out = dir_ / "sweep";
    ASSERT_EQ(run({"sweep", "--config", (dir_ / "small.cfg").string(), "--out", out.string(),
                   "--levels", "1,2,10,10", "--wealth", "1"}),
              0)
        << err_.str();
    std::istringstream csv(read(out / "sweep.csv"));
    std::string line;
    int rows = -1;
    while (std::getline(csv, line)) ++rows;
    EXPECT_EQ(rows, 3);
    EXPECT_NE(out_.str().find("warning"), std::string::npos);
}

TEST_F(CliTest, StrategyColumns) {
    const auto cfg = write_config("strategy.cfg", "truncation_n = 20\n");
    const auto out = dir_ / "strategy";
    ASSERT_EQ(run({"strategy", "--config", cfg.string(), "--out", out.string(), "--path-index", "1",
                   "--tau-seed", "9"}),
              0)
        << err_.str();
    const auto manifest = nlohmann::json::parse(read(out / "manifest.json"));
    const double tau = manifest["results"]["tau_n"];
    std::istringstream csv(read(out / "strategy.csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "k,t,p_star,p_star_nodefault");
    while (std::getline(csv, line)) {
        std::stringstream fields(line);
        std::string k, t, p, p0;
        std::getline(fields, k, ',');
        std::getline(fields, t, ',');
        std::getline(fields, p, ',');
        std::getline(fields, p0, ',');
        if (std::stod(t) >= tau) EXPECT_EQ(std::stod(p), 0.0) << line;
        EXPECT_TRUE(std::isfinite(std::stod(p0)));
    }
    EXPECT_TRUE(fs::exists(out / "wealth.csv"));
}

TEST_F(CliTest, SelftestExitCodes) {
    const auto cfg = (dir_ / "small.cfg").string();
    EXPECT_EQ(run({"selftest", "--config", cfg, "--out", (dir_ / "st").string()}), 0) << out_.str();
    EXPECT_EQ(run({"selftest", "--config", cfg, "--out", (dir_ / "st0").string(), "--tolerance-scale", "0"}), 4);
    EXPECT_NE(out_.str().find("FAIL"), std::string::npos);
}

}  // namespace
}  // namespace singbsde

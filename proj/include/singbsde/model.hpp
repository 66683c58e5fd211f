#pragma once

// Problem data for exponential utility maximization with a default-time
// horizon: market, claim, default intensity, trading constraint and the
// Monte Carlo discretization, bundled into one validated configuration.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace singbsde {

struct MarketParams {
    double maturity = 1.0;
    double risk_aversion = 0.25;
    std::vector<double> theta{1.0};  // risk premium, one entry per Brownian factor
    double sigma = 1.0;
    double mu = 1.0;
    double s0 = 0.5;
    double interest_rate = 0.0;  // must stay 0

    bool operator==(const MarketParams&) const = default;
};

// Claim paid at default: xi_a(s) = (K - S_s)^+.
struct PutOnAsset {
    double strike = 1.0;
    bool operator==(const PutOnAsset&) const = default;
};

struct ZeroClaim {
    bool operator==(const ZeroClaim&) const = default;
};

// Deterministic xi_a tabulated on the time grid, linearly interpolated.
struct DeterministicFunction {
    std::vector<double> samples;
    bool operator==(const DeterministicFunction&) const = default;

    [[nodiscard]] double value_at(double t, double maturity) const;
};

struct ClaimSpec {
    std::variant<PutOnAsset, ZeroClaim, DeterministicFunction> kind = PutOnAsset{};
    double xi_b = 0.0;  // claim paid at T when no default occurred

    bool operator==(const ClaimSpec&) const = default;
};

enum class IntensityKind {
    kSingular,         // lambda_s = 1 / (T - s)
    kBoundedConstant,  // lambda_s = level
};

struct IntensitySpec {
    IntensityKind kind = IntensityKind::kSingular;
    double level = 0.0;    // only used by kBoundedConstant
    int truncation_n = 0;  // 0 means no default at all

    bool operator==(const IntensitySpec&) const = default;
};

struct Unconstrained {
    bool operator==(const Unconstrained&) const = default;
};

struct Box {
    std::vector<double> lower;
    std::vector<double> upper;
    bool operator==(const Box&) const = default;
};

// Closed set C of admissible strategies, with Euclidean projection and distance.
struct ConstraintSet {
    std::variant<Unconstrained, Box> kind = Unconstrained{};

    bool operator==(const ConstraintSet&) const = default;

    [[nodiscard]] bool is_unconstrained() const noexcept {
        return std::holds_alternative<Unconstrained>(kind);
    }
    [[nodiscard]] std::vector<double> project(std::span<const double> a) const;
    [[nodiscard]] double distance_squared(std::span<const double> a) const;
    [[nodiscard]] double distance(std::span<const double> a) const;
    [[nodiscard]] bool contains(std::span<const double> a) const;
};

// Constant term of the Brownian driver: |theta|^2 / (2 alpha) or |theta|^2 / 2.
enum class DriverVariant { kRiskAversionScaled, kUnscaled };

// Markov state regressed on for conditional expectations.
enum class RegressionState { kAssetPrice, kBrownianValue };

// kLiteral evaluates the whole driver at the previous Picard iterate.
// kPathwiseImplicit keeps Z lagged but solves the default term in y per path.
enum class PicardMode { kPathwiseImplicit, kLiteral };

struct Discretization {
    int n_steps = 50;
    int n_paths = 100000;
    int picard_max_iters = 20;
    double picard_tol = 1e-4;
    int basis_degree = 3;
    std::uint64_t seed = 20240601;
    RegressionState regression_state = RegressionState::kBrownianValue;
    PicardMode picard_mode = PicardMode::kPathwiseImplicit;
    int jackknife_folds = 10;

    bool operator==(const Discretization&) const = default;
};

// Execution knobs. None of them changes numerical results.
struct Execution {
    unsigned threads = 0;  // 0 = hardware concurrency
    std::size_t max_ensemble_bytes = std::size_t{4} << 30;

    bool operator==(const Execution&) const = default;
};

struct ProblemConfig {
    MarketParams market;
    ClaimSpec claim;
    IntensitySpec intensity;
    ConstraintSet constraint;
    Discretization discretization;
    DriverVariant driver_variant = DriverVariant::kRiskAversionScaled;
    Execution execution;

    bool operator==(const ProblemConfig&) const = default;
};

// Reference parameter set (T=1, alpha=0.25,
// dt=0.02, S0=0.5, sigma=1, mu=1, K=1, theta=1) with 1e5 paths.
[[nodiscard]] ProblemConfig reference_config();

class ValidatedConfig {
public:
    [[nodiscard]] const ProblemConfig& config() const noexcept { return config_; }
    [[nodiscard]] const MarketParams& market() const noexcept { return config_.market; }
    [[nodiscard]] const ClaimSpec& claim() const noexcept { return config_.claim; }
    [[nodiscard]] const IntensitySpec& intensity() const noexcept { return config_.intensity; }
    [[nodiscard]] const ConstraintSet& constraint() const noexcept { return config_.constraint; }
    [[nodiscard]] const Discretization& discretization() const noexcept {
        return config_.discretization;
    }
    [[nodiscard]] const Execution& execution() const noexcept { return config_.execution; }

    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] std::size_t n_steps() const noexcept { return grid_.size() - 1; }
    [[nodiscard]] std::size_t n_paths() const noexcept {
        return static_cast<std::size_t>(config_.discretization.n_paths);
    }
    [[nodiscard]] const std::vector<double>& grid() const noexcept { return grid_; }
    [[nodiscard]] const std::vector<std::string>& warnings() const noexcept { return warnings_; }

    // Copies re-validated with one field changed.
    [[nodiscard]] ValidatedConfig with_truncation(int n) const;
    [[nodiscard]] ValidatedConfig with_claim(ClaimSpec claim) const;

    bool operator==(const ValidatedConfig& other) const { return config_ == other.config_; }

private:
    friend ValidatedConfig validate(const ProblemConfig& config);

    ProblemConfig config_;
    double dt_ = 0.0;
    std::vector<double> grid_;
    std::vector<std::string> warnings_;
};

// Throws ValidationError naming the first offending field.
[[nodiscard]] ValidatedConfig validate(const ProblemConfig& config);

// Throws ValidationError unless 0 <= n and n * dt <= 1.
void check_truncation_level(int n, double dt);

// lambda_t ^ n. n = 0 is the no-default model and returns 0.
[[nodiscard]] double lambda_at(const IntensitySpec& spec, double t, double maturity);
[[nodiscard]] double lambda_at(const IntensitySpec& spec, double t, double maturity, int n);

// Integral of lambda ^ n over [0, t] in closed form.
[[nodiscard]] double integrated_intensity(const IntensitySpec& spec, double t, double maturity,
                                          int n);

[[nodiscard]] double claim_value(const ClaimSpec& claim, const MarketParams& market, double t,
                                 double brownian_value);

[[nodiscard]] double asset_price(const MarketParams& market, double t, double brownian_value);

}  // namespace singbsde

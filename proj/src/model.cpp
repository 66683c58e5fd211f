#include "singbsde/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "singbsde/errors.hpp"

namespace singbsde {

namespace {

void require(bool ok, const char* field, const std::string& message) {
    if (!ok) throw ValidationError(field, std::string(field) + ": " + message);
}

bool all_finite(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void check_dimension(std::span<const double> a, std::size_t expected) {
    if (a.size() != expected) {
        throw std::invalid_argument("constraint dimension mismatch: expected " +
                                    std::to_string(expected) + ", got " +
                                    std::to_string(a.size()));
    }
}

}  // namespace

double DeterministicFunction::value_at(double t, double maturity) const {
    if (samples.empty()) return 0.0;
    if (samples.size() == 1) return samples.front();
    const auto last = samples.size() - 1;
    const double pos = std::clamp(t / maturity, 0.0, 1.0) * static_cast<double>(last);
    const auto k = std::min(static_cast<std::size_t>(pos), last - 1);
    const double w = pos - static_cast<double>(k);
    return (1.0 - w) * samples[k] + w * samples[k + 1];
}

std::vector<double> ConstraintSet::project(std::span<const double> a) const {
    std::vector<double> out(a.begin(), a.end());
    if (const auto* box = std::get_if<Box>(&kind)) {
        check_dimension(a, box->lower.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            out[i] = std::clamp(out[i], box->lower[i], box->upper[i]);
        }
    }
    return out;
}

double ConstraintSet::distance_squared(std::span<const double> a) const {
    const auto* box = std::get_if<Box>(&kind);
    if (box == nullptr) return 0.0;
    check_dimension(a, box->lower.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double gap = a[i] - std::clamp(a[i], box->lower[i], box->upper[i]);
        sum += gap * gap;
    }
    return sum;
}

double ConstraintSet::distance(std::span<const double> a) const {
    return std::sqrt(distance_squared(a));
}

bool ConstraintSet::contains(std::span<const double> a) const {
    return distance_squared(a) == 0.0;
}

ProblemConfig reference_config() {
    ProblemConfig config;
    config.intensity.truncation_n = 50;
    return config;
}

void check_truncation_level(int n, double dt) {
    require(n >= 0, "truncation_n", "must be nonnegative, got " + std::to_string(n));
    if (static_cast<double>(n) * dt > 1.0 + 1e-9) {
        std::ostringstream msg;
        msg << "truncation level " << n << " exceeds 1/dt = " << 1.0 / dt
            << "; on a grid of step dt the truncation lambda ^ n is invisible beyond n = 1/dt, "
               "so larger levels only repeat the n = 1/dt solution";
        throw ValidationError("truncation_n", "truncation_n: " + msg.str());
    }
}

ValidatedConfig validate(const ProblemConfig& config) {
    const auto& m = config.market;
    require(std::isfinite(m.maturity) && m.maturity > 0.0, "maturity", "must be > 0");
    require(std::isfinite(m.risk_aversion) && m.risk_aversion > 0.0, "alpha", "must be > 0");
    require(m.theta.size() == 1, "theta",
            "the numerical layer supports exactly one Brownian factor");
    require(all_finite(m.theta), "theta", "must be finite");
    require(std::isfinite(m.sigma) && m.sigma >= 0.0, "sigma", "must be >= 0");
    require(std::isfinite(m.mu), "mu", "must be finite");
    require(std::isfinite(m.s0) && m.s0 > 0.0, "s0", "must be > 0");
    require(m.interest_rate == 0.0, "interest_rate", "only r = 0 is supported");

    const auto& d = config.discretization;
    require(d.n_steps >= 2, "n_steps", "must be >= 2");
    require(d.n_paths >= 2, "n_paths", "must be >= 2");
    require(d.picard_max_iters >= 1, "picard_max_iters", "must be >= 1");
    require(std::isfinite(d.picard_tol) && d.picard_tol > 0.0, "picard_tol", "must be > 0");
    require(d.basis_degree >= 0, "basis_degree", "must be >= 0");
    require(d.n_paths > d.basis_degree + 1, "n_paths", "must exceed basis_degree + 1");
    require(d.jackknife_folds == 0 || (d.jackknife_folds >= 2 && d.jackknife_folds <= d.n_paths),
            "jackknife_folds", "must be 0 or in [2, n_paths]");

    const auto& claim = config.claim;
    require(std::isfinite(claim.xi_b), "xi_b", "must be finite");
    if (const auto* put = std::get_if<PutOnAsset>(&claim.kind)) {
        require(std::isfinite(put->strike) && put->strike >= 0.0, "strike", "must be >= 0");
    }
    if (const auto* fn = std::get_if<DeterministicFunction>(&claim.kind)) {
        require(fn->samples.size() == static_cast<std::size_t>(d.n_steps) + 1, "claim",
                "deterministic claim needs one sample per grid time");
        require(all_finite(fn->samples), "claim", "samples must be finite");
    }

    const auto& in = config.intensity;
    if (in.kind == IntensityKind::kSingular) {
        require(claim.xi_b == 0.0, "xi_b", "the singular intensity forces a default before T, so xi_b must be 0");
    } else {
        require(std::isfinite(in.level) && in.level >= 0.0, "lambda_level", "must be >= 0");
    }

    ValidatedConfig out;
    out.config_ = config;
    out.dt_ = m.maturity / d.n_steps;
    check_truncation_level(in.truncation_n, out.dt_);

    if (const auto* box = std::get_if<Box>(&config.constraint.kind)) {
        require(box->lower.size() == m.theta.size() && box->upper.size() == m.theta.size(),
                "constraint", "box bounds must match the dimension of theta");
        require(all_finite(box->lower) && all_finite(box->upper), "constraint",
                "box bounds must be finite");
        for (std::size_t i = 0; i < box->lower.size(); ++i) {
            require(box->lower[i] <= box->upper[i], "constraint", "lower must be <= upper");
        }
    }

    out.grid_.resize(static_cast<std::size_t>(d.n_steps) + 1);
    for (std::size_t k = 0; k < out.grid_.size(); ++k) {
        out.grid_[k] = static_cast<double>(k) * out.dt_;
    }
    out.grid_.back() = m.maturity;

    if (m.sigma > 0.0 && std::abs(m.theta[0] * m.sigma - (m.mu - m.interest_rate)) > 1e-12) {
        out.warnings_.push_back("theta differs from (mu - r) / sigma; the risk premium is used as given");
    }
    return out;
}

ValidatedConfig ValidatedConfig::with_truncation(int n) const {
    auto copy = config_;
    copy.intensity.truncation_n = n;
    return validate(copy);
}

ValidatedConfig ValidatedConfig::with_claim(ClaimSpec claim) const {
    auto copy = config_;
    copy.claim = std::move(claim);
    return validate(copy);
}

double lambda_at(const IntensitySpec& spec, double t, double maturity) {
    return lambda_at(spec, t, maturity, spec.truncation_n);
}

double lambda_at(const IntensitySpec& spec, double t, double maturity, int n) {
    if (n < 0) throw DomainError("truncation level must be nonnegative");
    if (n == 0) return 0.0;
    if (t < 0.0) throw DomainError("intensity evaluated at negative time");
    if (spec.kind == IntensityKind::kBoundedConstant) {
        return std::min(spec.level, static_cast<double>(n));
    }
    if (t >= maturity) throw DomainError("singular intensity is undefined at t >= T");
    return std::min(1.0 / (maturity - t), static_cast<double>(n));
}

double integrated_intensity(const IntensitySpec& spec, double t, double maturity, int n) {
    if (n < 0) throw DomainError("truncation level must be nonnegative");
    if (t < 0.0 || t > maturity) throw DomainError("integration bound outside [0, T]");
    if (n == 0) return 0.0;
    const double level = static_cast<double>(n);
    if (spec.kind == IntensityKind::kBoundedConstant) return std::min(spec.level, level) * t;
    if (level * maturity <= 1.0) return level * t;
    const double joint = maturity - 1.0 / level;
    if (t <= joint) return std::log(maturity / (maturity - t));
    return std::log(level * maturity) + level * (t - joint);
}

double asset_price(const MarketParams& market, double t, double brownian_value) {
    return market.s0 * std::exp(market.sigma * brownian_value +
                                (market.mu - 0.5 * market.sigma * market.sigma) * t);
}

double claim_value(const ClaimSpec& claim, const MarketParams& market, double t,
                   double brownian_value) {
    return std::visit(
        [&](const auto& kind) -> double {
            using K = std::decay_t<decltype(kind)>;
            if constexpr (std::is_same_v<K, PutOnAsset>) {
                return std::max(kind.strike - asset_price(market, t, brownian_value), 0.0);
            } else if constexpr (std::is_same_v<K, ZeroClaim>) {
                return 0.0;
            } else {
                return kind.value_at(t, market.maturity);
            }
        },
        claim.kind);
}

}  // namespace singbsde

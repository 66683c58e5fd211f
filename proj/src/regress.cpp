#include "singbsde/regress.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "singbsde/errors.hpp"
#include "singbsde/parallel.hpp"

namespace singbsde {

namespace {

double horner(std::span<const double> c, double u) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * u + *it;
    return acc;
}

// Sum of f(p) over [0, count) with per-block partials added in block order.
template <class F>
double ordered_sum(std::size_t count, unsigned threads, F&& f) {
    const std::size_t blocks = (count + kPathBlock - 1) / kPathBlock;
    std::vector<double> partial(blocks, 0.0);
    for_each_block(count, kPathBlock, threads, [&](std::size_t b, std::size_t begin, std::size_t end) {
        double s = 0.0;
        for (std::size_t p = begin; p < end; ++p) s += f(p);
        partial[b] = s;
    });
    double total = 0.0;
    for (double s : partial) total += s;
    return total;
}

}  // namespace

double FittedRegressor::operator()(double state) const {
    return horner(coefficients, (state - center) / scale);
}

std::vector<double> predict(const FittedRegressor& reg, std::span<const double> states) {
    std::vector<double> out(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) out[i] = reg(states[i]);
    return out;
}

LeastSquaresProjector::LeastSquaresProjector(std::span<const double> states, int degree,
                                             std::size_t time_index, unsigned threads)
    : degree_(degree), requested_degree_(degree), time_index_(time_index), threads_(threads) {
    const std::size_t m = states.size();
    if (degree < 0) throw RegressionError(time_index, "negative basis degree");
    if (m <= static_cast<std::size_t>(degree) + 1) {
        throw RegressionError(time_index, "regression at time index " + std::to_string(time_index) +
                                              " needs more samples than basis functions");
    }
    for (double x : states) {
        if (!std::isfinite(x)) {
            throw RegressionError(time_index, "non-finite regression state at time index " +
                                                  std::to_string(time_index));
        }
    }

    const double dm = static_cast<double>(m);
    center_ = ordered_sum(m, threads_, [&](std::size_t p) { return states[p]; }) / dm;
    const double var = ordered_sum(m, threads_, [&](std::size_t p) {
                           const double d = states[p] - center_;
                           return d * d;
                       }) / dm;
    scale_ = std::sqrt(var);
    if (!(scale_ > 1e-14 * (1.0 + std::abs(center_)))) {
        // Deterministic state: only the constant survives.
        scale_ = 1.0;
        degree_ = 0;
    }

    standardized_.resize(m);
    for (std::size_t p = 0; p < m; ++p) standardized_[p] = (states[p] - center_) / scale_;

    const auto nb = static_cast<Eigen::Index>(degree_ + 1);
    // Gram entries depend only on i + j, so accumulate the 2*degree+1 power moments.
    const std::size_t n_moments = 2 * static_cast<std::size_t>(degree_) + 1;
    const std::size_t blocks = (m + kPathBlock - 1) / kPathBlock;
    std::vector<std::vector<double>> partial(blocks, std::vector<double>(n_moments, 0.0));
    for_each_block(m, kPathBlock, threads_, [&](std::size_t b, std::size_t begin, std::size_t end) {
        auto& acc = partial[b];
        for (std::size_t p = begin; p < end; ++p) {
            double pw = 1.0;
            for (std::size_t j = 0; j < n_moments; ++j) {
                acc[j] += pw;
                pw *= standardized_[p];
            }
        }
    });
    std::vector<double> moments(n_moments, 0.0);
    for (const auto& acc : partial) {
        for (std::size_t j = 0; j < n_moments; ++j) moments[j] += acc[j];
    }

    Eigen::MatrixXd gram(nb, nb);
    for (Eigen::Index i = 0; i < nb; ++i) {
        for (Eigen::Index j = 0; j < nb; ++j) {
            gram(i, j) = moments[static_cast<std::size_t>(i + j)] / dm;
        }
    }

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    const double hi = eig.eigenvalues().maxCoeff();
    condition_ = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(condition_ <= kConditionLimit)) {
        gram.diagonal().array() += kRidgeFactor * gram.trace();
        ridge_ = true;
    }
    factor_.compute(gram);
    if (factor_.info() != Eigen::Success) {
        throw RegressionError(time_index, "singular regression design at time index " +
                                              std::to_string(time_index));
    }
}

Eigen::VectorXd LeastSquaresProjector::solve(std::span<const double> targets) const {
    const std::size_t m = standardized_.size();
    if (targets.size() != m) throw std::invalid_argument("target length does not match states");
    const auto nb = static_cast<std::size_t>(degree_ + 1);
    const std::size_t blocks = (m + kPathBlock - 1) / kPathBlock;
    std::vector<std::vector<double>> partial(blocks, std::vector<double>(nb, 0.0));
    for_each_block(m, kPathBlock, threads_, [&](std::size_t b, std::size_t begin, std::size_t end) {
        auto& acc = partial[b];
        for (std::size_t p = begin; p < end; ++p) {
            double pw = targets[p];
            for (std::size_t j = 0; j < nb; ++j) {
                acc[j] += pw;
                pw *= standardized_[p];
            }
        }
    });
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nb));
    for (const auto& acc : partial) {
        for (std::size_t j = 0; j < nb; ++j) rhs[static_cast<Eigen::Index>(j)] += acc[j];
    }
    rhs /= static_cast<double>(m);
    return factor_.solve(rhs);
}

FittedRegressor LeastSquaresProjector::fit(std::span<const double> targets) const {
    const Eigen::VectorXd c = solve(targets);
    FittedRegressor reg;
    reg.coefficients.assign(c.data(), c.data() + c.size());
    reg.coefficients.resize(static_cast<std::size_t>(requested_degree_) + 1, 0.0);
    reg.center = center_;
    reg.scale = scale_;
    reg.condition_diagnostic = condition_;
    reg.ridge_applied = ridge_;
    reg.time_index = time_index_;
    return reg;
}

void LeastSquaresProjector::project(std::span<const double> targets, std::span<double> out) const {
    const Eigen::VectorXd c = solve(targets);
    const std::span<const double> coef(c.data(), static_cast<std::size_t>(c.size()));
    for_each_block(standardized_.size(), kPathBlock, threads_,
                   [&](std::size_t, std::size_t begin, std::size_t end) {
                       for (std::size_t p = begin; p < end; ++p) {
                           out[p] = horner(coef, standardized_[p]);
                       }
                   });
}

FittedRegressor fit(std::span<const double> states, std::span<const double> targets,
                    const RegressionBasis& basis, std::size_t time_index, unsigned threads) {
    return LeastSquaresProjector(states, basis.degree, time_index, threads).fit(targets);
}

}  // namespace singbsde

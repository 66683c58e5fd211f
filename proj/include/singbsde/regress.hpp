#pragma once

// Least-squares Monte Carlo estimator of E[target | state] on a polynomial
// basis of the (standardized) state. Normal equations are accumulated in
// fixed blocks of kPathBlock paths and reduced in block order, so results
// are bitwise identical for any thread count.

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

#include "singbsde/model.hpp"

namespace singbsde {

struct RegressionBasis {
    int degree = 3;
    RegressionState state = RegressionState::kBrownianValue;
};

// Above this eigenvalue ratio of the scaled Gram matrix a ridge of
// kRidgeFactor * trace is added before solving.
inline constexpr double kConditionLimit = 1e12;
inline constexpr double kRidgeFactor = 1e-10;

struct FittedRegressor {
    // Coefficients of ((x - center) / scale)^j, j = 0..degree.
    std::vector<double> coefficients;
    double center = 0.0;
    double scale = 1.0;
    double condition_diagnostic = 1.0;
    bool ridge_applied = false;
    std::size_t time_index = 0;

    [[nodiscard]] double operator()(double state) const;
};

[[nodiscard]] std::vector<double> predict(const FittedRegressor& reg,
                                          std::span<const double> states);

// Normal-equation factorization for one set of states, reusable across targets.
class LeastSquaresProjector {
public:
    LeastSquaresProjector(std::span<const double> states, int degree, std::size_t time_index = 0,
                          unsigned threads = 1);

    [[nodiscard]] FittedRegressor fit(std::span<const double> targets) const;

    // Fitted values of the projection at the training states.
    void project(std::span<const double> targets, std::span<double> out) const;

    [[nodiscard]] std::size_t size() const noexcept { return standardized_.size(); }
    [[nodiscard]] int effective_degree() const noexcept { return degree_; }
    [[nodiscard]] double condition_diagnostic() const noexcept { return condition_; }
    [[nodiscard]] bool ridge_applied() const noexcept { return ridge_; }

private:
    [[nodiscard]] Eigen::VectorXd solve(std::span<const double> targets) const;

    std::vector<double> standardized_;
    int degree_;
    int requested_degree_;
    std::size_t time_index_;
    unsigned threads_;
    double center_ = 0.0;
    double scale_ = 1.0;
    double condition_ = 1.0;
    bool ridge_ = false;
    Eigen::LLT<Eigen::MatrixXd> factor_;
};

// Throws RegressionError when the design cannot be rescued by the ridge.
[[nodiscard]] FittedRegressor fit(std::span<const double> states, std::span<const double> targets,
                                  const RegressionBasis& basis, std::size_t time_index = 0,
                                  unsigned threads = 1);

}  // namespace singbsde

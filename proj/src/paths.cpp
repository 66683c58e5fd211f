#include "singbsde/paths.hpp"

#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "singbsde/csv.hpp"
#include "singbsde/errors.hpp"
#include "singbsde/parallel.hpp"

namespace singbsde {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

void fill_claim(Eigen::MatrixXd& xi_a, const Eigen::MatrixXd& W, const ClaimSpec& claim,
                const MarketParams& market, std::span<const double> grid) {
    xi_a.resize(W.rows(), W.cols());
    for (Eigen::Index k = 0; k < W.cols(); ++k) {
        const double t = grid[static_cast<std::size_t>(k)];
        for (Eigen::Index p = 0; p < W.rows(); ++p) {
            xi_a(p, k) = claim_value(claim, market, t, W(p, k));
        }
    }
}

Eigen::MatrixXd drop_rows(const Eigen::MatrixXd& m, Eigen::Index begin, Eigen::Index end) {
    Eigen::MatrixXd out(m.rows() - (end - begin), m.cols());
    out.topRows(begin) = m.topRows(begin);
    out.bottomRows(m.rows() - end) = m.bottomRows(m.rows() - end);
    return out;
}

}  // namespace

std::mt19937_64 path_generator(std::uint64_t seed, Stream stream, std::size_t path) {
    const std::uint64_t key =
        splitmix64(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream))) ^
                   static_cast<std::uint64_t>(path));
    return std::mt19937_64(key);
}

std::size_t ensemble_bytes(std::size_t n_paths, std::size_t n_steps) {
    return n_paths * (n_steps + 3 * (n_steps + 1)) * sizeof(double);
}

PathEnsemble generate_ensemble(const ValidatedConfig& config) {
    const std::size_t m = config.n_paths();
    const std::size_t n = config.n_steps();
    const std::size_t bytes = ensemble_bytes(m, n);
    if (bytes > config.execution().max_ensemble_bytes) {
        throw ResourceError("ensemble of " + std::to_string(m) + " x " + std::to_string(n) +
                            " needs " + std::to_string(bytes) + " bytes, above the cap of " +
                            std::to_string(config.execution().max_ensemble_bytes));
    }

    const auto& market = config.market();
    const auto& grid = config.grid();
    const double sqrt_dt = std::sqrt(config.dt());
    const std::uint64_t seed = config.discretization().seed;

    PathEnsemble e;
    e.seed_used = seed;
    e.dW.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    e.W.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n + 1));
    e.S.resize(e.W.rows(), e.W.cols());
    e.path_ids.resize(m);
    std::iota(e.path_ids.begin(), e.path_ids.end(), std::size_t{0});

    for_each_block(m, kPathBlock, config.execution().threads,
                   [&](std::size_t, std::size_t begin, std::size_t end) {
                       for (std::size_t p = begin; p < end; ++p) {
                           auto gen = path_generator(seed, Stream::kBrownian, p);
                           std::normal_distribution<double> normal;
                           const auto row = static_cast<Eigen::Index>(p);
                           double w = 0.0;
                           e.W(row, 0) = 0.0;
                           e.S(row, 0) = market.s0;
                           for (std::size_t k = 0; k < n; ++k) {
                               const auto col = static_cast<Eigen::Index>(k);
                               const double inc = sqrt_dt * normal(gen);
                               e.dW(row, col) = inc;
                               w += inc;
                               e.W(row, col + 1) = w;
                               e.S(row, col + 1) = asset_price(market, grid[k + 1], w);
                           }
                       }
                   });
    fill_claim(e.xi_a, e.W, config.claim(), market, grid);
    return e;
}

PathEnsemble PathEnsemble::with_claim(const ClaimSpec& claim, const MarketParams& market,
                                      std::span<const double> grid) const {
    PathEnsemble copy = *this;
    fill_claim(copy.xi_a, copy.W, claim, market, grid);
    return copy;
}

PathEnsemble PathEnsemble::without_block(std::size_t fold, std::size_t folds) const {
    if (folds < 2 || fold >= folds || folds > n_paths()) {
        throw std::invalid_argument("invalid jackknife fold");
    }
    const auto m = static_cast<Eigen::Index>(n_paths());
    const auto f = static_cast<Eigen::Index>(fold);
    const auto nf = static_cast<Eigen::Index>(folds);
    const Eigen::Index begin = f * m / nf;
    const Eigen::Index end = (f + 1) * m / nf;

    PathEnsemble out;
    out.seed_used = seed_used;
    out.dW = drop_rows(dW, begin, end);
    out.W = drop_rows(W, begin, end);
    out.S = drop_rows(S, begin, end);
    out.xi_a = drop_rows(xi_a, begin, end);
    out.path_ids.reserve(path_ids.size() - static_cast<std::size_t>(end - begin));
    out.path_ids.insert(out.path_ids.end(), path_ids.begin(), path_ids.begin() + begin);
    out.path_ids.insert(out.path_ids.end(), path_ids.begin() + end, path_ids.end());
    return out;
}

DefaultSample sample_default_time(double phi, int n, double maturity) {
    if (!(phi > 0.0) || !std::isfinite(phi)) throw DomainError("phi must be positive and finite");
    if (n < 1) throw DomainError("closed-form default time needs n >= 1");
    if (!(maturity > 0.0)) throw DomainError("maturity must be positive");

    const double level = static_cast<double>(n);
    const double nt = level * maturity;
    double tau = 0.0;
    if (nt < 1.0) {
        // lambda ^ n = n on the whole horizon.
        tau = std::min(phi / level, maturity);
    } else if (const double joint = std::log(nt); phi <= joint) {
        tau = -maturity * std::expm1(-phi);
    } else {
        tau = std::min((phi + nt - 1.0 - joint) / level, maturity);
    }
    return DefaultSample{phi, tau, tau < maturity, n};
}

DefaultSample sample_default_time(const IntensitySpec& spec, double phi, int n, double maturity) {
    if (!(phi > 0.0) || !std::isfinite(phi)) throw DomainError("phi must be positive and finite");
    if (n < 0) throw DomainError("truncation level must be nonnegative");
    if (n == 0) return DefaultSample{phi, maturity, false, 0};
    if (spec.kind == IntensityKind::kSingular) return sample_default_time(phi, n, maturity);
    const double rate = std::min(spec.level, static_cast<double>(n));
    const double tau = rate > 0.0 ? std::min(phi / rate, maturity) : maturity;
    return DefaultSample{phi, tau, tau < maturity, n};
}

double draw_default_clock(std::uint64_t seed, std::size_t path) {
    auto gen = path_generator(seed, Stream::kDefaultClock, path);
    std::exponential_distribution<double> exponential(1.0);
    double phi = 0.0;
    while (!(phi > 0.0)) phi = exponential(gen);
    return phi;
}

std::vector<DefaultSample> sample_default_times(const ValidatedConfig& config, int n) {
    std::vector<DefaultSample> out(config.n_paths());
    const double maturity = config.market().maturity;
    const std::uint64_t seed = config.discretization().seed;
    for_each_block(out.size(), kPathBlock, config.execution().threads,
                   [&](std::size_t, std::size_t begin, std::size_t end) {
                       for (std::size_t p = begin; p < end; ++p) {
                           out[p] = sample_default_time(config.intensity(),
                                                        draw_default_clock(seed, p), n, maturity);
                       }
                   });
    return out;
}

double survival_probability(int n, double maturity) {
    if (n <= 0) return 1.0;
    const double nt = static_cast<double>(n) * maturity;
    if (nt <= 1.0) return std::exp(-nt);
    return std::exp(-1.0) / nt;
}

void write_paths_csv(std::ostream& out, const PathEnsemble& ensemble,
                     std::span<const double> grid) {
    csv::Writer w(out, {"path", "k", "t", "W", "S", "xi_a"});
    for (Eigen::Index p = 0; p < ensemble.W.rows(); ++p) {
        for (Eigen::Index k = 0; k < ensemble.W.cols(); ++k) {
            w.row(ensemble.path_ids[static_cast<std::size_t>(p)], k,
                  grid[static_cast<std::size_t>(k)], ensemble.W(p, k), ensemble.S(p, k),
                  ensemble.xi_a(p, k));
        }
    }
}

}  // namespace singbsde

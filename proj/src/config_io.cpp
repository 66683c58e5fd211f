#include "singbsde/config_io.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

#include "singbsde/csv.hpp"
#include "singbsde/errors.hpp"

namespace singbsde {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <class T>
T parse_number(std::string_view key, std::string_view value) {
    T out{};
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end) {
        throw ValidationError(std::string(key), std::string(key) + ": cannot parse '" +
                                                    std::string(value) + "' as a number");
    }
    return out;
}

std::vector<double> parse_vector(std::string_view key, std::string_view value) {
    std::vector<double> out;
    while (!value.empty()) {
        const auto comma = value.find(',');
        out.push_back(parse_number<double>(key, trim(value.substr(0, comma))));
        if (comma == std::string_view::npos) break;
        value.remove_prefix(comma + 1);
    }
    return out;
}

std::string join(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ',';
        out += csv::number(v[i]);
    }
    return out;
}

[[noreturn]] void bad_choice(std::string_view key, std::string_view value, const char* choices) {
    throw ValidationError(std::string(key), std::string(key) + ": '" + std::string(value) +
                                                "' is not one of " + choices);
}

}  // namespace

ProblemConfig parse_config(std::string_view text) {
    ProblemConfig c = reference_config();
    std::optional<double> strike;
    std::optional<std::string> claim_kind;
    std::optional<std::vector<double>> lower;
    std::optional<std::vector<double>> upper;

    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        const auto line = trim(text.substr(0, eol));
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ValidationError("config", "config line " + std::to_string(line_no) +
                                                ": expected key = value");
        }
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));

        auto& m = c.market;
        auto& d = c.discretization;
        if (key == "maturity") m.maturity = parse_number<double>(key, value);
        else if (key == "alpha") m.risk_aversion = parse_number<double>(key, value);
        else if (key == "theta") m.theta = parse_vector(key, value);
        else if (key == "sigma") m.sigma = parse_number<double>(key, value);
        else if (key == "mu") m.mu = parse_number<double>(key, value);
        else if (key == "s0") m.s0 = parse_number<double>(key, value);
        else if (key == "strike") strike = parse_number<double>(key, value);
        else if (key == "claim") claim_kind = std::string(value);
        else if (key == "xi_b") c.claim.xi_b = parse_number<double>(key, value);
        else if (key == "lambda_kind") {
            if (value == "singular") c.intensity.kind = IntensityKind::kSingular;
            else if (value == "constant") c.intensity.kind = IntensityKind::kBoundedConstant;
            else bad_choice(key, value, "singular, constant");
        } else if (key == "lambda_level") c.intensity.level = parse_number<double>(key, value);
        else if (key == "truncation_n") c.intensity.truncation_n = parse_number<int>(key, value);
        else if (key == "n_steps") d.n_steps = parse_number<int>(key, value);
        else if (key == "n_paths") d.n_paths = parse_number<int>(key, value);
        else if (key == "picard_max_iters") d.picard_max_iters = parse_number<int>(key, value);
        else if (key == "picard_tol") d.picard_tol = parse_number<double>(key, value);
        else if (key == "basis_degree") d.basis_degree = parse_number<int>(key, value);
        else if (key == "seed") d.seed = parse_number<std::uint64_t>(key, value);
        else if (key == "jackknife_folds") d.jackknife_folds = parse_number<int>(key, value);
        else if (key == "driver_variant") {
            if (value == "scaled") c.driver_variant = DriverVariant::kRiskAversionScaled;
            else if (value == "unscaled") c.driver_variant = DriverVariant::kUnscaled;
            else bad_choice(key, value, "scaled, unscaled");
        } else if (key == "regression_state") {
            if (value == "brownian") d.regression_state = RegressionState::kBrownianValue;
            else if (value == "asset") d.regression_state = RegressionState::kAssetPrice;
            else bad_choice(key, value, "brownian, asset");
        } else if (key == "picard_mode") {
            if (value == "implicit") d.picard_mode = PicardMode::kPathwiseImplicit;
            else if (value == "literal") d.picard_mode = PicardMode::kLiteral;
            else bad_choice(key, value, "implicit, literal");
        } else if (key == "constraint_lower") lower = parse_vector(key, value);
        else if (key == "constraint_upper") upper = parse_vector(key, value);
        else throw ValidationError(std::string(key), "unknown configuration key '" + std::string(key) + "'");
    }

    if (claim_kind && *claim_kind == "zero") {
        c.claim.kind = ZeroClaim{};
    } else if (claim_kind && *claim_kind != "put") {
        bad_choice("claim", *claim_kind, "put, zero");
    } else {
        c.claim.kind = PutOnAsset{strike.value_or(1.0)};
    }
    if (lower.has_value() != upper.has_value()) {
        throw ValidationError("constraint", "constraint_lower and constraint_upper go together");
    }
    if (lower) c.constraint.kind = Box{*lower, *upper};
    return c;
}

ProblemConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config", "cannot read config file " + path.string());
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string format_config(const ProblemConfig& c) {
    std::ostringstream out;
    const auto& m = c.market;
    const auto& d = c.discretization;
    out << "maturity = " << csv::number(m.maturity) << '\n'
        << "alpha = " << csv::number(m.risk_aversion) << '\n'
        << "theta = " << join(m.theta) << '\n'
        << "sigma = " << csv::number(m.sigma) << '\n'
        << "mu = " << csv::number(m.mu) << '\n'
        << "s0 = " << csv::number(m.s0) << '\n';
    if (const auto* put = std::get_if<PutOnAsset>(&c.claim.kind)) {
        out << "claim = put\nstrike = " << csv::number(put->strike) << '\n';
    } else {
        out << "claim = zero\n";
    }
    out << "xi_b = " << csv::number(c.claim.xi_b) << '\n'
        << "lambda_kind = "
        << (c.intensity.kind == IntensityKind::kSingular ? "singular" : "constant") << '\n'
        << "lambda_level = " << csv::number(c.intensity.level) << '\n'
        << "truncation_n = " << c.intensity.truncation_n << '\n'
        << "n_steps = " << d.n_steps << '\n'
        << "n_paths = " << d.n_paths << '\n'
        << "picard_max_iters = " << d.picard_max_iters << '\n'
        << "picard_tol = " << csv::number(d.picard_tol) << '\n'
        << "basis_degree = " << d.basis_degree << '\n'
        << "seed = " << d.seed << '\n'
        << "jackknife_folds = " << d.jackknife_folds << '\n'
        << "driver_variant = "
        << (c.driver_variant == DriverVariant::kRiskAversionScaled ? "scaled" : "unscaled") << '\n'
        << "regression_state = "
        << (d.regression_state == RegressionState::kBrownianValue ? "brownian" : "asset") << '\n'
        << "picard_mode = "
        << (d.picard_mode == PicardMode::kPathwiseImplicit ? "implicit" : "literal") << '\n';
    if (const auto* box = std::get_if<Box>(&c.constraint.kind)) {
        out << "constraint_lower = " << join(box->lower) << '\n'
            << "constraint_upper = " << join(box->upper) << '\n';
    }
    return out.str();
}

}  // namespace singbsde

// Python extension: configuration text in, solver results out as plain Python and NumPy values.

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "singbsde/assemble.hpp"
#include "singbsde/bsde.hpp"
#include "singbsde/config_io.hpp"
#include "singbsde/errors.hpp"
#include "singbsde/finance.hpp"
#include "singbsde/oracles.hpp"
#include "singbsde/paths.hpp"
#include "singbsde/selftest.hpp"

namespace py = pybind11;
using namespace singbsde;

namespace {

ValidatedConfig load(const std::string& text, unsigned threads) {
    auto c = parse_config(text);
    c.execution.threads = threads;
    return validate(c);
}

py::dict solve(const std::string& text, int n, unsigned threads) {
    const auto v = load(text, threads);
    TruncatedBsdeSolution sol;
    {
        py::gil_scoped_release release;
        sol = solve_truncated(v, generate_ensemble(v), n);
    }
    py::dict out;
    out["n"] = n;
    out["y0"] = sol.y0;
    out["grid"] = v.grid();
    out["Y"] = std::move(sol.Y);
    out["Z"] = std::move(sol.Z);
    out["picard_iters"] = sol.picard_iters_used;
    out["picard_residuals"] = sol.picard_residuals;
    out["ridge_fallbacks"] = sol.ridge_fallbacks;
    out["warnings"] = v.warnings();
    return out;
}

py::dict g_solution(const std::string& text, int n, std::size_t path_index, unsigned threads) {
    const auto v = load(text, threads).with_truncation(n);
    if (path_index >= v.n_paths()) throw py::index_error("path_index out of range");
    GSolution g;
    {
        py::gil_scoped_release release;
        const auto ensemble = generate_ensemble(v);
        const auto bsde = solve_truncated(v, ensemble, n);
        const double phi = draw_default_clock(v.discretization().seed, path_index);
        g = assemble_g_solution(v, bsde, ensemble, path_index,
                                sample_default_time(v.intensity(), phi, n, v.market().maturity));
    }
    py::dict out;
    out["tau_n"] = g.tau_n;
    out["defaulted"] = g.defaulted;
    out["default_index"] = g.default_index;
    out["jump_size"] = g.jump_size;
    out["grid"] = v.grid();
    out["Y"] = g.Y;
    out["Z"] = g.Z;
    out["U"] = g.U;
    return out;
}

py::list run_sweep(const std::string& text, std::vector<int> levels, double wealth, unsigned threads) {
    const auto v = load(text, threads);
    SweepResult result;
    {
        py::gil_scoped_release release;
        result = sweep(v, std::move(levels), wealth);
    }
    py::list rows;
    for (const auto& r : result.rows) {
        py::dict row;
        row["n"] = r.n;
        row["p_n"] = r.p_n;
        row["y0"] = r.y0;
        row["y0_zero"] = r.y0_zero;
        row["V"] = r.value;
        row["P_n"] = r.price;
        row["y0_se"] = r.y0_se;
        row["P_n_se"] = r.price_se;
        rows.append(row);
    }
    return rows;
}

py::list selftest(const std::string& text, double tolerance_scale, unsigned threads) {
    std::vector<OracleReport> reports;
    const auto v = load(text, threads);
    {
        py::gil_scoped_release release;
        reports = run_selftest(v, tolerance_scale);
    }
    py::list out;
    for (const auto& r : reports) {
        py::dict d;
        d["name"] = r.name;
        d["oracle_value"] = r.oracle_value;
        d["solver_value"] = r.solver_value;
        d["abs_error"] = r.abs_error;
        d["tolerance"] = r.tolerance;
        d["pass"] = r.pass;
        out.append(d);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_singbsde, m) {
    m.doc() = "Truncated singular BSDE solver for exponential utility with default";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
    py::register_exception<RegressionError>(m, "RegressionError", PyExc_RuntimeError);

    m.def("reference_config", [] { return format_config(reference_config()); },
          "Reference configuration as key = value text.");
    m.def("normalize_config", [](const std::string& text) { return format_config(load(text, 1).config()); },
          py::arg("text"), "Parse, validate and re-serialize a configuration.");
    m.def("solve", &solve, py::arg("config"), py::arg("n"), py::arg("threads") = 1u,
          "Solve the truncated BSDE at level n (0 means no default).");
    m.def("g_solution", &g_solution, py::arg("config"), py::arg("n"), py::arg("path_index") = 0,
          py::arg("threads") = 1u, "Solution along one path including the default jump.");
    m.def("sweep", &run_sweep, py::arg("config"), py::arg("levels"), py::arg("wealth") = 1.0,
          py::arg("threads") = 1u, "y0, value and indifference price per truncation level.");
    m.def("selftest", &selftest, py::arg("config"), py::arg("tolerance_scale") = 1.0,
          py::arg("threads") = 1u, "Solver results against closed-form oracles.");
    m.def("survival_probability", &survival_probability, py::arg("n"), py::arg("maturity"));
    m.def("value_function", &value_function, py::arg("x"), py::arg("y0"), py::arg("alpha"));
    m.def("oracle_no_claim", &oracle_no_claim, py::arg("theta"), py::arg("alpha"),
          py::arg("maturity"), py::arg("t") = 0.0);
    m.def("oracle_put_price", &oracle_put_price, py::arg("s0"), py::arg("strike"), py::arg("sigma"),
          py::arg("maturity"));
    m.def("oracle_linear_bsde",
          py::overload_cast<const RealFunction&, double, double, int>(&oracle_linear_bsde),
          py::arg("xi"), py::arg("maturity"), py::arg("t"), py::arg("panels") = 500);
    m.def("singular_ode_state", &singular_ode_state, py::arg("xi"), py::arg("maturity"), py::arg("t"),
          py::arg("initial_value"), py::arg("panels") = 500);
}

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cossiga/coherence.hpp"
#include "cossiga/experiments.hpp"
#include "cossiga/recovery.hpp"

namespace py = pybind11;
using namespace cossiga;

namespace {

py::dict solution_dict(const SparseSolution& sol) {
    py::dict d;
    d["coefficients"] = sol.coefficients;
    d["support"] = sol.support;
    d["s"] = sol.s;
    d["residual_norm"] = sol.residual_norm;
    d["residual_trace"] = sol.residual_trace;
    d["capped"] = sol.capped;
    return d;
}

}  // namespace

PYBIND11_MODULE(_cossiga, m) {
    m.doc() = "Compressive isogeometric Poisson solver";

    m.def(
        "dict_cardinality",
        [](int p, const std::string& reg, int l0, int L, int dim) {
            const auto c = dict_cardinality(p, regularity_from_string(reg), l0, L, dim);
            return py::make_tuple(c.n_dict, c.n_dof);
        },
        py::arg("p"), py::arg("regularity"), py::arg("l0"), py::arg("L"), py::arg("dim"),
        "Dictionary size and span dimension: (N_dict, N_dof)");

    m.def(
        "choose_R",
        [](int p, const std::string& reg, int L) {
            return choose_R(p, regularity_from_string(reg), L);
        },
        py::arg("p"), py::arg("regularity"), py::arg("L"));

    m.def(
        "open_uniform_knots",
        [](int level, int degree, const std::string& reg) {
            return make_open_uniform_knots(level, degree, regularity_from_string(reg)).knots;
        },
        py::arg("level"), py::arg("degree"), py::arg("regularity") = "cmax");

    m.def(
        "basis_values",
        [](int level, int degree, const std::string& reg, double xi) {
            const auto kv = make_open_uniform_knots(level, degree, regularity_from_string(reg));
            const auto be = eval_basis(kv, xi);
            return py::make_tuple(be.first_index, be.values, be.derivatives);
        },
        py::arg("level"), py::arg("degree"), py::arg("regularity"), py::arg("xi"),
        "Non-vanishing basis values and first derivatives: (first_index, values, derivatives)");

    m.def("nu_bound", &nu_bound, py::arg("r"), py::arg("L"), py::arg("dim"));

    m.def(
        "sampling_distribution",
        [](int R, int L, int dim) {
            const auto d = sampling_distribution(R, L, dim);
            return py::make_tuple(d.pi, d.nu);
        },
        py::arg("R"), py::arg("L"), py::arg("dim"), "Row-sampling density: (pi, nu)");

    m.def(
        "draw_test_indices",
        [](int R, int L, int dim, long long m, std::uint64_t seed) {
            return draw_test_indices(sampling_distribution(R, L, dim), m, seed);
        },
        py::arg("R"), py::arg("L"), py::arg("dim"), py::arg("m"), py::arg("seed"));

    m.def(
        "draw_from_weights",
        [](const Eigen::VectorXd& weights, long long m, std::uint64_t seed) {
            return draw_test_indices(SamplingDensity::from_weights(weights), m, seed);
        },
        py::arg("weights"), py::arg("m"), py::arg("seed"));

    m.def(
        "omp",
        [](const Eigen::MatrixXd& M, const Eigen::VectorXd& y, int s, double tol) {
            return solution_dict(omp(M, y, s, tol));
        },
        py::arg("M"), py::arg("y"), py::arg("s"), py::arg("tol") = -1.0,
        "Orthogonal Matching Pursuit with s iterations");

    m.def(
        "least_squares",
        [](const Eigen::MatrixXd& M, const Eigen::VectorXd& y) {
            const auto r = least_squares(M, y);
            return py::make_tuple(r.x, r.residual_norm);
        },
        py::arg("M"), py::arg("y"), "Minimum-norm least squares: (x, residual_norm)");

    m.def(
        "run_method",
        [](const std::string& method, const std::string& case_name, int p,
           const std::string& reg, int l0, int L, int s, long long m, std::uint64_t seed) {
            ProblemContext ctx(make_case(case_name, p, regularity_from_string(reg), l0, L));
            const auto result = run_method(run_method_from_string(method), ctx, s, m, seed);
            py::dict d = solution_dict(result.solution);
            d["h1_rel_err"] = result.h1_rel_err;
            d["n_comp"] = result.n_comp;
            d["n_dict"] = ctx.n_dict();
            d["n_dof"] = ctx.n_dof();
            return d;
        },
        py::arg("method"), py::arg("case"), py::arg("p"), py::arg("regularity"), py::arg("l0"),
        py::arg("L"), py::arg("s") = 0, py::arg("m") = 0, py::arg("seed") = 0,
        "Run pg-bs, pg-omp or cossiga on a built-in case and report the relative H1 error");
}

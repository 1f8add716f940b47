#include <doctest.h>

#include <cmath>

#include "cossiga/experiments.hpp"
#include "support.hpp"

using namespace cossiga;

TEST_CASE("exact solutions") {
    SUBCASE("polyGauss value at the feature center") {
        const auto u = exact_solution("polygauss2d");
        const double x[2] = {0.5, 1.4};
        CHECK(std::abs(u.value(x) - 1.303226) < 1e-6);
    }
    SUBCASE("gradients match finite differences") {
        auto gen = testsupport::rng(7);
        for (const char* name :
             {"gauss2d", "polygauss2d", "poly_only_2d", "polygauss3d", "sine_mode"}) {
            const auto u = exact_solution(name);
            const auto g = (u.dim == 2) ? builtin_domain(BuiltinDomain::quarter_annulus)
                                        : builtin_domain(BuiltinDomain::thick_ring);
            for (int trial = 0; trial < 100; ++trial) {
                Eigen::VectorXd xi(u.dim);
                for (int k = 0; k < u.dim; ++k) xi[k] = testsupport::uniform(gen, 0.05, 0.95);
                const Eigen::VectorXd x = map_point(g, xi);
                double grad[3];
                u.gradient(x.data(), grad);
                const double h = 2e-6;
                for (int k = 0; k < u.dim; ++k) {
                    Eigen::VectorXd xp = x, xm = x;
                    xp[k] += h;
                    xm[k] -= h;
                    const double fd = (u.value(xp.data()) - u.value(xm.data())) / (2 * h);
                    const double scale = std::max(1.0, std::abs(grad[k]));
                    CHECK(std::abs(fd - grad[k]) / scale < 1e-6);
                }
            }
        }
    }
    SUBCASE("unknown name") { CHECK_THROWS_AS(exact_solution("hat2d"), std::invalid_argument); }
}

TEST_CASE("percentiles and run statistics") {
    SUBCASE("constant sample") {
        const auto st = summarize_runs(std::vector<double>(9, 3.5));
        CHECK(st.p2_7 == 3.5);
        CHECK(st.p25 == 3.5);
        CHECK(st.p50 == 3.5);
        CHECK(st.p75 == 3.5);
        CHECK(st.p99_3 == 3.5);
        CHECK(st.outliers.empty());
    }
    SUBCASE("1..100 has median 50.5") {
        std::vector<double> v(100);
        for (int i = 0; i < 100; ++i) v[i] = i + 1;
        CHECK(percentile(v, 0.5) == doctest::Approx(50.5));
    }
    SUBCASE("25 sorted values: the 25th percentile interpolates the 6th/7th order stats") {
        std::vector<double> v(25);
        for (int i = 0; i < 25; ++i) v[i] = 10.0 * (i + 1);  // 10, 20, ..., 250
        // position (n+1)p = 6.5
        CHECK(percentile(v, 0.25) == doctest::Approx(65.0));
    }
    SUBCASE("ordering and outliers") {
        std::vector<double> v(50);
        auto gen = testsupport::rng(5);
        for (auto& x : v) x = testsupport::uniform(gen, 0, 10);
        v[3] = 1e4;  // one clear outlier
        const auto st = summarize_runs(v);
        CHECK(st.p2_7 <= st.p25);
        CHECK(st.p25 <= st.p50);
        CHECK(st.p50 <= st.p75);
        CHECK(st.p75 <= st.p99_3);
        CHECK(st.outliers.size() >= 1);
        CHECK(st.n_runs == 50);
    }
    SUBCASE("empty input") { CHECK_THROWS_AS(summarize_runs({}), std::invalid_argument); }
}

TEST_CASE("calibration helpers") {
    SUBCASE("s* picks the error closest to mu times the reference") {
        const std::vector<int> s = {4, 8, 16, 32};
        const std::vector<double> err = {0.9, 0.5, 0.21, 0.11};
        CHECK(select_s_star(s, err, 2.0, 0.1) == 16);
        // exact hit wins
        CHECK(select_s_star(s, {0.9, 0.2, 0.15, 0.11}, 2.0, 0.1) == 8);
        // ties break to the smallest s
        CHECK(select_s_star(s, {0.3, 0.1, 0.3, 0.1}, 2.0, 0.1) == 4);
    }
    SUBCASE("through-origin fit") {
        CHECK(fit_through_origin({{10, 50}}) == doctest::Approx(5.0));
        CHECK(fit_through_origin({{1, 2}, {2, 4}}) == doctest::Approx(2.0));
    }
    SUBCASE("run plan reproduces the published subsampling rates") {
        // C(2) = 1.6e-2 with D(2,L) = 3.19, 6.38, 6.42 at L = 4, 5, 6
        const double C = 1.6e-2;
        const RunPlan p4 = plan_run(C, 3.19, 1.0, 256);
        const RunPlan p5 = plan_run(C, 6.38, 1.0, 1024);
        const RunPlan p6 = plan_run(C, 6.42, 1.0, 4096);
        CHECK(std::abs(static_cast<double>(p4.m) / 256 - 0.051) < 0.003);
        CHECK(std::abs(static_cast<double>(p5.m) / 1024 - 0.102) < 0.002);
        CHECK(std::abs(static_cast<double>(p6.m) / 4096 - 0.103) < 0.002);
    }
    SUBCASE("lambda = 2 quadruples the rate below the cap") {
        const RunPlan base = plan_run(0.01, 5.0, 1.0, 4096);
        const RunPlan two = plan_run(0.01, 5.0, 2.0, 4096);
        CHECK(two.rate == doctest::Approx(4.0 * base.rate));
        CHECK(two.s == 2 * base.s);
    }
    SUBCASE("the 80% cap binds") {
        const RunPlan capped = plan_run(0.05, 100.0, 2.0, 1000);
        CHECK(capped.rate == doctest::Approx(0.8));
        CHECK(capped.m == 800);
        CHECK(capped.s == 100);
        // m never drops below s even when the cap asks for fewer rows
        const RunPlan floor = plan_run(0.5, 4.0, 2.0, 1000);
        CHECK(floor.s == 1000);
        CHECK(floor.m == 1000);
    }
    SUBCASE("MATLAB-style tested grid") {
        const auto grid = default_s_tested(0);
        CHECK(grid.front() == 4);
        CHECK(grid.back() == 2048);
        CHECK(std::is_sorted(grid.begin(), grid.end()));
        const auto capped = default_s_tested(100);
        CHECK(capped.back() == 100);
    }
}

TEST_CASE("h1 relative error") {
    CaseSetup setup = make_case("sine_mode", 2, Regularity::Cmax, 1, 3);
    ProblemContext ctx(setup);

    SUBCASE("zero coefficients give error one") {
        CHECK(ctx.h1_error(Eigen::VectorXd::Zero(ctx.n_dict())) == doctest::Approx(1.0));
    }
    SUBCASE("a function in the span is recovered to quadrature precision") {
        // Manufacture the exact solution from three dictionary atoms, then
        // check PG-BS reproduces it.
        const auto& dict = ctx.dict();
        Eigen::VectorXd target = Eigen::VectorXd::Zero(ctx.n_dict());
        target[0] = 1.0;
        target[dict.atom_index(2, {1, 1, 0})] = -0.4;
        target[dict.atom_index(3, {4, 2, 0})] = 0.25;

        CaseSetup inspan = setup;
        inspan.exact.name = "in_span";
        auto dict_copy = std::make_shared<TrialDictionary>(dict);
        auto coeffs = std::make_shared<Eigen::VectorXd>(target);
        inspan.exact.value = [dict_copy, coeffs](const double* x) {
            Eigen::VectorXd xi(2);
            xi << x[0], x[1];
            double v = 0.0;
            for (long long j = 0; j < coeffs->size(); ++j)
                if ((*coeffs)[j] != 0.0) v += (*coeffs)[j] * eval_trial(*dict_copy, j, xi).value;
            return v;
        };
        inspan.exact.gradient = [dict_copy, coeffs](const double* x, double* g) {
            Eigen::VectorXd xi(2);
            xi << x[0], x[1];
            Eigen::VectorXd acc = Eigen::VectorXd::Zero(2);
            for (long long j = 0; j < coeffs->size(); ++j)
                if ((*coeffs)[j] != 0.0)
                    acc += (*coeffs)[j] * eval_trial(*dict_copy, j, xi).gradient;
            g[0] = acc[0];  // identity geometry: parametric = physical
            g[1] = acc[1];
        };
        ProblemContext inspan_ctx(inspan);
        CHECK(inspan_ctx.h1_error(target) < 1e-10);
        const auto bs = inspan_ctx.solve_pg_bs();
        CHECK(inspan_ctx.h1_error(bs.coefficients) < 1e-8);
    }
}

TEST_CASE("method hierarchy on a small problem") {
    CaseSetup setup = make_case("polygauss2d", 2, Regularity::Cmax, 1, 3);
    ProblemContext ctx(setup);

    const auto bs = ctx.solve_pg_bs();
    const double err_bs = ctx.h1_error(bs.coefficients);

    SUBCASE("pg-bs error is below every pg-omp error") {
        const auto path = ctx.pg_omp_path({2, 5, 9, 20, 50});
        double prev = 1e300;
        for (const auto& sol : path) {
            const double err = ctx.h1_error(sol.coefficients);
            CHECK(err_bs <= err + 1e-10);
            CHECK(err <= prev + 1e-10);  // nonincreasing in s
            prev = err;
        }
    }
    SUBCASE("n_comp bookkeeping") {
        auto r_bs = run_method(Method::pg_bs, ctx, 0, 0, 0);
        CHECK(r_bs.n_comp == ctx.n_dict());
        auto r_omp = run_method(Method::pg_omp, ctx, 7, 0, 0);
        CHECK(r_omp.n_comp == 7);
        CHECK(static_cast<long long>(r_omp.solution.support.size()) <= 7);
        auto r_cs = run_method(Method::cossiga, ctx, 5, 40, 3);
        CHECK(r_cs.n_comp == 5);
        CHECK(r_cs.solution.metadata.method == MethodTag::cossiga);
    }
    SUBCASE("cossiga with ample rows approaches pg-omp") {
        const int s = 9;
        const double err_omp = ctx.h1_error(ctx.solve_pg_omp(s).coefficients);
        std::vector<double> errs;
        for (int run = 0; run < 25; ++run) {
            const auto sol = ctx.solve_cossiga(s, ctx.test_basis().n_test(), 900 + run);
            errs.push_back(ctx.h1_error(sol.coefficients));
        }
        CHECK(percentile(errs, 0.5) <= 1.5 * err_omp);
    }
}

TEST_CASE("calibration drivers on a tiny case") {
    CaseSetup setup = make_case("polygauss2d", 1, Regularity::Cmax, 1, 3);
    ProblemContext ctx(setup);

    const auto cal_c = calibrate_C(ctx, 2.0, {2, 4, 8, 16, 32});
    CHECK(cal_c.s_star >= 2);
    CHECK(cal_c.C == doctest::Approx(static_cast<double>(cal_c.s_star) / ctx.n_dof()));
    CHECK(cal_c.err_bs > 0.0);
    CHECK(cal_c.records.size() == 5);

    const auto cal_d = calibrate_D(ctx, 2.0, {3, 6}, {3, 6, 12, 24, 49}, 5, 77, 2);
    CHECK(cal_d.D >= 1.0);
    CHECK(cal_d.m_star.size() == 2);
    for (const auto& [s, m] : cal_d.m_star) {
        CHECK(m >= s);
        CHECK(m <= ctx.n_dof());
    }
    CHECK_THROWS_AS(calibrate_C(ctx, 2.0, {}), std::invalid_argument);
    CHECK_THROWS_AS(calibrate_D(ctx, 2.0, {}, {4}, 2, 0), std::invalid_argument);
}

TEST_CASE("convergence study emits consistent records") {
    const auto pts = convergence_study("polygauss2d", 1, Regularity::Cmax, 1, {2, 3}, 1.0,
                                       0.05, 3.0, 6, 11, 2);
    REQUIRE(pts.size() == 2);
    for (const auto& pt : pts) {
        CHECK(pt.rate <= 0.8 + 1e-12);
        CHECK(pt.m >= pt.s);
        CHECK(pt.stats.n_runs == 6);
        CHECK(static_cast<int>(pt.cossiga_errors.size()) == 6);
        CHECK(pt.err_bs > 0.0);
        CHECK(pt.stats.subsampling_rate == doctest::Approx(pt.rate));
    }
    CHECK(pts[0].n_dof < pts[1].n_dof);
}

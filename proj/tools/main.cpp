// cossiga command-line front end: dict-info, solve, calibrate-c, calibrate-d,
// converge, reproduce. Configuration comes from an optional JSON file merged
// with flags (flags win); the effective config is written next to the outputs.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "cossiga/config.hpp"
#include "cossiga/experiments.hpp"
#include "cossiga/io.hpp"

namespace fs = std::filesystem;
using namespace cossiga;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string method = "cossiga";
    std::string out_dir;
    std::string geometry;
    std::string case_name;
    std::uint64_t seed = 0;
    int runs = 0;
    int jobs = 0;
    int p = 0, l0 = 0, L = 0;
    int s = 0;
    long long m = 0;
    double C = 0, D = 0, lambda = 0, mu = 0;
    int quad_points = 0;
    std::string regularity;
    std::vector<int> levels;
    std::vector<int> s_list;
    std::vector<long long> m_grid;
    bool dump_matrices = false;
    bool dump_atoms = false;
    bool dump_density = false;
    bool json_output = false;
};

void add_common_options(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file");
    cmd->add_option("--case", f.case_name,
                    "gauss2d | polygauss2d | polygauss3d | poly_only_2d | sine_mode");
    cmd->add_option("-p,--degree", f.p, "B-spline degree");
    cmd->add_option("--regularity", f.regularity, "cmax | c0");
    cmd->add_option("--l0", f.l0, "coarsest dictionary level");
    cmd->add_option("-L,--level", f.L, "finest dictionary level");
    cmd->add_option("-s,--sparsity", f.s, "target sparsity");
    cmd->add_option("-m,--rows", f.m, "number of sampled rows");
    cmd->add_option("--C", f.C, "sparsity constant s = C*N_dof");
    cmd->add_option("--D", f.D, "row constant m = D*s");
    cmd->add_option("--lambda", f.lambda, "safety factor >= 1");
    cmd->add_option("--mu", f.mu, "calibration tolerance factor > 1");
    cmd->add_option("--quadrature-points", f.quad_points, "Gauss points per element");
    cmd->add_option("--seed", f.seed, "base random seed");
    cmd->add_option("--runs", f.runs, "number of random runs");
    cmd->add_option("--jobs", f.jobs, "parallel workers for independent runs");
    cmd->add_option("--out", f.out_dir, "output directory");
    cmd->add_option("--geometry", f.geometry, "builtin domain name or patch JSON path");
}

ExperimentConfig merge_config(const CLI::App* cmd, const CommonFlags& f) {
    ExperimentConfig cfg;
    if (!f.config_path.empty()) cfg = load_config(f.config_path);
    auto given = [&](const std::string& name) { return cmd->count(name) > 0; };
    if (given("--case")) cfg.case_name = f.case_name;
    if (given("--degree")) cfg.p = f.p;
    if (given("--regularity")) cfg.regularity = regularity_from_string(f.regularity);
    if (given("--l0")) cfg.l0 = f.l0;
    if (given("--level")) cfg.L = f.L;
    if (given("--sparsity")) cfg.s = f.s;
    if (given("--rows")) cfg.m = f.m;
    if (given("--C")) cfg.C = f.C;
    if (given("--D")) cfg.D = f.D;
    if (given("--lambda")) cfg.lambda = f.lambda;
    if (given("--mu")) cfg.mu = f.mu;
    if (given("--quadrature-points")) cfg.quadrature_points = f.quad_points;
    if (given("--seed")) cfg.seed = f.seed;
    if (given("--runs")) cfg.n_runs = f.runs;
    if (given("--jobs")) cfg.jobs = f.jobs;
    if (given("--out")) cfg.output_dir = f.out_dir;
    if (given("--geometry")) cfg.geometry = f.geometry;
    return cfg;
}

CaseSetup setup_from_config(const ExperimentConfig& cfg) {
    CaseSetup setup = make_case(cfg.case_name, cfg.p, cfg.regularity, cfg.l0, cfg.L,
                                cfg.quadrature_points.value_or(0));
    if (cfg.geometry) {
        const std::string& name = *cfg.geometry;
        if (name.size() > 5 && name.substr(name.size() - 5) == ".json")
            setup.geometry = load_patch(name);
        else
            setup.geometry = builtin_domain(name);
        if (setup.geometry.dim != setup.exact.dim)
            throw std::invalid_argument("geometry dimension does not match the case");
    }
    return setup;
}

fs::path prepare_out_dir(const ExperimentConfig& cfg, const std::string& sub = "") {
    fs::path dir = cfg.output_dir;
    if (!sub.empty()) dir /= sub;
    fs::create_directories(dir);
    save_config(cfg, (dir / "effective_config.json").string());
    return dir;
}

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

// calibrate/converge do not require s (they produce or consume constants)
void validate_config_levels_only(const ExperimentConfig& cfg) {
    ExperimentConfig c = cfg;
    if (!c.s && !c.C) c.s = 1;
    validate_config(c);
}

nlohmann::json dict_report(const ExperimentConfig& cfg) {
    const int dim = exact_solution(cfg.case_name).dim;
    const auto card = dict_cardinality(cfg.p, cfg.regularity, cfg.l0, cfg.L, dim);
    const int R = choose_R(cfg.p, cfg.regularity, cfg.L);
    nlohmann::json j;
    j["case"] = cfg.case_name;
    j["dim"] = dim;
    j["p"] = cfg.p;
    j["regularity"] = to_string(cfg.regularity);
    j["l0"] = cfg.l0;
    j["L"] = cfg.L;
    j["N_dict"] = card.n_dict;
    j["N_dof"] = card.n_dof;
    nlohmann::json levels = nlohmann::json::array();
    for (int l = cfg.l0; l <= cfg.L; ++l) {
        nlohmann::json lv;
        lv["level"] = l;
        lv["count"] = level_cardinality(cfg.p, cfg.regularity, l, dim);
        levels.push_back(lv);
    }
    j["per_level"] = levels;
    j["R"] = R;
    long long n_test = 1;
    for (int k = 0; k < dim; ++k) n_test *= R;
    j["N_test"] = n_test;
    if (cfg.s) j["s"] = *cfg.s;
    if (cfg.m) {
        j["m"] = *cfg.m;
        const double rate = static_cast<double>(*cfg.m) / static_cast<double>(card.n_dof);
        j["subsampling_rate"] = rate;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * rate);
        j["subsampling_rate_percent"] = buf;
    }
    return j;
}

int cmd_dict_info(const ExperimentConfig& cfg, bool json_output) {
    const auto j = dict_report(cfg);
    if (json_output) {
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::cout << "case        " << j["case"].get<std::string>() << " (dim "
              << j["dim"].get<int>() << ")\n";
    std::cout << "space       p=" << cfg.p << " " << to_string(cfg.regularity) << " levels "
              << cfg.l0 << ".." << cfg.L << "\n";
    std::cout << "N_dof       " << j["N_dof"].get<long long>() << "\n";
    std::cout << "N_dict      " << j["N_dict"].get<long long>() << "\n";
    for (const auto& lv : j["per_level"])
        std::cout << "  level " << lv["level"].get<int>() << "  " << lv["count"].get<long long>()
                  << "\n";
    std::cout << "R           " << j["R"].get<int>() << "\n";
    std::cout << "N_test      " << j["N_test"].get<long long>() << "\n";
    if (j.contains("subsampling_rate_percent"))
        std::cout << "rate        " << j["m"].get<long long>() << "/"
                  << j["N_dof"].get<long long>() << " = "
                  << j["subsampling_rate_percent"].get<std::string>() << "\n";
    return 0;
}

int cmd_solve(const ExperimentConfig& cfg, const std::string& method_name, bool dump_matrices,
              bool dump_atoms, bool dump_density) {
    const Method method = run_method_from_string(method_name);
    if (method == Method::pg_bs)
        validate_config_levels_only(cfg);  // pg-bs ignores s and m
    else
        validate_config(cfg);
    const fs::path dir = prepare_out_dir(cfg);

    ProblemContext ctx(setup_from_config(cfg));
    const int s = (method == Method::pg_bs) ? 0 : cfg.resolve_s(ctx.n_dof());
    const long long m = (method == Method::cossiga) ? cfg.resolve_m(ctx.n_dof(), s) : 0;

    const RunResult result = run_method(method, ctx, s, m, cfg.seed);
    write_solution_csv(ctx.dict(), result.solution.coefficients, (dir / "solution.csv").string());

    nlohmann::json run;
    run["method"] = method_name;
    run["case"] = cfg.case_name;
    run["p"] = cfg.p;
    run["regularity"] = to_string(cfg.regularity);
    run["l0"] = cfg.l0;
    run["L"] = cfg.L;
    run["N_dict"] = ctx.n_dict();
    run["N_dof"] = ctx.n_dof();
    run["N_comp"] = result.n_comp;
    run["h1_rel_err"] = result.h1_rel_err;
    run["residual_norm"] = result.solution.residual_norm;
    run["support"] = result.solution.support;
    run["capped"] = result.solution.capped;
    if (method != Method::pg_bs) run["s"] = s;
    if (method == Method::cossiga) {
        run["m"] = m;
        run["seed"] = cfg.seed;
        run["subsampling_rate"] = static_cast<double>(m) / static_cast<double>(ctx.n_dof());
    }
    run["timestamp"] = timestamp_utc();
    std::ofstream(dir / "run.json") << run.dump(2) << "\n";

    if (dump_atoms) write_atoms_csv(ctx.dict(), (dir / "atoms.csv").string());
    if (dump_density) write_density_csv(ctx.density(), (dir / "density.csv").string());
    if (dump_matrices) {
        if (method == Method::cossiga) {
            const auto tau = draw_test_indices(ctx.density(), m, cfg.seed);
            Eigen::MatrixXd A;
            Eigen::VectorXd b;
            ctx.gather_rows(tau, A, b);
            write_matrix_market(A, (dir / "A.mtx").string());
            write_vector_csv(b, "b", (dir / "b.csv").string());
            write_vector_csv(scaling_matrix(ctx.density().pi, tau), "E_ii",
                             (dir / "E.csv").string());
            Eigen::VectorXd tau_v(tau.size());
            for (size_t i = 0; i < tau.size(); ++i) tau_v[i] = static_cast<double>(tau[i] + 1);
            write_vector_csv(tau_v, "tau", (dir / "tau.csv").string());
        } else {
            write_matrix_market(ctx.full_B(), (dir / "B.mtx").string());
            write_vector_csv(ctx.full_c(), "c", (dir / "c.csv").string());
        }
    }
    std::cout << "h1_rel_err " << format_double(result.h1_rel_err) << "  N_comp "
              << result.n_comp << "  -> " << dir.string() << "\n";
    return 0;
}

void write_calibration_csv(const CalibrationResult& cal, const std::string& path) {
    std::ofstream out(path);
    out << "s,m,err\n";
    for (const auto& rec : cal.records) {
        out << rec.s << ",";
        if (rec.m >= 0) out << rec.m;
        out << "," << format_double(rec.err) << "\n";
    }
}

int cmd_calibrate_c(const ExperimentConfig& cfg) {
    validate_config_levels_only(cfg);
    const fs::path dir = prepare_out_dir(cfg);
    ProblemContext ctx(setup_from_config(cfg));
    const auto cal = calibrate_C(ctx, cfg.mu, default_s_tested(ctx.n_dict()));
    write_calibration_csv(cal, (dir / "calibration_c.csv").string());
    nlohmann::json j;
    j["C"] = cal.C;
    j["s_star"] = cal.s_star;
    j["mu"] = cal.mu_factor;
    j["err_pg_bs"] = cal.err_bs;
    j["N_dof"] = cal.n_dof;
    std::ofstream(dir / "calibration_c.json") << j.dump(2) << "\n";
    std::cout << "C " << format_double(cal.C) << " (s* = " << cal.s_star << ")  -> "
              << dir.string() << "\n";
    return 0;
}

int cmd_calibrate_d(const ExperimentConfig& cfg, const std::vector<int>& s_list_flag,
                    const std::vector<long long>& m_grid_flag) {
    validate_config_levels_only(cfg);
    const fs::path dir = prepare_out_dir(cfg);
    ProblemContext ctx(setup_from_config(cfg));

    std::vector<int> s_values = !s_list_flag.empty() ? s_list_flag : cfg.s_list;
    if (s_values.empty()) {
        // spread around s* = C*N_dof when provided, else around the paper-like default
        const int s_star = cfg.C ? std::max(2, static_cast<int>(std::llround(*cfg.C * ctx.n_dof())))
                                 : cfg.s.value_or(16);
        s_values = {std::max(2, (4 * s_star) / 5), std::max(2, (5 * s_star) / 4),
                    std::max(2, 2 * s_star)};
    }
    std::vector<long long> m_grid = !m_grid_flag.empty() ? m_grid_flag : cfg.m_grid;
    if (m_grid.empty()) {
        const long long lo = *std::min_element(s_values.begin(), s_values.end());
        for (double m = static_cast<double>(lo); m < static_cast<double>(ctx.n_dof()); m *= 1.25)
            m_grid.push_back(static_cast<long long>(m));
        m_grid.push_back(ctx.n_dof());
    }

    const auto cal = calibrate_D(ctx, cfg.mu, s_values, m_grid, cfg.n_runs, cfg.seed, cfg.jobs);
    write_calibration_csv(cal, (dir / "calibration_d.csv").string());
    nlohmann::json j;
    j["D"] = cal.D;
    j["mu"] = cal.mu_factor;
    j["N_dof"] = cal.n_dof;
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& [s, m] : cal.m_star) {
        nlohmann::json pr;
        pr["s"] = s;
        pr["m_star"] = m;
        pr["err_pg_omp"] = cal.err_omp.at(s);
        pairs.push_back(pr);
    }
    j["m_star"] = pairs;
    std::ofstream(dir / "calibration_d.json") << j.dump(2) << "\n";
    std::cout << "D " << format_double(cal.D) << "  -> " << dir.string() << "\n";
    return 0;
}

int cmd_converge(const ExperimentConfig& cfg, const std::vector<int>& levels_flag) {
    validate_config_levels_only(cfg);
    if (!cfg.C || !cfg.D)
        throw std::invalid_argument("converge requires C and D (from calibration)");
    const fs::path dir = prepare_out_dir(cfg);
    const std::vector<int>& levels = !levels_flag.empty() ? levels_flag : cfg.levels;

    const auto points = convergence_study(cfg.case_name, cfg.p, cfg.regularity, cfg.l0, levels,
                                          cfg.lambda, *cfg.C, *cfg.D, cfg.n_runs, cfg.seed,
                                          cfg.jobs, cfg.quadrature_points.value_or(0));
    std::vector<RunRecord> runs;
    std::vector<SummaryRecord> summary;
    long long run_id = 0;
    for (const auto& pt : points) {
        RunRecord base;
        base.p = cfg.p;
        base.regularity = cfg.regularity;
        base.l0 = cfg.l0;
        base.L = pt.L;
        base.subsampling_rate = pt.rate;

        RunRecord bs = base;
        bs.run_id = run_id++;
        bs.method = "pg-bs";
        bs.s = pt.n_dict;
        bs.m = 0;
        bs.subsampling_rate = 1.0;
        bs.h1_rel_err = pt.err_bs;
        runs.push_back(bs);

        RunRecord om = base;
        om.run_id = run_id++;
        om.method = "pg-omp";
        om.s = pt.s;
        om.m = 0;
        om.subsampling_rate = 1.0;
        om.h1_rel_err = pt.err_omp;
        runs.push_back(om);

        for (size_t i = 0; i < pt.cossiga_errors.size(); ++i) {
            RunRecord cs = base;
            cs.run_id = run_id++;
            cs.seed = pt.seeds[i];
            cs.method = "cossiga";
            cs.s = pt.s;
            cs.m = pt.m;
            cs.h1_rel_err = pt.cossiga_errors[i];
            runs.push_back(cs);
        }

        SummaryRecord sr;
        sr.case_name = cfg.case_name;
        sr.p = cfg.p;
        sr.regularity = cfg.regularity;
        sr.l0 = cfg.l0;
        sr.L = pt.L;
        sr.s = pt.s;
        sr.m = pt.m;
        sr.subsampling_rate = pt.rate;
        sr.err_bs = pt.err_bs;
        sr.err_omp = pt.err_omp;
        sr.stats = pt.stats;
        summary.push_back(sr);
    }
    write_runs_csv(runs, (dir / "runs.csv").string());
    write_summary_csv(summary, (dir / "summary.csv").string());
    for (const auto& sr : summary)
        std::cout << "L=" << sr.L << "  rate " << format_double(100.0 * sr.subsampling_rate)
                  << "%  median " << format_double(sr.stats.p50) << "  pg-omp "
                  << format_double(sr.err_omp) << "  pg-bs " << format_double(sr.err_bs) << "\n";
    std::cout << "-> " << dir.string() << "\n";
    return 0;
}

int cmd_reproduce(const std::string& target, ExperimentConfig cfg) {
    if (target == "fig2") {
        cfg.case_name = "polygauss2d";
        cfg.p = 2;
        cfg.regularity = Regularity::Cmax;
        cfg.l0 = 1;
        cfg.L = 5;
        const fs::path dir = prepare_out_dir(cfg, "fig2");
        ProblemContext ctx(setup_from_config(cfg));
        const auto omp_run = run_method(Method::pg_omp, ctx, 9, 0, 0);
        const auto bs_run = run_method(Method::pg_bs, ctx, 0, 0, 0);
        write_solution_csv(ctx.dict(), omp_run.solution.coefficients,
                           (dir / "omp_stem.csv").string());
        write_solution_csv(ctx.dict(), bs_run.solution.coefficients,
                           (dir / "bs_stem.csv").string());
        nlohmann::json j;
        j["s"] = 9;
        j["err_pg_omp"] = omp_run.h1_rel_err;
        j["err_pg_bs"] = bs_run.h1_rel_err;
        j["support"] = omp_run.solution.support;
        std::ofstream(dir / "summary.json") << j.dump(2) << "\n";
        std::cout << "fig2: pg-omp(9) err " << format_double(omp_run.h1_rel_err) << ", pg-bs err "
                  << format_double(bs_run.h1_rel_err) << " -> " << dir.string() << "\n";
        return 0;
    }
    if (target == "fig3") {
        const fs::path dir = prepare_out_dir(cfg, "fig3");
        const int R = choose_R(2, Regularity::Cmax, 5);
        const auto density = sampling_distribution(R, 5, 2);
        write_density_csv(density, (dir / "density.csv").string());
        for (int rep = 0; rep < 2; ++rep) {
            const auto tau = draw_test_indices(density, 80, cfg.seed + rep);
            std::ofstream out(dir / ("draw" + std::to_string(rep + 1) + ".csv"));
            out << "q,r1,r2\n";
            TestBasis tb;
            tb.R = R;
            tb.dim = 2;
            for (long long q : tau) {
                const auto r = tb.freq_of(q);
                out << (q + 1) << "," << r[0] << "," << r[1] << "\n";
            }
        }
        std::cout << "fig3: density over R=" << R << " and two m=80 draws -> " << dir.string()
                  << "\n";
        return 0;
    }
    if (target == "fig4" || target == "fig5") {
        cfg.case_name = "polygauss2d";
        cfg.p = 2;
        cfg.regularity = Regularity::Cmax;
        cfg.l0 = 1;
        cfg.L = 5;
        const long long m = (target == "fig4") ? 76 : 304;
        const fs::path dir = prepare_out_dir(cfg, target);
        ProblemContext ctx(setup_from_config(cfg));
        const int n_real = cfg.n_runs == 25 ? 4 : cfg.n_runs;  // caption shows 4 realizations
        std::vector<RunRecord> runs;
        for (int rep = 0; rep < n_real; ++rep) {
            const auto result = run_method(Method::cossiga, ctx, 9, m, cfg.seed + rep);
            write_solution_csv(ctx.dict(), result.solution.coefficients,
                               (dir / ("realization" + std::to_string(rep + 1) + ".csv")).string());
            RunRecord rec;
            rec.run_id = rep;
            rec.seed = cfg.seed + rep;
            rec.method = "cossiga";
            rec.p = 2;
            rec.regularity = Regularity::Cmax;
            rec.l0 = 1;
            rec.L = 5;
            rec.s = 9;
            rec.m = m;
            rec.subsampling_rate = static_cast<double>(m) / static_cast<double>(ctx.n_dof());
            rec.h1_rel_err = result.h1_rel_err;
            runs.push_back(rec);
        }
        write_runs_csv(runs, (dir / "runs.csv").string());
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.1f%%", 100.0 * m / 1024.0);
        std::cout << target << ": m=" << m << " rate " << buf << " (" << n_real
                  << " realizations) -> " << dir.string() << "\n";
        return 0;
    }
    if (target == "fig7") {
        cfg.case_name = "gauss2d";
        cfg.p = 2;
        cfg.regularity = Regularity::Cmax;
        cfg.l0 = 1;
        const fs::path dir = prepare_out_dir(cfg, "fig7");
        // calibrated constants: C from the C-calibration, D per level
        const double C = 1.6e-2;
        const std::vector<std::pair<int, double>> D_by_L = {{4, 3.19}, {5, 6.38}, {6, 6.42}};
        std::vector<RunRecord> runs;
        std::vector<SummaryRecord> summary;
        long long run_id = 0;
        for (const auto& [L, D] : D_by_L) {
            const auto pts = convergence_study("gauss2d", 2, Regularity::Cmax, 1, {L}, cfg.lambda,
                                               C, D, cfg.n_runs, cfg.seed, cfg.jobs);
            const auto& pt = pts[0];
            for (size_t i = 0; i < pt.cossiga_errors.size(); ++i) {
                RunRecord rec;
                rec.run_id = run_id++;
                rec.seed = pt.seeds[i];
                rec.method = "cossiga";
                rec.p = 2;
                rec.regularity = Regularity::Cmax;
                rec.l0 = 1;
                rec.L = L;
                rec.s = pt.s;
                rec.m = pt.m;
                rec.subsampling_rate = pt.rate;
                rec.h1_rel_err = pt.cossiga_errors[i];
                runs.push_back(rec);
            }
            SummaryRecord sr;
            sr.case_name = "gauss2d";
            sr.p = 2;
            sr.regularity = Regularity::Cmax;
            sr.l0 = 1;
            sr.L = L;
            sr.s = pt.s;
            sr.m = pt.m;
            sr.subsampling_rate = pt.rate;
            sr.err_bs = pt.err_bs;
            sr.err_omp = pt.err_omp;
            sr.stats = pt.stats;
            summary.push_back(sr);
            std::cout << "fig7 L=" << L << ": rate "
                      << format_double(100.0 * pt.rate) << "% median "
                      << format_double(pt.stats.p50) << "\n";
        }
        write_runs_csv(runs, (dir / "runs.csv").string());
        write_summary_csv(summary, (dir / "summary.csv").string());
        std::cout << "-> " << dir.string() << "\n";
        return 0;
    }
    throw std::invalid_argument("unknown reproduce target: " + target +
                                " (expected fig2|fig3|fig4|fig5|fig7)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compressive isogeometric Poisson solver"};
    app.require_subcommand(1);

    CommonFlags flags;
    auto* dict_info = app.add_subcommand("dict-info", "dictionary and test-space sizes");
    add_common_options(dict_info, flags);
    dict_info->add_flag("--json", flags.json_output, "emit a JSON report");

    auto* solve = app.add_subcommand("solve", "run one solver and write the solution");
    add_common_options(solve, flags);
    solve->add_option("--method", flags.method, "cossiga | pg-omp | pg-bs");
    solve->add_flag("--dump-matrices", flags.dump_matrices, "write system matrices/vectors");
    solve->add_flag("--dump-atoms", flags.dump_atoms, "write the atom table CSV");
    solve->add_flag("--dump-density", flags.dump_density, "write the sampling density CSV");

    auto* cal_c = app.add_subcommand("calibrate-c", "estimate C = s*/N_dof");
    add_common_options(cal_c, flags);

    auto* cal_d = app.add_subcommand("calibrate-d", "estimate D in m = D s");
    add_common_options(cal_d, flags);
    cal_d->add_option("--s-list", flags.s_list, "sparsity values to test");
    cal_d->add_option("--m-grid", flags.m_grid, "row counts to test");

    auto* converge = app.add_subcommand("converge", "error vs level study");
    add_common_options(converge, flags);
    converge->add_option("--levels", flags.levels, "levels L to test");

    std::string reproduce_target;
    auto* reproduce = app.add_subcommand("reproduce", "rebuild a published experiment");
    reproduce->add_option("target", reproduce_target, "fig2 | fig3 | fig4 | fig5 | fig7")
        ->required();
    add_common_options(reproduce, flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (dict_info->parsed()) return cmd_dict_info(merge_config(dict_info, flags),
                                                      flags.json_output);
        if (solve->parsed())
            return cmd_solve(merge_config(solve, flags), flags.method, flags.dump_matrices,
                             flags.dump_atoms, flags.dump_density);
        if (cal_c->parsed()) return cmd_calibrate_c(merge_config(cal_c, flags));
        if (cal_d->parsed())
            return cmd_calibrate_d(merge_config(cal_d, flags), flags.s_list, flags.m_grid);
        if (converge->parsed()) return cmd_converge(merge_config(converge, flags), flags.levels);
        if (reproduce->parsed()) return cmd_reproduce(reproduce_target,
                                                      merge_config(reproduce, flags));
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

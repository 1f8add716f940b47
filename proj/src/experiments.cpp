#include "cossiga/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "cossiga/testspace.hpp"

namespace cossiga {

QuadratureSpec CaseSetup::quadrature() const {
    QuadratureSpec q = default_quadrature(p, L);
    if (quad_points > 0) q.points_per_element = quad_points;
    return q;
}

CaseSetup make_case(const std::string& case_name, int p, Regularity reg, int l0, int L,
                    int quad_points) {
    CaseSetup setup;
    setup.exact = exact_solution(case_name);
    if (case_name == "sine_mode")
        setup.geometry = builtin_domain(BuiltinDomain::unit_square);
    else if (setup.exact.dim == 2)
        setup.geometry = builtin_domain(BuiltinDomain::quarter_annulus);
    else
        setup.geometry = builtin_domain(BuiltinDomain::thick_ring);
    setup.p = p;
    setup.regularity = reg;
    setup.l0 = l0;
    setup.L = L;
    setup.quad_points = quad_points;
    return setup;
}

double percentile(std::vector<double> values, double fraction) {
    if (values.empty()) throw std::invalid_argument("empty sample");
    std::sort(values.begin(), values.end());
    const int n = static_cast<int>(values.size());
    const double pos = (n + 1) * fraction;  // 1-based order-statistic position
    if (pos <= 1.0) return values.front();
    if (pos >= n) return values.back();
    const int lo = static_cast<int>(std::floor(pos));
    const double frac = pos - lo;
    return values[lo - 1] * (1.0 - frac) + values[lo] * frac;
}

RunStatistics summarize_runs(const std::vector<double>& errors) {
    if (errors.empty()) throw std::invalid_argument("empty sample");
    RunStatistics st;
    st.n_runs = static_cast<int>(errors.size());
    st.p2_7 = percentile(errors, 0.027);
    st.p25 = percentile(errors, 0.25);
    st.p50 = percentile(errors, 0.50);
    st.p75 = percentile(errors, 0.75);
    st.p99_3 = percentile(errors, 0.993);
    for (double e : errors)
        if (e < st.p2_7 || e > st.p99_3) st.outliers.push_back(e);
    return st;
}

ProblemContext::ProblemContext(CaseSetup setup)
    : setup_(std::move(setup)),
      ctx_(std::make_shared<const AssemblyContext>(setup_.geometry, setup_.quadrature(), setup_.p,
                                                   setup_.regularity, setup_.l0, setup_.L,
                                                   choose_R(setup_.p, setup_.regularity, setup_.L))),
      dict_(std::make_shared<const TrialDictionary>(build_dictionary(*ctx_))),
      tb_(std::make_shared<const TestBasis>(build_test_basis(*ctx_))),
      assembler_(ctx_, dict_, tb_),
      density_(sampling_distribution(tb_->R, setup_.L, setup_.geometry.dim)),
      exact_grid_(sample_exact(*ctx_, setup_.exact)) {
    row_done_.assign(tb_->n_test(), 0);
}

void ProblemContext::ensure_rows(const std::vector<long long>& tau) {
    // Row states: 0 absent, 1 claimed by some caller, 2 filled. Rows are pure
    // functions of q, so each is computed once; readers wait for state 2.
    std::unique_lock<std::mutex> lock(mutex_);
    if (B_.size() == 0) {
        B_.resize(tb_->n_test(), dict_->n_dict());
        c_.resize(tb_->n_test());
    }
    std::vector<long long> mine;
    for (long long q : tau) {
        if (q < 0 || q >= tb_->n_test()) throw std::out_of_range("test index out of range");
        if (row_done_[q] == 0) {
            row_done_[q] = 1;
            mine.push_back(q);
        }
    }
    lock.unlock();

    Eigen::VectorXd buf(dict_->n_dict());
    for (long long q : mine) {
        assembler_.row(q, buf.data());
        const double rhs = assembler_.rhs_entry(exact_grid_, q);
        lock.lock();
        B_.row(q) = buf.transpose();
        c_[q] = rhs;
        row_done_[q] = 2;
        lock.unlock();
        rows_ready_.notify_all();
    }

    lock.lock();
    rows_ready_.wait(lock, [&] {
        for (long long q : tau)
            if (row_done_[q] != 2) return false;
        return true;
    });
}

const Eigen::MatrixXd& ProblemContext::full_B() {
    if (!all_rows_done_) {
        std::vector<long long> all(tb_->n_test());
        for (long long q = 0; q < tb_->n_test(); ++q) all[q] = q;
        ensure_rows(all);
        all_rows_done_ = true;
    }
    return B_;
}

const Eigen::VectorXd& ProblemContext::full_c() {
    full_B();
    return c_;
}

void ProblemContext::gather_rows(const std::vector<long long>& tau, Eigen::MatrixXd& A,
                                 Eigen::VectorXd& b) {
    ensure_rows(tau);
    A.resize(tau.size(), dict_->n_dict());
    b.resize(tau.size());
    for (size_t i = 0; i < tau.size(); ++i) {
        A.row(i) = B_.row(tau[i]);
        b[i] = c_[tau[i]];
    }
}

double ProblemContext::h1_error(const Eigen::VectorXd& coeffs) const {
    return assembler_.h1_relative_error(coeffs, exact_grid_);
}

SparseSolution ProblemContext::solve_pg_bs() {
    const auto ls = least_squares(full_B(), full_c());
    SparseSolution sol;
    sol.coefficients = ls.x;
    sol.residual_norm = ls.residual_norm;
    sol.s = static_cast<int>(dict_->n_dict());
    for (long long j = 0; j < ls.x.size(); ++j)
        if (ls.x[j] != 0.0) sol.support.push_back(j);
    sol.metadata.method = MethodTag::pg_bs;
    return sol;
}

SparseSolution ProblemContext::solve_pg_omp(int s) {
    SparseSolution sol = omp(full_B(), full_c(), s);
    sol.metadata.method = MethodTag::pg_omp;
    return sol;
}

std::vector<SparseSolution> ProblemContext::pg_omp_path(const std::vector<int>& s_values) {
    auto sols = omp_path(full_B(), full_c(), s_values);
    for (auto& sol : sols) sol.metadata.method = MethodTag::pg_omp;
    return sols;
}

SparseSolution ProblemContext::solve_cossiga(int s, long long m, std::uint64_t seed) {
    const std::vector<long long> tau = draw_test_indices(density_, m, seed);
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    gather_rows(tau, A, b);
    const Eigen::VectorXd e = scaling_matrix(density_.pi, tau);
    const Eigen::MatrixXd EA = e.asDiagonal() * A;
    const Eigen::VectorXd Eb = e.cwiseProduct(b);
    SparseSolution sol = omp(EA, Eb, s);
    sol.metadata.m = m;
    sol.metadata.seed = seed;
    sol.metadata.method = MethodTag::cossiga;
    return sol;
}

Method run_method_from_string(const std::string& s) {
    if (s == "pg-bs" || s == "pg_bs") return Method::pg_bs;
    if (s == "pg-omp" || s == "pg_omp") return Method::pg_omp;
    if (s == "cossiga") return Method::cossiga;
    throw std::invalid_argument("unknown method: " + s);
}

const char* to_string(Method m) {
    switch (m) {
        case Method::pg_bs: return "pg-bs";
        case Method::pg_omp: return "pg-omp";
        case Method::cossiga: return "cossiga";
    }
    return "?";
}

RunResult run_method(Method method, ProblemContext& ctx, int s, long long m, std::uint64_t seed) {
    RunResult out;
    switch (method) {
        case Method::pg_bs:
            out.solution = ctx.solve_pg_bs();
            out.n_comp = ctx.n_dict();
            break;
        case Method::pg_omp:
            out.solution = ctx.solve_pg_omp(s);
            out.n_comp = s;
            break;
        case Method::cossiga:
            out.solution = ctx.solve_cossiga(s, m, seed);
            out.n_comp = s;
            break;
    }
    out.h1_rel_err = ctx.h1_error(out.solution.coefficients);
    return out;
}

RunResult run_method(Method method, const CaseSetup& setup, int s, long long m,
                     std::uint64_t seed) {
    ProblemContext ctx(setup);
    return run_method(method, ctx, s, m, seed);
}

std::vector<int> default_s_tested(long long cap) {
    std::vector<int> out;
    for (int k = 0; k <= 36; ++k) {
        const double e = 2.0 + 0.25 * k;  // 2:0.25:11
        long long s = static_cast<long long>(std::ceil(std::pow(2.0, e)));
        if (cap > 0) s = std::min(s, cap);
        if (out.empty() || out.back() != s) out.push_back(static_cast<int>(s));
    }
    return out;
}

int select_s_star(const std::vector<int>& s_values, const std::vector<double>& errors,
                  double mu_factor, double err_bs) {
    if (s_values.empty() || s_values.size() != errors.size())
        throw std::invalid_argument("mismatched calibration records");
    const double target = mu_factor * err_bs;
    int best = s_values[0];
    double best_gap = std::abs(errors[0] - target);
    for (size_t i = 1; i < s_values.size(); ++i) {
        const double gap = std::abs(errors[i] - target);
        if (gap < best_gap || (gap == best_gap && s_values[i] < best)) {
            best_gap = gap;
            best = s_values[i];
        }
    }
    return best;
}

double fit_through_origin(const std::vector<std::pair<int, long long>>& points) {
    if (points.empty()) throw std::invalid_argument("no points to fit");
    double num = 0.0, den = 0.0;
    for (const auto& [s, m] : points) {
        num += static_cast<double>(s) * static_cast<double>(m);
        den += static_cast<double>(s) * static_cast<double>(s);
    }
    return num / den;
}

CalibrationResult calibrate_C(ProblemContext& ctx, double mu_factor,
                              const std::vector<int>& s_tested) {
    if (s_tested.empty()) throw std::invalid_argument("empty sparsity grid");
    if (!(mu_factor > 1.0)) throw std::invalid_argument("mu must exceed 1");

    CalibrationResult cal;
    cal.mu_factor = mu_factor;
    cal.n_dof = ctx.n_dof();
    cal.err_bs = ctx.h1_error(ctx.solve_pg_bs().coefficients);

    std::vector<int> grid = s_tested;
    for (int& s : grid) s = static_cast<int>(std::min<long long>(s, ctx.n_dict()));
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    const auto sols = ctx.pg_omp_path(grid);
    std::vector<double> errors(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) {
        errors[i] = ctx.h1_error(sols[i].coefficients);
        cal.records.push_back({grid[i], -1, errors[i]});
        cal.err_omp[grid[i]] = errors[i];
    }
    cal.s_star = select_s_star(grid, errors, mu_factor, cal.err_bs);
    cal.C = static_cast<double>(cal.s_star) / static_cast<double>(cal.n_dof);
    return cal;
}

CalibrationResult calibrate_D(ProblemContext& ctx, double mu_factor,
                              const std::vector<int>& s_values,
                              const std::vector<long long>& m_grid, int n_runs,
                              std::uint64_t base_seed, int jobs) {
    if (s_values.empty() || m_grid.empty()) throw std::invalid_argument("empty calibration grid");
    if (n_runs < 1) throw std::invalid_argument("n_runs must be >= 1");

    CalibrationResult cal;
    cal.mu_factor = mu_factor;
    cal.n_dof = ctx.n_dof();

    std::vector<int> s_sorted = s_values;
    std::sort(s_sorted.begin(), s_sorted.end());
    const auto omp_sols = ctx.pg_omp_path(s_sorted);
    for (size_t i = 0; i < s_sorted.size(); ++i)
        cal.err_omp[s_sorted[i]] = ctx.h1_error(omp_sols[i].coefficients);

    // Deterministic seed order: s ascending, m ascending, run index innermost.
    std::uint64_t run_counter = 0;
    for (int s : s_sorted) {
        std::vector<std::pair<long long, double>> medians;
        for (long long m : m_grid) {
            if (m < s || m > cal.n_dof) continue;
            std::vector<double> errs(n_runs);
            std::vector<std::uint64_t> seeds(n_runs);
            for (int run = 0; run < n_runs; ++run) seeds[run] = base_seed + run_counter++;
            parallel_runs(n_runs, jobs, [&](int run) {
                const SparseSolution sol = ctx.solve_cossiga(s, m, seeds[run]);
                errs[run] = ctx.h1_error(sol.coefficients);
            });
            const double med = percentile(errs, 0.5);
            medians.emplace_back(m, med);
            cal.records.push_back({s, m, med});
        }
        if (medians.empty()) continue;
        const double target = mu_factor * cal.err_omp[s];
        long long best_m = medians.front().first;
        double best_gap = std::abs(medians.front().second - target);
        for (const auto& [m, med] : medians) {
            const double gap = std::abs(med - target);
            if (gap < best_gap || (gap == best_gap && m < best_m)) {
                best_gap = gap;
                best_m = m;
            }
        }
        cal.m_star.emplace_back(s, best_m);
    }
    if (cal.m_star.empty()) throw std::invalid_argument("no feasible (s, m) pairs in the grid");
    cal.D = fit_through_origin(cal.m_star);
    return cal;
}

RunPlan plan_run(double C, double D, double lambda, long long n_dof) {
    if (!(C > 0.0) || !(D > 0.0) || lambda < 1.0)
        throw std::invalid_argument("plan requires C > 0, D > 0, lambda >= 1");
    RunPlan plan;
    plan.s = std::max(1, static_cast<int>(std::llround(lambda * C * n_dof)));
    plan.rate = std::min(lambda * lambda * C * D, 0.8);
    plan.m = std::max<long long>(plan.s, std::llround(plan.rate * n_dof));
    return plan;
}

std::vector<ConvergencePoint> convergence_study(const std::string& case_name, int p,
                                                Regularity reg, int l0,
                                                const std::vector<int>& L_values, double lambda,
                                                double C, double D, int n_runs,
                                                std::uint64_t base_seed, int jobs,
                                                int quad_points) {
    std::vector<ConvergencePoint> out;
    for (int L : L_values) {
        ProblemContext ctx(make_case(case_name, p, reg, l0, L, quad_points));
        const RunPlan plan = plan_run(C, D, lambda, ctx.n_dof());

        ConvergencePoint pt;
        pt.L = L;
        pt.n_dof = ctx.n_dof();
        pt.n_dict = ctx.n_dict();
        pt.s = plan.s;
        pt.m = plan.m;
        pt.rate = static_cast<double>(plan.m) / static_cast<double>(ctx.n_dof());
        pt.err_bs = ctx.h1_error(ctx.solve_pg_bs().coefficients);
        pt.err_omp = ctx.h1_error(ctx.solve_pg_omp(plan.s).coefficients);

        pt.cossiga_errors.resize(n_runs);
        pt.seeds.resize(n_runs);
        for (int run = 0; run < n_runs; ++run) pt.seeds[run] = base_seed + run;
        parallel_runs(n_runs, jobs, [&](int run) {
            const SparseSolution sol = ctx.solve_cossiga(plan.s, plan.m, pt.seeds[run]);
            pt.cossiga_errors[run] = ctx.h1_error(sol.coefficients);
        });
        pt.stats = summarize_runs(pt.cossiga_errors);
        pt.stats.subsampling_rate = pt.rate;
        out.push_back(std::move(pt));
    }
    return out;
}

void parallel_runs(int n, int jobs, const std::function<void(int)>& fn) {
    jobs = std::max(1, std::min(jobs, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace cossiga

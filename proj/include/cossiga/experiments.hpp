#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <condition_variable>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "cossiga/assembly.hpp"
#include "cossiga/coherence.hpp"
#include "cossiga/exact.hpp"
#include "cossiga/recovery.hpp"

namespace cossiga {

/// One problem instance: exact solution, geometry and discretization parameters.
struct CaseSetup {
    ExactSolution exact;
    GeometryPatch geometry;
    int p = 2;
    Regularity regularity = Regularity::Cmax;
    int l0 = 1;
    int L = 5;
    int quad_points = 0;  // 0: max(p+1, 5)

    QuadratureSpec quadrature() const;
};

/// Default geometry for the built-in cases (quarter annulus in 2D, thick ring
/// in 3D, unit square for sine_mode).
CaseSetup make_case(const std::string& case_name, int p, Regularity reg, int l0, int L,
                    int quad_points = 0);

/// Percentile summary of an ensemble of relative errors; the whiskers sit at
/// the 2.7th and 99.3rd percentiles, values beyond them are outliers.
struct RunStatistics {
    int n_runs = 0;
    double p2_7 = 0, p25 = 0, p50 = 0, p75 = 0, p99_3 = 0;
    std::vector<double> outliers;
    double subsampling_rate = 0.0;
};

RunStatistics summarize_runs(const std::vector<double>& errors);

/// Linear interpolation of order statistics at position (n+1)p, clamped.
double percentile(std::vector<double> values, double fraction);

/// Caches the shared discretization of one problem: dictionary, test basis,
/// sampling density, and lazily assembled rows of the full system. Rows are
/// computed by the same routine regardless of which method requests them, and
/// the memo is safe to share across concurrent runs.
class ProblemContext {
public:
    explicit ProblemContext(CaseSetup setup);

    const CaseSetup& setup() const { return setup_; }
    const TrialDictionary& dict() const { return *dict_; }
    const TestBasis& test_basis() const { return *tb_; }
    const SamplingDensity& density() const { return density_; }
    const Assembler& assembler() const { return assembler_; }
    long long n_dof() const { return dict_->n_dof; }
    long long n_dict() const { return dict_->n_dict(); }

    const Eigen::MatrixXd& full_B();
    const Eigen::VectorXd& full_c();
    /// The requested rows of (B, c), assembling missing ones into the memo.
    void gather_rows(const std::vector<long long>& tau, Eigen::MatrixXd& A, Eigen::VectorXd& b);

    double h1_error(const Eigen::VectorXd& coeffs) const;

    SparseSolution solve_pg_bs();
    SparseSolution solve_pg_omp(int s);
    SparseSolution solve_cossiga(int s, long long m, std::uint64_t seed);
    /// PG-OMP solutions at several sparsity levels from one greedy pass.
    std::vector<SparseSolution> pg_omp_path(const std::vector<int>& s_values);

private:
    void ensure_rows(const std::vector<long long>& tau);

    CaseSetup setup_;
    std::shared_ptr<const AssemblyContext> ctx_;
    std::shared_ptr<const TrialDictionary> dict_;
    std::shared_ptr<const TestBasis> tb_;
    Assembler assembler_;
    SamplingDensity density_;
    ExactOnGrid exact_grid_;

    std::mutex mutex_;
    std::condition_variable rows_ready_;
    Eigen::MatrixXd B_;
    Eigen::VectorXd c_;
    std::vector<char> row_done_;
    std::atomic<bool> all_rows_done_{false};
};

enum class Method { pg_bs, pg_omp, cossiga };
Method run_method_from_string(const std::string& s);
const char* to_string(Method m);

struct RunResult {
    SparseSolution solution;
    double h1_rel_err = 0.0;
    long long n_comp = 0;
};

RunResult run_method(Method method, ProblemContext& ctx, int s, long long m, std::uint64_t seed);
RunResult run_method(Method method, const CaseSetup& setup, int s, long long m,
                     std::uint64_t seed);

/// s* = C N_dof and m = D s with the tolerance factor mu of the calibration.
struct CalibrationResult {
    double C = 0.0;
    double D = 0.0;
    double mu_factor = 0.0;
    long long n_dof = 0;
    int s_star = 0;
    double err_bs = 0.0;
    struct Record {
        int s = 0;
        long long m = -1;  // -1 for PG-OMP records
        double err = 0.0;  // median over runs when m >= 0
    };
    std::vector<Record> records;
    std::vector<std::pair<int, long long>> m_star;  // per tested s
    std::map<int, double> err_omp;                  // per tested s
};

/// MATLAB-style ceil(2.^(2:0.25:11)) grid, deduplicated and capped.
std::vector<int> default_s_tested(long long cap);

int select_s_star(const std::vector<int>& s_values, const std::vector<double>& errors,
                  double mu_factor, double err_bs);
double fit_through_origin(const std::vector<std::pair<int, long long>>& points);

CalibrationResult calibrate_C(ProblemContext& ctx, double mu_factor,
                              const std::vector<int>& s_tested);
CalibrationResult calibrate_D(ProblemContext& ctx, double mu_factor,
                              const std::vector<int>& s_values,
                              const std::vector<long long>& m_grid, int n_runs,
                              std::uint64_t base_seed, int jobs = 1);

/// s = round(lambda C N_dof) (at least 1), m/N_dof = min(lambda^2 C D, 80%),
/// m rounded and clamped to at least s.
struct RunPlan {
    int s = 1;
    long long m = 1;
    double rate = 0.0;
};
RunPlan plan_run(double C, double D, double lambda, long long n_dof);

struct ConvergencePoint {
    int L = 0;
    long long n_dof = 0, n_dict = 0;
    int s = 0;
    long long m = 0;
    double rate = 0.0;
    double err_bs = 0.0, err_omp = 0.0;
    std::vector<double> cossiga_errors;
    std::vector<std::uint64_t> seeds;
    RunStatistics stats;
};

std::vector<ConvergencePoint> convergence_study(const std::string& case_name, int p,
                                                Regularity reg, int l0,
                                                const std::vector<int>& L_values, double lambda,
                                                double C, double D, int n_runs,
                                                std::uint64_t base_seed, int jobs = 1,
                                                int quad_points = 0);

/// Runs fn(0..n-1) on `jobs` worker threads; results keyed by index stay deterministic.
void parallel_runs(int n, int jobs, const std::function<void(int)>& fn);

}  // namespace cossiga

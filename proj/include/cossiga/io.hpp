#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cossiga/experiments.hpp"

namespace cossiga {

/// Dense Matrix Market "array real general" format.
void write_matrix_market(const Eigen::MatrixXd& M, const std::string& path);
Eigen::MatrixXd read_matrix_market(const std::string& path);

/// Single-column CSV with a header line.
void write_vector_csv(const Eigen::VectorXd& v, const std::string& name, const std::string& path);

std::string format_double(double v);

/// One row per run: run_id, seed, method, p, regularity, l0, L, s, m,
/// subsampling_rate, h1_rel_err.
struct RunRecord {
    long long run_id = 0;
    std::uint64_t seed = 0;
    std::string method;
    int p = 0;
    Regularity regularity = Regularity::Cmax;
    int l0 = 0;
    int L = 0;
    long long s = 0;
    long long m = 0;
    double subsampling_rate = 0.0;
    double h1_rel_err = 0.0;
};

void write_runs_csv(const std::vector<RunRecord>& runs, const std::string& path);

/// One row per configuration with the box-plot percentiles.
struct SummaryRecord {
    std::string case_name;
    int p = 0;
    Regularity regularity = Regularity::Cmax;
    int l0 = 0;
    int L = 0;
    long long s = 0;
    long long m = 0;
    double subsampling_rate = 0.0;
    double err_bs = 0.0;
    double err_omp = 0.0;
    RunStatistics stats;
};

void write_summary_csv(const std::vector<SummaryRecord>& rows, const std::string& path);

}  // namespace cossiga

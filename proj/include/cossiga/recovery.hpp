#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "cossiga/assembly.hpp"
#include "cossiga/coherence.hpp"
#include "cossiga/dictionary.hpp"
#include "cossiga/exact.hpp"

namespace cossiga {

enum class MethodTag { none, cossiga, pg_omp, pg_bs };
const char* to_string(MethodTag tag);
MethodTag method_from_string(const std::string& s);

/// Sparse coefficient vector over the dictionary with recovery metadata.
struct SparseSolution {
    Eigen::VectorXd coefficients;
    std::vector<long long> support;  // in selection order
    int s = 0;                       // target sparsity
    double residual_norm = 0.0;
    std::vector<double> residual_trace;  // norm after each iteration
    bool capped = false;                 // s exceeded the column count

    struct Metadata {
        long long m = 0;
        std::uint64_t seed = 0;
        MethodTag method = MethodTag::none;
    } metadata;
};

/// Orthogonal Matching Pursuit: greedy selection by normalized residual
/// correlation (ties to lowest index), least squares on the active support via
/// an incrementally updated orthogonal factorization. Stops after s iterations,
/// at residual <= tol, or when the residual norm stagnates.
SparseSolution omp(const Eigen::MatrixXd& M, const Eigen::VectorXd& y, int s, double tol = -1.0);

/// One greedy pass to max(s_checkpoints), snapshotting the least-squares
/// solution at each requested sparsity. Entry k matches omp(M, y, s_checkpoints[k])
/// whenever the greedy path did not stop early; after an early stop the last
/// solution is reused.
std::vector<SparseSolution> omp_path(const Eigen::MatrixXd& M, const Eigen::VectorXd& y,
                                     const std::vector<int>& s_checkpoints, double tol = -1.0);

struct LeastSquaresResult {
    Eigen::VectorXd x;
    double residual_norm = 0.0;
};

/// Minimum-norm least squares via a rank-revealing complete orthogonal decomposition.
LeastSquaresResult least_squares(const Eigen::MatrixXd& M, const Eigen::VectorXd& y);

/// The end-to-end pipeline: choose R, draw m test indices from pi, assemble the
/// m scaled rows, run s iterations of OMP on min |E(Az-b)|_2.
SparseSolution cossiga_solve(int p, Regularity reg, int L, int s, long long m, int l0,
                             const GeometryPatch& geometry, const ExactSolution& exact,
                             std::uint64_t seed);
SparseSolution cossiga_solve(int p, Regularity reg, int L, int s, long long m, int l0,
                             const GeometryPatch& geometry, const ExactSolution& exact,
                             std::uint64_t seed, const QuadratureSpec& quad);

/// Solution stem data as CSV: j, level, tensor index per direction, coefficient.
void write_solution_csv(const TrialDictionary& dict, const Eigen::VectorXd& coefficients,
                        const std::string& path);

}  // namespace cossiga

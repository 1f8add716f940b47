#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace cossiga {

/// Upper bound on the local a-coherence of test frequency r at level L:
/// min( 2^{(3d-2)L} |r|_2^2 / prod r_k^4 ,  |r|_2^2 / (|r|_inf^2 prod r_k) ).
double nu_bound(const std::vector<int>& r, int L, int dim);

/// Row-sampling distribution pi = nu / |nu|_1 over the lexicographic ordering
/// of [1..R]^d (last index fastest, matching TestBasis).
struct SamplingDensity {
    Eigen::VectorXd pi;
    Eigen::VectorXd nu;
    int R = 0;
    int dim = 0;
    int L = 0;

    /// Arbitrary density from nonnegative weights (normalized); used by tests
    /// and diagnostics, carries no frequency structure.
    static SamplingDensity from_weights(const Eigen::VectorXd& weights);
};

SamplingDensity sampling_distribution(int R, int L, int dim);

/// m i.i.d. draws with replacement by inverse-CDF lookup. The generator is part
/// of the reproducibility contract: std::mt19937_64 seeded with `seed`, one
/// 64-bit word per draw mapped to [0,1) as (word >> 11) * 2^-53.
std::vector<long long> draw_test_indices(const SamplingDensity& density, long long m,
                                         std::uint64_t seed);

/// Density table as CSV: q, r-components, nu, pi (1-based q).
void write_density_csv(const SamplingDensity& density, const std::string& path);

}  // namespace cossiga

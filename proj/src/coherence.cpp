#include "cossiga/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <stdexcept>

namespace cossiga {

double nu_bound(const std::vector<int>& r, int L, int dim) {
    if (static_cast<int>(r.size()) != dim) throw std::invalid_argument("frequency dimension mismatch");
    double norm2 = 0.0, prod = 1.0, prod4 = 1.0, rmax = 0.0;
    for (int k = 0; k < dim; ++k) {
        if (r[k] < 1) throw std::invalid_argument("frequencies must be >= 1");
        const double rk = r[k];
        norm2 += rk * rk;
        prod *= rk;
        prod4 *= rk * rk * rk * rk;
        rmax = std::max(rmax, rk);
    }
    const double first = std::ldexp(norm2 / prod4, (3 * dim - 2) * L);
    const double second = norm2 / (rmax * rmax * prod);
    return std::min(first, second);
}

SamplingDensity SamplingDensity::from_weights(const Eigen::VectorXd& weights) {
    if (weights.size() < 1) throw std::invalid_argument("weights must be nonempty");
    if ((weights.array() < 0.0).any()) throw std::invalid_argument("weights must be nonnegative");
    const double total = weights.sum();
    if (!(total > 0.0)) throw std::invalid_argument("weights must not all vanish");
    SamplingDensity d;
    d.nu = weights;
    d.pi = weights / total;
    return d;
}

SamplingDensity sampling_distribution(int R, int L, int dim) {
    if (R < 1) throw std::invalid_argument("R must be >= 1");
    long long n = 1;
    for (int k = 0; k < dim; ++k) n *= R;
    SamplingDensity d;
    d.R = R;
    d.dim = dim;
    d.L = L;
    d.nu.resize(n);
    std::vector<int> r(dim, 1);
    for (long long q = 0; q < n; ++q) {
        d.nu[q] = nu_bound(r, L, dim);
        int k = dim - 1;
        while (k >= 0 && ++r[k] > R) r[k--] = 1;
        (void)k;
    }
    d.pi = d.nu / d.nu.sum();
    return d;
}

std::vector<long long> draw_test_indices(const SamplingDensity& density, long long m,
                                         std::uint64_t seed) {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    const Eigen::VectorXd& pi = density.pi;
    std::vector<double> cdf(pi.size());
    double acc = 0.0;
    for (Eigen::Index q = 0; q < pi.size(); ++q) {
        acc += pi[q];
        cdf[q] = acc;
    }
    cdf.back() = 1.0;

    std::mt19937_64 gen(seed);
    std::vector<long long> tau(m);
    for (long long i = 0; i < m; ++i) {
        const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        tau[i] = std::min<long long>(it - cdf.begin(), pi.size() - 1);
    }
    return tau;
}

void write_density_csv(const SamplingDensity& density, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "q";
    for (int k = 0; k < density.dim; ++k) out << ",r" << (k + 1);
    out << ",nu,pi\n";
    char buf[64];
    std::vector<int> r(density.dim, 1);
    for (Eigen::Index q = 0; q < density.pi.size(); ++q) {
        out << (q + 1);
        for (int k = 0; k < density.dim; ++k) out << "," << r[k];
        std::snprintf(buf, sizeof(buf), "%.17g", density.nu[q]);
        out << "," << buf;
        std::snprintf(buf, sizeof(buf), "%.17g", density.pi[q]);
        out << "," << buf << "\n";
        int k = density.dim - 1;
        while (k >= 0 && ++r[k] > density.R) r[k--] = 1;
    }
}

}  // namespace cossiga

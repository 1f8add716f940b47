#pragma once

// Shared test utilities. Everything here is an independent oracle: it must not
// call back into the code paths it is used to check.

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "cossiga/splines.hpp"

namespace testsupport {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& gen, double a, double b) {
    return a + (b - a) * std::generate_canonical<double, 53>(gen);
}

/// Boehm single-knot insertion: coefficients over the refined knot vector that
/// reproduce the same spline curve.
struct SplineCoeffs {
    std::vector<double> knots;
    std::vector<double> coeffs;  // one per basis function
    int degree = 0;
};

inline SplineCoeffs insert_knot(const SplineCoeffs& in, double u) {
    const int p = in.degree;
    const auto& U = in.knots;
    int k = 0;  // span: U[k] <= u < U[k+1]
    while (k + 1 < static_cast<int>(U.size()) && U[k + 1] <= u) ++k;

    SplineCoeffs out;
    out.degree = p;
    out.knots = U;
    out.knots.insert(out.knots.begin() + k + 1, u);
    const int n_new = static_cast<int>(in.coeffs.size()) + 1;
    out.coeffs.resize(n_new);
    for (int i = 0; i < n_new; ++i) {
        double alpha;
        if (i <= k - p)
            alpha = 1.0;
        else if (i >= k + 1)
            alpha = 0.0;
        else
            alpha = (u - U[i]) / (U[i + p] - U[i]);
        const double prev = (i > 0) ? in.coeffs[i - 1] : 0.0;
        const double cur = (i < static_cast<int>(in.coeffs.size())) ? in.coeffs[i] : 0.0;
        out.coeffs[i] = alpha * cur + (1.0 - alpha) * prev;
    }
    return out;
}

/// Re-expresses coefficients over knot vector `from` on the finer `to`
/// (every knot of `to` must appear in `from` at least as often).
inline SplineCoeffs refine_to(const SplineCoeffs& in, const std::vector<double>& target_knots) {
    SplineCoeffs cur = in;
    for (double u : target_knots) {
        const auto count_in = [&](const std::vector<double>& v) {
            return std::count(v.begin(), v.end(), u);
        };
        while (count_in(cur.knots) < count_in(target_knots)) cur = insert_knot(cur, u);
    }
    return cur;
}

/// Pointwise spline evaluation from raw coefficients via Cox-De Boor.
inline double eval_coeffs(const SplineCoeffs& sc, double x) {
    const auto kv = cossiga::KnotVector::from_knots(sc.degree, sc.knots);
    const auto be = cossiga::eval_basis(kv, x);
    double v = 0.0;
    for (int t = 0; t <= sc.degree; ++t) {
        const int i = be.first_index + t;
        if (i >= 0 && i < static_cast<int>(sc.coeffs.size())) v += sc.coeffs[i] * be.values[t];
    }
    return v;
}

}  // namespace testsupport

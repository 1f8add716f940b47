#pragma once

#include <string>
#include <vector>

namespace cossiga {

/// Smoothness class of a spline space at interior breakpoints.
/// Cmax keeps every interior knot simple (C^{p-1} continuity); C0 repeats
/// interior knots p times so the basis is merely continuous.
enum class Regularity { Cmax, C0 };

const char* to_string(Regularity reg);
Regularity regularity_from_string(const std::string& s);

/// Open knot vector over [0,1] with uniform breakpoints at multiples of 2^-level.
struct KnotVector {
    int degree = 0;
    int level = 0;  // 0 when not built from a dyadic level
    Regularity regularity = Regularity::Cmax;
    std::vector<double> knots;
    std::vector<double> breakpoints;
    std::vector<int> multiplicities;

    int num_basis() const { return static_cast<int>(knots.size()) - degree - 1; }
    int num_elements() const { return static_cast<int>(breakpoints.size()) - 1; }
    /// Count of basis functions vanishing on neither endpoint, i.e. indices 1..n-2.
    int num_interior() const { return num_basis() - 2; }

    /// Wrap a raw knot sequence; validates openness, monotonicity and the [0,1] range.
    static KnotVector from_knots(int degree, std::vector<double> knots);
};

/// 2^level equal elements on [0,1]; interior multiplicity 1 (Cmax) or p (C0).
KnotVector make_open_uniform_knots(int level, int degree, Regularity regularity);

/// Values and first derivatives of the (at most) degree+1 basis functions
/// that do not vanish at a query point.
struct BasisEval {
    int first_index = 0;  // 0-based index of the first non-vanishing function
    std::vector<double> values;
    std::vector<double> derivatives;
};

/// Index k with knots[k] <= xi < knots[k+1]; xi == 1 belongs to the last element.
int find_span(const KnotVector& kv, double xi);

/// Cox-De Boor evaluation restricted to the local nonzero band (0/0 := 0).
BasisEval eval_basis(const KnotVector& kv, double xi);

}  // namespace cossiga

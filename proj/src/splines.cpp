#include "cossiga/splines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cossiga {

const char* to_string(Regularity reg) {
    return reg == Regularity::Cmax ? "cmax" : "c0";
}

Regularity regularity_from_string(const std::string& s) {
    if (s == "cmax" || s == "Cmax" || s == "CMAX") return Regularity::Cmax;
    if (s == "c0" || s == "C0") return Regularity::C0;
    throw std::invalid_argument("unknown regularity: " + s);
}

namespace {

void fill_breakpoints(KnotVector& kv) {
    kv.breakpoints.clear();
    kv.multiplicities.clear();
    for (double x : kv.knots) {
        if (kv.breakpoints.empty() || x != kv.breakpoints.back()) {
            kv.breakpoints.push_back(x);
            kv.multiplicities.push_back(1);
        } else {
            ++kv.multiplicities.back();
        }
    }
}

}  // namespace

KnotVector KnotVector::from_knots(int degree, std::vector<double> knots) {
    if (degree < 1) throw std::invalid_argument("degree must be >= 1");
    if (static_cast<int>(knots.size()) < 2 * (degree + 1))
        throw std::invalid_argument("too few knots for an open knot vector");
    if (!std::is_sorted(knots.begin(), knots.end()))
        throw std::invalid_argument("knots must be nondecreasing");
    if (knots.front() != 0.0 || knots.back() != 1.0)
        throw std::invalid_argument("knots must span [0,1]");
    for (int i = 0; i <= degree; ++i) {
        if (knots[i] != 0.0 || knots[knots.size() - 1 - i] != 1.0)
            throw std::invalid_argument("knot vector is not open (endpoint multiplicity != degree+1)");
    }
    KnotVector kv;
    kv.degree = degree;
    kv.level = 0;
    kv.knots = std::move(knots);
    fill_breakpoints(kv);
    return kv;
}

KnotVector make_open_uniform_knots(int level, int degree, Regularity regularity) {
    if (level < 1) throw std::invalid_argument("level must be >= 1");
    if (degree < 1) throw std::invalid_argument("degree must be >= 1");

    const int n_el = 1 << level;
    const int interior_mult = (regularity == Regularity::Cmax) ? 1 : degree;

    KnotVector kv;
    kv.degree = degree;
    kv.level = level;
    kv.regularity = regularity;
    kv.knots.assign(degree + 1, 0.0);
    for (int e = 1; e < n_el; ++e) {
        const double x = static_cast<double>(e) / n_el;
        for (int r = 0; r < interior_mult; ++r) kv.knots.push_back(x);
    }
    kv.knots.insert(kv.knots.end(), degree + 1, 1.0);
    fill_breakpoints(kv);
    return kv;
}

int find_span(const KnotVector& kv, double xi) {
    if (xi < 0.0 || xi > 1.0) throw std::domain_error("evaluation point outside [0,1]");
    const int n = kv.num_basis();
    const auto& t = kv.knots;
    if (xi >= t[n]) return n - 1;  // xi == 1: closure of the half-open convention
    auto it = std::upper_bound(t.begin() + kv.degree, t.begin() + n + 1, xi);
    return static_cast<int>(it - t.begin()) - 1;
}

BasisEval eval_basis(const KnotVector& kv, double xi) {
    const int p = kv.degree;
    const int span = find_span(kv, xi);
    const auto& t = kv.knots;

    // Triangular table ndu[r][j] = N_{span-j+r, j}(xi), built bottom-up so only
    // the p+1 functions alive on the current element are ever touched.
    std::vector<double> ndu((p + 1) * (p + 1), 0.0);
    auto at = [p](std::vector<double>& a, int r, int j) -> double& { return a[r * (p + 1) + j]; };
    std::vector<double> left(p + 1, 0.0), right(p + 1, 0.0);

    at(ndu, 0, 0) = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = xi - t[span + 1 - j];
        right[j] = t[span + j] - xi;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double den = right[r + 1] + left[j - r];
            const double temp = (den != 0.0) ? at(ndu, r, j - 1) / den : 0.0;
            at(ndu, r, j) = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        at(ndu, j, j) = saved;
    }

    BasisEval out;
    out.first_index = span - p;
    out.values.resize(p + 1);
    out.derivatives.resize(p + 1);
    for (int r = 0; r <= p; ++r) out.values[r] = at(ndu, r, p);

    // B'_{f,p} = p [ N_{f,p-1}/(t[f+p]-t[f]) - N_{f+1,p-1}/(t[f+p+1]-t[f+1]) ]
    for (int r = 0; r <= p; ++r) {
        const int f = span - p + r;
        double d = 0.0;
        if (r >= 1) {
            const double den = t[f + p] - t[f];
            if (den != 0.0) d += at(ndu, r - 1, p - 1) / den;
        }
        if (r <= p - 1) {
            const double den = t[f + p + 1] - t[f + 1];
            if (den != 0.0) d -= at(ndu, r, p - 1) / den;
        }
        out.derivatives[r] = p * d;
    }
    return out;
}

}  // namespace cossiga

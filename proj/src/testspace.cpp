#include "cossiga/testspace.hpp"

#include <cmath>
#include <stdexcept>

#include "cossiga/assembly.hpp"

namespace cossiga {

int choose_R(int p, Regularity reg, int L) {
    if (p < 1 || L < 1) throw std::invalid_argument("degree and level must be >= 1");
    const long long n_int = (reg == Regularity::Cmax) ? ((1LL << L) + p - 2) : ((1LL << L) * p - 1);
    return static_cast<int>(std::ceil(1.5 * static_cast<double>(n_int)));
}

TestEval eval_test(const std::vector<int>& r, const Eigen::VectorXd& xi) {
    const int d = static_cast<int>(r.size());
    if (xi.size() != d) throw std::invalid_argument("frequency/point dimension mismatch");
    const double pi_c = 3.14159265358979323846;
    double s[3], c[3];
    for (int k = 0; k < d; ++k) {
        if (r[k] < 1) throw std::invalid_argument("frequencies must be >= 1");
        s[k] = std::sin(r[k] * pi_c * xi[k]);
        c[k] = r[k] * pi_c * std::cos(r[k] * pi_c * xi[k]);
    }
    TestEval out;
    out.gradient = Eigen::VectorXd::Zero(d);
    double v = 1.0;
    for (int k = 0; k < d; ++k) v *= s[k];
    out.value = v;
    for (int k = 0; k < d; ++k) {
        double g = 1.0;
        for (int i = 0; i < d; ++i) g *= (i == k) ? c[i] : s[i];
        out.gradient[k] = g;
    }
    return out;
}

long long TestBasis::index_of(const std::vector<int>& r) const {
    if (static_cast<int>(r.size()) != dim) throw std::invalid_argument("frequency dimension mismatch");
    long long q = 0;
    for (int k = 0; k < dim; ++k) {
        if (r[k] < 1 || r[k] > R) throw std::out_of_range("frequency outside [1,R]");
        q = q * R + (r[k] - 1);
    }
    return q;
}

std::vector<int> TestBasis::freq_of(long long q) const {
    if (q < 0 || q >= n_test()) throw std::out_of_range("test index out of range");
    std::vector<int> r(dim);
    for (int k = dim - 1; k >= 0; --k) {
        r[k] = static_cast<int>(q % R) + 1;
        q /= R;
    }
    return r;
}

TestBasis build_test_basis(const AssemblyContext& ctx) {
    TestBasis tb;
    tb.R = ctx.R();
    tb.dim = ctx.dim();
    tb.norms = ctx.test_seminorms();
    if ((tb.norms.array() <= 0.0).any())
        throw geometry_error("nonpositive test-function normalization");
    return tb;
}

TestBasis build_test_basis(int R, const GeometryPatch& geometry, const QuadratureSpec& quad,
                           int dim) {
    if (R < 1) throw std::invalid_argument("R must be >= 1");
    if (dim != geometry.dim) throw std::invalid_argument("dimension mismatch");
    AssemblyContext ctx(geometry, quad, /*p=*/0, Regularity::Cmax, 0, 0, R);
    return build_test_basis(ctx);
}

}  // namespace cossiga

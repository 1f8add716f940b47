#include "cossiga/exact.hpp"

#include <cmath>
#include <stdexcept>

namespace cossiga {

namespace {

constexpr double kPi = 3.14159265358979323846;

double gauss_bump(const double* x, const double* center, double sigma, int dim) {
    double q = 0.0;
    for (int k = 0; k < dim; ++k) q += (x[k] - center[k]) * (x[k] - center[k]);
    return std::exp(-q / (sigma * sigma));
}

void gauss_bump_grad(const double* x, const double* center, double sigma, int dim, double* g) {
    const double v = gauss_bump(x, center, sigma, dim);
    for (int k = 0; k < dim; ++k) g[k] = -2.0 * (x[k] - center[k]) / (sigma * sigma) * v;
}

// q(x) = (1/5) x1 x2 (x1^2+x2^2-1)(4-x1^2-x2^2): vanishes on both arcs and both
// straight edges of the quarter annulus.
double ring_poly(const double* x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return 0.2 * x[0] * x[1] * (r2 - 1.0) * (4.0 - r2);
}

void ring_poly_grad(const double* x, double* g) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    const double a = (r2 - 1.0) * (4.0 - r2);
    const double da_dr2 = 5.0 - 2.0 * r2;  // d/dr2 [(r2-1)(4-r2)]
    g[0] = 0.2 * (x[1] * a + x[0] * x[1] * da_dr2 * 2.0 * x[0]);
    g[1] = 0.2 * (x[0] * a + x[0] * x[1] * da_dr2 * 2.0 * x[1]);
}

}  // namespace

ExactSolution exact_solution(const std::string& name) {
    ExactSolution u;
    u.name = name;
    if (name == "gauss2d") {
        u.dim = 2;
        u.value = [](const double* x) {
            const double c[2] = {0.5, 1.4};
            return gauss_bump(x, c, 0.08, 2);
        };
        u.gradient = [](const double* x, double* g) {
            const double c[2] = {0.5, 1.4};
            gauss_bump_grad(x, c, 0.08, 2, g);
        };
    } else if (name == "polygauss2d") {
        u.dim = 2;
        u.value = [](const double* x) {
            const double c[2] = {0.5, 1.4};
            return ring_poly(x) + gauss_bump(x, c, 0.04, 2);
        };
        u.gradient = [](const double* x, double* g) {
            const double c[2] = {0.5, 1.4};
            gauss_bump_grad(x, c, 0.04, 2, g);
            double gp[2];
            ring_poly_grad(x, gp);
            g[0] += gp[0];
            g[1] += gp[1];
        };
    } else if (name == "poly_only_2d") {
        u.dim = 2;
        u.value = [](const double* x) { return ring_poly(x); };
        u.gradient = [](const double* x, double* g) { ring_poly_grad(x, g); };
    } else if (name == "polygauss3d") {
        u.dim = 3;
        u.value = [](const double* x) {
            const double c[3] = {0.5, 1.4, 0.5};
            return ring_poly(x) * x[2] * (x[2] - 1.0) + gauss_bump(x, c, 0.04, 3);
        };
        u.gradient = [](const double* x, double* g) {
            const double c[3] = {0.5, 1.4, 0.5};
            gauss_bump_grad(x, c, 0.04, 3, g);
            double gp[2];
            ring_poly_grad(x, gp);
            const double z = x[2] * (x[2] - 1.0);
            g[0] += gp[0] * z;
            g[1] += gp[1] * z;
            g[2] += ring_poly(x) * (2.0 * x[2] - 1.0);
        };
    } else if (name == "sine_mode") {
        u.dim = 2;
        u.value = [](const double* x) { return std::sin(kPi * x[0]) * std::sin(kPi * x[1]); };
        u.gradient = [](const double* x, double* g) {
            g[0] = kPi * std::cos(kPi * x[0]) * std::sin(kPi * x[1]);
            g[1] = kPi * std::sin(kPi * x[0]) * std::cos(kPi * x[1]);
        };
    } else {
        throw std::invalid_argument("unknown exact solution: " + name);
    }
    return u;
}

}  // namespace cossiga

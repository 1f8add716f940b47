#include "cossiga/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace cossiga {

QuadratureSpec default_quadrature(int degree, int max_level) {
    QuadratureSpec spec;
    spec.points_per_element = std::max(degree + 1, 6);
    spec.mesh_level = max_level;
    return spec;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    if (n < 1) throw std::invalid_argument("quadrature order must be >= 1");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const double pi = 3.14159265358979323846;
    const int half = (n + 1) / 2;
    for (int k = 0; k < half; ++k) {
        // Newton on P_n from the Chebyshev-like initial guess.
        double x = std::cos(pi * (k + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        nodes[k] = -x;
        nodes[n - 1 - k] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[k] = w;
        weights[n - 1 - k] = w;
    }
    if (n % 2 == 1) nodes[n / 2] = 0.0;
}

Grid1D make_grid_1d(const QuadratureSpec& spec) {
    if (spec.points_per_element < 1) throw std::invalid_argument("points per element must be >= 1");
    if (spec.mesh_level < 0) throw std::invalid_argument("mesh level must be >= 0");
    std::vector<double> gx, gw;
    gauss_legendre(spec.points_per_element, gx, gw);

    Grid1D grid;
    grid.points_per_element = spec.points_per_element;
    grid.num_elements = 1 << spec.mesh_level;
    const double h = 1.0 / grid.num_elements;
    grid.nodes.reserve(grid.num_elements * spec.points_per_element);
    grid.weights.reserve(grid.num_elements * spec.points_per_element);
    for (int e = 0; e < grid.num_elements; ++e) {
        const double a = e * h;
        for (int k = 0; k < spec.points_per_element; ++k) {
            grid.nodes.push_back(a + 0.5 * h * (gx[k] + 1.0));
            grid.weights.push_back(0.5 * h * gw[k]);
        }
    }
    return grid;
}

}  // namespace cossiga

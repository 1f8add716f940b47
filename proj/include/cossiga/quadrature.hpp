#pragma once

#include <vector>

namespace cossiga {

/// Composite tensor Gauss-Legendre rule: `points_per_element` nodes per
/// direction on every element of the dyadic mesh of size 2^-mesh_level.
struct QuadratureSpec {
    int points_per_element = 5;
    int mesh_level = 1;
};

/// q = max(p+1, 6) resolves both degree-2p spline products and the highest
/// sine frequency R ~ 1.5*2^L (at most ~0.75 period per element, integrated
/// to ~1e-8; 5 points leave ~1e-6 at the top frequencies).
QuadratureSpec default_quadrature(int degree, int max_level);

/// Gauss-Legendre nodes and weights on [-1,1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// One direction of the composite rule on [0,1].
struct Grid1D {
    std::vector<double> nodes;    // ascending, element by element
    std::vector<double> weights;  // matching weights, sum to 1
    int points_per_element = 0;
    int num_elements = 0;

    int size() const { return static_cast<int>(nodes.size()); }
};

Grid1D make_grid_1d(const QuadratureSpec& spec);

}  // namespace cossiga

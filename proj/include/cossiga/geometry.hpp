#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "cossiga/splines.hpp"

namespace cossiga {

struct geometry_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Rational tensor-product spline map F from [0,1]^dim to the physical domain.
///
/// Control points and weights are stored in lexicographic order of the
/// per-direction multi-index (i_1,...,i_d), last index fastest:
/// flat = ((i_1 * n_2) + i_2) * n_3 + i_3.
struct GeometryPatch {
    int dim = 2;
    std::vector<int> degrees;
    std::vector<KnotVector> knot_vectors;
    Eigen::MatrixXd control_points;  // (num control points) x dim
    Eigen::VectorXd weights;

    int basis_count(int direction) const { return knot_vectors[direction].num_basis(); }
};

enum class BuiltinDomain { unit_square, unit_cube, quarter_annulus, thick_ring };

BuiltinDomain builtin_domain_from_string(const std::string& name);
const char* to_string(BuiltinDomain name);

GeometryPatch builtin_domain(BuiltinDomain name);
GeometryPatch builtin_domain(const std::string& name);

/// F(xi) = sum_i R_i(xi) P_i with rational basis R_i = w_i B_i / sum_k w_k B_k.
Eigen::VectorXd map_point(const GeometryPatch& g, const Eigen::VectorXd& xi);

/// Column k is dF/dxi_k, from the quotient rule on the rational basis.
Eigen::MatrixXd jacobian(const GeometryPatch& g, const Eigen::VectorXd& xi);

/// Weights strictly positive and det J > 0 at all tensor Gauss points of a
/// 4-point rule on an 8^dim probe mesh; throws geometry_error otherwise.
void validate_patch(const GeometryPatch& g);

std::string patch_to_json(const GeometryPatch& g);
GeometryPatch patch_from_json(const std::string& text);
void save_patch(const GeometryPatch& g, const std::string& path);
GeometryPatch load_patch(const std::string& path);

}  // namespace cossiga

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cossiga/geometry.hpp"
#include "cossiga/quadrature.hpp"
#include "cossiga/splines.hpp"

namespace cossiga {

class AssemblyContext;

/// Heuristic maximum sine frequency per direction: R = ceil(1.5 * n_int(L)),
/// which guarantees N_test = R^d >= N_dof.
int choose_R(int p, Regularity reg, int L);

struct TestEval {
    double value = 0.0;
    Eigen::VectorXd gradient;  // parametric
};

/// sin_r(xi) = prod_k sin(r_k pi xi_k) and its parametric gradient (unnormalized).
TestEval eval_test(const std::vector<int>& r, const Eigen::VectorXd& xi);

/// Sine test functions over [1..R]^d in lexicographic order (last index fastest),
/// with the H^1(Omega) seminorms of their mapped counterparts.
struct TestBasis {
    int R = 1;
    int dim = 2;
    Eigen::VectorXd norms;

    long long n_test() const {
        long long n = 1;
        for (int k = 0; k < dim; ++k) n *= R;
        return n;
    }
    long long index_of(const std::vector<int>& r) const;
    std::vector<int> freq_of(long long q) const;
};

TestBasis build_test_basis(int R, const GeometryPatch& geometry, const QuadratureSpec& quad, int dim);
TestBasis build_test_basis(const AssemblyContext& ctx);

}  // namespace cossiga

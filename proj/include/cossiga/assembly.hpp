#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "cossiga/dictionary.hpp"
#include "cossiga/exact.hpp"
#include "cossiga/geometry.hpp"
#include "cossiga/quadrature.hpp"
#include "cossiga/testspace.hpp"

namespace cossiga {

/// Full Petrov-Galerkin system B z = c (rows: test functions, columns: atoms).
struct PGSystem {
    Eigen::MatrixXd B;
    Eigen::VectorXd c;
};

/// Row-subsampled system E(A z - b): the m drawn rows of B, the matching
/// right-hand side entries, and the diagonal scaling E_ii = 1/sqrt(m pi[tau_i]).
struct SubsampledSystem {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    Eigen::VectorXd E_diag;
    std::vector<long long> tau;
    Eigen::VectorXd pi;
};

Eigen::VectorXd scaling_matrix(const Eigen::VectorXd& pi, const std::vector<long long>& tau);

/// Precomputed quadrature grid, geometry factors and univariate tables shared
/// by dictionary construction, test-norm computation, assembly and error
/// evaluation. All integrals below run over the same composite Gauss rule, so
/// identical quantities agree bitwise across entry points.
class AssemblyContext {
public:
    AssemblyContext(GeometryPatch geometry, QuadratureSpec quad, int p, Regularity reg, int l0,
                    int L, int R);

    const GeometryPatch& geometry() const { return geom_; }
    const QuadratureSpec& quad() const { return quad_; }
    int dim() const { return dim_; }
    int degree() const { return p_; }
    Regularity regularity() const { return reg_; }
    int l0() const { return l0_; }
    int L() const { return L_; }
    int R() const { return R_; }

    const Grid1D& grid() const { return grid_; }
    int n1d() const { return grid_.size(); }
    long long num_points() const { return npts_; }
    long long flatten(const int* k) const;

    const KnotVector& level_knots(int level) const { return kvs_.at(level - l0_); }
    /// Univariate value/derivative tables at one level: (num_basis x n1d), column = 1D point.
    const Eigen::MatrixXd& values(int level) const { return val_.at(level - l0_); }
    const Eigen::MatrixXd& derivs(int level) const { return der_.at(level - l0_); }
    /// First non-vanishing univariate basis index at each 1D point.
    const std::vector<int>& first_active(int level) const { return first_.at(level - l0_); }
    /// Half-open range of 1D grid points inside the support of basis i at a level.
    std::pair<int, int> support_range(int level, int i) const;

    double sin_value(int r, int k) const { return sin_v_(r - 1, k); }
    double sin_deriv(int r, int k) const { return sin_d_(r - 1, k); }

    /// Packed symmetric w |det J| J^{-1} J^{-T} at a tensor point
    /// (2D: m00,m01,m11; 3D: m00,m01,m02,m11,m12,m22).
    const double* metric(long long pt) const { return metric_.data() + pt * msize_; }
    double weight_det(long long pt) const { return wdet_[pt]; }
    const double* jac_inv(long long pt) const { return jinv_.data() + pt * dim_ * dim_; }  // row-major J^{-1}
    const double* physical(long long pt) const { return phys_.data() + pt * dim_; }

    /// H^1(Omega) seminorm of one unnormalized trial spline (support-restricted).
    double trial_seminorm(int level, const std::array<int, 3>& interior_index) const;
    /// H^1(Omega) seminorms of all mapped sine functions, lexicographic in r.
    Eigen::VectorXd test_seminorms() const;

private:
    GeometryPatch geom_;
    QuadratureSpec quad_;
    int dim_, p_, l0_, L_, R_;
    Regularity reg_;
    Grid1D grid_;
    long long npts_ = 0;
    int msize_ = 0;

    std::vector<KnotVector> kvs_;
    std::vector<Eigen::MatrixXd> val_, der_;
    std::vector<std::vector<int>> first_;
    Eigen::MatrixXd sin_v_, sin_d_;

    std::vector<double> metric_, wdet_, jinv_, phys_;
};

/// Physical gradient of an exact solution sampled on the context grid, plus the
/// wq-scaled pullback used for right-hand sides.
struct ExactOnGrid {
    Eigen::MatrixXd grad;      // dim x npts
    Eigen::MatrixXd pullback;  // dim x npts: wq * J^{-1} grad
    double seminorm_sq = 0.0;
};

ExactOnGrid sample_exact(const AssemblyContext& ctx, const ExactSolution& exact);

/// Row-oriented assembler over a fixed dictionary/test-basis pair. assemble_full
/// and assemble_rows share the row routine, so common rows agree bitwise.
class Assembler {
public:
    Assembler(std::shared_ptr<const AssemblyContext> ctx, std::shared_ptr<const TrialDictionary> dict,
              std::shared_ptr<const TestBasis> tb);

    const AssemblyContext& ctx() const { return *ctx_; }
    const TrialDictionary& dict() const { return *dict_; }
    const TestBasis& test_basis() const { return *tb_; }

    double bilinear_entry(long long j, long long q) const;
    void row(long long q, double* out) const;  // out has n_dict entries
    Eigen::VectorXd row(long long q) const;
    double rhs_entry(const ExactOnGrid& u, long long q) const;
    Eigen::VectorXd rhs_all(const ExactOnGrid& u) const;

    PGSystem assemble_full(const ExactOnGrid& u) const;
    SubsampledSystem assemble_rows(const ExactOnGrid& u, const std::vector<long long>& tau,
                                   const Eigen::VectorXd& pi) const;

    /// Relative H^1 seminorm error of sum_j coeffs_j psi_j against the exact solution.
    double h1_relative_error(const Eigen::VectorXd& coeffs, const ExactOnGrid& u) const;

private:
    std::shared_ptr<const AssemblyContext> ctx_;
    std::shared_ptr<const TrialDictionary> dict_;
    std::shared_ptr<const TestBasis> tb_;
    Eigen::VectorXd inv_gamma_, inv_norm_;
};

// Spec-shaped one-shot entry points (each builds its own context).
double bilinear_entry(const TrialDictionary& dict, const TestBasis& tb, const GeometryPatch& g,
                      const QuadratureSpec& quad, long long j, long long q);
PGSystem assemble_full(const TrialDictionary& dict, const TestBasis& tb, const GeometryPatch& g,
                       const QuadratureSpec& quad, const ExactSolution& exact);
SubsampledSystem assemble_rows(const TrialDictionary& dict, const TestBasis& tb,
                               const GeometryPatch& g, const QuadratureSpec& quad,
                               const ExactSolution& exact, const std::vector<long long>& tau,
                               const Eigen::VectorXd& pi);

}  // namespace cossiga

#include "cossiga/recovery.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "cossiga/testspace.hpp"

namespace cossiga {

const char* to_string(MethodTag tag) {
    switch (tag) {
        case MethodTag::cossiga: return "cossiga";
        case MethodTag::pg_omp: return "pg-omp";
        case MethodTag::pg_bs: return "pg-bs";
        case MethodTag::none: return "none";
    }
    return "?";
}

MethodTag method_from_string(const std::string& s) {
    if (s == "cossiga") return MethodTag::cossiga;
    if (s == "pg-omp" || s == "pg_omp") return MethodTag::pg_omp;
    if (s == "pg-bs" || s == "pg_bs") return MethodTag::pg_bs;
    throw std::invalid_argument("unknown method: " + s);
}

namespace {

// Incremental thin QR over the selected columns: modified Gram-Schmidt with one
// reorthogonalization pass keeps Q orthonormal to machine precision, so the
// recorded residual trace is nonincreasing.
class OmpEngine {
public:
    OmpEngine(const Eigen::MatrixXd& M, const Eigen::VectorXd& y, int s_max, double tol)
        : M_(M), tol_(tol), residual_(y) {
        if (M.rows() != y.size()) throw std::invalid_argument("matrix/vector size mismatch");
        if (M.cols() < 1) throw std::invalid_argument("matrix must have at least one column");
        col_norms_ = M.colwise().norm().transpose();
        selectable_ = (col_norms_.array() > 0.0).cast<double>();
        Q_.resize(M.rows(), s_max);
        R_.setZero(s_max, s_max);
        qty_.resize(s_max);
        if (tol_ < 0.0) tol_ = 1e-12 * y.norm();
    }

    // Returns false when no further progress is possible.
    bool step() {
        const double prev = residual_.norm();
        if (prev <= tol_) return false;

        Eigen::VectorXd corr = M_.transpose() * residual_;
        long long best = -1;
        double best_score = 0.0;
        for (long long j = 0; j < corr.size(); ++j) {
            if (selectable_[j] == 0.0) continue;
            const double score = std::abs(corr[j]) / col_norms_[j];
            if (score > best_score) {
                best_score = score;
                best = j;
            }
        }
        if (best < 0) return false;

        const int k = static_cast<int>(support_.size());
        Eigen::VectorXd v = M_.col(best);
        for (int pass = 0; pass < 2; ++pass) {
            if (k == 0) break;
            const Eigen::VectorXd proj = Q_.leftCols(k).transpose() * v;
            v -= Q_.leftCols(k) * proj;
            R_.col(k).head(k) += proj;
        }
        const double rkk = v.norm();
        if (rkk <= 1e-14 * col_norms_[best]) return false;  // numerically dependent column
        R_(k, k) = rkk;
        Q_.col(k) = v / rkk;
        qty_[k] = Q_.col(k).dot(residual_);
        residual_ -= qty_[k] * Q_.col(k);
        support_.push_back(best);
        selectable_[best] = 0.0;

        const double cur = residual_.norm();
        trace_.push_back(cur);
        if (prev - cur < 1e-14 * prev) return false;  // stagnation
        return true;
    }

    Eigen::VectorXd solution() const {
        const int k = static_cast<int>(support_.size());
        Eigen::VectorXd x = Eigen::VectorXd::Zero(M_.cols());
        if (k > 0) {
            const Eigen::VectorXd z =
                R_.topLeftCorner(k, k).triangularView<Eigen::Upper>().solve(qty_.head(k));
            for (int i = 0; i < k; ++i) x[support_[i]] = z[i];
        }
        return x;
    }

    const std::vector<long long>& support() const { return support_; }
    const std::vector<double>& trace() const { return trace_; }
    double residual_norm() const { return residual_.norm(); }

private:
    const Eigen::MatrixXd& M_;
    double tol_;
    Eigen::VectorXd residual_, col_norms_, selectable_, qty_;
    Eigen::MatrixXd Q_, R_;
    std::vector<long long> support_;
    std::vector<double> trace_;
};

}  // namespace

SparseSolution omp(const Eigen::MatrixXd& M, const Eigen::VectorXd& y, int s, double tol) {
    if (s < 1) throw std::invalid_argument("sparsity must be >= 1");
    SparseSolution sol;
    sol.s = s;
    if (s > M.cols()) {
        s = static_cast<int>(M.cols());
        sol.capped = true;
    }
    OmpEngine engine(M, y, s, tol);
    for (int it = 0; it < s; ++it)
        if (!engine.step()) break;
    sol.coefficients = engine.solution();
    sol.support = engine.support();
    sol.residual_trace = engine.trace();
    sol.residual_norm = engine.residual_norm();
    return sol;
}

std::vector<SparseSolution> omp_path(const Eigen::MatrixXd& M, const Eigen::VectorXd& y,
                                     const std::vector<int>& s_checkpoints, double tol) {
    if (s_checkpoints.empty()) throw std::invalid_argument("no sparsity checkpoints");
    std::vector<int> sorted = s_checkpoints;
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() < 1) throw std::invalid_argument("sparsity must be >= 1");

    std::vector<SparseSolution> out;
    out.reserve(sorted.size());
    const int s_max = std::min<long long>(sorted.back(), M.cols());
    OmpEngine engine(M, y, s_max, tol);
    size_t next = 0;
    bool alive = true;
    for (int it = 1; it <= s_max && next < sorted.size(); ++it) {
        if (alive) alive = engine.step();
        while (next < sorted.size() && (sorted[next] == it || !alive)) {
            SparseSolution sol;
            sol.s = sorted[next];
            sol.capped = sorted[next] > M.cols();
            sol.coefficients = engine.solution();
            sol.support = engine.support();
            sol.residual_trace = engine.trace();
            sol.residual_norm = engine.residual_norm();
            out.push_back(std::move(sol));
            ++next;
        }
        if (!alive) break;
    }
    while (next < sorted.size()) {
        SparseSolution sol;
        sol.s = sorted[next];
        sol.capped = sorted[next] > M.cols();
        sol.coefficients = engine.solution();
        sol.support = engine.support();
        sol.residual_trace = engine.trace();
        sol.residual_norm = engine.residual_norm();
        out.push_back(std::move(sol));
        ++next;
    }
    return out;
}

LeastSquaresResult least_squares(const Eigen::MatrixXd& M, const Eigen::VectorXd& y) {
    if (M.rows() != y.size()) throw std::invalid_argument("matrix/vector size mismatch");
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(M);
    LeastSquaresResult out;
    out.x = cod.solve(y);
    out.residual_norm = (M * out.x - y).norm();
    return out;
}

SparseSolution cossiga_solve(int p, Regularity reg, int L, int s, long long m, int l0,
                             const GeometryPatch& geometry, const ExactSolution& exact,
                             std::uint64_t seed) {
    return cossiga_solve(p, reg, L, s, m, l0, geometry, exact, seed, default_quadrature(p, L));
}

SparseSolution cossiga_solve(int p, Regularity reg, int L, int s, long long m, int l0,
                             const GeometryPatch& geometry, const ExactSolution& exact,
                             std::uint64_t seed, const QuadratureSpec& quad) {
    if (m < 1) throw std::invalid_argument("m must be >= 1");
    const int R = choose_R(p, reg, L);
    auto ctx = std::make_shared<const AssemblyContext>(geometry, quad, p, reg, l0, L, R);
    auto dict = std::make_shared<const TrialDictionary>(build_dictionary(*ctx));
    auto tb = std::make_shared<const TestBasis>(build_test_basis(*ctx));

    const SamplingDensity density = sampling_distribution(R, L, geometry.dim);
    const std::vector<long long> tau = draw_test_indices(density, m, seed);

    Assembler assembler(ctx, dict, tb);
    const SubsampledSystem sub =
        assembler.assemble_rows(sample_exact(*ctx, exact), tau, density.pi);

    const Eigen::MatrixXd EA = sub.E_diag.asDiagonal() * sub.A;
    const Eigen::VectorXd Eb = sub.E_diag.cwiseProduct(sub.b);
    SparseSolution sol = omp(EA, Eb, s);
    sol.metadata.m = m;
    sol.metadata.seed = seed;
    sol.metadata.method = MethodTag::cossiga;
    return sol;
}

void write_solution_csv(const TrialDictionary& dict, const Eigen::VectorXd& coefficients,
                        const std::string& path) {
    if (coefficients.size() != dict.n_dict())
        throw std::invalid_argument("coefficient vector has wrong length");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "j,level";
    for (int k = 0; k < dict.dim; ++k) out << ",i" << (k + 1);
    out << ",coefficient\n";
    char buf[64];
    for (long long j = 0; j < dict.n_dict(); ++j) {
        const DictAtom& a = dict.atoms[j];
        out << (j + 1) << "," << a.level;
        for (int k = 0; k < dict.dim; ++k) out << "," << (a.index[k] + 1);
        std::snprintf(buf, sizeof(buf), "%.17g", coefficients[j]);
        out << "," << buf << "\n";
    }
}

}  // namespace cossiga

#include "cossiga/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cossiga {

Eigen::VectorXd scaling_matrix(const Eigen::VectorXd& pi, const std::vector<long long>& tau) {
    const long long m = static_cast<long long>(tau.size());
    if (m < 1) throw std::invalid_argument("tau must be nonempty");
    Eigen::VectorXd e(m);
    for (long long i = 0; i < m; ++i) {
        const long long q = tau[i];
        if (q < 0 || q >= pi.size()) throw std::out_of_range("test index out of range");
        if (pi[q] <= 0.0)
            throw std::invalid_argument("drawn index has zero sampling probability");
        e[i] = 1.0 / std::sqrt(static_cast<double>(m) * pi[q]);
    }
    return e;
}

AssemblyContext::AssemblyContext(GeometryPatch geometry, QuadratureSpec quad, int p,
                                 Regularity reg, int l0, int L, int R)
    : geom_(std::move(geometry)), quad_(quad), dim_(geom_.dim), p_(p), l0_(l0), L_(L), R_(R),
      reg_(reg) {
    if (p_ >= 1) {
        if (l0_ < 1 || L_ < l0_) throw std::invalid_argument("levels must satisfy 1 <= l0 <= L");
        if (quad_.mesh_level < L_)
            throw std::invalid_argument("quadrature mesh must resolve the finest level");
    }
    grid_ = make_grid_1d(quad_);
    const int n = grid_.size();
    npts_ = 1;
    for (int k = 0; k < dim_; ++k) npts_ *= n;
    msize_ = dim_ * (dim_ + 1) / 2;

    if (p_ >= 1) {
        for (int l = l0_; l <= L_; ++l) {
            KnotVector kv = make_open_uniform_knots(l, p_, reg_);
            const int nb = kv.num_basis();
            Eigen::MatrixXd v = Eigen::MatrixXd::Zero(nb, n);
            Eigen::MatrixXd d = Eigen::MatrixXd::Zero(nb, n);
            std::vector<int> first(n);
            for (int k = 0; k < n; ++k) {
                const BasisEval be = eval_basis(kv, grid_.nodes[k]);
                first[k] = be.first_index;
                for (int t = 0; t <= p_; ++t) {
                    v(be.first_index + t, k) = be.values[t];
                    d(be.first_index + t, k) = be.derivatives[t];
                }
            }
            kvs_.push_back(std::move(kv));
            val_.push_back(std::move(v));
            der_.push_back(std::move(d));
            first_.push_back(std::move(first));
        }
    }

    if (R_ >= 1) {
        const double pi_c = 3.14159265358979323846;
        sin_v_.resize(R_, n);
        sin_d_.resize(R_, n);
        for (int r = 1; r <= R_; ++r)
            for (int k = 0; k < n; ++k) {
                sin_v_(r - 1, k) = std::sin(r * pi_c * grid_.nodes[k]);
                sin_d_(r - 1, k) = r * pi_c * std::cos(r * pi_c * grid_.nodes[k]);
            }
    }

    metric_.resize(npts_ * msize_);
    wdet_.resize(npts_);
    jinv_.resize(npts_ * dim_ * dim_);
    phys_.resize(npts_ * dim_);

    Eigen::VectorXd xi(dim_);
    std::vector<int> idx(dim_, 0);
    for (long long pt = 0; pt < npts_; ++pt) {
        double w = 1.0;
        for (int k = 0; k < dim_; ++k) {
            xi[k] = grid_.nodes[idx[k]];
            w *= grid_.weights[idx[k]];
        }
        const Eigen::MatrixXd J = jacobian(geom_, xi);
        const double det = J.determinant();
        if (det <= 0.0)
            throw geometry_error("nonpositive Jacobian determinant at a quadrature point");
        const Eigen::MatrixXd Jinv = J.inverse();
        const Eigen::MatrixXd M = (w * det) * (Jinv * Jinv.transpose());
        const Eigen::VectorXd x = map_point(geom_, xi);

        wdet_[pt] = w * det;
        double* mp = metric_.data() + pt * msize_;
        int c = 0;
        for (int a = 0; a < dim_; ++a)
            for (int b = a; b < dim_; ++b) mp[c++] = M(a, b);
        double* jp = jinv_.data() + pt * dim_ * dim_;
        for (int a = 0; a < dim_; ++a)
            for (int b = 0; b < dim_; ++b) jp[a * dim_ + b] = Jinv(a, b);
        for (int k = 0; k < dim_; ++k) phys_[pt * dim_ + k] = x[k];

        int k = dim_ - 1;
        while (k >= 0 && ++idx[k] == grid_.size()) idx[k--] = 0;
        (void)k;
    }
}

long long AssemblyContext::flatten(const int* k) const {
    long long f = k[0];
    for (int j = 1; j < dim_; ++j) f = f * grid_.size() + k[j];
    return f;
}

std::pair<int, int> AssemblyContext::support_range(int level, int i) const {
    const KnotVector& kv = level_knots(level);
    const double lo = kv.knots[i];
    const double hi = kv.knots[i + p_ + 1];
    const auto& x = grid_.nodes;
    const int a = static_cast<int>(std::lower_bound(x.begin(), x.end(), lo) - x.begin());
    const int b = static_cast<int>(std::lower_bound(x.begin(), x.end(), hi) - x.begin());
    return {a, b};
}

double AssemblyContext::trial_seminorm(int level, const std::array<int, 3>& interior_index) const {
    const Eigen::MatrixXd& V = values(level);
    const Eigen::MatrixXd& D = derivs(level);
    const int n = grid_.size();
    double acc = 0.0;
    if (dim_ == 2) {
        const int f0 = interior_index[0] + 1, f1 = interior_index[1] + 1;
        const auto [a0, b0] = support_range(level, f0);
        const auto [a1, b1] = support_range(level, f1);
        for (int k0 = a0; k0 < b0; ++k0) {
            const double v0 = V(f0, k0), d0 = D(f0, k0);
            for (int k1 = a1; k1 < b1; ++k1) {
                const long long pt = static_cast<long long>(k0) * n + k1;
                const double* m = metric(pt);
                const double g0 = d0 * V(f1, k1);
                const double g1 = v0 * D(f1, k1);
                acc += m[0] * g0 * g0 + 2.0 * m[1] * g0 * g1 + m[2] * g1 * g1;
            }
        }
    } else {
        const int f0 = interior_index[0] + 1, f1 = interior_index[1] + 1, f2 = interior_index[2] + 1;
        const auto [a0, b0] = support_range(level, f0);
        const auto [a1, b1] = support_range(level, f1);
        const auto [a2, b2] = support_range(level, f2);
        for (int k0 = a0; k0 < b0; ++k0) {
            const double v0 = V(f0, k0), d0 = D(f0, k0);
            for (int k1 = a1; k1 < b1; ++k1) {
                const double v1 = V(f1, k1), d1 = D(f1, k1);
                const long long base = (static_cast<long long>(k0) * n + k1) * n;
                for (int k2 = a2; k2 < b2; ++k2) {
                    const double* m = metric(base + k2);
                    const double g0 = d0 * v1 * V(f2, k2);
                    const double g1 = v0 * d1 * V(f2, k2);
                    const double g2 = v0 * v1 * D(f2, k2);
                    acc += m[0] * g0 * g0 + m[3] * g1 * g1 + m[5] * g2 * g2 +
                           2.0 * (m[1] * g0 * g1 + m[2] * g0 * g2 + m[4] * g1 * g2);
                }
            }
        }
    }
    return std::sqrt(acc);
}

Eigen::VectorXd AssemblyContext::test_seminorms() const {
    const int n = grid_.size();
    long long n_test = 1;
    for (int k = 0; k < dim_; ++k) n_test *= R_;
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(n_test);
    if (dim_ == 2) {
        for (int k0 = 0; k0 < n; ++k0)
            for (int k1 = 0; k1 < n; ++k1) {
                const double* m = metric(static_cast<long long>(k0) * n + k1);
                for (int r0 = 1; r0 <= R_; ++r0) {
                    const double s0 = sin_v_(r0 - 1, k0), c0 = sin_d_(r0 - 1, k0);
                    double* out = acc.data() + static_cast<long long>(r0 - 1) * R_;
                    for (int r1 = 1; r1 <= R_; ++r1) {
                        const double g0 = c0 * sin_v_(r1 - 1, k1);
                        const double g1 = s0 * sin_d_(r1 - 1, k1);
                        out[r1 - 1] += m[0] * g0 * g0 + 2.0 * m[1] * g0 * g1 + m[2] * g1 * g1;
                    }
                }
            }
    } else {
        for (int k0 = 0; k0 < n; ++k0)
            for (int k1 = 0; k1 < n; ++k1)
                for (int k2 = 0; k2 < n; ++k2) {
                    const double* m = metric((static_cast<long long>(k0) * n + k1) * n + k2);
                    for (int r0 = 1; r0 <= R_; ++r0)
                        for (int r1 = 1; r1 <= R_; ++r1) {
                            const double a = sin_v_(r0 - 1, k0) * sin_v_(r1 - 1, k1);
                            const double b = sin_d_(r0 - 1, k0) * sin_v_(r1 - 1, k1);
                            const double c = sin_v_(r0 - 1, k0) * sin_d_(r1 - 1, k1);
                            double* out =
                                acc.data() + (static_cast<long long>(r0 - 1) * R_ + r1 - 1) * R_;
                            for (int r2 = 1; r2 <= R_; ++r2) {
                                const double g0 = b * sin_v_(r2 - 1, k2);
                                const double g1 = c * sin_v_(r2 - 1, k2);
                                const double g2 = a * sin_d_(r2 - 1, k2);
                                out[r2 - 1] += m[0] * g0 * g0 + m[3] * g1 * g1 + m[5] * g2 * g2 +
                                               2.0 * (m[1] * g0 * g1 + m[2] * g0 * g2 +
                                                      m[4] * g1 * g2);
                            }
                        }
                }
    }
    return acc.cwiseSqrt();
}

ExactOnGrid sample_exact(const AssemblyContext& ctx, const ExactSolution& exact) {
    if (exact.dim != ctx.dim()) throw std::invalid_argument("exact solution has wrong dimension");
    const int d = ctx.dim();
    const long long npts = ctx.num_points();
    ExactOnGrid out;
    out.grad.resize(d, npts);
    out.pullback.resize(d, npts);
    double g[3], v[3];
    for (long long pt = 0; pt < npts; ++pt) {
        exact.gradient(ctx.physical(pt), g);
        const double* jinv = ctx.jac_inv(pt);
        const double wq = ctx.weight_det(pt);
        double norm2 = 0.0;
        for (int a = 0; a < d; ++a) {
            out.grad(a, pt) = g[a];
            norm2 += g[a] * g[a];
            v[a] = 0.0;
            for (int b = 0; b < d; ++b) v[a] += jinv[a * d + b] * g[b];
            out.pullback(a, pt) = wq * v[a];
        }
        out.seminorm_sq += wq * norm2;
    }
    return out;
}

namespace {

std::shared_ptr<const AssemblyContext> make_ctx(const TrialDictionary& dict, const TestBasis& tb,
                                                const GeometryPatch& g, const QuadratureSpec& quad) {
    return std::make_shared<const AssemblyContext>(g, quad, dict.p, dict.regularity, dict.l0,
                                                   dict.L, tb.R);
}

template <typename T>
std::shared_ptr<const T> borrow(const T& ref) {
    return std::shared_ptr<const T>(&ref, [](const T*) {});
}

}  // namespace

Assembler::Assembler(std::shared_ptr<const AssemblyContext> ctx,
                     std::shared_ptr<const TrialDictionary> dict,
                     std::shared_ptr<const TestBasis> tb)
    : ctx_(std::move(ctx)), dict_(std::move(dict)), tb_(std::move(tb)) {
    const long long nd = dict_->n_dict();
    inv_gamma_.resize(nd);
    for (long long j = 0; j < nd; ++j) inv_gamma_[j] = 1.0 / dict_->atoms[j].gamma;
    inv_norm_ = tb_->norms.cwiseInverse();
}

double Assembler::bilinear_entry(long long j, long long q) const {
    if (j < 0 || j >= dict_->n_dict()) throw std::out_of_range("atom index out of range");
    if (q < 0 || q >= tb_->n_test()) throw std::out_of_range("test index out of range");
    const AssemblyContext& c = *ctx_;
    const DictAtom& atom = dict_->atoms[j];
    const int l = atom.level;
    const Eigen::MatrixXd& V = c.values(l);
    const Eigen::MatrixXd& D = c.derivs(l);
    const std::vector<int> r = tb_->freq_of(q);
    const int n = c.n1d();
    double acc = 0.0;
    if (c.dim() == 2) {
        const int f0 = atom.index[0] + 1, f1 = atom.index[1] + 1;
        const auto [a0, b0] = c.support_range(l, f0);
        const auto [a1, b1] = c.support_range(l, f1);
        for (int k0 = a0; k0 < b0; ++k0) {
            const double v0 = V(f0, k0), d0 = D(f0, k0);
            const double s0 = c.sin_value(r[0], k0), e0 = c.sin_deriv(r[0], k0);
            for (int k1 = a1; k1 < b1; ++k1) {
                const double* m = c.metric(static_cast<long long>(k0) * n + k1);
                const double tg0 = d0 * V(f1, k1), tg1 = v0 * D(f1, k1);
                const double pg0 = e0 * c.sin_value(r[1], k1), pg1 = s0 * c.sin_deriv(r[1], k1);
                acc += tg0 * (m[0] * pg0 + m[1] * pg1) + tg1 * (m[1] * pg0 + m[2] * pg1);
            }
        }
    } else {
        const int f0 = atom.index[0] + 1, f1 = atom.index[1] + 1, f2 = atom.index[2] + 1;
        const auto [a0, b0] = c.support_range(l, f0);
        const auto [a1, b1] = c.support_range(l, f1);
        const auto [a2, b2] = c.support_range(l, f2);
        for (int k0 = a0; k0 < b0; ++k0) {
            const double v0 = V(f0, k0), d0 = D(f0, k0);
            const double s0 = c.sin_value(r[0], k0), e0 = c.sin_deriv(r[0], k0);
            for (int k1 = a1; k1 < b1; ++k1) {
                const double v1 = V(f1, k1), d1 = D(f1, k1);
                const double s1 = c.sin_value(r[1], k1), e1 = c.sin_deriv(r[1], k1);
                const long long base = (static_cast<long long>(k0) * n + k1) * n;
                for (int k2 = a2; k2 < b2; ++k2) {
                    const double* m = c.metric(base + k2);
                    const double v2 = V(f2, k2), d2 = D(f2, k2);
                    const double s2 = c.sin_value(r[2], k2), e2 = c.sin_deriv(r[2], k2);
                    const double tg0 = d0 * v1 * v2, tg1 = v0 * d1 * v2, tg2 = v0 * v1 * d2;
                    const double pg0 = e0 * s1 * s2, pg1 = s0 * e1 * s2, pg2 = s0 * s1 * e2;
                    acc += tg0 * (m[0] * pg0 + m[1] * pg1 + m[2] * pg2) +
                           tg1 * (m[1] * pg0 + m[3] * pg1 + m[4] * pg2) +
                           tg2 * (m[2] * pg0 + m[4] * pg1 + m[5] * pg2);
                }
            }
        }
    }
    return acc * inv_gamma_[j] * inv_norm_[q];
}

void Assembler::row(long long q, double* out) const {
    const AssemblyContext& c = *ctx_;
    const TrialDictionary& dict = *dict_;
    const long long nd = dict.n_dict();
    std::fill(out, out + nd, 0.0);
    const std::vector<int> r = tb_->freq_of(q);
    const int n = c.n1d();
    const int p = c.degree();
    const int nlev = dict.L - dict.l0 + 1;

    if (c.dim() == 2) {
        for (int k0 = 0; k0 < n; ++k0) {
            for (int k1 = 0; k1 < n; ++k1) {
                const long long pt = static_cast<long long>(k0) * n + k1;
                const double* m = c.metric(pt);
                const double pg0 = c.sin_deriv(r[0], k0) * c.sin_value(r[1], k1);
                const double pg1 = c.sin_value(r[0], k0) * c.sin_deriv(r[1], k1);
                const double u0 = m[0] * pg0 + m[1] * pg1;
                const double u1 = m[1] * pg0 + m[2] * pg1;
                for (int lev = 0; lev < nlev; ++lev) {
                    const int l = dict.l0 + lev;
                    const Eigen::MatrixXd& V = c.values(l);
                    const Eigen::MatrixXd& D = c.derivs(l);
                    const int nb = static_cast<int>(V.rows());
                    const int nint = nb - 2;
                    const int f0 = c.first_active(l)[k0];
                    const int f1 = c.first_active(l)[k1];
                    const long long base = dict.level_offsets[lev];
                    for (int t0 = 0; t0 <= p; ++t0) {
                        const int i0 = f0 + t0;
                        if (i0 < 1 || i0 > nb - 2) continue;
                        const double a = D(i0, k0) * u0;
                        const double b = V(i0, k0) * u1;
                        double* dest = out + base + static_cast<long long>(i0 - 1) * nint - 1;
                        for (int t1 = 0; t1 <= p; ++t1) {
                            const int i1 = f1 + t1;
                            if (i1 < 1 || i1 > nb - 2) continue;
                            dest[i1] += a * V(i1, k1) + b * D(i1, k1);
                        }
                    }
                }
            }
        }
    } else {
        for (int k0 = 0; k0 < n; ++k0)
            for (int k1 = 0; k1 < n; ++k1)
                for (int k2 = 0; k2 < n; ++k2) {
                    const long long pt = (static_cast<long long>(k0) * n + k1) * n + k2;
                    const double* m = c.metric(pt);
                    const double s0 = c.sin_value(r[0], k0), e0 = c.sin_deriv(r[0], k0);
                    const double s1 = c.sin_value(r[1], k1), e1 = c.sin_deriv(r[1], k1);
                    const double s2 = c.sin_value(r[2], k2), e2 = c.sin_deriv(r[2], k2);
                    const double pg0 = e0 * s1 * s2, pg1 = s0 * e1 * s2, pg2 = s0 * s1 * e2;
                    const double u0 = m[0] * pg0 + m[1] * pg1 + m[2] * pg2;
                    const double u1 = m[1] * pg0 + m[3] * pg1 + m[4] * pg2;
                    const double u2 = m[2] * pg0 + m[4] * pg1 + m[5] * pg2;
                    for (int lev = 0; lev < nlev; ++lev) {
                        const int l = dict.l0 + lev;
                        const Eigen::MatrixXd& V = c.values(l);
                        const Eigen::MatrixXd& D = c.derivs(l);
                        const int nb = static_cast<int>(V.rows());
                        const int nint = nb - 2;
                        const int f0 = c.first_active(l)[k0];
                        const int f1 = c.first_active(l)[k1];
                        const int f2 = c.first_active(l)[k2];
                        const long long base = dict.level_offsets[lev];
                        for (int t0 = 0; t0 <= p; ++t0) {
                            const int i0 = f0 + t0;
                            if (i0 < 1 || i0 > nb - 2) continue;
                            const double v0 = V(i0, k0), d0 = D(i0, k0);
                            for (int t1 = 0; t1 <= p; ++t1) {
                                const int i1 = f1 + t1;
                                if (i1 < 1 || i1 > nb - 2) continue;
                                const double a = d0 * V(i1, k1) * u0 + v0 * D(i1, k1) * u1;
                                const double b = v0 * V(i1, k1);
                                double* dest =
                                    out + base +
                                    ((static_cast<long long>(i0 - 1) * nint) + (i1 - 1)) * nint - 1;
                                for (int t2 = 0; t2 <= p; ++t2) {
                                    const int i2 = f2 + t2;
                                    if (i2 < 1 || i2 > nb - 2) continue;
                                    dest[i2] += a * V(i2, k2) + b * D(i2, k2) * u2;
                                }
                            }
                        }
                    }
                }
    }
    const double invn = inv_norm_[q];
    for (long long j = 0; j < nd; ++j) out[j] *= inv_gamma_[j] * invn;
}

Eigen::VectorXd Assembler::row(long long q) const {
    Eigen::VectorXd out(dict_->n_dict());
    row(q, out.data());
    return out;
}

double Assembler::rhs_entry(const ExactOnGrid& u, long long q) const {
    const AssemblyContext& c = *ctx_;
    const std::vector<int> r = tb_->freq_of(q);
    const int n = c.n1d();
    double acc = 0.0;
    if (c.dim() == 2) {
        for (int k0 = 0; k0 < n; ++k0) {
            const double s0 = c.sin_value(r[0], k0), e0 = c.sin_deriv(r[0], k0);
            for (int k1 = 0; k1 < n; ++k1) {
                const long long pt = static_cast<long long>(k0) * n + k1;
                acc += u.pullback(0, pt) * e0 * c.sin_value(r[1], k1) +
                       u.pullback(1, pt) * s0 * c.sin_deriv(r[1], k1);
            }
        }
    } else {
        for (int k0 = 0; k0 < n; ++k0)
            for (int k1 = 0; k1 < n; ++k1)
                for (int k2 = 0; k2 < n; ++k2) {
                    const long long pt = (static_cast<long long>(k0) * n + k1) * n + k2;
                    const double s0 = c.sin_value(r[0], k0), e0 = c.sin_deriv(r[0], k0);
                    const double s1 = c.sin_value(r[1], k1), e1 = c.sin_deriv(r[1], k1);
                    const double s2 = c.sin_value(r[2], k2), e2 = c.sin_deriv(r[2], k2);
                    acc += u.pullback(0, pt) * e0 * s1 * s2 + u.pullback(1, pt) * s0 * e1 * s2 +
                           u.pullback(2, pt) * s0 * s1 * e2;
                }
    }
    return acc * inv_norm_[q];
}

Eigen::VectorXd Assembler::rhs_all(const ExactOnGrid& u) const {
    const AssemblyContext& c = *ctx_;
    const int R = tb_->R;
    const int n = c.n1d();
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(tb_->n_test());
    if (c.dim() == 2) {
        for (int k0 = 0; k0 < n; ++k0)
            for (int k1 = 0; k1 < n; ++k1) {
                const long long pt = static_cast<long long>(k0) * n + k1;
                const double v0 = u.pullback(0, pt), v1 = u.pullback(1, pt);
                for (int r0 = 1; r0 <= R; ++r0) {
                    const double a = v0 * c.sin_deriv(r0, k0);
                    const double b = v1 * c.sin_value(r0, k0);
                    double* out = acc.data() + static_cast<long long>(r0 - 1) * R;
                    for (int r1 = 1; r1 <= R; ++r1)
                        out[r1 - 1] += a * c.sin_value(r1, k1) + b * c.sin_deriv(r1, k1);
                }
            }
    } else {
        for (int k0 = 0; k0 < n; ++k0)
            for (int k1 = 0; k1 < n; ++k1)
                for (int k2 = 0; k2 < n; ++k2) {
                    const long long pt = (static_cast<long long>(k0) * n + k1) * n + k2;
                    const double v0 = u.pullback(0, pt), v1 = u.pullback(1, pt),
                                 v2 = u.pullback(2, pt);
                    for (int r0 = 1; r0 <= R; ++r0)
                        for (int r1 = 1; r1 <= R; ++r1) {
                            const double a = v0 * c.sin_deriv(r0, k0) * c.sin_value(r1, k1) +
                                             v1 * c.sin_value(r0, k0) * c.sin_deriv(r1, k1);
                            const double b = v2 * c.sin_value(r0, k0) * c.sin_value(r1, k1);
                            double* out =
                                acc.data() + (static_cast<long long>(r0 - 1) * R + r1 - 1) * R;
                            for (int r2 = 1; r2 <= R; ++r2)
                                out[r2 - 1] +=
                                    a * c.sin_value(r2, k2) + b * c.sin_deriv(r2, k2);
                        }
                }
    }
    return acc.cwiseProduct(inv_norm_);
}

PGSystem Assembler::assemble_full(const ExactOnGrid& u) const {
    const long long n_test = tb_->n_test();
    PGSystem sys;
    sys.B.resize(n_test, dict_->n_dict());
    Eigen::VectorXd buf(dict_->n_dict());
    for (long long q = 0; q < n_test; ++q) {
        row(q, buf.data());
        sys.B.row(q) = buf.transpose();
    }
    sys.c = rhs_all(u);
    return sys;
}

SubsampledSystem Assembler::assemble_rows(const ExactOnGrid& u, const std::vector<long long>& tau,
                                          const Eigen::VectorXd& pi) const {
    const long long m = static_cast<long long>(tau.size());
    if (m < 1) throw std::invalid_argument("tau must be nonempty");
    if (pi.size() != tb_->n_test())
        throw std::invalid_argument("sampling density has wrong length");
    SubsampledSystem sub;
    sub.tau = tau;
    sub.pi = pi;
    sub.A.resize(m, dict_->n_dict());
    sub.b.resize(m);
    Eigen::VectorXd buf(dict_->n_dict());
    for (long long i = 0; i < m; ++i) {
        const long long q = tau[i];
        if (q < 0 || q >= tb_->n_test()) throw std::out_of_range("test index out of range");
        row(q, buf.data());
        sub.A.row(i) = buf.transpose();
        sub.b[i] = rhs_entry(u, q);
    }
    sub.E_diag = scaling_matrix(pi, tau);
    return sub;
}

double Assembler::h1_relative_error(const Eigen::VectorXd& coeffs, const ExactOnGrid& u) const {
    if (coeffs.size() != dict_->n_dict())
        throw std::invalid_argument("coefficient vector has wrong length");
    if (!(u.seminorm_sq > 0.0))
        throw std::invalid_argument("exact solution has zero H1 seminorm");
    const AssemblyContext& c = *ctx_;
    const int d = c.dim();
    const int n = c.n1d();
    Eigen::MatrixXd gt = Eigen::MatrixXd::Zero(d, c.num_points());

    for (long long j = 0; j < coeffs.size(); ++j) {
        if (coeffs[j] == 0.0) continue;
        const DictAtom& atom = dict_->atoms[j];
        const int l = atom.level;
        const Eigen::MatrixXd& V = c.values(l);
        const Eigen::MatrixXd& D = c.derivs(l);
        const double scale = coeffs[j] * inv_gamma_[j];
        if (d == 2) {
            const int f0 = atom.index[0] + 1, f1 = atom.index[1] + 1;
            const auto [a0, b0] = c.support_range(l, f0);
            const auto [a1, b1] = c.support_range(l, f1);
            for (int k0 = a0; k0 < b0; ++k0) {
                const double v0 = scale * V(f0, k0), d0 = scale * D(f0, k0);
                for (int k1 = a1; k1 < b1; ++k1) {
                    const long long pt = static_cast<long long>(k0) * n + k1;
                    gt(0, pt) += d0 * V(f1, k1);
                    gt(1, pt) += v0 * D(f1, k1);
                }
            }
        } else {
            const int f0 = atom.index[0] + 1, f1 = atom.index[1] + 1, f2 = atom.index[2] + 1;
            const auto [a0, b0] = c.support_range(l, f0);
            const auto [a1, b1] = c.support_range(l, f1);
            const auto [a2, b2] = c.support_range(l, f2);
            for (int k0 = a0; k0 < b0; ++k0)
                for (int k1 = a1; k1 < b1; ++k1) {
                    const double v01 = V(f0, k0) * V(f1, k1);
                    const double d0v1 = D(f0, k0) * V(f1, k1);
                    const double v0d1 = V(f0, k0) * D(f1, k1);
                    const long long base = (static_cast<long long>(k0) * n + k1) * n;
                    for (int k2 = a2; k2 < b2; ++k2) {
                        gt(0, base + k2) += scale * d0v1 * V(f2, k2);
                        gt(1, base + k2) += scale * v0d1 * V(f2, k2);
                        gt(2, base + k2) += scale * v01 * D(f2, k2);
                    }
                }
        }
    }

    double err2 = 0.0;
    for (long long pt = 0; pt < c.num_points(); ++pt) {
        const double* jinv = c.jac_inv(pt);
        double e2 = 0.0;
        for (int a = 0; a < d; ++a) {
            double ga = 0.0;  // (J^{-T} gt)_a = sum_b Jinv(b,a) gt_b
            for (int b = 0; b < d; ++b) ga += jinv[b * d + a] * gt(b, pt);
            const double e = u.grad(a, pt) - ga;
            e2 += e * e;
        }
        err2 += c.weight_det(pt) * e2;
    }
    return std::sqrt(err2 / u.seminorm_sq);
}

double bilinear_entry(const TrialDictionary& dict, const TestBasis& tb, const GeometryPatch& g,
                      const QuadratureSpec& quad, long long j, long long q) {
    Assembler as(make_ctx(dict, tb, g, quad), borrow(dict), borrow(tb));
    return as.bilinear_entry(j, q);
}

PGSystem assemble_full(const TrialDictionary& dict, const TestBasis& tb, const GeometryPatch& g,
                       const QuadratureSpec& quad, const ExactSolution& exact) {
    Assembler as(make_ctx(dict, tb, g, quad), borrow(dict), borrow(tb));
    return as.assemble_full(sample_exact(as.ctx(), exact));
}

SubsampledSystem assemble_rows(const TrialDictionary& dict, const TestBasis& tb,
                               const GeometryPatch& g, const QuadratureSpec& quad,
                               const ExactSolution& exact, const std::vector<long long>& tau,
                               const Eigen::VectorXd& pi) {
    Assembler as(make_ctx(dict, tb, g, quad), borrow(dict), borrow(tb));
    return as.assemble_rows(sample_exact(as.ctx(), exact), tau, pi);
}

}  // namespace cossiga

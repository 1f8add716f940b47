#include "cossiga/geometry.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "cossiga/quadrature.hpp"
#include <json.hpp>

namespace cossiga {

namespace {

void check_xi(const GeometryPatch& g, const Eigen::VectorXd& xi) {
    if (xi.size() != g.dim) throw std::domain_error("parametric point has wrong dimension");
    for (int k = 0; k < g.dim; ++k)
        if (xi[k] < 0.0 || xi[k] > 1.0) throw std::domain_error("parametric point outside [0,1]^d");
}

// Accumulates the homogeneous sums N = sum w_i B_i P_i, W = sum w_i B_i and,
// when with_derivatives, their per-direction parametric derivatives.
struct HomogeneousEval {
    Eigen::VectorXd N;
    double W = 0.0;
    Eigen::MatrixXd dN;  // dim x dim, column k = dN/dxi_k
    Eigen::VectorXd dW;
};

HomogeneousEval eval_homogeneous(const GeometryPatch& g, const Eigen::VectorXd& xi, bool with_derivatives) {
    const int d = g.dim;
    std::vector<BasisEval> be(d);
    for (int k = 0; k < d; ++k) be[k] = eval_basis(g.knot_vectors[k], xi[k]);

    HomogeneousEval out;
    out.N = Eigen::VectorXd::Zero(d);
    if (with_derivatives) {
        out.dN = Eigen::MatrixXd::Zero(d, d);
        out.dW = Eigen::VectorXd::Zero(d);
    }

    std::vector<int> strides(d, 1);
    for (int k = d - 2; k >= 0; --k) strides[k] = strides[k + 1] * g.basis_count(k + 1);

    std::vector<int> t(d, 0);
    while (true) {
        int flat = 0;
        double val = 1.0;
        for (int k = 0; k < d; ++k) {
            flat += (be[k].first_index + t[k]) * strides[k];
            val *= be[k].values[t[k]];
        }
        const double wb = g.weights[flat] * val;
        out.W += wb;
        out.N += wb * g.control_points.row(flat).transpose();
        if (with_derivatives) {
            for (int k = 0; k < d; ++k) {
                double dval = 1.0;
                for (int j = 0; j < d; ++j)
                    dval *= (j == k) ? be[j].derivatives[t[j]] : be[j].values[t[j]];
                const double dwb = g.weights[flat] * dval;
                out.dW[k] += dwb;
                out.dN.col(k) += dwb * g.control_points.row(flat).transpose();
            }
        }
        int k = d - 1;
        while (k >= 0 && ++t[k] > g.degrees[k]) t[k--] = 0;
        if (k < 0) break;
    }
    return out;
}

GeometryPatch make_identity(int dim) {
    GeometryPatch g;
    g.dim = dim;
    g.degrees.assign(dim, 1);
    for (int k = 0; k < dim; ++k)
        g.knot_vectors.push_back(KnotVector::from_knots(1, {0.0, 0.0, 1.0, 1.0}));
    const int n = 1 << dim;
    g.control_points.resize(n, dim);
    g.weights = Eigen::VectorXd::Ones(n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < dim; ++k)
            g.control_points(i, k) = (i >> (dim - 1 - k)) & 1;  // last index fastest
    return g;
}

// Degree-(1,2) rational patch: xi_1 radial from r=1 to r=2, xi_2 sweeping the
// quarter arc counterclockwise from the positive x1-axis.
GeometryPatch make_quarter_annulus() {
    GeometryPatch g;
    g.dim = 2;
    g.degrees = {1, 2};
    g.knot_vectors.push_back(KnotVector::from_knots(1, {0.0, 0.0, 1.0, 1.0}));
    g.knot_vectors.push_back(KnotVector::from_knots(2, {0.0, 0.0, 0.0, 1.0, 1.0, 1.0}));
    const double arc[3][2] = {{1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}};
    const double warc[3] = {1.0, std::sqrt(2.0) / 2.0, 1.0};
    const double radius[2] = {1.0, 2.0};
    g.control_points.resize(6, 2);
    g.weights.resize(6);
    for (int i1 = 0; i1 < 2; ++i1)
        for (int i2 = 0; i2 < 3; ++i2) {
            const int flat = i1 * 3 + i2;
            g.control_points(flat, 0) = radius[i1] * arc[i2][0];
            g.control_points(flat, 1) = radius[i1] * arc[i2][1];
            g.weights[flat] = warc[i2];
        }
    return g;
}

GeometryPatch make_thick_ring() {
    GeometryPatch ring = make_quarter_annulus();
    GeometryPatch g;
    g.dim = 3;
    g.degrees = {1, 2, 1};
    g.knot_vectors = {ring.knot_vectors[0], ring.knot_vectors[1],
                      KnotVector::from_knots(1, {0.0, 0.0, 1.0, 1.0})};
    g.control_points.resize(12, 3);
    g.weights.resize(12);
    for (int i1 = 0; i1 < 2; ++i1)
        for (int i2 = 0; i2 < 3; ++i2)
            for (int i3 = 0; i3 < 2; ++i3) {
                const int flat = (i1 * 3 + i2) * 2 + i3;
                const int ring_flat = i1 * 3 + i2;
                g.control_points(flat, 0) = ring.control_points(ring_flat, 0);
                g.control_points(flat, 1) = ring.control_points(ring_flat, 1);
                g.control_points(flat, 2) = i3;
                g.weights[flat] = ring.weights[ring_flat];
            }
    return g;
}

}  // namespace

BuiltinDomain builtin_domain_from_string(const std::string& name) {
    if (name == "unit_square") return BuiltinDomain::unit_square;
    if (name == "unit_cube") return BuiltinDomain::unit_cube;
    if (name == "quarter_annulus") return BuiltinDomain::quarter_annulus;
    if (name == "thick_ring") return BuiltinDomain::thick_ring;
    throw std::invalid_argument("unknown builtin domain: " + name);
}

const char* to_string(BuiltinDomain name) {
    switch (name) {
        case BuiltinDomain::unit_square: return "unit_square";
        case BuiltinDomain::unit_cube: return "unit_cube";
        case BuiltinDomain::quarter_annulus: return "quarter_annulus";
        case BuiltinDomain::thick_ring: return "thick_ring";
    }
    return "?";
}

GeometryPatch builtin_domain(BuiltinDomain name) {
    switch (name) {
        case BuiltinDomain::unit_square: return make_identity(2);
        case BuiltinDomain::unit_cube: return make_identity(3);
        case BuiltinDomain::quarter_annulus: return make_quarter_annulus();
        case BuiltinDomain::thick_ring: return make_thick_ring();
    }
    throw std::invalid_argument("unknown builtin domain");
}

GeometryPatch builtin_domain(const std::string& name) {
    return builtin_domain(builtin_domain_from_string(name));
}

Eigen::VectorXd map_point(const GeometryPatch& g, const Eigen::VectorXd& xi) {
    check_xi(g, xi);
    const auto h = eval_homogeneous(g, xi, false);
    return h.N / h.W;
}

Eigen::MatrixXd jacobian(const GeometryPatch& g, const Eigen::VectorXd& xi) {
    check_xi(g, xi);
    const auto h = eval_homogeneous(g, xi, true);
    const Eigen::VectorXd F = h.N / h.W;
    Eigen::MatrixXd J(g.dim, g.dim);
    for (int k = 0; k < g.dim; ++k) J.col(k) = (h.dN.col(k) - F * h.dW[k]) / h.W;
    return J;
}

void validate_patch(const GeometryPatch& g) {
    if (g.dim != 2 && g.dim != 3) throw geometry_error("patch dimension must be 2 or 3");
    if (static_cast<int>(g.degrees.size()) != g.dim ||
        static_cast<int>(g.knot_vectors.size()) != g.dim)
        throw geometry_error("patch degrees/knot vectors inconsistent with dim");
    long long n = 1;
    for (int k = 0; k < g.dim; ++k) n *= g.basis_count(k);
    if (g.control_points.rows() != n || g.control_points.cols() != g.dim || g.weights.size() != n)
        throw geometry_error("control net size inconsistent with knot vectors");
    if ((g.weights.array() <= 0.0).any()) throw geometry_error("weights must be strictly positive");

    std::vector<double> gx, gw;
    gauss_legendre(4, gx, gw);
    const int n_el = 8;
    Eigen::VectorXd xi(g.dim);
    std::vector<int> e(g.dim, 0), k(g.dim, 0);
    while (true) {
        for (int j = 0; j < g.dim; ++j) xi[j] = (e[j] + 0.5 * (gx[k[j]] + 1.0)) / n_el;
        if (jacobian(g, xi).determinant() <= 0.0)
            throw geometry_error("nonpositive Jacobian determinant at a probe point");
        int j = g.dim - 1;
        while (j >= 0) {
            if (++k[j] < 4) break;
            k[j] = 0;
            if (++e[j] < n_el) break;
            e[j--] = 0;
        }
        if (j < 0) break;
    }
}

std::string patch_to_json(const GeometryPatch& g) {
    nlohmann::json j;
    j["dim"] = g.dim;
    j["degrees"] = g.degrees;
    std::vector<std::vector<double>> kvs;
    for (const auto& kv : g.knot_vectors) kvs.push_back(kv.knots);
    j["knot_vectors"] = kvs;
    std::vector<std::vector<double>> pts;
    for (Eigen::Index i = 0; i < g.control_points.rows(); ++i) {
        std::vector<double> p(g.dim);
        for (int k = 0; k < g.dim; ++k) p[k] = g.control_points(i, k);
        pts.push_back(std::move(p));
    }
    j["control_points"] = pts;
    j["weights"] = std::vector<double>(g.weights.data(), g.weights.data() + g.weights.size());
    return j.dump(2);
}

GeometryPatch patch_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    GeometryPatch g;
    g.dim = j.at("dim").get<int>();
    g.degrees = j.at("degrees").get<std::vector<int>>();
    for (size_t k = 0; k < g.degrees.size(); ++k) {
        auto knots = j.at("knot_vectors").at(k).get<std::vector<double>>();
        g.knot_vectors.push_back(KnotVector::from_knots(g.degrees[k], std::move(knots)));
    }
    const auto pts = j.at("control_points").get<std::vector<std::vector<double>>>();
    g.control_points.resize(pts.size(), g.dim);
    for (size_t i = 0; i < pts.size(); ++i)
        for (int k = 0; k < g.dim; ++k) g.control_points(i, k) = pts[i].at(k);
    const auto w = j.at("weights").get<std::vector<double>>();
    g.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), w.size());
    validate_patch(g);
    return g;
}

void save_patch(const GeometryPatch& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << patch_to_json(g) << "\n";
}

GeometryPatch load_patch(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return patch_from_json(ss.str());
}

}  // namespace cossiga

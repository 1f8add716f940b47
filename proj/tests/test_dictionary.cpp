#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "cossiga/assembly.hpp"
#include "cossiga/dictionary.hpp"
#include "cossiga/quadrature.hpp"
#include "support.hpp"

using namespace cossiga;

namespace {

// Independent 1D integrals of B^2 and (B')^2 over a 50-point composite Gauss
// rule on the basis support, via direct Cox-De Boor evaluation.
void univariate_energy(const KnotVector& kv, int i, double& int_b2, double& int_db2) {
    std::vector<double> gx, gw;
    gauss_legendre(50, gx, gw);
    int_b2 = 0.0;
    int_db2 = 0.0;
    const int n_el = kv.num_elements();
    for (int e = 0; e < n_el; ++e) {
        const double a = kv.breakpoints[e], b = kv.breakpoints[e + 1];
        for (size_t k = 0; k < gx.size(); ++k) {
            const double x = a + 0.5 * (b - a) * (gx[k] + 1.0);
            const double w = 0.5 * (b - a) * gw[k];
            const auto be = eval_basis(kv, x);
            const int t = i - be.first_index;
            if (t < 0 || t > kv.degree) continue;
            int_b2 += w * be.values[t] * be.values[t];
            int_db2 += w * be.derivatives[t] * be.derivatives[t];
        }
    }
}

}  // namespace

TEST_CASE("cardinality closed forms") {
    SUBCASE("paper-scale 2D counts") {
        const auto c = dict_cardinality(2, Regularity::Cmax, 1, 5, 2);
        CHECK(c.n_dof == 1024);
        CHECK(c.n_dict == 4 + 16 + 64 + 256 + 1024);
        CHECK(c.n_dict == 1364);
    }
    SUBCASE("C0 counts") {
        const auto c = dict_cardinality(2, Regularity::C0, 1, 3, 2);
        CHECK(c.n_dict == 9 + 49 + 225);
        CHECK(c.n_dof == 225);
    }
    SUBCASE("invalid levels") {
        CHECK_THROWS_AS(dict_cardinality(2, Regularity::Cmax, 3, 3, 2), std::invalid_argument);
        CHECK_THROWS_AS(dict_cardinality(2, Regularity::Cmax, 5, 3, 2), std::invalid_argument);
        CHECK_THROWS_AS(dict_cardinality(2, Regularity::Cmax, 0, 3, 2), std::invalid_argument);
    }
    SUBCASE("dictionary never much larger than the finest basis") {
        for (int d = 1; d <= 3; ++d)
            for (int p = 1; p <= 5; ++p)
                for (int l0 = 1; l0 <= 3; ++l0)
                    for (int L = l0 + 1; L <= 8; ++L) {
                        const auto cmax = dict_cardinality(p, Regularity::Cmax, l0, L, d);
                        const double lhs = (L - l0 - std::pow(2.0, 1.0 / d)) * (p - 2);
                        const double rhs =
                            (1LL << L) * (std::pow(2.0, 1.0 / d) - 1.0) + (1LL << l0);
                        if (lhs <= rhs) CHECK(cmax.n_dict <= 3 * cmax.n_dof);
                        const auto c0 = dict_cardinality(p, Regularity::C0, l0, L, d);
                        CHECK(c0.n_dict <= 2 * c0.n_dof);
                    }
    }
}

TEST_CASE("dictionary construction on the identity square") {
    const auto g = builtin_domain(BuiltinDomain::unit_square);
    const auto quad = default_quadrature(1, 2);
    const auto dict = build_dictionary(1, Regularity::Cmax, 1, 2, g, quad);

    SUBCASE("atom count and ordering") {
        CHECK(dict.n_dict() == 10);  // 1 + 9
        CHECK(dict.n_dof == 9);
        CHECK(dict.atoms[0].level == 1);
        // level 2 block is lexicographic with the last index fastest
        CHECK(dict.atoms[1].level == 2);
        CHECK(dict.atoms[1].index == std::array<int, 3>{0, 0, 0});
        CHECK(dict.atoms[2].index == std::array<int, 3>{0, 1, 0});
        CHECK(dict.atoms[4].index == std::array<int, 3>{1, 0, 0});
        for (long long j = 0; j < dict.n_dict(); ++j)
            CHECK(dict.atom_index(dict.atoms[j].level, dict.atoms[j].index) == j);
    }
    SUBCASE("all normalizations positive") {
        for (const auto& a : dict.atoms) CHECK(a.gamma > 0.0);
    }
    SUBCASE("level-1 hat energy against the closed form and a fine oracle") {
        // gamma^2 = int |grad(hat x hat)|^2 = 2 * int (B')^2 * int B^2 = 8/3.
        const double gamma = dict.atoms[0].gamma;
        CHECK(std::abs(gamma * gamma - 8.0 / 3.0) < 1e-12);
        double b2, db2;
        univariate_energy(dict.knots_at(1), 1, b2, db2);
        const double oracle = std::sqrt(2.0 * b2 * db2);
        CHECK(std::abs(gamma - oracle) / oracle < 1e-8);
    }
    SUBCASE("cardinality matches constructed length across parameters") {
        for (int p : {1, 2, 3})
            for (auto reg : {Regularity::Cmax, Regularity::C0})
                for (int L : {2, 3}) {
                    const auto d2 = build_dictionary(p, reg, 1, L, g, default_quadrature(p, L));
                    CHECK(d2.n_dict() == dict_cardinality(p, reg, 1, L, 2).n_dict);
                    CHECK(d2.n_dof == dict_cardinality(p, reg, 1, L, 2).n_dof);
                }
    }
    SUBCASE("invalid levels rejected") {
        CHECK_THROWS_AS(build_dictionary(1, Regularity::Cmax, 2, 2, g, quad),
                        std::invalid_argument);
    }
}

TEST_CASE("eval_trial") {
    const auto g = builtin_domain(BuiltinDomain::unit_square);
    const auto dict = build_dictionary(1, Regularity::Cmax, 1, 3, g, default_quadrature(1, 3));

    SUBCASE("interpolatory hat at its node") {
        // level-1 atom peaks at (0.5, 0.5) with unnormalized value 1
        Eigen::VectorXd xi(2);
        xi << 0.5, 0.5;
        const auto e = eval_trial(dict, 0, xi);
        CHECK(e.value == doctest::Approx(1.0 / dict.atoms[0].gamma).epsilon(1e-12));
    }
    SUBCASE("vanishes away from its support") {
        // level-3 atom with index (0,0) is supported in [0, 0.25]^2
        const long long j = dict.atom_index(3, {0, 0, 0});
        Eigen::VectorXd xi(2);
        xi << 0.9, 0.9;
        const auto e = eval_trial(dict, j, xi);
        CHECK(e.value == 0.0);
        CHECK(e.gradient.norm() == 0.0);
    }
    SUBCASE("vanishes on the parametric boundary") {
        auto gen = testsupport::rng(3);
        for (int trial = 0; trial < 40; ++trial) {
            const long long j = static_cast<long long>(testsupport::uniform(gen, 0, 1) *
                                                       dict.n_dict());
            Eigen::VectorXd xi(2);
            xi << testsupport::uniform(gen, 0, 1), testsupport::uniform(gen, 0, 1);
            xi[trial % 2] = (trial % 4 < 2) ? 0.0 : 1.0;
            CHECK(std::abs(eval_trial(dict, j, xi).value) < 1e-12);
        }
    }
    SUBCASE("gradient matches finite differences") {
        auto gen = testsupport::rng(5);
        for (int trial = 0; trial < 50; ++trial) {
            const long long j =
                static_cast<long long>(testsupport::uniform(gen, 0, 1) * dict.n_dict());
            Eigen::VectorXd xi(2);
            xi << testsupport::uniform(gen, 0.02, 0.98), testsupport::uniform(gen, 0.02, 0.98);
            const auto e = eval_trial(dict, j, xi);
            const double h = 1e-7;
            for (int k = 0; k < 2; ++k) {
                Eigen::VectorXd xp = xi, xm = xi;
                xp[k] += h;
                xm[k] -= h;
                const double fd =
                    (eval_trial(dict, j, xp).value - eval_trial(dict, j, xm).value) / (2 * h);
                const double scale = std::max(1.0, std::abs(e.gradient[k]));
                CHECK(std::abs(fd - e.gradient[k]) / scale < 1e-5);
            }
        }
    }
    SUBCASE("index range") {
        Eigen::VectorXd xi(2);
        xi << 0.5, 0.5;
        CHECK_THROWS_AS(eval_trial(dict, -1, xi), std::out_of_range);
        CHECK_THROWS_AS(eval_trial(dict, dict.n_dict(), xi), std::out_of_range);
    }
}

TEST_CASE("span nesting under midpoint refinement") {
    // Every atom below the top level must be exactly representable on the
    // level-L knot vector; Boehm insertion provides the oracle expansion.
    auto gen = testsupport::rng(17);
    for (auto reg : {Regularity::Cmax, Regularity::C0}) {
        const int p = 2, l0 = 1, L = 4;
        for (int trial = 0; trial < 20; ++trial) {
            const int l = l0 + static_cast<int>(testsupport::uniform(gen, 0, 1) * (L - l0));
            const auto kv = make_open_uniform_knots(l, p, reg);
            const auto kvL = make_open_uniform_knots(L, p, reg);
            const int i = 1 + static_cast<int>(testsupport::uniform(gen, 0, 1) *
                                               (kv.num_basis() - 2));

            testsupport::SplineCoeffs coarse;
            coarse.degree = p;
            coarse.knots = kv.knots;
            coarse.coeffs.assign(kv.num_basis(), 0.0);
            coarse.coeffs[i] = 1.0;
            const auto fine = testsupport::refine_to(coarse, kvL.knots);
            CHECK(static_cast<int>(fine.coeffs.size()) == kvL.num_basis());

            for (int k = 0; k <= 50; ++k) {
                const double x = k / 50.0;
                const double direct = testsupport::eval_coeffs(coarse, x);
                const double refined = testsupport::eval_coeffs(fine, x);
                CHECK(std::abs(direct - refined) < 1e-10);
            }
        }
    }
    // 2D check: tensor atoms refine directionwise, so the product of refined
    // univariate expansions must reproduce eval_trial on a grid.
    const auto g = builtin_domain(BuiltinDomain::unit_square);
    const auto dict = build_dictionary(2, Regularity::Cmax, 1, 3, g, default_quadrature(2, 3));
    const auto kvL = make_open_uniform_knots(3, 2, Regularity::Cmax);
    for (long long j : {0LL, 1LL, 5LL}) {
        const auto& atom = dict.atoms[j];
        if (atom.level == 3) continue;
        testsupport::SplineCoeffs c1, c2;
        c1.degree = c2.degree = 2;
        c1.knots = c2.knots = dict.knots_at(atom.level).knots;
        c1.coeffs.assign(dict.knots_at(atom.level).num_basis(), 0.0);
        c2.coeffs = c1.coeffs;
        c1.coeffs[atom.index[0] + 1] = 1.0;
        c2.coeffs[atom.index[1] + 1] = 1.0;
        const auto f1 = testsupport::refine_to(c1, kvL.knots);
        const auto f2 = testsupport::refine_to(c2, kvL.knots);
        for (int a = 0; a <= 50; ++a)
            for (int b = 0; b <= 50; ++b) {
                Eigen::VectorXd xi(2);
                xi << a / 50.0, b / 50.0;
                const double val = eval_trial(dict, j, xi).value * dict.atoms[j].gamma;
                const double oracle =
                    testsupport::eval_coeffs(f1, xi[0]) * testsupport::eval_coeffs(f2, xi[1]);
                CHECK(std::abs(val - oracle) < 1e-10);
            }
    }
}

TEST_CASE("atom table export") {
    const auto g = builtin_domain(BuiltinDomain::unit_square);
    const auto dict = build_dictionary(1, Regularity::Cmax, 1, 2, g, default_quadrature(1, 2));
    const std::string path = "atoms_test.csv";
    write_atoms_csv(dict, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "j,level,i1,i2,gamma");
    int lines = 0;
    std::string line;
    while (std::getline(in, line)) ++lines;
    CHECK(lines == dict.n_dict());
    std::remove(path.c_str());
}

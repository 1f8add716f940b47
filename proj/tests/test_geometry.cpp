#include <doctest.h>

#include <cmath>

#include "cossiga/geometry.hpp"
#include "support.hpp"

using namespace cossiga;

namespace {
Eigen::VectorXd pt2(double a, double b) {
    Eigen::VectorXd x(2);
    x << a, b;
    return x;
}
Eigen::VectorXd pt3(double a, double b, double c) {
    Eigen::VectorXd x(3);
    x << a, b, c;
    return x;
}
}  // namespace

TEST_CASE("identity patch maps points and has identity Jacobian") {
    const auto g = builtin_domain(BuiltinDomain::unit_square);
    const auto x = map_point(g, pt2(0.3, 0.7));
    CHECK(x[0] == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(x[1] == doctest::Approx(0.7).epsilon(1e-14));
    const auto J = jacobian(g, pt2(0.42, 0.11));
    CHECK((J - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-14);

    const auto cube = builtin_domain(BuiltinDomain::unit_cube);
    const auto y = map_point(cube, pt3(1, 1, 1));
    CHECK((y - pt3(1, 1, 1)).norm() < 1e-14);
}

TEST_CASE("quarter annulus geometry") {
    const auto g = builtin_domain(BuiltinDomain::quarter_annulus);

    SUBCASE("corner and mid-arc points") {
        const auto a = map_point(g, pt2(0, 0));
        CHECK(a[0] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(a[1] == doctest::Approx(0.0));
        const auto b = map_point(g, pt2(0, 0.5));
        CHECK(std::abs(b[0] - std::sqrt(2.0) / 2) < 1e-12);
        CHECK(std::abs(b[1] - std::sqrt(2.0) / 2) < 1e-12);
    }
    SUBCASE("exact circles: |F(t, xi2)| = 1 + t") {
        auto gen = testsupport::rng(7);
        for (int i = 0; i < 50; ++i) {
            const double t = testsupport::uniform(gen, 0, 1);
            const double a = testsupport::uniform(gen, 0, 1);
            CHECK(std::abs(map_point(g, pt2(t, a)).norm() - (1 + t)) < 1e-12);
        }
    }
    SUBCASE("probe points stay inside the ring") {
        for (int i = 0; i <= 10; ++i)
            for (int j = 0; j <= 10; ++j) {
                const auto x = map_point(g, pt2(i / 10.0, j / 10.0));
                const double r2 = x.squaredNorm();
                CHECK(r2 >= 1.0 - 1e-12);
                CHECK(r2 <= 4.0 + 1e-12);
                CHECK(x[0] >= -1e-12);
                CHECK(x[1] >= -1e-12);
            }
    }
    SUBCASE("orientation") {
        auto gen = testsupport::rng(8);
        for (int i = 0; i < 20; ++i) {
            const auto J = jacobian(g, pt2(testsupport::uniform(gen, 0, 1),
                                           testsupport::uniform(gen, 0, 1)));
            CHECK(J.determinant() > 0.0);
        }
    }
}

TEST_CASE("thick ring extrusion") {
    const auto g = builtin_domain("thick_ring");
    for (int i = 0; i <= 4; ++i)
        for (int j = 0; j <= 4; ++j)
            for (int k = 0; k <= 4; ++k) {
                const auto x = map_point(g, pt3(i / 4.0, j / 4.0, k / 4.0));
                const double r2 = x[0] * x[0] + x[1] * x[1];
                CHECK(r2 >= 1.0 - 1e-12);
                CHECK(r2 <= 4.0 + 1e-12);
                CHECK(x[2] >= -1e-12);
                CHECK(x[2] <= 1.0 + 1e-12);
            }
    CHECK_NOTHROW(validate_patch(g));
}

TEST_CASE("rational partition of unity") {
    // sum_i R_i = 1 is equivalent to: mapping constant control points gives that constant.
    auto g = builtin_domain(BuiltinDomain::quarter_annulus);
    g.control_points.setOnes();
    auto gen = testsupport::rng(11);
    for (int i = 0; i < 30; ++i) {
        const auto x = map_point(g, pt2(testsupport::uniform(gen, 0, 1),
                                        testsupport::uniform(gen, 0, 1)));
        CHECK(std::abs(x[0] - 1.0) < 1e-12);
        CHECK(std::abs(x[1] - 1.0) < 1e-12);
    }
}

TEST_CASE("jacobian matches finite differences") {
    auto gen = testsupport::rng(13);
    for (auto name : {BuiltinDomain::unit_square, BuiltinDomain::quarter_annulus,
                      BuiltinDomain::unit_cube, BuiltinDomain::thick_ring}) {
        const auto g = builtin_domain(name);
        for (int trial = 0; trial < 100; ++trial) {
            Eigen::VectorXd xi(g.dim);
            for (int k = 0; k < g.dim; ++k) xi[k] = testsupport::uniform(gen, 0.01, 0.99);
            const auto J = jacobian(g, xi);
            const double h = 1e-6;
            for (int k = 0; k < g.dim; ++k) {
                Eigen::VectorXd xp = xi, xm = xi;
                xp[k] += h;
                xm[k] -= h;
                const Eigen::VectorXd fd = (map_point(g, xp) - map_point(g, xm)) / (2 * h);
                CHECK((fd - J.col(k)).norm() / std::max(1.0, J.col(k).norm()) < 1e-6);
            }
        }
    }
}

TEST_CASE("domain errors and unknown names") {
    const auto g = builtin_domain(BuiltinDomain::unit_square);
    CHECK_THROWS_AS(map_point(g, pt2(-0.1, 0.5)), std::domain_error);
    CHECK_THROWS_AS(map_point(g, pt2(0.5, 1.1)), std::domain_error);
    CHECK_THROWS_AS(builtin_domain("moebius_strip"), std::invalid_argument);
}

TEST_CASE("json round trip") {
    const auto g = builtin_domain(BuiltinDomain::quarter_annulus);
    const auto g2 = patch_from_json(patch_to_json(g));
    CHECK(g2.dim == g.dim);
    CHECK(g2.degrees == g.degrees);
    CHECK((g2.control_points - g.control_points).norm() == 0.0);
    CHECK((g2.weights - g.weights).norm() == 0.0);
    CHECK(patch_to_json(g2) == patch_to_json(g));

    auto bad = g;
    bad.weights[2] = -1.0;
    CHECK_THROWS_AS(patch_from_json(patch_to_json(bad)), geometry_error);
}

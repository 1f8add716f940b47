#include <doctest.h>

#include "cossiga/splines.hpp"
#include "support.hpp"

using namespace cossiga;

TEST_CASE("open uniform knot vectors") {
    SUBCASE("smallest case l=1 p=1") {
        const auto kv = make_open_uniform_knots(1, 1, Regularity::Cmax);
        CHECK(kv.knots == std::vector<double>{0.0, 0.0, 0.5, 1.0, 1.0});
        CHECK(kv.num_basis() == 3);
        CHECK(kv.num_elements() == 2);
    }
    SUBCASE("l=5 p=2 Cmax") {
        const auto kv = make_open_uniform_knots(5, 2, Regularity::Cmax);
        CHECK(kv.num_basis() == 34);
        CHECK(kv.num_interior() == 32);
    }
    SUBCASE("l=3 p=2 C0") {
        const auto kv = make_open_uniform_knots(3, 2, Regularity::C0);
        CHECK(kv.num_basis() == 17);
        CHECK(kv.num_interior() == 15);
    }
    SUBCASE("count formulas across degrees and levels") {
        for (int p = 1; p <= 5; ++p)
            for (int l = 1; l <= 8; ++l) {
                CHECK(make_open_uniform_knots(l, p, Regularity::Cmax).num_basis() == (1 << l) + p);
                CHECK(make_open_uniform_knots(l, p, Regularity::C0).num_basis() == (1 << l) * p + 1);
            }
    }
    SUBCASE("multiplicities and element sizes") {
        const auto kv = make_open_uniform_knots(3, 3, Regularity::Cmax);
        CHECK(kv.multiplicities.front() == 4);
        CHECK(kv.multiplicities.back() == 4);
        for (size_t i = 1; i + 1 < kv.multiplicities.size(); ++i) CHECK(kv.multiplicities[i] == 1);
        CHECK(kv.num_elements() == 8);
        const auto c0 = make_open_uniform_knots(3, 3, Regularity::C0);
        for (size_t i = 1; i + 1 < c0.multiplicities.size(); ++i) CHECK(c0.multiplicities[i] == 3);
    }
    SUBCASE("invalid parameters") {
        CHECK_THROWS_AS(make_open_uniform_knots(0, 1, Regularity::Cmax), std::invalid_argument);
        CHECK_THROWS_AS(make_open_uniform_knots(1, 0, Regularity::Cmax), std::invalid_argument);
        CHECK_THROWS_AS(make_open_uniform_knots(-2, 2, Regularity::C0), std::invalid_argument);
    }
}

TEST_CASE("basis evaluation") {
    SUBCASE("interpolatory hat at breakpoint") {
        const auto kv = make_open_uniform_knots(1, 1, Regularity::Cmax);
        const auto be = eval_basis(kv, 0.5);
        double at[3] = {0, 0, 0};
        for (int t = 0; t <= 1; ++t) at[be.first_index + t] = be.values[t];
        CHECK(at[0] == doctest::Approx(0.0));
        CHECK(at[1] == doctest::Approx(1.0));
        CHECK(at[2] == doctest::Approx(0.0));
    }
    SUBCASE("Bernstein values at midpoint") {
        const auto kv = KnotVector::from_knots(2, {0, 0, 0, 1, 1, 1});
        const auto be = eval_basis(kv, 0.5);
        CHECK(be.first_index == 0);
        CHECK(be.values[0] == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(be.values[1] == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(be.values[2] == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(be.derivatives[0] == doctest::Approx(-1.0).epsilon(1e-14));
        CHECK(be.derivatives[1] == doctest::Approx(0.0));
        CHECK(be.derivatives[2] == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("endpoint interpolation of open knot vectors") {
        for (int p = 1; p <= 4; ++p)
            for (auto reg : {Regularity::Cmax, Regularity::C0}) {
                const auto kv = make_open_uniform_knots(3, p, reg);
                const auto b0 = eval_basis(kv, 0.0);
                CHECK(b0.first_index == 0);
                CHECK(b0.values[0] == doctest::Approx(1.0));
                const auto b1 = eval_basis(kv, 1.0);
                CHECK(b1.first_index + p == kv.num_basis() - 1);
                CHECK(b1.values[p] == doctest::Approx(1.0));
            }
    }
    SUBCASE("domain errors") {
        const auto kv = make_open_uniform_knots(2, 2, Regularity::Cmax);
        CHECK_THROWS_AS(eval_basis(kv, -0.01), std::domain_error);
        CHECK_THROWS_AS(eval_basis(kv, 1.01), std::domain_error);
    }
}

TEST_CASE("partition of unity and derivative sums") {
    for (int p = 1; p <= 5; ++p)
        for (auto reg : {Regularity::Cmax, Regularity::C0})
            for (int l : {1, 3, 5}) {
                const auto kv = make_open_uniform_knots(l, p, reg);
                for (int k = 0; k <= 200; ++k) {
                    const double xi = k / 200.0;
                    const auto be = eval_basis(kv, xi);
                    double sv = 0.0, sd = 0.0;
                    for (int t = 0; t <= p; ++t) {
                        sv += be.values[t];
                        sd += be.derivatives[t];
                        CHECK(be.values[t] >= -1e-15);
                    }
                    CHECK(std::abs(sv - 1.0) < 1e-12);
                    CHECK(std::abs(sd) < 1e-10);
                }
            }
}

TEST_CASE("derivatives match central finite differences") {
    auto gen = testsupport::rng(42);
    for (int p : {1, 2, 3, 4})
        for (auto reg : {Regularity::Cmax, Regularity::C0}) {
            const auto kv = make_open_uniform_knots(4, p, reg);
            int checked = 0;
            while (checked < 100) {
                const double xi = testsupport::uniform(gen, 0.01, 0.99);
                const double h = 1e-6;
                const auto be = eval_basis(kv, xi);
                const auto bp = eval_basis(kv, xi + h);
                const auto bm = eval_basis(kv, xi - h);
                if (bp.first_index != be.first_index || bm.first_index != be.first_index)
                    continue;  // straddles an element boundary
                for (int t = 0; t <= p; ++t) {
                    const double fd = (bp.values[t] - bm.values[t]) / (2 * h);
                    const double scale = std::max(1.0, std::abs(be.derivatives[t]));
                    CHECK(std::abs(fd - be.derivatives[t]) / scale < 1e-5);
                }
                ++checked;
            }
        }
}

TEST_CASE("from_knots validation") {
    CHECK_THROWS_AS(KnotVector::from_knots(2, {0, 0, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(KnotVector::from_knots(1, {0, 0, 0.6, 0.4, 1, 1}), std::invalid_argument);
    CHECK_THROWS_AS(KnotVector::from_knots(1, {0, 0, 0.5, 1, 2}), std::invalid_argument);
    const auto kv = KnotVector::from_knots(1, {0, 0, 0.25, 0.5, 0.75, 1, 1});
    CHECK(kv.num_basis() == 5);
    CHECK(kv.num_elements() == 4);
}

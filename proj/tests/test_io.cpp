#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "cossiga/config.hpp"
#include "cossiga/io.hpp"
#include "support.hpp"

using namespace cossiga;

TEST_CASE("matrix market round trip") {
    auto gen = testsupport::rng(55);
    Eigen::MatrixXd M(7, 4);
    for (int i = 0; i < 7; ++i)
        for (int j = 0; j < 4; ++j) M(i, j) = testsupport::uniform(gen, -10, 10) * 1e-3;
    M(0, 0) = 1e-300;
    M(1, 1) = -3.0;
    write_matrix_market(M, "mm_test.mtx");
    const Eigen::MatrixXd N = read_matrix_market("mm_test.mtx");
    CHECK(N.rows() == 7);
    CHECK(N.cols() == 4);
    CHECK((M - N).norm() == 0.0);  // %.17g round-trips doubles exactly
    std::ifstream in("mm_test.mtx");
    std::string banner;
    std::getline(in, banner);
    CHECK(banner == "%%MatrixMarket matrix array real general");
    std::remove("mm_test.mtx");
}

TEST_CASE("vector csv") {
    Eigen::VectorXd v(3);
    v << 1.0, -2.5, 0.125;
    write_vector_csv(v, "c", "vec_test.csv");
    std::ifstream in("vec_test.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "c");
    std::getline(in, line);
    CHECK(line == "1");
    std::getline(in, line);
    CHECK(line == "-2.5");
    std::remove("vec_test.csv");
}

TEST_CASE("runs and summary csv headers") {
    RunRecord rec;
    rec.run_id = 1;
    rec.seed = 17;
    rec.method = "cossiga";
    rec.p = 2;
    rec.l0 = 1;
    rec.L = 5;
    rec.s = 9;
    rec.m = 304;
    rec.subsampling_rate = 304.0 / 1024.0;
    rec.h1_rel_err = 0.05;
    write_runs_csv({rec}, "runs_test.csv");
    std::ifstream in("runs_test.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(header == "run_id,seed,method,p,regularity,l0,L,s,m,subsampling_rate,h1_rel_err");
    CHECK(row.rfind("1,17,cossiga,2,cmax,1,5,9,304,", 0) == 0);
    std::remove("runs_test.csv");

    SummaryRecord srec;
    srec.case_name = "gauss2d";
    srec.p = 2;
    srec.l0 = 1;
    srec.L = 4;
    srec.s = 9;
    srec.m = 40;
    srec.stats = summarize_runs({0.1, 0.2, 0.3});
    write_summary_csv({srec}, "summary_test.csv");
    std::ifstream in2("summary_test.csv");
    std::getline(in2, header);
    CHECK(header ==
          "case,p,regularity,l0,L,s,m,subsampling_rate,n_runs,err_pg_bs,err_pg_omp,"
          "p2.7,p25,p50,p75,p99.3");
    std::remove("summary_test.csv");
}

TEST_CASE("experiment config") {
    SUBCASE("defaults and json round trip") {
        ExperimentConfig c;
        c.case_name = "gauss2d";
        c.s = 13;
        c.C = 0.016;
        c.D = 6.38;
        const std::string text = config_to_json(c);
        const ExperimentConfig back = config_from_json(text);
        CHECK(config_to_json(back) == text);  // idempotent re-emission
        CHECK(back.case_name == "gauss2d");
        CHECK(back.s.value() == 13);
        CHECK(back.C.value() == doctest::Approx(0.016));
    }
    SUBCASE("derived s and m") {
        ExperimentConfig c;
        c.C = 1.6e-2;
        c.D = 6.38;
        c.lambda = 1.0;
        CHECK(c.resolve_s(1024) == 16);
        CHECK(c.resolve_m(1024, 16) == 105);  // round(0.102 * 1024)
        c.lambda = 2.0;
        CHECK(c.resolve_s(1024) == 33);
        ExperimentConfig bare;
        bare.s.reset();
        bare.C.reset();
        CHECK_THROWS_AS(bare.resolve_s(1024), std::invalid_argument);
        CHECK_THROWS_AS(bare.resolve_m(1024, 4), std::invalid_argument);
    }
    SUBCASE("validation") {
        ExperimentConfig c;
        c.s = 9;
        CHECK_NOTHROW(validate_config(c));
        c.l0 = 5;
        CHECK_THROWS_AS(validate_config(c), std::invalid_argument);
        c.l0 = 1;
        c.n_runs = 0;
        CHECK_THROWS_AS(validate_config(c), std::invalid_argument);
        c.n_runs = 10;
        c.mu = 1.0;
        CHECK_THROWS_AS(validate_config(c), std::invalid_argument);
        ExperimentConfig missing;
        missing.s.reset();
        missing.C.reset();
        CHECK_THROWS_AS(validate_config(missing), std::invalid_argument);
    }
}

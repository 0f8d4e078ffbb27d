#include <doctest.h>

#include "ilct/builtin_data.hpp"
#include "ilct/errors.hpp"
#include "ilct/realization.hpp"

using namespace ilct;

TEST_CASE("first-order scalar") {
    const StateSpace ss = realize(RationalMatrix(1, 1, {normalized({1}, {1, 1})}));
    REQUIRE(ss.states() == 1);
    CHECK(ss.A(0, 0) == -1.0);
    CHECK(ss.B(0, 0) == 1.0);
    CHECK(ss.C(0, 0) == 1.0);
    CHECK(ss.D(0, 0) == 0.0);
}

TEST_CASE("static gain") {
    Eigen::MatrixXd k(2, 2);
    k << 1, 2, 3, 4;
    const StateSpace ss = realize(RationalMatrix::constant(k));
    CHECK(ss.states() == 0);
    CHECK(ss.D == k);
}

TEST_CASE("improper input is rejected") {
    CHECK_THROWS_AS(realize(RationalMatrix(1, 1, {normalized({0, 0, 1}, {1, 1})})), ProperError);
}

TEST_CASE("built-in plants realize with CB equal to the first Markov parameter") {
    for (const RationalMatrix& g : {builtin::example1_g1(), builtin::example1_g2(), builtin::example2_g1(),
                                    builtin::example2_g2()}) {
        const StateSpace ss = realize(g);
        ss.validate();
        const Eigen::MatrixXd phi = rm_markov(g, 3)[0];
        CHECK((ss.C * ss.B - phi).cwiseAbs().maxCoeff() < 1e-9);
        const auto hs = markov_from_ss(ss, 3);
        const auto hr = rm_markov(g, 3);
        for (int j = 0; j < 3; ++j) {
            CHECK((hs[j] - hr[j]).cwiseAbs().maxCoeff() < 1e-9 * (1.0 + hr[j].cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("column blocks use the least common denominator") {
    // example1 G1 column 1 has denominators (s+1)(s+2) and (s+1)(s+2)(s+3)
    CHECK(realize(builtin::example1_g1()).states() == 6);
}

TEST_CASE("Markov parameters from state space") {
    const StateSpace z{Eigen::MatrixXd::Zero(1, 1), Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1),
                       Eigen::MatrixXd::Zero(1, 1)};
    const auto h = markov_from_ss(z, 3);
    CHECK(h[0](0, 0) == 1.0);
    CHECK(h[1](0, 0) == 0.0);
    CHECK(h[2](0, 0) == 0.0);
    Eigen::MatrixXd phi2(2, 3);
    phi2 << 1.2, 1.11, 0.5, 1.2, 1.11, 1.22;
    CHECK((markov_from_ss(realize(builtin::example2_g1()), 1)[0] - phi2).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("transfer matrix of a state-space model") {
    Eigen::MatrixXd a(3, 3), b(3, 2), c(2, 3);
    a << -1, 1, 0, 0, -2, 1, 0, 0, -3;
    b << 1, 0, 0, 1, 1, 1;
    c << 1, 0, 0, 0, 1, 0;
    const StateSpace ss{a, b, c, Eigen::MatrixXd::Zero(2, 2)};
    const RationalMatrix g = transfer_matrix(ss);
    ProbeSampler sampler(3);
    for (const Complex s : sampler.draw(6)) {
        CHECK((g.eval(s) - ss.eval(s)).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("interconnections") {
    const StateSpace g = realize(builtin::example1_g1());
    const StateSpace h = realize(builtin::example1_g2());
    Eigen::MatrixXd k(2, 3);
    k << 1, 0, 2, 0, 1, -1;
    ProbeSampler sampler(8);
    for (const Complex s : sampler.draw(5)) {
        const Eigen::MatrixXcd gs = g.eval(s);
        CHECK((ss_series(g, ss_static(k)).eval(s) - k * gs).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((ss_parallel(g, ss_negate(g)).eval(s)).cwiseAbs().maxCoeff() < 1e-10);
        CHECK((ss_times_s(g).eval(s) - s * gs).cwiseAbs().maxCoeff() < 1e-9 * std::abs(s));
        CHECK((ss_series(h, ss_static(Eigen::MatrixXd::Identity(3, 3))).eval(s) - h.eval(s))
                  .cwiseAbs()
                  .maxCoeff() < 1e-12);
    }
    // (I + G11)^{-1}(I + G11) = I for a square proper system
    const StateSpace sq = realize(builtin::example1_g2());
    const StateSpace p = ss_parallel(sq, ss_static(Eigen::MatrixXd::Identity(3, 3)));
    const StateSpace round = ss_series(p, ss_inverse(p));
    for (const Complex s : sampler.draw(4)) {
        CHECK((round.eval(s) - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-9);
    }
    CHECK_THROWS_AS(ss_inverse(g), DimensionError);
    CHECK_THROWS_AS(ss_inverse(sq), SingularError);
    CHECK_THROWS_AS(ss_times_s(p), ProperError);
}

#include "ilct/builtin_data.hpp"

#include <numbers>

#include "ilct/errors.hpp"

namespace ilct::builtin {

namespace {

// num / (k * den)
RationalEntry frac(Poly num, double k, const Poly& den) { return normalized(num, den.scaled(k)); }

const Poly& d_s1() {
    static const Poly p{1.0, 1.0};  // s + 1
    return p;
}
const Poly& d_s12() {
    static const Poly p{2.0, 3.0, 1.0};  // s^2 + 3s + 2
    return p;
}
const Poly& d_s13() {
    static const Poly p{3.0, 4.0, 1.0};  // s^2 + 4s + 3
    return p;
}
const Poly& d_s123() {
    static const Poly p{6.0, 11.0, 6.0, 1.0};  // s^3 + 6s^2 + 11s + 6
    return p;
}

}  // namespace

RationalMatrix example1_g1() {
    return RationalMatrix(3, 2,
                          {
                              frac({-17, 12}, 10, d_s12()),
                              frac({-17, 12}, 10, d_s12()),
                              frac({82, 111}, 100, d_s12()),
                              frac({82, 111}, 100, d_s12()),
                              frac({-216, -133, 25}, 50, d_s123()),
                              frac({-144, -25, 61}, 50, d_s123()),
                          });
}

RationalMatrix example1_g2() {
    return RationalMatrix(3, 3,
                          {
                              frac({1}, 1, d_s1()),
                              frac({1}, 1, d_s1()),
                              frac({-39, 1}, 10, d_s12()),
                              frac({1}, 10, d_s1()),
                              frac({1}, 10, d_s1()),
                              frac({3, 5}, 5, d_s12()),
                              frac({1}, 5, d_s1()),
                              frac({7, 5}, 5, d_s13()),
                              frac({-29, -20, 1}, 5, d_s123()),
                          });
}

Eigen::MatrixXd example1_gain() {
    Eigen::MatrixXd g(2, 3);
    g << 0.6849, 0.6335, -1.25, -0.2807, -0.2596, 1.25;
    return g;
}

SignalVector example1_yd(char which) {
    if (which != 'a' && which != 'b' && which != 'c') {
        throw Error(std::string("example1 has no case '") + which + "'");
    }
    const double k = 57420.0 / 3809.0;
    const double sin_coeff = which == 'c' ? 2.0 / 5.0 : 1240.0 / 3809.0;
    const SignalExpr y1 = SignalExpr::cos(k, 1.0) + SignalExpr::exp(-k, -82.0 / 111.0) +
                          SignalExpr::sin(-sin_coeff, 1.0);
    return {y1, SignalExpr::sin(10.0, 1.0), SignalExpr::sin(10.0, std::numbers::pi / 5.0)};
}

Eigen::VectorXd example1_u0(char which) {
    if (which == 'b') {
        return Eigen::Vector2d(10.0, -10.0);
    }
    return Eigen::VectorXd::Zero(2);
}

RationalMatrix example2_g1() {
    // Entries listed for the transposed (3 x 2) layout, then transposed.
    const RationalMatrix t(3, 2,
                           {
                               frac({195, 155, 24}, 20, d_s123()),
                               frac({273, 361, 120}, 100, d_s123()),
                               frac({-348, 523, 111}, 100, d_s123()),
                               frac({-240, -53, 111}, 100, d_s123()),
                               frac({45, 42, 5}, 10, d_s123()),
                               frac({99, 156, 61}, 50, d_s123()),
                           });
    return rm_transpose(t);
}

RationalMatrix example2_g2() {
    const RationalMatrix t(3, 2,
                           {
                               frac({1}, 1, d_s1()),
                               frac({1}, 10, d_s1()),
                               frac({21, 1}, 10, d_s13()),
                               frac({6, 5}, 5, d_s13()),
                               frac({-9, 9, 2}, 2, d_s123()),
                               frac({-27, -9, 10}, 10, d_s123()),
                           });
    return rm_transpose(t);
}

Eigen::MatrixXd example2_gain() {
    Eigen::MatrixXd g(3, 2);
    g << 0.6, 0.1, 0.1, 0.1, -0.5, 0.4;
    return g;
}

SignalVector example2_yd() {
    return {SignalExpr::sin(10.0, 1.0), SignalExpr::sin(10.0, std::numbers::pi / 5.0)};
}

Eigen::VectorXd example2_u0(char which) {
    if (which == 'e') {
        return Eigen::Vector3d(10.0, -10.0, 5.0);
    }
    return Eigen::VectorXd::Zero(3);
}

}  // namespace ilct::builtin

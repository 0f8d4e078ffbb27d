#pragma once

#include <Eigen/Dense>

#include "ilct/laplace.hpp"
#include "ilct/ratmat.hpp"

// Plant, trajectory and gain data of the two reference experiments:
// example1 is a 3-output/2-input plant (cases a, b, c), example2 is a
// 2-output/3-input plant (cases d, e). Both use T = 10 and D(s) = 0.
namespace ilct::builtin {

RationalMatrix example1_g1();
RationalMatrix example1_g2();
Eigen::MatrixXd example1_gain();
// Case 'a', 'b' or 'c'.
SignalVector example1_yd(char which);
Eigen::VectorXd example1_u0(char which);

RationalMatrix example2_g1();
RationalMatrix example2_g2();
Eigen::MatrixXd example2_gain();
SignalVector example2_yd();
Eigen::VectorXd example2_u0(char which);

}  // namespace ilct::builtin

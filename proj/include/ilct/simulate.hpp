#pragma once

#include <optional>

#include <Eigen/Dense>

#include "ilct/realization.hpp"
#include "ilct/signal.hpp"

namespace ilct {

struct StateTrajectory {
    Eigen::MatrixXd x;  // N x n
    SampledSignal y;
};

// Classic RK4 on the grid of u. The forcing B u + w at step midpoints comes
// from cubic interpolation of the node values; w (N x n, optional) is an
// additive state forcing.
StateTrajectory simulate_states(const StateSpace& ss, const SampledSignal& u,
                                const std::optional<SampledSignal>& w, const Eigen::VectorXd& x0);

SampledSignal lsim(const StateSpace& ss, const SampledSignal& u,
                   const std::optional<SampledSignal>& w, const Eigen::VectorXd& x0);

// y' = C (A x + B u + w) at every node. Requires D = 0.
SampledSignal output_derivative(const StateSpace& ss, const StateTrajectory& traj,
                                const SampledSignal& u, const std::optional<SampledSignal>& w);

// C e^{At} B at every grid node (the D part is excluded).
std::vector<Eigen::MatrixXd> impulse_response(const StateSpace& ss, const Grid& grid);

// sup_i max_c |f_i,c| e^{-lambda t_i}
double lambda_norm(const SampledSignal& f, double lambda);

// Central differences inside, second-order one-sided at both ends.
SampledSignal finite_diff(const SampledSignal& f);

double sup_norm(const SampledSignal& f);

}  // namespace ilct

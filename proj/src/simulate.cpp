#include "ilct/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "ilct/errors.hpp"

namespace ilct {

StateTrajectory simulate_states(const StateSpace& ss, const SampledSignal& u,
                                const std::optional<SampledSignal>& w, const Eigen::VectorXd& x0) {
    ss.validate();
    const int n = ss.states();
    const Grid& grid = u.grid();
    const int nodes = grid.nodes();
    if (u.channels() != ss.inputs()) {
        throw DimensionError("lsim: input channel count differs from system inputs");
    }
    if (x0.size() != n) {
        throw DimensionError("lsim: initial state has the wrong length");
    }
    if (w) {
        if (!(w->grid() == grid) || w->channels() != n) {
            throw DimensionError("lsim: state forcing must be N x n on the input grid");
        }
    }
    if (!x0.allFinite()) {
        throw Error("lsim: non-finite initial state");
    }

    Eigen::MatrixXd x(nodes, n);
    const double h = grid.step();
    Eigen::VectorXd xi = x0;
    x.row(0) = xi.transpose();
    const Eigen::MatrixXd& uv = u.values();
    auto forcing = [&](int i) -> Eigen::VectorXd {
        Eigen::VectorXd f = ss.B * uv.row(i).transpose();
        if (w) f += w->values().row(i).transpose();
        return f;
    };
    if (n > 0) {
        Eigen::MatrixXd f(nodes, n);
        for (int i = 0; i < nodes; ++i) f.row(i) = forcing(i).transpose();
        // Midpoint forcing by cubic interpolation through four nodes
        // (one-sided at the ends); linear when there are fewer than 4 nodes.
        auto midpoint = [&](int i) -> Eigen::VectorXd {
            if (nodes < 4) return 0.5 * (f.row(i) + f.row(i + 1)).transpose();
            if (i == 0) return ((5.0 * f.row(0) + 15.0 * f.row(1) - 5.0 * f.row(2) + f.row(3)) / 16.0).transpose();
            if (i == nodes - 2) {
                return ((f.row(i - 2) - 5.0 * f.row(i - 1) + 15.0 * f.row(i) + 5.0 * f.row(i + 1)) / 16.0)
                    .transpose();
            }
            return ((-f.row(i - 1) + 9.0 * f.row(i) + 9.0 * f.row(i + 1) - f.row(i + 2)) / 16.0).transpose();
        };
        for (int i = 0; i + 1 < nodes; ++i) {
            const Eigen::VectorXd f0 = f.row(i).transpose();
            const Eigen::VectorXd f1 = f.row(i + 1).transpose();
            const Eigen::VectorXd fm = midpoint(i);
            const Eigen::VectorXd k1 = ss.A * xi + f0;
            const Eigen::VectorXd k2 = ss.A * (xi + 0.5 * h * k1) + fm;
            const Eigen::VectorXd k3 = ss.A * (xi + 0.5 * h * k2) + fm;
            const Eigen::VectorXd k4 = ss.A * (xi + h * k3) + f1;
            xi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            x.row(i + 1) = xi.transpose();
        }
    }
    Eigen::MatrixXd y = x * ss.C.transpose() + uv * ss.D.transpose();
    if (!y.allFinite()) {
        throw Error("lsim: simulation produced non-finite values");
    }
    return {std::move(x), SampledSignal(grid, std::move(y))};
}

SampledSignal lsim(const StateSpace& ss, const SampledSignal& u,
                   const std::optional<SampledSignal>& w, const Eigen::VectorXd& x0) {
    return simulate_states(ss, u, w, x0).y;
}

SampledSignal output_derivative(const StateSpace& ss, const StateTrajectory& traj,
                                const SampledSignal& u, const std::optional<SampledSignal>& w) {
    if (!ss.D.isZero(0.0)) {
        throw ProperError("output_derivative: system has a feedthrough term");
    }
    Eigen::MatrixXd xdot = traj.x * ss.A.transpose() + u.values() * ss.B.transpose();
    if (w) xdot += w->values();
    return SampledSignal(u.grid(), xdot * ss.C.transpose());
}

std::vector<Eigen::MatrixXd> impulse_response(const StateSpace& ss, const Grid& grid) {
    const int q = ss.outputs();
    const int p = ss.inputs();
    std::vector<Eigen::MatrixXd> out(static_cast<size_t>(grid.nodes()), Eigen::MatrixXd::Zero(q, p));
    if (ss.states() == 0) {
        return out;
    }
    const StateSpace free{ss.A, Eigen::MatrixXd::Zero(ss.states(), 1), ss.C,
                          Eigen::MatrixXd::Zero(q, 1)};
    const SampledSignal none = SampledSignal::zeros(grid, 1);
    for (int j = 0; j < p; ++j) {
        const SampledSignal y = lsim(free, none, std::nullopt, ss.B.col(j));
        for (int i = 0; i < grid.nodes(); ++i) {
            out[i].col(j) = y.values().row(i).transpose();
        }
    }
    return out;
}

double lambda_norm(const SampledSignal& f, double lambda) {
    if (!(lambda > 0.0)) {
        throw Error("lambda_norm: lambda must be positive");
    }
    double best = 0.0;
    const Grid& g = f.grid();
    for (int i = 0; i < g.nodes(); ++i) {
        const double v = f.channels() == 0 ? 0.0 : f.values().row(i).cwiseAbs().maxCoeff();
        best = std::max(best, v * std::exp(-lambda * g.t(i)));
    }
    return best;
}

SampledSignal finite_diff(const SampledSignal& f) {
    const int n = f.grid().nodes();
    if (n < 3) {
        throw Error("finite_diff: at least three nodes are required");
    }
    const double h = f.grid().step();
    const Eigen::MatrixXd& v = f.values();
    Eigen::MatrixXd d(n, v.cols());
    d.row(0) = (-3.0 * v.row(0) + 4.0 * v.row(1) - v.row(2)) / (2.0 * h);
    for (int i = 1; i + 1 < n; ++i) {
        d.row(i) = (v.row(i + 1) - v.row(i - 1)) / (2.0 * h);
    }
    d.row(n - 1) = (3.0 * v.row(n - 1) - 4.0 * v.row(n - 2) + v.row(n - 3)) / (2.0 * h);
    return SampledSignal(f.grid(), std::move(d));
}

double sup_norm(const SampledSignal& f) {
    if (f.values().size() == 0) return 0.0;
    return f.values().cwiseAbs().maxCoeff();
}

}  // namespace ilct

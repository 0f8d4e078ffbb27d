#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ilct/laplace.hpp"
#include "ilct/ratmat.hpp"
#include "ilct/realization.hpp"
#include "ilct/signal.hpp"

namespace ilct {

// Y = G1 U + G2 D with D = d0 + Dhat.
struct Plant {
    RationalMatrix g1;  // q x p
    RationalMatrix g2;  // q x m
    ExogenousInput exo;
    int q = 0;
    int p = 0;
    int m = 0;
    Eigen::MatrixXd phi1;  // first Markov parameter of G1
    Eigen::MatrixXd phi2;  // first Markov parameter of G2
    // Column order of G1 putting a nonsingular q x q block first (q <= p);
    // identity otherwise.
    std::vector<int> permutation;
    StateSpace g1_ss;
    StateSpace g2_ss;
    std::uint64_t seed = 1;

    bool underactuated() const { return q >= p; }
};

// Validates C1..C4 and realizes both transfer matrices. Throws ConditionError
// naming the violated condition.
Plant make_plant(RationalMatrix g1, RationalMatrix g2, ExogenousInput exo, std::uint64_t seed = 1);

// x' = A x + B u + w, y = C x, x(0) = x0. G1 = C(sI-A)^{-1}B,
// G2 = [C(sI-A)^{-1}  C(sI-A)^{-1}], d0 = (x0, 0), Dhat = (0, W).
Plant statespace_plant(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& c,
                       const Eigen::VectorXd& x0, const SignalVector& w, std::uint64_t seed = 1);

// A desired trajectory is either an analytic expression or samples only.
// Sampled trajectories are refused by the analysis functions.
using Trajectory = std::variant<SignalVector, SampledSignal>;

using Evaluator = std::function<Eigen::VectorXcd(Complex)>;

struct TrackabilityVerdict {
    bool trackable = false;
    bool realizable = false;
    bool initial_condition_ok = false;
    // Largest relative probe residual: of P R for q >= p, of G1 U - R for
    // the witness when q < p.
    double residual = 0.0;
    int probes_used = 0;
    std::vector<int> permutation;
    // s -> U_d(s); empty when not trackable.
    Evaluator witness;
};

inline constexpr int kTrackProbes = 12;
inline constexpr double kTrackTol = 1e-7;

// y_d(0) against Phi2(0) d0.
bool check_initial_condition(const Plant& plant, const SignalVector& yd);

// s -> Y_d(s) - G2(s) D(s)
Evaluator reference_evaluator(const Plant& plant, const Trajectory& yd);

// I - G1 (G1^T G1)^{-1} G1^T at s0 (plain transpose).
Eigen::MatrixXcd projector(const RationalMatrix& g1, Complex s0);

// Probe points for the plant and trajectory, seeded from the plant.
std::vector<Complex> plant_probes(const Plant& plant, const SignalVector& yd, int count,
                                  std::uint64_t salt = 0);

TrackabilityVerdict check_trackable_underactuated(const Plant& plant, const Trajectory& yd);
// (G1^T G1)^{-1} G1^T (Y_d - G2 D); throws NotTrackableError when y_d is not
// trackable.
Evaluator desired_input_underactuated(const Plant& plant, const Trajectory& yd);

// ud2 fills the p - q free channels (in permuted order); zero when absent.
TrackabilityVerdict check_trackable_overactuated(const Plant& plant, const Trajectory& yd,
                                                 const std::optional<SignalVector>& ud2 = std::nullopt);

// Underactuated checker for q >= p, overactuated otherwise.
TrackabilityVerdict check_trackable(const Plant& plant, const Trajectory& yd,
                                    const std::optional<SignalVector>& ud2 = std::nullopt);

// max over probes of |G1 U - R| / (1 + |R|)
double membership_residual(const Plant& plant, const Evaluator& u, const Evaluator& r,
                           const std::vector<Complex>& probes);

}  // namespace ilct

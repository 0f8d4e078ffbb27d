#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ilct/errors.hpp"
#include "ilct/laplace.hpp"
#include "ilct/realization.hpp"
#include "ilct/signal.hpp"
#include "ilct/trackability.hpp"

namespace ilct {

// Gamma(s) = s (gamma0 + gammahat(s)), gammahat strictly proper.
struct GainOperator {
    Eigen::MatrixXd gamma0;   // p x q
    RationalMatrix gammahat;  // p x q
    // Realization of gamma0 + gammahat (D = gamma0).
    StateSpace filter;

    int inputs() const { return static_cast<int>(gamma0.cols()); }
    int outputs() const { return static_cast<int>(gamma0.rows()); }
    bool dtype() const { return filter.states() == 0; }
    // Gamma(s) at s0.
    Eigen::MatrixXcd eval(Complex s0) const;
    RationalMatrix gamma() const;
};

// Accepts Gamma when Gamma(s)/s is proper with a nonzero limit. With a plant,
// also checks that Gamma G1 and G1 Gamma are proper.
GainOperator validate_gain(const RationalMatrix& gamma_raw, const Plant* plant = nullptr);
// Gamma(s) = s * upsilon.
GainOperator dtype_gain(const Eigen::MatrixXd& upsilon);

enum class ConditionSide { input_side, output_side };

struct ConvergenceCheck {
    ConditionSide side = ConditionSide::input_side;
    double rho = 0.0;
    bool satisfied = false;
    // I - gamma0 Phi1 (input side) or I - Phi1 gamma0 (output side).
    Eigen::MatrixXd contraction;
};

// Input side for q >= p, output side for q < p.
ConvergenceCheck check_convergence_condition(const Plant& plant, const GainOperator& gain);

// lambda = 2 beta_F / (1 - rho1) with rho1 the induced inf-norm of the
// static part of I - Gamma G1 (I - G1 Gamma for q < p) and beta_F the peak
// inf-norm of the impulse response of its dynamic part. Falls back to
// lambda = 1 when rho1 >= 1.
struct LambdaStar {
    double rho1 = 0.0;
    double beta_f = 0.0;
    double lambda = 1.0;
    bool fallback = false;
};

LambdaStar lambda_star(const Plant& plant, const GainOperator& gain, const Grid& grid);

enum class DerivativeMode { state, finite_diff };

struct IlcOptions {
    // state: e' = y_d' - C (A x + B u); finite_diff: y_d' - finite_diff(y).
    DerivativeMode derivative = DerivativeMode::state;
    double divergence_factor = 1e6;
    std::optional<double> lambda;
    // Iterations whose u, y, e are kept (K means the final simulation).
    std::vector<int> snapshots;
    bool keep_delta_u = true;
};

struct IlcRecord {
    int k = 0;
    double sup_error = 0.0;
    double lambda_delta_u = 0.0;
    // max |gamma0 e_k(0)|
    double impulse_norm = 0.0;
    bool impulsive = false;
};

struct Snapshot {
    int k;
    SampledSignal u;
    SampledSignal y;
    SampledSignal e;
};

struct IlcRunReport {
    IlcRunReport(const Grid& grid, int p, int q);

    std::vector<IlcRecord> records;
    int iterations = 0;
    SampledSignal u_final;
    SampledSignal y_final;
    SampledSignal e_final;
    double final_sup_error = 0.0;
    double scale = 1.0;  // max(1, sup |y_d|)
    double fitted_ratio = 0.0;
    ConvergenceCheck condition;
    LambdaStar lambda;
    bool impulsive_update_required = false;
    std::optional<double> limsup_estimate;
    std::vector<Snapshot> snapshots;
    std::vector<SampledSignal> delta_u;
};

class DivergenceError : public Error {
  public:
    DivergenceError(const std::string& what, IlcRunReport partial)
        : Error(what), partial_(std::make_shared<IlcRunReport>(std::move(partial))) {}
    const IlcRunReport& partial() const { return *partial_; }

  private:
    std::shared_ptr<const IlcRunReport> partial_;
};

// y = G1 u + G2 D on the grid, with its derivative.
struct PlantOutput {
    SampledSignal y;
    SampledSignal ydot;
};

PlantOutput input_response(const Plant& plant, const SampledSignal& u);
// G2 response to d0 delta(t) + dhat(t).
PlantOutput exogenous_response(const Plant& plant, const Eigen::VectorXd& d0, const SampledSignal& dhat);
PlantOutput exogenous_response(const Plant& plant, const Grid& grid);

IlcRunReport ilc_run(const Plant& plant, const GainOperator& gain, const SignalVector& yd, const SampledSignal& u0,
                     int iterations, const IlcOptions& options = {});

struct DisturbanceModel {
    double beta_theta = 0.0;
    double beta_thetahat = 0.0;
    std::uint64_t seed = 1;
};

struct DisturbanceSample {
    Eigen::VectorXd theta;
    SampledSignal thetahat;
};

// |theta|_inf <= beta_theta; each channel of thetahat is a sinusoid with
// amplitude at most beta_thetahat. Samples scale linearly with the bounds.
class DisturbanceGenerator {
  public:
    DisturbanceGenerator(const DisturbanceModel& model, int channels, const Grid& grid);
    DisturbanceSample next();

  private:
    DisturbanceModel model_;
    int channels_;
    Grid grid_;
    std::mt19937_64 rng_;
};

// ilc_run with D_k = D + Theta_k; limsup estimate = max sup error over the
// last 20% of iterations.
IlcRunReport robustness_run(const Plant& plant, const GainOperator& gain, const SignalVector& yd,
                            const SampledSignal& u0, int iterations, const DisturbanceModel& model,
                            const IlcOptions& options = {});

struct LimitPrediction {
    Evaluator u_inf;
    Evaluator e_inf;
};

// (Gamma G1)^{-1} Gamma R and (I - G1 (Gamma G1)^{-1} Gamma) R.
LimitPrediction predict_limit_underactuated(const Plant& plant, const GainOperator& gain, const SignalVector& yd);
// Gamma (G1 Gamma)^{-1} R + Gamma~ U0, Gamma~ assembled blockwise on the
// permuted partition [G11 G12], [Gamma1; Gamma2].
Evaluator predict_limit_overactuated(const Plant& plant, const GainOperator& gain, const SignalVector& yd,
                                     const SignalVector& u0);

struct LimitSignals {
    SampledSignal u_inf;
    SampledSignal e_inf;
};

// Time-domain limits from realizations of the same compositions.
LimitSignals limit_signals_underactuated(const Plant& plant, const GainOperator& gain, const SignalVector& yd,
                                         const Grid& grid);
LimitSignals limit_signals_overactuated(const Plant& plant, const GainOperator& gain, const SignalVector& yd,
                                        const SampledSignal& u0);

struct FcsDiagnostic {
    std::vector<double> ratios;
    double fitted_rho = 0.0;
    double rho_bound = 1.0;
    bool is_contractive = false;
    bool degenerate = false;
    int late_count = 0;
};

// Ratios of consecutive norms above 1e-9 * max; late stage is the last half.
// degenerate when every norm is <= floor.
FcsDiagnostic fcs_diagnostic(const std::vector<double>& norms, double rho_bound, double floor = 1e-12);
FcsDiagnostic fcs_diagnostic(const IlcRunReport& report, double lambda);

}  // namespace ilct

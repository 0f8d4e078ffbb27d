#include "ilct/ilc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "ilct/simulate.hpp"

namespace ilct {

namespace {

double inf_norm(const Eigen::MatrixXd& m) { return m.rows() == 0 ? 0.0 : m.cwiseAbs().rowwise().sum().maxCoeff(); }

double spectral_radius(const Eigen::MatrixXd& m) { return m.eigenvalues().cwiseAbs().maxCoeff(); }

SampledSignal sample_or_zero(const SignalVector& f, const Grid& grid, int channels) {
    if (f.empty()) return SampledSignal::zeros(grid, channels);
    return expr_sample(f, grid);
}

void require_conditions(const Plant& plant, const GainOperator& gain) {
    const ConvergenceCheck c = check_convergence_condition(plant, gain);
    if (!c.satisfied) {
        throw ConditionError("convergence", "spectral radius " + std::to_string(c.rho) + " is not below 1");
    }
}

// Gamma(s) G1(s) rows/columns permuted for the overactuated partition.
Eigen::MatrixXcd permute_cols(const Eigen::MatrixXcd& m, const std::vector<int>& perm) {
    Eigen::MatrixXcd out(m.rows(), m.cols());
    for (size_t k = 0; k < perm.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = m.col(perm[k]);
    return out;
}

Eigen::MatrixXcd permute_rows(const Eigen::MatrixXcd& m, const std::vector<int>& perm) {
    Eigen::MatrixXcd out(m.rows(), m.cols());
    for (size_t k = 0; k < perm.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = m.row(perm[k]);
    return out;
}

}  // namespace

Eigen::MatrixXcd GainOperator::eval(Complex s0) const {
    return s0 * (gamma0.cast<Complex>() + gammahat.eval(s0));
}

RationalMatrix GainOperator::gamma() const {
    return rm_times_s(rm_add(RationalMatrix::constant(gamma0), gammahat));
}

GainOperator validate_gain(const RationalMatrix& gamma_raw, const Plant* plant) {
    const RationalMatrix over_s = rm_divide_by_s(gamma_raw);
    const PropernessClass pc = rm_classify(over_s);
    if (pc.kind == Properness::improper) {
        throw ConditionError("gain", "Gamma(s)/s is not proper");
    }
    if (pc.limit.cwiseAbs().maxCoeff() == 0.0) {
        throw ConditionError("gain", "Gamma(s)/s tends to zero; gamma0 = 0");
    }
    GainOperator g;
    g.gamma0 = pc.limit;
    g.gammahat = rm_sub(over_s, RationalMatrix::constant(pc.limit));
    if (rm_classify(g.gammahat).kind != Properness::strictly_proper) {
        throw ConditionError("gain", "gammahat is not strictly proper");
    }
    g.filter = realize(g.gammahat);
    g.filter.D = g.gamma0;
    if (plant) {
        if (gamma_raw.rows() != plant->p || gamma_raw.cols() != plant->q) {
            throw DimensionError("gain must be p x q");
        }
        const bool left = rm_classify(rm_mul(gamma_raw, plant->g1)).kind != Properness::improper;
        const bool right = rm_classify(rm_mul(plant->g1, gamma_raw)).kind != Properness::improper;
        if (!left || !right) {
            throw ConditionError("gain", "Gamma G1 or G1 Gamma is improper although Gamma(s)/s is proper");
        }
    }
    return g;
}

GainOperator dtype_gain(const Eigen::MatrixXd& upsilon) {
    if (upsilon.size() == 0 || upsilon.cwiseAbs().maxCoeff() == 0.0) {
        throw ConditionError("gain", "upsilon is zero");
    }
    GainOperator g;
    g.gamma0 = upsilon;
    g.gammahat = RationalMatrix(static_cast<int>(upsilon.rows()), static_cast<int>(upsilon.cols()));
    g.filter = ss_static(upsilon);
    return g;
}

ConvergenceCheck check_convergence_condition(const Plant& plant, const GainOperator& gain) {
    if (gain.outputs() != plant.p || gain.inputs() != plant.q) {
        throw DimensionError("gain must be p x q");
    }
    ConvergenceCheck c;
    if (plant.underactuated()) {
        c.side = ConditionSide::input_side;
        c.contraction = Eigen::MatrixXd::Identity(plant.p, plant.p) - gain.gamma0 * plant.phi1;
    } else {
        c.side = ConditionSide::output_side;
        c.contraction = Eigen::MatrixXd::Identity(plant.q, plant.q) - plant.phi1 * gain.gamma0;
    }
    c.rho = spectral_radius(c.contraction);
    c.satisfied = c.rho < 1.0;
    return c;
}

LambdaStar lambda_star(const Plant& plant, const GainOperator& gain, const Grid& grid) {
    const StateSpace sg1 = ss_times_s(plant.g1_ss);
    StateSpace loop;
    int n;
    if (plant.underactuated()) {
        loop = ss_series(sg1, gain.filter);
        n = plant.p;
    } else {
        loop = ss_series(gain.filter, sg1);
        n = plant.q;
    }
    const StateSpace f = ss_parallel(ss_static(Eigen::MatrixXd::Identity(n, n)), ss_negate(loop));
    LambdaStar out;
    out.rho1 = inf_norm(f.D);
    for (const Eigen::MatrixXd& h : impulse_response(f, grid)) {
        out.beta_f = std::max(out.beta_f, inf_norm(h));
    }
    if (out.rho1 >= 1.0) {
        out.fallback = true;
        out.lambda = 1.0;
    } else {
        out.lambda = std::max(2.0 * out.beta_f / (1.0 - out.rho1), 1e-6);
    }
    return out;
}

PlantOutput input_response(const Plant& plant, const SampledSignal& u) {
    const StateTrajectory tr = simulate_states(plant.g1_ss, u, std::nullopt, Eigen::VectorXd::Zero(plant.g1_ss.states()));
    return {tr.y, output_derivative(plant.g1_ss, tr, u, std::nullopt)};
}

PlantOutput exogenous_response(const Plant& plant, const Eigen::VectorXd& d0, const SampledSignal& dhat) {
    const StateTrajectory tr = simulate_states(plant.g2_ss, dhat, std::nullopt, plant.g2_ss.B * d0);
    return {tr.y, output_derivative(plant.g2_ss, tr, dhat, std::nullopt)};
}

PlantOutput exogenous_response(const Plant& plant, const Grid& grid) {
    return exogenous_response(plant, plant.exo.d0, sample_or_zero(plant.exo.dhat, grid, plant.m));
}

IlcRunReport::IlcRunReport(const Grid& grid, int p, int q)
    : u_final(SampledSignal::zeros(grid, p)),
      y_final(SampledSignal::zeros(grid, q)),
      e_final(SampledSignal::zeros(grid, q)) {}

namespace {

IlcRunReport run_core(const Plant& plant, const GainOperator& gain, const SignalVector& yd, const SampledSignal& u0,
                      int iterations, const IlcOptions& options, DisturbanceGenerator* disturbance) {
    if (static_cast<int>(yd.size()) != plant.q) {
        throw DimensionError("ilc_run: trajectory has the wrong number of channels");
    }
    if (u0.channels() != plant.p) {
        throw DimensionError("ilc_run: initial input has the wrong number of channels");
    }
    if (gain.outputs() != plant.p || gain.inputs() != plant.q) {
        throw DimensionError("ilc_run: gain must be p x q");
    }
    if (iterations < 0) {
        throw Error("ilc_run: negative iteration count");
    }
    const Grid& grid = u0.grid();
    IlcRunReport report(grid, plant.p, plant.q);
    report.condition = check_convergence_condition(plant, gain);
    report.lambda = lambda_star(plant, gain, grid);
    const double lambda = options.lambda.value_or(report.lambda.lambda);
    if (options.lambda) {
        report.lambda.lambda = *options.lambda;
    }

    const SampledSignal yd_s = expr_sample(yd, grid);
    const SampledSignal yd_dot = expr_sample(expr_derivative(yd), grid);
    report.scale = std::max(1.0, sup_norm(yd_s));
    const PlantOutput free = exogenous_response(plant, grid);

    auto simulate = [&](const SampledSignal& u) -> PlantOutput {
        PlantOutput out = input_response(plant, u);
        out.y = out.y + free.y;
        out.ydot = out.ydot + free.ydot;
        if (disturbance) {
            const DisturbanceSample d = disturbance->next();
            const PlantOutput extra = exogenous_response(plant, d.theta, d.thetahat);
            out.y = out.y + extra.y;
            out.ydot = out.ydot + extra.ydot;
        }
        return out;
    };
    auto wants_snapshot = [&](int k) {
        return std::find(options.snapshots.begin(), options.snapshots.end(), k) != options.snapshots.end();
    };

    SampledSignal u = u0;
    double initial_error = -1.0;
    auto guard = [&](double sup_error, int k) {
        if (initial_error < 0.0) initial_error = sup_error;
        const double limit = options.divergence_factor * std::max(initial_error, 1e-9 * report.scale);
        if (!std::isfinite(sup_error) || sup_error > limit) {
            report.iterations = k;
            report.final_sup_error = sup_error;
            char msg[160];
            std::snprintf(msg, sizeof msg, "ilc_run: sup error %.6g exceeds %g times its initial value at iteration %d",
                          sup_error, options.divergence_factor, k);
            throw DivergenceError(msg, std::move(report));
        }
    };

    for (int k = 0; k <= iterations; ++k) {
        PlantOutput out = [&] {
            try {
                return simulate(u);
            } catch (const DivergenceError&) {
                throw;
            } catch (const Error& e) {
                report.iterations = k;
                throw DivergenceError(std::string("ilc_run: simulation failed: ") + e.what(), std::move(report));
            }
        }();
        const SampledSignal e = yd_s - out.y;
        const double sup_error = sup_norm(e);
        guard(sup_error, k);
        if (wants_snapshot(k)) {
            report.snapshots.push_back({k, u, out.y, e});
        }
        if (k == iterations) {
            report.u_final = u;
            report.y_final = out.y;
            report.e_final = e;
            report.final_sup_error = sup_error;
            break;
        }
        const SampledSignal edot =
            options.derivative == DerivativeMode::state ? yd_dot - out.ydot : yd_dot - finite_diff(out.y);
        const Eigen::VectorXd e0 = e.at(0);
        IlcRecord rec;
        rec.k = k;
        rec.sup_error = sup_error;
        rec.impulse_norm = (gain.gamma0 * e0).cwiseAbs().maxCoeff();
        rec.impulsive = rec.impulse_norm > 1e-6 * report.scale;
        report.impulsive_update_required = report.impulsive_update_required || rec.impulsive;
        // Gamma0 e' + gammahat * e' + Phi_gammahat(t) e(0); the impulse is dropped.
        const SampledSignal du = lsim(gain.filter, edot, std::nullopt, gain.filter.B * e0);
        rec.lambda_delta_u = lambda_norm(du, lambda);
        report.records.push_back(rec);
        if (options.keep_delta_u) {
            report.delta_u.push_back(du);
        }
        u = u + du;
        report.iterations = k + 1;
    }
    std::vector<double> norms;
    for (const IlcRecord& r : report.records) norms.push_back(r.lambda_delta_u);
    report.fitted_ratio = fcs_diagnostic(norms, (report.lambda.rho1 + 1.0) / 2.0).fitted_rho;
    return report;
}

}  // namespace

IlcRunReport ilc_run(const Plant& plant, const GainOperator& gain, const SignalVector& yd, const SampledSignal& u0,
                     int iterations, const IlcOptions& options) {
    return run_core(plant, gain, yd, u0, iterations, options, nullptr);
}

DisturbanceGenerator::DisturbanceGenerator(const DisturbanceModel& model, int channels, const Grid& grid)
    : model_(model), channels_(channels), grid_(grid), rng_(model.seed) {
    if (model.beta_theta < 0.0 || model.beta_thetahat < 0.0) {
        throw Error("disturbance bounds must be nonnegative");
    }
}

DisturbanceSample DisturbanceGenerator::next() {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> amp(0.0, 1.0);
    std::uniform_real_distribution<double> freq(0.5, 5.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    DisturbanceSample s{Eigen::VectorXd(channels_), SampledSignal::zeros(grid_, channels_)};
    for (int j = 0; j < channels_; ++j) {
        s.theta(j) = model_.beta_theta * unit(rng_);
    }
    for (int j = 0; j < channels_; ++j) {
        const double a = model_.beta_thetahat * amp(rng_);
        const double w = freq(rng_);
        const double ph = phase(rng_);
        for (int i = 0; i < grid_.nodes(); ++i) {
            s.thetahat.values()(i, j) = a * std::sin(w * grid_.t(i) + ph);
        }
    }
    return s;
}

IlcRunReport robustness_run(const Plant& plant, const GainOperator& gain, const SignalVector& yd,
                            const SampledSignal& u0, int iterations, const DisturbanceModel& model,
                            const IlcOptions& options) {
    DisturbanceGenerator gen(model, plant.m, u0.grid());
    IlcRunReport report = run_core(plant, gain, yd, u0, iterations, options, &gen);
    const int n = static_cast<int>(report.records.size());
    const int window = std::max(1, static_cast<int>(std::ceil(0.2 * n)));
    double est = n == 0 ? report.final_sup_error : 0.0;
    for (int k = std::max(0, n - window); k < n; ++k) {
        est = std::max(est, report.records[k].sup_error);
    }
    report.limsup_estimate = est;
    return report;
}

LimitPrediction predict_limit_underactuated(const Plant& plant, const GainOperator& gain, const SignalVector& yd) {
    if (!plant.underactuated()) {
        throw DimensionError("predict_limit_underactuated: requires q >= p");
    }
    require_conditions(plant, gain);
    const Evaluator r = reference_evaluator(plant, yd);
    RationalMatrix g1 = plant.g1;
    GainOperator gn = gain;
    LimitPrediction out;
    out.u_inf = [g1, gn, r](Complex s) -> Eigen::VectorXcd {
        const Eigen::MatrixXcd gam = gn.eval(s);
        return solve_pointwise(gam * g1.eval(s), gam * r(s)).col(0);
    };
    out.e_inf = [g1, gn, r](Complex s) -> Eigen::VectorXcd {
        const Eigen::MatrixXcd gam = gn.eval(s);
        const Eigen::MatrixXcd g = g1.eval(s);
        const Eigen::VectorXcd rs = r(s);
        return rs - g * solve_pointwise(gam * g, gam * rs).col(0);
    };
    return out;
}

Evaluator predict_limit_overactuated(const Plant& plant, const GainOperator& gain, const SignalVector& yd,
                                     const SignalVector& u0) {
    if (plant.q > plant.p) {
        throw DimensionError("predict_limit_overactuated: requires q <= p");
    }
    if (static_cast<int>(u0.size()) != plant.p) {
        throw DimensionError("predict_limit_overactuated: initial input has the wrong number of channels");
    }
    require_conditions(plant, gain);
    const Evaluator r = reference_evaluator(plant, yd);
    RationalMatrix u0t = laplace_transform(u0);
    RationalMatrix g1 = plant.g1;
    GainOperator gn = gain;
    const std::vector<int> perm = plant.permutation;
    const int q = plant.q;
    const int p = plant.p;
    return [g1, gn, r, u0t, perm, q, p](Complex s) -> Eigen::VectorXcd {
        const int f = p - q;
        const Eigen::MatrixXcd g = permute_cols(g1.eval(s), perm);
        const Eigen::MatrixXcd gam = permute_rows(gn.eval(s), perm);
        const Eigen::MatrixXcd g11 = g.leftCols(q);
        const Eigen::MatrixXcd g12 = g.rightCols(f);
        const Eigen::MatrixXcd gam1 = gam.topRows(q);
        const Eigen::MatrixXcd gam2 = gam.bottomRows(f);
        const Eigen::MatrixXcd w = solve_pointwise(g11 * gam1 + g12 * gam2, Eigen::MatrixXcd::Identity(q, q));
        Eigen::MatrixXcd tilde(p, p);
        tilde.topLeftCorner(q, q) = Eigen::MatrixXcd::Identity(q, q) - gam1 * w * g11;
        tilde.topRightCorner(q, f) = -gam1 * w * g12;
        tilde.bottomLeftCorner(f, q) = -gam2 * w * g11;
        tilde.bottomRightCorner(f, f) = Eigen::MatrixXcd::Identity(f, f) - gam2 * w * g12;
        const Eigen::VectorXcd u0s = permute_rows(u0t.eval(s), perm).col(0);
        const Eigen::VectorXcd up = gam * (w * r(s)) + tilde * u0s;
        Eigen::VectorXcd u(p);
        for (int k = 0; k < p; ++k) u(perm[k]) = up(k);
        return u;
    };
}

LimitSignals limit_signals_underactuated(const Plant& plant, const GainOperator& gain, const SignalVector& yd,
                                         const Grid& grid) {
    if (!plant.underactuated()) {
        throw DimensionError("limit_signals_underactuated: requires q >= p");
    }
    require_conditions(plant, gain);
    const PlantOutput free = exogenous_response(plant, grid);
    const SampledSignal r = expr_sample(yd, grid) - free.y;
    if (r.at(0).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + sup_norm(r))) {
        throw Error("limit_signals_underactuated: initial condition fails; the limit contains an impulse");
    }
    const SampledSignal rdot = expr_sample(expr_derivative(yd), grid) - free.ydot;
    // U = (Gamma G1)^{-1} (gamma0 + gammahat) L[r']
    const StateSpace m = ss_series(ss_times_s(plant.g1_ss), gain.filter);
    const StateSpace sys = ss_series(gain.filter, ss_inverse(m));
    const SampledSignal u = lsim(sys, rdot, std::nullopt, Eigen::VectorXd::Zero(sys.states()));
    const SampledSignal e = r - input_response(plant, u).y;
    return {u, e};
}

LimitSignals limit_signals_overactuated(const Plant& plant, const GainOperator& gain, const SignalVector& yd,
                                        const SampledSignal& u0) {
    if (plant.q > plant.p) {
        throw DimensionError("limit_signals_overactuated: requires q <= p");
    }
    require_conditions(plant, gain);
    const Grid& grid = u0.grid();
    const PlantOutput free = exogenous_response(plant, grid);
    const PlantOutput from_u0 = input_response(plant, u0);
    const SampledSignal v = expr_sample(yd, grid) - free.y - from_u0.y;
    if (v.at(0).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + sup_norm(v))) {
        throw Error("limit_signals_overactuated: initial condition fails; the limit contains an impulse");
    }
    const SampledSignal vdot = expr_sample(expr_derivative(yd), grid) - free.ydot - from_u0.ydot;
    // U = U0 + (gamma0 + gammahat) (G1 Gamma)^{-1} L[v']
    const StateSpace n = ss_series(gain.filter, ss_times_s(plant.g1_ss));
    const StateSpace sys = ss_series(ss_inverse(n), gain.filter);
    const SampledSignal u = u0 + lsim(sys, vdot, std::nullopt, Eigen::VectorXd::Zero(sys.states()));
    const SampledSignal e = expr_sample(yd, grid) - free.y - input_response(plant, u).y;
    return {u, e};
}

FcsDiagnostic fcs_diagnostic(const std::vector<double>& norms, double rho_bound, double floor) {
    FcsDiagnostic d;
    d.rho_bound = rho_bound;
    double peak = 0.0;
    for (double v : norms) peak = std::max(peak, v);
    if (peak <= floor) {
        d.degenerate = true;
        d.is_contractive = true;
        return d;
    }
    const double cut = std::max(floor, 1e-9 * peak);
    for (size_t k = 0; k + 1 < norms.size(); ++k) {
        if (norms[k] > cut && norms[k + 1] > cut) {
            d.ratios.push_back(norms[k + 1] / norms[k]);
        }
    }
    if (d.ratios.empty()) {
        d.degenerate = true;
        d.is_contractive = true;
        return d;
    }
    const size_t late = std::max<size_t>(1, d.ratios.size() / 2);
    d.late_count = static_cast<int>(late);
    double log_sum = 0.0;
    bool within = true;
    for (size_t k = d.ratios.size() - late; k < d.ratios.size(); ++k) {
        log_sum += std::log(d.ratios[k]);
        within = within && d.ratios[k] <= rho_bound + 0.05;
    }
    d.fitted_rho = std::exp(log_sum / static_cast<double>(late));
    d.is_contractive = d.fitted_rho < 1.0 && within;
    return d;
}

FcsDiagnostic fcs_diagnostic(const IlcRunReport& report, double lambda) {
    if (report.delta_u.size() != report.records.size()) {
        throw Error("fcs_diagnostic: report was produced without input increments");
    }
    std::vector<double> norms;
    double u_scale = 1.0;
    for (const SampledSignal& du : report.delta_u) {
        norms.push_back(lambda_norm(du, lambda));
    }
    u_scale = std::max(u_scale, sup_norm(report.u_final));
    return fcs_diagnostic(norms, (report.lambda.rho1 + 1.0) / 2.0, 1e-8 * u_scale);
}

}  // namespace ilct

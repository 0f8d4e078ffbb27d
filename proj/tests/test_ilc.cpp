#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "ilct/builtin_data.hpp"
#include "ilct/ilc.hpp"
#include "ilct/simulate.hpp"

using namespace ilct;

namespace {

const Grid kGrid(10.0, 2001);

Plant example1() { return make_plant(builtin::example1_g1(), builtin::example1_g2(), ExogenousInput::zero(3)); }
Plant example2() { return make_plant(builtin::example2_g1(), builtin::example2_g2(), ExogenousInput::zero(3)); }

Eigen::MatrixXd phi1_example1() {
    Eigen::MatrixXd m(3, 2);
    m << 1.2, 1.2, 1.11, 1.11, 0.5, 1.22;
    return m;
}

Eigen::MatrixXd phi1_example2() {
    Eigen::MatrixXd m(2, 3);
    m << 1.2, 1.11, 0.5, 1.2, 1.11, 1.22;
    return m;
}

RationalMatrix s_times(const Eigen::MatrixXd& k) { return rm_times_s(RationalMatrix::constant(k)); }

SampledSignal constant_input(const Eigen::VectorXd& v) { return SampledSignal::constant(kGrid, v); }

Plant dtype_plant() {
    Eigen::MatrixXd a(3, 3), b(3, 2), c(2, 3);
    a << -1, 1, 0, 0, -2, 1, 0, 0, -3;
    b << 1, 0, 0, 1, 1, 1;
    c << 1, 0, 0, 0, 1, 0;
    return statespace_plant(a, b, c, Eigen::Vector3d(0.5, 0.0, 0.0), SignalVector(3));
}

const SignalVector kDtypeYd{SignalExpr::cos(0.5, 1.0), SignalExpr::sin(1.0, 1.0)};

}  // namespace

TEST_CASE("gain validation") {
    Eigen::MatrixXd ups(2, 3);
    ups << 1, 2, 3, 4, 5, 6;
    const GainOperator d = validate_gain(s_times(ups));
    CHECK(d.gamma0 == ups);
    CHECK(d.dtype());
    CHECK_THROWS_AS(validate_gain(RationalMatrix::constant(ups)), ConditionError);
    CHECK_THROWS_AS(validate_gain(rm_times_s(s_times(ups))), ConditionError);

    const Plant p = example1();
    const GainOperator g = validate_gain(s_times(builtin::example1_gain()), &p);
    CHECK((g.gamma0 - builtin::example1_gain()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(rm_classify(g.gammahat).kind == Properness::strictly_proper);
    CHECK(g.gammahat.eval(Complex(1, 1)).cwiseAbs().maxCoeff() == 0.0);

    // Gamma(s) = s (1 + 1/(s+2)) = s (s+3)/(s+2)
    const RationalMatrix dyn(1, 1, {normalized({0, 3, 1}, {2, 1})});
    const GainOperator h = validate_gain(dyn);
    CHECK(h.gamma0(0, 0) == doctest::Approx(1.0));
    CHECK_FALSE(h.dtype());
    CHECK(std::abs(h.gammahat.eval(Complex(0.0, 1.0))(0, 0) - 1.0 / Complex(2.0, 1.0)) < 1e-14);
    CHECK(std::abs(h.eval(Complex(1.0, 0.0))(0, 0) - 4.0 / 3.0) < 1e-14);

    CHECK_THROWS_AS(dtype_gain(Eigen::MatrixXd::Zero(2, 2)), ConditionError);
    CHECK_THROWS_AS(validate_gain(s_times(ups.transpose()), &p), DimensionError);
}

TEST_CASE("spectral radius certificates") {
    const Plant p1 = example1();
    const ConvergenceCheck c1 = check_convergence_condition(p1, dtype_gain(builtin::example1_gain()));
    const Eigen::MatrixXd m1 = Eigen::MatrixXd::Identity(2, 2) - builtin::example1_gain() * phi1_example1();
    CHECK(c1.side == ConditionSide::input_side);
    CHECK(c1.rho == doctest::Approx(m1.eigenvalues().cwiseAbs().maxCoeff()).epsilon(1e-12));
    CHECK(std::abs(c1.rho - 0.100) <= 0.005);
    CHECK(c1.satisfied);

    const Plant p2 = example2();
    const ConvergenceCheck c2 = check_convergence_condition(p2, dtype_gain(builtin::example2_gain()));
    const Eigen::MatrixXd m2 = Eigen::MatrixXd::Identity(2, 2) - phi1_example2() * builtin::example2_gain();
    CHECK(c2.side == ConditionSide::output_side);
    CHECK(c2.rho == doctest::Approx(m2.eigenvalues().cwiseAbs().maxCoeff()).epsilon(1e-12));
    CHECK(std::abs(c2.rho - 0.666) <= 0.005);

    const Eigen::MatrixXd pinv = phi1_example1().completeOrthogonalDecomposition().pseudoInverse();
    CHECK(check_convergence_condition(p1, dtype_gain(0.5 * pinv)).rho == doctest::Approx(0.5));
}

TEST_CASE("D-type boundary cases on a scalar plant") {
    const Plant s = statespace_plant(Eigen::MatrixXd::Constant(1, 1, -1.0), Eigen::MatrixXd::Ones(1, 1),
                                     Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1), SignalVector(1));
    CHECK(check_convergence_condition(s, dtype_gain(Eigen::MatrixXd::Ones(1, 1))).rho == doctest::Approx(0.0));
    const ConvergenceCheck b = check_convergence_condition(s, dtype_gain(Eigen::MatrixXd::Constant(1, 1, 2.0)));
    CHECK(b.rho == doctest::Approx(1.0));
    CHECK_FALSE(b.satisfied);
}

TEST_CASE("lambda star matches an independent impulse-response bound") {
    const Plant p = example1();
    const GainOperator g = dtype_gain(builtin::example1_gain());
    const LambdaStar ls = lambda_star(p, g, kGrid);
    const Eigen::MatrixXd df = Eigen::MatrixXd::Identity(2, 2) - builtin::example1_gain() * phi1_example1();
    CHECK(ls.rho1 == doctest::Approx(df.cwiseAbs().rowwise().sum().maxCoeff()).epsilon(1e-9));
    // Dynamic part of I - gamma0 s G1 is -gamma0 C A e^{At} B.
    const StateSpace& r = p.g1_ss;
    double beta = 0.0;
    for (int i = 0; i < kGrid.nodes(); i += 5) {
        const Eigen::MatrixXd at = (r.A * kGrid.t(i)).exp();
        const Eigen::MatrixXd h = -builtin::example1_gain() * r.C * r.A * at * r.B;
        beta = std::max(beta, h.cwiseAbs().rowwise().sum().maxCoeff());
    }
    CHECK(ls.beta_f == doctest::Approx(beta).epsilon(1e-3));
    CHECK(ls.lambda == doctest::Approx(2.0 * ls.beta_f / (1.0 - ls.rho1)));
    CHECK_FALSE(ls.fallback);
}

TEST_CASE("zero error leaves the input unchanged") {
    const Plant p = example1();
    const SignalVector zero(3);
    const SampledSignal u0 = SampledSignal::zeros(kGrid, 2);
    const IlcRunReport r = ilc_run(p, dtype_gain(builtin::example1_gain()), zero, u0, 3);
    REQUIRE(r.records.size() == 3u);
    for (const SampledSignal& du : r.delta_u) CHECK(sup_norm(du) <= 1e-12);
    CHECK(sup_norm(r.u_final - u0) <= 1e-12);
    CHECK(fcs_diagnostic(r, 1.0).degenerate);
}

TEST_CASE("starting at the limit input is a fixed point") {
    const Plant p = example1();
    const GainOperator g = dtype_gain(builtin::example1_gain());
    const SignalVector yd = builtin::example1_yd('a');
    const LimitSignals lim = limit_signals_underactuated(p, g, yd, kGrid);
    const IlcRunReport r = ilc_run(p, g, yd, lim.u_inf, 5);
    for (const IlcRecord& rec : r.records) CHECK(rec.sup_error <= 1e-5);
    CHECK(sup_norm(r.u_final - lim.u_inf) <= 1e-4);
}

TEST_CASE("example1 runs") {
    const Plant p = example1();
    const GainOperator g = validate_gain(s_times(builtin::example1_gain()), &p);
    const IlcRunReport a = ilc_run(p, g, builtin::example1_yd('a'), constant_input(builtin::example1_u0('a')), 100);
    const IlcRunReport b = ilc_run(p, g, builtin::example1_yd('b'), constant_input(builtin::example1_u0('b')), 100);
    CHECK(a.records.size() == 100u);
    CHECK(a.iterations == 100);
    CHECK(a.final_sup_error <= 1e-2 * a.scale);
    CHECK(b.final_sup_error <= 1e-2 * b.scale);
    CHECK(a.fitted_ratio < 1.0);
    CHECK_FALSE(a.impulsive_update_required);
    CHECK(sup_norm(a.u_final - b.u_final) <= 2e-2 * a.scale);

    const SignalVector yc = builtin::example1_yd('c');
    const IlcRunReport c = ilc_run(p, g, yc, constant_input(builtin::example1_u0('c')), 100);
    CHECK(c.final_sup_error > 0.1);
    CHECK(c.records.back().lambda_delta_u < 1e-10 * c.records.front().lambda_delta_u);
    const LimitSignals lim = limit_signals_underactuated(p, g, yc, kGrid);
    CHECK(sup_norm(lim.e_inf - c.e_final) <= 2e-2);
    CHECK(sup_norm(lim.u_inf - c.u_final) <= 2e-2 * c.scale);
}

TEST_CASE("finite-difference derivative mode still converges") {
    const Plant p = example1();
    IlcOptions opt;
    opt.derivative = DerivativeMode::finite_diff;
    const IlcRunReport r = ilc_run(p, dtype_gain(builtin::example1_gain()), builtin::example1_yd('a'),
                                   SampledSignal::zeros(kGrid, 2), 100, opt);
    CHECK(r.final_sup_error <= 1e-2 * r.scale);
    const IlcRunReport rs = ilc_run(p, dtype_gain(builtin::example1_gain()), builtin::example1_yd('a'),
                                    SampledSignal::zeros(kGrid, 2), 100);
    // Differentiating samples leaves an O(h^2) bias that the state derivative avoids.
    CHECK(rs.final_sup_error < r.final_sup_error);
    CHECK(sup_norm(r.u_final - rs.u_final) <= 1e-2 * r.scale);
}

TEST_CASE("K = 0 simulates once without updates") {
    const Plant p = example1();
    IlcOptions opt;
    opt.snapshots = {0};
    const IlcRunReport r =
        ilc_run(p, dtype_gain(builtin::example1_gain()), builtin::example1_yd('a'), SampledSignal::zeros(kGrid, 2), 0, opt);
    CHECK(r.records.empty());
    REQUIRE(r.snapshots.size() == 1u);
    CHECK(r.final_sup_error == doctest::Approx(sup_norm(expr_sample(builtin::example1_yd('a'), kGrid))));
}

TEST_CASE("time-domain update agrees with the frequency-domain update") {
    const Plant p = example1();
    // Gamma(s) = s gamma0 (1 + 0.5/(s+2))
    const Eigen::MatrixXd g0 = builtin::example1_gain();
    std::vector<RationalEntry> e;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 3; ++j) e.push_back(normalized(Poly{0, 2.5, 1}.scaled(g0(i, j)), Poly{2, 1}));
    }
    const GainOperator g = validate_gain(RationalMatrix(2, 3, e), &p);
    const SignalVector yd = builtin::example1_yd('a');
    const IlcRunReport r = ilc_run(p, g, yd, SampledSignal::zeros(kGrid, 2), 1);
    // Delta U = Gamma Y_d: gamma0 y_d' plus the inverse transform of gammahat s Y_d.
    const RationalMatrix dyn = rm_mul(g.gammahat, rm_times_s(laplace_transform(yd)));
    const StateSpace ss = realize(dyn);
    const auto h = impulse_response(ss, kGrid);
    const SampledSignal ydot = expr_sample(expr_derivative(yd), kGrid);
    double worst = 0.0;
    for (int i = 0; i < kGrid.nodes(); ++i) {
        const Eigen::VectorXd want = g0 * ydot.at(i) + h[i].col(0);
        worst = std::max(worst, (r.delta_u[0].at(i) - want).cwiseAbs().maxCoeff());
    }
    CHECK(worst <= 1e-4 * r.scale);

    const IlcRunReport full = ilc_run(p, g, yd, SampledSignal::zeros(kGrid, 2), 100);
    CHECK(full.final_sup_error <= 1e-2 * full.scale);
}

TEST_CASE("underactuated limit prediction") {
    const Plant p = example1();
    const GainOperator g = dtype_gain(builtin::example1_gain());
    const SignalVector ya = builtin::example1_yd('a');
    const LimitPrediction lp = predict_limit_underactuated(p, g, ya);
    const Evaluator ud = desired_input_underactuated(p, ya);
    for (const Complex s : plant_probes(p, ya, 12)) {
        CHECK(lp.e_inf(s).cwiseAbs().maxCoeff() <= 1e-7);
        CHECK((lp.u_inf(s) - ud(s)).cwiseAbs().maxCoeff() <= 1e-7 * (1.0 + ud(s).cwiseAbs().maxCoeff()));
    }
    const LimitPrediction zero = predict_limit_underactuated(p, g, SignalVector(3));
    CHECK(zero.u_inf(Complex(1, 2)).cwiseAbs().maxCoeff() == 0.0);
    CHECK(zero.e_inf(Complex(1, 2)).cwiseAbs().maxCoeff() == 0.0);
    const LimitPrediction c = predict_limit_underactuated(p, g, builtin::example1_yd('c'));
    double worst = 0.0;
    for (const Complex s : plant_probes(p, ya, 12)) worst = std::max(worst, c.e_inf(s).cwiseAbs().maxCoeff());
    CHECK(worst > 1e-4);
    CHECK_THROWS_AS(predict_limit_underactuated(p, dtype_gain(-builtin::example1_gain()), ya), ConditionError);
}

TEST_CASE("overactuated limit prediction") {
    const Plant p = example2();
    const GainOperator g = dtype_gain(builtin::example2_gain());
    const SignalVector yd = builtin::example2_yd();
    const SignalVector u0d{SignalExpr(), SignalExpr(), SignalExpr()};
    const SignalVector u0e{SignalExpr::constant(10.0), SignalExpr::constant(-10.0), SignalExpr::constant(5.0)};
    const Evaluator ud = predict_limit_overactuated(p, g, yd, u0d);
    const Evaluator ue = predict_limit_overactuated(p, g, yd, u0e);
    const Evaluator r = reference_evaluator(p, yd);
    const auto probes = plant_probes(p, yd, 12);
    CHECK(membership_residual(p, ud, r, probes) <= 1e-7);
    CHECK(membership_residual(p, ue, r, probes) <= 1e-7);
    double diff = 0.0;
    for (const Complex s : probes) {
        diff = std::max(diff, (ud(s) - ue(s)).cwiseAbs().maxCoeff());
        // Direct form: Gamma W R + (I - Gamma W G1) U0 with W = (G1 Gamma)^{-1}
        const Eigen::MatrixXcd gam = g.eval(s);
        const Eigen::MatrixXcd g1 = p.g1.eval(s);
        const Eigen::MatrixXcd w = (g1 * gam).inverse();
        const Eigen::VectorXcd u0s = laplace_transform(u0e).eval(s).col(0);
        const Eigen::VectorXcd direct = gam * w * r(s) + (Eigen::MatrixXcd::Identity(3, 3) - gam * w * g1) * u0s;
        CHECK((ue(s) - direct).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + direct.cwiseAbs().maxCoeff()));
        CHECK((ud(s) - gam * w * r(s)).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + ud(s).cwiseAbs().maxCoeff()));
    }
    CHECK(diff > 1e-3);
}

TEST_CASE("example2 runs depend on the initial input") {
    const Plant p = example2();
    const GainOperator g = validate_gain(s_times(builtin::example2_gain()), &p);
    const SignalVector yd = builtin::example2_yd();
    const SampledSignal u0d = constant_input(builtin::example2_u0('d'));
    const SampledSignal u0e = constant_input(builtin::example2_u0('e'));
    const IlcRunReport d = ilc_run(p, g, yd, u0d, 200);
    const IlcRunReport e = ilc_run(p, g, yd, u0e, 200);
    CHECK(d.final_sup_error <= 1e-2 * d.scale);
    CHECK(e.final_sup_error <= 1e-2 * e.scale);
    CHECK(sup_norm(d.u_final - e.u_final) > 0.2);
    CHECK(sup_norm(limit_signals_overactuated(p, g, yd, u0d).u_inf - d.u_final) <= 2e-2);
    CHECK(sup_norm(limit_signals_overactuated(p, g, yd, u0e).u_inf - e.u_final) <= 2e-2);
}

TEST_CASE("contraction diagnostics") {
    std::vector<double> geo;
    for (int k = 0; k < 20; ++k) geo.push_back(std::pow(0.5, k));
    const FcsDiagnostic d = fcs_diagnostic(geo, 0.75);
    CHECK(d.fitted_rho == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(d.is_contractive);
    CHECK(fcs_diagnostic(std::vector<double>(6, 0.0), 0.5).degenerate);
    std::vector<double> grow;
    for (int k = 0; k < 10; ++k) grow.push_back(std::pow(1.1, k));
    CHECK_FALSE(fcs_diagnostic(grow, 0.5).is_contractive);

    const Plant p = example1();
    const GainOperator g = dtype_gain(builtin::example1_gain());
    const IlcRunReport r = ilc_run(p, g, builtin::example1_yd('a'), SampledSignal::zeros(kGrid, 2), 100);
    const double ls = r.lambda.lambda;
    for (double lam : {ls, 2 * ls, 4 * ls}) {
        const FcsDiagnostic f = fcs_diagnostic(r, lam);
        CHECK(f.is_contractive);
        CHECK(f.fitted_rho < 1.0);
    }
}

TEST_CASE("D-type state-space scenario") {
    const Plant p = dtype_plant();
    const IlcRunReport ok = ilc_run(p, dtype_gain(0.8 * Eigen::MatrixXd::Identity(2, 2)), kDtypeYd,
                                    SampledSignal::zeros(kGrid, 2), 150);
    CHECK(ok.condition.rho == doctest::Approx(0.2));
    CHECK(ok.final_sup_error <= 1e-2 * ok.scale);
    CHECK_THROWS_AS(ilc_run(p, dtype_gain(2.5 * Eigen::MatrixXd::Identity(2, 2)), kDtypeYd,
                            SampledSignal::zeros(kGrid, 2), 150),
                    DivergenceError);
    try {
        ilc_run(p, dtype_gain(2.5 * Eigen::MatrixXd::Identity(2, 2)), kDtypeYd, SampledSignal::zeros(kGrid, 2), 150);
    } catch (const DivergenceError& e) {
        CHECK(e.partial().records.size() > 2u);
        CHECK_FALSE(e.partial().condition.satisfied);
    }
}

TEST_CASE("misaligned initial output raises the impulsive flag") {
    const Plant p = dtype_plant();
    const SignalVector off{SignalExpr::cos(1.0, 1.0), SignalExpr::sin(1.0, 1.0)};
    const IlcRunReport r =
        ilc_run(p, dtype_gain(0.8 * Eigen::MatrixXd::Identity(2, 2)), off, SampledSignal::zeros(kGrid, 2), 5);
    CHECK(r.impulsive_update_required);
    CHECK(r.records[0].impulsive);
    CHECK(r.records[0].impulse_norm == doctest::Approx(0.4));
}

TEST_CASE("disturbance generator respects its bounds") {
    DisturbanceGenerator gen({0.3, 0.2, 9}, 3, kGrid);
    for (int k = 0; k < 10; ++k) {
        const DisturbanceSample s = gen.next();
        CHECK(s.theta.cwiseAbs().maxCoeff() <= 0.3);
        CHECK(sup_norm(s.thetahat) <= 0.2);
    }
}

TEST_CASE("robustness runs") {
    const Plant p = example1();
    const GainOperator g = dtype_gain(builtin::example1_gain());
    const SignalVector yd = builtin::example1_yd('a');
    const SampledSignal u0 = SampledSignal::zeros(kGrid, 2);
    const IlcRunReport base = ilc_run(p, g, yd, u0, 100);
    const IlcRunReport zero = robustness_run(p, g, yd, u0, 100, {0.0, 0.0, 4});
    CHECK(sup_norm(zero.u_final - base.u_final) <= 1e-12);
    CHECK(std::abs(zero.final_sup_error - base.final_sup_error) <= 1e-12);
    REQUIRE(zero.limsup_estimate.has_value());
    CHECK(*zero.limsup_estimate <= 1e-2 * zero.scale);

    std::vector<double> est;
    for (double beta : {0.05, 0.1, 0.2}) {
        est.push_back(*robustness_run(p, g, yd, u0, 100, {0.0, beta, 4}).limsup_estimate);
    }
    CHECK(est[0] > 0.0);
    CHECK(est[0] <= est[1]);
    CHECK(est[1] <= est[2]);
    CHECK(est[1] < 10.0 * est[0]);
    CHECK(est[2] <= 4.0 * est[1]);
}

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "ilct/commands.hpp"
#include "ilct/ilc.hpp"
#include "ilct/scenario.hpp"
#include "ilct/simulate.hpp"
#include "ilct/trackability.hpp"

using namespace ilct;
namespace fs = std::filesystem;

namespace {

// Tolerances, fixed here and nowhere else.
constexpr double kTriageTrackable = 1e-7;
constexpr double kTriageUntrackable = 1e-3;
constexpr double kTriageSeconds = 5.0;
constexpr double kFinalErrorRel = 1e-2;
constexpr double kInputAgreement = 2e-2;
constexpr double kCaseSeconds = 120.0;
constexpr double kPlateauMatch = 2e-2;
constexpr double kPlateauFloor = 1e-3;
constexpr double kIncrementDecay = 1e-6;
constexpr double kInputDifference = 0.2;
constexpr double kMembership = 1e-7;
constexpr double kLimitMatch = 2e-2;
constexpr double kRhoExample1 = 0.100;
constexpr double kRhoExample2 = 0.666;
constexpr double kRhoTol = 0.005;
constexpr double kMarkovProbe = 1e8;
constexpr int kFormulaProbes = 20;
constexpr double kFormulaResidual = 1e-7;
constexpr double kProjectorTol = 1e-8;
constexpr double kRatioSlack = 0.05;
constexpr int kDtypeIterations = 150;
constexpr double kRealizationTol = 1e-6;
constexpr double kLsimOrder = 3.5;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        pass = pass && ok;
        if (detail.tellp() > 0) detail << "; ";
        detail << (ok ? "" : "[x] ") << what;
    }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

IlcRunReport run(const Scenario& s, const CaseDef& c, const IlcOptions& opt = {}) {
    IlcOptions o = opt;
    if (!o.lambda) o.lambda = s.lambda;
    return ilc_run(s.plant, s.gain, c.yd, expr_sample(c.u0, s.grid()), s.iterations, o);
}

double late_max_ratio(const FcsDiagnostic& f) {
    if (f.ratios.empty()) return 0.0;
    return *std::max_element(f.ratios.end() - f.late_count, f.ratios.end());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void triage(Outcome& o) {
    const auto t0 = std::chrono::steady_clock::now();
    const Scenario s = builtin_scenario("example1");
    for (const char* name : {"a", "b"}) {
        const TrackabilityVerdict v = check_trackable(s.plant, s.find_case(name).yd);
        o.require(v.trackable && v.residual <= kTriageTrackable,
                  std::string(name) + " trackable, residual " + num(v.residual));
    }
    const TrackabilityVerdict c = check_trackable(s.plant, s.find_case("c").yd);
    o.require(!c.trackable && c.residual > kTriageUntrackable, "c untrackable, residual " + num(c.residual));
    const double secs = seconds_since(t0);
    o.require(secs < kTriageSeconds, "runtime " + num(secs) + " s");
}

void example1_convergence(Outcome& o) {
    const Scenario s = builtin_scenario("example1");
    o.require(s.iterations == 100 && s.grid().nodes() == 2001 && s.horizon == 10.0, "K=100, N=2001, T=10");
    std::vector<IlcRunReport> reports;
    for (const char* name : {"a", "b"}) {
        const auto t0 = std::chrono::steady_clock::now();
        IlcRunReport r = run(s, s.find_case(name));
        const double secs = seconds_since(t0);
        const FcsDiagnostic f = fcs_diagnostic(r, r.lambda.lambda);
        o.require(r.final_sup_error <= kFinalErrorRel * r.scale,
                  std::string(name) + " error " + num(r.final_sup_error) + " (scale " + num(r.scale) + ")");
        o.require(f.degenerate || f.fitted_rho < 1.0, std::string(name) + " fitted ratio " + num(f.fitted_rho));
        o.require(secs < kCaseSeconds, std::string(name) + " runtime " + num(secs) + " s");
        reports.push_back(std::move(r));
    }
    const double diff = sup_norm(reports[0].u_final - reports[1].u_final);
    o.require(diff <= kInputAgreement, "|u_a - u_b| " + num(diff));
}

void example1_plateau(Outcome& o) {
    const Scenario s = builtin_scenario("example1");
    const CaseDef& c = s.find_case("c");
    const IlcRunReport r = run(s, c);
    const double first = r.records.front().lambda_delta_u;
    const double last = r.records.back().lambda_delta_u;
    o.require(last <= kIncrementDecay * first, "increment decay " + num(last / first));
    o.require(r.final_sup_error > kPlateauFloor, "plateau " + num(r.final_sup_error));
    const LimitSignals lim = limit_signals_underactuated(s.plant, s.gain, c.yd, s.grid());
    const double match = sup_norm(lim.e_inf - r.e_final);
    o.require(match <= kPlateauMatch, "|e_k - e_inf| " + num(match));
}

void example2(Outcome& o) {
    const Scenario s = builtin_scenario("example2");
    o.require(s.iterations == 200, "K=200");
    std::vector<IlcRunReport> reports;
    for (const char* name : {"d", "e"}) {
        const CaseDef& c = s.find_case(name);
        IlcRunReport r = run(s, c);
        o.require(r.final_sup_error <= kFinalErrorRel * r.scale,
                  std::string(name) + " error " + num(r.final_sup_error));
        const Evaluator ui = predict_limit_overactuated(s.plant, s.gain, c.yd, c.u0);
        const auto probes = plant_probes(s.plant, c.yd, kTrackProbes, 99);
        const double res = membership_residual(s.plant, ui, reference_evaluator(s.plant, c.yd), probes);
        o.require(res <= kMembership, std::string(name) + " membership " + num(res));
        const LimitSignals lim = limit_signals_overactuated(s.plant, s.gain, c.yd, expr_sample(c.u0, s.grid()));
        const double match = sup_norm(lim.u_inf - r.u_final);
        o.require(match <= kLimitMatch, std::string(name) + " |u_k - u_inf| " + num(match));
        reports.push_back(std::move(r));
    }
    const double diff = sup_norm(reports[0].u_final - reports[1].u_final);
    o.require(diff > kInputDifference, "|u_d - u_e| " + num(diff));
}

// Phi1(0) as s G1(s) at a large real s, independent of the realization.
Eigen::MatrixXd markov_limit(const RationalMatrix& g1) {
    return (kMarkovProbe * g1.eval(Complex(kMarkovProbe, 0.0))).real();
}

double spectral_radius(const Eigen::MatrixXd& m) { return m.eigenvalues().cwiseAbs().maxCoeff(); }

void certificates(Outcome& o) {
    const Scenario e1 = builtin_scenario("example1");
    const Eigen::MatrixXd phi1 = markov_limit(e1.plant.g1);
    const Eigen::MatrixXd g1 = e1.gain.gamma0;
    const double r1 = spectral_radius(Eigen::MatrixXd::Identity(g1.rows(), g1.rows()) - g1 * phi1);
    o.require(std::abs(r1 - kRhoExample1) <= kRhoTol, "example1 rho " + num(r1));
    const Scenario e2 = builtin_scenario("example2");
    const Eigen::MatrixXd phi2 = markov_limit(e2.plant.g1);
    const Eigen::MatrixXd g2 = e2.gain.gamma0;
    const double r2 = spectral_radius(Eigen::MatrixXd::Identity(phi2.rows(), phi2.rows()) - phi2 * g2);
    o.require(std::abs(r2 - kRhoExample2) <= kRhoTol, "example2 rho " + num(r2));
}

void formula_property(Outcome& o) {
    const Scenario s = builtin_scenario("example1");
    const CaseDef& c = s.find_case("a");
    const Evaluator ud = desired_input_underactuated(s.plant, c.yd);
    const Evaluator ref = reference_evaluator(s.plant, c.yd);
    const auto probes = plant_probes(s.plant, c.yd, kFormulaProbes, 2024);
    const double res = membership_residual(s.plant, ud, ref, probes);
    o.require(res <= kFormulaResidual, "residual at 20 probes " + num(res));
    double idem = 0.0;
    double annihilate = 0.0;
    for (const Complex z : probes) {
        const Eigen::MatrixXcd p = projector(s.plant.g1, z);
        idem = std::max(idem, (p * p - p).cwiseAbs().maxCoeff());
        annihilate = std::max(annihilate, (p * s.plant.g1.eval(z)).cwiseAbs().maxCoeff());
    }
    o.require(idem <= kProjectorTol, "|P^2 - P| " + num(idem));
    o.require(annihilate <= kProjectorTol, "|P G1| " + num(annihilate));
}

void contraction(Outcome& o) {
    const std::pair<const char*, const char*> cases[] = {{"example1", "a"}, {"example2", "d"}};
    for (const auto& [scenario, name] : cases) {
        const Scenario s = builtin_scenario(scenario);
        const LambdaStar ls = lambda_star(s.plant, s.gain, s.grid());
        IlcOptions opt;
        opt.lambda = ls.lambda;
        const IlcRunReport r = run(s, s.find_case(name), opt);
        const FcsDiagnostic f = fcs_diagnostic(r, ls.lambda);
        const double bound = (ls.rho1 + 1.0) / 2.0 + kRatioSlack;
        const double worst = late_max_ratio(f);
        o.require(!ls.fallback && worst <= bound, std::string(scenario) + " lambda* " + num(ls.lambda) +
                                                      ", late ratio " + num(worst) + " <= " + num(bound));
    }
}

void dtype(Outcome& o) {
    const Scenario good = builtin_scenario("dtype");
    const ConvergenceCheck cg = check_convergence_condition(good.plant, good.gain);
    o.require(cg.rho < 1.0, "rho " + num(cg.rho));
    Scenario g = good;
    g.iterations = kDtypeIterations;
    const IlcRunReport r = run(g, g.cases.front());
    o.require(r.final_sup_error <= kFinalErrorRel * r.scale, "error " + num(r.final_sup_error));

    Scenario bad = builtin_scenario("dtype_divergent");
    const ConvergenceCheck cb = check_convergence_condition(bad.plant, bad.gain);
    o.require(cb.rho > 1.0, "scaled rho " + num(cb.rho));
    bad.iterations = kDtypeIterations;
    try {
        run(bad, bad.cases.front());
        o.require(false, "divergence guard not tripped");
    } catch (const DivergenceError& e) {
        o.require(true, "guard tripped at iteration " + std::to_string(e.partial().iterations));
    }
}

void robustness(Outcome& o) {
    const Scenario s = builtin_scenario("example1");
    const CaseDef& c = s.find_case("a");
    std::vector<double> est;
    const double betas[] = {0.0, 0.05, 0.1, 0.2};
    double scale = 1.0;
    for (const double b : betas) {
        DisturbanceModel m;
        m.beta_thetahat = b;
        m.seed = s.seed;
        IlcOptions opt;
        opt.lambda = s.lambda;
        const IlcRunReport r =
            robustness_run(s.plant, s.gain, c.yd, expr_sample(c.u0, s.grid()), s.iterations, m, opt);
        est.push_back(*r.limsup_estimate);
        scale = r.scale;
    }
    o.require(est[0] <= kFinalErrorRel * scale, "beta 0: " + num(est[0]));
    for (size_t i = 1; i < est.size(); ++i) {
        o.require(est[i] > 0.0, "beta " + num(betas[i]) + ": " + num(est[i]));
        o.require(est[i] >= est[i - 1], "nonincreasing as beta shrinks");
    }
}

double decay_error(int nodes) {
    const StateSpace lag{Eigen::MatrixXd::Constant(1, 1, -1.0), Eigen::MatrixXd::Ones(1, 1),
                         Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Zero(1, 1)};
    const Grid g(1.0, nodes);
    const SampledSignal y = lsim(lag, SampledSignal::zeros(g, 1), std::nullopt, Eigen::VectorXd::Ones(1));
    return std::abs(y.values()(nodes - 1, 0) - std::exp(-1.0));
}

void hygiene(Outcome& o) {
    double worst = 0.0;
    for (const std::string& name : builtin_names()) {
        const Scenario s = builtin_scenario(name);
        ProbeSampler sampler(s.seed + 3);
        sampler.avoid_poles_of(s.plant.g1);
        sampler.avoid_poles_of(s.plant.g2);
        const RationalMatrix gamma = s.gain.gamma();
        for (const Complex z : sampler.draw(12)) {
            const auto rel = [](const Eigen::MatrixXcd& got, const Eigen::MatrixXcd& want) {
                return (got - want).cwiseAbs().maxCoeff() / (1.0 + want.cwiseAbs().maxCoeff());
            };
            worst = std::max(worst, rel(s.plant.g1_ss.eval(z), s.plant.g1.eval(z)));
            worst = std::max(worst, rel(s.plant.g2_ss.eval(z), s.plant.g2.eval(z)));
            worst = std::max(worst, rel(z * s.gain.filter.eval(z), gamma.eval(z)));
        }
    }
    o.require(worst <= kRealizationTol, "realization probes " + num(worst));

    double order = 1e9;
    for (const int n : {11, 21, 41}) {
        order = std::min(order, std::log2(decay_error(n) / decay_error(2 * n - 1)));
    }
    o.require(order >= kLsimOrder, "lsim order " + num(order));

    const Scenario s = builtin_scenario("example1");
    const fs::path base = fs::temp_directory_path() / "ilct_acceptance";
    fs::remove_all(base);
    RunOptions opt;
    opt.iterations = 20;
    cmd_run(s, "a", (base / "one").string(), opt);
    cmd_run(s, "a", (base / "two").string(), opt);
    bool same = true;
    int files = 0;
    for (const auto& entry : fs::directory_iterator(base / "one")) {
        same = same && slurp(entry.path()) == slurp(base / "two" / entry.path().filename());
        ++files;
    }
    o.require(same && files > 0, std::to_string(files) + " output files identical across runs");
    fs::remove_all(base);
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<void(Outcome&)>> criteria[] = {
        {"trackability triage", triage},
        {"example 1 convergence", example1_convergence},
        {"example 1 untrackable plateau", example1_plateau},
        {"example 2 over-actuated limits", example2},
        {"spectral-radius certificates", certificates},
        {"desired input solves the plant equation", formula_property},
        {"lambda-norm contraction", contraction},
        {"D-type law and divergence guard", dtype},
        {"robustness sweep", robustness},
        {"numerics hygiene", hygiene},
    };
    int failures = 0;
    int index = 0;
    for (const auto& [title, check] : criteria) {
        ++index;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            check(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        failures += o.pass ? 0 : 1;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << index << " (" << title << "): "
                  << o.detail.str() << " [" << num(seconds_since(t0)) << " s]" << std::endl;
    }
    return failures == 0 ? 0 : 1;
}

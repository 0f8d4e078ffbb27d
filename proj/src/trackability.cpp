#include "ilct/trackability.hpp"

#include <algorithm>
#include <numeric>

#include "ilct/errors.hpp"

namespace ilct {

namespace {

const SignalVector& analytic(const Trajectory& yd) {
    if (const auto* f = std::get_if<SignalVector>(&yd)) {
        return *f;
    }
    throw NonRationalError("trajectory is given by samples only; its transform is unknown");
}

// First combination of q columns (lexicographic) with a nonsingular block.
std::optional<std::vector<int>> leading_block_permutation(const Eigen::MatrixXd& phi) {
    const int q = static_cast<int>(phi.rows());
    const int p = static_cast<int>(phi.cols());
    std::vector<bool> pick(static_cast<size_t>(p), false);
    std::fill(pick.begin(), pick.begin() + q, true);
    do {
        std::vector<int> chosen;
        std::vector<int> rest;
        for (int j = 0; j < p; ++j) {
            (pick[j] ? chosen : rest).push_back(j);
        }
        Eigen::MatrixXd block(q, q);
        for (int k = 0; k < q; ++k) {
            block.col(k) = phi.col(chosen[k]);
        }
        if (numeric_rank(block) == q) {
            chosen.insert(chosen.end(), rest.begin(), rest.end());
            return chosen;
        }
    } while (std::prev_permutation(pick.begin(), pick.end()));
    return std::nullopt;
}

}  // namespace

Plant make_plant(RationalMatrix g1, RationalMatrix g2, ExogenousInput exo, std::uint64_t seed) {
    Plant plant;
    plant.q = g1.rows();
    plant.p = g1.cols();
    plant.m = g2.cols();
    if (g2.rows() != plant.q) {
        throw DimensionError("plant: G1 and G2 have different row counts");
    }
    if (exo.dim() != plant.m || static_cast<int>(exo.dhat.size()) != plant.m) {
        throw DimensionError("plant: exogenous input dimension differs from the columns of G2");
    }
    if (rm_classify(g1).kind != Properness::strictly_proper) {
        throw ConditionError("C1", "G1 is not strictly proper");
    }
    if (rm_classify(g2).kind != Properness::strictly_proper) {
        throw ConditionError("C1", "G2 is not strictly proper");
    }
    if (!exo.d0.allFinite()) {
        throw ConditionError("C2", "d0 is not finite");
    }
    // Dhat built from the analytic basis is strictly proper by construction.
    if (rm_classify(exo.transform()).kind == Properness::improper) {
        throw ConditionError("C2", "D(s) is not proper");
    }
    plant.phi1 = rm_markov(g1, 1)[0];
    plant.phi2 = rm_markov(g2, 1)[0];
    if (numeric_rank(plant.phi1) < std::min(plant.q, plant.p)) {
        throw ConditionError("C3", "first Markov parameter of G1 is rank deficient");
    }
    plant.permutation.resize(static_cast<size_t>(plant.p));
    std::iota(plant.permutation.begin(), plant.permutation.end(), 0);
    if (plant.q < plant.p) {
        const auto perm = leading_block_permutation(plant.phi1);
        if (!perm) {
            throw ConditionError("C4", "no column permutation gives a nonsingular leading block");
        }
        plant.permutation = *perm;
    }
    plant.g1 = std::move(g1);
    plant.g2 = std::move(g2);
    plant.exo = std::move(exo);
    plant.g1_ss = realize(plant.g1);
    plant.g2_ss = realize(plant.g2);
    plant.seed = seed;
    return plant;
}

Plant statespace_plant(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& c,
                       const Eigen::VectorXd& x0, const SignalVector& w, std::uint64_t seed) {
    const auto n = a.rows();
    if (a.cols() != n || b.rows() != n || c.cols() != n || x0.size() != n ||
        static_cast<Eigen::Index>(w.size()) != n) {
        throw DimensionError("statespace_plant: A, B, C, x0, w do not conform");
    }
    const RationalMatrix g1 = transfer_matrix({a, b, c, Eigen::MatrixXd::Zero(c.rows(), b.cols())});
    Eigen::MatrixXd b2(n, 2 * n);
    b2 << Eigen::MatrixXd::Identity(n, n), Eigen::MatrixXd::Identity(n, n);
    const RationalMatrix g2 = transfer_matrix({a, b2, c, Eigen::MatrixXd::Zero(c.rows(), 2 * n)});
    ExogenousInput exo;
    exo.d0 = Eigen::VectorXd::Zero(2 * n);
    exo.d0.head(n) = x0;
    exo.dhat.assign(static_cast<size_t>(n), SignalExpr());
    exo.dhat.insert(exo.dhat.end(), w.begin(), w.end());
    return make_plant(g1, g2, std::move(exo), seed);
}

bool check_initial_condition(const Plant& plant, const SignalVector& yd) {
    if (static_cast<int>(yd.size()) != plant.q) {
        throw DimensionError("trajectory has the wrong number of channels");
    }
    const Eigen::VectorXd y0 = evaluate(yd, 0.0);
    const Eigen::VectorXd yk0 = plant.phi2 * plant.exo.d0;
    return (y0 - yk0).norm() <= 1e-9 * (1.0 + y0.norm());
}

Evaluator reference_evaluator(const Plant& plant, const Trajectory& yd) {
    const SignalVector& f = analytic(yd);
    if (static_cast<int>(f.size()) != plant.q) {
        throw DimensionError("trajectory has the wrong number of channels");
    }
    RationalMatrix ydt = laplace_transform(f);
    RationalMatrix dt = plant.exo.transform();
    RationalMatrix g2 = plant.g2;
    return [ydt, dt, g2](Complex s) -> Eigen::VectorXcd {
        return ydt.eval(s).col(0) - g2.eval(s) * dt.eval(s).col(0);
    };
}

Eigen::MatrixXcd projector(const RationalMatrix& g1, Complex s0) {
    const Eigen::MatrixXcd g = g1.eval(s0);
    const Eigen::MatrixXcd gt = g.transpose();
    const Eigen::MatrixXcd left = solve_pointwise(gt * g, gt);
    return Eigen::MatrixXcd::Identity(g.rows(), g.rows()) - g * left;
}

std::vector<Complex> plant_probes(const Plant& plant, const SignalVector& yd, int count, std::uint64_t salt) {
    ProbeSampler sampler(plant.seed * 1000003ULL + salt);
    sampler.avoid_poles_of(plant.g1);
    sampler.avoid_poles_of(plant.g2);
    sampler.avoid_poles_of(plant.exo.transform());
    sampler.avoid_poles_of(laplace_transform(yd));
    return sampler.draw(count);
}

double membership_residual(const Plant& plant, const Evaluator& u, const Evaluator& r,
                           const std::vector<Complex>& probes) {
    double worst = 0.0;
    for (const Complex s : probes) {
        const Eigen::VectorXcd rs = r(s);
        const Eigen::VectorXcd diff = plant.g1.eval(s) * u(s) - rs;
        worst = std::max(worst, diff.cwiseAbs().maxCoeff() / (1.0 + rs.cwiseAbs().maxCoeff()));
    }
    return worst;
}

TrackabilityVerdict check_trackable_underactuated(const Plant& plant, const Trajectory& yd) {
    if (!plant.underactuated()) {
        throw DimensionError("check_trackable_underactuated: requires q >= p");
    }
    const SignalVector& f = analytic(yd);
    const Evaluator r = reference_evaluator(plant, yd);
    RationalMatrix ydt = laplace_transform(f);

    TrackabilityVerdict v;
    v.initial_condition_ok = check_initial_condition(plant, f);
    v.permutation = plant.permutation;
    bool small = true;
    for (const Complex s : plant_probes(plant, f, kTrackProbes)) {
        const Eigen::VectorXcd res = projector(plant.g1, s) * r(s);
        const double scale = 1.0 + ydt.eval(s).cwiseAbs().maxCoeff();
        const double rel = res.cwiseAbs().maxCoeff() / scale;
        v.residual = std::max(v.residual, rel);
        small = small && rel <= kTrackTol;
        ++v.probes_used;
    }
    v.trackable = v.initial_condition_ok && small;
    v.realizable = v.trackable;
    if (v.trackable) {
        RationalMatrix g1 = plant.g1;
        v.witness = [g1, r](Complex s) -> Eigen::VectorXcd {
            const Eigen::MatrixXcd g = g1.eval(s);
            const Eigen::MatrixXcd gt = g.transpose();
            return solve_pointwise(gt * g, gt * r(s)).col(0);
        };
    }
    return v;
}

Evaluator desired_input_underactuated(const Plant& plant, const Trajectory& yd) {
    TrackabilityVerdict v = check_trackable_underactuated(plant, yd);
    if (!v.trackable) {
        throw NotTrackableError("desired trajectory is not trackable; no input solves G1 U = Y_d - G2 D");
    }
    return v.witness;
}

TrackabilityVerdict check_trackable_overactuated(const Plant& plant, const Trajectory& yd,
                                                 const std::optional<SignalVector>& ud2) {
    if (plant.q > plant.p) {
        throw DimensionError("check_trackable_overactuated: requires q <= p");
    }
    const SignalVector& f = analytic(yd);
    const int q = plant.q;
    const int free = plant.p - q;
    if (ud2 && static_cast<int>(ud2->size()) != free) {
        throw DimensionError("ud2 must have p - q channels");
    }
    const Evaluator r = reference_evaluator(plant, yd);
    std::vector<int> lead(plant.permutation.begin(), plant.permutation.begin() + q);
    std::vector<int> tail(plant.permutation.begin() + q, plant.permutation.end());
    RationalMatrix g11 = plant.g1.select_columns(lead);
    RationalMatrix g12 = plant.g1.select_columns(tail);
    RationalMatrix u2t = (ud2 && free > 0) ? laplace_transform(*ud2) : RationalMatrix(free, 1);
    std::vector<int> perm = plant.permutation;

    TrackabilityVerdict v;
    v.initial_condition_ok = check_initial_condition(plant, f);
    v.permutation = perm;
    v.trackable = v.initial_condition_ok;
    v.realizable = v.trackable && q == plant.p;
    Evaluator witness = [g11, g12, u2t, r, perm, q, free](Complex s) -> Eigen::VectorXcd {
        Eigen::VectorXcd u2 = free > 0 ? Eigen::VectorXcd(u2t.eval(s).col(0)) : Eigen::VectorXcd(0);
        Eigen::VectorXcd rhs = r(s);
        if (free > 0) {
            rhs -= g12.eval(s) * u2;
        }
        const Eigen::VectorXcd u1 = solve_pointwise(g11.eval(s), rhs).col(0);
        Eigen::VectorXcd u(q + free);
        for (int k = 0; k < q; ++k) u(perm[k]) = u1(k);
        for (int k = 0; k < free; ++k) u(perm[q + k]) = u2(k);
        return u;
    };
    const auto probes = plant_probes(plant, f, kTrackProbes);
    v.residual = membership_residual(plant, witness, r, probes);
    v.probes_used = static_cast<int>(probes.size());
    if (v.trackable) {
        v.witness = std::move(witness);
    }
    return v;
}

TrackabilityVerdict check_trackable(const Plant& plant, const Trajectory& yd,
                                    const std::optional<SignalVector>& ud2) {
    return plant.underactuated() ? check_trackable_underactuated(plant, yd)
                                 : check_trackable_overactuated(plant, yd, ud2);
}

}  // namespace ilct

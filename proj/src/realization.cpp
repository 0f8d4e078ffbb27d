#include "ilct/realization.hpp"

#include <algorithm>
#include <cmath>

#include "ilct/errors.hpp"

namespace ilct {

void StateSpace::validate() const {
    const auto n = A.rows();
    if (A.cols() != n || B.rows() != n || C.cols() != n || D.rows() != C.rows() ||
        D.cols() != B.cols()) {
        throw DimensionError("StateSpace: A, B, C, D do not conform");
    }
}

Eigen::MatrixXcd StateSpace::eval(Complex s) const {
    const int n = states();
    Eigen::MatrixXcd out = D.cast<Complex>();
    if (n == 0) {
        return out;
    }
    const Eigen::MatrixXcd m = s * Eigen::MatrixXcd::Identity(n, n) - A.cast<Complex>();
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
    out += C.cast<Complex>() * lu.solve(B.cast<Complex>());
    return out;
}

StateSpace realize(const RationalMatrix& g, std::uint64_t seed) {
    const PropernessClass pc = rm_classify(g);
    if (pc.kind == Properness::improper) {
        throw ProperError("realize: transfer matrix is improper");
    }
    const int q = g.rows();
    const int p = g.cols();

    struct Block {
        Poly lcd;
        std::vector<Poly> nums;  // strictly proper numerators over lcd
    };
    std::vector<Block> blocks;
    int n = 0;
    for (int j = 0; j < p; ++j) {
        std::vector<Poly> dens;
        for (int i = 0; i < q; ++i) {
            if (!g(i, j).num.is_zero()) dens.push_back(g(i, j).den);
        }
        Block b{common_denominator(dens), {}};
        for (int i = 0; i < q; ++i) {
            const RationalEntry& e = g(i, j);
            if (e.num.is_zero() || b.lcd.degree() == 0) {
                b.nums.emplace_back();
                continue;
            }
            const Poly scaled = e.num * poly_divmod(b.lcd, e.den).quotient;
            // Remove the feedthrough part; the remainder is strictly proper.
            b.nums.push_back(poly_divmod(scaled, b.lcd).remainder);
        }
        n += std::max(0, b.lcd.degree());
        blocks.push_back(std::move(b));
    }

    StateSpace ss{Eigen::MatrixXd::Zero(n, n), Eigen::MatrixXd::Zero(n, p),
                  Eigen::MatrixXd::Zero(q, n), pc.limit};
    int off = 0;
    for (int j = 0; j < p; ++j) {
        const Block& b = blocks[j];
        const int nb = std::max(0, b.lcd.degree());
        for (int k = 0; k + 1 < nb; ++k) {
            ss.A(off + k, off + k + 1) = 1.0;
        }
        for (int k = 0; k < nb; ++k) {
            ss.A(off + nb - 1, off + k) = -b.lcd.coeff(k);
        }
        if (nb > 0) {
            ss.B(off + nb - 1, j) = 1.0;
        }
        for (int i = 0; i < q; ++i) {
            for (int k = 0; k < nb; ++k) {
                ss.C(i, off + k) = b.nums[i].coeff(k);
            }
        }
        off += nb;
    }

    ProbeSampler sampler(seed);
    sampler.avoid_poles_of(g);
    for (const Complex s : sampler.draw(8)) {
        const Eigen::MatrixXcd want = g.eval(s);
        const Eigen::MatrixXcd got = ss.eval(s);
        const double scale = std::max(1.0, want.cwiseAbs().maxCoeff());
        if ((want - got).cwiseAbs().maxCoeff() > 1e-6 * scale) {
            throw RealizationError("realize: probe verification failed");
        }
    }
    return ss;
}

std::vector<Eigen::MatrixXd> markov_from_ss(const StateSpace& ss, int count) {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(static_cast<size_t>(count));
    Eigen::MatrixXd ab = ss.B;
    for (int j = 0; j < count; ++j) {
        out.push_back(ss.C * ab);
        ab = ss.A * ab;
    }
    return out;
}

MarkovNumerator markov_numerator(const StateSpace& ss) {
    ss.validate();
    const int n = ss.states();
    const int q = ss.outputs();
    const int p = ss.inputs();
    MarkovNumerator mn{characteristic_polynomial(ss.A), PolyMatrix(q, p)};
    const auto markov = markov_from_ss(ss, std::max(n, 1));
    // Coefficient of s^i, i = 0..n-1: sum_{j=i+1}^{n} alpha_j Phi^{(j-i-1)}.
    for (int r = 0; r < q; ++r) {
        for (int c = 0; c < p; ++c) {
            std::vector<double> coeffs(static_cast<size_t>(std::max(n, 0)), 0.0);
            for (int i = 0; i < n; ++i) {
                double v = 0.0;
                for (int j = i + 1; j <= n; ++j) {
                    v += mn.alpha.coeff(j) * markov[j - i - 1](r, c);
                }
                coeffs[i] = v;
            }
            mn.q(r, c) = Poly(std::move(coeffs));
        }
    }
    return mn;
}

RationalMatrix transfer_matrix(const StateSpace& ss) {
    const MarkovNumerator mn = markov_numerator(ss);
    RationalMatrix g(ss.outputs(), ss.inputs());
    for (int i = 0; i < ss.outputs(); ++i) {
        for (int j = 0; j < ss.inputs(); ++j) {
            const Poly feed = mn.alpha.scaled(ss.D(i, j));
            g.set(i, j, mn.q(i, j) + feed, mn.alpha);
        }
    }
    return g;
}

StateSpace ss_static(const Eigen::MatrixXd& d) {
    return {Eigen::MatrixXd::Zero(0, 0), Eigen::MatrixXd::Zero(0, d.cols()),
            Eigen::MatrixXd::Zero(d.rows(), 0), d};
}

StateSpace ss_series(const StateSpace& first, const StateSpace& second) {
    if (first.outputs() != second.inputs()) {
        throw DimensionError("ss_series: output/input dimensions differ");
    }
    const int n1 = first.states();
    const int n2 = second.states();
    StateSpace out;
    out.A = Eigen::MatrixXd::Zero(n1 + n2, n1 + n2);
    out.A.topLeftCorner(n1, n1) = first.A;
    out.A.bottomLeftCorner(n2, n1) = second.B * first.C;
    out.A.bottomRightCorner(n2, n2) = second.A;
    out.B = Eigen::MatrixXd(n1 + n2, first.inputs());
    out.B << first.B, second.B * first.D;
    out.C = Eigen::MatrixXd(second.outputs(), n1 + n2);
    out.C << second.D * first.C, second.C;
    out.D = second.D * first.D;
    return out;
}

StateSpace ss_parallel(const StateSpace& a, const StateSpace& b) {
    if (a.inputs() != b.inputs() || a.outputs() != b.outputs()) {
        throw DimensionError("ss_parallel: dimensions differ");
    }
    const int na = a.states();
    const int nb = b.states();
    StateSpace out;
    out.A = Eigen::MatrixXd::Zero(na + nb, na + nb);
    out.A.topLeftCorner(na, na) = a.A;
    out.A.bottomRightCorner(nb, nb) = b.A;
    out.B = Eigen::MatrixXd(na + nb, a.inputs());
    out.B << a.B, b.B;
    out.C = Eigen::MatrixXd(a.outputs(), na + nb);
    out.C << a.C, b.C;
    out.D = a.D + b.D;
    return out;
}

StateSpace ss_negate(const StateSpace& a) { return {a.A, a.B, -a.C, -a.D}; }

StateSpace ss_inverse(const StateSpace& a) {
    if (a.inputs() != a.outputs()) {
        throw DimensionError("ss_inverse: system is not square");
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a.D);
    if (!lu.isInvertible()) {
        throw SingularError("ss_inverse: feedthrough matrix is singular");
    }
    const Eigen::MatrixXd dinv = lu.inverse();
    return {a.A - a.B * dinv * a.C, a.B * dinv, -dinv * a.C, dinv};
}

StateSpace ss_times_s(const StateSpace& a) {
    if (!a.D.isZero(0.0)) {
        throw ProperError("ss_times_s: system has a feedthrough term");
    }
    return {a.A, a.B, a.C * a.A, a.C * a.B};
}

StateSpace ss_strictly_proper_part(const StateSpace& a) {
    return {a.A, a.B, a.C, Eigen::MatrixXd::Zero(a.outputs(), a.inputs())};
}

}  // namespace ilct

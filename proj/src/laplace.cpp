#include "ilct/laplace.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "ilct/errors.hpp"

namespace ilct {

namespace {

double factorial(int m) {
    double f = 1.0;
    for (int i = 2; i <= m; ++i) f *= i;
    return f;
}

Poly power(const Poly& p, int k) {
    Poly out = Poly::constant(1.0);
    for (int i = 0; i < k; ++i) out = out * p;
    return out;
}

RationalEntry term_transform(const SignalTerm& term) {
    if (term.c == 0.0) {
        return {Poly(), Poly::constant(1.0)};
    }
    const int k = term.m + 1;
    const double scale = term.c * factorial(term.m);
    const Poly shift{-term.a, 1.0};  // s - a
    if (term.omega == 0.0) {
        return normalized(Poly::constant(scale * std::cos(term.phi)), power(shift, k));
    }
    // L[t^m e^{(a+iw)t}] = m!/(s-a-iw)^{m+1}; the cosine is the real part
    // taken coefficientwise: m! Re[e^{i phi} (s-a+iw)^{m+1}] / ((s-a)^2+w^2)^{m+1}.
    std::vector<std::complex<double>> num{1.0};
    const std::complex<double> root(-term.a, term.omega);
    for (int i = 0; i < k; ++i) {
        std::vector<std::complex<double>> next(num.size() + 1, 0.0);
        for (size_t j = 0; j < num.size(); ++j) {
            next[j + 1] += num[j];
            next[j] += root * num[j];
        }
        num = std::move(next);
    }
    const std::complex<double> rot = std::polar(scale, term.phi);
    std::vector<double> re(num.size());
    for (size_t j = 0; j < num.size(); ++j) {
        re[j] = (rot * num[j]).real();
    }
    const Poly quad = shift * shift + Poly::constant(term.omega * term.omega);
    return normalized(Poly(std::move(re)).trimmed(1e-14 * std::abs(scale)), power(quad, k));
}

}  // namespace

double SignalTerm::operator()(double t) const {
    double v = c * std::exp(a * t) * std::cos(omega * t + phi);
    if (m > 0) v *= std::pow(t, m);
    return v;
}

SignalExpr SignalExpr::constant(double c) { return SignalExpr({SignalTerm{c, 0, 0.0, 0.0, 0.0}}); }

SignalExpr SignalExpr::sin(double c, double omega) {
    return SignalExpr({SignalTerm{c, 0, 0.0, omega, -std::numbers::pi / 2}});
}

SignalExpr SignalExpr::cos(double c, double omega) {
    return SignalExpr({SignalTerm{c, 0, 0.0, omega, 0.0}});
}

SignalExpr SignalExpr::exp(double c, double a) {
    return SignalExpr({SignalTerm{c, 0, a, 0.0, 0.0}});
}

double SignalExpr::operator()(double t) const {
    double v = 0.0;
    for (const auto& term : terms_) v += term(t);
    return v;
}

SignalExpr SignalExpr::operator+(const SignalExpr& other) const {
    std::vector<SignalTerm> t = terms_;
    t.insert(t.end(), other.terms_.begin(), other.terms_.end());
    return SignalExpr(std::move(t));
}

SignalExpr SignalExpr::scaled(double k) const {
    std::vector<SignalTerm> t = terms_;
    for (auto& x : t) x.c *= k;
    return SignalExpr(std::move(t));
}

Eigen::VectorXd evaluate(const SignalVector& f, double t) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(f.size()));
    for (size_t i = 0; i < f.size(); ++i) v(static_cast<Eigen::Index>(i)) = f[i](t);
    return v;
}

RationalEntry laplace_entry(const SignalExpr& f) {
    std::vector<RationalEntry> parts;
    parts.reserve(f.terms().size());
    for (const auto& term : f.terms()) {
        parts.push_back(term_transform(term));
    }
    return sum_entries(parts);
}

RationalMatrix laplace_transform(const SignalVector& f) {
    std::vector<RationalEntry> e;
    e.reserve(f.size());
    for (const auto& x : f) e.push_back(laplace_entry(x));
    return RationalMatrix::column(std::move(e));
}

SignalExpr expr_derivative(const SignalExpr& f) {
    std::vector<SignalTerm> out;
    for (const auto& t : f.terms()) {
        if (t.c == 0.0) continue;
        if (t.m > 0) out.push_back({t.c * t.m, t.m - 1, t.a, t.omega, t.phi});
        if (t.a != 0.0) out.push_back({t.c * t.a, t.m, t.a, t.omega, t.phi});
        // -sin(x) = cos(x + pi/2)
        if (t.omega != 0.0) {
            out.push_back({t.c * t.omega, t.m, t.a, t.omega, t.phi + std::numbers::pi / 2});
        }
    }
    return SignalExpr(std::move(out));
}

SignalVector expr_derivative(const SignalVector& f) {
    SignalVector out;
    out.reserve(f.size());
    for (const auto& x : f) out.push_back(expr_derivative(x));
    return out;
}

SampledSignal expr_sample(const SignalVector& f, const Grid& grid) {
    Eigen::MatrixXd v(grid.nodes(), static_cast<Eigen::Index>(f.size()));
    for (int i = 0; i < grid.nodes(); ++i) {
        const double t = grid.t(i);
        for (size_t c = 0; c < f.size(); ++c) {
            v(i, static_cast<Eigen::Index>(c)) = f[c](t);
        }
    }
    return SampledSignal(grid, std::move(v));
}

ExogenousInput ExogenousInput::zero(int m) {
    return {Eigen::VectorXd::Zero(m), SignalVector(static_cast<size_t>(m))};
}

bool ExogenousInput::is_zero() const {
    if (!d0.isZero(0.0)) return false;
    for (const auto& e : dhat) {
        if (!e.is_zero()) return false;
    }
    return true;
}

RationalMatrix ExogenousInput::transform() const {
    if (static_cast<Eigen::Index>(dhat.size()) != d0.size()) {
        throw DimensionError("ExogenousInput: d0 and dhat differ in dimension");
    }
    std::vector<RationalEntry> e;
    e.reserve(dhat.size());
    for (size_t i = 0; i < dhat.size(); ++i) {
        const RationalEntry regular = laplace_entry(dhat[i]);
        e.push_back(sum_entries(
            {regular, {Poly::constant(d0(static_cast<Eigen::Index>(i))), Poly::constant(1.0)}}));
    }
    return RationalMatrix::column(std::move(e));
}

}  // namespace ilct

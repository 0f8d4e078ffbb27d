#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ilct/ratmat.hpp"
#include "ilct/signal.hpp"

namespace ilct {

// c * t^m * exp(a t) * cos(omega t + phi)
struct SignalTerm {
    double c = 0.0;
    int m = 0;
    double a = 0.0;
    double omega = 0.0;
    double phi = 0.0;

    double operator()(double t) const;
    friend bool operator==(const SignalTerm&, const SignalTerm&) = default;
};

// Finite sum of SignalTerm; the empty sum is the zero signal.
class SignalExpr {
  public:
    SignalExpr() = default;
    explicit SignalExpr(std::vector<SignalTerm> terms) : terms_(std::move(terms)) {}

    static SignalExpr constant(double c);
    static SignalExpr sin(double c, double omega);
    static SignalExpr cos(double c, double omega);
    static SignalExpr exp(double c, double a);

    const std::vector<SignalTerm>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    double operator()(double t) const;

    SignalExpr operator+(const SignalExpr& other) const;
    SignalExpr scaled(double k) const;

    friend bool operator==(const SignalExpr&, const SignalExpr&) = default;

  private:
    std::vector<SignalTerm> terms_;
};

using SignalVector = std::vector<SignalExpr>;

Eigen::VectorXd evaluate(const SignalVector& f, double t);

// Exact transform of one expression.
RationalEntry laplace_entry(const SignalExpr& f);
// Column of transforms; every entry is strictly proper.
RationalMatrix laplace_transform(const SignalVector& f);

SignalExpr expr_derivative(const SignalExpr& f);
SignalVector expr_derivative(const SignalVector& f);

SampledSignal expr_sample(const SignalVector& f, const Grid& grid);

// d(t) = d0 delta(t) + dhat(t), so D(s) = d0 + Dhat(s).
struct ExogenousInput {
    Eigen::VectorXd d0;
    SignalVector dhat;

    int dim() const { return static_cast<int>(d0.size()); }
    static ExogenousInput zero(int m);
    bool is_zero() const;
    // Transform as an m x 1 rational column (proper, limit d0).
    RationalMatrix transform() const;
};

}  // namespace ilct

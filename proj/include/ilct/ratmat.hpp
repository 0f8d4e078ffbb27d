#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "ilct/poly.hpp"

namespace ilct {

using Complex = std::complex<double>;

struct RationalEntry {
    Poly num;
    Poly den;

    Complex operator()(Complex s) const { return num(s) / den(s); }
};

// Matrix of real rational functions num/den. Denominators are stored monic
// and are never the zero polynomial; a zero numerator is stored as 0/1.
class RationalMatrix {
  public:
    RationalMatrix() = default;
    RationalMatrix(int rows, int cols);
    RationalMatrix(int rows, int cols, std::vector<RationalEntry> entries);

    static RationalMatrix identity(int n);
    static RationalMatrix constant(const Eigen::MatrixXd& k);
    static RationalMatrix column(std::vector<RationalEntry> entries);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const RationalEntry& operator()(int i, int j) const { return entries_[i * cols_ + j]; }
    const std::vector<RationalEntry>& entries() const { return entries_; }
    void set(int i, int j, Poly num, Poly den);

    // Throws PoleError naming the first entry whose denominator vanishes.
    Eigen::MatrixXcd eval(Complex s) const;
    // Relative distance of s from the nearest pole over all entries.
    double pole_clearance(Complex s) const;

    RationalMatrix block(int row, int col, int nrows, int ncols) const;
    RationalMatrix select_columns(const std::vector<int>& cols) const;
    RationalMatrix select_rows(const std::vector<int>& rows) const;

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<RationalEntry> entries_;
};

RationalEntry normalized(Poly num, Poly den);

// Sum of fractions over a common denominator found by divisibility checks.
RationalEntry sum_entries(const std::vector<RationalEntry>& terms);

Eigen::MatrixXcd rm_eval(const RationalMatrix& g, Complex s0);

enum class Properness { improper, proper, strictly_proper };

struct PropernessClass {
    Properness kind = Properness::improper;
    // lim_{s->inf} g(s); empty when improper.
    Eigen::MatrixXd limit;
};

PropernessClass rm_classify(const RationalMatrix& g);

// Coefficients of the s^-(j+1) expansion, j = 0..count-1. Requires g strictly
// proper.
std::vector<Eigen::MatrixXd> rm_markov(const RationalMatrix& g, int count);

// Full rank of the leading Markov parameter.
bool rm_relative_degree_one(const RationalMatrix& g);

enum class RmOp { add, mul, transpose, scalar_s_mul };

RationalMatrix rm_add(const RationalMatrix& a, const RationalMatrix& b);
RationalMatrix rm_sub(const RationalMatrix& a, const RationalMatrix& b);
RationalMatrix rm_mul(const RationalMatrix& a, const RationalMatrix& b);
RationalMatrix rm_transpose(const RationalMatrix& a);
RationalMatrix rm_times_s(const RationalMatrix& a);
RationalMatrix rm_divide_by_s(const RationalMatrix& a);
RationalMatrix rm_scale(const RationalMatrix& a, double c);
// Unary ops (transpose, scalar_s_mul) ignore b.
RationalMatrix rm_algebra(const RationalMatrix& a, const RationalMatrix& b, RmOp op);

// Seeded sampler of probe points on the annulus 0.5 <= |s| <= 20, away from
// the real axis and from the poles of registered matrices.
class ProbeSampler {
  public:
    static constexpr double kMinRadius = 0.5;
    static constexpr double kMaxRadius = 20.0;
    static constexpr int kMaxAttempts = 64;

    explicit ProbeSampler(std::uint64_t seed) : rng_(seed) {}

    void avoid_poles_of(const RationalMatrix& g) { avoid_.push_back(g); }
    Complex next();
    std::vector<Complex> draw(int count);

  private:
    std::mt19937_64 rng_;
    std::vector<RationalMatrix> avoid_;
};

// Non-singularity as a rational function: det(g(s0)) is relatively nonzero
// (1e-8 against the Hadamard bound) at some of 8 random probe points.
bool rm_is_nonsingular(const RationalMatrix& g, std::uint64_t seed = 1);

// a(s0)^{-1} rhs(s0) by LU solve. Throws SingularError when a(s0) is
// numerically singular.
Eigen::MatrixXcd rm_solve_pointwise(const RationalMatrix& a, const RationalMatrix& rhs, Complex s0);
Eigen::MatrixXcd solve_pointwise(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& rhs);

}  // namespace ilct

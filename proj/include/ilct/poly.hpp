#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace ilct {

// Real polynomial with ascending coefficients: coeffs()[i] multiplies s^i.
// The zero polynomial has no coefficients and a nonzero polynomial never
// stores a trailing zero.
class Poly {
  public:
    Poly() = default;
    explicit Poly(std::vector<double> coeffs);
    Poly(std::initializer_list<double> coeffs) : Poly(std::vector<double>(coeffs)) {}

    static Poly constant(double c);
    static Poly monomial(double c, int degree);
    // Monic polynomial with the given real roots.
    static Poly from_roots(const std::vector<double>& roots);

    const std::vector<double>& coeffs() const { return coeffs_; }
    double coeff(int i) const;
    // -1 for the zero polynomial.
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    double leading() const { return coeffs_.empty() ? 0.0 : coeffs_.back(); }
    double max_abs_coeff() const;

    double operator()(double s) const;
    std::complex<double> operator()(std::complex<double> s) const;

    Poly scaled(double c) const;
    Poly derivative() const;
    // Drop trailing coefficients with |c| <= tol.
    Poly trimmed(double tol) const;

    friend bool operator==(const Poly&, const Poly&) = default;

  private:
    std::vector<double> coeffs_;
};

enum class PolyOp { add, sub, mul };

// Exact coefficient arithmetic. Leading coefficients that cancel to within
// 1e-12 * (1 + max|coeff| of the operands) are dropped.
Poly poly_arith(const Poly& a, const Poly& b, PolyOp op);

Poly operator+(const Poly& a, const Poly& b);
Poly operator-(const Poly& a, const Poly& b);
Poly operator*(const Poly& a, const Poly& b);
Poly operator*(double c, const Poly& p);

struct PolyDivision {
    Poly quotient;
    Poly remainder;
};

// Long division a = q*b + r with deg r < deg b. Throws on b == 0.
PolyDivision poly_divmod(const Poly& a, const Poly& b);

// True when a and b agree coefficientwise to relative tolerance tol.
bool approx_equal(const Poly& a, const Poly& b, double tol = 1e-10);

// True when b divides a up to a remainder that is negligible relative to a.
bool divides(const Poly& b, const Poly& a, double tol = 1e-9);

// Monic least common multiple. Divisibility is checked first; otherwise the
// root multisets are merged (roots within 1e-6 relative are shared).
Poly common_denominator(const std::vector<Poly>& dens);

// det(sI - A).
Poly characteristic_polynomial(const Eigen::MatrixXd& a);

class PolyMatrix {
  public:
    PolyMatrix() = default;
    PolyMatrix(int rows, int cols);
    PolyMatrix(int rows, int cols, std::vector<Poly> entries);

    static PolyMatrix identity(int n);

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    const Poly& operator()(int i, int j) const { return entries_[i * cols_ + j]; }
    Poly& operator()(int i, int j) { return entries_[i * cols_ + j]; }
    const std::vector<Poly>& entries() const { return entries_; }

    Eigen::MatrixXcd eval(std::complex<double> s) const;
    Eigen::MatrixXd eval(double s) const;
    PolyMatrix transpose() const;

  private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<Poly> entries_;
};

PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b);

// Cofactor expansion for n <= 3, fraction-free elimination otherwise.
Poly polymatrix_det(const PolyMatrix& m);

namespace detail {
Poly det_cofactor(const PolyMatrix& m);
Poly det_bareiss(const PolyMatrix& m);
}  // namespace detail

struct ColumnStructure {
    // std::nullopt marks an identically zero column.
    std::vector<std::optional<int>> degrees;
    Eigen::MatrixXd leading;
};

ColumnStructure column_structure(const PolyMatrix& m);

// Highest column degree coefficient matrix has full column rank.
// Throws when some column is identically zero.
bool is_column_reduced(const PolyMatrix& m);

// Singular-value rank with threshold sigma_max * max(rows, cols) * 1e-10.
int numeric_rank(const Eigen::MatrixXd& m);

}  // namespace ilct

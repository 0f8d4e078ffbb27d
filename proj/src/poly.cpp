#include "ilct/poly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ilct/errors.hpp"

namespace ilct {

namespace {

constexpr double kZeroTol = 1e-12;

std::vector<double> strip_exact_zeros(std::vector<double> c) {
    while (!c.empty() && c.back() == 0.0) {
        c.pop_back();
    }
    return c;
}

}  // namespace

Poly::Poly(std::vector<double> coeffs) : coeffs_(strip_exact_zeros(std::move(coeffs))) {}

Poly Poly::constant(double c) { return Poly(std::vector<double>{c}); }

Poly Poly::monomial(double c, int degree) {
    std::vector<double> v(static_cast<size_t>(degree) + 1, 0.0);
    v.back() = c;
    return Poly(std::move(v));
}

Poly Poly::from_roots(const std::vector<double>& roots) {
    Poly p = constant(1.0);
    for (double r : roots) {
        p = p * Poly{-r, 1.0};
    }
    return p;
}

double Poly::coeff(int i) const {
    if (i < 0 || i >= static_cast<int>(coeffs_.size())) {
        return 0.0;
    }
    return coeffs_[i];
}

double Poly::max_abs_coeff() const {
    double m = 0.0;
    for (double c : coeffs_) {
        m = std::max(m, std::abs(c));
    }
    return m;
}

double Poly::operator()(double s) const {
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        acc = acc * s + *it;
    }
    return acc;
}

std::complex<double> Poly::operator()(std::complex<double> s) const {
    std::complex<double> acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        acc = acc * s + *it;
    }
    return acc;
}

Poly Poly::scaled(double c) const {
    std::vector<double> v = coeffs_;
    for (double& x : v) {
        x *= c;
    }
    return Poly(std::move(v));
}

Poly Poly::derivative() const {
    if (coeffs_.size() <= 1) {
        return Poly();
    }
    std::vector<double> v(coeffs_.size() - 1);
    for (size_t i = 1; i < coeffs_.size(); ++i) {
        v[i - 1] = static_cast<double>(i) * coeffs_[i];
    }
    return Poly(std::move(v));
}

Poly Poly::trimmed(double tol) const {
    std::vector<double> v = coeffs_;
    while (!v.empty() && std::abs(v.back()) <= tol) {
        v.pop_back();
    }
    return Poly(std::move(v));
}

Poly poly_arith(const Poly& a, const Poly& b, PolyOp op) {
    const double tol = kZeroTol * (1.0 + std::max(a.max_abs_coeff(), b.max_abs_coeff()));
    const auto& ac = a.coeffs();
    const auto& bc = b.coeffs();
    std::vector<double> out;
    switch (op) {
        case PolyOp::add:
        case PolyOp::sub: {
            const double sign = op == PolyOp::add ? 1.0 : -1.0;
            out.assign(std::max(ac.size(), bc.size()), 0.0);
            for (size_t i = 0; i < ac.size(); ++i) out[i] += ac[i];
            for (size_t i = 0; i < bc.size(); ++i) out[i] += sign * bc[i];
            break;
        }
        case PolyOp::mul: {
            if (ac.empty() || bc.empty()) {
                return Poly();
            }
            out.assign(ac.size() + bc.size() - 1, 0.0);
            for (size_t i = 0; i < ac.size(); ++i) {
                for (size_t j = 0; j < bc.size(); ++j) {
                    out[i + j] += ac[i] * bc[j];
                }
            }
            // Product of nonzero leading coefficients never cancels.
            return Poly(std::move(out));
        }
    }
    return Poly(std::move(out)).trimmed(tol);
}

Poly operator+(const Poly& a, const Poly& b) { return poly_arith(a, b, PolyOp::add); }
Poly operator-(const Poly& a, const Poly& b) { return poly_arith(a, b, PolyOp::sub); }
Poly operator*(const Poly& a, const Poly& b) { return poly_arith(a, b, PolyOp::mul); }
Poly operator*(double c, const Poly& p) { return p.scaled(c); }

PolyDivision poly_divmod(const Poly& a, const Poly& b) {
    if (b.is_zero()) {
        throw Error("polynomial division by zero");
    }
    if (a.degree() < b.degree()) {
        return {Poly(), a};
    }
    std::vector<double> rem = a.coeffs();
    const auto& bc = b.coeffs();
    const int db = b.degree();
    std::vector<double> quot(static_cast<size_t>(a.degree() - db) + 1, 0.0);
    for (int k = a.degree() - db; k >= 0; --k) {
        const double c = rem[k + db] / bc[db];
        quot[k] = c;
        for (int j = 0; j <= db; ++j) {
            rem[k + j] -= c * bc[j];
        }
        rem[k + db] = 0.0;
    }
    rem.resize(static_cast<size_t>(db));
    const double tol = kZeroTol * (1.0 + a.max_abs_coeff());
    return {Poly(std::move(quot)), Poly(std::move(rem)).trimmed(tol)};
}

bool approx_equal(const Poly& a, const Poly& b, double tol) {
    const double scale = std::max({1.0, a.max_abs_coeff(), b.max_abs_coeff()});
    const int n = std::max(a.degree(), b.degree());
    for (int i = 0; i <= n; ++i) {
        if (std::abs(a.coeff(i) - b.coeff(i)) > tol * scale) {
            return false;
        }
    }
    return true;
}

bool divides(const Poly& b, const Poly& a, double tol) {
    if (b.degree() > a.degree()) {
        return a.is_zero();
    }
    const PolyDivision d = poly_divmod(a, b);
    return d.remainder.max_abs_coeff() <= tol * std::max(1.0, a.max_abs_coeff());
}

namespace {

// Roots by companion-matrix eigenvalues.
std::vector<std::complex<double>> poly_roots(const Poly& p) {
    const int n = p.degree();
    std::vector<std::complex<double>> out;
    if (n < 1) {
        return out;
    }
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (int k = 0; k + 1 < n; ++k) {
        comp(k + 1, k) = 1.0;
    }
    for (int k = 0; k < n; ++k) {
        comp(k, n - 1) = -p.coeff(k) / p.leading();
    }
    const Eigen::VectorXcd ev = comp.eigenvalues();
    out.assign(ev.data(), ev.data() + n);
    return out;
}

Poly from_complex_roots(const std::vector<std::complex<double>>& roots) {
    std::vector<std::complex<double>> c{1.0};
    for (const auto& r : roots) {
        std::vector<std::complex<double>> next(c.size() + 1, 0.0);
        for (size_t i = 0; i < c.size(); ++i) {
            next[i + 1] += c[i];
            next[i] -= r * c[i];
        }
        c = std::move(next);
    }
    std::vector<double> re(c.size());
    for (size_t i = 0; i < c.size(); ++i) {
        re[i] = c[i].real();
    }
    return Poly(std::move(re));
}

}  // namespace

Poly common_denominator(const std::vector<Poly>& dens) {
    Poly l = Poly::constant(1.0);
    for (const Poly& d : dens) {
        if (d.is_zero()) {
            throw Error("common_denominator: zero denominator");
        }
        if (d.degree() == 0 || divides(d, l)) {
            continue;
        }
        if (divides(l, d)) {
            l = d.scaled(1.0 / d.leading());
            continue;
        }
        // Merge root multisets: a root of d already present in l is reused.
        auto have = poly_roots(l);
        std::vector<bool> used(have.size(), false);
        std::vector<std::complex<double>> extra;
        for (const auto& r : poly_roots(d)) {
            bool matched = false;
            for (size_t k = 0; k < have.size(); ++k) {
                if (!used[k] && std::abs(have[k] - r) <= 1e-6 * (1.0 + std::abs(r))) {
                    used[k] = true;
                    matched = true;
                    break;
                }
            }
            if (!matched) {
                extra.push_back(r);
            }
        }
        l = l * from_complex_roots(extra);
    }
    return l.scaled(1.0 / l.leading());
}

Poly characteristic_polynomial(const Eigen::MatrixXd& a) {
    if (a.rows() != a.cols()) {
        throw DimensionError("characteristic_polynomial: matrix is not square");
    }
    const Eigen::Index n = a.rows();
    if (n == 0) {
        return Poly::constant(1.0);
    }
    // Expand prod (s - lambda_i) over the eigenvalues; conjugate pairs keep
    // the coefficients real up to rounding.
    const Eigen::VectorXcd ev = a.eigenvalues();
    std::vector<std::complex<double>> c{1.0};
    for (Eigen::Index i = 0; i < n; ++i) {
        std::vector<std::complex<double>> next(c.size() + 1, 0.0);
        for (size_t k = 0; k < c.size(); ++k) {
            next[k + 1] += c[k];
            next[k] -= ev[i] * c[k];
        }
        c = std::move(next);
    }
    std::vector<double> re(c.size());
    std::transform(c.begin(), c.end(), re.begin(), [](auto z) { return z.real(); });
    re.back() = 1.0;
    return Poly(std::move(re));
}

PolyMatrix::PolyMatrix(int rows, int cols)
    : rows_(rows), cols_(cols), entries_(static_cast<size_t>(rows) * cols) {}

PolyMatrix::PolyMatrix(int rows, int cols, std::vector<Poly> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (static_cast<int>(entries_.size()) != rows * cols) {
        throw DimensionError("PolyMatrix: entry count does not match rows x cols");
    }
}

PolyMatrix PolyMatrix::identity(int n) {
    PolyMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = Poly::constant(1.0);
    }
    return m;
}

Eigen::MatrixXcd PolyMatrix::eval(std::complex<double> s) const {
    Eigen::MatrixXcd out(rows_, cols_);
    for (int i = 0; i < rows_; ++i) {
        for (int j = 0; j < cols_; ++j) {
            out(i, j) = (*this)(i, j)(s);
        }
    }
    return out;
}

Eigen::MatrixXd PolyMatrix::eval(double s) const {
    Eigen::MatrixXd out(rows_, cols_);
    for (int i = 0; i < rows_; ++i) {
        for (int j = 0; j < cols_; ++j) {
            out(i, j) = (*this)(i, j)(s);
        }
    }
    return out;
}

PolyMatrix PolyMatrix::transpose() const {
    PolyMatrix t(cols_, rows_);
    for (int i = 0; i < rows_; ++i) {
        for (int j = 0; j < cols_; ++j) {
            t(j, i) = (*this)(i, j);
        }
    }
    return t;
}

PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("PolyMatrix product: inner dimensions differ");
    }
    PolyMatrix out(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < b.cols(); ++j) {
            Poly acc;
            for (int k = 0; k < a.cols(); ++k) {
                acc = acc + a(i, k) * b(k, j);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

namespace detail {

Poly det_cofactor(const PolyMatrix& m) {
    const int n = m.rows();
    switch (n) {
        case 0:
            return Poly::constant(1.0);
        case 1:
            return m(0, 0);
        case 2:
            return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        case 3:
            return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
                   m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
                   m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
        default:
            break;
    }
    Poly acc;
    for (int j = 0; j < n; ++j) {
        PolyMatrix minor(n - 1, n - 1);
        for (int i = 1; i < n; ++i) {
            for (int k = 0, c = 0; k < n; ++k) {
                if (k != j) minor(i - 1, c++) = m(i, k);
            }
        }
        const Poly term = m(0, j) * det_cofactor(minor);
        acc = (j % 2 == 0) ? acc + term : acc - term;
    }
    return acc;
}

Poly det_bareiss(const PolyMatrix& m) {
    const int n = m.rows();
    if (n == 0) {
        return Poly::constant(1.0);
    }
    PolyMatrix w = m;
    Poly prev = Poly::constant(1.0);
    double sign = 1.0;
    for (int k = 0; k < n - 1; ++k) {
        if (w(k, k).is_zero()) {
            int swap = -1;
            for (int r = k + 1; r < n; ++r) {
                if (!w(r, k).is_zero()) {
                    swap = r;
                    break;
                }
            }
            if (swap < 0) {
                return Poly();
            }
            for (int c = 0; c < n; ++c) {
                std::swap(w(k, c), w(swap, c));
            }
            sign = -sign;
        }
        for (int i = k + 1; i < n; ++i) {
            for (int j = k + 1; j < n; ++j) {
                const Poly num = w(i, j) * w(k, k) - w(i, k) * w(k, j);
                // Sylvester's identity makes this division exact.
                w(i, j) = poly_divmod(num, prev).quotient;
            }
            w(i, k) = Poly();
        }
        prev = w(k, k);
    }
    return w(n - 1, n - 1).scaled(sign);
}

}  // namespace detail

Poly polymatrix_det(const PolyMatrix& m) {
    if (m.rows() != m.cols()) {
        throw DimensionError("polymatrix_det: matrix is not square");
    }
    return m.rows() <= 3 ? detail::det_cofactor(m) : detail::det_bareiss(m);
}

ColumnStructure column_structure(const PolyMatrix& m) {
    ColumnStructure cs;
    cs.degrees.resize(static_cast<size_t>(m.cols()));
    cs.leading = Eigen::MatrixXd::Zero(m.rows(), m.cols());
    for (int j = 0; j < m.cols(); ++j) {
        int deg = -1;
        for (int i = 0; i < m.rows(); ++i) {
            deg = std::max(deg, m(i, j).degree());
        }
        if (deg < 0) {
            continue;
        }
        cs.degrees[j] = deg;
        for (int i = 0; i < m.rows(); ++i) {
            cs.leading(i, j) = m(i, j).coeff(deg);
        }
    }
    return cs;
}

bool is_column_reduced(const PolyMatrix& m) {
    const ColumnStructure cs = column_structure(m);
    for (size_t j = 0; j < cs.degrees.size(); ++j) {
        if (!cs.degrees[j]) {
            throw Error("is_column_reduced: column " + std::to_string(j) +
                        " is identically zero (degree undefined)");
        }
    }
    return numeric_rank(cs.leading) == m.cols();
}

int numeric_rank(const Eigen::MatrixXd& m) {
    if (m.size() == 0) {
        return 0;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv(0) : 0.0;
    if (smax == 0.0) {
        return 0;
    }
    const double thresh = smax * static_cast<double>(std::max(m.rows(), m.cols())) * 1e-10;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > thresh) ++r;
    }
    return r;
}

}  // namespace ilct

#include "ilct/ratmat.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ilct/errors.hpp"

namespace ilct {

namespace {

// Sum of |c_i||s|^i, the natural scale for judging |p(s)| small.
double magnitude_scale(const Poly& p, Complex s) {
    double acc = 0.0;
    double r = 1.0;
    const double as = std::abs(s);
    for (double c : p.coeffs()) {
        acc += std::abs(c) * r;
        r *= as;
    }
    return acc;
}

void require_same_shape(const RationalMatrix& a, const RationalMatrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(op) + ": dimension mismatch");
    }
}

RationalEntry entry_add(const RationalEntry& a, const RationalEntry& b) {
    if (a.num.is_zero()) return b;
    if (b.num.is_zero()) return a;
    if (approx_equal(a.den, b.den, 1e-12)) {
        return normalized(a.num + b.num, a.den);
    }
    return normalized(a.num * b.den + b.num * a.den, a.den * b.den);
}

RationalEntry entry_mul(const RationalEntry& a, const RationalEntry& b) {
    if (a.num.is_zero() || b.num.is_zero()) {
        return {Poly(), Poly::constant(1.0)};
    }
    return normalized(a.num * b.num, a.den * b.den);
}

}  // namespace

RationalEntry normalized(Poly num, Poly den) {
    if (den.is_zero()) {
        throw Error("rational entry with identically zero denominator");
    }
    if (num.is_zero()) {
        return {Poly(), Poly::constant(1.0)};
    }
    const double lead = den.leading();
    return {num.scaled(1.0 / lead), den.scaled(1.0 / lead)};
}

RationalEntry sum_entries(const std::vector<RationalEntry>& terms) {
    std::vector<Poly> dens;
    for (const auto& t : terms) {
        if (!t.num.is_zero()) dens.push_back(t.den);
    }
    if (dens.empty()) {
        return {Poly(), Poly::constant(1.0)};
    }
    const Poly l = common_denominator(dens);
    Poly num;
    for (const auto& t : terms) {
        if (t.num.is_zero()) continue;
        num = num + t.num * poly_divmod(l, t.den).quotient;
    }
    return normalized(std::move(num), l);
}

RationalMatrix::RationalMatrix(int rows, int cols)
    : rows_(rows),
      cols_(cols),
      entries_(static_cast<size_t>(rows) * cols, RationalEntry{Poly(), Poly::constant(1.0)}) {}

RationalMatrix::RationalMatrix(int rows, int cols, std::vector<RationalEntry> entries)
    : rows_(rows), cols_(cols) {
    if (static_cast<int>(entries.size()) != rows * cols) {
        throw DimensionError("RationalMatrix: entry count does not match rows x cols");
    }
    entries_.reserve(entries.size());
    for (auto& e : entries) {
        entries_.push_back(normalized(std::move(e.num), std::move(e.den)));
    }
}

RationalMatrix RationalMatrix::identity(int n) {
    return constant(Eigen::MatrixXd::Identity(n, n));
}

RationalMatrix RationalMatrix::constant(const Eigen::MatrixXd& k) {
    RationalMatrix m(static_cast<int>(k.rows()), static_cast<int>(k.cols()));
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            m.set(i, j, Poly::constant(k(i, j)), Poly::constant(1.0));
        }
    }
    return m;
}

RationalMatrix RationalMatrix::column(std::vector<RationalEntry> entries) {
    const int n = static_cast<int>(entries.size());
    return RationalMatrix(n, 1, std::move(entries));
}

void RationalMatrix::set(int i, int j, Poly num, Poly den) {
    entries_[i * cols_ + j] = normalized(std::move(num), std::move(den));
}

Eigen::MatrixXcd RationalMatrix::eval(Complex s) const {
    Eigen::MatrixXcd out(rows_, cols_);
    for (int i = 0; i < rows_; ++i) {
        for (int j = 0; j < cols_; ++j) {
            const RationalEntry& e = (*this)(i, j);
            const Complex d = e.den(s);
            if (std::abs(d) <= 1e-12 * magnitude_scale(e.den, s)) {
                throw PoleError(i, j,
                                "rm_eval: entry (" + std::to_string(i) + "," + std::to_string(j) +
                                    ") has a pole at the evaluation point");
            }
            out(i, j) = e.num(s) / d;
        }
    }
    return out;
}

double RationalMatrix::pole_clearance(Complex s) const {
    double clearance = 1.0;
    for (const auto& e : entries_) {
        if (e.den.degree() <= 0) continue;
        clearance = std::min(clearance, std::abs(e.den(s)) / magnitude_scale(e.den, s));
    }
    return clearance;
}

RationalMatrix RationalMatrix::block(int row, int col, int nrows, int ncols) const {
    if (row < 0 || col < 0 || row + nrows > rows_ || col + ncols > cols_) {
        throw DimensionError("RationalMatrix::block out of range");
    }
    std::vector<RationalEntry> e;
    e.reserve(static_cast<size_t>(nrows) * ncols);
    for (int i = 0; i < nrows; ++i) {
        for (int j = 0; j < ncols; ++j) {
            e.push_back((*this)(row + i, col + j));
        }
    }
    return RationalMatrix(nrows, ncols, std::move(e));
}

RationalMatrix RationalMatrix::select_columns(const std::vector<int>& cols) const {
    std::vector<RationalEntry> e;
    for (int i = 0; i < rows_; ++i) {
        for (int c : cols) {
            if (c < 0 || c >= cols_) throw DimensionError("select_columns: index out of range");
            e.push_back((*this)(i, c));
        }
    }
    return RationalMatrix(rows_, static_cast<int>(cols.size()), std::move(e));
}

RationalMatrix RationalMatrix::select_rows(const std::vector<int>& rows) const {
    std::vector<RationalEntry> e;
    for (int r : rows) {
        if (r < 0 || r >= rows_) throw DimensionError("select_rows: index out of range");
        for (int j = 0; j < cols_; ++j) {
            e.push_back((*this)(r, j));
        }
    }
    return RationalMatrix(static_cast<int>(rows.size()), cols_, std::move(e));
}

Eigen::MatrixXcd rm_eval(const RationalMatrix& g, Complex s0) { return g.eval(s0); }

PropernessClass rm_classify(const RationalMatrix& g) {
    PropernessClass pc;
    Eigen::MatrixXd limit = Eigen::MatrixXd::Zero(g.rows(), g.cols());
    for (int i = 0; i < g.rows(); ++i) {
        for (int j = 0; j < g.cols(); ++j) {
            const RationalEntry& e = g(i, j);
            if (e.num.degree() > e.den.degree()) {
                return pc;
            }
            if (e.num.degree() == e.den.degree()) {
                limit(i, j) = e.num.leading() / e.den.leading();
            }
        }
    }
    pc.kind = limit.isZero(0.0) ? Properness::strictly_proper : Properness::proper;
    pc.limit = std::move(limit);
    return pc;
}

std::vector<Eigen::MatrixXd> rm_markov(const RationalMatrix& g, int count) {
    if (rm_classify(g).kind != Properness::strictly_proper) {
        throw ProperError("rm_markov: matrix is not strictly proper");
    }
    std::vector<Eigen::MatrixXd> out(static_cast<size_t>(count),
                                     Eigen::MatrixXd::Zero(g.rows(), g.cols()));
    for (int i = 0; i < g.rows(); ++i) {
        for (int j = 0; j < g.cols(); ++j) {
            const RationalEntry& e = g(i, j);
            if (e.num.is_zero()) continue;
            // num = den * sum_k h_k s^-(k+1), den monic of degree n:
            // h_m = b_{n-1-m} - sum_{k<m} a_{n-m+k} h_k.
            const int n = e.den.degree();
            std::vector<double> h(static_cast<size_t>(count), 0.0);
            for (int m = 0; m < count; ++m) {
                double v = e.num.coeff(n - 1 - m);
                for (int k = 0; k < m; ++k) {
                    v -= e.den.coeff(n - m + k) * h[k];
                }
                h[m] = v;
                out[m](i, j) = v;
            }
        }
    }
    return out;
}

bool rm_relative_degree_one(const RationalMatrix& g) {
    const Eigen::MatrixXd phi0 = rm_markov(g, 1).front();
    return numeric_rank(phi0) == std::min(g.rows(), g.cols());
}

RationalMatrix rm_add(const RationalMatrix& a, const RationalMatrix& b) {
    require_same_shape(a, b, "rm_add");
    std::vector<RationalEntry> e;
    e.reserve(a.entries().size());
    for (size_t k = 0; k < a.entries().size(); ++k) {
        e.push_back(entry_add(a.entries()[k], b.entries()[k]));
    }
    return RationalMatrix(a.rows(), a.cols(), std::move(e));
}

RationalMatrix rm_sub(const RationalMatrix& a, const RationalMatrix& b) {
    return rm_add(a, rm_scale(b, -1.0));
}

RationalMatrix rm_mul(const RationalMatrix& a, const RationalMatrix& b) {
    if (a.cols() != b.rows()) {
        throw DimensionError("rm_mul: inner dimensions differ");
    }
    std::vector<RationalEntry> e;
    e.reserve(static_cast<size_t>(a.rows()) * b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < b.cols(); ++j) {
            RationalEntry acc{Poly(), Poly::constant(1.0)};
            for (int k = 0; k < a.cols(); ++k) {
                acc = entry_add(acc, entry_mul(a(i, k), b(k, j)));
            }
            e.push_back(std::move(acc));
        }
    }
    return RationalMatrix(a.rows(), b.cols(), std::move(e));
}

RationalMatrix rm_transpose(const RationalMatrix& a) {
    std::vector<RationalEntry> e;
    e.reserve(a.entries().size());
    for (int j = 0; j < a.cols(); ++j) {
        for (int i = 0; i < a.rows(); ++i) {
            e.push_back(a(i, j));
        }
    }
    return RationalMatrix(a.cols(), a.rows(), std::move(e));
}

RationalMatrix rm_times_s(const RationalMatrix& a) {
    std::vector<RationalEntry> e;
    e.reserve(a.entries().size());
    const Poly s{0.0, 1.0};
    for (const auto& x : a.entries()) {
        if (x.num.is_zero()) {
            e.push_back(x);
        } else if (x.den.degree() > 0 && x.den.coeff(0) == 0.0) {
            e.push_back({x.num, poly_divmod(x.den, s).quotient});
        } else {
            e.push_back({x.num * s, x.den});
        }
    }
    return RationalMatrix(a.rows(), a.cols(), std::move(e));
}

RationalMatrix rm_divide_by_s(const RationalMatrix& a) {
    std::vector<RationalEntry> e;
    e.reserve(a.entries().size());
    const Poly s{0.0, 1.0};
    for (const auto& x : a.entries()) {
        if (x.num.is_zero()) {
            e.push_back(x);
        } else if (x.num.degree() > 0 && x.num.coeff(0) == 0.0) {
            e.push_back({poly_divmod(x.num, s).quotient, x.den});
        } else {
            e.push_back({x.num, x.den * s});
        }
    }
    return RationalMatrix(a.rows(), a.cols(), std::move(e));
}

RationalMatrix rm_scale(const RationalMatrix& a, double c) {
    std::vector<RationalEntry> e;
    e.reserve(a.entries().size());
    for (const auto& x : a.entries()) {
        e.push_back({x.num.scaled(c), x.den});
    }
    return RationalMatrix(a.rows(), a.cols(), std::move(e));
}

RationalMatrix rm_algebra(const RationalMatrix& a, const RationalMatrix& b, RmOp op) {
    switch (op) {
        case RmOp::add:
            return rm_add(a, b);
        case RmOp::mul:
            return rm_mul(a, b);
        case RmOp::transpose:
            return rm_transpose(a);
        case RmOp::scalar_s_mul:
            return rm_times_s(a);
    }
    throw Error("rm_algebra: unknown op");
}

Complex ProbeSampler::next() {
    std::uniform_real_distribution<double> radius(kMinRadius, kMaxRadius);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        const Complex s = std::polar(radius(rng_), angle(rng_));
        if (std::abs(s.imag()) < 0.05 * std::abs(s)) {
            continue;
        }
        bool ok = true;
        for (const auto& g : avoid_) {
            if (g.pole_clearance(s) < 1e-6) {
                ok = false;
                break;
            }
        }
        if (ok) {
            return s;
        }
    }
    throw Error("ProbeSampler: every candidate probe point hit a pole (64 attempts)");
}

std::vector<Complex> ProbeSampler::draw(int count) {
    std::vector<Complex> pts;
    pts.reserve(static_cast<size_t>(count));
    for (int i = 0; i < count; ++i) {
        pts.push_back(next());
    }
    return pts;
}

bool rm_is_nonsingular(const RationalMatrix& g, std::uint64_t seed) {
    if (g.rows() != g.cols()) {
        throw DimensionError("rm_is_nonsingular: matrix is not square");
    }
    ProbeSampler sampler(seed);
    sampler.avoid_poles_of(g);
    for (const Complex s : sampler.draw(8)) {
        const Eigen::MatrixXcd m = g.eval(s);
        double hadamard = 1.0;
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            hadamard *= m.row(i).norm();
        }
        if (hadamard > 0.0 && std::abs(m.determinant()) > 1e-8 * hadamard) {
            return true;
        }
    }
    return false;
}

Eigen::MatrixXcd solve_pointwise(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& rhs) {
    if (a.rows() != a.cols() || a.rows() != rhs.rows()) {
        throw DimensionError("solve_pointwise: nonconformable operands");
    }
    Eigen::FullPivLU<Eigen::MatrixXcd> lu(a);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) {
        throw SingularError("solve_pointwise: matrix is singular at the probe point");
    }
    return lu.solve(rhs);
}

Eigen::MatrixXcd rm_solve_pointwise(const RationalMatrix& a, const RationalMatrix& rhs, Complex s0) {
    if (a.rows() != a.cols() || a.rows() != rhs.rows()) {
        throw DimensionError("rm_solve_pointwise: nonconformable operands");
    }
    return solve_pointwise(a.eval(s0), rhs.eval(s0));
}

}  // namespace ilct

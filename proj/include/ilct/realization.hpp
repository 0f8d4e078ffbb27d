#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ilct/poly.hpp"
#include "ilct/ratmat.hpp"

namespace ilct {

// x' = A x + B u, y = C x + D u
struct StateSpace {
    Eigen::MatrixXd A;
    Eigen::MatrixXd B;
    Eigen::MatrixXd C;
    Eigen::MatrixXd D;

    int states() const { return static_cast<int>(A.rows()); }
    int inputs() const { return static_cast<int>(D.cols()); }
    int outputs() const { return static_cast<int>(D.rows()); }

    // Throws DimensionError when the four blocks do not conform.
    void validate() const;
    // C (sI - A)^{-1} B + D
    Eigen::MatrixXcd eval(Complex s) const;
};

// Column-wise controllable canonical realization. Each input column gets a
// companion block built on a common denominator of that column. The result
// is checked against g at 8 probe points (relative 1e-6).
StateSpace realize(const RationalMatrix& g, std::uint64_t seed = 7);

// C A^j B for j = 0..count-1.
std::vector<Eigen::MatrixXd> markov_from_ss(const StateSpace& ss, int count);

// alpha(s) = det(sI - A) and Q(s) = alpha(s) C (sI - A)^{-1} B assembled from
// the Markov parameters: Q(s) = sum_{i=0}^{n} alpha_i sum_{j<i} C A^j B s^{i-1-j}.
struct MarkovNumerator {
    Poly alpha;
    PolyMatrix q;
};

MarkovNumerator markov_numerator(const StateSpace& ss);

// Q(s)/alpha(s) as a rational matrix, i.e. C (sI - A)^{-1} B.
RationalMatrix transfer_matrix(const StateSpace& ss);

// Interconnections used to build the limit-input and limit-error operators.
StateSpace ss_static(const Eigen::MatrixXd& d);
// second(first(u))
StateSpace ss_series(const StateSpace& first, const StateSpace& second);
StateSpace ss_parallel(const StateSpace& a, const StateSpace& b);
StateSpace ss_negate(const StateSpace& a);
// Inverse system; requires square invertible D.
StateSpace ss_inverse(const StateSpace& a);
// s G(s) for strictly proper G: (A, B, CA, CB).
StateSpace ss_times_s(const StateSpace& a);
// Strictly proper part: D dropped.
StateSpace ss_strictly_proper_part(const StateSpace& a);

}  // namespace ilct

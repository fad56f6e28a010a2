#pragma once

#include <Eigen/Core>

#include "txlr/tensor.hpp"

namespace txlr {

/// Singular-value hard thresholding: the best rank-<=r approximation of `m`
/// (all singular values past index r discarded). Returns `m` unchanged when r
/// is at least min(rows, cols).
///
/// Computed from the eigen-decomposition of the smaller Gram matrix followed
/// by a projection onto the leading r singular vectors, which is the same
/// operator as a truncated SVD. Throws NumericalError if LAPACK fails and
/// ParameterError if r < 1.
Matrix svt(const Matrix &m, Index r);

/// svt(m, r) as a product left * right with r inner columns, so callers can
/// accumulate it without a full-size temporary. Requires 1 <= r < min(rows, cols).
struct LowRankFactors {
  Matrix left;
  Matrix right;
};
LowRankFactors svt_factors(const Matrix &m, Index r);

/// All singular values of `m`, descending (LAPACK zgesdd, values only).
Eigen::VectorXd singular_values(const Matrix &m);

}  // namespace txlr

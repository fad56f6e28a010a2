#include "txlr/svt.hpp"

#include <cblas.h>
#include <lapacke.h>

#include <algorithm>
#include <string>

namespace txlr {

namespace {

lapack_complex_double *lp(cplx *p) { return reinterpret_cast<lapack_complex_double *>(p); }

// Upper triangle of m m^H (rows <= cols) or m^H m (rows > cols).
Matrix gram(const Matrix &m) {
  const bool wide = m.rows() <= m.cols();
  const auto n = static_cast<int>(wide ? m.rows() : m.cols());
  const auto k = static_cast<int>(wide ? m.cols() : m.rows());
  Matrix g(n, n);
  cblas_zherk(CblasColMajor, CblasUpper, wide ? CblasNoTrans : CblasConjTrans, n, k, 1.0, m.data(),
              static_cast<int>(m.rows()), 0.0, g.data(), n);
  return g;
}

// Tridiagonal reduction of the Gram matrix, MRRR for the eigenvectors of the
// r largest eigenvalues only (zheevr with an index range takes the slower
// bisection path), then back-transformation of just those columns. Returns
// false if LAPACK reports a failure.
bool tridiagonal_route(Matrix &g, Index r, Matrix &out) {
  const auto n = static_cast<lapack_int>(g.rows());
  const auto k = static_cast<lapack_int>(r);
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(std::max<lapack_int>(n, 1));
  Matrix tau(std::max<lapack_int>(n - 1, 1), 1);
  if (LAPACKE_zhetrd(LAPACK_COL_MAJOR, 'U', n, lp(g.data()), n, diag.data(), off.data(), lp(tau.data())) != 0)
    return false;
  Eigen::MatrixXd zr(n, k);
  Eigen::VectorXd w(n);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(k));
  lapack_int found = 0;
  lapack_int tryrac = 1;
  if (LAPACKE_dstemr(LAPACK_COL_MAJOR, 'V', 'I', n, diag.data(), off.data(), 0.0, 0.0, n - k + 1, n, &found, w.data(),
                     zr.data(), n, k, support.data(), &tryrac) != 0 ||
      found != k)
    return false;
  out = zr.cast<cplx>();
  return LAPACKE_zunmtr(LAPACK_COL_MAJOR, 'L', 'U', 'N', n, k, lp(g.data()), n, lp(tau.data()), lp(out.data()), n) == 0;
}

// Leading r eigenvectors (largest eigenvalues) of the Gram matrix of `m`,
// in ascending eigenvalue order. zheevr is the fallback when the tridiagonal
// route fails.
Matrix leading_eigenvectors(const Matrix &m, Index r) {
  Matrix g = gram(m);
  // a non-finite entry of m reaches the diagonal of its Gram matrix
  if (!g.diagonal().allFinite()) throw NumericalError("svt: input contains non-finite values");
  Matrix z;
  if (tridiagonal_route(g, r, z)) return z;

  g = gram(m);
  const auto n = static_cast<lapack_int>(g.rows());
  const auto k = static_cast<lapack_int>(r);
  Eigen::VectorXd w(n);
  z.resize(n, r);
  std::vector<lapack_int> support(2 * static_cast<std::size_t>(std::max<lapack_int>(n, 1)));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_zheevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', n, lp(g.data()), n, 0.0, 0.0, n - k + 1, n,
                                         0.0, &found, w.data(), lp(z.data()), n, support.data());
  if (info != 0 || found != k) {
    throw NumericalError("svt: zheevr failed on " + std::to_string(n) + "x" + std::to_string(n) +
                         " Gram matrix (info=" + std::to_string(info) + ", found " + std::to_string(found) + " of " +
                         std::to_string(r) + ")");
  }
  return z;
}

void check_rank(Index r) {
  if (r < 1) throw ParameterError("svt: rank threshold must be >= 1, got " + std::to_string(r));
}
}  // namespace

Matrix svt(const Matrix &m, Index r) {
  check_rank(r);
  if (r >= std::min(m.rows(), m.cols())) return m;

  if (m.rows() <= m.cols()) {
    const Matrix u = leading_eigenvectors(m, r);
    const Matrix coeffs = u.adjoint() * m;
    return u * coeffs;
  }
  const Matrix v = leading_eigenvectors(m, r);
  const Matrix coeffs = m * v;
  return coeffs * v.adjoint();
}

LowRankFactors svt_factors(const Matrix &m, Index r) {
  check_rank(r);
  if (r >= std::min(m.rows(), m.cols())) {
    throw ParameterError("svt_factors: rank " + std::to_string(r) + " does not truncate a " + std::to_string(m.rows()) +
                         "x" + std::to_string(m.cols()) + " matrix");
  }
  if (m.rows() <= m.cols()) {
    Matrix u = leading_eigenvectors(m, r);
    Matrix coeffs = u.adjoint() * m;
    return {std::move(u), std::move(coeffs)};
  }
  const Matrix v = leading_eigenvectors(m, r);
  return {m * v, v.adjoint()};
}

Eigen::VectorXd singular_values(const Matrix &m) {
  Matrix a = m;
  const auto rows = static_cast<lapack_int>(a.rows());
  const auto cols = static_cast<lapack_int>(a.cols());
  Eigen::VectorXd s(std::min(rows, cols));
  if (s.size() == 0) return s;
  const lapack_int info =
      LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'N', rows, cols, lp(a.data()), rows, s.data(), nullptr, 1, nullptr, 1);
  if (info != 0) {
    throw NumericalError("singular_values: zgesdd failed on " + std::to_string(rows) + "x" + std::to_string(cols) +
                         " matrix (info=" + std::to_string(info) + ")");
  }
  return s;
}

}  // namespace txlr

#pragma once

// Thin LAPACKE wrappers over Eigen containers. Inputs are taken by value:
// LAPACK overwrites its operands, and the callers keep their copies.

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <string>
#include <vector>

#include "qhb/types.hpp"

namespace qhb::lapack {

inline void check_info(lapack_int info, const char* routine) {
  if (info != 0)
    throw SolverError(std::string(routine) + " failed, info = " +
                      std::to_string(info));
}

struct Eigensystem {
  Vec values;
  Mat vectors;  // columns; empty when not requested
};

// Dense complex general eigenproblem (right eigenvectors).
inline Eigensystem zgeev(Mat a, bool with_vectors = true) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  Eigensystem out;
  out.values.resize(n);
  if (with_vectors) out.vectors.resize(n, n);
  lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', with_vectors ? 'V' : 'N', n, a.data(), n,
      out.values.data(), nullptr, 1,
      with_vectors ? out.vectors.data() : nullptr, with_vectors ? n : 1);
  check_info(info, "zgeev");
  return out;
}

struct Svd {
  RealVec singular_values;  // descending
  Mat u;
  Mat vh;
};

inline Svd zgesdd(Mat a) {
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  const lapack_int k = std::min(m, n);
  Svd out;
  out.singular_values.resize(k);
  out.u.resize(m, k);
  out.vh.resize(k, n);
  lapack_int info =
      LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, n, a.data(), m,
                     out.singular_values.data(), out.u.data(), m,
                     out.vh.data(), k);
  check_info(info, "zgesdd");
  return out;
}

// LU factorization kept for repeated solves (shift-invert, K application).
class ZLu {
 public:
  explicit ZLu(Mat a) : lu_(std::move(a)), ipiv_(lu_.rows()) {
    const lapack_int n = static_cast<lapack_int>(lu_.rows());
    lapack_int info =
        LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, lu_.data(), n, ipiv_.data());
    check_info(info, "zgetrf");
  }

  void solve_in_place(Mat& b) const {
    const lapack_int n = static_cast<lapack_int>(lu_.rows());
    const lapack_int nrhs = static_cast<lapack_int>(b.cols());
    lapack_int info = LAPACKE_zgetrs(LAPACK_COL_MAJOR, 'N', n, nrhs,
                                     lu_.data(), n, ipiv_.data(), b.data(), n);
    check_info(info, "zgetrs");
  }

  Vec solve(const Vec& b) const {
    Mat tmp = b;
    solve_in_place(tmp);
    return tmp.col(0);
  }

  Mat inverse() const {
    Mat inv = lu_;
    const lapack_int n = static_cast<lapack_int>(inv.rows());
    std::vector<lapack_int> piv = ipiv_;
    lapack_int info =
        LAPACKE_zgetri(LAPACK_COL_MAJOR, n, inv.data(), n, piv.data());
    check_info(info, "zgetri");
    return inv;
  }

 private:
  Mat lu_;
  std::vector<lapack_int> ipiv_;
};

struct RealEigensystem {
  RealVec values;  // ascending
  RealMat vectors;
};

// Dense real symmetric eigenproblem.
inline RealEigensystem dsyev(RealMat a, bool with_vectors = true) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  RealEigensystem out;
  out.values.resize(n);
  lapack_int info = LAPACKE_dsyev(LAPACK_COL_MAJOR, with_vectors ? 'V' : 'N',
                                  'L', n, a.data(), n, out.values.data());
  check_info(info, "dsyev");
  if (with_vectors) out.vectors = std::move(a);
  return out;
}

struct GeneralizedPair {
  Complex alpha;
  double beta;
  RealVec vector_re;  // real part of the right eigenvector
  RealVec vector_im;
};

// Real generalized eigenproblem A x = lambda B x via QZ. Complex conjugate
// pairs come back with alpha.imag != 0 and packed eigenvectors, which the
// caller classifies.
inline std::vector<GeneralizedPair> dggev(RealMat a, RealMat b) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  RealVec ar(n), ai(n), be(n);
  RealMat vr(n, n);
  lapack_int info = LAPACKE_dggev(LAPACK_COL_MAJOR, 'N', 'V', n, a.data(), n,
                                  b.data(), n, ar.data(), ai.data(), be.data(),
                                  nullptr, 1, vr.data(), n);
  check_info(info, "dggev");
  std::vector<GeneralizedPair> out(n);
  for (lapack_int i = 0; i < n; ++i) {
    out[i].alpha = Complex(ar[i], ai[i]);
    out[i].beta = be[i];
    if (ai[i] == 0.0) {
      out[i].vector_re = vr.col(i);
      out[i].vector_im = RealVec::Zero(n);
    } else if (i + 1 < n && ai[i] > 0.0) {
      out[i].vector_re = vr.col(i);
      out[i].vector_im = vr.col(i + 1);
      out[i + 1].vector_re = vr.col(i);
      out[i + 1].vector_im = -vr.col(i + 1);
    }
  }
  return out;
}

struct ComplexGeneralizedPair {
  Complex alpha;
  Complex beta;
  Vec vector;
};

inline std::vector<ComplexGeneralizedPair> zggev(Mat a, Mat b) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  Vec alpha(n), beta(n);
  Mat vr(n, n);
  lapack_int info =
      LAPACKE_zggev(LAPACK_COL_MAJOR, 'N', 'V', n, a.data(), n, b.data(), n,
                    alpha.data(), beta.data(), nullptr, 1, vr.data(), n);
  check_info(info, "zggev");
  std::vector<ComplexGeneralizedPair> out(n);
  for (lapack_int i = 0; i < n; ++i)
    out[i] = {alpha[i], beta[i], vr.col(i)};
  return out;
}

}  // namespace qhb::lapack

#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#define LAPACK_COMPLEX_CPP
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "nbt/error.hpp"

namespace nbt {

using cplx = std::complex<double>;
using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor>;
using CVector = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;

struct EigenPairs {
  CVector values;
  CMatrix vectors;
};

// Dense non-symmetric eigensolver (zgeev). Vectors are right eigenvectors.
inline EigenPairs eig_right(CMatrix a, bool want_vectors = true) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  if (a.cols() != a.rows()) throw Error(ErrorCode::Size, "eig_right: matrix not square");
  EigenPairs out;
  out.values.resize(n);
  if (want_vectors) out.vectors.resize(n, n);
  cplx dummy{};
  lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', want_vectors ? 'V' : 'N', n, a.data(), n,
                                  out.values.data(), &dummy, 1,
                                  want_vectors ? out.vectors.data() : &dummy, n);
  if (info != 0) throw Error(ErrorCode::Solver, "zgeev failed, info=" + std::to_string(info));
  return out;
}

inline CVector eigvals(const CMatrix& a) { return eig_right(a, false).values; }

}  // namespace nbt

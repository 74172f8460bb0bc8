/* SPDX-License-Identifier: Apache-2.0 */
#ifndef OPFIELD_DENSELIN_HPP
#define OPFIELD_DENSELIN_HPP

//
// Dense kernels on single fibers: Hermitian eigendecomposition, SVD, polar
// decomposition, rank detection. Eigen does the factorizations; this layer
// fixes ordering, tolerances and the partial-isometry convention.
//

#include <Eigen/Dense>

#include "opfield/types.hpp"

namespace opfield::denselin {

inline constexpr double default_hermitian_tol = 1e-10;

// Eigensystem of a selfadjoint fiber, eigenvalues sorted descending.
template <typename Scalar>
struct EigSystem {
  FiberVector<RealOf<Scalar>> values;
  FiberMatrix<Scalar> vectors;  // column k pairs with values[k]
};

// Singular system of a fiber, singular values sorted descending.
template <typename Scalar>
struct SvdSystem {
  FiberVector<RealOf<Scalar>> sigma;
  FiberMatrix<Scalar> left;
  FiberMatrix<Scalar> right;  // A = left * sigma.asDiagonal() * right.adjoint()

  FiberMatrix<Scalar> reconstruct() const {
    return left * sigma.template cast<Scalar>().asDiagonal() * right.adjoint();
  }
};

// Polar factors A = partial_isometry * absolute, with absolute = (A^H A)^{1/2}
// and the isometry vanishing on singular directions with sigma <= rank_tol.
template <typename Scalar>
struct PolarDecomposition {
  FiberMatrix<Scalar> partial_isometry;
  FiberMatrix<Scalar> absolute;
};

template <typename Scalar>
RealOf<Scalar> default_rank_tol(Index dim, RealOf<Scalar> sigma_max) {
  return static_cast<RealOf<Scalar>>(dim) *
         Eigen::NumTraits<RealOf<Scalar>>::epsilon() * sigma_max;
}

template <typename Scalar>
EigSystem<Scalar> hermitian_eig(const FiberMatrix<Scalar>& a,
                                RealOf<Scalar> tol_lin = RealOf<Scalar>(default_hermitian_tol)) {
  using Real = RealOf<Scalar>;
  if (a.rows() != a.cols()) throw contract_error("hermitian_eig: matrix must be square");
  const Real scale = a.norm();
  if ((a - a.adjoint()).norm() > tol_lin * std::max<Real>(scale, Real(1)))
    throw contract_error("hermitian_eig: input is not selfadjoint within tolerance");
  Eigen::SelfAdjointEigenSolver<FiberMatrix<Scalar>> solver(
      ((a + a.adjoint()) / Scalar(2)).eval());
  if (solver.info() != Eigen::Success) throw contract_error("hermitian_eig: solver failed");
  const Index d = a.rows();
  EigSystem<Scalar> sys;
  sys.values.resize(d);
  sys.vectors.resize(d, d);
  for (Index k = 0; k < d; ++k) {  // Eigen sorts ascending; flip to descending
    sys.values[k] = solver.eigenvalues()[d - 1 - k];
    sys.vectors.col(k) = solver.eigenvectors().col(d - 1 - k);
  }
  return sys;
}

template <typename Scalar>
SvdSystem<Scalar> svd(const FiberMatrix<Scalar>& a) {
  Eigen::JacobiSVD<FiberMatrix<Scalar>> solver(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  SvdSystem<Scalar> sys;
  sys.sigma = solver.singularValues();
  sys.left = solver.matrixU();
  sys.right = solver.matrixV();
  return sys;
}

template <typename Scalar>
PolarDecomposition<Scalar> polar(const FiberMatrix<Scalar>& a, RealOf<Scalar> rank_tol = -1) {
  if (a.rows() != a.cols()) throw contract_error("polar: matrix must be square");
  const auto sys = svd(a);
  const Index d = a.rows();
  if (rank_tol < 0)
    rank_tol = d > 0 ? default_rank_tol<Scalar>(d, sys.sigma.size() ? sys.sigma[0] : 0) : 0;
  PolarDecomposition<Scalar> pd;
  pd.partial_isometry = FiberMatrix<Scalar>::Zero(d, d);
  for (Index k = 0; k < sys.sigma.size(); ++k) {
    if (sys.sigma[k] > rank_tol)
      pd.partial_isometry += sys.left.col(k) * sys.right.col(k).adjoint();
  }
  FiberMatrix<Scalar> abs_a = sys.right *
                              sys.sigma.template cast<Scalar>().asDiagonal() *
                              sys.right.adjoint();
  pd.absolute = ((abs_a + abs_a.adjoint()) / Scalar(2)).eval();
  return pd;
}

}  // namespace opfield::denselin

#endif  // OPFIELD_DENSELIN_HPP

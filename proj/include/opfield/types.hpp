/* SPDX-License-Identifier: Apache-2.0 */
#ifndef OPFIELD_TYPES_HPP
#define OPFIELD_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace opfield {

using Index = Eigen::Index;

// Single-fiber dense types. A fiber is the value of a field at one point of
// the parameter space: a d-vector or a d x d matrix over the scalar.
template <typename Scalar>
using FiberMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using FiberVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using RealOf = typename Eigen::NumTraits<Scalar>::Real;

using cd = std::complex<double>;
using FiberMatrixXcd = FiberMatrix<cd>;
using FiberVectorXcd = FiberVector<cd>;

// Thrown when an operation's precondition is violated (shape mismatch,
// unknown point label, non-selfadjoint input, invalid exponent, ...).
class contract_error : public std::invalid_argument {
 public:
  explicit contract_error(const std::string& what) : std::invalid_argument(what) {}
};

namespace detail {

template <typename Scalar>
RealOf<Scalar> abs2(const Scalar& z) {
  return Eigen::numext::abs2(z);
}

}  // namespace detail

}  // namespace opfield

#endif  // OPFIELD_TYPES_HPP

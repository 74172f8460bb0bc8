/* SPDX-License-Identifier: Apache-2.0 */
#ifndef OPFIELD_RANDOM_HPP
#define OPFIELD_RANDOM_HPP

//
// Seeded instance generators for randomized checks. Complex entries have
// independent standard normal real and imaginary parts; positivity is
// obtained as u^* u. The normal transform is hand-rolled (Box-Muller over
// the raw mt19937_64 stream) so that a seed pins the byte-exact instance
// independently of the standard library.
//

#include <cmath>
#include <random>

#include "opfield/fieldcore.hpp"

namespace opfield {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // uniform in [0, 1)
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    have_spare_ = true;
    return r * std::cos(2.0 * M_PI * u2);
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0;
  bool have_spare_ = false;
};

namespace detail {

template <typename Scalar>
Scalar random_entry(Rng& rng) {
  if constexpr (Eigen::NumTraits<Scalar>::IsComplex) {
    const double re = rng.normal();
    const double im = rng.normal();
    return Scalar(typename Eigen::NumTraits<Scalar>::Real(re),
                  typename Eigen::NumTraits<Scalar>::Real(im));
  } else {
    return Scalar(rng.normal());
  }
}

}  // namespace detail

template <typename Scalar>
FiberMatrix<Scalar> random_matrix(Index rows, Index cols, Rng& rng) {
  FiberMatrix<Scalar> m(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) m(i, j) = detail::random_entry<Scalar>(rng);
  return m;
}

// Haar-ish unitary: QR of a Gaussian matrix with the R diagonal phase folded
// into Q so the draw is basis-stable.
template <typename Scalar>
FiberMatrix<Scalar> random_unitary(Index dim, Rng& rng) {
  const FiberMatrix<Scalar> g = random_matrix<Scalar>(dim, dim, rng);
  Eigen::HouseholderQR<FiberMatrix<Scalar>> qr(g);
  FiberMatrix<Scalar> q = qr.householderQ();
  const FiberMatrix<Scalar> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Index k = 0; k < dim; ++k) {
    const auto d = r(k, k);
    const auto a = Eigen::numext::abs(d);
    if (a > 0) q.col(k) *= d / Scalar(a);
  }
  return q;
}

template <typename Scalar>
ScalarField<Scalar> random_scalar_field(const SpacePtr& space, Rng& rng) {
  FiberVector<Scalar> v(space->size());
  for (Index k = 0; k < v.size(); ++k) v[k] = detail::random_entry<Scalar>(rng);
  return ScalarField<Scalar>(space, std::move(v));
}

template <typename Scalar>
VectorField<Scalar> random_vector_field(const SpacePtr& space, Index dim, Rng& rng,
                                        MaskOpt mask = {}) {
  return VectorField<Scalar>(space, random_matrix<Scalar>(dim, space->size(), rng),
                             std::move(mask));
}

template <typename Scalar>
OperatorField<Scalar> random_operator_field(const SpacePtr& space, Index dim, Rng& rng,
                                            MaskOpt mask = {}) {
  std::vector<FiberMatrix<Scalar>> f;
  f.reserve(static_cast<size_t>(space->size()));
  for (Index k = 0; k < space->size(); ++k) f.push_back(random_matrix<Scalar>(dim, dim, rng));
  return OperatorField<Scalar>(space, std::move(f), std::move(mask));
}

template <typename Scalar>
OperatorField<Scalar> random_positive_field(const SpacePtr& space, Index dim, Rng& rng,
                                            MaskOpt mask = {}) {
  auto u = random_operator_field<Scalar>(space, dim, rng, std::move(mask));
  return adjoint(u) * u;
}

template <typename Scalar>
OperatorField<Scalar> random_selfadjoint_field(const SpacePtr& space, Index dim, Rng& rng) {
  auto u = random_operator_field<Scalar>(space, dim, rng);
  return Scalar(0.5) * (u + adjoint(u));
}

}  // namespace opfield

#endif  // OPFIELD_RANDOM_HPP

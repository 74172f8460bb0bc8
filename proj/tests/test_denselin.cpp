/* SPDX-License-Identifier: Apache-2.0 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opfield/denselin.hpp"
#include "opfield/random.hpp"

using namespace opfield;
using namespace opfield::denselin;

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

FiberMatrixXcd diag2(double a, double b) {
  FiberMatrixXcd m = FiberMatrixXcd::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_CASE("hermitian_eig on closed forms") {
  auto sys = hermitian_eig<cd>(diag2(3, 1));
  CHECK(sys.values[0] == doctest::Approx(3.0));
  CHECK(sys.values[1] == doctest::Approx(1.0));
  CHECK(std::abs(sys.vectors(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(sys.vectors(1, 1)) == doctest::Approx(1.0));

  // [[0,1],[1,0]]: eigenvalues (1,-1), eigenvectors (1,1)/sqrt2 and (1,-1)/sqrt2
  FiberMatrixXcd flip(2, 2);
  flip << cd(0), cd(1), cd(1), cd(0);
  auto fs = hermitian_eig<cd>(flip);
  CHECK(fs.values[0] == doctest::Approx(1.0));
  CHECK(fs.values[1] == doctest::Approx(-1.0));
  const double isq = 1.0 / std::sqrt(2.0);
  // compare as projections; eigenvectors are unique only up to phase
  FiberVectorXcd plus(2), minus(2);
  plus << cd(isq), cd(isq);
  minus << cd(isq), cd(-isq);
  CHECK((fs.vectors.col(0) * fs.vectors.col(0).adjoint() - plus * plus.adjoint()).norm() < 1e-14);
  CHECK((fs.vectors.col(1) * fs.vectors.col(1).adjoint() - minus * minus.adjoint()).norm() < 1e-14);
}

TEST_CASE("hermitian_eig residual and orthonormality on random input") {
  Rng rng(101);
  const Index d = 8;
  FiberMatrixXcd g = random_matrix<cd>(d, d, rng);
  FiberMatrixXcd a = (g + g.adjoint()) / 2.0;
  auto sys = hermitian_eig<cd>(a);
  FiberMatrixXcd rec = sys.vectors * sys.values.cast<cd>().asDiagonal() * sys.vectors.adjoint();
  CHECK((a - rec).norm() <= 10 * d * eps * a.norm());
  CHECK((sys.vectors.adjoint() * sys.vectors - FiberMatrixXcd::Identity(d, d)).norm() <
        10 * d * eps);
  for (Index k = 0; k + 1 < d; ++k) CHECK(sys.values[k] >= sys.values[k + 1]);

  CHECK_THROWS_AS((void)hermitian_eig<cd>(g), contract_error);
}

TEST_CASE("svd basics") {
  auto zero = svd<cd>(FiberMatrixXcd::Zero(3, 3));
  CHECK(zero.sigma.maxCoeff() == 0.0);

  Rng rng(7);
  FiberVectorXcd x = random_matrix<cd>(4, 1, rng);
  FiberVectorXcd y = random_matrix<cd>(4, 1, rng);
  auto r1 = svd<cd>((x * y.adjoint()).eval());
  CHECK(r1.sigma[0] == doctest::Approx(x.norm() * y.norm()));
  for (Index k = 1; k < 4; ++k) CHECK(r1.sigma[k] < 1e-12 * r1.sigma[0]);
}

TEST_CASE("svd sigma equals sqrt of eig of A^H A") {
  Rng rng(55);
  const Index d = 6;
  FiberMatrixXcd a = random_matrix<cd>(d, d, rng);
  auto s = svd<cd>(a);
  CHECK((a - s.reconstruct()).norm() <= 10 * d * eps * a.norm());

  auto gram = hermitian_eig<cd>((a.adjoint() * a).eval());
  for (Index k = 0; k < d; ++k)
    CHECK(s.sigma[k] == doctest::Approx(std::sqrt(std::max(0.0, gram.values[k]))).epsilon(1e-10));
}

TEST_CASE("svd invariances") {
  Rng rng(56);
  const Index d = 5;
  FiberMatrixXcd a = random_matrix<cd>(d, d, rng);
  auto sa = svd<cd>(a);
  auto sh = svd<cd>(a.adjoint().eval());
  CHECK((sa.sigma - sh.sigma).norm() < 1e-10 * sa.sigma[0]);

  FiberMatrixXcd q1 = random_unitary<cd>(d, rng);
  FiberMatrixXcd q2 = random_unitary<cd>(d, rng);
  auto sq = svd<cd>((q1 * a * q2).eval());
  CHECK((sa.sigma - sq.sigma).norm() < 1e-10 * sa.sigma[0]);
}

TEST_CASE("polar on closed forms") {
  // positive definite input: isometry is the identity
  Rng rng(57);
  FiberMatrixXcd g = random_matrix<cd>(3, 3, rng);
  FiberMatrixXcd spd = g.adjoint() * g + 3.0 * FiberMatrixXcd::Identity(3, 3);
  auto pd = polar<cd>(spd);
  CHECK((pd.partial_isometry - FiberMatrixXcd::Identity(3, 3)).norm() < 1e-12);
  CHECK((spd - pd.partial_isometry * pd.absolute).norm() < 1e-12 * spd.norm());

  // hand computation: A = [[0,2],[0,0]] => |A| = diag(0,2), w = [[0,1],[0,0]]
  FiberMatrixXcd n(2, 2);
  n << cd(0), cd(2), cd(0), cd(0);
  auto pn = polar<cd>(n);
  CHECK((pn.absolute - diag2(0, 2)).norm() < 1e-14);
  FiberMatrixXcd w_expect(2, 2);
  w_expect << cd(0), cd(1), cd(0), cd(0);
  CHECK((pn.partial_isometry - w_expect).norm() < 1e-14);
}

TEST_CASE("polar partial isometry properties on random input") {
  Rng rng(58);
  const Index d = 6;
  FiberMatrixXcd a = random_matrix<cd>(d, d, rng);
  auto pd = polar<cd>(a);

  CHECK((a - pd.partial_isometry * pd.absolute).norm() < 1e-12 * a.norm());
  // |A| = (A^H A)^(1/2), positive semidefinite
  CHECK((pd.absolute * pd.absolute - a.adjoint() * a).norm() < 1e-11 * a.norm() * a.norm());
  CHECK(hermitian_eig<cd>(pd.absolute).values.minCoeff() > -1e-12 * a.norm());

  // w^H w is the projection onto range(|A|): SVD oracle
  auto s = svd<cd>(a);
  const double rank_tol = default_rank_tol<cd>(d, s.sigma[0]);
  FiberMatrixXcd proj = FiberMatrixXcd::Zero(d, d);
  for (Index k = 0; k < d; ++k)
    if (s.sigma[k] > rank_tol) proj += s.right.col(k) * s.right.col(k).adjoint();
  const FiberMatrixXcd whw = pd.partial_isometry.adjoint() * pd.partial_isometry;
  CHECK((whw - proj).norm() < 1e-11);

  // ||w|| <= 1 and w^H w |A| = |A| (the isometry carries |A|)
  CHECK(svd<cd>(pd.partial_isometry).sigma[0] <= 1.0 + 1e-12);
  CHECK((whw * pd.absolute - pd.absolute).norm() < 1e-11 * a.norm());
}

TEST_CASE("polar respects rank_tol cutoff") {
  FiberMatrixXcd a = diag2(1.0, 1e-9);
  auto pd = polar<cd>(a, 1e-6);
  CHECK(pd.partial_isometry(0, 0) == cd(1.0, 0.0));
  CHECK(pd.partial_isometry(1, 1) == cd(0.0, 0.0));  // direction below cutoff dropped
}

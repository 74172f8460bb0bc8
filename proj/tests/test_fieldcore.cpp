/* SPDX-License-Identifier: Apache-2.0 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opfield/fieldcore.hpp"
#include "opfield/random.hpp"

using namespace opfield;

namespace {

VectorFieldXcd constant_vector(const SpacePtr& space, std::initializer_list<cd> entries) {
  FiberMatrixXcd c(static_cast<Index>(entries.size()), space->size());
  Index i = 0;
  for (cd z : entries) c.row(i++).setConstant(z);
  return VectorFieldXcd(space, std::move(c));
}

}  // namespace

TEST_CASE("parameter space basics") {
  auto space = make_space({"t1", "t2", "t3"}, {{0, 1}, {1, 2}});
  CHECK(space->size() == 3);
  CHECK(space->index_of("t2") == 1);
  CHECK_THROWS_AS((void)space->index_of("nope"), contract_error);
  CHECK_THROWS_AS(make_space({"a", "a"}), contract_error);
  CHECK_THROWS_AS(make_space({"a", "b", "c"}, {{0, 1}}), contract_error);  // disconnected
  CHECK_THROWS_AS(make_space({"a", "b"}, {{0, 5}}), contract_error);

  auto trav = space->traversal(1);
  CHECK(trav.order.front() == 1);
  CHECK(trav.parent[1] == -1);
  CHECK(trav.parent[0] == 1);
  CHECK(trav.parent[2] == 1);
}

TEST_CASE("inner product examples") {
  auto space = make_space({"t1", "t2"});
  auto e1 = constant_vector(space, {1.0, 0.0});
  auto e2 = constant_vector(space, {0.0, 1.0});

  auto one = inner_product(e1, e1);
  for (Index k = 0; k < 2; ++k) CHECK(one(k) == cd(1.0, 0.0));

  // componentwise sum oracle: <(3,4),(0,1)> = conj(0)*3 + conj(1)*4 = 4
  auto xi = constant_vector(space, {3.0, 4.0});
  auto ip = inner_product(xi, e2);
  for (Index k = 0; k < 2; ++k) CHECK(ip(k) == cd(4.0, 0.0));

  auto zero = inner_product(e1, e2);
  for (Index k = 0; k < 2; ++k) CHECK(zero(k) == cd(0.0, 0.0));

  auto bad = constant_vector(space, {1.0, 0.0, 0.0});
  CHECK_THROWS_AS((void)inner_product(e1, bad), contract_error);
}

TEST_CASE("inner product is linear in the first argument and module compatible") {
  auto space = make_path_space(5);
  Rng rng(11);
  auto xi = random_vector_field<cd>(space, 4, rng);
  auto eta = random_vector_field<cd>(space, 4, rng);
  auto x = random_scalar_field<cd>(space, rng);

  auto lhs = inner_product(module_scale(xi, x), eta);
  auto rhs = inner_product(xi, eta) * x;
  CHECK((lhs.values() - rhs.values()).norm() < 1e-12 * (1 + rhs.values().norm()));

  // conjugate-linearity in the second argument
  auto l2 = inner_product(xi, module_scale(eta, x));
  auto r2 = inner_product(xi, eta) * conj(x);
  CHECK((l2.values() - r2.values()).norm() < 1e-12 * (1 + r2.values().norm()));
}

TEST_CASE("fiber evaluation examples") {
  auto space = make_space({"t1", "t2"});
  auto id = OperatorFieldXcd::identity(space, 3);
  CHECK(fiber_eval(id, "t2").isIdentity(0.0));
  CHECK_THROWS_AS((void)fiber_eval(id, "t9"), contract_error);

  Rng rng(5);
  auto xi = random_vector_field<cd>(space, 3, rng);
  auto eta = random_vector_field<cd>(space, 3, rng);
  auto r1 = rank_one(xi, eta);
  for (Index k = 0; k < 2; ++k) {
    FiberMatrixXcd expect = xi.fiber(k) * eta.fiber(k).adjoint();
    CHECK((fiber_eval(r1, k) - expect).norm() == 0.0);
  }
}

TEST_CASE("fiber evaluation is a *-homomorphism") {
  auto space = make_path_space(4);
  Rng rng(7);
  auto u = random_operator_field<cd>(space, 5, rng);
  auto v = random_operator_field<cd>(space, 5, rng);
  auto uv = u * v;
  auto ustar = adjoint(u);
  for (Index k = 0; k < space->size(); ++k) {
    CHECK((fiber_eval(uv, k) - fiber_eval(u, k) * fiber_eval(v, k)).norm() == 0.0);
    CHECK((fiber_eval(ustar, k) - fiber_eval(u, k).adjoint()).norm() == 0.0);
  }
}

TEST_CASE("rank one outer product and projection") {
  auto space = make_space({"t1", "t2"});
  auto e1 = constant_vector(space, {1.0, 0.0});
  auto e2 = constant_vector(space, {0.0, 1.0});

  auto u = rank_one(e1, e2);
  FiberMatrixXcd expect(2, 2);
  expect << cd(0), cd(1), cd(0), cd(0);
  for (Index k = 0; k < 2; ++k) CHECK((u.fiber(k) - expect).norm() == 0.0);

  auto p = rank_one(e1, e1);
  for (Index k = 0; k < 2; ++k) {
    CHECK((p.fiber(k) * p.fiber(k) - p.fiber(k)).norm() < 1e-15);
    CHECK((p.fiber(k) - p.fiber(k).adjoint()).norm() == 0.0);
  }
}

TEST_CASE("rank one composition identity against fiberwise oracle") {
  auto space = make_path_space(6);
  Rng rng(23);
  auto xi = random_vector_field<cd>(space, 4, rng);
  auto eta = random_vector_field<cd>(space, 4, rng);
  auto xi2 = random_vector_field<cd>(space, 4, rng);
  auto eta2 = random_vector_field<cd>(space, 4, rng);

  auto lhs = rank_one(xi, eta) * rank_one(xi2, eta2);
  auto rhs = rank_one(module_scale(xi, inner_product(xi2, eta)), eta2);
  for (Index k = 0; k < space->size(); ++k)
    CHECK((lhs.fiber(k) - rhs.fiber(k)).norm() < 1e-13 * (1 + rhs.fiber(k).norm()));
}

TEST_CASE("module scale examples and adjoint law") {
  auto space = make_path_space(3);
  Rng rng(3);
  auto u = random_operator_field<cd>(space, 3, rng);
  auto x = random_scalar_field<cd>(space, rng);

  auto same = module_scale(u, ScalarFieldXcd::one(space));
  for (Index k = 0; k < space->size(); ++k) CHECK((same.fiber(k) - u.fiber(k)).norm() == 0.0);

  auto zero = module_scale(u, ScalarFieldXcd::zero(space));
  for (Index k = 0; k < space->size(); ++k) CHECK(zero.fiber(k).norm() == 0.0);

  // (u x)^* = u^* x^*
  auto lhs = adjoint(module_scale(u, x));
  auto rhs = module_scale(adjoint(u), conj(x));
  for (Index k = 0; k < space->size(); ++k)
    CHECK((lhs.fiber(k) - rhs.fiber(k)).norm() < 1e-14 * (1 + rhs.fiber(k).norm()));
}

TEST_CASE("positivity checks") {
  auto space = make_space({"t1", "t2"});
  CHECK(is_positive(OperatorFieldXcd::identity(space, 2)));

  std::vector<FiberMatrixXcd> f(2, FiberMatrixXcd::Zero(2, 2));
  f[0](0, 0) = 1;
  f[0](1, 1) = -1;
  f[1] = f[0];
  CHECK_FALSE(is_positive(OperatorFieldXcd(space, f)));

  Rng rng(17);
  auto u = random_operator_field<cd>(space, 4, rng);
  auto pos = adjoint(u) * u;
  CHECK(is_positive(pos));
  // eigenvalue oracle per fiber
  for (Index k = 0; k < 2; ++k) {
    Eigen::SelfAdjointEigenSolver<FiberMatrixXcd> es(pos.fiber(k));
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  }

  CHECK_THROWS_AS((void)is_positive(u), contract_error);  // not selfadjoint
}

TEST_CASE("masked module: closure and generators") {
  auto space = make_space({"t1", "t2", "t3"});
  const Index d = 3;
  IndexMask mask(d, space->size());
  mask.set(2, 1, false);  // p_2 vanishes at t2

  auto e2 = VectorFieldXcd::standard_basis(space, d, 2, mask);
  CHECK(e2.fiber(1).norm() == 0.0);
  CHECK(e2.fiber(0)(2) == cd(1.0, 0.0));

  Rng rng(29);
  auto xi = random_vector_field<cd>(space, d, rng, mask);
  auto eta = random_vector_field<cd>(space, d, rng, mask);
  CHECK(xi.fiber(1)(2) == cd(0.0, 0.0));

  auto u = rank_one(xi, eta);
  auto v = module_scale(u * u + u, random_scalar_field<cd>(space, rng));
  for (Index k = 0; k < space->size(); ++k)
    for (Index i = 0; i < d; ++i)
      for (Index j = 0; j < d; ++j)
        if (!mask(i, k) || !mask(j, k)) {
          CHECK(u.fiber(k)(i, j) == cd(0.0, 0.0));
          CHECK(v.fiber(k)(i, j) == cd(0.0, 0.0));
        }

  // the unit of the masked module is the projection field
  auto proj = OperatorFieldXcd::projection(space, mask);
  auto pxi = proj * xi;
  CHECK((pxi.components() - xi.components()).norm() == 0.0);
  CHECK(is_positive(proj));

  auto full = random_vector_field<cd>(space, d, rng);
  CHECK_THROWS_AS((void)inner_product(xi, full), contract_error);
}

TEST_CASE("neighbor-consistency diagnostics") {
  auto space = make_space({"a", "b", "c"}, {{0, 1}, {1, 2}});
  auto x = ScalarFieldXcd::constant(space, cd(2.0, 1.0));
  CHECK(max_edge_jump(x) == 0.0);

  FiberVectorXcd v(3);
  v << cd(0.0), cd(1.0), cd(1.0);
  CHECK(max_edge_jump(ScalarFieldXcd(space, v)) == 1.0);
}

TEST_CASE("real scalar instantiation") {
  auto space = make_path_space(3);
  Rng rng(31);
  auto xi = random_vector_field<double>(space, 3, rng);
  auto eta = random_vector_field<double>(space, 3, rng);
  auto u = rank_one(xi, eta);
  for (Index k = 0; k < space->size(); ++k) {
    FiberMatrix<double> expect = xi.fiber(k) * eta.fiber(k).transpose();
    CHECK((u.fiber(k) - expect).norm() == 0.0);
  }
  CHECK(is_positive(adjoint(u) * u));
}

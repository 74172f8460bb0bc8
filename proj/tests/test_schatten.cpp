/* SPDX-License-Identifier: Apache-2.0 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "opfield/random.hpp"
#include "opfield/schatten.hpp"

using namespace opfield;

namespace {

// Fixture F1: diag(3,1) at t1 and diag(2,2) at t2.
OperatorFieldXcd fixture_f1(const SpacePtr& space) {
  std::vector<FiberMatrixXcd> f(2, FiberMatrixXcd::Zero(2, 2));
  f[0](0, 0) = 3;
  f[0](1, 1) = 1;
  f[1](0, 0) = 2;
  f[1](1, 1) = 2;
  return OperatorFieldXcd(space, std::move(f));
}

double theta_at(const std::vector<ScalarFieldXcd>& theta, Index n /*1-based*/, Index k) {
  if (n > static_cast<Index>(theta.size())) return 0.0;
  return theta[static_cast<size_t>(n - 1)](k).real();
}

FiberVectorXcd power_sum(const std::vector<ScalarFieldXcd>& theta, double p) {
  FiberVectorXcd v = FiberVectorXcd::Zero(theta.front().num_points());
  for (const auto& th : theta)
    for (Index k = 0; k < v.size(); ++k) v[k] += std::pow(th(k).real(), p);
  return v;
}

OmegaFamily<cd> random_omega(const SpacePtr& space, Index d, Index m, Rng& rng) {
  OmegaFamily<cd> fam;
  std::vector<FiberMatrixXcd> cols(static_cast<size_t>(m), FiberMatrixXcd(d, space->size()));
  for (Index k = 0; k < space->size(); ++k) {
    const auto q = random_unitary<cd>(d, rng);
    for (Index n = 0; n < m; ++n) cols[static_cast<size_t>(n)].col(k) = q.col(n);
  }
  for (Index n = 0; n < m; ++n)
    fam.zeta.emplace_back(space, std::move(cols[static_cast<size_t>(n)]));
  return fam;
}

}  // namespace

TEST_CASE("singular value fields on fixture F1") {
  auto space = make_space({"t1", "t2"});
  auto u = fixture_f1(space);
  auto theta = singular_value_fields(u, 2);
  CHECK(theta[0](0).real() == doctest::Approx(3.0));
  CHECK(theta[0](1).real() == doctest::Approx(2.0));
  CHECK(theta[1](0).real() == doctest::Approx(1.0));
  CHECK(theta[1](1).real() == doctest::Approx(2.0));
  CHECK_THROWS_AS((void)singular_value_fields(u, 3), contract_error);
  CHECK(op_norm(u) == doctest::Approx(3.0));
}

TEST_CASE("rank-one operators have exactly one singular level") {
  auto space = make_path_space(5);
  Rng rng(2);
  auto xi = random_vector_field<cd>(space, 4, rng);
  auto eta = random_vector_field<cd>(space, 4, rng);
  auto theta = singular_value_fields(rank_one(xi, eta), 4);
  for (Index k = 0; k < space->size(); ++k) {
    CHECK(theta[0](k).real() ==
          doctest::Approx(xi.fiber(k).norm() * eta.fiber(k).norm()).epsilon(1e-12));
    for (Index n = 2; n <= 4; ++n) CHECK(theta_at(theta, n, k) < 1e-12 * theta[0](k).real());
  }
}

TEST_CASE("theta of u^*u is theta of u squared") {
  auto space = make_path_space(6);
  Rng rng(3);
  auto u = random_operator_field<cd>(space, 5, rng);
  auto theta = singular_value_fields(u, 5);
  auto theta_sq = singular_value_fields(adjoint(u) * u, 5);
  for (Index n = 0; n < 5; ++n)
    for (Index k = 0; k < space->size(); ++k)
      CHECK(theta_sq[static_cast<size_t>(n)](k).real() ==
            doctest::Approx(std::pow(theta[static_cast<size_t>(n)](k).real(), 2)).epsilon(1e-10));
}

TEST_CASE("support indicator") {
  auto space = make_space({"t1", "t2"});
  auto zero = support_indicator(ScalarFieldXcd::zero(space), 1e-12);
  CHECK(zero(0) == cd(0.0));
  CHECK(zero(1) == cd(0.0));

  FiberVectorXcd v(2);
  v << cd(1.0), cd(2.0);
  auto ind = support_indicator(ScalarFieldXcd(space, v, true), 1e-12);
  CHECK(ind(0) == cd(1.0));
  CHECK(ind(1) == cd(1.0));

  v << cd(1.0), cd(1e-15);
  auto cut = support_indicator(ScalarFieldXcd(space, v, true), 1e-12);
  CHECK(cut(0) == cd(1.0));
  CHECK(cut(1) == cd(0.0));
}

TEST_CASE("phase alignment: hand-computed phase ramp") {
  // eta(t_k) = e^{i pi k/4} (1,0), k = 1..4; aligned field is the constant
  // e^{i pi/4} (1,0).
  auto space = make_space({"t1", "t2", "t3", "t4"});
  FiberMatrixXcd comps(2, 4);
  for (Index k = 0; k < 4; ++k) {
    comps(0, k) = std::polar(1.0, M_PI * static_cast<double>(k + 1) / 4.0);
    comps(1, k) = 0;
  }
  VectorFieldXcd eta(space, comps);
  auto xi = phase_align(eta, "t1");
  const cd expect = std::polar(1.0, M_PI / 4.0);
  for (Index k = 0; k < 4; ++k) {
    CHECK(std::abs(xi.fiber(k)(0) - expect) < 1e-14);
    CHECK(std::abs(xi.fiber(k)(1)) == 0.0);
  }

  auto constant = phase_align(xi, "t1");
  CHECK((constant.components() - xi.components()).norm() == 0.0);
}

TEST_CASE("phase alignment: random phases cancel, projections unchanged") {
  auto space = make_path_space(12);
  Rng rng(9);
  FiberVectorXcd v = random_matrix<cd>(5, 1, rng);
  v.normalize();
  FiberMatrixXcd comps(5, space->size());
  for (Index k = 0; k < space->size(); ++k)
    comps.col(k) = std::polar(1.0, 2 * M_PI * rng.uniform()) * v;
  VectorFieldXcd eta(space, comps);

  std::vector<AlignmentEvent> events;
  auto xi = phase_align_with_events(eta, 0, events);
  CHECK(events.empty());
  for (Index k = 0; k < space->size(); ++k) {
    CHECK((xi.fiber(k) - xi.fiber(0)).norm() < 1e-12);
    const FiberMatrixXcd before = eta.fiber(k) * eta.fiber(k).adjoint();
    const FiberMatrixXcd after = xi.fiber(k) * xi.fiber(k).adjoint();
    CHECK((before - after).norm() < 1e-14);
  }
}

TEST_CASE("phase alignment: orthogonal jump re-anchors and is reported") {
  auto space = make_path_space(5);
  FiberMatrixXcd comps = FiberMatrixXcd::Zero(2, 5);
  for (Index k = 0; k < 3; ++k) comps(0, k) = 1;
  for (Index k = 3; k < 5; ++k) comps(1, k) = 1;
  VectorFieldXcd eta(space, comps);

  std::vector<AlignmentEvent> events;
  auto xi = phase_align_with_events(eta, 0, events);
  REQUIRE(events.size() == 1);
  CHECK(events[0].point == 3);
  CHECK(events[0].overlap == 0.0);
  CHECK((xi.components() - eta.components()).norm() == 0.0);

  CHECK_THROWS_AS((void)phase_align(VectorFieldXcd::zero(space, 2), 0), contract_error);
}

TEST_CASE("positive decomposition of a projection field") {
  auto space = make_path_space(4);
  Rng rng(21);
  const Index d = 4;
  std::vector<FiberMatrixXcd> f;
  FiberMatrixXcd q1(d, space->size()), q2(d, space->size());
  for (Index k = 0; k < space->size(); ++k) {
    auto q = random_unitary<cd>(d, rng);
    q1.col(k) = q.col(0);
    q2.col(k) = q.col(1);
  }
  VectorFieldXcd a(space, q1), b(space, q2);
  auto proj = rank_one(a, a) + rank_one(b, b);

  auto sys = schatten_decompose_positive(proj);
  for (Index k = 0; k < space->size(); ++k) {
    CHECK(sys.theta[0](k).real() == doctest::Approx(1.0));
    CHECK(sys.theta[1](k).real() == doctest::Approx(1.0));
    CHECK(sys.theta[2](k).real() == doctest::Approx(0.0));
    // xi_1, xi_2 span the range of the projection
    const FiberMatrixXcd span = sys.xi[0].fiber(k) * sys.xi[0].fiber(k).adjoint() +
                                sys.xi[1].fiber(k) * sys.xi[1].fiber(k).adjoint();
    CHECK((span - proj.fiber(k)).norm() < 1e-12);
  }
  const auto diag = validate_system(sys);
  CHECK(diag.orthonormality < 1e-12);
  CHECK(diag.descending <= 0);
  CHECK(diag.support == 0);
}

TEST_CASE("positive decomposition: F1 and the eigen-relation") {
  auto space = make_space({"t1", "t2"});
  auto u = fixture_f1(space);
  auto sys = schatten_decompose_positive(u);

  CHECK(std::abs(sys.xi[0].fiber(0)(0)) == doctest::Approx(1.0));  // e_1 up to phase
  CHECK(std::abs(sys.xi[1].fiber(0)(1)) == doctest::Approx(1.0));  // e_2 up to phase

  CHECK(op_norm(u - reconstruct(sys)) < 1e-12 * op_norm(u));
  for (Index n = 0; n < sys.levels(); ++n) {
    auto lhs = u * sys.xi[static_cast<size_t>(n)];
    auto rhs = module_scale(sys.xi[static_cast<size_t>(n)], sys.theta[static_cast<size_t>(n)]);
    CHECK((lhs.components() - rhs.components()).norm() < 1e-12 * op_norm(u));
  }

  Rng rng(33);
  CHECK_THROWS_AS((void)schatten_decompose_positive(random_selfadjoint_field<cd>(space, 3, rng) +
                                                    cd(-10.0) * OperatorFieldXcd::identity(space, 3)),
                  contract_error);
}

TEST_CASE("positive decomposition of random u^*u at scale") {
  auto space = make_path_space(16, true);
  Rng rng(41);
  const Index d = 6;
  auto u = random_positive_field<cd>(space, d, rng);
  auto sys = schatten_decompose_positive(u);
  CHECK(op_norm(u - reconstruct(sys)) <= 1e-9 * op_norm(u));
  const auto diag = validate_system(sys);
  CHECK(diag.orthonormality < 1e-9);
  CHECK(diag.descending <= 1e-14);
  CHECK(diag.support < 1e-9);
}

TEST_CASE("general decomposition: nilpotent fiber") {
  auto space = make_space({"t1", "t2"});
  std::vector<FiberMatrixXcd> f(2, FiberMatrixXcd::Zero(2, 2));
  f[0](0, 1) = 2;
  f[1](0, 1) = 2;
  OperatorFieldXcd u(space, f);

  auto sys = schatten_decompose(u);
  for (Index k = 0; k < 2; ++k) {
    CHECK(sys.theta[0](k).real() == doctest::Approx(2.0));
    CHECK(sys.theta[1](k).real() == doctest::Approx(0.0));
    CHECK(std::abs(sys.eta[0].fiber(k)(1)) == doctest::Approx(1.0));  // eta_1 = e_2
    CHECK(std::abs(sys.xi[0].fiber(k)(0)) == doctest::Approx(1.0));   // xi_1 = e_1
  }
  CHECK(op_norm(u - reconstruct(sys)) < 1e-12 * op_norm(u));
}

TEST_CASE("general decomposition: reconstruction, orthonormality, adjoint system") {
  auto space = make_path_space(10, true);
  Rng rng(77);
  const Index d = 8;
  auto u = random_operator_field<cd>(space, d, rng);
  auto sys = schatten_decompose(u);

  CHECK(op_norm(u - reconstruct(sys)) <= 1e-9 * op_norm(u));
  const auto diag = validate_system(sys);
  CHECK(diag.orthonormality < 1e-9);

  // u^* = sum_n theta_n eta_n <., xi_n>
  SingularSystem<cd> adj;
  adj.theta = sys.theta;
  adj.xi = sys.eta;
  adj.eta = sys.xi;
  adj.e = sys.e;
  CHECK(op_norm(adjoint(u) - reconstruct(adj)) <= 1e-9 * op_norm(u));
}

TEST_CASE("general decomposition agrees with the positive route on positive fields") {
  auto space = make_path_space(5);
  Rng rng(55);
  auto u = random_positive_field<cd>(space, 4, rng);
  auto pos = schatten_decompose_positive(u);
  auto gen = schatten_decompose(u);
  for (Index n = 0; n < 4; ++n)
    CHECK((pos.theta[static_cast<size_t>(n)].values() - gen.theta[static_cast<size_t>(n)].values())
              .norm() < 1e-10 * op_norm(u));
  CHECK(op_norm(reconstruct(pos) - reconstruct(gen)) < 1e-9 * op_norm(u));
  // up to phase: the xi and eta fields of the general route carry the same
  // rank-one projections as the positive route
  for (Index n = 0; n < 4; ++n)
    for (Index k = 0; k < space->size(); ++k) {
      const auto pp = (pos.xi[static_cast<size_t>(n)].fiber(k) *
                       pos.xi[static_cast<size_t>(n)].fiber(k).adjoint()).eval();
      const auto pg = (gen.xi[static_cast<size_t>(n)].fiber(k) *
                       gen.xi[static_cast<size_t>(n)].fiber(k).adjoint()).eval();
      CHECK((pp - pg).norm() < 1e-8);
    }
}

TEST_CASE("theta identification: prescribed theta fields are recovered") {
  auto space = make_path_space(6);
  Rng rng(88);
  const Index d = 5;
  auto u = random_operator_field<cd>(space, d, rng);
  auto sys = schatten_decompose(u);

  // rescale theta'_n = theta_n^{3/2}: order and supports are preserved
  std::vector<ScalarFieldXcd> theta_p;
  OperatorFieldXcd rebuilt = OperatorFieldXcd::zero(space, d);
  for (Index n = 0; n < d; ++n) {
    FiberVectorXcd v(space->size());
    for (Index k = 0; k < space->size(); ++k)
      v[k] = std::pow(sys.theta[static_cast<size_t>(n)](k).real(), 1.5);
    theta_p.emplace_back(space, v, true);
    rebuilt = rebuilt + module_scale(rank_one(sys.xi[static_cast<size_t>(n)],
                                              sys.eta[static_cast<size_t>(n)]),
                                     theta_p.back());
  }
  auto recovered = singular_value_fields(rebuilt, d);
  const double scale = theta_p[0].sup_norm();
  for (Index n = 0; n < d; ++n)
    CHECK((recovered[static_cast<size_t>(n)].values() - theta_p[static_cast<size_t>(n)].values())
              .norm() < 1e-10 * scale);
}

TEST_CASE("subsystem relabeling") {
  auto space = make_path_space(4);
  Rng rng(99);
  const Index d = 6;
  auto u = random_operator_field<cd>(space, d, rng);
  auto sys = schatten_decompose(u);

  const std::vector<Index> chosen = {1, 3, 4};  // 0-based subset, increasing
  OperatorFieldXcd v = OperatorFieldXcd::zero(space, d);
  for (Index n : chosen)
    v = v + module_scale(rank_one(sys.xi[static_cast<size_t>(n)], sys.eta[static_cast<size_t>(n)]),
                         sys.theta[static_cast<size_t>(n)]);
  auto theta_v = singular_value_fields(v, d);
  const double scale = op_norm(u);
  for (size_t m = 0; m < chosen.size(); ++m)
    CHECK((theta_v[m].values() - sys.theta[static_cast<size_t>(chosen[m])].values()).norm() <
          1e-10 * scale);
  for (Index m = static_cast<Index>(chosen.size()); m < d; ++m)
    CHECK(theta_v[static_cast<size_t>(m)].sup_norm() < 1e-10 * scale);
}

TEST_CASE("rank-one projections of a system are mutually orthogonal") {
  auto space = make_path_space(3);
  Rng rng(13);
  auto u = random_positive_field<cd>(space, 4, rng);
  auto sys = schatten_decompose_positive(u);
  for (Index m = 0; m < 4; ++m)
    for (Index n = 0; n < 4; ++n) {
      if (m == n) continue;
      auto prod = rank_one(sys.xi[static_cast<size_t>(m)], sys.xi[static_cast<size_t>(m)]) *
                  rank_one(sys.xi[static_cast<size_t>(n)], sys.xi[static_cast<size_t>(n)]);
      CHECK(prod.sup_frobenius() < 1e-12);
    }
}

TEST_CASE("Weyl inequalities for sums and products, sandwich, monotonicity") {
  auto space = make_path_space(8);
  Rng rng(10);
  const Index d = 6;
  const double slack = 1e-9;
  for (int trial = 0; trial < 10; ++trial) {
    auto u = random_operator_field<cd>(space, d, rng);
    auto v = random_operator_field<cd>(space, d, rng);
    auto tu = singular_value_fields(u, d);
    auto tv = singular_value_fields(v, d);
    auto tsum = singular_value_fields(u + v, d);
    auto tprod = singular_value_fields(u * v, d);
    const double scale = op_norm(u) + op_norm(v);

    for (Index n = 1; 2 * n - 1 <= d; ++n)
      for (Index k = 0; k < space->size(); ++k) {
        CHECK(theta_at(tsum, 2 * n - 1, k) <=
              theta_at(tu, n, k) + theta_at(tv, n, k) + slack * scale);
        CHECK(theta_at(tsum, 2 * n, k) <=
              theta_at(tu, n, k) + theta_at(tv, n + 1, k) + slack * scale);
        CHECK(theta_at(tprod, 2 * n - 1, k) <=
              theta_at(tu, n, k) * theta_at(tv, n, k) + slack * scale * scale);
      }

    auto w = random_operator_field<cd>(space, d, rng);
    auto tsand = singular_value_fields(v * u * w, d);
    const double nv = op_norm(v), nw = op_norm(w);
    for (Index n = 1; n <= d; ++n)
      for (Index k = 0; k < space->size(); ++k)
        CHECK(theta_at(tsand, n, k) <= nv * theta_at(tu, n, k) * nw + slack * scale * scale);
  }

  // 0 <= u <= v pointwise implies theta_n(u) <= theta_n(v)
  for (int trial = 0; trial < 10; ++trial) {
    auto u = random_positive_field<cd>(space, d, rng);
    auto v = u + random_positive_field<cd>(space, d, rng);
    auto tu = singular_value_fields(u, d);
    auto tv = singular_value_fields(v, d);
    for (Index n = 1; n <= d; ++n)
      for (Index k = 0; k < space->size(); ++k)
        CHECK(theta_at(tu, n, k) <= theta_at(tv, n, k) + 1e-9 * op_norm(v));
  }
}

TEST_CASE("tail truncation") {
  auto space = make_space({"t1", "t2"});

  // no cut when every theta_n clears 1/(k n^2)
  std::vector<FiberMatrixXcd> f(2, FiberMatrixXcd::Zero(2, 2));
  f[0].diagonal() << cd(3.0), cd(2.0);
  f[1].diagonal() << cd(4.0), cd(2.5);
  OperatorFieldXcd u(space, f);
  auto sys = schatten_decompose(u);
  auto u1 = truncate_tail(u, sys, 1, 1.0);
  CHECK(op_norm(u - u1) < 1e-12 * op_norm(u));

  // theta_2(t2) = 0.1 below the n=2, k=1 threshold 1/4: cut at t2 only
  std::vector<FiberMatrixXcd> g(2, FiberMatrixXcd::Zero(2, 2));
  g[0].diagonal() << cd(2.0), cd(0.5);
  g[1].diagonal() << cd(2.0), cd(0.1);
  OperatorFieldXcd w(space, g);
  auto wsys = schatten_decompose(w);
  auto w1 = truncate_tail(w, wsys, 1, 1.0);
  FiberMatrixXcd expect_t2 = FiberMatrixXcd::Zero(2, 2);
  expect_t2(0, 0) = 2.0;
  CHECK((w1.fiber(0) - g[0]).norm() < 1e-12);
  CHECK((w1.fiber(1) - expect_t2).norm() < 1e-12);

  CHECK_THROWS_AS((void)truncate_tail(u, sys, 0, 1.0), contract_error);
  CHECK_THROWS_AS((void)truncate_tail(u, sys, 1, 0.5), contract_error);
}

TEST_CASE("tail truncation bound on random fields") {
  auto space = make_path_space(6);
  Rng rng(12);
  const Index d = 8;
  auto u = random_operator_field<cd>(space, d, rng);
  auto sys = schatten_decompose(u);
  for (Index k : {Index(1), Index(5), Index(10)}) {
    for (double p : {1.0, 2.0}) {
      auto u_k = truncate_tail(u, sys, k, p);
      auto residual_theta = singular_value_fields(u - u_k, d);
      // pointwise bound theta_n(u - u_k) <= 1/(k n^2)
      for (Index n = 1; n <= d; ++n)
        for (Index t = 0; t < space->size(); ++t)
          CHECK(theta_at(residual_theta, n, t) <=
                1.0 / (static_cast<double>(k) * n * n) + 1e-9 * op_norm(u));
      const auto ps = power_sum(residual_theta, p);
      double norm_p = 0;
      for (Index t = 0; t < space->size(); ++t) norm_p = std::max(norm_p, ps[t].real());
      norm_p = std::pow(norm_p, 1.0 / p);
      CHECK(norm_p <= truncation_bound(k, p) + 1e-9);
    }
  }
  // zeta(2) and zeta(4) reference values
  CHECK(truncation_bound(1, 1.0) == doctest::Approx(M_PI * M_PI / 6.0).epsilon(1e-12));
  CHECK(truncation_bound(1, 2.0) ==
        doctest::Approx(std::sqrt(std::pow(M_PI, 4) / 90.0)).epsilon(1e-12));
  CHECK(truncation_bound(10, 1.0) == doctest::Approx(M_PI * M_PI / 60.0).epsilon(1e-12));
}

TEST_CASE("omega sums: attainment and domination") {
  auto space = make_path_space(5);
  Rng rng(31);
  const Index d = 6;
  auto u = random_operator_field<cd>(space, d, rng);
  auto sys = schatten_decompose(u);
  auto theta = singular_value_fields(u, d);

  for (double p : {1.0, 2.0, 3.0}) {
    OmegaFamily<cd> fam_in{sys.eta}, fam_out{sys.xi};
    auto attained = omega_sum(u, fam_in, fam_out, p);
    const auto ps = power_sum(theta, p);
    for (Index k = 0; k < space->size(); ++k)
      CHECK(std::abs(attained(k) - ps[k]) < 1e-9 * (1.0 + std::abs(ps[k])));
  }

  // single orthonormal vector against itself on a positive operator
  auto upos = random_positive_field<cd>(space, d, rng);
  auto tpos = singular_value_fields(upos, d);
  auto single = random_omega(space, d, 1, rng);
  auto val = omega_sum(upos, single, single, 2.0);
  for (Index k = 0; k < space->size(); ++k)
    CHECK(val(k).real() <= std::pow(tpos[0](k).real(), 2.0) + 1e-9);

  // random pairs never exceed the power sum
  for (int trial = 0; trial < 20; ++trial) {
    const double p = (trial % 2 == 0) ? 1.0 : 2.0;
    auto fin = random_omega(space, d, 4, rng);
    auto fout = random_omega(space, d, 4, rng);
    auto val2 = omega_sum(u, fin, fout, p);
    const auto ps = power_sum(theta, p);
    for (Index k = 0; k < space->size(); ++k)
      CHECK(val2(k).real() <= ps[k].real() + 1e-9);
  }

  // invalid family rejected
  OmegaFamily<cd> bad;
  bad.zeta.push_back(random_vector_field<cd>(space, d, rng));
  bad.zeta.push_back(random_vector_field<cd>(space, d, rng));
  CHECK_THROWS_AS((void)omega_sum(u, bad, bad, 2.0), contract_error);
}

TEST_CASE("absolute value and positive powers") {
  auto space = make_path_space(4);
  Rng rng(61);
  auto u = random_operator_field<cd>(space, 5, rng);
  auto abs_u = absolute_value(u);
  CHECK(is_positive(abs_u));
  // theta_n(u) = theta_n(u^*) = theta_n(|u|)
  auto t0 = singular_value_fields(u, 5);
  auto t1 = singular_value_fields(adjoint(u), 5);
  auto t2 = singular_value_fields(abs_u, 5);
  for (Index n = 0; n < 5; ++n) {
    CHECK((t0[static_cast<size_t>(n)].values() - t1[static_cast<size_t>(n)].values()).norm() <
          1e-10 * op_norm(u));
    CHECK((t0[static_cast<size_t>(n)].values() - t2[static_cast<size_t>(n)].values()).norm() <
          1e-10 * op_norm(u));
  }

  auto pos = random_positive_field<cd>(space, 4, rng);
  auto sq = positive_power(pos, 2.0);
  CHECK(op_norm(sq - pos * pos) < 1e-10 * op_norm(pos) * op_norm(pos));
  auto root = positive_power(pos, 0.5);
  CHECK(op_norm(root * root - pos) < 1e-10 * op_norm(pos));
}

TEST_CASE("projection edge jump diagnostics") {
  auto space = make_path_space(6, true);
  Rng rng(71);
  auto u = random_positive_field<cd>(space, 3, rng);
  auto sys = schatten_decompose_positive(u);
  auto jumps = projection_edge_jumps(sys);
  CHECK(jumps.size() == 3);
  for (double j : jumps) CHECK(j >= 0.0);

  // constant operator field: projections do not move at all
  std::vector<FiberMatrixXcd> f(static_cast<size_t>(space->size()), u.fiber(0));
  auto csys = schatten_decompose_positive(OperatorFieldXcd(space, f));
  for (double j : projection_edge_jumps(csys)) CHECK(j < 1e-12);
}

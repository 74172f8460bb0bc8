/* SPDX-License-Identifier: Apache-2.0 */
#ifndef OPFIELD_TRACECLASS_HPP
#define OPFIELD_TRACECLASS_HPP

//
// L^p norms and membership reports, the E-valued trace and its identities,
// the Hilbert-Schmidt inner product, Hoelder norming elements, and the dual
// pairing with functional-to-operator reconstruction.
//
// Exponent encoding: p is a double in {0} u [1,inf]; p = 0 denotes the
// compact-operator space with the operator norm. Conjugates: 0 <-> 1 and
// 1 <-> inf, else q = p/(p-1).
//

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "opfield/random.hpp"
#include "opfield/schatten.hpp"

namespace opfield {

inline double conjugate_exponent(double p) {
  if (p == 0.0) return 1.0;
  if (p == 1.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(p)) return 1.0;
  if (p > 1.0) return p / (p - 1.0);
  throw contract_error("conjugate_exponent: p must lie in {0} u [1,inf]");
}

inline void require_valid_exponent(double p, const char* where) {
  const bool ok = p == 0.0 || (p >= 1.0 && !std::isnan(p));
  if (!ok) throw contract_error(std::string(where) + ": p must lie in {0} u [1,inf]");
}

// Norm report for one exponent. For finite p >= 1 the power-sum field
// sum_n theta_n^p is attached together with its largest top-level tail term
// (the summability diagnostic; membership is never a boolean at finite
// fiber dimension).
template <typename Scalar>
struct LpReport {
  double p = 0;
  RealOf<Scalar> norm = 0;
  std::optional<ScalarField<Scalar>> power_sum_field;
  RealOf<Scalar> max_tail_term = 0;
};

template <typename Scalar>
LpReport<Scalar> lp_norm(const OperatorField<Scalar>& u, double p) {
  using Real = RealOf<Scalar>;
  require_valid_exponent(p, "lp_norm");
  LpReport<Scalar> report;
  report.p = p;
  const auto theta = singular_value_fields(u, u.dim());
  if (p == 0.0 || std::isinf(p)) {
    report.norm = theta.empty() ? Real(0) : theta.front().sup_norm();
    return report;
  }
  FiberVector<Scalar> ps = FiberVector<Scalar>::Zero(u.num_points());
  for (const auto& th : theta)
    for (Index k = 0; k < u.num_points(); ++k)
      ps[k] += Scalar(std::pow(Eigen::numext::real(th(k)), Real(p)));
  report.power_sum_field = ScalarField<Scalar>(u.space(), std::move(ps), true);
  report.norm = std::pow(report.power_sum_field->sup_norm(), Real(1) / Real(p));
  if (!theta.empty()) {
    const Real tail = theta.back().sup_norm();
    report.max_tail_term = std::pow(tail, Real(p));
  }
  return report;
}

// Matrix trace of each fiber; by the finite-dimensional trace identity this
// is the value of the E-valued trace, and it serves as the fast path for
// products below.
template <typename Scalar>
ScalarField<Scalar> pointwise_fiber_trace(const OperatorField<Scalar>& u) {
  FiberVector<Scalar> v(u.num_points());
  for (Index k = 0; k < u.num_points(); ++k) v[k] = u.fiber(k).trace();
  return ScalarField<Scalar>(u.space(), std::move(v));
}

// E-valued trace through a Schatten decomposition:
// tr u = sum_n theta_n <xi_n, eta_n>, summed in increasing n. The system is
// validated against u (orthonormality and reconstruction) first.
template <typename Scalar>
ScalarField<Scalar> trace(const OperatorField<Scalar>& u, const SingularSystem<Scalar>& sys,
                          RealOf<Scalar> tol = 1e-8) {
  using Real = RealOf<Scalar>;
  if (sys.levels() == 0 || sys.theta.front().num_points() != u.num_points())
    throw contract_error("trace: system does not match the operator field");
  const auto diag = validate_system(sys);
  const Real scale = std::max<Real>(op_norm(u), Real(1));
  if (diag.orthonormality > tol || diag.support > tol)
    throw contract_error("trace: inconsistent singular system");
  if (op_norm(u - reconstruct(sys)) > tol * scale)
    throw contract_error("trace: system does not reconstruct the operator field");
  FiberVector<Scalar> v = FiberVector<Scalar>::Zero(u.num_points());
  for (Index n = 0; n < sys.levels(); ++n) {
    const auto ip = inner_product(sys.xi[static_cast<size_t>(n)], sys.eta[static_cast<size_t>(n)]);
    for (Index k = 0; k < u.num_points(); ++k)
      v[k] += sys.theta[static_cast<size_t>(n)](k) * ip(k);
  }
  return ScalarField<Scalar>(u.space(), std::move(v));
}

template <typename Scalar>
ScalarField<Scalar> trace(const OperatorField<Scalar>& u) {
  return trace(u, schatten_decompose(u));
}

// Fourier-basis trace sum_zeta <u zeta, zeta>. The basis must be pairwise
// orthogonal with indicator-valued self products and must resolve the
// identity of the (masked) module fiberwise.
template <typename Scalar>
ScalarField<Scalar> trace_via_fourier_basis(const OperatorField<Scalar>& u,
                                            const std::vector<VectorField<Scalar>>& basis,
                                            RealOf<Scalar> tol = 1e-9) {
  using Real = RealOf<Scalar>;
  const Index d = u.dim();
  const Index nt = u.num_points();
  if (static_cast<Index>(basis.size()) == 0)
    throw contract_error("trace_via_fourier_basis: empty basis");
  for (size_t a = 0; a < basis.size(); ++a) {
    const auto self = inner_product(basis[a], basis[a]);
    for (Index k = 0; k < nt; ++k) {
      const auto v = self(k);
      if (std::min(Eigen::numext::abs(v), Eigen::numext::abs(v - Scalar(1))) > tol)
        throw contract_error("trace_via_fourier_basis: self products must be 0/1 indicators");
    }
    for (size_t b = 0; b < a; ++b) {
      if (inner_product(basis[a], basis[b]).sup_norm() > tol)
        throw contract_error("trace_via_fourier_basis: basis is not orthogonal");
    }
  }
  for (Index k = 0; k < nt; ++k) {  // completeness: sum of rank-ones is the module unit
    FiberMatrix<Scalar> resolved = FiberMatrix<Scalar>::Zero(d, d);
    for (const auto& zeta : basis) resolved += zeta.fiber(k) * zeta.fiber(k).adjoint();
    FiberMatrix<Scalar> unit = FiberMatrix<Scalar>::Identity(d, d);
    if (u.mask())
      for (Index i = 0; i < d; ++i)
        if (!(*u.mask())(i, k)) unit(i, i) = Scalar(0);
    if ((resolved - unit).norm() > tol * std::max<Real>(Real(1), std::sqrt(Real(d))))
      throw contract_error("trace_via_fourier_basis: basis does not resolve the module unit");
  }
  FiberVector<Scalar> v = FiberVector<Scalar>::Zero(nt);
  for (const auto& zeta : basis) {
    const auto ip = inner_product(u * zeta, zeta);
    for (Index k = 0; k < nt; ++k) v[k] += ip(k);
  }
  return ScalarField<Scalar>(u.space(), std::move(v));
}

// Hilbert-Schmidt inner product <u,v> = tr(v^* u), E-valued.
template <typename Scalar>
ScalarField<Scalar> hs_inner(const OperatorField<Scalar>& u, const OperatorField<Scalar>& v) {
  require_same_space(u.space(), v.space(), "hs_inner");
  if (u.dim() != v.dim()) throw contract_error("hs_inner: fiber dimension mismatch");
  return pointwise_fiber_trace(adjoint(v) * u);
}

// Dual pairing <v,u> = tr(uv) = tr(vu).
template <typename Scalar>
ScalarField<Scalar> dual_pair(const OperatorField<Scalar>& v, const OperatorField<Scalar>& u) {
  require_same_space(u.space(), v.space(), "dual_pair");
  if (u.dim() != v.dim()) throw contract_error("dual_pair: fiber dimension mismatch");
  return pointwise_fiber_trace(u * v);
}

// The Hoelder norming element for u at exponent p: v with
// ||uv||_1 = ||vu||_1 = ||u||_p ||v||_q. For p in (1,inf) this is
// sum_n theta_n^(p-1) eta_n <., xi_n>; p = 1 takes the identity and p = 0 a
// single rank-one term. The zero operator maps to zero.
template <typename Scalar>
OperatorField<Scalar> norming_element(const OperatorField<Scalar>& u,
                                      const SingularSystem<Scalar>& sys, double p) {
  require_valid_exponent(p, "norming_element");
  if (std::isinf(p)) throw contract_error("norming_element: p must be finite or 0");
  if (p == 1.0) return OperatorField<Scalar>::identity(u.space(), u.dim());
  if (sys.levels() == 0) return OperatorField<Scalar>::zero(u.space(), u.dim(), u.mask());
  if (sys.theta.front().sup_norm() == 0)
    return OperatorField<Scalar>::zero(u.space(), u.dim(), u.mask());
  if (p == 0.0) return rank_one(sys.eta.front(), sys.xi.front());
  OperatorField<Scalar> v = OperatorField<Scalar>::zero(u.space(), u.dim(), u.mask());
  for (Index n = 0; n < sys.levels(); ++n) {
    FiberVector<Scalar> w(u.num_points());
    for (Index k = 0; k < u.num_points(); ++k)
      w[k] = Scalar(std::pow(Eigen::numext::real(sys.theta[static_cast<size_t>(n)](k)),
                             RealOf<Scalar>(p - 1.0)));
    const ScalarField<Scalar> weight(u.space(), std::move(w), true);
    v = v + module_scale(rank_one(sys.eta[static_cast<size_t>(n)], sys.xi[static_cast<size_t>(n)]),
                         weight);
  }
  return v;
}

// A module functional on the operator fields: evaluation plus the metadata
// needed to reconstruct the operator behind it.
template <typename Scalar>
struct DualFunctional {
  SpacePtr space;
  Index dim = 0;
  std::function<ScalarField<Scalar>(const OperatorField<Scalar>&)> eval;
  bool module_linear_checked = false;
  mutable std::optional<OperatorField<Scalar>> generator_cache;  // phi on rank_one(e_l, e_i)
};

template <typename Scalar>
DualFunctional<Scalar> make_functional(const OperatorField<Scalar>& v) {
  DualFunctional<Scalar> phi;
  phi.space = v.space();
  phi.dim = v.dim();
  phi.eval = [v](const OperatorField<Scalar>& u) { return dual_pair(v, u); };
  return phi;
}

template <typename Scalar>
DualFunctional<Scalar> make_trace_functional(SpacePtr space, Index dim) {
  DualFunctional<Scalar> phi;
  phi.space = std::move(space);
  phi.dim = dim;
  phi.eval = [](const OperatorField<Scalar>& u) { return pointwise_fiber_trace(u); };
  return phi;
}

// phi^*(u) = (phi(u^*))^*
template <typename Scalar>
DualFunctional<Scalar> adjoint_functional(const DualFunctional<Scalar>& phi) {
  DualFunctional<Scalar> out;
  out.space = phi.space;
  out.dim = phi.dim;
  out.eval = [inner = phi.eval](const OperatorField<Scalar>& u) {
    return conj(inner(adjoint(u)));
  };
  return out;
}

// Reconstructs the operator field v with dual_pair(v, .) == phi, through the
// generator matrix phi(e_lambda <., e_iota>). Module linearity and the
// round trip are validated on the generators; a violation names the failing
// generator.
template <typename Scalar>
OperatorField<Scalar> functional_to_operator(const DualFunctional<Scalar>& phi,
                                             RealOf<Scalar> tol = 1e-9) {
  using Real = RealOf<Scalar>;
  if (!phi.space || phi.dim < 1 || !phi.eval)
    throw contract_error("functional_to_operator: functional is not fully specified");
  const Index d = phi.dim;
  const Index nt = phi.space->size();

  std::vector<FiberMatrix<Scalar>> fibers(static_cast<size_t>(nt), FiberMatrix<Scalar>(d, d));
  Rng rng(0x0f1e2d3c);
  Real scale = Real(1);
  for (Index lambda = 0; lambda < d; ++lambda) {
    const auto e_lambda = VectorField<Scalar>::standard_basis(phi.space, d, lambda);
    for (Index iota = 0; iota < d; ++iota) {
      const auto e_iota = VectorField<Scalar>::standard_basis(phi.space, d, iota);
      const auto generator = rank_one(e_lambda, e_iota);
      const auto value = phi.eval(generator);
      scale = std::max<Real>(scale, value.sup_norm());
      for (Index k = 0; k < nt; ++k) fibers[static_cast<size_t>(k)](iota, lambda) = value(k);

      // condition 1 on this generator, with a seeded scalar field
      const auto x = random_scalar_field<Scalar>(phi.space, rng);
      const auto lhs = phi.eval(module_scale(generator, x));
      const auto rhs = value * x;
      if ((lhs.values() - rhs.values()).norm() >
          tol * std::max<Real>(Real(1), rhs.values().norm()))
        throw contract_error(
            "functional_to_operator: phi(ux) != phi(u)x on generator (iota=" +
            std::to_string(iota) + ", lambda=" + std::to_string(lambda) + ")");
    }
  }
  OperatorField<Scalar> v(phi.space, std::move(fibers));

  for (Index lambda = 0; lambda < d; ++lambda) {  // round trip on the generators
    const auto e_lambda = VectorField<Scalar>::standard_basis(phi.space, d, lambda);
    for (Index iota = 0; iota < d; ++iota) {
      const auto generator = rank_one(e_lambda, VectorField<Scalar>::standard_basis(phi.space, d, iota));
      const auto direct = phi.eval(generator);
      const auto through_v = dual_pair(v, generator);
      if ((direct.values() - through_v.values()).norm() > tol * scale * Real(10))
        throw contract_error(
            "functional_to_operator: round trip fails on generator (iota=" +
            std::to_string(iota) + ", lambda=" + std::to_string(lambda) + ")");
    }
  }
  phi.generator_cache = v;
  return v;
}

using LpReportXcd = LpReport<cd>;
using DualFunctionalXcd = DualFunctional<cd>;

}  // namespace opfield

#endif  // OPFIELD_TRACECLASS_HPP

/* SPDX-License-Identifier: Apache-2.0 */
#ifndef OPFIELD_SCHATTEN_HPP
#define OPFIELD_SCHATTEN_HPP

//
// Singular-value fields, u-orthonormal vector-field systems, phase alignment
// across the parameter space, Schatten decomposition, tail truncation and
// Omega-family sums.
//
// Alignment convention: points are visited along a breadth-first traversal
// of the adjacency graph (declared-order chain when no adjacency); every
// point aligns its phase against its traversal parent. When the overlap
// magnitude falls below overlap_tol the point keeps a fresh phase and the
// event is recorded instead of failing; spectral crossings and support
// boundaries surface this way.
//

#include <cmath>
#include <string>
#include <vector>

#include "opfield/denselin.hpp"
#include "opfield/fieldcore.hpp"
#include "opfield/parallel.hpp"

namespace opfield {

inline constexpr double default_overlap_tol = 1e-8;

// A point that restarted with a fresh phase during alignment. `level` is the
// 0-based index n-1 of the singular level being aligned (0 for standalone
// vector-field alignment).
struct AlignmentEvent {
  Index point = 0;
  Index level = 0;
  double overlap = 0;
};

// The triple of a Schatten decomposition u = sum_n theta_n xi_n<.,eta_n>,
// with support indicators e_n and the re-anchoring diagnostics collected
// while the eigenvector fields were aligned.
template <typename Scalar>
struct SingularSystem {
  std::vector<ScalarField<Scalar>> theta;
  std::vector<VectorField<Scalar>> xi;
  std::vector<VectorField<Scalar>> eta;
  std::vector<ScalarField<Scalar>> e;
  std::vector<AlignmentEvent> realignments;

  Index levels() const { return static_cast<Index>(theta.size()); }
};

// Sequences of vector fields whose nonzero fibers are orthonormal at every
// point; the test family of the sup-characterization of the p-power sums.
template <typename Scalar>
struct OmegaFamily {
  std::vector<VectorField<Scalar>> zeta;

  Index size() const { return static_cast<Index>(zeta.size()); }
};

namespace detail {

template <typename Scalar>
std::vector<denselin::SvdSystem<Scalar>> fiber_svds(const OperatorField<Scalar>& u) {
  std::vector<denselin::SvdSystem<Scalar>> out(static_cast<size_t>(u.num_points()));
  parallel_for(u.num_points(), [&](Index k) { out[static_cast<size_t>(k)] = denselin::svd<Scalar>(u.fiber(k)); });
  return out;
}

// In-place parent alignment of one level. `comps` columns are fiber vectors;
// a parallel `companion` (when present) receives the same phases.
template <typename Scalar>
void align_level(const ParameterSpace& space, FiberMatrix<Scalar>& comps,
                 FiberMatrix<Scalar>* companion, Index root, double overlap_tol, Index level,
                 std::vector<AlignmentEvent>& events) {
  const auto trav = space.traversal(root);
  for (Index i = 1; i < static_cast<Index>(trav.order.size()); ++i) {
    const Index t = trav.order[static_cast<size_t>(i)];
    const Index p = trav.parent[static_cast<size_t>(t)];
    if (comps.col(t).norm() == 0) continue;
    const Scalar z = comps.col(t).adjoint() * comps.col(p);
    const auto mag = Eigen::numext::abs(z);
    if (mag < overlap_tol) {
      events.push_back({t, level, static_cast<double>(mag)});
      continue;  // fresh phase
    }
    const Scalar phase = z / Scalar(mag);
    comps.col(t) *= phase;
    if (companion) companion->col(t) *= phase;
  }
}

}  // namespace detail

// Operator norm of the field: sup over T of the largest fiber singular
// value, reduced in declared point order.
template <typename Scalar>
RealOf<Scalar> op_norm(const OperatorField<Scalar>& u) {
  using Real = RealOf<Scalar>;
  std::vector<Real> sigma1(static_cast<size_t>(u.num_points()), Real(0));
  parallel_for(u.num_points(), [&](Index k) {
    const auto s = denselin::svd<Scalar>(u.fiber(k)).sigma;
    sigma1[static_cast<size_t>(k)] = s.size() ? s[0] : Real(0);
  });
  Real m = 0;
  for (Real s : sigma1) m = std::max(m, s);
  return m;
}

// theta_n(u) for n = 1..N: the n-th singular value of each fiber, pointwise
// descending in n.
template <typename Scalar>
std::vector<ScalarField<Scalar>> singular_value_fields(const OperatorField<Scalar>& u, Index n_levels) {
  if (n_levels < 0 || n_levels > u.dim())
    throw contract_error("singular_value_fields: level count exceeds fiber dimension");
  const auto svds = detail::fiber_svds(u);
  std::vector<ScalarField<Scalar>> theta;
  theta.reserve(static_cast<size_t>(n_levels));
  for (Index n = 0; n < n_levels; ++n) {
    FiberVector<Scalar> v(u.num_points());
    for (Index k = 0; k < u.num_points(); ++k) v[k] = Scalar(svds[static_cast<size_t>(k)].sigma[n]);
    theta.emplace_back(u.space(), std::move(v), true);
  }
  return theta;
}

// Indicator of {theta_n > zero_tol}; on the discrete space the closure of
// the support is the support itself.
template <typename Scalar>
ScalarField<Scalar> support_indicator(const ScalarField<Scalar>& theta_n, RealOf<Scalar> zero_tol) {
  FiberVector<Scalar> v(theta_n.num_points());
  for (Index k = 0; k < theta_n.num_points(); ++k)
    v[k] = Eigen::numext::real(theta_n(k)) > zero_tol ? Scalar(1) : Scalar(0);
  return ScalarField<Scalar>(theta_n.space(), std::move(v), true);
}

// Phase alignment of a single vector field along the traversal rooted at
// `anchor`. The anchor keeps its phase; every other point rotates by the
// unit phase of its overlap with the aligned parent, so rank-one projection
// fields are unchanged.
template <typename Scalar>
VectorField<Scalar> phase_align_with_events(const VectorField<Scalar>& eta, Index anchor,
                                            std::vector<AlignmentEvent>& events,
                                            double overlap_tol = default_overlap_tol) {
  if (anchor < 0 || anchor >= eta.num_points())
    throw contract_error("phase_align: anchor out of range");
  if (eta.fiber(anchor).norm() == 0)
    throw contract_error("phase_align: field vanishes at the anchor point");
  typename VectorField<Scalar>::Components comps = eta.components();
  detail::align_level<Scalar>(*eta.space(), comps, nullptr, anchor, overlap_tol, 0, events);
  return VectorField<Scalar>(eta.space(), std::move(comps), eta.mask());
}

template <typename Scalar>
VectorField<Scalar> phase_align(const VectorField<Scalar>& eta, Index anchor,
                                double overlap_tol = default_overlap_tol) {
  std::vector<AlignmentEvent> events;
  return phase_align_with_events(eta, anchor, events, overlap_tol);
}

template <typename Scalar>
VectorField<Scalar> phase_align(const VectorField<Scalar>& eta, std::string_view anchor,
                                double overlap_tol = default_overlap_tol) {
  return phase_align(eta, eta.space()->index_of(anchor), overlap_tol);
}

// Schatten decomposition of a positive operator field: fiberwise Hermitian
// eigendecomposition, support cut at zero_tol (default 1e-12 relative to the
// operator norm), then per-level phase alignment. xi == eta.
template <typename Scalar>
SingularSystem<Scalar> schatten_decompose_positive(const OperatorField<Scalar>& u,
                                                   RealOf<Scalar> tol = -1,
                                                   RealOf<Scalar> zero_tol = -1,
                                                   double overlap_tol = default_overlap_tol) {
  using Real = RealOf<Scalar>;
  if (!is_positive(u, tol)) throw contract_error("schatten_decompose_positive: input is not positive");
  const Index d = u.dim();
  const Index nt = u.num_points();

  std::vector<denselin::EigSystem<Scalar>> eigs(static_cast<size_t>(nt));
  parallel_for(nt, [&](Index k) { eigs[static_cast<size_t>(k)] = denselin::hermitian_eig<Scalar>(u.fiber(k)); });

  Real sup_theta1 = 0;
  for (Index k = 0; k < nt; ++k)
    sup_theta1 = std::max<Real>(sup_theta1, std::max<Real>(eigs[static_cast<size_t>(k)].values[0], Real(0)));
  if (zero_tol < 0) zero_tol = Real(1e-12) * sup_theta1;

  SingularSystem<Scalar> sys;
  for (Index n = 0; n < d; ++n) {
    FiberVector<Scalar> tv(nt);
    FiberMatrix<Scalar> comps(d, nt);
    for (Index k = 0; k < nt; ++k) {
      const Real lambda = std::max<Real>(eigs[static_cast<size_t>(k)].values[n], Real(0));
      tv[k] = Scalar(lambda);
      if (lambda > zero_tol)
        comps.col(k) = eigs[static_cast<size_t>(k)].vectors.col(n);
      else
        comps.col(k).setZero();
    }
    detail::align_level<Scalar>(*u.space(), comps, nullptr, 0, overlap_tol, n, sys.realignments);
    sys.theta.emplace_back(u.space(), std::move(tv), true);
    sys.e.push_back(support_indicator(sys.theta.back(), zero_tol));
    VectorField<Scalar> xi_n(u.space(), std::move(comps), u.mask());
    sys.xi.push_back(xi_n);
    sys.eta.push_back(std::move(xi_n));
  }
  return sys;
}

// Schatten decomposition of a general operator field, built from the polar
// representation u = w |u|: decompose |u| into (theta_n, eta_n) and set
// xi_n := w eta_n, which carries the eta phases along.
template <typename Scalar>
SingularSystem<Scalar> schatten_decompose(const OperatorField<Scalar>& u,
                                          RealOf<Scalar> zero_tol = -1,
                                          double overlap_tol = default_overlap_tol) {
  const Index d = u.dim();
  const Index nt = u.num_points();

  std::vector<denselin::PolarDecomposition<Scalar>> polars(static_cast<size_t>(nt));
  parallel_for(nt, [&](Index k) { polars[static_cast<size_t>(k)] = denselin::polar<Scalar>(u.fiber(k)); });

  std::vector<FiberMatrix<Scalar>> abs_fibers;
  abs_fibers.reserve(static_cast<size_t>(nt));
  for (Index k = 0; k < nt; ++k) abs_fibers.push_back(polars[static_cast<size_t>(k)].absolute);
  const OperatorField<Scalar> abs_u(u.space(), std::move(abs_fibers), u.mask());

  SingularSystem<Scalar> sys = schatten_decompose_positive(abs_u, -1, zero_tol, overlap_tol);
  sys.xi.clear();
  for (Index n = 0; n < d; ++n) {
    FiberMatrix<Scalar> comps(d, nt);
    for (Index k = 0; k < nt; ++k)
      comps.col(k) = polars[static_cast<size_t>(k)].partial_isometry * sys.eta[static_cast<size_t>(n)].fiber(k);
    sys.xi.emplace_back(u.space(), std::move(comps), u.mask());
  }
  return sys;
}

// sum_n theta_n xi_n <., eta_n>, summed in increasing n (decreasing theta).
template <typename Scalar>
OperatorField<Scalar> reconstruct(const SingularSystem<Scalar>& sys) {
  if (sys.levels() == 0) throw contract_error("reconstruct: empty system");
  const auto& space = sys.theta.front().space();
  const Index nt = space->size();
  const Index d = sys.xi.front().dim();
  std::vector<FiberMatrix<Scalar>> f(static_cast<size_t>(nt), FiberMatrix<Scalar>::Zero(d, d));
  for (Index n = 0; n < sys.levels(); ++n)
    for (Index k = 0; k < nt; ++k)
      f[static_cast<size_t>(k)] += sys.theta[static_cast<size_t>(n)](k) *
                                   (sys.xi[static_cast<size_t>(n)].fiber(k) *
                                    sys.eta[static_cast<size_t>(n)].fiber(k).adjoint());
  return OperatorField<Scalar>(space, std::move(f));
}

// Validation of the u-orthonormal system contracts. Returns the largest
// violation found; callers pick the tolerance.
template <typename Scalar>
struct SystemDiagnostics {
  RealOf<Scalar> orthonormality = 0;  // |<v_m,v_n> - delta_mn e_n| over both systems
  RealOf<Scalar> descending = 0;      // max of theta_{n+1} - theta_n
  RealOf<Scalar> support = 0;         // vector mass off support, indicator not in {0,1}
};

template <typename Scalar>
SystemDiagnostics<Scalar> validate_system(const SingularSystem<Scalar>& sys) {
  using Real = RealOf<Scalar>;
  SystemDiagnostics<Scalar> diag;
  const Index levels = sys.levels();
  if (levels == 0) return diag;
  const Index nt = sys.theta.front().num_points();
  for (Index n = 0; n < levels; ++n) {
    for (Index k = 0; k < nt; ++k) {
      const Real th = Eigen::numext::real(sys.theta[static_cast<size_t>(n)](k));
      if (n + 1 < levels)
        diag.descending = std::max<Real>(
            diag.descending, Eigen::numext::real(sys.theta[static_cast<size_t>(n + 1)](k)) - th);
      const Real ek = Eigen::numext::real(sys.e[static_cast<size_t>(n)](k));
      diag.support = std::max<Real>(diag.support, std::min(std::abs(ek), std::abs(ek - Real(1))));
      if (ek == Real(0)) {
        diag.support = std::max<Real>(diag.support, sys.xi[static_cast<size_t>(n)].fiber(k).norm());
        diag.support = std::max<Real>(diag.support, sys.eta[static_cast<size_t>(n)].fiber(k).norm());
      }
    }
    for (Index m = 0; m <= n; ++m) {
      for (const auto* family : {&sys.xi, &sys.eta}) {
        const auto ip = inner_product((*family)[static_cast<size_t>(m)], (*family)[static_cast<size_t>(n)]);
        for (Index k = 0; k < nt; ++k) {
          const Scalar expect = m == n ? Scalar(sys.e[static_cast<size_t>(n)](k)) : Scalar(0);
          diag.orthonormality = std::max<Real>(diag.orthonormality, Eigen::numext::abs(ip(k) - expect));
        }
      }
    }
  }
  return diag;
}

// Per-level neighbor jump of the rank-one projection fields xi_n<.,xi_n>,
// measured over the diagnostic edges whose endpoints both carry support.
// The discrete stand-in for eigenprojection continuity.
template <typename Scalar>
std::vector<RealOf<Scalar>> projection_edge_jumps(const SingularSystem<Scalar>& sys) {
  using Real = RealOf<Scalar>;
  std::vector<Real> jumps;
  if (sys.levels() == 0) return jumps;
  const auto& space = *sys.theta.front().space();
  for (Index n = 0; n < sys.levels(); ++n) {
    Real m = 0;
    const auto& xi = sys.xi[static_cast<size_t>(n)];
    const auto& e = sys.e[static_cast<size_t>(n)];
    for (const auto& [a, b] : space.diagnostic_edges()) {
      if (Eigen::numext::real(e(a)) == 0 || Eigen::numext::real(e(b)) == 0) continue;
      const auto pa = (xi.fiber(a) * xi.fiber(a).adjoint()).eval();
      const auto pb = (xi.fiber(b) * xi.fiber(b).adjoint()).eval();
      m = std::max<Real>(m, (pa - pb).norm());
    }
    jumps.push_back(m);
  }
  return jumps;
}

// (1/k) (sum_n n^(-2p))^(1/p): the tail bound delivered by truncate_tail.
inline double truncation_bound(Index k, double p) {
  if (k < 1 || p < 1.0 || !std::isfinite(p)) throw contract_error("truncation_bound: need k >= 1, p in [1,inf)");
  const double s = 2.0 * p;
  const Index cut = 1000;
  double sum = 0;
  for (Index n = 1; n <= cut; ++n) sum += std::pow(static_cast<double>(n), -s);
  const double nc = static_cast<double>(cut);
  sum += std::pow(nc, 1.0 - s) / (s - 1.0) - 0.5 * std::pow(nc, -s) + s / 12.0 * std::pow(nc, -s - 1.0);
  return std::pow(sum, 1.0 / p) / static_cast<double>(k);
}

// Dense truncation u_k = sum_n theta_n xi_n <., eta_n e_{n,k}> with
// e_{n,k} = indicator{theta_n > 1/(k n^2)}; guarantees
// theta_n(u - u_k) <= 1/(k n^2) pointwise.
template <typename Scalar>
OperatorField<Scalar> truncate_tail(const OperatorField<Scalar>& u, const SingularSystem<Scalar>& sys,
                                    Index k, double p) {
  if (k < 1) throw contract_error("truncate_tail: k must be >= 1");
  if (p < 1.0 || !std::isfinite(p)) throw contract_error("truncate_tail: p must lie in [1,inf)");
  OperatorField<Scalar> u_k = OperatorField<Scalar>::zero(u.space(), u.dim(), u.mask());
  for (Index n = 0; n < sys.levels(); ++n) {
    const double threshold = 1.0 / (static_cast<double>(k) * static_cast<double>((n + 1) * (n + 1)));
    const auto e_nk = support_indicator(sys.theta[static_cast<size_t>(n)], threshold);
    const auto term = rank_one(sys.xi[static_cast<size_t>(n)],
                               module_scale(sys.eta[static_cast<size_t>(n)], e_nk));
    u_k = u_k + module_scale(term, sys.theta[static_cast<size_t>(n)]);
  }
  return u_k;
}

// Largest pointwise orthonormality violation among the nonzero fibers of the
// family; fibers with norm <= member_tol count as absent.
template <typename Scalar>
RealOf<Scalar> omega_violation(const OmegaFamily<Scalar>& fam, RealOf<Scalar> member_tol = 1e-12) {
  using Real = RealOf<Scalar>;
  Real worst = 0;
  if (fam.size() == 0) return worst;
  const Index nt = fam.zeta.front().num_points();
  for (Index k = 0; k < nt; ++k) {
    std::vector<FiberVector<Scalar>> members;
    for (const auto& z : fam.zeta)
      if (z.fiber(k).norm() > member_tol) members.push_back(z.fiber(k));
    for (size_t a = 0; a < members.size(); ++a)
      for (size_t b = 0; b <= a; ++b) {
        const Scalar ip = members[b].adjoint() * members[a];
        const Scalar expect = a == b ? Scalar(1) : Scalar(0);
        worst = std::max<Real>(worst, Eigen::numext::abs(ip - expect));
      }
  }
  return worst;
}

// Field t |-> sum_n |<u zeta_n, zeta'_n>(t)|^p over a pair of Omega
// families; bounded by sum_n theta_n(u)^p pointwise and attained by the
// (masked) singular-vector systems.
template <typename Scalar>
ScalarField<Scalar> omega_sum(const OperatorField<Scalar>& u, const OmegaFamily<Scalar>& input_family,
                              const OmegaFamily<Scalar>& output_family, double p,
                              RealOf<Scalar> family_tol = 1e-8) {
  using Real = RealOf<Scalar>;
  if (p < 1.0 || !std::isfinite(p)) throw contract_error("omega_sum: p must lie in [1,inf)");
  if (input_family.size() != output_family.size())
    throw contract_error("omega_sum: families must have equal length");
  if (omega_violation(input_family) > family_tol || omega_violation(output_family) > family_tol)
    throw contract_error("omega_sum: family is not pointwise orthonormal within tolerance");
  FiberVector<Scalar> v = FiberVector<Scalar>::Zero(u.num_points());
  for (Index n = 0; n < input_family.size(); ++n) {
    const auto pairing = inner_product(u * input_family.zeta[static_cast<size_t>(n)],
                                       output_family.zeta[static_cast<size_t>(n)]);
    for (Index k = 0; k < u.num_points(); ++k)
      v[k] += Scalar(std::pow(Eigen::numext::abs(pairing(k)), Real(p)));
  }
  return ScalarField<Scalar>(u.space(), std::move(v), true);
}

// |u|: fiberwise (u^H u)^(1/2) via the polar decomposition.
template <typename Scalar>
OperatorField<Scalar> absolute_value(const OperatorField<Scalar>& u) {
  std::vector<FiberMatrix<Scalar>> f(static_cast<size_t>(u.num_points()));
  parallel_for(u.num_points(), [&](Index k) { f[static_cast<size_t>(k)] = denselin::polar<Scalar>(u.fiber(k)).absolute; });
  return OperatorField<Scalar>(u.space(), std::move(f), u.mask());
}

// Functional calculus u^p for positive u and p > 0 (eigenvalues clamped at
// zero before the power).
template <typename Scalar>
OperatorField<Scalar> positive_power(const OperatorField<Scalar>& u, double p,
                                     RealOf<Scalar> tol = -1) {
  using Real = RealOf<Scalar>;
  if (p <= 0 || !std::isfinite(p)) throw contract_error("positive_power: exponent must be positive");
  if (!is_positive(u, tol)) throw contract_error("positive_power: input is not positive");
  std::vector<FiberMatrix<Scalar>> f(static_cast<size_t>(u.num_points()));
  parallel_for(u.num_points(), [&](Index k) {
    const auto eig = denselin::hermitian_eig<Scalar>(u.fiber(k));
    FiberVector<RealOf<Scalar>> powered(eig.values.size());
    for (Index i = 0; i < eig.values.size(); ++i)
      powered[i] = std::pow(std::max<Real>(eig.values[i], Real(0)), Real(p));
    f[static_cast<size_t>(k)] =
        eig.vectors * powered.template cast<Scalar>().asDiagonal() * eig.vectors.adjoint();
  });
  return OperatorField<Scalar>(u.space(), std::move(f), u.mask());
}

}  // namespace opfield

#endif  // OPFIELD_SCHATTEN_HPP

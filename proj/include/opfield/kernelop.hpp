/* SPDX-License-Identifier: Apache-2.0 */
#ifndef OPFIELD_KERNELOP_HPP
#define OPFIELD_KERNELOP_HPP

//
// Integral operators from E-valued kernels on a quadrature space S: the
// L2(mu) (x) E ~ H transform, kernel application, adjoint kernels, the
// Hilbert-Schmidt norm identity, and separable approximation. The fiber
// index set and S share cardinality d = |S|, so the transform is square.
//

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "opfield/fieldcore.hpp"
#include "opfield/parallel.hpp"

namespace opfield {

// Finite node set with strictly positive weights, standing in for (S, mu).
class QuadratureSpace {
 public:
  QuadratureSpace(std::vector<std::string> nodes, Eigen::VectorXd weights)
      : nodes_(std::move(nodes)), weights_(std::move(weights)) {
    if (nodes_.empty() || static_cast<Index>(nodes_.size()) != weights_.size())
      throw contract_error("QuadratureSpace: nodes and weights must match and be nonempty");
    for (Index j = 0; j < weights_.size(); ++j)
      if (!(weights_[j] > 0)) throw contract_error("QuadratureSpace: weights must be positive");
  }

  Index size() const { return weights_.size(); }
  const std::string& node(Index j) const { return nodes_.at(static_cast<size_t>(j)); }
  const std::vector<std::string>& nodes() const { return nodes_; }
  double weight(Index j) const { return weights_[j]; }
  const Eigen::VectorXd& weights() const { return weights_; }
  double total_mass() const { return weights_.sum(); }

 private:
  std::vector<std::string> nodes_;
  Eigen::VectorXd weights_;
};

using QuadPtr = std::shared_ptr<const QuadratureSpace>;

inline QuadPtr make_quadrature(std::vector<std::string> nodes, Eigen::VectorXd weights) {
  return std::make_shared<const QuadratureSpace>(std::move(nodes), std::move(weights));
}

// E-valued function sampled on the quadrature nodes: one scalar field per
// node.
template <typename Scalar>
using SampledField = std::vector<ScalarField<Scalar>>;

// discrete L2(mu) inner product, linear in the first argument
template <typename Scalar>
Scalar l2_inner(const QuadratureSpace& quad, const FiberVector<Scalar>& f,
                const FiberVector<Scalar>& g) {
  if (f.size() != quad.size() || g.size() != quad.size())
    throw contract_error("l2_inner: vector length does not match the quadrature");
  Scalar sum(0);
  for (Index j = 0; j < quad.size(); ++j)
    sum += f[j] * Eigen::numext::conj(g[j]) * Scalar(quad.weight(j));
  return sum;
}

// Orthonormal basis of the discrete L2(mu): column iota holds h_iota sampled
// at the nodes. The standard choice is the node indicators scaled by
// mu_j^(-1/2), which is exactly orthonormal.
template <typename Scalar>
class L2Basis {
 public:
  L2Basis(QuadPtr quad, FiberMatrix<Scalar> samples)
      : quad_(std::move(quad)), h_(std::move(samples)) {
    if (!quad_ || h_.rows() != quad_->size())
      throw contract_error("L2Basis: sample rows must match the quadrature nodes");
  }

  static L2Basis standard(QuadPtr quad) {
    const Index n = quad->size();
    FiberMatrix<Scalar> h = FiberMatrix<Scalar>::Zero(n, n);
    for (Index j = 0; j < n; ++j) h(j, j) = Scalar(1.0 / std::sqrt(quad->weight(j)));
    return L2Basis(std::move(quad), std::move(h));
  }

  const QuadPtr& quadrature() const { return quad_; }
  Index size() const { return h_.cols(); }
  FiberVector<Scalar> function(Index iota) const { return h_.col(iota); }
  const FiberMatrix<Scalar>& samples() const { return h_; }

  RealOf<Scalar> orthonormality_violation() const {
    RealOf<Scalar> worst = 0;
    for (Index a = 0; a < size(); ++a)
      for (Index b = 0; b <= a; ++b) {
        const Scalar ip = l2_inner<Scalar>(*quad_, h_.col(a), h_.col(b));
        const Scalar expect = a == b ? Scalar(1) : Scalar(0);
        worst = std::max<RealOf<Scalar>>(worst, Eigen::numext::abs(ip - expect));
      }
    return worst;
  }

 private:
  QuadPtr quad_;
  FiberMatrix<Scalar> h_;
};

// E-valued kernel on S x S: one |S| x |S| matrix of values per point of T.
template <typename Scalar>
class KernelField {
 public:
  KernelField(QuadPtr quad, SpacePtr space, std::vector<FiberMatrix<Scalar>> slices)
      : quad_(std::move(quad)), space_(std::move(space)), slices_(std::move(slices)) {
    if (!quad_ || !space_ || static_cast<Index>(slices_.size()) != space_->size())
      throw contract_error("KernelField: slice count must match the parameter space");
    for (const auto& s : slices_)
      if (s.rows() != quad_->size() || s.cols() != quad_->size())
        throw contract_error("KernelField: slices must be |S| x |S|");
  }

  const QuadPtr& quadrature() const { return quad_; }
  const SpacePtr& space() const { return space_; }
  Index num_nodes() const { return quad_->size(); }
  Index num_points() const { return space_->size(); }
  // slice at one parameter point: (r,s) |-> w(r,s)(t)
  const FiberMatrix<Scalar>& slice(Index t) const { return slices_.at(static_cast<size_t>(t)); }
  Scalar value(Index r, Index s, Index t) const { return slice(t)(r, s); }

  // sup norm: max over node pairs of the E-sup of w(r,s)
  RealOf<Scalar> sup_norm() const {
    RealOf<Scalar> m = 0;
    for (const auto& s : slices_)
      m = std::max<RealOf<Scalar>>(m, s.cwiseAbs().maxCoeff());
    return m;
  }

 private:
  QuadPtr quad_;
  SpacePtr space_;
  std::vector<FiberMatrix<Scalar>> slices_;
};

// kernel (r,s) |-> a(r) b(s) from an E-valued factor a and a scalar factor b
template <typename Scalar>
KernelField<Scalar> separable_kernel(const QuadPtr& quad, const SpacePtr& space,
                                     const SampledField<Scalar>& a, const FiberVector<Scalar>& b) {
  if (static_cast<Index>(a.size()) != quad->size() || b.size() != quad->size())
    throw contract_error("separable_kernel: factor length does not match the quadrature");
  std::vector<FiberMatrix<Scalar>> slices(static_cast<size_t>(space->size()),
                                          FiberMatrix<Scalar>(quad->size(), quad->size()));
  for (Index t = 0; t < space->size(); ++t)
    for (Index r = 0; r < quad->size(); ++r)
      for (Index s = 0; s < quad->size(); ++s)
        slices[static_cast<size_t>(t)](r, s) = a[static_cast<size_t>(r)](t) * b[s];
  return KernelField<Scalar>(quad, space, std::move(slices));
}

// Phi(f (x) x): component iota = <f, h_iota>_{L2} * x. Inner-product
// preserving onto the standard module with d = |S|.
template <typename Scalar>
VectorField<Scalar> tensor_to_module(const FiberVector<Scalar>& f, const ScalarField<Scalar>& x,
                                     const L2Basis<Scalar>& basis) {
  const auto& quad = *basis.quadrature();
  if (f.size() != quad.size())
    throw contract_error("tensor_to_module: function length does not match the quadrature");
  const Index d = basis.size();
  FiberMatrix<Scalar> comps(d, x.num_points());
  for (Index iota = 0; iota < d; ++iota) {
    const Scalar coeff = l2_inner<Scalar>(quad, f, basis.function(iota));
    for (Index k = 0; k < x.num_points(); ++k) comps(iota, k) = coeff * x(k);
  }
  return VectorField<Scalar>(x.space(), std::move(comps));
}

// E-mu-integral of a node-sampled field: sum_j g(s_j) mu_j in E.
template <typename Scalar>
ScalarField<Scalar> integrate_field(const QuadratureSpace& quad, const SampledField<Scalar>& g) {
  if (static_cast<Index>(g.size()) != quad.size())
    throw contract_error("integrate_field: field length does not match the quadrature");
  const auto& space = g.front().space();
  FiberVector<Scalar> v = FiberVector<Scalar>::Zero(space->size());
  for (Index j = 0; j < quad.size(); ++j) {
    require_same_space(space, g[static_cast<size_t>(j)].space(), "integrate_field");
    v += Scalar(quad.weight(j)) * g[static_cast<size_t>(j)].values();
  }
  return ScalarField<Scalar>(space, std::move(v));
}

// (w~ f)(r) = sum_s w(r,s) f(s) mu_s, an E-valued function of the node r.
template <typename Scalar>
SampledField<Scalar> kernel_apply(const KernelField<Scalar>& w, const FiberVector<Scalar>& f) {
  const auto& quad = *w.quadrature();
  if (f.size() != quad.size())
    throw contract_error("kernel_apply: function length does not match the quadrature");
  SampledField<Scalar> out;
  out.reserve(static_cast<size_t>(quad.size()));
  for (Index r = 0; r < quad.size(); ++r) {
    FiberVector<Scalar> v(w.num_points());
    for (Index t = 0; t < w.num_points(); ++t) {
      Scalar sum(0);
      for (Index s = 0; s < quad.size(); ++s) sum += w.value(r, s, t) * f[s] * Scalar(quad.weight(s));
      v[t] = sum;
    }
    out.emplace_back(w.space(), std::move(v));
  }
  return out;
}

// The operator field behind the kernel: entry (iota,lambda) at t is
// sum_{r,s} conj(h_iota(r)) mu_r w(r,s)(t) h_lambda(s) mu_s, i.e. the basis
// transform of kernel application.
template <typename Scalar>
OperatorField<Scalar> kernel_to_operator(const KernelField<Scalar>& w, const L2Basis<Scalar>& basis,
                                         RealOf<Scalar> basis_tol = 1e-8) {
  const auto& quad = *w.quadrature();
  if (basis.quadrature()->size() != quad.size() || basis.size() != quad.size())
    throw contract_error("kernel_to_operator: basis must be square over the kernel quadrature");
  if (basis.orthonormality_violation() > basis_tol)
    throw contract_error("kernel_to_operator: basis is not orthonormal within tolerance");
  const Index n = quad.size();
  FiberMatrix<Scalar> weighted = basis.samples();
  for (Index j = 0; j < n; ++j) weighted.row(j) *= Scalar(quad.weight(j));
  std::vector<FiberMatrix<Scalar>> fibers(static_cast<size_t>(w.num_points()));
  parallel_for(w.num_points(), [&](Index t) {
    fibers[static_cast<size_t>(t)] = weighted.adjoint() * w.slice(t) * weighted;
  });
  return OperatorField<Scalar>(w.space(), std::move(fibers));
}

// w'(r,s) = w(s,r)^*; the operator of w' is the adjoint of the operator of w.
template <typename Scalar>
KernelField<Scalar> adjoint_kernel(const KernelField<Scalar>& w) {
  std::vector<FiberMatrix<Scalar>> slices;
  slices.reserve(static_cast<size_t>(w.num_points()));
  for (Index t = 0; t < w.num_points(); ++t) slices.push_back(w.slice(t).adjoint());
  return KernelField<Scalar>(w.quadrature(), w.space(), std::move(slices));
}

// One term of a separable approximation: an E-valued coefficient on the
// nodes and a scalar L2 factor.
template <typename Scalar>
struct SeparableTerm {
  SampledField<Scalar> coeff;    // u_k(r)
  FiberVector<Scalar> factor;    // v_k(s)
};

template <typename Scalar>
struct SeparableApproximation {
  std::vector<SeparableTerm<Scalar>> terms;
  RealOf<Scalar> error_bound = 0;  // sup over cell pairs of the oscillation vs sample
};

// Partition-of-unity separable approximation: one partition of the nodes is
// used on both axes, with the first node of each cell as its sample point
// and the cell indicators as hat functions. The reported bound is the exact
// sup deviation from the kernel.
template <typename Scalar>
SeparableApproximation<Scalar> separable_approx(const KernelField<Scalar>& w,
                                                const std::vector<std::vector<Index>>& cells) {
  using Real = RealOf<Scalar>;
  const Index n = w.num_nodes();
  std::vector<Index> owner(static_cast<size_t>(n), -1);
  for (size_t c = 0; c < cells.size(); ++c) {
    if (cells[c].empty()) throw contract_error("separable_approx: empty cell");
    for (Index j : cells[c]) {
      if (j < 0 || j >= n || owner[static_cast<size_t>(j)] != -1)
        throw contract_error("separable_approx: cells must partition the nodes");
      owner[static_cast<size_t>(j)] = static_cast<Index>(c);
    }
  }
  for (Index j = 0; j < n; ++j)
    if (owner[static_cast<size_t>(j)] == -1)
      throw contract_error("separable_approx: cells must cover every node");

  SeparableApproximation<Scalar> approx;
  for (size_t k = 0; k < cells.size(); ++k) {
    SeparableTerm<Scalar> term;
    const Index s_k = cells[k].front();
    term.coeff.reserve(static_cast<size_t>(n));
    for (Index r = 0; r < n; ++r) {
      const Index r_sample = cells[static_cast<size_t>(owner[static_cast<size_t>(r)])].front();
      FiberVector<Scalar> v(w.num_points());
      for (Index t = 0; t < w.num_points(); ++t) v[t] = w.value(r_sample, s_k, t);
      term.coeff.emplace_back(w.space(), std::move(v));
    }
    term.factor = FiberVector<Scalar>::Zero(n);
    for (Index j : cells[k]) term.factor[j] = Scalar(1);
    approx.terms.push_back(std::move(term));
  }

  Real worst = 0;
  for (Index r = 0; r < n; ++r)
    for (Index s = 0; s < n; ++s) {
      const Index r_sample = cells[static_cast<size_t>(owner[static_cast<size_t>(r)])].front();
      const Index s_sample = cells[static_cast<size_t>(owner[static_cast<size_t>(s)])].front();
      for (Index t = 0; t < w.num_points(); ++t)
        worst = std::max<Real>(worst,
                               Eigen::numext::abs(w.value(r, s, t) - w.value(r_sample, s_sample, t)));
    }
  approx.error_bound = worst;
  return approx;
}

// sum_k u_k(r) v_k(s), the kernel described by a separable approximation
template <typename Scalar>
KernelField<Scalar> reconstruct_separable(const QuadPtr& quad, const SpacePtr& space,
                                          const SeparableApproximation<Scalar>& approx) {
  std::vector<FiberMatrix<Scalar>> slices(static_cast<size_t>(space->size()),
                                          FiberMatrix<Scalar>::Zero(quad->size(), quad->size()));
  for (const auto& term : approx.terms)
    for (Index t = 0; t < space->size(); ++t)
      for (Index r = 0; r < quad->size(); ++r)
        for (Index s = 0; s < quad->size(); ++s)
          slices[static_cast<size_t>(t)](r, s) += term.coeff[static_cast<size_t>(r)](t) * term.factor[s];
  return KernelField<Scalar>(quad, space, std::move(slices));
}

using QuadratureSpacePtr = QuadPtr;
using KernelFieldXcd = KernelField<cd>;
using L2BasisXcd = L2Basis<cd>;

}  // namespace opfield

#endif  // OPFIELD_KERNELOP_HPP

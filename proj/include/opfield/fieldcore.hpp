/* SPDX-License-Identifier: Apache-2.0 */
#ifndef OPFIELD_FIELDCORE_HPP
#define OPFIELD_FIELDCORE_HPP

//
// Data model for the module of continuous fields over the parameter space:
// scalar fields (elements of E = C(T)), vector fields (elements of the
// standard module H), operator fields (one compact fiber operator per point)
// and the elementary module operations shared by every higher layer.
//
// Conventions fixed here and relied on everywhere else:
//   * the E-valued inner product is linear in the FIRST argument,
//     <xi,eta>(t) = eta(t)^H xi(t);
//   * rank_one(xi,eta) has fiber xi(t) * eta(t)^H, so that
//     rank_one(xi,eta) zeta = xi * <zeta,eta>;
//   * reductions over T (sup norms, diagnostics) run in declared point order.
//

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "opfield/denselin.hpp"
#include "opfield/parallel.hpp"
#include "opfield/parameter_space.hpp"
#include "opfield/types.hpp"

namespace opfield {

// ---------------------------------------------------------------------------
// Index mask: per-index indicator fields p_iota carving H = (+) p_iota E out
// of the full standard module. Absent mask means every p_iota = 1.
// ---------------------------------------------------------------------------

class IndexMask {
 public:
  IndexMask(Index dim, Index num_points, bool initially_on = true)
      : on_(Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(dim, num_points,
                                                                          initially_on)) {}
  explicit IndexMask(Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> on)
      : on_(std::move(on)) {}

  Index dim() const { return on_.rows(); }
  Index num_points() const { return on_.cols(); }
  bool operator()(Index component, Index point) const { return on_(component, point); }
  IndexMask& set(Index component, Index point, bool value) {
    on_(component, point) = value;
    return *this;
  }
  friend bool operator==(const IndexMask& a, const IndexMask& b) {
    return a.on_.rows() == b.on_.rows() && a.on_.cols() == b.on_.cols() &&
           a.on_.array().cwiseEqual(b.on_.array()).all();
  }

 private:
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> on_;
};

using MaskOpt = std::optional<IndexMask>;

namespace detail {

inline void require_same_mask(const MaskOpt& a, const MaskOpt& b, const char* where) {
  const bool ha = a.has_value(), hb = b.has_value();
  if (ha != hb || (ha && !(*a == *b)))
    throw contract_error(std::string(where) + ": operands carry different index masks");
}

inline MaskOpt merge_mask(const MaskOpt& a, const MaskOpt& b, const char* where) {
  if (!a.has_value() && !b.has_value()) return {};
  if (a.has_value() && b.has_value()) {
    if (!(*a == *b)) throw contract_error(std::string(where) + ": operands carry different index masks");
    return a;
  }
  return a.has_value() ? a : b;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// ScalarField: one scalar per point of T. Houses elements of E, including
// singular value fields and traces. `positive` marks fields known to be
// real and nonnegative (theta fields, support indicators, power sums).
// ---------------------------------------------------------------------------

template <typename Scalar>
class ScalarField {
 public:
  using Real = RealOf<Scalar>;
  using Values = FiberVector<Scalar>;

  ScalarField() = default;
  ScalarField(SpacePtr space, Values values, bool positive = false)
      : space_(std::move(space)), values_(std::move(values)), positive_(positive) {
    if (!space_ || values_.size() != space_->size())
      throw contract_error("ScalarField: values do not match the parameter space");
  }

  static ScalarField constant(SpacePtr space, Scalar value) {
    const Index n = space->size();
    const bool pos = Eigen::numext::imag(value) == Real(0) && Eigen::numext::real(value) >= Real(0);
    return ScalarField(std::move(space), Values::Constant(n, value), pos);
  }
  static ScalarField zero(SpacePtr space) { return constant(std::move(space), Scalar(0)); }
  static ScalarField one(SpacePtr space) { return constant(std::move(space), Scalar(1)); }

  const SpacePtr& space() const { return space_; }
  Index num_points() const { return values_.size(); }
  Scalar operator()(Index k) const { return values_[k]; }
  Scalar at(std::string_view point) const { return values_[space_->index_of(point)]; }
  const Values& values() const { return values_; }
  bool positive_flagged() const { return positive_; }

  // sup norm over T, evaluated in declared point order
  Real sup_norm() const {
    Real m = 0;
    for (Index k = 0; k < values_.size(); ++k)
      m = std::max<Real>(m, Eigen::numext::abs(values_[k]));
    return m;
  }

  // Positivity within tol: zero imaginary part, real part >= -tol.
  bool is_positive_field(Real tol) const {
    for (Index k = 0; k < values_.size(); ++k)
      if (std::abs(Eigen::numext::imag(values_[k])) > tol || Eigen::numext::real(values_[k]) < -tol)
        return false;
    return true;
  }

 private:
  SpacePtr space_;
  Values values_;
  bool positive_ = false;
};

template <typename Scalar>
ScalarField<Scalar> operator+(const ScalarField<Scalar>& a, const ScalarField<Scalar>& b) {
  require_same_space(a.space(), b.space(), "ScalarField+");
  return ScalarField<Scalar>(a.space(), a.values() + b.values(),
                             a.positive_flagged() && b.positive_flagged());
}

template <typename Scalar>
ScalarField<Scalar> operator-(const ScalarField<Scalar>& a, const ScalarField<Scalar>& b) {
  require_same_space(a.space(), b.space(), "ScalarField-");
  return ScalarField<Scalar>(a.space(), a.values() - b.values());
}

template <typename Scalar>
ScalarField<Scalar> operator*(const ScalarField<Scalar>& a, const ScalarField<Scalar>& b) {
  require_same_space(a.space(), b.space(), "ScalarField*");
  return ScalarField<Scalar>(a.space(), a.values().cwiseProduct(b.values()),
                             a.positive_flagged() && b.positive_flagged());
}

template <typename Scalar>
ScalarField<Scalar> operator*(Scalar c, const ScalarField<Scalar>& a) {
  return ScalarField<Scalar>(a.space(), (c * a.values()).eval());
}

// pointwise involution x^* = conj(x)
template <typename Scalar>
ScalarField<Scalar> conj(const ScalarField<Scalar>& a) {
  return ScalarField<Scalar>(a.space(), a.values().conjugate(), a.positive_flagged());
}

// ---------------------------------------------------------------------------
// VectorField: d components per point, optionally masked.
// ---------------------------------------------------------------------------

template <typename Scalar>
class VectorField {
 public:
  using Real = RealOf<Scalar>;
  using Components = FiberMatrix<Scalar>;  // d x |T|, column per point

  VectorField() = default;
  VectorField(SpacePtr space, Components components, MaskOpt mask = {})
      : space_(std::move(space)), comps_(std::move(components)), mask_(std::move(mask)) {
    if (!space_ || comps_.cols() != space_->size())
      throw contract_error("VectorField: components do not match the parameter space");
    if (comps_.rows() < 1) throw contract_error("VectorField: fiber dimension must be >= 1");
    if (mask_) {
      if (mask_->dim() != dim() || mask_->num_points() != comps_.cols())
        throw contract_error("VectorField: mask shape mismatch");
      for (Index k = 0; k < comps_.cols(); ++k)
        for (Index i = 0; i < dim(); ++i)
          if (!(*mask_)(i, k)) comps_(i, k) = Scalar(0);
    }
  }

  static VectorField zero(SpacePtr space, Index dim, MaskOpt mask = {}) {
    const Index n = space->size();
    return VectorField(std::move(space), Components::Zero(dim, n), std::move(mask));
  }

  // standard generator e_iota (masked: e_iota * p_iota)
  static VectorField standard_basis(SpacePtr space, Index dim, Index iota, MaskOpt mask = {}) {
    const Index n = space->size();
    Components c = Components::Zero(dim, n);
    c.row(iota).setOnes();
    return VectorField(std::move(space), std::move(c), std::move(mask));
  }

  const SpacePtr& space() const { return space_; }
  Index dim() const { return comps_.rows(); }
  Index num_points() const { return comps_.cols(); }
  const Components& components() const { return comps_; }
  const MaskOpt& mask() const { return mask_; }

  FiberVector<Scalar> fiber(Index k) const { return comps_.col(k); }
  FiberVector<Scalar> fiber(std::string_view point) const {
    return comps_.col(space_->index_of(point));
  }

  // pointwise l2 norm, a positive scalar field
  ScalarField<Scalar> pointwise_norm() const {
    FiberVector<Scalar> v(num_points());
    for (Index k = 0; k < num_points(); ++k) v[k] = Scalar(comps_.col(k).norm());
    return ScalarField<Scalar>(space_, std::move(v), true);
  }

  Real sup_norm() const {
    Real m = 0;
    for (Index k = 0; k < num_points(); ++k) m = std::max<Real>(m, comps_.col(k).norm());
    return m;
  }

 private:
  SpacePtr space_;
  Components comps_;
  MaskOpt mask_;
};

template <typename Scalar>
VectorField<Scalar> operator+(const VectorField<Scalar>& a, const VectorField<Scalar>& b) {
  require_same_space(a.space(), b.space(), "VectorField+");
  if (a.dim() != b.dim()) throw contract_error("VectorField+: fiber dimension mismatch");
  return VectorField<Scalar>(a.space(), a.components() + b.components(),
                             detail::merge_mask(a.mask(), b.mask(), "VectorField+"));
}

template <typename Scalar>
VectorField<Scalar> operator-(const VectorField<Scalar>& a, const VectorField<Scalar>& b) {
  require_same_space(a.space(), b.space(), "VectorField-");
  if (a.dim() != b.dim()) throw contract_error("VectorField-: fiber dimension mismatch");
  return VectorField<Scalar>(a.space(), a.components() - b.components(),
                             detail::merge_mask(a.mask(), b.mask(), "VectorField-"));
}

template <typename Scalar>
VectorField<Scalar> operator*(Scalar c, const VectorField<Scalar>& a) {
  return VectorField<Scalar>(a.space(), (c * a.components()).eval(), a.mask());
}

// right module action xi * x, componentwise multiplication by a scalar field
template <typename Scalar>
VectorField<Scalar> module_scale(const VectorField<Scalar>& xi, const ScalarField<Scalar>& x) {
  require_same_space(xi.space(), x.space(), "module_scale");
  typename VectorField<Scalar>::Components c = xi.components();
  for (Index k = 0; k < c.cols(); ++k) c.col(k) *= x(k);
  return VectorField<Scalar>(xi.space(), std::move(c), xi.mask());
}

// E-valued inner product, linear in the first argument:
// <xi,eta>(t) = sum_iota conj(eta_iota(t)) xi_iota(t).
template <typename Scalar>
ScalarField<Scalar> inner_product(const VectorField<Scalar>& xi, const VectorField<Scalar>& eta) {
  require_same_space(xi.space(), eta.space(), "inner_product");
  if (xi.dim() != eta.dim()) throw contract_error("inner_product: fiber dimension mismatch");
  detail::require_same_mask(xi.mask(), eta.mask(), "inner_product");
  FiberVector<Scalar> v(xi.num_points());
  for (Index k = 0; k < xi.num_points(); ++k)
    v[k] = eta.components().col(k).adjoint() * xi.components().col(k);
  return ScalarField<Scalar>(xi.space(), std::move(v));
}

// ---------------------------------------------------------------------------
// OperatorField: one d x d fiber matrix per point; the element u with fibers
// phi_t(u). Entry (iota,lambda) vanishes wherever either index is masked out.
// ---------------------------------------------------------------------------

template <typename Scalar>
class OperatorField {
 public:
  using Real = RealOf<Scalar>;
  using Fiber = FiberMatrix<Scalar>;

  OperatorField() = default;
  OperatorField(SpacePtr space, std::vector<Fiber> fibers, MaskOpt mask = {})
      : space_(std::move(space)), fibers_(std::move(fibers)), mask_(std::move(mask)) {
    if (!space_ || static_cast<Index>(fibers_.size()) != space_->size())
      throw contract_error("OperatorField: fiber count does not match the parameter space");
    const Index d = dim();
    if (d < 1) throw contract_error("OperatorField: fiber dimension must be >= 1");
    for (const auto& f : fibers_)
      if (f.rows() != d || f.cols() != d)
        throw contract_error("OperatorField: fibers must share one square dimension");
    if (mask_) {
      if (mask_->dim() != d || mask_->num_points() != static_cast<Index>(fibers_.size()))
        throw contract_error("OperatorField: mask shape mismatch");
      for (Index k = 0; k < num_points(); ++k)
        for (Index i = 0; i < d; ++i)
          for (Index j = 0; j < d; ++j)
            if (!(*mask_)(i, k) || !(*mask_)(j, k)) fibers_[static_cast<size_t>(k)](i, j) = Scalar(0);
    }
  }

  static OperatorField zero(SpacePtr space, Index dim, MaskOpt mask = {}) {
    std::vector<Fiber> f(static_cast<size_t>(space->size()), Fiber::Zero(dim, dim));
    return OperatorField(std::move(space), std::move(f), std::move(mask));
  }

  static OperatorField identity(SpacePtr space, Index dim) {
    std::vector<Fiber> f(static_cast<size_t>(space->size()), Fiber::Identity(dim, dim));
    return OperatorField(std::move(space), std::move(f));
  }

  // unit of the masked module: diag(p_iota(t)) at each point
  static OperatorField projection(SpacePtr space, const IndexMask& mask) {
    const Index d = mask.dim();
    std::vector<Fiber> f(static_cast<size_t>(space->size()), Fiber::Zero(d, d));
    for (Index k = 0; k < space->size(); ++k)
      for (Index i = 0; i < d; ++i)
        if (mask(i, k)) f[static_cast<size_t>(k)](i, i) = Scalar(1);
    return OperatorField(std::move(space), std::move(f), mask);
  }

  const SpacePtr& space() const { return space_; }
  Index dim() const { return fibers_.empty() ? 0 : fibers_.front().rows(); }
  Index num_points() const { return static_cast<Index>(fibers_.size()); }
  const Fiber& fiber(Index k) const { return fibers_.at(static_cast<size_t>(k)); }
  const std::vector<Fiber>& fibers() const { return fibers_; }
  const MaskOpt& mask() const { return mask_; }

  Real sup_frobenius() const {
    Real m = 0;
    for (const auto& f : fibers_) m = std::max<Real>(m, f.norm());
    return m;
  }

 private:
  SpacePtr space_;
  std::vector<Fiber> fibers_;
  MaskOpt mask_;
};

// fiber evaluation phi_t(u); multiplicative and involutive in t pointwise
template <typename Scalar>
FiberMatrix<Scalar> fiber_eval(const OperatorField<Scalar>& u, Index k) {
  if (k < 0 || k >= u.num_points()) throw contract_error("fiber_eval: point index out of range");
  return u.fiber(k);
}

template <typename Scalar>
FiberMatrix<Scalar> fiber_eval(const OperatorField<Scalar>& u, std::string_view point) {
  return u.fiber(u.space()->index_of(point));
}

// rank-one operator zeta |-> xi <zeta,eta>, fiber xi(t) eta(t)^H
template <typename Scalar>
OperatorField<Scalar> rank_one(const VectorField<Scalar>& xi, const VectorField<Scalar>& eta) {
  require_same_space(xi.space(), eta.space(), "rank_one");
  if (xi.dim() != eta.dim()) throw contract_error("rank_one: fiber dimension mismatch");
  detail::require_same_mask(xi.mask(), eta.mask(), "rank_one");
  std::vector<FiberMatrix<Scalar>> f;
  f.reserve(static_cast<size_t>(xi.num_points()));
  for (Index k = 0; k < xi.num_points(); ++k)
    f.push_back(xi.components().col(k) * eta.components().col(k).adjoint());
  return OperatorField<Scalar>(xi.space(), std::move(f), xi.mask());
}

// right module action u * x
template <typename Scalar>
OperatorField<Scalar> module_scale(const OperatorField<Scalar>& u, const ScalarField<Scalar>& x) {
  require_same_space(u.space(), x.space(), "module_scale");
  std::vector<FiberMatrix<Scalar>> f;
  f.reserve(static_cast<size_t>(u.num_points()));
  for (Index k = 0; k < u.num_points(); ++k) f.push_back(x(k) * u.fiber(k));
  return OperatorField<Scalar>(u.space(), std::move(f), u.mask());
}

template <typename Scalar>
OperatorField<Scalar> operator+(const OperatorField<Scalar>& a, const OperatorField<Scalar>& b) {
  require_same_space(a.space(), b.space(), "OperatorField+");
  if (a.dim() != b.dim()) throw contract_error("OperatorField+: fiber dimension mismatch");
  std::vector<FiberMatrix<Scalar>> f;
  f.reserve(static_cast<size_t>(a.num_points()));
  for (Index k = 0; k < a.num_points(); ++k) f.push_back(a.fiber(k) + b.fiber(k));
  return OperatorField<Scalar>(a.space(), std::move(f),
                               detail::merge_mask(a.mask(), b.mask(), "OperatorField+"));
}

template <typename Scalar>
OperatorField<Scalar> operator-(const OperatorField<Scalar>& a, const OperatorField<Scalar>& b) {
  require_same_space(a.space(), b.space(), "OperatorField-");
  if (a.dim() != b.dim()) throw contract_error("OperatorField-: fiber dimension mismatch");
  std::vector<FiberMatrix<Scalar>> f;
  f.reserve(static_cast<size_t>(a.num_points()));
  for (Index k = 0; k < a.num_points(); ++k) f.push_back(a.fiber(k) - b.fiber(k));
  return OperatorField<Scalar>(a.space(), std::move(f),
                               detail::merge_mask(a.mask(), b.mask(), "OperatorField-"));
}

// composition (u v)(t) = u(t) v(t)
template <typename Scalar>
OperatorField<Scalar> operator*(const OperatorField<Scalar>& a, const OperatorField<Scalar>& b) {
  require_same_space(a.space(), b.space(), "OperatorField*");
  if (a.dim() != b.dim()) throw contract_error("OperatorField*: fiber dimension mismatch");
  std::vector<FiberMatrix<Scalar>> f;
  f.reserve(static_cast<size_t>(a.num_points()));
  for (Index k = 0; k < a.num_points(); ++k) f.push_back(a.fiber(k) * b.fiber(k));
  return OperatorField<Scalar>(a.space(), std::move(f),
                               detail::merge_mask(a.mask(), b.mask(), "OperatorField*"));
}

template <typename Scalar>
OperatorField<Scalar> operator*(Scalar c, const OperatorField<Scalar>& a) {
  std::vector<FiberMatrix<Scalar>> f;
  f.reserve(static_cast<size_t>(a.num_points()));
  for (Index k = 0; k < a.num_points(); ++k) f.push_back(c * a.fiber(k));
  return OperatorField<Scalar>(a.space(), std::move(f), a.mask());
}

template <typename Scalar>
OperatorField<Scalar> adjoint(const OperatorField<Scalar>& u) {
  std::vector<FiberMatrix<Scalar>> f;
  f.reserve(static_cast<size_t>(u.num_points()));
  for (Index k = 0; k < u.num_points(); ++k) f.push_back(u.fiber(k).adjoint());
  return OperatorField<Scalar>(u.space(), std::move(f), u.mask());
}

// u applied to a vector field, (u xi)(t) = u(t) xi(t)
template <typename Scalar>
VectorField<Scalar> operator*(const OperatorField<Scalar>& u, const VectorField<Scalar>& xi) {
  require_same_space(u.space(), xi.space(), "OperatorField*VectorField");
  if (u.dim() != xi.dim())
    throw contract_error("OperatorField*VectorField: fiber dimension mismatch");
  detail::require_same_mask(u.mask(), xi.mask(), "OperatorField*VectorField");
  typename VectorField<Scalar>::Components c(xi.dim(), xi.num_points());
  for (Index k = 0; k < xi.num_points(); ++k) c.col(k) = u.fiber(k) * xi.components().col(k);
  return VectorField<Scalar>(u.space(), std::move(c), u.mask());
}

// Positivity of a selfadjoint operator field: every fiber's smallest
// eigenvalue >= -tol. tol < 0 picks 1e-10 relative to the sup fiber norm.
template <typename Scalar>
bool is_positive(const OperatorField<Scalar>& u, RealOf<Scalar> tol = -1) {
  using Real = RealOf<Scalar>;
  if (tol < 0) tol = Real(1e-10) * std::max<Real>(u.sup_frobenius(), Real(1));
  bool positive = true;
  for (Index k = 0; k < u.num_points(); ++k) {
    const auto& a = u.fiber(k);
    if ((a - a.adjoint()).norm() > std::max<Real>(Real(denselin::default_hermitian_tol) * a.norm(), tol))
      throw contract_error("is_positive: fiber at point '" + u.space()->label(k) +
                           "' is not selfadjoint within tolerance");
    const auto eig = denselin::hermitian_eig<Scalar>(a);
    if (eig.values.size() && eig.values[eig.values.size() - 1] < -tol) positive = false;
  }
  return positive;
}

// ---------------------------------------------------------------------------
// Neighbor-consistency diagnostics: the discrete stand-in for continuity.
// Maximum jump across adjacency edges (declared-order chain when no
// adjacency is present).
// ---------------------------------------------------------------------------

template <typename Scalar>
RealOf<Scalar> max_edge_jump(const ScalarField<Scalar>& x) {
  RealOf<Scalar> m = 0;
  for (const auto& [a, b] : x.space()->diagnostic_edges())
    m = std::max<RealOf<Scalar>>(m, Eigen::numext::abs(x(a) - x(b)));
  return m;
}

template <typename Scalar>
RealOf<Scalar> max_edge_jump(const VectorField<Scalar>& xi) {
  RealOf<Scalar> m = 0;
  for (const auto& [a, b] : xi.space()->diagnostic_edges())
    m = std::max<RealOf<Scalar>>(m, (xi.components().col(a) - xi.components().col(b)).norm());
  return m;
}

template <typename Scalar>
RealOf<Scalar> max_edge_jump(const OperatorField<Scalar>& u) {
  RealOf<Scalar> m = 0;
  for (const auto& [a, b] : u.space()->diagnostic_edges())
    m = std::max<RealOf<Scalar>>(m, (u.fiber(a) - u.fiber(b)).norm());
  return m;
}

using ScalarFieldXcd = ScalarField<cd>;
using VectorFieldXcd = VectorField<cd>;
using OperatorFieldXcd = OperatorField<cd>;

}  // namespace opfield

#endif  // OPFIELD_FIELDCORE_HPP

/* SPDX-License-Identifier: Apache-2.0 */
#ifndef OPFIELD_CHECKS_HPP
#define OPFIELD_CHECKS_HPP

//
// The conformance suite: every structural law of the library, run on seeded
// random instances over a given stage (parameter space + fiber dimension).
// Each check reports its worst normalized violation against a pinned
// tolerance; the CLI `verify` command and the acceptance runner are thin
// wrappers around run_verification().
//

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "opfield/kernelop.hpp"
#include "opfield/random.hpp"
#include "opfield/traceclass.hpp"

namespace opfield::checks {

struct CheckResult {
  std::string name;
  std::string law;
  bool pass = false;
  double max_violation = 0;
  double tolerance = 0;
  double runtime_ms = 0;
  std::string error;  // nonempty when the check aborted
};

struct VerifyOptions {
  std::uint64_t seed = 1;
  int trials = 20;
  double tol_reconstruction = 1e-9;  // relative, decompositions and round trips
  double tol_identity = 1e-10;       // relative, algebraic identities
  double tol_inequality = 1e-9;      // absolute after normalization
};

inline bool all_passed(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline double rel(double violation, double scale) {
  return violation / std::max(scale, 1e-300);
}

class Suite {
 public:
  Suite(SpacePtr space, Index dim, const VerifyOptions& opt)
      : space_(std::move(space)), dim_(dim), opt_(opt) {}

  template <typename Body>
  void run(const std::string& name, const std::string& law, double tol, Body&& body) {
    CheckResult r;
    r.name = name;
    r.law = law;
    r.tolerance = tol;
    const auto start = std::chrono::steady_clock::now();
    try {
      Rng rng(opt_.seed ^ fnv1a(name));
      r.max_violation = body(rng);
      r.pass = r.max_violation <= tol;
    } catch (const std::exception& e) {
      r.max_violation = std::numeric_limits<double>::infinity();
      r.pass = false;
      r.error = e.what();
    }
    r.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    results_.push_back(std::move(r));
  }

  std::vector<CheckResult> take() { return std::move(results_); }

  const SpacePtr& space() const { return space_; }
  Index dim() const { return dim_; }
  const VerifyOptions& options() const { return opt_; }

 private:
  SpacePtr space_;
  Index dim_;
  VerifyOptions opt_;
  std::vector<CheckResult> results_;
};

inline double theta_at(const std::vector<ScalarFieldXcd>& theta, Index n, Index k) {
  return n <= static_cast<Index>(theta.size()) ? theta[static_cast<size_t>(n - 1)](k).real() : 0.0;
}

inline FiberVectorXcd power_sum(const std::vector<ScalarFieldXcd>& theta, double p) {
  FiberVectorXcd v = FiberVectorXcd::Zero(theta.front().num_points());
  for (const auto& th : theta)
    for (Index k = 0; k < v.size(); ++k) v[k] += std::pow(th(k).real(), p);
  return v;
}

inline QuadPtr stage_quadrature(Index n) {
  std::vector<std::string> nodes;
  Eigen::VectorXd weights(n);
  for (Index j = 0; j < n; ++j) {
    nodes.push_back("s" + std::to_string(j));
    weights[j] = 2.0 * static_cast<double>(j + 1) / static_cast<double>(n * (n + 1));
  }
  return make_quadrature(std::move(nodes), std::move(weights));
}

inline KernelFieldXcd stage_kernel(const QuadPtr& quad, const SpacePtr& space, Rng& rng) {
  std::vector<FiberMatrixXcd> slices;
  for (Index t = 0; t < space->size(); ++t)
    slices.push_back(random_matrix<cd>(quad->size(), quad->size(), rng));
  return KernelFieldXcd(quad, space, std::move(slices));
}

inline OmegaFamily<cd> stage_omega(const SpacePtr& space, Index d, Index m, Rng& rng) {
  OmegaFamily<cd> fam;
  std::vector<FiberMatrixXcd> cols(static_cast<size_t>(m), FiberMatrixXcd(d, space->size()));
  for (Index k = 0; k < space->size(); ++k) {
    const auto q = random_unitary<cd>(d, rng);
    for (Index n = 0; n < m; ++n) cols[static_cast<size_t>(n)].col(k) = q.col(n);
  }
  for (Index n = 0; n < m; ++n) fam.zeta.emplace_back(space, std::move(cols[static_cast<size_t>(n)]));
  return fam;
}

}  // namespace detail

// The full invariant suite on seeded random instances over the stage.
inline std::vector<CheckResult> run_verification(const SpacePtr& space, Index dim,
                                                 const VerifyOptions& opt) {
  using detail::rel;
  using detail::theta_at;
  detail::Suite suite(space, dim, opt);
  const Index d = dim;
  const Index nt = space->size();
  const int trials = std::max(1, opt.trials);

  // -------------------------------------------------------------- fieldcore
  suite.run("fiber_homomorphism", "pointwise evaluation is multiplicative and involutive",
            opt.tol_identity, [&](Rng& rng) {
              double worst = 0;
              for (int i = 0; i < trials; ++i) {
                auto u = random_operator_field<cd>(space, d, rng);
                auto v = random_operator_field<cd>(space, d, rng);
                auto uv = u * v;
                auto us = adjoint(u);
                for (Index k = 0; k < nt; ++k) {
                  const double scale = u.fiber(k).norm() * v.fiber(k).norm() + 1.0;
                  worst = std::max(worst,
                                   rel((uv.fiber(k) - u.fiber(k) * v.fiber(k)).norm(), scale));
                  worst = std::max(worst, (us.fiber(k) - u.fiber(k).adjoint()).norm());
                }
              }
              return worst;
            });

  suite.run("inner_module_compatibility", "<xi x, eta> = <xi, eta> x", opt.tol_identity,
            [&](Rng& rng) {
              double worst = 0;
              for (int i = 0; i < trials; ++i) {
                auto xi = random_vector_field<cd>(space, d, rng);
                auto eta = random_vector_field<cd>(space, d, rng);
                auto x = random_scalar_field<cd>(space, rng);
                auto lhs = inner_product(module_scale(xi, x), eta);
                auto rhs = inner_product(xi, eta) * x;
                worst = std::max(worst, rel((lhs.values() - rhs.values()).norm(),
                                            rhs.values().norm() + 1.0));
              }
              return worst;
            });

  suite.run("rank_one_theta", "theta_1(xi<.,eta>) = |xi||eta| and theta_n = 0 for n >= 2",
            opt.tol_identity, [&](Rng& rng) {
              double worst = 0;
              for (int i = 0; i < trials; ++i) {
                auto xi = random_vector_field<cd>(space, d, rng);
                auto eta = random_vector_field<cd>(space, d, rng);
                auto theta = singular_value_fields(rank_one(xi, eta), d);
                for (Index k = 0; k < nt; ++k) {
                  const double expect = xi.fiber(k).norm() * eta.fiber(k).norm();
                  worst = std::max(worst, rel(std::abs(theta[0](k).real() - expect), expect + 1.0));
                  for (Index n = 2; n <= d; ++n)
                    worst = std::max(worst, rel(theta_at(theta, n, k), expect + 1.0));
                }
              }
              return worst;
            });

  suite.run("adjoint_module_law", "(u x)^* = u^* x^*", opt.tol_identity, [&](Rng& rng) {
    double worst = 0;
    for (int i = 0; i < trials; ++i) {
      auto u = random_operator_field<cd>(space, d, rng);
      auto x = random_scalar_field<cd>(space, rng);
      auto lhs = adjoint(module_scale(u, x));
      auto rhs = module_scale(adjoint(u), conj(x));
      worst = std::max(worst, rel(op_norm(lhs - rhs), op_norm(rhs) + 1.0));
    }
    return worst;
  });

  // --------------------------------------------------------------- schatten
  suite.run("schatten_reconstruction", "u = sum_n theta_n xi_n<.,eta_n>", opt.tol_reconstruction,
            [&](Rng& rng) {
              double worst = 0;
              for (int i = 0; i < trials; ++i) {
                auto u = random_operator_field<cd>(space, d, rng);
                auto sys = schatten_decompose(u);
                worst = std::max(worst, rel(op_norm(u - reconstruct(sys)), op_norm(u)));
              }
              return worst;
            });

  suite.run("u_orthonormality", "<v_m, v_n> = delta_mn e_n for both singular systems",
            opt.tol_reconstruction, [&](Rng& rng) {
              double worst = 0;
              for (int i = 0; i < trials; ++i) {
                auto u = random_operator_field<cd>(space, d, rng);
                const auto diag = validate_system(schatten_decompose(u));
                worst = std::max({worst, diag.orthonormality, diag.support,
                                  std::max(0.0, diag.descending)});
              }
              return worst;
            });

  suite.run("theta_adjoint_abs", "theta_n(u) = theta_n(u^*) = theta_n(|u|)", opt.tol_identity,
            [&](Rng& rng) {
              double worst = 0;
              for (int i = 0; i < trials; ++i) {
                auto u = random_operator_field<cd>(space, d, rng);
                auto t0 = singular_value_fields(u, d);
                auto t1 = singular_value_fields(adjoint(u), d);
                auto t2 = singular_value_fields(absolute_value(u), d);
                const double scale = op_norm(u);
                for (Index n = 0; n < d; ++n) {
                  worst = std::max(worst, rel((t0[static_cast<size_t>(n)].values() -
                                               t1[static_cast<size_t>(n)].values()).norm(), scale));
                  worst = std::max(worst, rel((t0[static_cast<size_t>(n)].values() -
                                               t2[static_cast<size_t>(n)].values()).norm(), scale));
                }
              }
              return worst;
            });

  suite.run("theta_square", "theta_n(u^*u) = theta_n(u)^2", opt.tol_identity, [&](Rng& rng) {
    double worst = 0;
    for (int i = 0; i < trials; ++i) {
      auto u = random_operator_field<cd>(space, d, rng);
      auto t = singular_value_fields(u, d);
      auto tsq = singular_value_fields(adjoint(u) * u, d);
      const double scale = op_norm(u) * op_norm(u);
      for (Index n = 0; n < d; ++n)
        for (Index k = 0; k < nt; ++k)
          worst = std::max(worst,
                           rel(std::abs(tsq[static_cast<size_t>(n)](k).real() -
                                        std::pow(t[static_cast<size_t>(n)](k).real(), 2)), scale));
    }
    return worst;
  });

  suite.run("weyl_sum",
            "theta_{2n-1}(u+v) <= theta_n(u) + theta_n(v), theta_{2n}(u+v) <= theta_n(u) + theta_{n+1}(v)",
            opt.tol_inequality, [&](Rng& rng) {
              double worst = 0;
              for (int i = 0; i < trials; ++i) {
                auto u = random_operator_field<cd>(space, d, rng);
                auto v = random_operator_field<cd>(space, d, rng);
                auto tu = singular_value_fields(u, d);
                auto tv = singular_value_fields(v, d);
                auto ts = singular_value_fields(u + v, d);
                const double scale = op_norm(u) + op_norm(v);
                for (Index n = 1; 2 * n - 1 <= d; ++n)
                  for (Index k = 0; k < nt; ++k) {
                    worst = std::max(worst, rel(theta_at(ts, 2 * n - 1, k) - theta_at(tu, n, k) -
                                                theta_at(tv, n, k), scale));
                    worst = std::max(worst, rel(theta_at(ts, 2 * n, k) - theta_at(tu, n, k) -
                                                theta_at(tv, n + 1, k), scale));
                  }
              }
              return worst;
            });

  suite.run("weyl_product", "theta_{2n-1}(uv) <= theta_n(u) theta_n(v)", opt.tol_inequality,
            [&](Rng& rng) {
              double worst = 0;
              for (int i = 0; i < trials; ++i) {
                auto u = random_operator_field<cd>(space, d, rng);
                auto v = random_operator_field<cd>(space, d, rng);
                auto tu = singular_value_fields(u, d);
                auto tv = singular_value_fields(v, d);
                auto tp = singular_value_fields(u * v, d);
                const double scale = op_norm(u) * op_norm(v) + 1.0;
                for (Index n = 1; 2 * n - 1 <= d; ++n)
                  for (Index k = 0; k < nt; ++k)
                    worst = std::max(worst, rel(theta_at(tp, 2 * n - 1, k) -
                                                theta_at(tu, n, k) * theta_at(tv, n, k), scale));
              }
              return worst;
            });

  suite.run("theta_sandwich", "theta_n(vuw) <= |v| theta_n(u) |w|", opt.tol_inequality,
            [&](Rng& rng) {
              double worst = 0;
              for (int i = 0; i < trials; ++i) {
                auto u = random_operator_field<cd>(space, d, rng);
                auto v = random_operator_field<cd>(space, d, rng);
                auto w = random_operator_field<cd>(space, d, rng);
                auto tu = singular_value_fields(u, d);
                auto ts = singular_value_fields(v * u * w, d);
                const double nv = op_norm(v), nw = op_norm(w);
                const double scale = nv * op_norm(u) * nw + 1.0;
                for (Index n = 1; n <= d; ++n)
                  for (Index k = 0; k < nt; ++k)
                    worst = std::max(worst,
                                     rel(theta_at(ts, n, k) - nv * theta_at(tu, n, k) * nw, scale));
              }
              return worst;
            });

  suite.run("theta_monotone", "0 <= u <= v implies theta_n(u) <= theta_n(v)", opt.tol_inequality,
            [&](Rng& rng) {
              double worst = 0;
              for (int i = 0; i < trials; ++i) {
                auto u = random_positive_field<cd>(space, d, rng);
                auto v = u + random_positive_field<cd>(space, d, rng);
                auto tu = singular_value_fields(u, d);
                auto tv = singular_value_fields(v, d);
                for (Index n = 1; n <= d; ++n)
                  for (Index k = 0; k < nt; ++k)
                    worst = std::max(worst,
                                     rel(theta_at(tu, n, k) - theta_at(tv, n, k), op_norm(v)));
              }
              return worst;
            });

  suite.run("theta_identification",
            "a sum over a valid u-orthonormal system with descending theta recovers that theta",
            opt.tol_identity, [&](Rng& rng) {
              double worst = 0;
              for (int i = 0; i < std::min(trials, 10); ++i) {
                auto u = random_operator_field<cd>(space, d, rng);
                auto sys = schatten_decompose(u);
                OperatorFieldXcd rebuilt = OperatorFieldXcd::zero(space, d);
                std::vector<ScalarFieldXcd> target;
                for (Index n = 0; n < d; ++n) {
                  FiberVectorXcd tp(nt);
                  for (Index k = 0; k < nt; ++k)
                    tp[k] = std::pow(sys.theta[static_cast<size_t>(n)](k).real(), 1.5);
                  target.emplace_back(space, tp, true);
                  rebuilt = rebuilt + module_scale(rank_one(sys.xi[static_cast<size_t>(n)],
                                                            sys.eta[static_cast<size_t>(n)]),
                                                   target.back());
                }
                auto recovered = singular_value_fields(rebuilt, d);
                const double scale = target[0].sup_norm() + 1.0;
                for (Index n = 0; n < d; ++n)
                  worst = std::max(worst, rel((recovered[static_cast<size_t>(n)].values() -
                                               target[static_cast<size_t>(n)].values()).norm(),
                                              scale));
              }
              return worst;
            });

  suite.run("subsystem_relabeling",
            "a subset of the terms has theta_n(v) = theta_{f(n)}(u) along the increasing bijection",
            opt.tol_identity, [&](Rng& rng) {
              double worst = 0;
              for (int i = 0; i < std::min(trials, 10); ++i) {
                auto u = random_operator_field<cd>(space, d, rng);
                auto sys = schatten_decompose(u);
                std::vector<Index> chosen;
                for (Index n = 1; n < d; n += 2) chosen.push_back(n);
                if (chosen.empty()) chosen.push_back(0);
                OperatorFieldXcd v = OperatorFieldXcd::zero(space, d);
                for (Index n : chosen)
                  v = v + module_scale(rank_one(sys.xi[static_cast<size_t>(n)],
                                                sys.eta[static_cast<size_t>(n)]),
                                       sys.theta[static_cast<size_t>(n)]);
                auto tv = singular_value_fields(v, d);
                const double scale = op_norm(u);
                for (size_t m = 0; m < chosen.size(); ++m)
                  worst = std::max(worst, rel((tv[m].values() -
                                               sys.theta[static_cast<size_t>(chosen[m])].values())
                                                  .norm(), scale));
                for (Index m = static_cast<Index>(chosen.size()); m < d; ++m)
                  worst = std::max(worst, rel(tv[static_cast<size_t>(m)].sup_norm(), scale));
              }
              return worst;
            });

  suite.run("projection_orthogonality", "(xi_m<.,xi_m>)(xi_n<.,xi_n>) = 0 for m != n",
            opt.tol_identity, [&](Rng& rng) {
              double worst = 0;
              for (int i = 0; i < std::min(trials, 10); ++i) {
                auto u = random_positive_field<cd>(space, d, rng);
                auto sys = schatten_decompose_positive(u);
                for (Index m = 0; m < d; ++m)
                  for (Index n = 0; n < d; ++n) {
                    if (m == n) continue;
                    auto prod = rank_one(sys.xi[static_cast<size_t>(m)], sys.xi[static_cast<size_t>(m)]) *
                                rank_one(sys.xi[static_cast<size_t>(n)], sys.xi[static_cast<size_t>(n)]);
                    worst = std::max(worst, static_cast<double>(prod.sup_frobenius()));
                  }
              }
              return worst;
            });

  suite.run("phase_alignment",
            "random per-point phases align to a constant field with unchanged projections",
            opt.tol_identity, [&](Rng& rng) {
              auto path = make_path_space(32, true);
              double worst = 0;
              for (int i = 0; i < std::min(trials, 10); ++i) {
                FiberVectorXcd v = random_matrix<cd>(d, 1, rng);
                v.normalize();
                FiberMatrixXcd comps(d, path->size());
                for (Index k = 0; k < path->size(); ++k)
                  comps.col(k) = std::polar(1.0, 2 * M_PI * rng.uniform()) * v;
                VectorFieldXcd eta(path, comps);
                auto xi = phase_align(eta, Index(0));
                for (Index k = 0; k < path->size(); ++k) {
                  worst = std::max(worst, (xi.fiber(k) - xi.fiber(0)).norm());
                  worst = std::max(worst, (xi.fiber(k) * xi.fiber(k).adjoint() -
                                           eta.fiber(k) * eta.fiber(k).adjoint()).norm());
                }
              }
              return worst;
            });

  suite.run("truncation_bound",
            "theta_n(u - u_k) <= 1/(k n^2) pointwise and ||u - u_k||_p <= (1/k)(sum n^{-2p})^{1/p}",
            opt.tol_inequality, [&](Rng& rng) {
              double worst = 0;
              for (int i = 0; i < std::min(trials, 5); ++i) {
                auto u = random_operator_field<cd>(space, d, rng);
                auto sys = schatten_decompose(u);
                for (Index k : {Index(1), Index(5), Index(10)})
                  for (double p : {1.0, 2.0}) {
                    auto u_k = truncate_tail(u, sys, k, p);
                    auto rt = singular_value_fields(u - u_k, d);
                    for (Index n = 1; n <= d; ++n)
                      for (Index t = 0; t < nt; ++t)
                        worst = std::max(worst, rel(theta_at(rt, n, t) - 1.0 / (double(k) * n * n),
                                                    op_norm(u)));
                    const auto ps = detail::power_sum(rt, p);
                    double norm_p = 0;
                    for (Index t = 0; t < nt; ++t) norm_p = std::max(norm_p, ps[t].real());
                    norm_p = std::pow(norm_p, 1.0 / p);
                    worst = std::max(worst, rel(norm_p - truncation_bound(k, p), 1.0));
                  }
              }
              return worst;
            });

  suite.run("omega_domination", "sum_n |<u zeta_n, zeta'_n>|^p never exceeds sum_n theta_n^p",
            opt.tol_inequality, [&](Rng& rng) {
              double worst = 0;
              for (int i = 0; i < trials; ++i) {
                auto u = random_operator_field<cd>(space, d, rng);
                auto theta = singular_value_fields(u, d);
                const double p = (i % 2 == 0) ? 1.0 : 2.0;
                auto fin = detail::stage_omega(space, d, std::max<Index>(1, d - 1), rng);
                auto fout = detail::stage_omega(space, d, std::max<Index>(1, d - 1), rng);
                auto val = omega_sum(u, fin, fout, p);
                const auto ps = detail::power_sum(theta, p);
                for (Index k = 0; k < nt; ++k)
                  worst = std::max(worst, val(k).real() - ps[k].real());
              }
              return worst;
            });

  suite.run("omega_attainment", "the masked singular-vector families attain sum_n theta_n^p",
            opt.tol_reconstruction, [&](Rng& rng) {
              double worst = 0;
              for (int i = 0; i < std::min(trials, 10); ++i) {
                auto u = random_operator_field<cd>(space, d, rng);
                auto sys = schatten_decompose(u);
                auto theta = singular_value_fields(u, d);
                for (double p : {1.0, 2.0}) {
                  OmegaFamily<cd> fin{sys.eta}, fout{sys.xi};
                  auto val = omega_sum(u, fin, fout, p);
                  const auto ps = detail::power_sum(theta, p);
                  for (Index k = 0; k < nt; ++k)
                    worst = std::max(worst,
                                     rel(std::abs(val(k).real() - ps[k].real()),
                                         std::abs(ps[k].real()) + 1.0));
                }
              }
              return worst;
            });

  // ------------------------------------------------------------- traceclass
  suite.run("lp_triangle", "||u+v||_p <= ||u||_p + ||v||_p", opt.tol_inequality, [&](Rng& rng) {
    double worst = 0;
    const double inf = std::numeric_limits<double>::infinity();
    for (int i = 0; i < trials; ++i) {
      auto u = random_operator_field<cd>(space, d, rng);
      auto v = random_operator_field<cd>(space, d, rng);
      for (double p : {1.0, 1.5, 2.0, 3.0, inf}) {
        const double bound = lp_norm(u, p).norm + lp_norm(v, p).norm;
        worst = std::max(worst, rel(lp_norm(u + v, p).norm - bound, bound + 1.0));
      }
    }
    return worst;
  });

  suite.run("hoelder", "||uv||_1 <= ||u||_p ||v||_q and ||tr(uv)|| <= ||u||_p ||v||_q",
            opt.tol_inequality, [&](Rng& rng) {
              double worst = 0;
              const double inf = std::numeric_limits<double>::infinity();
              const std::vector<std::pair<double, double>> pairs = {
                  {1.0, inf}, {2.0, 2.0}, {3.0, 1.5}, {0.0, 1.0}};
              for (int i = 0; i < trials; ++i) {
                auto u = random_operator_field<cd>(space, d, rng);
                auto v = random_operator_field<cd>(space, d, rng);
                for (auto [p, q] : pairs) {
                  const double bound = lp_norm(u, p).norm * lp_norm(v, q).norm;
                  worst = std::max(worst, rel(lp_norm(u * v, 1.0).norm - bound, bound + 1.0));
                  worst = std::max(worst, rel(lp_norm(v * u, 1.0).norm - bound, bound + 1.0));
                  worst = std::max(worst, rel(dual_pair(v, u).sup_norm() - bound, bound + 1.0));
                }
              }
              return worst;
            });

  suite.run("norm_sandwich", "||vuw||_p <= ||v|| ||u||_p ||w||", opt.tol_inequality,
            [&](Rng& rng) {
              double worst = 0;
              for (int i = 0; i < trials; ++i) {
                auto u = random_operator_field<cd>(space, d, rng);
                auto v = random_operator_field<cd>(space, d, rng);
                auto w = random_operator_field<cd>(space, d, rng);
                for (double p : {1.0, 2.0, 3.0}) {
                  const double bound = lp_norm(v, 0.0).norm * lp_norm(u, p).norm * lp_norm(w, 0.0).norm;
                  worst = std::max(worst, rel(lp_norm(v * u * w, p).norm - bound, bound + 1.0));
                }
              }
              return worst;
            });

  suite.run("norming_attainment", "||uv||_1 = ||vu||_1 = ||u||_p ||v||_q at the norming element",
            1e-8, [&](Rng& rng) {
              double worst = 0;
              for (int i = 0; i < trials; ++i) {
                auto u = random_operator_field<cd>(space, d, rng);
                auto sys = schatten_decompose(u);
                for (double p : {0.0, 1.0, 2.0, 3.0}) {
                  auto v = norming_element(u, sys, p);
                  const double q = conjugate_exponent(p);
                  const double target = lp_norm(u, p).norm * lp_norm(v, q).norm;
                  worst = std::max(worst, rel(std::abs(lp_norm(u * v, 1.0).norm - target), target));
                  worst = std::max(worst, rel(std::abs(lp_norm(v * u, 1.0).norm - target), target));
                }
              }
              return worst;
            });

  suite.run("positive_power_norm", "||u||_p^p = ||u^p||_1 and ||u||_p = ||tr(u^p)||^{1/p}",
            opt.tol_reconstruction, [&](Rng& rng) {
              double worst = 0;
              for (int i = 0; i < std::min(trials, 10); ++i) {
                auto u = random_positive_field<cd>(space, d, rng);
                for (double p : {1.0, 2.0, 3.0}) {
                  auto up = positive_power(u, p);
                  const double lhs = std::pow(lp_norm(u, p).norm, p);
                  const double rhs = lp_norm(up, 1.0).norm;
                  worst = std::max(worst, rel(std::abs(lhs - rhs), rhs + 1.0));
                  const double trn = pointwise_fiber_trace(up).sup_norm();
                  worst = std::max(worst,
                                   rel(std::abs(lp_norm(u, p).norm - std::pow(trn, 1.0 / p)),
                                       lp_norm(u, p).norm + 1.0));
                }
              }
              return worst;
            });

  suite.run("p_monotone", "theta_n(u)^q <= ||u||^{q-p} theta_n(u)^p pointwise for q >= p",
            opt.tol_inequality, [&](Rng& rng) {
              double worst = 0;
              for (int i = 0; i < std::min(trials, 10); ++i) {
                auto u = random_positive_field<cd>(space, d, rng);
                auto theta = singular_value_fields(u, d);
                const double norm_u = op_norm(u);
                const double p = 1.0, q = 2.5;
                for (Index n = 1; n <= d; ++n)
                  for (Index k = 0; k < nt; ++k) {
                    const double th = theta_at(theta, n, k);
                    worst = std::max(worst, rel(std::pow(th, q) -
                                                std::pow(norm_u, q - p) * std::pow(th, p),
                                                std::pow(norm_u, q) + 1.0));
                  }
              }
              return worst;
            });

  suite.run("trace_cyclic", "tr(uv) = tr(vu)", opt.tol_identity, [&](Rng& rng) {
    double worst = 0;
    for (int i = 0; i < trials; ++i) {
      auto u = random_operator_field<cd>(space, d, rng);
      auto v = random_operator_field<cd>(space, d, rng);
      auto ab = dual_pair(v, u);
      auto ba = dual_pair(u, v);
      worst = std::max(worst, rel((ab.values() - ba.values()).norm(), ab.sup_norm() + 1.0));
    }
    return worst;
  });

  suite.run("trace_module_law", "tr(ux) = (tr u) x", opt.tol_identity, [&](Rng& rng) {
    double worst = 0;
    for (int i = 0; i < trials; ++i) {
      auto u = random_operator_field<cd>(space, d, rng);
      auto x = random_scalar_field<cd>(space, rng);
      auto lhs = pointwise_fiber_trace(module_scale(u, x));
      auto rhs = pointwise_fiber_trace(u) * x;
      worst = std::max(worst, rel((lhs.values() - rhs.values()).norm(), rhs.sup_norm() + 1.0));
    }
    return worst;
  });

  suite.run("trace_rank_one", "tr(xi<.,eta>) = <xi,eta> and tr(v (xi<.,eta>)) = <v xi, eta>",
            opt.tol_identity, [&](Rng& rng) {
              double worst = 0;
              for (int i = 0; i < trials; ++i) {
                auto xi = random_vector_field<cd>(space, d, rng);
                auto eta = random_vector_field<cd>(space, d, rng);
                auto v = random_operator_field<cd>(space, d, rng);
                auto lhs = pointwise_fiber_trace(rank_one(xi, eta));
                auto rhs = inner_product(xi, eta);
                worst = std::max(worst, rel((lhs.values() - rhs.values()).norm(), rhs.sup_norm() + 1.0));
                auto l2 = dual_pair(v, rank_one(xi, eta));
                auto r2 = inner_product(v * xi, eta);
                worst = std::max(worst, rel((l2.values() - r2.values()).norm(), r2.sup_norm() + 1.0));
              }
              return worst;
            });

  suite.run("trace_positive", "tr u >= 0 and ||tr u|| = ||u||_1 for positive u", opt.tol_identity,
            [&](Rng& rng) {
              double worst = 0;
              for (int i = 0; i < std::min(trials, 10); ++i) {
                auto u = random_positive_field<cd>(space, d, rng);
                auto tr = trace(u, schatten_decompose_positive(u));
                for (Index k = 0; k < nt; ++k) {
                  worst = std::max(worst, rel(std::abs(tr(k).imag()), tr.sup_norm() + 1.0));
                  worst = std::max(worst, rel(-tr(k).real(), tr.sup_norm() + 1.0));
                }
                worst = std::max(worst, rel(std::abs(tr.sup_norm() - lp_norm(u, 1.0).norm),
                                            tr.sup_norm() + 1.0));
              }
              return worst;
            });

  suite.run("trace_decomposition_free", "the trace agrees across Schatten decompositions",
            opt.tol_identity, [&](Rng& rng) {
              double worst = 0;
              for (int i = 0; i < std::min(trials, 10); ++i) {
                auto u = random_operator_field<cd>(space, d, rng);
                auto sys = schatten_decompose(u);
                auto tr1 = trace(u, sys);
                // a second valid decomposition: fiberwise SVD pairing
                SingularSystem<cd> other;
                std::vector<denselin::SvdSystem<cd>> svds(static_cast<size_t>(nt));
                for (Index k = 0; k < nt; ++k) svds[static_cast<size_t>(k)] = denselin::svd<cd>(u.fiber(k));
                double sup = 0;
                for (Index k = 0; k < nt; ++k) sup = std::max(sup, svds[static_cast<size_t>(k)].sigma[0]);
                const double zero_tol = 1e-12 * sup;
                for (Index n = 0; n < d; ++n) {
                  FiberVectorXcd tv(nt);
                  FiberMatrixXcd cx(d, nt), ce(d, nt);
                  for (Index k = 0; k < nt; ++k) {
                    const double s = svds[static_cast<size_t>(k)].sigma[n];
                    tv[k] = s;
                    if (s > zero_tol) {
                      cx.col(k) = svds[static_cast<size_t>(k)].left.col(n);
                      ce.col(k) = svds[static_cast<size_t>(k)].right.col(n);
                    } else {
                      cx.col(k).setZero();
                      ce.col(k).setZero();
                    }
                  }
                  other.theta.emplace_back(space, tv, true);
                  other.e.push_back(support_indicator(other.theta.back(), zero_tol));
                  other.xi.emplace_back(space, cx);
                  other.eta.emplace_back(space, ce);
                }
                auto tr2 = trace(u, other);
                worst = std::max(worst, rel((tr1.values() - tr2.values()).norm(), tr1.sup_norm() + 1.0));
                auto oracle = pointwise_fiber_trace(u);
                worst = std::max(worst, rel((tr1.values() - oracle.values()).norm(),
                                            oracle.sup_norm() + 1.0));
              }
              return worst;
            });

  suite.run("trace_involution", "tr(u^*) = (tr u)^*", opt.tol_identity, [&](Rng& rng) {
    double worst = 0;
    for (int i = 0; i < trials; ++i) {
      auto u = random_operator_field<cd>(space, d, rng);
      auto lhs = pointwise_fiber_trace(adjoint(u));
      auto rhs = conj(pointwise_fiber_trace(u));
      worst = std::max(worst, rel((lhs.values() - rhs.values()).norm(), rhs.sup_norm() + 1.0));
    }
    return worst;
  });

  suite.run("hs_module_axioms",
            "<u,v>^* = <v,u>; <wu,v> = <u,w^*v>; <ux,v> = <u,v>x; ||<u,u>|| = ||u||_2^2; <u,v> = <v^*,u^*>",
            opt.tol_identity, [&](Rng& rng) {
              double worst = 0;
              for (int i = 0; i < trials; ++i) {
                auto u = random_operator_field<cd>(space, d, rng);
                auto v = random_operator_field<cd>(space, d, rng);
                auto w = random_operator_field<cd>(space, d, rng);
                auto x = random_scalar_field<cd>(space, rng);
                const double scale = hs_inner(u, u).sup_norm() + hs_inner(v, v).sup_norm() + 1.0;
                worst = std::max(worst, rel((conj(hs_inner(u, v)).values() -
                                             hs_inner(v, u).values()).norm(), scale));
                worst = std::max(worst, rel((hs_inner(w * u, v).values() -
                                             hs_inner(u, adjoint(w) * v).values()).norm(),
                                            scale * op_norm(w) + 1.0));
                worst = std::max(worst, rel((hs_inner(module_scale(u, x), v).values() -
                                             (hs_inner(u, v) * x).values()).norm(),
                                            scale * x.sup_norm() + 1.0));
                worst = std::max(worst, rel((hs_inner(u, v).values() -
                                             hs_inner(adjoint(v), adjoint(u)).values()).norm(), scale));
                worst = std::max(worst, rel(std::abs(hs_inner(u, u).sup_norm() -
                                                     std::pow(lp_norm(u, 2.0).norm, 2)), scale));
              }
              return worst;
            });

  suite.run("dual_round_trip", "functional reconstruction recovers the generating operator",
            opt.tol_reconstruction, [&](Rng& rng) {
              double worst = 0;
              for (int i = 0; i < std::min(trials, 10); ++i) {
                auto v0 = random_operator_field<cd>(space, d, rng);
                auto recovered = functional_to_operator(make_functional(v0));
                worst = std::max(worst, rel(op_norm(recovered - v0), op_norm(v0)));
              }
              return worst;
            });

  suite.run("dual_involution", "Psi(v^*) = Psi(v)^*", opt.tol_identity, [&](Rng& rng) {
    double worst = 0;
    for (int i = 0; i < std::min(trials, 10); ++i) {
      auto v = random_operator_field<cd>(space, d, rng);
      auto u = random_operator_field<cd>(space, d, rng);
      auto lhs = dual_pair(adjoint(v), u);                  // Psi(v^*)(u)
      auto rhs = conj(dual_pair(v, adjoint(u)));            // Psi(v)^*(u)
      worst = std::max(worst, rel((lhs.values() - rhs.values()).norm(), lhs.sup_norm() + 1.0));
      // and the reconstruction from the adjoint functional is the adjoint
      auto rec = functional_to_operator(adjoint_functional(make_functional(v)));
      worst = std::max(worst, rel(op_norm(rec - adjoint(v)), op_norm(v)));
    }
    return worst;
  });

  // ---------------------------------------------------------------- kernelop
  suite.run("kernel_adjoint", "the adjoint kernel yields the adjoint operator", opt.tol_identity,
            [&](Rng& rng) {
              auto quad = detail::stage_quadrature(d);
              auto basis = L2Basis<cd>::standard(quad);
              double worst = 0;
              for (int i = 0; i < std::min(trials, 10); ++i) {
                auto w = detail::stage_kernel(quad, space, rng);
                auto u = kernel_to_operator(w, basis);
                auto up = kernel_to_operator(adjoint_kernel(w), basis);
                worst = std::max(worst, rel(op_norm(up - adjoint(u)), op_norm(u) + 1.0));
              }
              return worst;
            });

  suite.run("kernel_hs_identity",
            "sum_n theta_n^2 equals the weighted square sum of the kernel, per point",
            opt.tol_reconstruction, [&](Rng& rng) {
              auto quad = detail::stage_quadrature(d);
              auto basis = L2Basis<cd>::standard(quad);
              double worst = 0;
              for (int i = 0; i < std::min(trials, 10); ++i) {
                auto w = detail::stage_kernel(quad, space, rng);
                auto theta = singular_value_fields(kernel_to_operator(w, basis), d);
                for (Index t = 0; t < nt; ++t) {
                  double lhs = 0;
                  for (const auto& th : theta) lhs += std::pow(th(t).real(), 2);
                  double rhs = 0;
                  for (Index r = 0; r < d; ++r)
                    for (Index s = 0; s < d; ++s)
                      rhs += std::norm(w.value(r, s, t)) * quad->weight(r) * quad->weight(s);
                  worst = std::max(worst, rel(std::abs(lhs - rhs), rhs + 1.0));
                }
              }
              return worst;
            });

  suite.run("kernel_separable_rank", "separable kernels produce rank-one fibers", opt.tol_identity,
            [&](Rng& rng) {
              auto quad = detail::stage_quadrature(d);
              auto basis = L2Basis<cd>::standard(quad);
              double worst = 0;
              for (int i = 0; i < std::min(trials, 10); ++i) {
                SampledField<cd> a;
                for (Index j = 0; j < d; ++j) a.push_back(random_scalar_field<cd>(space, rng));
                FiberVectorXcd b = random_matrix<cd>(d, 1, rng);
                auto u = kernel_to_operator(separable_kernel(quad, space, a, b), basis);
                auto theta = singular_value_fields(u, d);
                for (Index k = 0; k < nt; ++k)
                  for (Index n = 2; n <= d; ++n)
                    worst = std::max(worst, rel(theta_at(theta, n, k), theta_at(theta, 1, k) + 1.0));
              }
              return worst;
            });

  suite.run("kernel_basis_independence", "theta fields do not depend on the orthonormal basis",
            opt.tol_reconstruction, [&](Rng& rng) {
              auto quad = detail::stage_quadrature(d);
              auto basis = L2Basis<cd>::standard(quad);
              double worst = 0;
              for (int i = 0; i < std::min(trials, 5); ++i) {
                auto w = detail::stage_kernel(quad, space, rng);
                L2Basis<cd> rotated(quad, (basis.samples() * random_unitary<cd>(d, rng)).eval());
                auto t1 = singular_value_fields(kernel_to_operator(w, basis), d);
                auto t2 = singular_value_fields(kernel_to_operator(w, rotated), d);
                for (Index n = 0; n < d; ++n)
                  worst = std::max(worst, rel((t1[static_cast<size_t>(n)].values() -
                                               t2[static_cast<size_t>(n)].values()).norm(),
                                              t1[0].sup_norm() + 1.0));
              }
              return worst;
            });

  suite.run("kernel_tensor_isometry", "<Phi(f (x) x), Phi(g (x) y)> = y^* <f,g> x",
            opt.tol_identity, [&](Rng& rng) {
              auto quad = detail::stage_quadrature(d);
              auto basis = L2Basis<cd>::standard(quad);
              double worst = 0;
              for (int i = 0; i < trials; ++i) {
                FiberVectorXcd f = random_matrix<cd>(d, 1, rng);
                FiberVectorXcd g = random_matrix<cd>(d, 1, rng);
                auto x = random_scalar_field<cd>(space, rng);
                auto y = random_scalar_field<cd>(space, rng);
                auto lhs = inner_product(tensor_to_module(f, x, basis), tensor_to_module(g, y, basis));
                const cd fg = l2_inner<cd>(*quad, f, g);
                for (Index k = 0; k < nt; ++k)
                  worst = std::max(worst, rel(std::abs(lhs(k) - std::conj(y(k)) * fg * x(k)),
                                              std::abs(fg) + 1.0));
              }
              return worst;
            });

  suite.run("kernel_separable_approx", "the sampled separable approximation meets its sup bound",
            opt.tol_inequality, [&](Rng& rng) {
              auto quad = detail::stage_quadrature(d);
              double worst = 0;
              for (int i = 0; i < std::min(trials, 5); ++i) {
                auto w = detail::stage_kernel(quad, space, rng);
                std::vector<std::vector<Index>> cells(static_cast<size_t>(std::min<Index>(2, d)));
                for (Index j = 0; j < d; ++j)
                  cells[static_cast<size_t>(j % cells.size())].push_back(j);
                auto approx = separable_approx(w, cells);
                auto rebuilt = reconstruct_separable(quad, space, approx);
                double dev = 0;
                for (Index t = 0; t < nt; ++t)
                  dev = std::max(dev, (rebuilt.slice(t) - w.slice(t)).cwiseAbs().maxCoeff());
                worst = std::max(worst, dev - approx.error_bound);
              }
              return worst;
            });

  return suite.take();
}

}  // namespace opfield::checks

#endif  // OPFIELD_CHECKS_HPP

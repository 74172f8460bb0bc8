/* SPDX-License-Identifier: Apache-2.0 */

//
// opfield: computes Schatten decompositions, L^p norms, traces,
// Hilbert-Schmidt pairings, norming elements and kernel operators for
// operator fields described by a scenario file, and runs the conformance
// suite on seeded random instances.
//
// Exit codes: 0 all checks pass, 1 input error, 2 a check failed.
//

#include <cmath>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "opfield/checks.hpp"
#include "opfield/io.hpp"
#include "opfield/kernelop.hpp"
#include "opfield/traceclass.hpp"

namespace {

using namespace opfield;
using opfield::io::json;

constexpr int exit_ok = 0;
constexpr int exit_input_error = 1;
constexpr int exit_check_failed = 2;

struct CommonFlags {
  std::string scenario_path;
  std::string out;  // empty: stdout
  std::string format = "json";
  double tol = -1;  // <0: per-command default
  std::uint64_t seed = 1;
  int trials = 20;
  bool timing = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("scenario", flags.scenario_path, "scenario file (JSON)")->required();
  cmd->add_option("--out", flags.out, "report path (default: stdout)");
  cmd->add_option("--format", flags.format, "report format: json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--tol", flags.tol, "tolerance override for this command's checks");
  cmd->add_option("--seed", flags.seed, "seed for randomized checks");
  cmd->add_option("--trials", flags.trials, "trial count for randomized checks")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--timing", flags.timing, "include runtimes in the report (non-deterministic)");
}

json check_to_json(const checks::CheckResult& r, bool timing) {
  json j;
  j["name"] = r.name;
  j["law"] = r.law;
  j["status"] = r.pass ? "pass" : "fail";
  j["max_violation"] = r.max_violation;
  j["tolerance"] = r.tolerance;
  if (timing) j["runtime_ms"] = r.runtime_ms;
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

json report_header(const char* command, const CommonFlags& flags, const io::Scenario& sc) {
  json report;
  report["command"] = command;
  report["scenario"] = flags.scenario_path;
  report["fiber_dim"] = sc.fiber_dim;
  report["points"] = sc.space->labels();
  return report;
}

// appends the check list and overall status, emits, and picks the exit code
int finish(json& report, std::vector<checks::CheckResult> results, const CommonFlags& flags) {
  json list = json::array();
  for (const auto& r : results) list.push_back(check_to_json(r, flags.timing));
  report["checks"] = std::move(list);
  const bool ok = checks::all_passed(results);
  report["status"] = ok ? "pass" : "fail";
  io::emit_report(report, flags.out, flags.format, std::cout);
  for (const auto& r : results)
    if (!r.pass)
      std::cerr << "check failed: " << r.name << " (max_violation=" << r.max_violation
                << ", tolerance=" << r.tolerance << ")\n";
  return ok ? exit_ok : exit_check_failed;
}

checks::CheckResult make_check(const std::string& name, const std::string& law, double violation,
                               double tol) {
  checks::CheckResult r;
  r.name = name;
  r.law = law;
  r.max_violation = violation;
  r.tolerance = tol;
  r.pass = violation <= tol;
  return r;
}

const OperatorFieldXcd& find_operator(const io::Scenario& sc, const std::string& name) {
  auto it = sc.operators.find(name);
  if (it == sc.operators.end())
    throw io::io_error("scenario has no operator named '" + name + "'");
  return it->second;
}

json system_to_json(const SingularSystem<cd>& sys) {
  json theta = json::object(), e = json::object(), xi = json::object(), eta = json::object();
  for (Index n = 0; n < sys.levels(); ++n) {
    const std::string suffix = std::to_string(n + 1);
    theta["theta_" + suffix] = io::to_json(sys.theta[static_cast<size_t>(n)]);
    e["e_" + suffix] = io::to_json(sys.e[static_cast<size_t>(n)]);
    xi["xi_" + suffix] = io::to_json(sys.xi[static_cast<size_t>(n)]);
    eta["eta_" + suffix] = io::to_json(sys.eta[static_cast<size_t>(n)]);
  }
  json events = json::array();
  for (const auto& ev : sys.realignments) {
    json e1;
    e1["point"] = ev.point;
    e1["level"] = ev.level + 1;
    e1["overlap"] = ev.overlap;
    events.push_back(std::move(e1));
  }
  json j;
  j["theta"] = std::move(theta);
  j["e"] = std::move(e);
  j["xi"] = std::move(xi);
  j["eta"] = std::move(eta);
  j["realignments"] = std::move(events);
  return j;
}

int cmd_decompose(const CommonFlags& flags, const std::string& op_name) {
  auto sc = io::load_scenario(flags.scenario_path);
  const auto& u = find_operator(sc, op_name);
  const double tol = flags.tol > 0 ? flags.tol : 1e-9;

  auto sys = schatten_decompose(u);
  const double norm_u = op_norm(u);
  const double residual = norm_u > 0 ? op_norm(u - reconstruct(sys)) / norm_u : 0.0;
  const auto diag = validate_system(sys);

  json report = report_header("decompose", flags, sc);
  report["operator"] = op_name;
  report.update(system_to_json(sys));
  json res;
  res["reconstruction_rel"] = residual;
  res["orthonormality"] = diag.orthonormality;
  res["projection_edge_jumps"] = projection_edge_jumps(sys);
  report["residual"] = std::move(res);

  std::vector<checks::CheckResult> results;
  results.push_back(make_check("reconstruction", "u = sum_n theta_n xi_n<.,eta_n>", residual, tol));
  results.push_back(make_check("u_orthonormality", "<v_m,v_n> = delta_mn e_n",
                               diag.orthonormality, tol));
  return finish(report, std::move(results), flags);
}

int cmd_norm(const CommonFlags& flags, const std::string& op_name, double p) {
  auto sc = io::load_scenario(flags.scenario_path);
  const auto& u = find_operator(sc, op_name);
  const double tol = flags.tol > 0 ? flags.tol : 1e-9;

  const auto lp = lp_norm(u, p);
  json report = report_header("norm", flags, sc);
  report["operator"] = op_name;
  report["p"] = std::isinf(p) ? json("inf") : json(p);
  report["norm"] = lp.norm;
  if (lp.power_sum_field) report["power_sum_field"] = io::to_json(*lp.power_sum_field);
  report["max_tail_term"] = lp.max_tail_term;

  // Hoelder spot check against seeded random partners at the conjugate q
  std::vector<checks::CheckResult> results;
  const double q = conjugate_exponent(p);
  Rng rng(flags.seed);
  double worst = 0;
  for (int i = 0; i < flags.trials; ++i) {
    auto v = random_operator_field<cd>(sc.space, sc.fiber_dim, rng);
    const double bound = lp.norm * lp_norm(v, q).norm;
    worst = std::max(worst, (lp_norm(u * v, 1.0).norm - bound) / (bound + 1.0));
  }
  json hc;
  hc["q"] = std::isinf(q) ? json("inf") : json(q);
  hc["trials"] = flags.trials;
  hc["max_violation"] = worst;
  report["holder_checks"] = json::array({hc});
  results.push_back(make_check("hoelder", "||uv||_1 <= ||u||_p ||v||_q", worst, tol));
  return finish(report, std::move(results), flags);
}

int cmd_trace(const CommonFlags& flags, const std::string& op_name) {
  auto sc = io::load_scenario(flags.scenario_path);
  const auto& u = find_operator(sc, op_name);
  const double tol = flags.tol > 0 ? flags.tol : 1e-10;

  const auto tr = trace(u, schatten_decompose(u));
  json report = report_header("trace", flags, sc);
  report["operator"] = op_name;
  report["trace_field"] = io::to_json(tr);
  report["norm"] = tr.sup_norm();

  std::vector<checks::CheckResult> results;
  const auto oracle = pointwise_fiber_trace(u);
  const double against_oracle =
      (tr.values() - oracle.values()).norm() / (oracle.sup_norm() + 1.0);
  results.push_back(
      make_check("matrix_trace", "the Schatten trace equals the fiberwise matrix trace",
                 against_oracle, tol));

  Rng rng(flags.seed);
  double cyclic = 0, module_law = 0;
  for (int i = 0; i < flags.trials; ++i) {
    auto v = random_operator_field<cd>(sc.space, sc.fiber_dim, rng);
    auto x = random_scalar_field<cd>(sc.space, rng);
    auto ab = dual_pair(v, u);
    auto ba = dual_pair(u, v);
    cyclic = std::max(cyclic, (ab.values() - ba.values()).norm() / (ab.sup_norm() + 1.0));
    auto lhs = pointwise_fiber_trace(module_scale(u, x));
    auto rhs = tr * x;
    module_law =
        std::max(module_law, (lhs.values() - rhs.values()).norm() / (rhs.sup_norm() + 1.0));
  }
  results.push_back(make_check("trace_cyclic", "tr(uv) = tr(vu)", cyclic, tol));
  results.push_back(make_check("trace_module_law", "tr(ux) = (tr u)x", module_law, tol));
  return finish(report, std::move(results), flags);
}

int cmd_hs(const CommonFlags& flags, const std::string& name1, const std::string& name2) {
  auto sc = io::load_scenario(flags.scenario_path);
  const auto& u = find_operator(sc, name1);
  const auto& v = find_operator(sc, name2);
  const double tol = flags.tol > 0 ? flags.tol : 1e-10;

  const auto pairing = hs_inner(u, v);
  json report = report_header("hs", flags, sc);
  report["operators"] = json::array({name1, name2});
  report["hs_field"] = io::to_json(pairing);

  std::vector<checks::CheckResult> results;
  const auto self = hs_inner(u, u);
  double positivity = 0;
  for (Index k = 0; k < self.num_points(); ++k) {
    positivity = std::max(positivity, std::abs(self(k).imag()) / (self.sup_norm() + 1.0));
    positivity = std::max(positivity, -self(k).real() / (self.sup_norm() + 1.0));
  }
  results.push_back(make_check("self_positivity", "<u,u> is a positive scalar field",
                               positivity, tol));
  const double norm_sq = std::abs(self.sup_norm() - std::pow(lp_norm(u, 2.0).norm, 2)) /
                         (self.sup_norm() + 1.0);
  results.push_back(make_check("hs_norm", "||<u,u>|| = ||u||_2^2", norm_sq, tol));
  const double symmetry = (pairing.values() - hs_inner(adjoint(v), adjoint(u)).values()).norm() /
                          (pairing.sup_norm() + 1.0);
  results.push_back(make_check("hs_symmetry", "<u,v> = <v^*,u^*>", symmetry, tol));
  return finish(report, std::move(results), flags);
}

int cmd_dual(const CommonFlags& flags, const std::string& op_name, double p) {
  auto sc = io::load_scenario(flags.scenario_path);
  const auto& u = find_operator(sc, op_name);
  const double tol = flags.tol > 0 ? flags.tol : 1e-8;
  if (std::isinf(p)) throw io::io_error("dual: p must be finite or 0");

  auto sys = schatten_decompose(u);
  auto v = norming_element(u, sys, p);
  const double q = conjugate_exponent(p);
  const double norm_u = lp_norm(u, p).norm;
  const double norm_v = lp_norm(v, q).norm;
  const double uv1 = lp_norm(u * v, 1.0).norm;
  const double vu1 = lp_norm(v * u, 1.0).norm;
  const double target = norm_u * norm_v;
  const double attain = std::max(std::abs(uv1 - target), std::abs(vu1 - target)) /
                        std::max(target, 1e-300);

  json report = report_header("dual", flags, sc);
  report["operator"] = op_name;
  report["p"] = p;
  report["q"] = std::isinf(q) ? json("inf") : json(q);
  report["norm_u_p"] = norm_u;
  report["norm_v_q"] = norm_v;
  report["norm_uv_1"] = uv1;
  report["norm_vu_1"] = vu1;
  report["attainment_rel_error"] = target > 0 ? attain : 0.0;
  report["norming_element"] = io::to_json(v);

  std::vector<checks::CheckResult> results;
  results.push_back(make_check("norming_attainment", "||uv||_1 = ||vu||_1 = ||u||_p ||v||_q",
                               target > 0 ? attain : 0.0, tol));
  const auto recovered = functional_to_operator(make_functional(u));
  results.push_back(make_check("dual_round_trip",
                               "the functional tr(. u) reconstructs to u",
                               op_norm(recovered - u) / std::max(op_norm(u), 1e-300),
                               flags.tol > 0 ? flags.tol : 1e-9));
  return finish(report, std::move(results), flags);
}

int cmd_kernel(const CommonFlags& flags, const std::string& kernel_name, bool with_adjoint,
               Index approx_cells) {
  auto sc = io::load_scenario(flags.scenario_path);
  auto it = sc.kernels.find(kernel_name);
  io::KernelBundle bundle = it != sc.kernels.end()
                                ? it->second
                                : io::load_kernel(kernel_name, sc.space);  // name may be a path
  const auto& w = bundle.kernel;
  const auto basis = L2Basis<cd>::standard(bundle.quadrature);
  const double tol = flags.tol > 0 ? flags.tol : 1e-9;

  auto u = kernel_to_operator(w, basis);
  auto theta = singular_value_fields(u, u.dim());

  json report = report_header("kernel", flags, sc);
  report["kernel"] = kernel_name;
  report["nodes"] = bundle.quadrature->nodes();
  report["weights"] = std::vector<double>(bundle.quadrature->weights().begin(),
                                          bundle.quadrature->weights().end());
  json jt = json::object();
  for (Index n = 0; n < static_cast<Index>(theta.size()); ++n)
    jt["theta_" + std::to_string(n + 1)] = io::to_json(theta[static_cast<size_t>(n)]);
  report["theta"] = std::move(jt);

  std::vector<checks::CheckResult> results;
  double hs_violation = 0;
  for (Index t = 0; t < sc.space->size(); ++t) {
    double lhs = 0;
    for (const auto& th : theta) lhs += std::pow(th(t).real(), 2);
    double rhs = 0;
    for (Index r = 0; r < w.num_nodes(); ++r)
      for (Index s = 0; s < w.num_nodes(); ++s)
        rhs += std::norm(w.value(r, s, t)) * bundle.quadrature->weight(r) *
               bundle.quadrature->weight(s);
    hs_violation = std::max(hs_violation, std::abs(lhs - rhs) / (rhs + 1.0));
  }
  results.push_back(make_check("hs_identity",
                               "sum_n theta_n^2 = weighted square sum of the kernel, per point",
                               hs_violation, tol));

  if (with_adjoint) {
    auto up = kernel_to_operator(adjoint_kernel(w), basis);
    const double adj = op_norm(up - adjoint(u)) / (op_norm(u) + 1.0);
    report["adjoint_defect"] = adj;
    results.push_back(make_check("kernel_adjoint", "the adjoint kernel gives the adjoint operator",
                                 adj, flags.tol > 0 ? flags.tol : 1e-10));
  }

  if (approx_cells > 0) {
    if (approx_cells > w.num_nodes())
      throw io::io_error("kernel: --approx cell count exceeds the node count");
    std::vector<std::vector<Index>> cells(static_cast<size_t>(approx_cells));
    for (Index j = 0; j < w.num_nodes(); ++j)
      cells[static_cast<size_t>(j * approx_cells / w.num_nodes())].push_back(j);
    auto approx = separable_approx(w, cells);
    auto rebuilt = reconstruct_separable(bundle.quadrature, sc.space, approx);
    double actual = 0;
    for (Index t = 0; t < sc.space->size(); ++t)
      actual = std::max(actual, (rebuilt.slice(t) - w.slice(t)).cwiseAbs().maxCoeff());
    json ja;
    ja["cells"] = approx_cells;
    ja["rank"] = approx.terms.size();
    ja["error_bound"] = approx.error_bound;
    ja["actual_sup_error"] = actual;
    report["approx"] = std::move(ja);
    results.push_back(make_check("approx_bound",
                                 "the separable approximation stays within its oscillation bound",
                                 actual - approx.error_bound, tol));
  }
  return finish(report, std::move(results), flags);
}

int cmd_verify(const CommonFlags& flags) {
  auto sc = io::load_scenario(flags.scenario_path);
  checks::VerifyOptions opt;
  opt.seed = flags.seed;
  opt.trials = flags.trials;
  if (flags.tol > 0) {
    opt.tol_reconstruction = flags.tol;
    opt.tol_identity = flags.tol;
    opt.tol_inequality = flags.tol;
  }
  auto results = checks::run_verification(sc.space, sc.fiber_dim, opt);

  json report = report_header("verify", flags, sc);
  report["seed"] = opt.seed;
  report["trials"] = opt.trials;
  json list = json::array();
  int passed = 0;
  for (const auto& r : results) {
    list.push_back(check_to_json(r, flags.timing));
    if (r.pass) ++passed;
  }
  report["checks"] = std::move(list);
  const bool ok = checks::all_passed(results);
  report["status"] = ok ? "pass" : "fail";
  io::emit_report(report, flags.out, flags.format, std::cout);

  for (const auto& r : results)
    std::cerr << (r.pass ? "pass " : "FAIL ") << r.name << " (max_violation=" << r.max_violation
              << ", tolerance=" << r.tolerance << ")\n";
  std::cerr << passed << "/" << results.size() << " checks passed\n";
  return ok ? exit_ok : exit_check_failed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"operator fields over a finite parameter space"};
  app.require_subcommand(1);

  CommonFlags flags;
  std::string op_name, op_name2, kernel_name;
  double p = 2.0;
  bool with_adjoint = false;
  Index approx_cells = 0;

  auto* decompose = app.add_subcommand("decompose", "Schatten decomposition report");
  add_common(decompose, flags);
  decompose->add_option("op", op_name, "operator name")->required();

  auto* norm = app.add_subcommand("norm", "L^p norm report");
  add_common(norm, flags);
  norm->add_option("op", op_name, "operator name")->required();
  norm->add_option("--p", p, "exponent in {0} u [1,inf]")->required();

  auto* trace_cmd = app.add_subcommand("trace", "E-valued trace report");
  add_common(trace_cmd, flags);
  trace_cmd->add_option("op", op_name, "operator name")->required();

  auto* hs = app.add_subcommand("hs", "Hilbert-Schmidt pairing report");
  add_common(hs, flags);
  hs->add_option("op1", op_name, "first operator")->required();
  hs->add_option("op2", op_name2, "second operator")->required();

  auto* kernel = app.add_subcommand("kernel", "integral kernel operator report");
  add_common(kernel, flags);
  kernel->add_option("kernel", kernel_name, "kernel name in the scenario, or a kernel file path")
      ->required();
  kernel->add_flag("--adjoint", with_adjoint, "include the adjoint-kernel identity");
  kernel->add_option("--approx", approx_cells, "separable approximation with this many cells");

  auto* dual = app.add_subcommand("dual", "norming element and Hoelder attainment");
  add_common(dual, flags);
  dual->add_option("op", op_name, "operator name")->required();
  dual->add_option("--p", p, "exponent in {0} u [1,inf)")->required();

  auto* verify = app.add_subcommand("verify", "run the conformance suite on random instances");
  add_common(verify, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? exit_ok : exit_input_error;
  }

  try {
    if (decompose->parsed()) return cmd_decompose(flags, op_name);
    if (norm->parsed()) return cmd_norm(flags, op_name, p);
    if (trace_cmd->parsed()) return cmd_trace(flags, op_name);
    if (hs->parsed()) return cmd_hs(flags, op_name, op_name2);
    if (kernel->parsed()) return cmd_kernel(flags, kernel_name, with_adjoint, approx_cells);
    if (dual->parsed()) return cmd_dual(flags, op_name, p);
    if (verify->parsed()) return cmd_verify(flags);
  } catch (const io::io_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return exit_input_error;
  } catch (const contract_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return exit_input_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_input_error;
  }
  return exit_input_error;
}

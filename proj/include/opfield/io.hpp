/* SPDX-License-Identifier: Apache-2.0 */
#ifndef OPFIELD_IO_HPP
#define OPFIELD_IO_HPP

//
// Scenario and kernel files, and machine-readable reports.
//
// Scenario (JSON): {"space": {"points": [...], "adjacency": [[i,j],...]},
//   "fiber_dim": d, "operators": {name: per-point d x d rows of [re,im]},
//   "vectors": {name: per-point [re,im] x d}, "scalars": {name: per-point
//   [re,im]}, "kernels": {name: kernel object or path string}}.
// Kernel (JSON): {"quadrature": {"nodes": [...], "weights": [...]},
//   "kernel": [re,im] indexed [r][s][t]}.
// Complex numbers are [re, im] pairs throughout.
//
// Reports are insertion-ordered JSON; identical inputs and seed give
// byte-identical documents. CSV export walks the report for per-point
// complex arrays and emits one row per point.
//

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "opfield/fieldcore.hpp"
#include "opfield/kernelop.hpp"

namespace opfield::io {

using json = nlohmann::ordered_json;

class io_error : public std::runtime_error {
 public:
  explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

inline cd parse_complex(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw io_error(where + ": expected a [re, im] pair");
  return cd(j[0].get<double>(), j[1].get<double>());
}

inline json dump_complex(cd z) { return json::array({z.real(), z.imag()}); }

inline const json& require_key(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw io_error(where + ": missing field '" + key + "'");
  return j.at(key);
}

// ---------------------------------------------------------------------------
// field <-> json
// ---------------------------------------------------------------------------

inline json to_json(const ScalarFieldXcd& x) {
  json a = json::array();
  for (Index k = 0; k < x.num_points(); ++k) a.push_back(dump_complex(x(k)));
  return a;
}

inline json to_json(const VectorFieldXcd& xi) {
  json a = json::array();
  for (Index k = 0; k < xi.num_points(); ++k) {
    json fiber = json::array();
    for (Index i = 0; i < xi.dim(); ++i) fiber.push_back(dump_complex(xi.fiber(k)[i]));
    a.push_back(std::move(fiber));
  }
  return a;
}

inline json to_json(const OperatorFieldXcd& u) {
  json a = json::array();
  for (Index k = 0; k < u.num_points(); ++k) {
    json fiber = json::array();
    for (Index i = 0; i < u.dim(); ++i) {
      json row = json::array();
      for (Index j = 0; j < u.dim(); ++j) row.push_back(dump_complex(u.fiber(k)(i, j)));
      fiber.push_back(std::move(row));
    }
    a.push_back(std::move(fiber));
  }
  return a;
}

inline ScalarFieldXcd scalar_field_from_json(const json& j, const SpacePtr& space,
                                             const std::string& where) {
  if (!j.is_array() || static_cast<Index>(j.size()) != space->size())
    throw io_error(where + ": expected one complex value per point");
  FiberVectorXcd v(space->size());
  for (Index k = 0; k < space->size(); ++k)
    v[k] = parse_complex(j[static_cast<size_t>(k)], where + "[" + std::to_string(k) + "]");
  return ScalarFieldXcd(space, std::move(v));
}

inline VectorFieldXcd vector_field_from_json(const json& j, const SpacePtr& space, Index dim,
                                             const std::string& where) {
  if (!j.is_array() || static_cast<Index>(j.size()) != space->size())
    throw io_error(where + ": expected one fiber vector per point");
  FiberMatrixXcd comps(dim, space->size());
  for (Index k = 0; k < space->size(); ++k) {
    const auto& fiber = j[static_cast<size_t>(k)];
    const std::string ctx = where + "[" + std::to_string(k) + "]";
    if (!fiber.is_array() || static_cast<Index>(fiber.size()) != dim)
      throw io_error(ctx + ": expected " + std::to_string(dim) + " components");
    for (Index i = 0; i < dim; ++i)
      comps(i, k) = parse_complex(fiber[static_cast<size_t>(i)], ctx);
  }
  return VectorFieldXcd(space, std::move(comps));
}

inline OperatorFieldXcd operator_field_from_json(const json& j, const SpacePtr& space, Index dim,
                                                 const std::string& where) {
  if (!j.is_array() || static_cast<Index>(j.size()) != space->size())
    throw io_error(where + ": expected one fiber matrix per point");
  std::vector<FiberMatrixXcd> fibers;
  fibers.reserve(static_cast<size_t>(space->size()));
  for (Index k = 0; k < space->size(); ++k) {
    const auto& fiber = j[static_cast<size_t>(k)];
    const std::string ctx = where + "[" + std::to_string(k) + "]";
    if (!fiber.is_array() || static_cast<Index>(fiber.size()) != dim)
      throw io_error(ctx + ": expected " + std::to_string(dim) + " rows");
    FiberMatrixXcd m(dim, dim);
    for (Index r = 0; r < dim; ++r) {
      const auto& row = fiber[static_cast<size_t>(r)];
      if (!row.is_array() || static_cast<Index>(row.size()) != dim)
        throw io_error(ctx + ": expected " + std::to_string(dim) + " columns");
      for (Index c = 0; c < dim; ++c)
        m(r, c) = parse_complex(row[static_cast<size_t>(c)], ctx);
    }
    fibers.push_back(std::move(m));
  }
  return OperatorFieldXcd(space, std::move(fibers));
}

// ---------------------------------------------------------------------------
// scenario and kernel files
// ---------------------------------------------------------------------------

struct KernelBundle {
  QuadPtr quadrature;
  KernelFieldXcd kernel;
};

struct Scenario {
  SpacePtr space;
  Index fiber_dim = 0;
  std::map<std::string, OperatorFieldXcd> operators;
  std::map<std::string, VectorFieldXcd> vectors;
  std::map<std::string, ScalarFieldXcd> scalars;
  std::map<std::string, KernelBundle> kernels;
};

inline KernelBundle parse_kernel(const json& j, const SpacePtr& space, const std::string& where) {
  const auto& jq = require_key(j, "quadrature", where);
  const auto& jn = require_key(jq, "nodes", where + ".quadrature");
  const auto& jw = require_key(jq, "weights", where + ".quadrature");
  if (!jn.is_array() || !jw.is_array() || jn.size() != jw.size())
    throw io_error(where + ".quadrature: nodes and weights must be arrays of equal length");
  std::vector<std::string> nodes;
  Eigen::VectorXd weights(static_cast<Index>(jw.size()));
  for (size_t i = 0; i < jn.size(); ++i) {
    nodes.push_back(jn[i].get<std::string>());
    if (!jw[i].is_number()) throw io_error(where + ".quadrature.weights: expected numbers");
    weights[static_cast<Index>(i)] = jw[i].get<double>();
  }
  QuadPtr quad;
  try {
    quad = make_quadrature(std::move(nodes), std::move(weights));
  } catch (const contract_error& e) {
    throw io_error(where + ".quadrature: " + e.what());
  }

  const auto& jk = require_key(j, "kernel", where);
  const Index n = quad->size();
  const Index nt = space->size();
  if (!jk.is_array() || static_cast<Index>(jk.size()) != n)
    throw io_error(where + ".kernel: expected " + std::to_string(n) + " rows of nodes");
  std::vector<FiberMatrixXcd> slices(static_cast<size_t>(nt), FiberMatrixXcd(n, n));
  for (Index r = 0; r < n; ++r) {
    const auto& jr = jk[static_cast<size_t>(r)];
    if (!jr.is_array() || static_cast<Index>(jr.size()) != n)
      throw io_error(where + ".kernel: row " + std::to_string(r) + " must have " +
                     std::to_string(n) + " node entries");
    for (Index s = 0; s < n; ++s) {
      const auto& jt = jr[static_cast<size_t>(s)];
      const std::string ctx =
          where + ".kernel[" + std::to_string(r) + "][" + std::to_string(s) + "]";
      if (!jt.is_array() || static_cast<Index>(jt.size()) != nt)
        throw io_error(ctx + ": expected one value per parameter point");
      for (Index t = 0; t < nt; ++t)
        slices[static_cast<size_t>(t)](r, s) =
            parse_complex(jt[static_cast<size_t>(t)], ctx + "[" + std::to_string(t) + "]");
    }
  }
  return KernelBundle{quad, KernelFieldXcd(quad, space, std::move(slices))};
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error(path + ": cannot open file");
  json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw io_error(path + ": malformed JSON: " + e.what());
  }
  return j;
}

inline Scenario parse_scenario(const json& j, const std::string& where = "scenario") {
  Scenario sc;
  const auto& jspace = require_key(j, "space", where);
  const auto& jpoints = require_key(jspace, "points", where + ".space");
  if (!jpoints.is_array() || jpoints.empty())
    throw io_error(where + ".space.points: expected a nonempty array of labels");
  std::vector<std::string> points;
  for (const auto& p : jpoints) points.push_back(p.get<std::string>());
  std::vector<ParameterSpace::Edge> edges;
  if (jspace.contains("adjacency")) {
    for (const auto& e : jspace.at("adjacency")) {
      if (!e.is_array() || e.size() != 2)
        throw io_error(where + ".space.adjacency: expected [i, j] pairs");
      edges.emplace_back(e[0].get<Index>(), e[1].get<Index>());
    }
  }
  try {
    sc.space = make_space(std::move(points), std::move(edges));
  } catch (const contract_error& e) {
    throw io_error(where + ".space: " + e.what());
  }

  const auto& jdim = require_key(j, "fiber_dim", where);
  if (!jdim.is_number_integer() || jdim.get<Index>() < 1)
    throw io_error(where + ".fiber_dim: expected a positive integer");
  sc.fiber_dim = jdim.get<Index>();

  try {
    if (j.contains("operators"))
      for (const auto& [name, value] : j.at("operators").items())
        sc.operators.emplace(name, operator_field_from_json(value, sc.space, sc.fiber_dim,
                                                            where + ".operators." + name));
    if (j.contains("vectors"))
      for (const auto& [name, value] : j.at("vectors").items())
        sc.vectors.emplace(name, vector_field_from_json(value, sc.space, sc.fiber_dim,
                                                        where + ".vectors." + name));
    if (j.contains("scalars"))
      for (const auto& [name, value] : j.at("scalars").items())
        sc.scalars.emplace(name,
                           scalar_field_from_json(value, sc.space, where + ".scalars." + name));
    if (j.contains("kernels"))
      for (const auto& [name, value] : j.at("kernels").items()) {
        const std::string ctx = where + ".kernels." + name;
        if (value.is_string())
          sc.kernels.emplace(name, parse_kernel(read_json_file(value.get<std::string>()),
                                                sc.space, ctx));
        else
          sc.kernels.emplace(name, parse_kernel(value, sc.space, ctx));
      }
  } catch (const contract_error& e) {
    throw io_error(where + ": " + e.what());
  }
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  return parse_scenario(read_json_file(path), path);
}

inline KernelBundle load_kernel(const std::string& path, const SpacePtr& space) {
  return parse_kernel(read_json_file(path), space, path);
}

// ---------------------------------------------------------------------------
// report emission
// ---------------------------------------------------------------------------

inline bool looks_like_complex_pair(const json& j) {
  return j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number();
}

inline bool looks_like_scalar_field(const json& j, Index num_points) {
  if (!j.is_array() || static_cast<Index>(j.size()) != num_points || num_points == 0) return false;
  for (const auto& v : j)
    if (!looks_like_complex_pair(v)) return false;
  return true;
}

namespace detail {

inline void collect_fields(const json& j, const std::string& prefix, Index num_points,
                           std::vector<std::pair<std::string, const json*>>& out) {
  if (!j.is_object()) return;
  for (const auto& [key, value] : j.items()) {
    const std::string name = prefix.empty() ? key : prefix + "." + key;
    if (looks_like_scalar_field(value, num_points))
      out.emplace_back(name, &value);
    else if (value.is_object())
      collect_fields(value, name, num_points, out);
  }
}

inline std::string format_number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace detail

// One row per point: the label column followed by re/im columns for every
// per-point complex array found in the report (depth-first, insertion
// order). Reports without a "points" array have no per-point content and
// produce an empty document.
inline std::string report_to_csv(const json& report) {
  if (!report.is_object() || !report.contains("points") || !report.at("points").is_array())
    return "";
  const auto& points = report.at("points");
  const Index num_points = static_cast<Index>(points.size());
  std::vector<std::pair<std::string, const json*>> fields;
  detail::collect_fields(report, "", num_points, fields);

  std::ostringstream os;
  os << "point";
  for (const auto& [name, _] : fields) os << "," << name << "_re," << name << "_im";
  os << "\n";
  for (Index k = 0; k < num_points; ++k) {
    os << points[static_cast<size_t>(k)].get<std::string>();
    for (const auto& [_, values] : fields) {
      const auto& pair = (*values)[static_cast<size_t>(k)];
      os << "," << detail::format_number(pair[0].get<double>()) << ","
         << detail::format_number(pair[1].get<double>());
    }
    os << "\n";
  }
  return os.str();
}

inline std::string report_to_string(const json& report, const std::string& format) {
  if (format == "json") return report.dump(2) + "\n";
  if (format == "csv") return report_to_csv(report);
  throw io_error("emit_report: unknown format '" + format + "' (expected json or csv)");
}

// Writes the report to `path` ("-" or empty: stdout). Throws io_error on an
// unwritable path.
inline void emit_report(const json& report, const std::string& path, const std::string& format,
                        std::ostream& fallback) {
  const std::string body = report_to_string(report, format);
  if (path.empty() || path == "-") {
    fallback << body;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error(path + ": cannot open for writing");
  out << body;
  if (!out) throw io_error(path + ": write failed");
}

}  // namespace opfield::io

#endif  // OPFIELD_IO_HPP

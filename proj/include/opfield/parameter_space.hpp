/* SPDX-License-Identifier: Apache-2.0 */
#ifndef OPFIELD_PARAMETER_SPACE_HPP
#define OPFIELD_PARAMETER_SPACE_HPP

#include <algorithm>
#include <deque>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "opfield/types.hpp"

namespace opfield {

// Finite ordered point set standing in for the parameter space T. The
// optional adjacency is used only for continuity diagnostics and for the
// traversal order of phase alignment; when no adjacency is declared the
// points form a chain in declared order.
class ParameterSpace {
 public:
  using Edge = std::pair<Index, Index>;

  explicit ParameterSpace(std::vector<std::string> points, std::vector<Edge> adjacency = {})
      : points_(std::move(points)), edges_(std::move(adjacency)) {
    if (points_.empty()) throw contract_error("ParameterSpace: needs at least one point");
    index_.reserve(points_.size());
    for (Index k = 0; k < size(); ++k) {
      if (!index_.emplace(points_[static_cast<size_t>(k)], k).second)
        throw contract_error("ParameterSpace: duplicate point label '" +
                             points_[static_cast<size_t>(k)] + "'");
    }
    neighbors_.resize(points_.size());
    for (auto& [a, b] : edges_) {
      if (a < 0 || a >= size() || b < 0 || b >= size() || a == b)
        throw contract_error("ParameterSpace: adjacency references invalid point index");
      neighbors_[static_cast<size_t>(a)].push_back(b);
      neighbors_[static_cast<size_t>(b)].push_back(a);
    }
    for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());
    if (!edges_.empty() && !connected())
      throw contract_error("ParameterSpace: adjacency graph is not connected");
  }

  Index size() const { return static_cast<Index>(points_.size()); }
  const std::string& label(Index k) const { return points_.at(static_cast<size_t>(k)); }
  const std::vector<std::string>& labels() const { return points_; }
  bool has_adjacency() const { return !edges_.empty(); }
  const std::vector<Edge>& edges() const { return edges_; }

  Index index_of(std::string_view point) const {
    auto it = index_.find(std::string(point));
    if (it == index_.end())
      throw contract_error("ParameterSpace: unknown point label '" + std::string(point) + "'");
    return it->second;
  }

  // Edges walked by continuity diagnostics: the declared adjacency, or the
  // consecutive-point chain when none was declared.
  std::vector<Edge> diagnostic_edges() const {
    if (has_adjacency()) return edges_;
    std::vector<Edge> chain;
    for (Index k = 0; k + 1 < size(); ++k) chain.emplace_back(k, k + 1);
    return chain;
  }

  // Breadth-first traversal rooted at `root`; order[0] == root and
  // parent[root] == -1. Deterministic: neighbor lists are visited in
  // ascending point index.
  struct Traversal {
    std::vector<Index> order;
    std::vector<Index> parent;
  };

  Traversal traversal(Index root) const {
    if (root < 0 || root >= size()) throw contract_error("ParameterSpace: traversal root out of range");
    Traversal t;
    t.parent.assign(points_.size(), -1);
    t.order.reserve(points_.size());
    std::vector<char> seen(points_.size(), 0);
    std::deque<Index> queue{root};
    seen[static_cast<size_t>(root)] = 1;
    while (!queue.empty()) {
      const Index k = queue.front();
      queue.pop_front();
      t.order.push_back(k);
      for (Index nb : neighbors_of(k)) {
        if (!seen[static_cast<size_t>(nb)]) {
          seen[static_cast<size_t>(nb)] = 1;
          t.parent[static_cast<size_t>(nb)] = k;
          queue.push_back(nb);
        }
      }
    }
    return t;
  }

 private:
  std::vector<Index> neighbors_of(Index k) const {
    if (has_adjacency()) return neighbors_[static_cast<size_t>(k)];
    std::vector<Index> nb;
    if (k > 0) nb.push_back(k - 1);
    if (k + 1 < size()) nb.push_back(k + 1);
    return nb;
  }

  bool connected() const {
    auto t = traversal(0);
    return static_cast<Index>(t.order.size()) == size();
  }

  std::vector<std::string> points_;
  std::unordered_map<std::string, Index> index_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Index>> neighbors_;
};

using SpacePtr = std::shared_ptr<const ParameterSpace>;

inline SpacePtr make_space(std::vector<std::string> points,
                           std::vector<ParameterSpace::Edge> adjacency = {}) {
  return std::make_shared<const ParameterSpace>(std::move(points), std::move(adjacency));
}

// Convenience for tests and generated stages: points "t0".."t{n-1}" with an
// optional chain adjacency.
inline SpacePtr make_path_space(Index n, bool with_adjacency = false) {
  std::vector<std::string> pts;
  pts.reserve(static_cast<size_t>(n));
  for (Index k = 0; k < n; ++k) pts.push_back("t" + std::to_string(k));
  std::vector<ParameterSpace::Edge> edges;
  if (with_adjacency)
    for (Index k = 0; k + 1 < n; ++k) edges.emplace_back(k, k + 1);
  return make_space(std::move(pts), std::move(edges));
}

inline void require_same_space(const SpacePtr& a, const SpacePtr& b, const char* where) {
  if (a == b) return;
  if (!a || !b || a->labels() != b->labels())
    throw contract_error(std::string(where) + ": operands live on different parameter spaces");
}

}  // namespace opfield

#endif  // OPFIELD_PARAMETER_SPACE_HPP

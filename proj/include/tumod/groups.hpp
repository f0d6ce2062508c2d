#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <istream>
#include <iterator>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tumod/errors.hpp"
#include "tumod/int_matrix.hpp"

namespace tumod {

/// A collection of possibly overlapping groups over the ground set {0..p-1}.
///
/// Indices are 0-based internally; text files and the CLI use 1-based
/// indices. Each group is stored sorted and duplicate-free.
class GroupStructure {
 public:
  GroupStructure() = default;

  GroupStructure(std::size_t p, std::vector<std::vector<std::size_t>> groups,
                 std::vector<double> weights = {})
      : p_(p), groups_(std::move(groups)), weights_(std::move(weights)) {
    if (weights_.empty()) weights_.assign(groups_.size(), 1.0);
    if (weights_.size() != groups_.size())
      throw DimensionError("GroupStructure: one weight per group required");
    for (std::size_t i = 0; i < groups_.size(); ++i) {
      auto& g = groups_[i];
      if (g.empty()) throw DimensionError("GroupStructure: group " + std::to_string(i + 1) + " is empty");
      std::sort(g.begin(), g.end());
      g.erase(std::unique(g.begin(), g.end()), g.end());
      if (g.back() >= p_)
        throw DimensionError("GroupStructure: group " + std::to_string(i + 1) +
                             " references an index beyond p");
      if (!(weights_[i] > 0.0))
        throw DimensionError("GroupStructure: weights must be strictly positive");
    }
  }

  /// Convenience for writing structures the way they are usually written down.
  static GroupStructure from_one_based(std::size_t p,
                                       const std::vector<std::vector<std::size_t>>& groups,
                                       std::vector<double> weights = {}) {
    std::vector<std::vector<std::size_t>> zero_based;
    for (const auto& g : groups) {
      std::vector<std::size_t> z;
      for (auto i : g) {
        if (i == 0) throw DimensionError("GroupStructure: 1-based index 0");
        z.push_back(i - 1);
      }
      zero_based.push_back(std::move(z));
    }
    return GroupStructure(p, std::move(zero_based), std::move(weights));
  }

  std::size_t p() const noexcept { return p_; }
  std::size_t num_groups() const noexcept { return groups_.size(); }
  const std::vector<std::size_t>& group(std::size_t i) const { return groups_.at(i); }
  const std::vector<std::vector<std::size_t>>& groups() const noexcept { return groups_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  bool contains(std::size_t group_index, std::size_t element) const {
    const auto& g = groups_.at(group_index);
    return std::binary_search(g.begin(), g.end(), element);
  }

  /// Number of (group, member) pairs, i.e. edges of the bipartite graph.
  std::size_t num_memberships() const {
    std::size_t n = 0;
    for (const auto& g : groups_) n += g.size();
    return n;
  }

  /// True if every index 0..p-1 lies in some group.
  bool covers_ground_set() const {
    std::vector<bool> seen(p_, false);
    for (const auto& g : groups_)
      for (auto i : g) seen[i] = true;
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
  }

  friend bool operator==(const GroupStructure&, const GroupStructure&) = default;

 private:
  std::size_t p_ = 0;
  std::vector<std::vector<std::size_t>> groups_;
  std::vector<double> weights_;
};

/// Rooted tree over nodes {0..p-1}; the root has no parent.
class TreeStructure {
 public:
  static constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

  TreeStructure() = default;

  explicit TreeStructure(std::vector<std::size_t> parent) : parent_(std::move(parent)) {
    const std::size_t p = parent_.size();
    if (p == 0) throw DimensionError("TreeStructure: empty tree");
    std::size_t roots = 0;
    for (std::size_t i = 0; i < p; ++i) {
      if (parent_[i] == kNoParent) {
        root_ = i;
        ++roots;
      } else if (parent_[i] >= p || parent_[i] == i) {
        throw DimensionError("TreeStructure: invalid parent of node " + std::to_string(i + 1));
      }
    }
    if (roots != 1) throw DimensionError("TreeStructure: exactly one root required");
    // walking up from every node must reach the root within p steps
    for (std::size_t i = 0; i < p; ++i) {
      std::size_t v = i, steps = 0;
      while (parent_[v] != kNoParent) {
        v = parent_[v];
        if (++steps > p) throw DimensionError("TreeStructure: parent pointers contain a cycle");
      }
    }
  }

  /// parents[i] is the 1-based parent of node i+1, 0 for the root.
  static TreeStructure from_one_based_parents(const std::vector<std::size_t>& parents) {
    std::vector<std::size_t> parent;
    for (auto q : parents) parent.push_back(q == 0 ? kNoParent : q - 1);
    return TreeStructure(std::move(parent));
  }

  std::size_t size() const noexcept { return parent_.size(); }
  std::size_t root() const noexcept { return root_; }
  std::size_t parent(std::size_t node) const { return parent_.at(node); }
  bool is_root(std::size_t node) const { return parent_.at(node) == kNoParent; }
  const std::vector<std::size_t>& parents() const noexcept { return parent_; }

  /// The node itself followed by all its descendants, sorted.
  std::vector<std::size_t> subtree(std::size_t node) const {
    std::vector<std::size_t> out;
    for (std::size_t v = 0; v < size(); ++v) {
      std::size_t u = v;
      while (true) {
        if (u == node) {
          out.push_back(v);
          break;
        }
        if (parent_[u] == kNoParent) break;
        u = parent_[u];
      }
    }
    return out;
  }

  friend bool operator==(const TreeStructure&, const TreeStructure&) = default;

 private:
  std::vector<std::size_t> parent_;
  std::size_t root_ = 0;
};

struct IntersectionEdge {
  std::size_t first;   // group index, first < second
  std::size_t second;
  std::vector<std::size_t> shared;
};

/// Groups as vertices, joined when they share at least one element.
struct IntersectionGraph {
  std::size_t num_vertices = 0;
  std::vector<IntersectionEdge> edges;

  bool is_acyclic() const {
    std::vector<std::size_t> root(num_vertices);
    std::iota(root.begin(), root.end(), 0);
    auto find = [&](std::size_t v) {
      while (root[v] != v) v = root[v] = root[root[v]];
      return v;
    };
    for (const auto& e : edges) {
      const auto a = find(e.first), b = find(e.second);
      if (a == b) return false;
      root[a] = b;
    }
    return true;
  }
};

/// p x M matrix with B(i, j) = 1 iff i is in group j.
inline IntMatrix biadjacency(const GroupStructure& g) {
  IntMatrix b(g.p(), g.num_groups());
  for (std::size_t j = 0; j < g.num_groups(); ++j)
    for (auto i : g.group(j)) b(i, j) = 1;
  return b;
}

inline IntersectionGraph intersection_graph(const GroupStructure& g) {
  IntersectionGraph out;
  out.num_vertices = g.num_groups();
  for (std::size_t a = 0; a < g.num_groups(); ++a)
    for (std::size_t b = a + 1; b < g.num_groups(); ++b) {
      std::vector<std::size_t> shared;
      std::set_intersection(g.group(a).begin(), g.group(a).end(), g.group(b).begin(),
                            g.group(b).end(), std::back_inserter(shared));
      if (!shared.empty()) out.edges.push_back({a, b, std::move(shared)});
    }
  return out;
}

/// Rows s_j - w_i <= 0 for every group i and member j, over columns [w; s].
/// Rows are ordered by group, then by member.
inline IntMatrix intersection_constraint_matrix(const GroupStructure& g) {
  const std::size_t m = g.num_groups();
  IntMatrix h(g.num_memberships(), m + g.p());
  std::size_t row = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (auto j : g.group(i)) {
      h(row, i) = -1;
      h(row, m + j) = 1;
      ++row;
    }
  return h;
}

/// Edge-node incidence of the bipartite group/variable graph over columns
/// [w; s]: one row per membership with ones at w_i and s_j. Same row order
/// as intersection_constraint_matrix.
inline IntMatrix bipartite_incidence(const GroupStructure& g) {
  const std::size_t m = g.num_groups();
  IntMatrix e(g.num_memberships(), m + g.p());
  std::size_t row = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (auto j : g.group(i)) {
      e(row, i) = 1;
      e(row, m + j) = 1;
      ++row;
    }
  return e;
}

/// Sliding-window matrix D: (p - delta + 1) x p, row r has ones in columns
/// r .. r + delta - 1. Rows of D are the groups of the refractory model.
inline IntMatrix refractoriness_matrix(std::size_t p, std::size_t delta) {
  if (delta < 1 || delta > p)
    throw DimensionError("refractoriness_matrix: need 1 <= delta <= p (got delta=" +
                         std::to_string(delta) + ", p=" + std::to_string(p) + ")");
  IntMatrix d(p - delta + 1, p);
  for (std::size_t r = 0; r < d.rows(); ++r)
    for (std::size_t c = r; c < r + delta; ++c) d(r, c) = 1;
  return d;
}

/// Groups given by the rows of a 0/1 matrix (e.g. D, or a transposed biadjacency).
inline GroupStructure groups_from_rows(const IntMatrix& rows) {
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t r = 0; r < rows.rows(); ++r) {
    std::vector<std::size_t> g;
    for (std::size_t c = 0; c < rows.cols(); ++c)
      if (rows(r, c) != 0) g.push_back(c);
    groups.push_back(std::move(g));
  }
  return GroupStructure(rows.cols(), std::move(groups));
}

/// One unit-weight group per node: the node and all its descendants.
inline GroupStructure hierarchy_groups(const TreeStructure& t) {
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t v = 0; v < t.size(); ++v) groups.push_back(t.subtree(v));
  return GroupStructure(t.size(), std::move(groups));
}

/// Directed edge-node incidence: one row per non-root node (in node order),
/// +1 at the parent and -1 at the child. T s >= 0 encodes s_parent >= s_child.
inline IntMatrix tree_incidence(const TreeStructure& t) {
  IntMatrix m(t.size() - 1, t.size());
  std::size_t row = 0;
  for (std::size_t v = 0; v < t.size(); ++v) {
    if (t.is_root(v)) continue;
    m(row, t.parent(v)) = 1;
    m(row, v) = -1;
    ++row;
  }
  return m;
}

/// Edge-node incidence of an undirected graph: ones at both endpoints.
inline IntMatrix graph_incidence(std::size_t p,
                                 const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
  IntMatrix m(edges.size(), p);
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [a, b] = edges[e];
    if (a >= p || b >= p || a == b) throw DimensionError("graph_incidence: invalid edge");
    m(e, a) = 1;
    m(e, b) = 1;
  }
  return m;
}

inline constexpr std::size_t kAppendixP = 200;
inline constexpr std::size_t kAppendixGroupSize = 10;
inline constexpr std::size_t kAppendixOverlap = 3;
inline constexpr std::size_t kAppendixGroups = 29;

/// 29 interval groups of size 10 over p = 200, consecutive groups sharing 3
/// indices (stride 7). The last group would run past p and is clamped to
/// the final four indices.
inline GroupStructure appendix_interval_groups() {
  constexpr std::size_t stride = kAppendixGroupSize - kAppendixOverlap;
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t k = 0; k < kAppendixGroups; ++k) {
    std::vector<std::size_t> g;
    for (std::size_t i = k * stride; i < std::min(k * stride + kAppendixGroupSize, kAppendixP); ++i)
      g.push_back(i);
    groups.push_back(std::move(g));
  }
  return GroupStructure(kAppendixP, std::move(groups));
}

// --- group file: "p M", then M lines of 1-based indices with an optional
// trailing weight written as a decimal (contains '.' or an exponent) ---

namespace detail {

inline bool looks_like_weight(const std::string& tok) {
  return tok.find_first_of(".eE") != std::string::npos;
}

inline std::string format_weight(double w) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, w);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

}  // namespace detail

inline GroupStructure read_groups(std::istream& in) {
  std::string line;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };
  if (!next_line()) throw ParseError("groups: missing header \"p M\"");
  std::istringstream header(line);
  long long p = -1, m = -1;
  if (!(header >> p >> m) || p <= 0 || m < 0) throw ParseError("groups: bad header \"" + line + "\"");
  std::vector<std::vector<std::size_t>> groups;
  std::vector<double> weights;
  for (long long k = 0; k < m; ++k) {
    if (!next_line()) throw ParseError("groups: expected " + std::to_string(m) + " group lines");
    std::istringstream ls(line);
    std::vector<std::size_t> g;
    double w = 1.0;
    std::string tok;
    std::vector<std::string> toks;
    while (ls >> tok) toks.push_back(tok);
    for (std::size_t t = 0; t < toks.size(); ++t) {
      if (t + 1 == toks.size() && detail::looks_like_weight(toks[t])) {
        try {
          std::size_t used = 0;
          w = std::stod(toks[t], &used);
          if (used != toks[t].size()) throw ParseError("");
        } catch (...) {
          throw ParseError("groups: bad weight \"" + toks[t] + "\"");
        }
        continue;
      }
      long long idx = 0;
      auto [ptr, ec] = std::from_chars(toks[t].data(), toks[t].data() + toks[t].size(), idx);
      if (ec != std::errc() || ptr != toks[t].data() + toks[t].size() || idx < 1 || idx > p)
        throw ParseError("groups: bad index \"" + toks[t] + "\" on group line " +
                         std::to_string(k + 1));
      g.push_back(static_cast<std::size_t>(idx - 1));
    }
    if (g.empty()) throw ParseError("groups: group line " + std::to_string(k + 1) + " is empty");
    groups.push_back(std::move(g));
    weights.push_back(w);
  }
  try {
    return GroupStructure(static_cast<std::size_t>(p), std::move(groups), std::move(weights));
  } catch (const DimensionError& e) {
    throw ParseError(std::string("groups: ") + e.what());
  }
}

inline GroupStructure parse_groups(const std::string& text) {
  std::istringstream in(text);
  return read_groups(in);
}

inline void write_groups(std::ostream& out, const GroupStructure& g) {
  out << g.p() << ' ' << g.num_groups() << '\n';
  for (std::size_t i = 0; i < g.num_groups(); ++i) {
    for (auto j : g.group(i)) out << j + 1 << ' ';
    out << detail::format_weight(g.weights()[i]) << '\n';
  }
}

inline std::string to_string(const GroupStructure& g) {
  std::ostringstream out;
  write_groups(out, g);
  return out.str();
}

}  // namespace tumod

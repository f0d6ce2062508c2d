#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "tumod/errors.hpp"
#include "tumod/groups.hpp"
#include "tumod/int_matrix.hpp"

namespace tumod {

/// Entries with |x_i| <= this are treated as zero when taking supports.
inline constexpr double kZeroThreshold = 1e-12;

/// Exhaustive set-cover evaluation is limited to this many groups meeting
/// the support.
inline constexpr std::size_t kSetCoverMaxGroups = 20;

/// Nonnegative extended real: a finite value or +infinity.
class PenaltyValue {
 public:
  constexpr PenaltyValue() = default;

  static PenaltyValue finite(double v) {
    if (std::isnan(v) || std::isinf(v)) throw DimensionError("PenaltyValue: value must be finite");
    // LP optima of nonnegative objectives can land a hair below zero
    if (v < 0.0) {
      if (v < -1e-9) throw DimensionError("PenaltyValue: negative value " + std::to_string(v));
      v = 0.0;
    }
    PenaltyValue out;
    out.value_ = v;
    return out;
  }

  static PenaltyValue infinity() {
    PenaltyValue out;
    out.infinite_ = true;
    return out;
  }

  bool is_finite() const noexcept { return !infinite_; }
  bool is_infinite() const noexcept { return infinite_; }

  /// The value as a double, with +inf for the infinite marker.
  double value() const noexcept {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  friend bool operator==(const PenaltyValue& a, const PenaltyValue& b) {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }
  friend std::partial_ordering operator<=>(const PenaltyValue& a, const PenaltyValue& b) {
    return a.value() <=> b.value();
  }

 private:
  double value_ = 0.0;
  bool infinite_ = false;
};

/// Fixed-point with the given number of decimals, or "inf".
inline std::string to_string(const PenaltyValue& v, int decimals = 6) {
  if (v.is_infinite()) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v.value());
  return buf;
}

inline std::ostream& operator<<(std::ostream& os, const PenaltyValue& v) { return os << to_string(v); }

/// Binary support indicator of a vector.
class SupportVector {
 public:
  SupportVector() = default;
  explicit SupportVector(std::size_t p) : bits_(p, 0) {}

  static SupportVector of(const Eigen::VectorXd& x, double threshold = kZeroThreshold) {
    SupportVector s(static_cast<std::size_t>(x.size()));
    for (Eigen::Index i = 0; i < x.size(); ++i)
      s.bits_[static_cast<std::size_t>(i)] = std::abs(x[i]) > threshold;
    return s;
  }

  static SupportVector from_mask(std::size_t p, std::uint64_t mask) {
    if (p > 64) throw SizeError("SupportVector::from_mask: p > 64");
    SupportVector s(p);
    for (std::size_t i = 0; i < p; ++i) s.bits_[i] = (mask >> i) & 1u;
    return s;
  }

  static SupportVector from_indices(std::size_t p, const std::vector<std::size_t>& idx) {
    SupportVector s(p);
    for (auto i : idx) {
      if (i >= p) throw DimensionError("SupportVector: index out of range");
      s.bits_[i] = 1;
    }
    return s;
  }

  std::size_t size() const noexcept { return bits_.size(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  void set(std::size_t i, bool on = true) { bits_.at(i) = on; }

  std::size_t count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
  }
  bool empty() const { return count() == 0; }

  std::vector<std::size_t> indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i]) out.push_back(i);
    return out;
  }

  std::uint64_t mask() const {
    if (bits_.size() > 64) throw SizeError("SupportVector::mask: p > 64");
    std::uint64_t m = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i)
      if (bits_[i]) m |= std::uint64_t{1} << i;
    return m;
  }

  Eigen::VectorXd indicator() const {
    Eigen::VectorXd v(static_cast<Eigen::Index>(bits_.size()));
    for (std::size_t i = 0; i < bits_.size(); ++i) v[static_cast<Eigen::Index>(i)] = bits_[i];
    return v;
  }

  friend bool operator==(const SupportVector&, const SupportVector&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// Binary selection over groups (one entry per group).
using LatentSelection = std::vector<std::uint8_t>;

struct CoverSolution {
  double cost = 0.0;
  LatentSelection selection;
};

namespace detail {

inline void check_length(const Eigen::VectorXd& x, std::size_t p, const char* who) {
  if (static_cast<std::size_t>(x.size()) != p)
    throw DimensionError(std::string(who) + ": vector has length " + std::to_string(x.size()) +
                         ", expected " + std::to_string(p));
}

/// Only groups meeting the support can take part in a minimal cover, so the
/// exhaustive cap applies to those.
inline void check_cover_cap(const GroupStructure& g, const SupportVector& s, const char* who) {
  std::size_t relevant = 0;
  for (std::size_t k = 0; k < g.num_groups(); ++k)
    relevant += std::any_of(g.group(k).begin(), g.group(k).end(), [&](std::size_t j) { return s[j]; });
  if (relevant > kSetCoverMaxGroups)
    throw SizeError(std::string(who) + ": " + std::to_string(relevant) +
                    " groups meet the support, above the exhaustive cap of " +
                    std::to_string(kSetCoverMaxGroups));
}

struct CoverSearch {
  const GroupStructure& g;
  const std::vector<double>& cost;
  std::vector<std::size_t> targets;
  std::vector<int> covered_by;  // per ground element, number of chosen groups containing it
  LatentSelection chosen;
  double best = std::numeric_limits<double>::infinity();
  LatentSelection best_sel;

  void run(double spent) {
    if (spent >= best) return;
    auto it = std::find_if(targets.begin(), targets.end(), [&](std::size_t i) { return covered_by[i] == 0; });
    if (it == targets.end()) {
      best = spent;
      best_sel = chosen;
      return;
    }
    // some chosen group must contain the first uncovered target
    for (std::size_t k = 0; k < g.num_groups(); ++k) {
      if (chosen[k] || !g.contains(k, *it)) continue;
      chosen[k] = 1;
      for (auto j : g.group(k)) ++covered_by[j];
      run(spent + cost[k]);
      for (auto j : g.group(k)) --covered_by[j];
      chosen[k] = 0;
    }
  }
};

}  // namespace detail

/// Exact minimum-cost family of groups whose union contains the support.
/// Empty when some support index lies in no group.
inline std::optional<CoverSolution> min_cost_cover(const GroupStructure& g, const SupportVector& s,
                                                   const std::vector<double>& cost) {
  if (s.size() != g.p()) throw DimensionError("min_cost_cover: support length differs from p");
  detail::check_cover_cap(g, s, "min_cost_cover");
  if (cost.size() != g.num_groups()) throw DimensionError("min_cost_cover: one cost per group required");
  detail::CoverSearch search{g, cost, s.indices(), std::vector<int>(g.p(), 0),
                             LatentSelection(g.num_groups(), 0),
                             std::numeric_limits<double>::infinity(), {}};
  search.run(0.0);
  if (std::isinf(search.best)) return std::nullopt;
  return CoverSolution{search.best, std::move(search.best_sel)};
}

/// Sum of weights of the groups that meet supp(x).
inline PenaltyValue group_intersection_penalty(const Eigen::VectorXd& x, const GroupStructure& g) {
  detail::check_length(x, g.p(), "group_intersection_penalty");
  const auto s = SupportVector::of(x);
  double total = 0.0;
  for (std::size_t k = 0; k < g.num_groups(); ++k)
    if (std::any_of(g.group(k).begin(), g.group(k).end(), [&](std::size_t j) { return s[j]; }))
      total += g.weights()[k];
  return PenaltyValue::finite(total);
}

/// Weight of a minimum weighted set cover of supp(x); +inf if uncoverable.
inline PenaltyValue group_cover_penalty(const Eigen::VectorXd& x, const GroupStructure& g) {
  detail::check_length(x, g.p(), "group_cover_penalty");
  const auto cover = min_cost_cover(g, SupportVector::of(x), g.weights());
  return cover ? PenaltyValue::finite(cover->cost) : PenaltyValue::infinity();
}

enum class WithinGroupVariant { Intersection, Cover };

/// Each selected group costs the number of supported entries it holds.
/// Intersection: every group meeting the support is selected. Cover: the
/// selection only has to cover the support.
inline PenaltyValue within_group_sparsity_penalty(const Eigen::VectorXd& x, const GroupStructure& g,
                                                  WithinGroupVariant variant) {
  detail::check_length(x, g.p(), "within_group_sparsity_penalty");
  const auto s = SupportVector::of(x);
  std::vector<double> hits(g.num_groups(), 0.0);
  for (std::size_t k = 0; k < g.num_groups(); ++k)
    for (auto j : g.group(k)) hits[k] += s[j];
  if (variant == WithinGroupVariant::Intersection) {
    // an uncovered support index leaves the constraint s_j <= w_i vacuous
    double total = 0.0;
    for (auto h : hits) total += h;
    return PenaltyValue::finite(total);
  }
  const auto cover = min_cost_cover(g, s, hits);
  return cover ? PenaltyValue::finite(cover->cost) : PenaltyValue::infinity();
}

/// ||x||_0 when supp(x) is covered by at most `max_groups` groups, else +inf.
inline PenaltyValue sparse_g_cover_penalty(const Eigen::VectorXd& x, const GroupStructure& g,
                                           std::size_t max_groups) {
  detail::check_length(x, g.p(), "sparse_g_cover_penalty");
  const auto s = SupportVector::of(x);
  const auto cover = min_cost_cover(g, s, std::vector<double>(g.num_groups(), 1.0));
  if (!cover || cover->cost > static_cast<double>(max_groups)) return PenaltyValue::infinity();
  return PenaltyValue::finite(static_cast<double>(s.count()));
}

/// ||x||_0 when the support is a rooted connected subtree, else +inf.
inline PenaltyValue tree_l0_penalty(const Eigen::VectorXd& x, const TreeStructure& t) {
  detail::check_length(x, t.size(), "tree_l0_penalty");
  const auto s = SupportVector::of(x);
  for (std::size_t v = 0; v < t.size(); ++v)
    if (s[v] && !t.is_root(v) && !s[t.parent(v)]) return PenaltyValue::infinity();
  return PenaltyValue::finite(static_cast<double>(s.count()));
}

/// 0 for x = 0, 1 when every group holds at most one supported index, else +inf.
inline PenaltyValue knapsack_penalty(const Eigen::VectorXd& x, const GroupStructure& g) {
  detail::check_length(x, g.p(), "knapsack_penalty");
  const auto s = SupportVector::of(x);
  if (s.empty()) return PenaltyValue::finite(0.0);
  for (std::size_t k = 0; k < g.num_groups(); ++k) {
    std::size_t hits = 0;
    for (auto j : g.group(k)) hits += s[j];
    if (hits > 1) return PenaltyValue::infinity();
  }
  return PenaltyValue::finite(1.0);
}

/// ||x||_0 when every row of bT selects at most one supported index, else +inf.
inline PenaltyValue dispersive_l0_penalty(const Eigen::VectorXd& x, const IntMatrix& bT) {
  detail::check_length(x, bT.cols(), "dispersive_l0_penalty");
  const auto s = SupportVector::of(x);
  for (std::size_t r = 0; r < bT.rows(); ++r) {
    std::int64_t sum = 0;
    for (std::size_t c = 0; c < bT.cols(); ++c) sum += bT(r, c) * static_cast<std::int64_t>(s[c]);
    if (sum > 1) return PenaltyValue::infinity();
  }
  return PenaltyValue::finite(static_cast<double>(s.count()));
}

using Edge = std::pair<std::size_t, std::size_t>;

inline void validate_edges(std::size_t p, const std::vector<Edge>& edges, const char* who) {
  for (const auto& [a, b] : edges)
    if (a >= p || b >= p || a == b)
      throw DimensionError(std::string(who) + ": invalid edge (" + std::to_string(a + 1) + "," +
                           std::to_string(b + 1) + ")");
}

/// Number of edges with both endpoints supported.
inline PenaltyValue pairwise_dispersive_penalty(const Eigen::VectorXd& x, const std::vector<Edge>& edges) {
  const auto p = static_cast<std::size_t>(x.size());
  validate_edges(p, edges, "pairwise_dispersive_penalty");
  const auto s = SupportVector::of(x);
  double total = 0.0;
  for (const auto& [a, b] : edges) total += s[a] && s[b];
  return PenaltyValue::finite(total);
}

}  // namespace tumod

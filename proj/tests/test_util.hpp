#pragma once

// Test-only oracles and generators. Nothing here calls into the code paths
// it is used to check.

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "tumod/int_matrix.hpp"
#include "tumod/groups.hpp"
#include "tumod/lp.hpp"
#include "tumod/penalties.hpp"

namespace tumod::testing_util {

/// Laplace expansion along the first row.
inline std::int64_t cofactor_determinant(const IntMatrix& m) {
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  if (n == 1) return m(0, 0);
  std::int64_t det = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (m(0, c) == 0) continue;
    std::vector<std::size_t> rows, cols;
    for (std::size_t r = 1; r < n; ++r) rows.push_back(r);
    for (std::size_t k = 0; k < n; ++k)
      if (k != c) cols.push_back(k);
    const std::int64_t sign = (c % 2 == 0) ? 1 : -1;
    det += sign * m(0, c) * cofactor_determinant(m.submatrix(rows, cols));
  }
  return det;
}

/// Small LP with integer data and a mix of finite, half-infinite and free
/// bounds, so that all three statuses occur.
inline LpProblem random_lp(std::mt19937_64& rng, int max_vars, int max_rows) {
  std::uniform_int_distribution<int> nv(1, max_vars), nr(0, max_rows), coef(-3, 3), rhs(-4, 6),
      kind(0, 5), sense(0, 1);
  const int n = nv(rng), m = nr(rng);
  LpBuilder b(sense(rng) ? Sense::Maximize : Sense::Minimize);
  for (int j = 0; j < n; ++j) {
    double lo = 0.0, hi = 1.0;
    switch (kind(rng)) {
      case 0: lo = -kInf; hi = kInf; break;
      case 1: lo = 0.0; hi = kInf; break;
      case 2: lo = -kInf; hi = static_cast<double>(rhs(rng)); break;
      default: {
        const double a = rhs(rng), w = std::abs(rhs(rng));
        lo = a;
        hi = a + w;
      }
    }
    b.add_variable(coef(rng), lo, hi);
  }
  for (int i = 0; i < m; ++i) {
    std::vector<LpBuilder::Term> terms;
    for (int j = 0; j < n; ++j) {
      const int c = coef(rng);
      if (c != 0) terms.emplace_back(j, c);
    }
    b.add_le(terms, rhs(rng));
  }
  return b.build();
}

/// Every square minor by cofactor expansion; the test-side TU oracle.
inline bool brute_force_tu(const IntMatrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  const std::size_t kmax = std::min(rows, cols);
  for (std::size_t k = 1; k <= kmax; ++k) {
    for (std::uint64_t rmask = 0; rmask < (std::uint64_t{1} << rows); ++rmask) {
      if (static_cast<std::size_t>(__builtin_popcountll(rmask)) != k) continue;
      std::vector<std::size_t> ri;
      for (std::size_t r = 0; r < rows; ++r)
        if (rmask >> r & 1) ri.push_back(r);
      for (std::uint64_t cmask = 0; cmask < (std::uint64_t{1} << cols); ++cmask) {
        if (static_cast<std::size_t>(__builtin_popcountll(cmask)) != k) continue;
        std::vector<std::size_t> ci;
        for (std::size_t c = 0; c < cols; ++c)
          if (cmask >> c & 1) ci.push_back(c);
        const auto d = cofactor_determinant(m.submatrix(ri, ci));
        if (d < -1 || d > 1) return false;
      }
    }
  }
  return true;
}

inline IntMatrix random_sign_matrix(std::mt19937_64& rng, std::size_t max_rows,
                                    std::size_t max_cols, double density = 0.5) {
  std::uniform_int_distribution<std::size_t> nr(1, max_rows), nc(1, max_cols);
  std::bernoulli_distribution nonzero(density), positive(0.5);
  IntMatrix m(nr(rng), nc(rng));
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (nonzero(rng)) m(r, c) = positive(rng) ? 1 : -1;
  return m;
}

struct StructureOptions {
  bool weighted = false;
  bool cover_all = false;  // every index in at least one group
  double density = 0.4;
};

inline GroupStructure random_structure(std::mt19937_64& rng, std::size_t p, std::size_t m,
                                       StructureOptions opt = {}) {
  std::bernoulli_distribution in(opt.density);
  std::uniform_int_distribution<std::size_t> any(0, p - 1), pick(0, m - 1);
  std::uniform_real_distribution<double> w(0.5, 3.0);
  std::vector<std::vector<std::size_t>> groups(m);
  std::vector<double> weights;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < p; ++j)
      if (in(rng)) groups[i].push_back(j);
    if (groups[i].empty()) groups[i].push_back(any(rng));
    weights.push_back(opt.weighted ? w(rng) : 1.0);
  }
  if (opt.cover_all)
    for (std::size_t j = 0; j < p; ++j) {
      bool covered = false;
      for (const auto& g : groups) covered = covered || std::find(g.begin(), g.end(), j) != g.end();
      if (!covered) groups[pick(rng)].push_back(j);
    }
  return GroupStructure(p, groups, weights);
}

/// Uniform random recursive tree: node v > 0 hangs below a node < v.
inline TreeStructure random_tree(std::mt19937_64& rng, std::size_t p) {
  std::vector<std::size_t> parent(p, TreeStructure::kNoParent);
  for (std::size_t v = 1; v < p; ++v) parent[v] = std::uniform_int_distribution<std::size_t>(0, v - 1)(rng);
  return TreeStructure(parent);
}

/// Random edges between a random bipartition of {0..p-1}.
inline std::vector<Edge> random_bipartite_edges(std::mt19937_64& rng, std::size_t p, double density = 0.5) {
  std::bernoulli_distribution side(0.5), keep(density);
  std::vector<int> part(p);
  for (auto& s : part) s = side(rng);
  std::vector<Edge> edges;
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = a + 1; b < p; ++b)
      if (part[a] != part[b] && keep(rng)) edges.emplace_back(a, b);
  if (edges.empty() && p >= 2) edges.emplace_back(0, 1);
  return edges;
}

/// Point of [-1,1]^p with some exact zeros and some entries at +-1.
inline Eigen::VectorXd random_box_point(std::mt19937_64& rng, std::size_t p) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> kind(0, 5);
  Eigen::VectorXd x(static_cast<Eigen::Index>(p));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const int k = kind(rng);
    x[i] = k == 0 ? 0.0 : k == 1 ? (u(rng) < 0 ? -1.0 : 1.0) : u(rng);
  }
  return x;
}

inline Eigen::VectorXd sign_vector(std::size_t p, std::uint64_t mask, std::uint64_t negative = 0) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < p; ++i)
    if (mask >> i & 1) x[static_cast<Eigen::Index>(i)] = (negative >> i & 1) ? -1.0 : 1.0;
  return x;
}

/// +inf-aware comparison: both infinite, or both finite and close.
inline bool same_value(const PenaltyValue& a, const PenaltyValue& b, double tol) {
  if (a.is_infinite() || b.is_infinite()) return a.is_infinite() == b.is_infinite();
  return std::abs(a.value() - b.value()) <= tol;
}

/// a <= b + tol with +inf above every real.
inline bool at_most(const PenaltyValue& a, const PenaltyValue& b, double tol) {
  if (b.is_infinite()) return true;
  if (a.is_infinite()) return false;
  return a.value() <= b.value() + tol;
}

}  // namespace tumod::testing_util

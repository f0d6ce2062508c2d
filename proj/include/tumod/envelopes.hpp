#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tumod/errors.hpp"
#include "tumod/groups.hpp"
#include "tumod/int_matrix.hpp"
#include "tumod/lp.hpp"
#include "tumod/penalties.hpp"
#include "tumod/tu.hpp"

namespace tumod {

/// Slack allowed on budget constraints B'|x| <= 1 in the closed forms; it
/// matches the LP feasibility tolerance so both paths agree on the boundary.
inline constexpr double kBudgetTolerance = 1e-9;

/// Linear model over beta = [w; s]: minimize d'w + e's subject to
/// M beta <= c with w binary (latent) and s the support indicator.
struct TuPenaltySpec {
  IntMatrix constraints;               // l x (latent_dim + ambient_dim)
  std::vector<std::int64_t> rhs;       // length l
  std::vector<double> latent_weights;  // d, length latent_dim
  std::vector<double> support_weights; // e, length ambient_dim
  std::size_t latent_dim = 0;
  std::size_t ambient_dim = 0;

  /// Optional matrix with the same TU status as `constraints` that is
  /// cheaper to certify (e.g. B for [-B, I]). verify() uses it when set.
  std::optional<IntMatrix> certificate;
  std::optional<TuVerdict> verdict;

  void validate() const {
    if (constraints.cols() != latent_dim + ambient_dim)
      throw DimensionError("TuPenaltySpec: constraint matrix has " + std::to_string(constraints.cols()) +
                           " columns, expected " + std::to_string(latent_dim + ambient_dim));
    if (rhs.size() != constraints.rows())
      throw DimensionError("TuPenaltySpec: right-hand side length differs from row count");
    if (latent_weights.size() != latent_dim || support_weights.size() != ambient_dim)
      throw DimensionError("TuPenaltySpec: weight vector lengths differ from dimensions");
  }

  /// Certifies the constraint matrix and records the verdict. Leaves the
  /// verdict empty when neither a sufficient condition nor the exhaustive
  /// test applies.
  const std::optional<TuVerdict>& verify() {
    validate();
    verdict = certify_totally_unimodular(certificate ? *certificate : constraints);
    return verdict;
  }

  bool certified_tu() const { return verdict && verdict->is_tu(); }
};

struct EnvelopeWitness {
  Eigen::VectorXd s;
  Eigen::VectorXd omega;
};

struct EnvelopeValue {
  PenaltyValue value;
  std::optional<EnvelopeWitness> witness;
  /// TU verdict of the model's constraint matrix; empty if not certified.
  /// Only a TU verdict makes the value the convex envelope; otherwise it is
  /// a convex lower bound.
  std::optional<TuVerdict> tu;

  bool is_envelope() const { return tu && tu->is_tu(); }
};

namespace detail {

inline bool in_unit_box(const Eigen::VectorXd& x) {
  return x.size() == 0 || x.cwiseAbs().maxCoeff() <= 1.0;
}

inline IntMatrix zero_padded_left(const IntMatrix& m, std::size_t extra) {
  return concat_cols(IntMatrix(m.rows(), extra), m);
}

}  // namespace detail

/// The generic convex relaxation: min d'w + e's s.t. M[w; s] <= c,
/// |x| <= s, w and s in [0,1]. Exact envelope when M is TU.
inline EnvelopeValue tu_envelope_lp(const TuPenaltySpec& spec, const Eigen::VectorXd& x,
                                    const SimplexOptions& opt = {}) {
  spec.validate();
  detail::check_length(x, spec.ambient_dim, "tu_envelope_lp");
  EnvelopeValue out;
  out.tu = spec.verdict;
  if (!detail::in_unit_box(x)) {
    out.value = PenaltyValue::infinity();
    return out;
  }
  LpBuilder b(Sense::Minimize);
  const std::size_t m = spec.latent_dim;
  for (std::size_t i = 0; i < m; ++i) b.add_variable(spec.latent_weights[i], 0.0, 1.0);
  for (std::size_t j = 0; j < spec.ambient_dim; ++j)
    b.add_variable(spec.support_weights[j], std::abs(x[static_cast<Eigen::Index>(j)]), 1.0);
  for (std::size_t r = 0; r < spec.constraints.rows(); ++r) {
    std::vector<LpBuilder::Term> terms;
    for (std::size_t c = 0; c < spec.constraints.cols(); ++c)
      if (spec.constraints(r, c) != 0) terms.emplace_back(c, static_cast<double>(spec.constraints(r, c)));
    b.add_le(std::move(terms), static_cast<double>(spec.rhs[r]));
  }
  const LpSolution sol = solve_lp(b.build(), opt);
  if (sol.status != LpStatus::Optimal) {
    out.value = PenaltyValue::infinity();
    return out;
  }
  out.value = PenaltyValue::finite(sol.value);
  const auto mi = static_cast<Eigen::Index>(m);
  out.witness = EnvelopeWitness{sol.point.tail(static_cast<Eigen::Index>(spec.ambient_dim)),
                                sol.point.head(mi)};
  return out;
}

// --- encodings of the models as TuPenaltySpec ---

/// s_j <= w_i for every j in G_i; cost d'w.
inline TuPenaltySpec intersection_spec(const GroupStructure& g) {
  TuPenaltySpec spec;
  spec.constraints = intersection_constraint_matrix(g);
  spec.rhs.assign(spec.constraints.rows(), 0);
  spec.latent_weights = g.weights();
  spec.support_weights.assign(g.p(), 0.0);
  spec.latent_dim = g.num_groups();
  spec.ambient_dim = g.p();
  return spec;
}

/// [-B, I] beta <= 0, i.e. B w >= s; cost d'w.
inline TuPenaltySpec latent_group_spec(const GroupStructure& g) {
  TuPenaltySpec spec;
  const IntMatrix b = biadjacency(g);
  spec.constraints = concat_cols(negate(b), IntMatrix::identity(g.p()));
  spec.rhs.assign(g.p(), 0);
  spec.latent_weights = g.weights();
  spec.support_weights.assign(g.p(), 0.0);
  spec.latent_dim = g.num_groups();
  spec.ambient_dim = g.p();
  spec.certificate = b;
  return spec;
}

/// -T s <= 0 (every node at most its parent); cost 1's. No latent variables.
inline TuPenaltySpec tree_spec(const TreeStructure& t) {
  TuPenaltySpec spec;
  spec.constraints = negate(tree_incidence(t));
  spec.rhs.assign(spec.constraints.rows(), 0);
  spec.support_weights.assign(t.size(), 1.0);
  spec.ambient_dim = t.size();
  return spec;
}

/// Scalar latent w with B's <= w 1, i.e. [-1 | B'] beta <= 0; cost w.
/// The budget B's <= 1 follows from w <= 1.
inline TuPenaltySpec knapsack_spec(const GroupStructure& g) {
  TuPenaltySpec spec;
  spec.constraints = concat_cols(IntMatrix(g.num_groups(), 1, -1), biadjacency(g).transpose());
  spec.rhs.assign(g.num_groups(), 0);
  spec.latent_weights = {1.0};
  spec.support_weights.assign(g.p(), 0.0);
  spec.latent_dim = 1;
  spec.ambient_dim = g.p();
  return spec;
}

/// B' s <= 1; cost 1's.
inline TuPenaltySpec dispersive_spec(const IntMatrix& bT) {
  TuPenaltySpec spec;
  spec.constraints = bT;
  spec.rhs.assign(bT.rows(), 1);
  spec.support_weights.assign(bT.cols(), 1.0);
  spec.ambient_dim = bT.cols();
  return spec;
}

/// One latent z_e per edge with s_i + s_j - z_e <= 1; cost 1'z.
inline TuPenaltySpec pairwise_spec(std::size_t p, const std::vector<Edge>& edges) {
  validate_edges(p, edges, "pairwise_spec");
  TuPenaltySpec spec;
  const IntMatrix eg = graph_incidence(p, edges);
  spec.constraints = concat_cols(negate(IntMatrix::identity(edges.size())), eg);
  spec.rhs.assign(edges.size(), 1);
  spec.latent_weights.assign(edges.size(), 1.0);
  spec.support_weights.assign(p, 0.0);
  spec.latent_dim = edges.size();
  spec.ambient_dim = p;
  spec.certificate = eg;
  return spec;
}

/// B w >= s and 1'w <= G; cost 1's. TU exactly when [B; 1'] is.
inline TuPenaltySpec sparse_g_cover_spec(const GroupStructure& g, std::size_t max_groups) {
  TuPenaltySpec spec;
  const IntMatrix b = biadjacency(g);
  const IntMatrix cover = concat_cols(negate(b), IntMatrix::identity(g.p()));
  IntMatrix budget(1, g.num_groups() + g.p());
  for (std::size_t i = 0; i < g.num_groups(); ++i) budget(0, i) = 1;
  spec.constraints = concat_rows(cover, budget);
  spec.rhs.assign(g.p(), 0);
  spec.rhs.push_back(static_cast<std::int64_t>(max_groups));
  spec.latent_weights.assign(g.num_groups(), 0.0);
  spec.support_weights.assign(g.p(), 1.0);
  spec.latent_dim = g.num_groups();
  spec.ambient_dim = g.p();
  spec.certificate = tu_preserving(b, TuOp::AppendUnitRow);
  return spec;
}

/// Latent [w; z] with one z per (group, member) pair, the structural rows
/// of the chosen variant, and hinge rows w_i + s_j - z_ij <= 1; cost 1'z.
/// Never TU (the structural and hinge rows together contain a -2 minor).
inline TuPenaltySpec within_group_spec(const GroupStructure& g, WithinGroupVariant variant) {
  const std::size_t m = g.num_groups(), p = g.p(), ne = g.num_memberships();
  TuPenaltySpec spec;
  // structural rows over [w; s], then z columns inserted between
  const IntMatrix structural = variant == WithinGroupVariant::Intersection
                                   ? intersection_constraint_matrix(g)
                                   : concat_cols(negate(biadjacency(g)), IntMatrix::identity(p));
  const IntMatrix hinge = bipartite_incidence(g);
  IntMatrix mat(structural.rows() + ne, m + ne + p);
  for (std::size_t r = 0; r < structural.rows(); ++r) {
    for (std::size_t c = 0; c < m; ++c) mat(r, c) = structural(r, c);
    for (std::size_t c = 0; c < p; ++c) mat(r, m + ne + c) = structural(r, m + c);
  }
  for (std::size_t e = 0; e < ne; ++e) {
    const std::size_t r = structural.rows() + e;
    for (std::size_t c = 0; c < m; ++c) mat(r, c) = hinge(e, c);
    mat(r, m + e) = -1;
    for (std::size_t c = 0; c < p; ++c) mat(r, m + ne + c) = hinge(e, m + c);
  }
  spec.constraints = std::move(mat);
  spec.rhs.assign(structural.rows(), 0);
  spec.rhs.insert(spec.rhs.end(), ne, 1);
  spec.latent_weights.assign(m, 0.0);
  spec.latent_weights.insert(spec.latent_weights.end(), ne, 1.0);
  spec.support_weights.assign(p, 0.0);
  spec.latent_dim = m + ne;
  spec.ambient_dim = p;
  // the structure-plus-incidence stack carries the TU status
  spec.certificate = concat_rows(structural, hinge);
  return spec;
}

// --- closed forms and model-specific LPs ---

/// sum_i d_i ||x_{G_i}||_inf on the unit box, +inf outside.
inline PenaltyValue group_intersection_envelope(const Eigen::VectorXd& x, const GroupStructure& g) {
  detail::check_length(x, g.p(), "group_intersection_envelope");
  if (!detail::in_unit_box(x)) return PenaltyValue::infinity();
  double total = 0.0;
  for (std::size_t k = 0; k < g.num_groups(); ++k) {
    double mx = 0.0;
    for (auto j : g.group(k)) mx = std::max(mx, std::abs(x[static_cast<Eigen::Index>(j)]));
    total += g.weights()[k] * mx;
  }
  return PenaltyValue::finite(total);
}

/// min d'w s.t. B w >= |x|, w in [0,1]^M.
inline EnvelopeValue latent_group_envelope(const Eigen::VectorXd& x, const GroupStructure& g) {
  auto spec = latent_group_spec(g);
  spec.verify();
  return tu_envelope_lp(spec, x);
}

/// Relaxation of the within-group sparsity penalty. A lower bound on its
/// envelope, not the envelope itself.
inline PenaltyValue sparse_group_surrogate(const Eigen::VectorXd& x, const GroupStructure& g,
                                           WithinGroupVariant variant) {
  detail::check_length(x, g.p(), "sparse_group_surrogate");
  if (!detail::in_unit_box(x)) return PenaltyValue::infinity();
  const Eigen::VectorXd ax = x.cwiseAbs();
  if (variant == WithinGroupVariant::Intersection) {
    double total = 0.0;
    for (std::size_t k = 0; k < g.num_groups(); ++k) {
      double mx = 0.0;
      for (auto j : g.group(k)) mx = std::max(mx, ax[static_cast<Eigen::Index>(j)]);
      for (auto j : g.group(k)) total += std::max(0.0, mx + ax[static_cast<Eigen::Index>(j)] - 1.0);
    }
    return PenaltyValue::finite(total);
  }
  // min sum z_ij  s.t.  z_ij >= w_i + |x_j| - 1,  B w >= |x|,  w in [0,1], z >= 0
  LpBuilder b(Sense::Minimize);
  const std::size_t m = g.num_groups();
  b.add_variables(m, 0.0, 0.0, 1.0);
  for (std::size_t k = 0; k < m; ++k)
    for (auto j : g.group(k)) {
      const auto z = b.add_variable(1.0, 0.0, kInf);
      b.add_le({{k, 1.0}, {z, -1.0}}, 1.0 - ax[static_cast<Eigen::Index>(j)]);
    }
  for (std::size_t j = 0; j < g.p(); ++j) {
    std::vector<LpBuilder::Term> terms;
    for (std::size_t k = 0; k < m; ++k)
      if (g.contains(k, j)) terms.emplace_back(k, 1.0);
    const double need = ax[static_cast<Eigen::Index>(j)];
    if (terms.empty()) {
      if (need > kZeroThreshold) return PenaltyValue::infinity();
      continue;
    }
    b.add_ge(std::move(terms), need);
  }
  const auto sol = solve_lp(b.build());
  return sol.optimal() ? PenaltyValue::finite(sol.value) : PenaltyValue::infinity();
}

/// ||x||_1 when |x| has a fractional cover using total group mass <= G.
inline EnvelopeValue sparse_g_cover_envelope(const Eigen::VectorXd& x, const GroupStructure& g,
                                             std::size_t max_groups) {
  auto spec = sparse_g_cover_spec(g, max_groups);
  spec.verify();
  return tu_envelope_lp(spec, x);
}

/// sum over node-plus-descendant groups of ||x_G||_inf on the unit box.
inline PenaltyValue tree_envelope(const Eigen::VectorXd& x, const TreeStructure& t) {
  detail::check_length(x, t.size(), "tree_envelope");
  return group_intersection_envelope(x, hierarchy_groups(t));
}

namespace detail {

/// B'|x| row by row, or nothing if x is outside the box or over budget.
inline std::optional<Eigen::VectorXd> budget_loads(const Eigen::VectorXd& x, const IntMatrix& bT) {
  if (!in_unit_box(x)) return std::nullopt;
  Eigen::VectorXd load = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(bT.rows()));
  for (std::size_t r = 0; r < bT.rows(); ++r) {
    for (std::size_t c = 0; c < bT.cols(); ++c)
      load[static_cast<Eigen::Index>(r)] +=
          static_cast<double>(bT(r, c)) * std::abs(x[static_cast<Eigen::Index>(c)]);
    if (load[static_cast<Eigen::Index>(r)] > 1.0 + kBudgetTolerance) return std::nullopt;
  }
  return load;
}

}  // namespace detail

/// ||B'|x|||_inf when B'|x| <= 1 on the unit box, +inf otherwise.
inline PenaltyValue knapsack_envelope(const Eigen::VectorXd& x, const IntMatrix& bT) {
  detail::check_length(x, bT.cols(), "knapsack_envelope");
  const auto load = detail::budget_loads(x, bT);
  if (!load) return PenaltyValue::infinity();
  return PenaltyValue::finite(load->size() ? std::min(1.0, load->maxCoeff()) : 0.0);
}

/// ||x||_1 when B'|x| <= 1 on the unit box, +inf otherwise.
inline PenaltyValue dispersive_l0_envelope(const Eigen::VectorXd& x, const IntMatrix& bT) {
  detail::check_length(x, bT.cols(), "dispersive_l0_envelope");
  if (!detail::budget_loads(x, bT)) return PenaltyValue::infinity();
  return PenaltyValue::finite(x.cwiseAbs().sum());
}

/// sum over edges of (|x_i| + |x_j| - 1)_+ on the unit box.
inline PenaltyValue pairwise_dispersive_envelope(const Eigen::VectorXd& x, const std::vector<Edge>& edges) {
  validate_edges(static_cast<std::size_t>(x.size()), edges, "pairwise_dispersive_envelope");
  if (!detail::in_unit_box(x)) return PenaltyValue::infinity();
  double total = 0.0;
  for (const auto& [a, b] : edges)
    total += std::max(0.0, std::abs(x[static_cast<Eigen::Index>(a)]) +
                               std::abs(x[static_cast<Eigen::Index>(b)]) - 1.0);
  return PenaltyValue::finite(total);
}

}  // namespace tumod

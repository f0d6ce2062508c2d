#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <vector>

#include "tumod/errors.hpp"
#include "tumod/lp.hpp"

namespace tumod {

inline constexpr std::size_t kVertexEnumerationMaxVars = 10;

namespace detail {

struct VertexSearch {
  const LpProblem& p;
  Eigen::VectorXd lo, hi;
  double tol = 1e-9;

  bool found = false;
  double best = 0.0;
  Eigen::VectorXd best_point;

  // per-variable choice: 0 free, 1 at lower, 2 at upper
  std::vector<int> choice;
  std::vector<std::size_t> rows;

  void consider(const Eigen::VectorXd& v) {
    if (p.num_constraints() > 0) {
      const Eigen::VectorXd r = p.A * v - p.b;
      if (r.maxCoeff() > tol * (1.0 + p.b.cwiseAbs().maxCoeff())) return;
    }
    for (Eigen::Index j = 0; j < v.size(); ++j)
      if (v[j] < lo[j] - tol || v[j] > hi[j] + tol) return;
    const double val = p.evaluate(v);
    const bool better = !found || (p.sense == Sense::Minimize ? val < best : val > best);
    if (better) {
      found = true;
      best = val;
      best_point = v;
    }
  }

  void solve_active_set() {
    const auto n = static_cast<Eigen::Index>(p.num_vars());
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Index> free;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (choice[j] == 1) v[j] = lo[j];
      else if (choice[j] == 2) v[j] = hi[j];
      else free.push_back(j);
    }
    if (free.empty()) {
      consider(v);
      return;
    }
    const auto k = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd sys(k, k);
    Eigen::VectorXd rhs(k);
    for (Eigen::Index r = 0; r < k; ++r) {
      const auto row = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)]);
      rhs[r] = p.b[row] - p.A.row(row).dot(v);
      for (Eigen::Index c = 0; c < k; ++c) sys(r, c) = p.A(row, free[static_cast<std::size_t>(c)]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sys);
    lu.setThreshold(1e-10);
    if (lu.rank() < k) return;
    const Eigen::VectorXd sol = lu.solve(rhs);
    for (Eigen::Index c = 0; c < k; ++c) v[free[static_cast<std::size_t>(c)]] = sol[c];
    consider(v);
  }

  void choose_rows(std::size_t start, std::size_t need) {
    if (need == 0) {
      solve_active_set();
      return;
    }
    for (std::size_t r = start; r + need <= p.num_constraints(); ++r) {
      rows.push_back(r);
      choose_rows(r + 1, need - 1);
      rows.pop_back();
    }
  }

  void choose_bounds(std::size_t var, std::size_t active) {
    const std::size_t n = p.num_vars();
    if (var == n) {
      const std::size_t need = n - active;
      if (need <= p.num_constraints()) choose_rows(0, need);
      return;
    }
    const auto j = static_cast<Eigen::Index>(var);
    choice[var] = 0;
    choose_bounds(var + 1, active);
    choice[var] = 1;
    choose_bounds(var + 1, active + 1);
    if (hi[j] > lo[j]) {
      choice[var] = 2;
      choose_bounds(var + 1, active + 1);
    }
    choice[var] = 0;
  }
};

inline VertexSearch search_truncated(const LpProblem& p, double radius) {
  VertexSearch s{p, p.lower.cwiseMax(-radius), p.upper.cwiseMin(radius), 1e-9, false, 0.0, {}, {},
                 {}};
  s.choice.assign(p.num_vars(), 0);
  s.choose_bounds(0, 0);
  return s;
}

}  // namespace detail

/// Exact LP optimum by enumerating every active set of rows and variable
/// bounds. Intended as a definitional cross-check for solve_lp on tiny LPs.
///
/// The feasible set is intersected with the box [-R, R]^n so that it always
/// has vertices; the problem is declared unbounded when doubling R changes
/// the optimum.
inline LpSolution enumerate_vertices_optimum(const LpProblem& p, double radius = 1e6) {
  p.validate();
  if (p.num_vars() > kVertexEnumerationMaxVars)
    throw SizeError("enumerate_vertices_optimum: at most " +
                    std::to_string(kVertexEnumerationMaxVars) + " variables supported");
  LpSolution sol;
  const auto near = detail::search_truncated(p, radius);
  if (!near.found) {
    sol.status = LpStatus::Infeasible;
    return sol;
  }
  const auto far = detail::search_truncated(p, 2.0 * radius);
  if (std::abs(far.best - near.best) > 1e-6 * (1.0 + std::abs(near.best))) {
    sol.status = LpStatus::Unbounded;
    return sol;
  }
  sol.status = LpStatus::Optimal;
  sol.value = near.best;
  sol.point = near.best_point;
  return sol;
}

}  // namespace tumod

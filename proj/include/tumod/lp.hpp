#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iomanip>
#include <locale>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "tumod/errors.hpp"

namespace tumod {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { Minimize, Maximize };
enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
  }
  return "unknown";
}

/// Dense LP in inequality form:  opt c'v  s.t.  A v <= b,  lower <= v <= upper.
/// Bounds may be infinite.
struct LpProblem {
  Sense sense = Sense::Minimize;
  Eigen::VectorXd objective;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  std::size_t num_vars() const { return static_cast<std::size_t>(objective.size()); }
  std::size_t num_constraints() const { return static_cast<std::size_t>(b.size()); }

  void validate() const {
    const auto n = objective.size();
    if (A.cols() != n && !(A.rows() == 0))
      throw DimensionError("LpProblem: A has " + std::to_string(A.cols()) + " columns, expected " +
                           std::to_string(n));
    if (A.rows() != b.size()) throw DimensionError("LpProblem: A rows and b length differ");
    if (lower.size() != n || upper.size() != n)
      throw DimensionError("LpProblem: bound vectors must match the variable count");
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j])
        throw DimensionError("LpProblem: lower bound exceeds upper bound for variable " +
                             std::to_string(j));
      if (lower[j] == kInf || upper[j] == -kInf)
        throw DimensionError("LpProblem: empty bound interval for variable " + std::to_string(j));
    }
  }

  /// Objective value c'v.
  double evaluate(const Eigen::VectorXd& v) const { return objective.dot(v); }

  /// Largest violation of any row or bound at v (0 when feasible).
  double max_violation(const Eigen::VectorXd& v) const {
    double worst = 0.0;
    if (A.rows() > 0) {
      const Eigen::VectorXd r = A * v - b;
      if (r.size() > 0) worst = std::max(worst, r.maxCoeff());
    }
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      worst = std::max(worst, lower[j] - v[j]);
      worst = std::max(worst, v[j] - upper[j]);
    }
    return worst;
  }
};

/// The point is present only when status == Optimal.
struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double value = 0.0;
  Eigen::VectorXd point;
  /// Simplex iterations (pivots and bound flips) over both phases.
  std::size_t iterations = 0;

  bool optimal() const { return status == LpStatus::Optimal; }
};

/// Assembles an LpProblem row by row from sparse (index, coefficient) terms.
class LpBuilder {
 public:
  using Term = std::pair<std::size_t, double>;

  explicit LpBuilder(Sense sense = Sense::Minimize) : sense_(sense) {}

  /// Returns the index of the first of `count` new variables.
  std::size_t add_variables(std::size_t count, double cost, double lo, double hi) {
    const std::size_t first = cost_.size();
    for (std::size_t k = 0; k < count; ++k) {
      cost_.push_back(cost);
      lo_.push_back(lo);
      hi_.push_back(hi);
    }
    return first;
  }
  std::size_t add_variable(double cost, double lo, double hi) {
    return add_variables(1, cost, lo, hi);
  }

  void set_cost(std::size_t var, double cost) { cost_.at(var) = cost; }
  void set_bounds(std::size_t var, double lo, double hi) {
    lo_.at(var) = lo;
    hi_.at(var) = hi;
  }

  /// sum(coef * v[idx]) <= rhs
  void add_le(std::vector<Term> terms, double rhs) {
    rows_.push_back(std::move(terms));
    rhs_.push_back(rhs);
  }
  /// sum(coef * v[idx]) >= rhs
  void add_ge(std::vector<Term> terms, double rhs) {
    for (auto& t : terms) t.second = -t.second;
    add_le(std::move(terms), -rhs);
  }

  std::size_t num_vars() const { return cost_.size(); }
  std::size_t num_rows() const { return rows_.size(); }

  LpProblem build() const {
    LpProblem p;
    p.sense = sense_;
    const auto n = static_cast<Eigen::Index>(cost_.size());
    const auto m = static_cast<Eigen::Index>(rows_.size());
    p.objective = Eigen::Map<const Eigen::VectorXd>(cost_.data(), n);
    p.lower = Eigen::Map<const Eigen::VectorXd>(lo_.data(), n);
    p.upper = Eigen::Map<const Eigen::VectorXd>(hi_.data(), n);
    p.A = Eigen::MatrixXd::Zero(m, n);
    p.b = Eigen::Map<const Eigen::VectorXd>(rhs_.data(), m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (const auto& [j, coef] : rows_[static_cast<std::size_t>(i)]) {
        if (j >= cost_.size()) throw DimensionError("LpBuilder: term references unknown variable");
        p.A(i, static_cast<Eigen::Index>(j)) += coef;
      }
    return p;
  }

 private:
  Sense sense_;
  std::vector<double> cost_, lo_, hi_;
  std::vector<std::vector<Term>> rows_;
  std::vector<double> rhs_;
};

enum class PivotRule {
  /// Lowest-index entering and leaving variable; never cycles.
  Bland,
  /// Most negative reduced cost (lowest index on ties); falls back to Bland
  /// after a run of degenerate pivots.
  Dantzig,
  /// Largest reduced cost per unit edge length, with exact edge norms from
  /// the dense tableau. No Bland fallback: on highly degenerate problems
  /// (sparse recovery at exact reconstruction) Bland stalls for tens of
  /// thousands of pivots. The iteration cap still bounds the run.
  SteepestEdge,
};

struct SimplexOptions {
  PivotRule rule = PivotRule::Bland;
  /// 0 selects the default cap 50 * (#vars + #constraints).
  std::size_t max_iterations = 0;
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;
  /// Recompute the tableau from the original data every this many pivots.
  std::size_t refactor_period = 100;
};

namespace detail {

/// Bounded-variable primal simplex on a dense tableau.
///
/// Works on the standard form  [A' | I_slack | I_art] y = b',  0 <= y <= ub,
/// where every column has lower bound zero. Nonbasic columns sit at either
/// bound; basic values are kept in `xb`.
class BoundedSimplex {
 public:
  BoundedSimplex(const LpProblem& p, const SimplexOptions& opt) : opt_(opt) {
    p.validate();
    m_ = p.b.size();
    build_standard_form(p);
    cap_ = opt_.max_iterations ? opt_.max_iterations : 50 * (p.num_vars() + p.num_constraints());
  }

  LpSolution run(const LpProblem& p) {
    LpSolution sol = run_phases(p);
    sol.iterations = iterations_;
    return sol;
  }

 private:
  LpSolution run_phases(const LpProblem& p) {
    LpSolution sol;
    if (num_art_ > 0) {
      Eigen::VectorXd c1 = Eigen::VectorXd::Zero(ncols_);
      c1.tail(num_art_).setOnes();
      set_costs(c1);
      iterate(/*phase_one=*/true);
      refactor();
      double infeas = 0.0;
      for (Eigen::Index i = 0; i < m_; ++i)
        if (is_art(basis_[i])) infeas += std::max(0.0, xb_[i]);
      for (Eigen::Index k = first_art_; k < ncols_; ++k)
        if (!basic_[k] && at_upper_[k]) infeas += ub_[k];
      if (infeas > opt_.feasibility_tol * std::max(1.0, bscale_)) {
        sol.status = LpStatus::Infeasible;
        return sol;
      }
      drive_out_artificials();
    }
    set_costs(phase_two_costs_);
    if (!iterate(/*phase_one=*/false)) {
      sol.status = LpStatus::Unbounded;
      return sol;
    }
    refactor();
    sol.status = LpStatus::Optimal;
    sol.point = recover_point(p);
    sol.value = p.evaluate(sol.point);
    return sol;
  }

  enum class Map { Shift, Reflect, SplitPos, SplitNeg };
  struct Column {
    Eigen::Index var;
    Map map;
  };

  void build_standard_form(const LpProblem& p) {
    const auto n = static_cast<Eigen::Index>(p.num_vars());
    std::vector<Column> cols;
    std::vector<double> ub;
    Eigen::VectorXd shift_b = p.b;
    std::vector<double> cost;
    const double sgn = p.sense == Sense::Maximize ? -1.0 : 1.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double lo = p.lower[j], hi = p.upper[j], c = sgn * p.objective[j];
      if (std::isfinite(lo)) {
        cols.push_back({j, Map::Shift});
        ub.push_back(hi - lo);
        cost.push_back(c);
        if (m_ > 0) shift_b -= p.A.col(j) * lo;
      } else if (std::isfinite(hi)) {
        cols.push_back({j, Map::Reflect});
        ub.push_back(kInf);
        cost.push_back(-c);
        if (m_ > 0) shift_b -= p.A.col(j) * hi;
      } else {
        cols.push_back({j, Map::SplitPos});
        ub.push_back(kInf);
        cost.push_back(c);
        cols.push_back({j, Map::SplitNeg});
        ub.push_back(kInf);
        cost.push_back(-c);
      }
    }
    columns_ = cols;
    const auto ny = static_cast<Eigen::Index>(cols.size());
    std::vector<Eigen::Index> negative_rows;
    for (Eigen::Index i = 0; i < m_; ++i)
      if (shift_b[i] < 0) negative_rows.push_back(i);
    num_art_ = static_cast<Eigen::Index>(negative_rows.size());
    first_slack_ = ny;
    first_art_ = ny + m_;
    ncols_ = ny + m_ + num_art_;

    a0_ = Eigen::MatrixXd::Zero(m_, ncols_);
    b0_ = shift_b;
    for (Eigen::Index k = 0; k < ny; ++k) {
      const auto& col = cols[static_cast<std::size_t>(k)];
      const double s = (col.map == Map::Shift || col.map == Map::SplitPos) ? 1.0 : -1.0;
      if (m_ > 0) a0_.col(k) = s * p.A.col(col.var);
    }
    for (Eigen::Index i = 0; i < m_; ++i) a0_(i, first_slack_ + i) = 1.0;
    basis_.assign(static_cast<std::size_t>(m_), 0);
    for (Eigen::Index i = 0; i < m_; ++i) basis_[i] = first_slack_ + i;
    for (Eigen::Index a = 0; a < num_art_; ++a) {
      const Eigen::Index i = negative_rows[static_cast<std::size_t>(a)];
      a0_.row(i) *= -1.0;
      b0_[i] *= -1.0;
      a0_(i, first_art_ + a) = 1.0;
      basis_[i] = first_art_ + a;
    }
    ub_.assign(static_cast<std::size_t>(ncols_), kInf);
    for (Eigen::Index k = 0; k < ny; ++k) ub_[k] = ub[static_cast<std::size_t>(k)];
    phase_two_costs_ = Eigen::VectorXd::Zero(ncols_);
    for (Eigen::Index k = 0; k < ny; ++k) phase_two_costs_[k] = cost[static_cast<std::size_t>(k)];

    basic_.assign(static_cast<std::size_t>(ncols_), false);
    at_upper_.assign(static_cast<std::size_t>(ncols_), false);
    banned_.assign(static_cast<std::size_t>(ncols_), false);
    for (auto k : basis_) basic_[k] = true;
    bscale_ = m_ > 0 ? b0_.cwiseAbs().maxCoeff() : 0.0;
    tableau_ = a0_;
    xb_ = b0_;
  }

  bool is_art(Eigen::Index k) const { return k >= first_art_; }

  void set_costs(const Eigen::VectorXd& c) {
    cost_ = c;
    recompute_reduced_costs();
  }

  void recompute_reduced_costs() {
    Eigen::VectorXd cb(m_);
    for (Eigen::Index i = 0; i < m_; ++i) cb[i] = cost_[basis_[i]];
    d_ = cost_;
    if (m_ > 0) d_.noalias() -= tableau_.transpose() * cb;
    for (auto k : basis_) d_[k] = 0.0;
  }

  /// Rebuilds tableau, basic values and reduced costs from the original data.
  void refactor() {
    if (m_ == 0) {
      recompute_reduced_costs();
      return;
    }
    Eigen::MatrixXd bmat(m_, m_);
    for (Eigen::Index i = 0; i < m_; ++i) bmat.col(i) = a0_.col(basis_[i]);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(bmat);
    tableau_ = lu.solve(a0_);
    Eigen::VectorXd rhs = b0_;
    for (Eigen::Index k = 0; k < ncols_; ++k)
      if (!basic_[k] && at_upper_[k]) rhs -= a0_.col(k) * ub_[k];
    xb_ = lu.solve(rhs);
    for (Eigen::Index i = 0; i < m_; ++i) tableau_.col(basis_[i]) = Eigen::VectorXd::Unit(m_, i);
    recompute_reduced_costs();
  }

  Eigen::Index choose_entering(bool bland) {
    Eigen::Index best = -1;
    double best_score = 0.0;
    const bool steepest = !bland && opt_.rule == PivotRule::SteepestEdge;
    if (steepest) edge_norms_ = tableau_.colwise().squaredNorm().transpose();
    for (Eigen::Index k = 0; k < ncols_; ++k) {
      if (basic_[k] || banned_[k]) continue;
      const double dk = d_[k];
      bool eligible = false;
      if (!at_upper_[k])
        eligible = dk < -opt_.optimality_tol && ub_[k] > 0.0;
      else
        eligible = dk > opt_.optimality_tol;
      if (!eligible) continue;
      if (bland) return k;
      const double score = steepest ? dk * dk / (1.0 + edge_norms_[k]) : std::abs(dk);
      if (score > best_score) {
        best_score = score;
        best = k;
      }
    }
    return best;
  }

  /// Returns false when the objective is unbounded below.
  bool iterate(bool phase_one) {
    std::size_t since_refactor = 0;
    std::size_t degenerate_run = 0;
    while (true) {
      if (iterations_++ > cap_)
        throw NumericalError("solve_lp: iteration cap of " + std::to_string(cap_) + " exceeded");
      const bool bland = opt_.rule == PivotRule::Bland ||
                         (opt_.rule == PivotRule::Dantzig && degenerate_run > 50);
      const Eigen::Index q = choose_entering(bland);
      if (q < 0) return true;
      const double dir = at_upper_[q] ? -1.0 : 1.0;

      double theta = ub_[q];
      Eigen::Index leave = -1;
      bool leave_to_upper = false;
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double alpha = dir * tableau_(i, q);
        double t;
        bool to_upper;
        if (alpha > opt_.pivot_tol) {
          t = std::max(0.0, xb_[i]) / alpha;
          to_upper = false;
        } else if (alpha < -opt_.pivot_tol && std::isfinite(ub_[basis_[i]])) {
          t = std::max(0.0, ub_[basis_[i]] - xb_[i]) / -alpha;
          to_upper = true;
        } else {
          continue;
        }
        // Ties between rows go to the lowest basic index; a tie with the
        // entering bound flip keeps the flip.
        const double slack = 1e-12 * std::max(1.0, std::isfinite(theta) ? std::abs(theta) : 1.0);
        const bool take = leave < 0 ? t < theta
                                    : (t < theta - slack ||
                                       (t <= theta + slack && basis_[i] < basis_[leave]));
        if (take) {
          theta = t;
          leave = i;
          leave_to_upper = to_upper;
        }
      }
      if (!std::isfinite(theta)) {
        if (phase_one) throw NumericalError("solve_lp: phase one reported an unbounded ray");
        return false;
      }
      degenerate_run = theta <= opt_.feasibility_tol ? degenerate_run + 1 : 0;

      if (m_ > 0) xb_.noalias() -= (dir * theta) * tableau_.col(q);
      if (leave < 0) {
        at_upper_[q] = !at_upper_[q];
        continue;
      }
      const double entering_value = at_upper_[q] ? ub_[q] - theta : theta;
      const Eigen::Index out = basis_[leave];
      basic_[out] = false;
      at_upper_[out] = leave_to_upper;
      basic_[q] = true;
      at_upper_[q] = false;
      basis_[leave] = q;
      xb_[leave] = entering_value;
      pivot(leave, q);
      if (++since_refactor >= opt_.refactor_period) {
        refactor();
        since_refactor = 0;
      }
    }
  }

  void pivot(Eigen::Index r, Eigen::Index q) {
    const double piv = tableau_(r, q);
    Eigen::RowVectorXd prow = tableau_.row(r) / piv;
    Eigen::VectorXd pcol = tableau_.col(q);
    pcol[r] = 0.0;
    tableau_.noalias() -= pcol * prow;
    tableau_.row(r) = prow;
    const double dq = d_[q];
    d_.noalias() -= dq * prow.transpose();
    d_[q] = 0.0;
  }

  void drive_out_artificials() {
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (!is_art(basis_[i])) continue;
      Eigen::Index q = -1;
      for (Eigen::Index k = 0; k < first_art_; ++k)
        if (!basic_[k] && std::abs(tableau_(i, k)) > 1e-7) {
          q = k;
          break;
        }
      if (q < 0) continue;  // redundant row: the artificial stays basic at zero
      const Eigen::Index out = basis_[i];
      const double value = at_upper_[q] ? ub_[q] : 0.0;
      basic_[out] = false;
      at_upper_[out] = false;
      basic_[q] = true;
      at_upper_[q] = false;
      basis_[i] = q;
      xb_[i] = value;
      pivot(i, q);
    }
    for (Eigen::Index k = first_art_; k < ncols_; ++k) {
      banned_[k] = true;
      ub_[k] = 0.0;
    }
    refactor();
  }

  Eigen::VectorXd recover_point(const LpProblem& p) const {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(ncols_);
    for (Eigen::Index k = 0; k < ncols_; ++k)
      if (!basic_[k] && at_upper_[k]) y[k] = ub_[k];
    for (Eigen::Index i = 0; i < m_; ++i) y[basis_[i]] = xb_[i];
    Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p.num_vars()));
    for (Eigen::Index k = 0; k < first_slack_; ++k) {
      const auto& col = columns_[static_cast<std::size_t>(k)];
      const double yk = std::clamp(y[k], 0.0, ub_[k]);
      switch (col.map) {
        case Map::Shift: v[col.var] = p.lower[col.var] + yk; break;
        case Map::Reflect: v[col.var] = p.upper[col.var] - yk; break;
        case Map::SplitPos: v[col.var] += yk; break;
        case Map::SplitNeg: v[col.var] -= yk; break;
      }
    }
    return v;
  }

  SimplexOptions opt_;
  Eigen::Index m_ = 0;
  Eigen::Index ncols_ = 0, first_slack_ = 0, first_art_ = 0, num_art_ = 0;
  std::vector<Column> columns_;
  Eigen::MatrixXd a0_;
  Eigen::VectorXd b0_;
  Eigen::MatrixXd tableau_;
  Eigen::VectorXd xb_, cost_, d_, phase_two_costs_, edge_norms_;
  std::vector<Eigen::Index> basis_;
  std::vector<double> ub_;
  std::vector<bool> basic_, at_upper_, banned_;
  double bscale_ = 0.0;
  std::size_t cap_ = 0;
  std::size_t iterations_ = 0;
};

}  // namespace detail

/// Solves the LP with a bounded-variable two-phase primal simplex.
/// Deterministic for identical input and options.
inline LpSolution solve_lp(const LpProblem& p, const SimplexOptions& opt = {}) {
  detail::BoundedSimplex simplex(p, opt);
  return simplex.run(p);
}

// --- LP data in the matrix text format ("rows cols" then decimal rows) ---

inline Eigen::MatrixXd read_real_matrix(std::istream& in) {
  long long rows = -1, cols = -1;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0)
    throw ParseError("matrix: expected header \"rows cols\"");
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (!(in >> m(r, c)))
        throw ParseError("matrix: missing or non-numeric entry at row " + std::to_string(r + 1));
  return m;
}

inline Eigen::MatrixXd parse_real_matrix(const std::string& text) {
  std::istringstream in(text);
  return read_real_matrix(in);
}

inline void write_real_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  std::ostringstream buf;
  buf.imbue(std::locale::classic());
  buf << std::setprecision(17);
  buf << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) buf << (c ? " " : "") << m(r, c);
    buf << '\n';
  }
  out << buf.str();
}

inline std::string to_string(const Eigen::MatrixXd& m) {
  std::ostringstream out;
  write_real_matrix(out, m);
  return out.str();
}

}  // namespace tumod

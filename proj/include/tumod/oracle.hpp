#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "tumod/errors.hpp"
#include "tumod/lp.hpp"
#include "tumod/penalties.hpp"

namespace tumod {

inline constexpr std::size_t kTabulateMaxP = 14;

/// F(S) for every S subset of {0..p-1}; entry `mask` holds the support
/// whose bit i is set iff i is in S.
class SupportFunctionTable {
 public:
  SupportFunctionTable(std::size_t p, std::vector<PenaltyValue> values)
      : p_(p), values_(std::move(values)) {
    if (p_ > kTabulateMaxP)
      throw SizeError("SupportFunctionTable: p = " + std::to_string(p_) + " exceeds " +
                      std::to_string(kTabulateMaxP));
    if (values_.size() != (std::size_t{1} << p_))
      throw DimensionError("SupportFunctionTable: expected 2^p entries");
    if (values_[0].is_infinite())
      throw DimensionError("SupportFunctionTable: F(empty set) must be finite");
  }

  std::size_t p() const noexcept { return p_; }
  std::size_t size() const noexcept { return values_.size(); }
  const PenaltyValue& operator[](std::uint64_t mask) const { return values_.at(mask); }

  /// F(empty set) == 0.
  bool normalized() const { return values_[0].value() == 0.0; }

  std::vector<std::uint64_t> finite_supports() const {
    std::vector<std::uint64_t> out;
    for (std::uint64_t m = 0; m < values_.size(); ++m)
      if (values_[m].is_finite()) out.push_back(m);
    return out;
  }

 private:
  std::size_t p_;
  std::vector<PenaltyValue> values_;
};

/// Evaluates `penalty` on the indicator vector of every support of {0..p-1}.
template <class Penalty>
SupportFunctionTable tabulate(Penalty&& penalty, std::size_t p, unsigned threads = 1) {
  if (p > kTabulateMaxP)
    throw SizeError("tabulate: p = " + std::to_string(p) + " exceeds " + std::to_string(kTabulateMaxP));
  const std::size_t n = std::size_t{1} << p;
  std::vector<PenaltyValue> values(n);
  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t m = begin; m < end; ++m)
      values[m] = penalty(SupportVector::from_mask(p, m).indicator());
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads == 1) {
    work(0, n);
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t b = t * chunk, e = std::min(n, b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }
  return SupportFunctionTable(p, std::move(values));
}

/// max over supports with finite F of |y|'s - F(s).
inline double conjugate(const SupportFunctionTable& t, const Eigen::VectorXd& y) {
  detail::check_length(y, t.p(), "conjugate");
  double best = -std::numeric_limits<double>::infinity();
  for (std::uint64_t m = 0; m < t.size(); ++m) {
    if (t[m].is_infinite()) continue;
    double gain = 0.0;
    for (std::size_t i = 0; i < t.p(); ++i)
      if ((m >> i) & 1u) gain += std::abs(y[static_cast<Eigen::Index>(i)]);
    best = std::max(best, gain - t[m].value());
  }
  return best;
}

/// Biconjugate over the unit box through the LP
///   max |x|'z - t  s.t.  z's - t <= F(s) for every finite-F support s,  z >= 0.
/// +inf outside the box or when the LP is unbounded.
inline PenaltyValue biconjugate(const SupportFunctionTable& t, const Eigen::VectorXd& x,
                                const SimplexOptions& opt = {}) {
  detail::check_length(x, t.p(), "biconjugate");
  if (x.size() > 0 && x.cwiseAbs().maxCoeff() > 1.0) return PenaltyValue::infinity();
  LpBuilder b(Sense::Maximize);
  for (std::size_t i = 0; i < t.p(); ++i) b.add_variable(std::abs(x[static_cast<Eigen::Index>(i)]), 0.0, kInf);
  const auto tv = b.add_variable(-1.0, -kInf, kInf);
  for (auto m : t.finite_supports()) {
    std::vector<LpBuilder::Term> terms;
    for (std::size_t i = 0; i < t.p(); ++i)
      if ((m >> i) & 1u) terms.emplace_back(i, 1.0);
    terms.emplace_back(tv, -1.0);
    b.add_le(std::move(terms), t[m].value());
  }
  const auto sol = solve_lp(b.build(), opt);
  if (sol.status == LpStatus::Unbounded) return PenaltyValue::infinity();
  if (sol.status != LpStatus::Optimal)
    throw NumericalError("biconjugate: the oracle LP cannot be infeasible");
  return PenaltyValue::finite(sol.value);
}

/// The same value from the dual side: the cheapest convex combination of
/// finite-F supports dominating |x|,
///   min sum_S l_S F(S)  s.t.  sum_S l_S 1_S >= |x|,  sum_S l_S = 1,  l >= 0.
inline PenaltyValue biconjugate_min_form(const SupportFunctionTable& t, const Eigen::VectorXd& x,
                                         const SimplexOptions& opt = {}) {
  detail::check_length(x, t.p(), "biconjugate_min_form");
  if (x.size() > 0 && x.cwiseAbs().maxCoeff() > 1.0) return PenaltyValue::infinity();
  const auto supports = t.finite_supports();
  LpBuilder b(Sense::Minimize);
  for (auto m : supports) b.add_variable(t[m].value(), 0.0, kInf);
  for (std::size_t i = 0; i < t.p(); ++i) {
    std::vector<LpBuilder::Term> terms;
    for (std::size_t k = 0; k < supports.size(); ++k)
      if ((supports[k] >> i) & 1u) terms.emplace_back(k, 1.0);
    b.add_ge(std::move(terms), std::abs(x[static_cast<Eigen::Index>(i)]));
  }
  std::vector<LpBuilder::Term> all;
  for (std::size_t k = 0; k < supports.size(); ++k) all.emplace_back(k, 1.0);
  b.add_le(all, 1.0);
  b.add_ge(all, 1.0);
  const auto sol = solve_lp(b.build(), opt);
  if (sol.status == LpStatus::Infeasible) return PenaltyValue::infinity();
  if (sol.status != LpStatus::Optimal)
    throw NumericalError("biconjugate_min_form: the oracle LP cannot be unbounded");
  return PenaltyValue::finite(sol.value);
}

}  // namespace tumod

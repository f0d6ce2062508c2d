#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "tumod/errors.hpp"
#include "tumod/groups.hpp"
#include "tumod/int_matrix.hpp"
#include "tumod/lp.hpp"

namespace tumod {

using Rng = std::mt19937_64;

// ---------------------------------------------------------------- instances

struct RecoveryInstance {
  Eigen::VectorXd x_true;
  Eigen::MatrixXd A;
  Eigen::VectorXd noise;
  Eigen::VectorXd b;
  /// l1 radius of the residual ball.
  double epsilon = 0.0;

  std::size_t n() const { return static_cast<std::size_t>(A.rows()); }
  std::size_t p() const { return static_cast<std::size_t>(A.cols()); }

  /// ||b - A x||_1 - epsilon; nonpositive when x satisfies the fidelity constraint.
  double fidelity_excess(const Eigen::VectorXd& x) const { return (b - A * x).lpNorm<1>() - epsilon; }
};

enum class NoiseKind { None, Sparse, Dense };

struct NoiseSpec {
  NoiseKind kind = NoiseKind::Sparse;
  /// Number of nonzero entries for sparse noise.
  std::size_t nonzeros = 15;
  double sigma = 0.01;
  /// Read sigma as a variance (std = sqrt(sigma)) rather than a standard deviation.
  bool sigma_is_variance = true;

  double stddev() const { return sigma_is_variance ? std::sqrt(sigma) : sigma; }
};

/// Spikes of the given amplitude at 0, delta, 2 delta, ... (0-based).
inline Eigen::VectorXd gen_spike_train(std::size_t p, std::size_t delta, double amplitude = 1.0) {
  if (delta < 1 || p < 1) throw DimensionError("gen_spike_train: need p >= 1 and delta >= 1");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < p; i += delta) x[static_cast<Eigen::Index>(i)] = amplitude;
  return x;
}

namespace detail {

/// First k entries of a uniform random permutation of 0..n-1.
inline std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  k = std::min(k, n);
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace detail

/// Ones on `per_group` random indices of each of `active` random groups.
inline Eigen::VectorXd gen_group_sparse_signal(const GroupStructure& g, std::size_t active,
                                               std::size_t per_group, Rng& rng) {
  if (active > g.num_groups())
    throw DimensionError("gen_group_sparse_signal: more active groups than groups");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.p()));
  for (auto k : detail::sample_without_replacement(g.num_groups(), active, rng)) {
    const auto& members = g.group(k);
    if (per_group > members.size())
      throw DimensionError("gen_group_sparse_signal: group " + std::to_string(k + 1) + " has fewer than " +
                           std::to_string(per_group) + " elements");
    for (auto j : detail::sample_without_replacement(members.size(), per_group, rng))
      x[static_cast<Eigen::Index>(members[j])] = 1.0;
  }
  return x;
}

/// Column-normalized Gaussian A, noise per `noise`, b = A x + w, epsilon = ||w||_1.
inline RecoveryInstance gen_instance(const Eigen::VectorXd& x_true, std::size_t n, const NoiseSpec& noise,
                                     Rng& rng) {
  if (n < 1) throw DimensionError("gen_instance: need n >= 1");
  const auto rows = static_cast<Eigen::Index>(n);
  RecoveryInstance inst;
  inst.x_true = x_true;
  inst.A.resize(rows, x_true.size());
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Eigen::Index c = 0; c < inst.A.cols(); ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) inst.A(r, c) = gauss(rng);
    const double norm = inst.A.col(c).norm();
    if (norm > 0.0) inst.A.col(c) /= norm;
  }
  inst.noise = Eigen::VectorXd::Zero(rows);
  const double sd = noise.stddev();
  switch (noise.kind) {
    case NoiseKind::None: break;
    case NoiseKind::Sparse:
      for (auto i : detail::sample_without_replacement(n, noise.nonzeros, rng))
        inst.noise[static_cast<Eigen::Index>(i)] = sd * gauss(rng);
      break;
    case NoiseKind::Dense:
      for (Eigen::Index i = 0; i < rows; ++i) inst.noise[i] = sd * gauss(rng);
      break;
  }
  inst.b = inst.A * x_true + inst.noise;
  inst.epsilon = inst.noise.lpNorm<1>();
  return inst;
}

// ------------------------------------------------------------------ solvers

/// Steepest-edge pricing; the recovery LPs are too degenerate for Bland at p = 200.
inline SimplexOptions recovery_simplex_options() {
  SimplexOptions opt;
  opt.rule = PivotRule::SteepestEdge;
  return opt;
}

struct RecoveryResult {
  LpStatus status = LpStatus::Infeasible;
  Eigen::VectorXd x;
  double objective = 0.0;

  bool optimal() const { return status == LpStatus::Optimal; }
};

namespace detail {

/// Variables x+ and x- in [0,1]^p, residual bounds r >= 0, and the rows
/// +-(A(x+ - x-) - b) <= r, sum r <= epsilon.
struct FidelityLp {
  LpBuilder builder;
  std::size_t xp = 0, xm = 0, r = 0, p = 0;

  FidelityLp(const RecoveryInstance& inst, double abs_cost) {
    p = inst.p();
    const std::size_t n = inst.n();
    if (static_cast<std::size_t>(inst.b.size()) != n || static_cast<std::size_t>(inst.x_true.size()) != p)
      throw DimensionError("recovery: instance dimensions are inconsistent");
    xp = builder.add_variables(p, abs_cost, 0.0, 1.0);
    xm = builder.add_variables(p, abs_cost, 0.0, 1.0);
    r = builder.add_variables(n, 0.0, 0.0, kInf);
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<LpBuilder::Term> pos, neg;
      pos.reserve(2 * p + 1);
      neg.reserve(2 * p + 1);
      for (std::size_t j = 0; j < p; ++j) {
        const double a = inst.A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        pos.emplace_back(xp + j, a);
        pos.emplace_back(xm + j, -a);
        neg.emplace_back(xp + j, -a);
        neg.emplace_back(xm + j, a);
      }
      pos.emplace_back(r + i, -1.0);
      neg.emplace_back(r + i, -1.0);
      const double bi = inst.b[static_cast<Eigen::Index>(i)];
      builder.add_le(std::move(pos), bi);
      builder.add_le(std::move(neg), -bi);
    }
    std::vector<LpBuilder::Term> total;
    for (std::size_t i = 0; i < n; ++i) total.emplace_back(r + i, 1.0);
    builder.add_le(std::move(total), inst.epsilon);
  }

  /// Terms of x+_j + x-_j, an upper bound on |x_j|.
  std::vector<LpBuilder::Term> abs_terms(std::size_t j, double coef = 1.0) const {
    return {{xp + j, coef}, {xm + j, coef}};
  }

  RecoveryResult solve(const SimplexOptions& opt) const {
    const auto sol = solve_lp(builder.build(), opt);
    RecoveryResult out;
    out.status = sol.status;
    if (!sol.optimal()) return out;
    const auto pp = static_cast<Eigen::Index>(p);
    out.x = sol.point.segment(static_cast<Eigen::Index>(xp), pp) - sol.point.segment(static_cast<Eigen::Index>(xm), pp);
    out.objective = sol.value;
    return out;
  }
};

}  // namespace detail

/// min ||x||_1  s.t.  ||b - Ax||_1 <= epsilon,  ||x||_inf <= 1.
inline RecoveryResult solve_bp(const RecoveryInstance& inst, const SimplexOptions& opt = recovery_simplex_options()) {
  return detail::FidelityLp(inst, 1.0).solve(opt);
}

/// BP plus the budget D|x| <= 1.
inline RecoveryResult solve_dbp(const RecoveryInstance& inst, const IntMatrix& d, const SimplexOptions& opt = recovery_simplex_options()) {
  if (d.cols() != inst.p()) throw DimensionError("solve_dbp: budget matrix must have p columns");
  detail::FidelityLp lp(inst, 1.0);
  for (std::size_t r = 0; r < d.rows(); ++r) {
    std::vector<LpBuilder::Term> terms;
    for (std::size_t j = 0; j < d.cols(); ++j)
      if (d(r, j) != 0)
        for (auto t : lp.abs_terms(j, static_cast<double>(d(r, j)))) terms.push_back(t);
    lp.builder.add_le(std::move(terms), 1.0);
  }
  return lp.solve(opt);
}

/// BP plus a fractional cover by at most G groups: B w >= |x|, 1'w <= G, w in [0,1]^M.
inline RecoveryResult solve_slgl(const RecoveryInstance& inst, const GroupStructure& g, double max_groups,
                                 const SimplexOptions& opt = recovery_simplex_options()) {
  if (g.p() != inst.p()) throw DimensionError("solve_slgl: group structure does not match p");
  detail::FidelityLp lp(inst, 1.0);
  const std::size_t w = lp.builder.add_variables(g.num_groups(), 0.0, 0.0, 1.0);
  std::vector<std::vector<std::size_t>> member_of(g.p());
  for (std::size_t k = 0; k < g.num_groups(); ++k)
    for (auto j : g.group(k)) member_of[j].push_back(k);
  for (std::size_t j = 0; j < g.p(); ++j) {
    auto terms = lp.abs_terms(j);
    for (auto k : member_of[j]) terms.emplace_back(w + k, -1.0);
    lp.builder.add_le(std::move(terms), 0.0);
  }
  std::vector<LpBuilder::Term> budget;
  for (std::size_t k = 0; k < g.num_groups(); ++k) budget.emplace_back(w + k, 1.0);
  lp.builder.add_le(std::move(budget), max_groups);
  return lp.solve(opt);
}

/// min (1 - alpha) sum_G sqrt|G| ||x_G||_inf + alpha ||x||_1 under the BP constraints.
inline RecoveryResult solve_sgl_linf(const RecoveryInstance& inst, const GroupStructure& g, double alpha,
                                     const SimplexOptions& opt = recovery_simplex_options()) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw DimensionError("solve_sgl_linf: alpha must lie in [0,1]");
  if (g.p() != inst.p()) throw DimensionError("solve_sgl_linf: group structure does not match p");
  detail::FidelityLp lp(inst, alpha);
  for (std::size_t k = 0; k < g.num_groups(); ++k) {
    const auto& members = g.group(k);
    const double weight = (1.0 - alpha) * std::sqrt(static_cast<double>(members.size()));
    const std::size_t u = lp.builder.add_variable(weight, 0.0, 1.0);
    for (auto j : members) {
      auto terms = lp.abs_terms(j);
      terms.emplace_back(u, -1.0);
      lp.builder.add_le(std::move(terms), 0.0);
    }
  }
  return lp.solve(opt);
}

inline double relative_error(const Eigen::VectorXd& x_true, const Eigen::VectorXd& x_hat) {
  if (x_true.size() != x_hat.size()) throw DimensionError("relative_error: length mismatch");
  const double norm = x_true.norm();
  if (norm == 0.0) throw DomainError("relative_error: the true signal is zero");
  return (x_true - x_hat).norm() / norm;
}

// -------------------------------------------------------------- experiments

enum class SignalModel { SpikeTrain, GroupCover };
enum class RecoverySolver { BP, DBP, SLGL, SGL };

inline std::string_view solver_name(RecoverySolver s) {
  switch (s) {
    case RecoverySolver::BP: return "bp";
    case RecoverySolver::DBP: return "dbp";
    case RecoverySolver::SLGL: return "slgl";
    case RecoverySolver::SGL: return "sgl-inf";
  }
  return "?";
}

inline std::optional<RecoverySolver> parse_solver(std::string_view name) {
  for (auto s : {RecoverySolver::BP, RecoverySolver::DBP, RecoverySolver::SLGL, RecoverySolver::SGL})
    if (solver_name(s) == name) return s;
  return std::nullopt;
}

struct ExperimentConfig {
  SignalModel signal = SignalModel::SpikeTrain;
  std::size_t p = 200;
  std::size_t delta = 25;
  double amplitude = 1.0;
  /// Group structure for the group-cover signal and the SLGL/SGL solvers.
  std::optional<GroupStructure> groups;
  std::size_t active_groups = 5;
  std::size_t per_group = 3;
  std::vector<double> fractions{0.15, 0.18, 0.25, 0.35, 0.5};
  std::size_t trials = 20;
  std::uint64_t seed = 1;
  NoiseSpec noise;
  std::vector<RecoverySolver> solvers{RecoverySolver::BP, RecoverySolver::DBP};
  double alpha = 0.95;
  unsigned threads = 1;
  SimplexOptions simplex = recovery_simplex_options();

  /// The spike-train setup: p = 200, delta = 25, 20 trials, 15 sparse noise entries.
  static ExperimentConfig dispersive() { return {}; }

  /// The group-cover setup: interval groups, 5 active groups of 3 ones, dense noise, 10 trials.
  static ExperimentConfig group_cover() {
    ExperimentConfig c;
    c.signal = SignalModel::GroupCover;
    c.p = kAppendixP;
    c.groups = appendix_interval_groups();
    c.fractions = {0.25};
    c.trials = 10;
    c.noise.kind = NoiseKind::Dense;
    c.solvers = {RecoverySolver::SLGL, RecoverySolver::SGL, RecoverySolver::BP};
    return c;
  }

  bool needs_groups() const {
    if (signal == SignalModel::GroupCover) return true;
    for (auto s : solvers)
      if (s == RecoverySolver::SLGL || s == RecoverySolver::SGL) return true;
    return false;
  }

  void validate() const {
    if (p < 1) throw DimensionError("experiment: p must be positive");
    if (trials < 1) throw DimensionError("experiment: trials must be at least 1");
    if (fractions.empty()) throw DimensionError("experiment: no measurement fractions");
    for (double f : fractions)
      if (!(f > 0.0 && f <= 1.0)) throw DimensionError("experiment: fractions must lie in (0,1]");
    if (solvers.empty()) throw DimensionError("experiment: no solvers selected");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw DimensionError("experiment: alpha must lie in [0,1]");
    const bool need_delta = signal == SignalModel::SpikeTrain ||
                            std::find(solvers.begin(), solvers.end(), RecoverySolver::DBP) != solvers.end();
    if (need_delta && (delta < 1 || delta > p)) throw DimensionError("experiment: need 1 <= delta <= p");
    if (needs_groups()) {
      if (!groups) throw DimensionError("experiment: a group structure is required");
      if (groups->p() != p) throw DimensionError("experiment: group structure does not match p");
      if (signal == SignalModel::GroupCover && active_groups > groups->num_groups())
        throw DimensionError("experiment: more active groups than groups");
    }
  }
};

struct TrialRecord {
  std::string solver;
  std::size_t n = 0;
  double fraction = 0.0;
  std::size_t trial = 0;
  /// NaN when the solver did not return an optimal point.
  double rel_err = 0.0;
  std::string status;
  double ms = 0.0;

  /// Equality ignoring wall time.
  bool same_outcome(const TrialRecord& o) const {
    const bool err_eq = (std::isnan(rel_err) && std::isnan(o.rel_err)) || rel_err == o.rel_err;
    return solver == o.solver && n == o.n && fraction == o.fraction && trial == o.trial && err_eq &&
           status == o.status;
  }
};

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t trial_seed(std::uint64_t base, std::size_t fraction_index, std::size_t trial) {
  return base ^ splitmix64((static_cast<std::uint64_t>(fraction_index) << 32) | static_cast<std::uint64_t>(trial));
}

inline std::size_t measurements_for(double fraction, std::size_t p) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(fraction * static_cast<double>(p))));
}

namespace detail {

inline std::vector<TrialRecord> run_trial(const ExperimentConfig& cfg, std::size_t fi, std::size_t trial,
                                          const IntMatrix& budget) {
  Rng rng(trial_seed(cfg.seed, fi, trial));
  const Eigen::VectorXd x = cfg.signal == SignalModel::SpikeTrain
                                ? gen_spike_train(cfg.p, cfg.delta, cfg.amplitude)
                                : gen_group_sparse_signal(*cfg.groups, cfg.active_groups, cfg.per_group, rng);
  const double frac = cfg.fractions[fi];
  const std::size_t n = measurements_for(frac, cfg.p);
  const auto inst = gen_instance(x, n, cfg.noise, rng);
  std::vector<TrialRecord> out;
  for (auto s : cfg.solvers) {
    TrialRecord rec;
    rec.solver = std::string(solver_name(s));
    rec.n = n;
    rec.fraction = frac;
    rec.trial = trial;
    const auto start = std::chrono::steady_clock::now();
    try {
      RecoveryResult res;
      switch (s) {
        case RecoverySolver::BP: res = solve_bp(inst, cfg.simplex); break;
        case RecoverySolver::DBP: res = solve_dbp(inst, budget, cfg.simplex); break;
        case RecoverySolver::SLGL:
          res = solve_slgl(inst, *cfg.groups, static_cast<double>(cfg.active_groups), cfg.simplex);
          break;
        case RecoverySolver::SGL: res = solve_sgl_linf(inst, *cfg.groups, cfg.alpha, cfg.simplex); break;
      }
      rec.status = to_string(res.status);
      rec.rel_err = res.optimal() ? relative_error(x, res.x) : std::nan("");
    } catch (const NumericalError&) {
      rec.status = "numerical-error";
      rec.rel_err = std::nan("");
    }
    rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace detail

/// Runs every (fraction, trial) pair on `cfg.threads` threads; records come
/// back in (fraction, trial, solver) order whatever the thread count.
inline std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto cfg_delta = std::min(std::max<std::size_t>(cfg.delta, 1), cfg.p);
  const IntMatrix budget = refractoriness_matrix(cfg.p, cfg_delta);
  const std::size_t items = cfg.fractions.size() * cfg.trials;
  std::vector<std::vector<TrialRecord>> slots(items);
  auto work = [&](std::size_t first, std::size_t stride) {
    for (std::size_t k = first; k < items; k += stride)
      slots[k] = detail::run_trial(cfg, k / cfg.trials, k % cfg.trials, budget);
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(cfg.threads, static_cast<unsigned>(items)));
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    for (auto& th : pool) th.join();
  }
  std::vector<TrialRecord> out;
  for (auto& s : slots)
    for (auto& r : s) out.push_back(std::move(r));
  return out;
}

/// Mean relative error of `solver` at `fraction` over optimal trials (NaN if none).
inline double mean_error(const std::vector<TrialRecord>& recs, std::string_view solver, double fraction) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& r : recs)
    if (r.solver == solver && r.fraction == fraction && !std::isnan(r.rel_err)) {
      sum += r.rel_err;
      ++count;
    }
  return count ? sum / static_cast<double>(count) : std::nan("");
}

// ---------------------------------------------------------------------- I/O

inline constexpr std::string_view kCsvHeader = "solver,n,frac,trial,rel_err,status,ms";

/// Six significant digits, locale-independent.
inline std::string format_sig6(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 6);
  return std::string(buf, res.ptr);
}

inline void write_records_csv(std::ostream& out, const std::vector<TrialRecord>& recs) {
  out << kCsvHeader << '\n';
  for (const auto& r : recs)
    out << r.solver << ',' << r.n << ',' << format_sig6(r.fraction) << ',' << r.trial << ','
        << format_sig6(r.rel_err) << ',' << r.status << ',' << format_sig6(r.ms) << '\n';
}

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T>
T parse_number(const std::string& key, const std::string& value) {
  T out{};
  const auto* end = value.data() + value.size();
  const auto res = std::from_chars(value.data(), end, out);
  if (res.ec != std::errc{} || res.ptr != end)
    throw ParseError("config: bad value '" + value + "' for key '" + key + "'");
  return out;
}

}  // namespace detail

/// Applies one key=value setting. Unknown keys are a ParseError.
inline void apply_config_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  using detail::parse_number;
  if (key == "preset") {
    if (value == "dispersive") cfg = ExperimentConfig::dispersive();
    else if (value == "group-cover") cfg = ExperimentConfig::group_cover();
    else throw ParseError("config: unknown preset '" + value + "'");
  } else if (key == "signal") {
    if (value == "spikes") cfg.signal = SignalModel::SpikeTrain;
    else if (value == "group-cover") cfg.signal = SignalModel::GroupCover;
    else throw ParseError("config: unknown signal '" + value + "'");
  } else if (key == "p") {
    cfg.p = parse_number<std::size_t>(key, value);
  } else if (key == "delta") {
    cfg.delta = parse_number<std::size_t>(key, value);
  } else if (key == "amplitude") {
    cfg.amplitude = parse_number<double>(key, value);
  } else if (key == "groups") {
    if (value == "appendix") {
      cfg.groups = appendix_interval_groups();
    } else {
      std::ifstream in(value);
      if (!in) throw ParseError("config: cannot open group file '" + value + "'");
      cfg.groups = read_groups(in);
    }
  } else if (key == "G") {
    cfg.active_groups = parse_number<std::size_t>(key, value);
  } else if (key == "per_group") {
    cfg.per_group = parse_number<std::size_t>(key, value);
  } else if (key == "fracs") {
    cfg.fractions.clear();
    for (const auto& f : detail::split_list(value)) cfg.fractions.push_back(parse_number<double>(key, f));
  } else if (key == "trials") {
    cfg.trials = parse_number<std::size_t>(key, value);
  } else if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "noise") {
    if (value == "none") cfg.noise.kind = NoiseKind::None;
    else if (value == "sparse") cfg.noise.kind = NoiseKind::Sparse;
    else if (value == "dense") cfg.noise.kind = NoiseKind::Dense;
    else throw ParseError("config: unknown noise '" + value + "'");
  } else if (key == "noise_k") {
    cfg.noise.nonzeros = parse_number<std::size_t>(key, value);
  } else if (key == "sigma") {
    cfg.noise.sigma = parse_number<double>(key, value);
  } else if (key == "sigma_is") {
    if (value == "variance") cfg.noise.sigma_is_variance = true;
    else if (value == "stddev") cfg.noise.sigma_is_variance = false;
    else throw ParseError("config: sigma_is must be 'variance' or 'stddev'");
  } else if (key == "solvers") {
    cfg.solvers.clear();
    for (const auto& s : detail::split_list(value)) {
      const auto solver = parse_solver(s);
      if (!solver) throw ParseError("config: unknown solver '" + s + "'");
      cfg.solvers.push_back(*solver);
    }
  } else if (key == "alpha") {
    cfg.alpha = parse_number<double>(key, value);
  } else if (key == "threads") {
    cfg.threads = parse_number<unsigned>(key, value);
  } else if (key == "pivot") {
    if (value == "bland") cfg.simplex.rule = PivotRule::Bland;
    else if (value == "dantzig") cfg.simplex.rule = PivotRule::Dantzig;
    else if (value == "steepest-edge") cfg.simplex.rule = PivotRule::SteepestEdge;
    else throw ParseError("config: pivot must be 'bland', 'dantzig' or 'steepest-edge'");
  } else {
    throw ParseError("config: unknown key '" + key + "'");
  }
}

/// Flat key=value text; '#' starts a comment. A `preset` line resets every
/// earlier setting, so it belongs first.
inline ExperimentConfig parse_experiment_config(std::istream& in) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = detail::trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ParseError("config line " + std::to_string(lineno) + ": expected key=value");
    apply_config_setting(cfg, detail::trim(t.substr(0, eq)), detail::trim(t.substr(eq + 1)));
  }
  return cfg;
}

inline ExperimentConfig parse_experiment_config(const std::string& text) {
  std::istringstream in(text);
  return parse_experiment_config(in);
}

}  // namespace tumod

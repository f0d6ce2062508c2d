#pragma once

#include <CLI11.hpp>
#include <Eigen/Dense>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tumod/envelopes.hpp"
#include "tumod/errors.hpp"
#include "tumod/groups.hpp"
#include "tumod/int_matrix.hpp"
#include "tumod/models.hpp"
#include "tumod/oracle.hpp"
#include "tumod/recovery.hpp"
#include "tumod/tu.hpp"

namespace tumod::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

/// Tolerance oracle-check applies to TU-certified models.
inline constexpr double kOracleTolerance = 1e-6;

/// Bad or missing flags that CLI11 itself cannot detect.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

inline double parse_double(const std::string& flag, const std::string& tok) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != tok.size()) throw UsageError(flag + ": cannot parse '" + tok + "' as a number");
  return v;
}

inline std::size_t parse_index(const std::string& flag, const std::string& tok) {
  const double v = parse_double(flag, tok);
  if (v < 0 || v != std::floor(v)) throw UsageError(flag + ": '" + tok + "' is not a nonnegative integer");
  return static_cast<std::size_t>(v);
}

inline Eigen::VectorXd parse_vector(const std::string& flag, const std::string& text) {
  const auto toks = split(text, ',');
  Eigen::VectorXd x(static_cast<Eigen::Index>(toks.size()));
  for (std::size_t i = 0; i < toks.size(); ++i) x[static_cast<Eigen::Index>(i)] = parse_double(flag, toks[i]);
  return x;
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return in;
}

inline std::string fixed6(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 6);
  return std::string(buf, res.ptr);
}

inline std::string format_point(const Eigen::VectorXd& x) {
  std::string out;
  for (Eigen::Index i = 0; i < x.size(); ++i) out += (i ? "," : "") + fixed6(x[i]);
  return out;
}

}  // namespace detail

/// Flags shared by every model-based command.
struct ModelFlags {
  std::string model;
  std::string groups;
  std::string parents;
  std::string edges;
  std::size_t graph_p = 0;
  std::size_t max_groups = 1;
  std::string save_groups;

  void attach(CLI::App* cmd) {
    cmd->add_option("--model", model, "Model name (required)")->check(CLI::IsMember([] {
      std::vector<std::string> names;
      for (const auto& m : kModelNames) names.emplace_back(m.name);
      return names;
    }()));
    cmd->add_option("--groups", groups, "Group file, or 'appendix' for the 29 interval groups over p = 200");
    cmd->add_option("--parents", parents, "Tree as 1-based parent list, 0 marks the root (e.g. 0,1,1)");
    cmd->add_option("--edges", edges, "Graph edges as 1-based pairs (e.g. 1-2,2-3)");
    cmd->add_option("--p", graph_p, "Number of graph vertices (pairwise model)");
    cmd->add_option("--G", max_groups, "Group budget for sparse-cover");
    cmd->add_option("--save-groups", save_groups, "Write the group structure in use to this file");
  }

  Model build() const {
    if (model.empty()) throw UsageError("--model is required");
    const auto kind = *parse_model_kind(model);
    Model m;
    if (kind == ModelKind::Tree) {
      if (parents.empty()) throw UsageError("--parents is required for model tree");
      std::vector<std::size_t> par;
      for (const auto& t : detail::split(parents, ',')) par.push_back(detail::parse_index("--parents", t));
      m = Model::with_tree(TreeStructure::from_one_based_parents(par));
    } else if (kind == ModelKind::Pairwise) {
      if (graph_p == 0) throw UsageError("--p is required for model pairwise");
      std::vector<Edge> es;
      if (!edges.empty())
        for (const auto& t : detail::split(edges, ',')) {
          const auto ends = detail::split(t, '-');
          if (ends.size() != 2) throw UsageError("--edges: '" + t + "' is not of the form i-j");
          const auto a = detail::parse_index("--edges", ends[0]), b = detail::parse_index("--edges", ends[1]);
          if (a < 1 || b < 1) throw UsageError("--edges: vertices are 1-based");
          es.emplace_back(a - 1, b - 1);
        }
      m = Model::with_graph(graph_p, std::move(es));
    } else {
      if (groups.empty()) throw UsageError("--groups is required for model " + model);
      GroupStructure g;
      if (groups == "appendix") {
        g = appendix_interval_groups();
      } else {
        auto in = detail::open_input(groups);
        g = read_groups(in);
      }
      m = Model::with_groups(kind, std::move(g), max_groups);
    }
    if (!save_groups.empty()) {
      if (kind == ModelKind::Tree || kind == ModelKind::Pairwise)
        throw UsageError("--save-groups needs a group-based model");
      std::ofstream out(save_groups);
      if (!out) throw ParseError("cannot write '" + save_groups + "'");
      write_groups(out, m.groups);
    }
    return m;
  }
};

inline std::vector<Eigen::VectorXd> normball_grid(std::size_t p, std::size_t resolution) {
  if (p != 2 && p != 3) throw DimensionError("normball: sampling needs p = 2 or p = 3 (got " + std::to_string(p) + ")");
  if (resolution < 2) throw DimensionError("normball: resolution must be at least 2");
  std::vector<Eigen::VectorXd> out;
  std::size_t total = 1;
  for (std::size_t i = 0; i < p; ++i) total *= resolution;
  const double step = 2.0 / static_cast<double>(resolution - 1);
  for (std::size_t k = 0; k < total; ++k) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(p));
    std::size_t rest = k;
    for (std::size_t i = p; i-- > 0;) {
      x[static_cast<Eigen::Index>(i)] = -1.0 + step * static_cast<double>(rest % resolution);
      rest /= resolution;
    }
    out.push_back(x);
  }
  return out;
}

/// CSV rows (x1..xp, value, one 0/1 membership column per level) of the
/// envelope on a uniform grid over the unit box.
inline void emit_normball(std::ostream& out, const ModelEvaluator& ev, std::size_t resolution,
                          const std::vector<double>& levels) {
  const auto grid = normball_grid(ev.p(), resolution);
  for (std::size_t i = 0; i < ev.p(); ++i) out << 'x' << (i + 1) << ',';
  out << "value";
  for (double l : levels) out << ",le_" << format_sig6(l);
  out << '\n';
  for (const auto& x : grid) {
    const auto v = ev.envelope(x).value;
    out << detail::format_point(x) << ',' << to_string(v);
    for (double l : levels) out << ',' << (v.is_finite() && v.value() <= l + 1e-12 ? 1 : 0);
    out << '\n';
  }
}

/// Parses argv and runs one command. Human-readable results go to `out`,
/// diagnostics to `err`.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Structured sparsity toolkit: TU certification, convex envelopes, biconjugate oracle, recovery"};
  app.require_subcommand(1, 1);

  // check-tu
  auto* tu_cmd = app.add_subcommand("check-tu", "Decide total unimodularity of an integer matrix");
  std::string matrix_path, save_matrix;
  std::vector<std::size_t> refr;
  bool expect_tu = false, exhaustive = false;
  tu_cmd->add_option("--matrix", matrix_path, "Matrix file ('rows cols' then entries)");
  tu_cmd->add_option("--refractoriness", refr, "Build D(p,delta) instead of reading a file")->expected(2)->delimiter(',');
  tu_cmd->add_flag("--expect-tu", expect_tu, "Exit 1 unless the matrix is TU");
  tu_cmd->add_flag("--exhaustive", exhaustive, "Enumerate every minor (small matrices only)");
  tu_cmd->add_option("--save", save_matrix, "Write the matrix in use to this file");

  // penalty / envelope
  auto* pen_cmd = app.add_subcommand("penalty", "Evaluate a combinatorial penalty F(supp(x))");
  ModelFlags pen_flags;
  std::string pen_x;
  pen_flags.attach(pen_cmd);
  pen_cmd->add_option("--x", pen_x, "Point as comma-separated values (required)");

  auto* env_cmd = app.add_subcommand("envelope", "Evaluate the convex envelope over the unit box");
  ModelFlags env_flags;
  std::string env_x;
  bool env_verbose = false;
  env_flags.attach(env_cmd);
  env_cmd->add_option("--x", env_x, "Point as comma-separated values (required)");
  env_cmd->add_flag("--verbose", env_verbose, "Also print the TU verdict and the relaxation witness");

  // normball
  auto* nb_cmd = app.add_subcommand("normball", "Sample the envelope on a grid over [-1,1]^p (p = 2 or 3)");
  ModelFlags nb_flags;
  std::size_t resolution = 21;
  std::vector<double> levels;
  std::string nb_out;
  nb_flags.attach(nb_cmd);
  nb_cmd->add_option("--resolution", resolution, "Grid points per axis")->capture_default_str();
  nb_cmd->add_option("--levels", levels, "Level values for membership columns")->delimiter(',');
  nb_cmd->add_option("--out", nb_out, "CSV output path (standard output when absent)");

  // oracle-check
  auto* oc_cmd = app.add_subcommand("oracle-check", "Compare the envelope with the brute-force biconjugate");
  ModelFlags oc_flags;
  std::string oc_x;
  std::size_t samples = 20;
  std::uint64_t oc_seed = 1;
  oc_flags.attach(oc_cmd);
  oc_cmd->add_option("--x", oc_x, "A single point (otherwise random samples)");
  oc_cmd->add_option("--samples", samples, "Number of random points in the box")->capture_default_str();
  oc_cmd->add_option("--seed", oc_seed, "Seed for the random points")->capture_default_str();

  // experiment
  auto* ex_cmd = app.add_subcommand("experiment", "Run a recovery experiment and write CSV records");
  std::string config_path, ex_out;
  std::vector<std::string> overrides;
  ex_cmd->add_option("--config", config_path, "key=value config file");
  ex_cmd->add_option("--set", overrides, "Extra key=value settings applied after the file");
  ex_cmd->add_option("--out", ex_out, "CSV output path (standard output when absent)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n' << "run with --help for usage\n";
    return kExitUsage;
  }

  try {
    if (tu_cmd->parsed()) {
      IntMatrix m;
      if (!refr.empty() == !matrix_path.empty())
        throw UsageError("check-tu: give exactly one of --matrix and --refractoriness");
      if (!refr.empty()) {
        m = refractoriness_matrix(refr[0], refr[1]);
      } else {
        auto in = detail::open_input(matrix_path);
        m = read_int_matrix(in);
      }
      if (!save_matrix.empty()) {
        std::ofstream f(save_matrix);
        if (!f) throw ParseError("cannot write '" + save_matrix + "'");
        write_int_matrix(f, m);
      }
      const auto v = is_totally_unimodular(m, exhaustive ? TuMethod::Exhaustive : TuMethod::Auto);
      out << to_string(v.status) << '\n';
      if (v.witness) {
        out << "witness rows";
        for (auto r : v.witness->rows) out << ' ' << (r + 1);
        out << " cols";
        for (auto c : v.witness->cols) out << ' ' << (c + 1);
        out << " det " << v.witness->determinant << '\n';
      }
      return expect_tu && !v.is_tu() ? kExitDomain : kExitOk;
    }

    if (pen_cmd->parsed()) {
      if (pen_x.empty()) throw UsageError("--x is required");
      const ModelEvaluator ev(pen_flags.build());
      out << to_string(ev.penalty(detail::parse_vector("--x", pen_x))) << '\n';
      return kExitOk;
    }

    if (env_cmd->parsed()) {
      if (env_x.empty()) throw UsageError("--x is required");
      const ModelEvaluator ev(env_flags.build());
      const auto x = detail::parse_vector("--x", env_x);
      const auto v = ev.envelope(x);
      out << to_string(v.value) << '\n';
      if (env_verbose) {
        out << "encoding " << (ev.spec().certified_tu() ? "TU" : "NotTU") << '\n';
        const auto w = v.witness ? v.witness : ev.envelope_lp(x).witness;
        if (w) {
          out << "s " << detail::format_point(w->s) << '\n';
          if (w->omega.size() > 0) out << "omega " << detail::format_point(w->omega) << '\n';
        }
      }
      return kExitOk;
    }

    if (nb_cmd->parsed()) {
      const ModelEvaluator ev(nb_flags.build());
      if (nb_out.empty()) {
        emit_normball(out, ev, resolution, levels);
      } else {
        std::ofstream f(nb_out);
        if (!f) throw ParseError("cannot write '" + nb_out + "'");
        emit_normball(f, ev, resolution, levels);
      }
      return kExitOk;
    }

    if (oc_cmd->parsed()) {
      const ModelEvaluator ev(oc_flags.build());
      const auto table = tabulate([&](const Eigen::VectorXd& x) { return ev.penalty(x); }, ev.p());
      std::vector<Eigen::VectorXd> points;
      if (!oc_x.empty()) {
        points.push_back(detail::parse_vector("--x", oc_x));
      } else {
        std::mt19937_64 rng(oc_seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (std::size_t k = 0; k < samples; ++k) {
          Eigen::VectorXd x(static_cast<Eigen::Index>(ev.p()));
          for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = u(rng);
          points.push_back(x);
        }
      }
      double worst = 0.0;
      for (const auto& x : points) {
        const auto e = ev.envelope(x).value, b = biconjugate(table, x);
        double gap = 0.0;
        if (e.is_infinite() != b.is_infinite()) gap = kInf;
        else if (e.is_finite()) gap = std::abs(e.value() - b.value());
        worst = std::max(worst, gap);
        out << "x " << detail::format_point(x) << " envelope " << to_string(e) << " biconjugate " << to_string(b)
            << " gap " << (std::isfinite(gap) ? detail::fixed6(gap) : "inf") << '\n';
      }
      const bool tu = ev.spec().certified_tu();
      out << "encoding " << (tu ? "TU" : "NotTU") << " max_gap " << (std::isfinite(worst) ? detail::fixed6(worst) : "inf")
          << '\n';
      return tu && !(worst <= kOracleTolerance) ? kExitDomain : kExitOk;
    }

    if (ex_cmd->parsed()) {
      ExperimentConfig cfg;
      if (!config_path.empty()) {
        auto in = detail::open_input(config_path);
        cfg = parse_experiment_config(in);
      }
      for (const auto& kv : overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("--set: expected key=value, got '" + kv + "'");
        apply_config_setting(cfg, kv.substr(0, eq), kv.substr(eq + 1));
      }
      if (const char* env = std::getenv("TUMOD_SEED")) apply_config_setting(cfg, "seed", env);
      const auto recs = run_experiment(cfg);
      if (ex_out.empty()) {
        write_records_csv(out, recs);
      } else {
        std::ofstream f(ex_out);
        if (!f) throw ParseError("cannot write '" + ex_out + "'");
        write_records_csv(f, recs);
        out << "solver,frac,mean_rel_err\n";
        for (double frac : cfg.fractions)
          for (auto s : cfg.solvers)
            out << solver_name(s) << ',' << format_sig6(frac) << ',' << format_sig6(mean_error(recs, solver_name(s), frac))
                << '\n';
      }
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace tumod::cli

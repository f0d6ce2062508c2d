#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tumod/envelopes.hpp"
#include "tumod/errors.hpp"
#include "tumod/groups.hpp"
#include "tumod/penalties.hpp"

namespace tumod {

enum class ModelKind {
  Intersection,
  LatentGroup,
  Tree,
  Knapsack,
  Dispersive,
  Pairwise,
  SparseCover,
  WithinIntersection,
  WithinCover,
};

struct ModelName {
  ModelKind kind;
  std::string_view name;
};

inline constexpr std::array<ModelName, 9> kModelNames{{
    {ModelKind::Intersection, "intersection"},
    {ModelKind::LatentGroup, "latent-group"},
    {ModelKind::Tree, "tree"},
    {ModelKind::Knapsack, "knapsack"},
    {ModelKind::Dispersive, "dispersive"},
    {ModelKind::Pairwise, "pairwise"},
    {ModelKind::SparseCover, "sparse-cover"},
    {ModelKind::WithinIntersection, "within-intersection"},
    {ModelKind::WithinCover, "within-cover"},
}};

inline std::string_view model_name(ModelKind k) {
  for (const auto& m : kModelNames)
    if (m.kind == k) return m.name;
  return "?";
}

inline std::optional<ModelKind> parse_model_kind(std::string_view name) {
  for (const auto& m : kModelNames)
    if (m.name == name) return m.kind;
  return std::nullopt;
}

/// What a model needs: groups for the group-based models (for the dispersive
/// models B' is the transposed biadjacency), a tree, or a graph.
struct Model {
  ModelKind kind = ModelKind::Intersection;
  GroupStructure groups;
  TreeStructure tree;
  std::size_t graph_size = 0;
  std::vector<Edge> edges;
  std::size_t max_groups = 1;

  static Model with_groups(ModelKind kind, GroupStructure g, std::size_t max_groups = 1) {
    if (kind == ModelKind::Tree || kind == ModelKind::Pairwise)
      throw DimensionError("Model: " + std::string(model_name(kind)) + " is not group-based");
    Model m;
    m.kind = kind;
    m.groups = std::move(g);
    m.max_groups = max_groups;
    return m;
  }
  static Model with_tree(TreeStructure t) {
    Model m;
    m.kind = ModelKind::Tree;
    m.tree = std::move(t);
    return m;
  }
  static Model with_graph(std::size_t p, std::vector<Edge> edges) {
    validate_edges(p, edges, "Model");
    Model m;
    m.kind = ModelKind::Pairwise;
    m.graph_size = p;
    m.edges = std::move(edges);
    return m;
  }

  std::size_t p() const {
    switch (kind) {
      case ModelKind::Tree: return tree.size();
      case ModelKind::Pairwise: return graph_size;
      default: return groups.p();
    }
  }

  IntMatrix budget_matrix() const { return biadjacency(groups).transpose(); }
};

inline std::optional<WithinGroupVariant> within_variant(ModelKind k) {
  if (k == ModelKind::WithinIntersection) return WithinGroupVariant::Intersection;
  if (k == ModelKind::WithinCover) return WithinGroupVariant::Cover;
  return std::nullopt;
}

inline PenaltyValue model_penalty(const Model& m, const Eigen::VectorXd& x) {
  switch (m.kind) {
    case ModelKind::Intersection: return group_intersection_penalty(x, m.groups);
    case ModelKind::LatentGroup: return group_cover_penalty(x, m.groups);
    case ModelKind::Tree: return tree_l0_penalty(x, m.tree);
    case ModelKind::Knapsack: return knapsack_penalty(x, m.groups);
    case ModelKind::Dispersive: return dispersive_l0_penalty(x, m.budget_matrix());
    case ModelKind::Pairwise: return pairwise_dispersive_penalty(x, m.edges);
    case ModelKind::SparseCover: return sparse_g_cover_penalty(x, m.groups, m.max_groups);
    case ModelKind::WithinIntersection:
    case ModelKind::WithinCover: return within_group_sparsity_penalty(x, m.groups, *within_variant(m.kind));
  }
  throw DimensionError("model_penalty: unknown model");
}

inline TuPenaltySpec model_spec(const Model& m) {
  switch (m.kind) {
    case ModelKind::Intersection: return intersection_spec(m.groups);
    case ModelKind::LatentGroup: return latent_group_spec(m.groups);
    case ModelKind::Tree: return tree_spec(m.tree);
    case ModelKind::Knapsack: return knapsack_spec(m.groups);
    case ModelKind::Dispersive: return dispersive_spec(m.budget_matrix());
    case ModelKind::Pairwise: return pairwise_spec(m.graph_size, m.edges);
    case ModelKind::SparseCover: return sparse_g_cover_spec(m.groups, m.max_groups);
    case ModelKind::WithinIntersection:
    case ModelKind::WithinCover: return within_group_spec(m.groups, *within_variant(m.kind));
  }
  throw DimensionError("model_spec: unknown model");
}

/// A model with its linear encoding certified once, evaluating penalties
/// and envelopes (closed form where one exists, the LP otherwise).
class ModelEvaluator {
 public:
  explicit ModelEvaluator(Model m) : model_(std::move(m)), spec_(model_spec(model_)) { spec_.verify(); }

  const Model& model() const noexcept { return model_; }
  const TuPenaltySpec& spec() const noexcept { return spec_; }
  std::size_t p() const { return model_.p(); }

  PenaltyValue penalty(const Eigen::VectorXd& x) const { return model_penalty(model_, x); }

  EnvelopeValue envelope(const Eigen::VectorXd& x) const {
    EnvelopeValue out;
    out.tu = spec_.verdict;
    switch (model_.kind) {
      case ModelKind::Intersection: out.value = group_intersection_envelope(x, model_.groups); break;
      case ModelKind::Tree: out.value = tree_envelope(x, model_.tree); break;
      case ModelKind::Knapsack: out.value = knapsack_envelope(x, model_.budget_matrix()); break;
      case ModelKind::Dispersive: out.value = dispersive_l0_envelope(x, model_.budget_matrix()); break;
      case ModelKind::Pairwise: out.value = pairwise_dispersive_envelope(x, model_.edges); break;
      case ModelKind::WithinIntersection:
      case ModelKind::WithinCover:
        out.value = sparse_group_surrogate(x, model_.groups, *within_variant(model_.kind));
        break;
      case ModelKind::LatentGroup:
      case ModelKind::SparseCover: return tu_envelope_lp(spec_, x);
    }
    return out;
  }

  /// The generic relaxation LP on the model's encoding.
  EnvelopeValue envelope_lp(const Eigen::VectorXd& x) const { return tu_envelope_lp(spec_, x); }

 private:
  Model model_;
  TuPenaltySpec spec_;
};

}  // namespace tumod

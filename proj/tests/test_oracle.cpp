#include <gtest/gtest.h>

#include <random>

#include "tumod/models.hpp"
#include "tumod/oracle.hpp"
#include "test_util.hpp"

namespace tumod {
namespace {

using Vec = Eigen::VectorXd;
using testing_util::at_most;
using testing_util::same_value;

Vec v2(double a, double b) {
  Vec x(2);
  x << a, b;
  return x;
}

auto l0 = [](const Vec& x) { return PenaltyValue::finite(static_cast<double>(SupportVector::of(x).count())); };

TEST(Tabulate, Examples) {
  const auto t = tabulate(l0, 2);
  ASSERT_EQ(t.size(), 4u);
  EXPECT_EQ(t[0].value(), 0.0);
  EXPECT_EQ(t[1].value(), 1.0);
  EXPECT_EQ(t[2].value(), 1.0);
  EXPECT_EQ(t[3].value(), 2.0);
  EXPECT_TRUE(t.normalized());

  const auto g = GroupStructure::from_one_based(2, {{1, 2}});
  const auto k = tabulate([&](const Vec& x) { return knapsack_penalty(x, g); }, 2);
  EXPECT_EQ(k[1].value(), 1.0);
  EXPECT_EQ(k[2].value(), 1.0);
  EXPECT_TRUE(k[3].is_infinite());

  const auto tree = TreeStructure::from_one_based_parents({0, 1});
  const auto c = tabulate([&](const Vec& x) { return tree_l0_penalty(x, tree); }, 2);
  EXPECT_EQ(c[1].value(), 1.0);
  EXPECT_TRUE(c[2].is_infinite());
  EXPECT_EQ(c[3].value(), 2.0);
}

TEST(Tabulate, Limits) {
  EXPECT_THROW(tabulate(l0, kTabulateMaxP + 1), SizeError);
  EXPECT_THROW(SupportFunctionTable(1, {PenaltyValue::infinity(), PenaltyValue::finite(1)}), DimensionError);
  EXPECT_THROW(SupportFunctionTable(2, {PenaltyValue::finite(0)}), DimensionError);
}

TEST(Tabulate, ThreadedMatchesSerial) {
  const auto g = appendix_interval_groups();
  const auto small = GroupStructure::from_one_based(12, {{1, 2, 3, 4}, {4, 5, 6, 7}, {7, 8, 9, 10}, {10, 11, 12}});
  auto pen = [&](const Vec& x) { return group_cover_penalty(x, small); };
  const auto a = tabulate(pen, 12, 1), b = tabulate(pen, 12, 4);
  for (std::uint64_t m = 0; m < a.size(); ++m) ASSERT_EQ(a[m], b[m]);
  (void)g;
}

TEST(Conjugate, Examples) {
  const auto t = tabulate(l0, 2);
  EXPECT_EQ(conjugate(t, v2(0.5, 0.5)), 0.0);
  EXPECT_EQ(conjugate(t, v2(2.0, -3.0)), 3.0);
  EXPECT_EQ(conjugate(t, v2(2.0, 0.5)), 1.0);
  EXPECT_THROW(conjugate(t, Vec::Zero(3)), DimensionError);
}

TEST(Biconjugate, Examples) {
  const auto t = tabulate(l0, 2);
  EXPECT_NEAR(biconjugate(t, v2(0.5, -0.5)).value(), 1.0, 1e-9);
  EXPECT_TRUE(biconjugate(t, v2(1.5, 0)).is_infinite());

  const auto g = GroupStructure::from_one_based(3, {{1, 2}, {2, 3}});
  const auto gt = tabulate([&](const Vec& x) { return group_cover_penalty(x, g); }, 3);
  Vec x(3);
  x << 1, 0, 1;
  EXPECT_NEAR(biconjugate(gt, x).value(), 2.0, 1e-9);

  const auto tree = TreeStructure::from_one_based_parents({0, 1});
  const auto ct = tabulate([&](const Vec& y) { return tree_l0_penalty(y, tree); }, 2);
  EXPECT_NEAR(biconjugate(ct, v2(0, 0.5)).value(), 1.0, 1e-9);
}

TEST(Biconjugate, UnreachableCoordinateIsInfinite) {
  const auto g = GroupStructure::from_one_based(2, {{1}});
  const auto t = tabulate([&](const Vec& x) { return group_cover_penalty(x, g); }, 2);
  EXPECT_TRUE(biconjugate(t, v2(0, 0.1)).is_infinite());
  EXPECT_TRUE(biconjugate_min_form(t, v2(0, 0.1)).is_infinite());
  EXPECT_NEAR(biconjugate(t, v2(0.3, 0)).value(), 0.3, 1e-9);
}

std::vector<Model> oracle_models(std::mt19937_64& rng) {
  std::vector<Model> out;
  const std::size_t p = 2 + rng() % 5, m = 1 + rng() % 4;
  const auto g = testing_util::random_structure(rng, p, m, {.weighted = true});
  const auto cover = testing_util::random_structure(rng, p, m, {.cover_all = true});
  out.push_back(Model::with_groups(ModelKind::Intersection, g));
  out.push_back(Model::with_groups(ModelKind::LatentGroup, g));
  out.push_back(Model::with_groups(ModelKind::Knapsack, cover));
  out.push_back(Model::with_groups(ModelKind::Dispersive, g));
  out.push_back(Model::with_groups(ModelKind::SparseCover, cover, 1 + rng() % m));
  out.push_back(Model::with_groups(ModelKind::WithinIntersection, g));
  out.push_back(Model::with_groups(ModelKind::WithinCover, g));
  out.push_back(Model::with_tree(testing_util::random_tree(rng, p)));
  out.push_back(Model::with_graph(p, testing_util::random_bipartite_edges(rng, p)));
  return out;
}

TEST(OracleProperty, MinFormAgrees) {
  std::mt19937_64 rng(101);
  for (int t = 0; t < 25; ++t)
    for (const auto& model : oracle_models(rng)) {
      const ModelEvaluator ev(model);
      const auto table = tabulate([&](const Vec& x) { return ev.penalty(x); }, ev.p());
      for (int k = 0; k < 3; ++k) {
        const Vec x = testing_util::random_box_point(rng, ev.p());
        ASSERT_TRUE(same_value(biconjugate(table, x), biconjugate_min_form(table, x), 1e-7))
            << model_name(model.kind);
      }
    }
}

TEST(OracleProperty, SignSymmetricAndBelowPenalty) {
  std::mt19937_64 rng(103);
  for (int t = 0; t < 20; ++t)
    for (const auto& model : oracle_models(rng)) {
      const ModelEvaluator ev(model);
      const auto table = tabulate([&](const Vec& x) { return ev.penalty(x); }, ev.p());
      const Vec x = testing_util::random_box_point(rng, ev.p());
      const auto v = biconjugate(table, x);
      EXPECT_TRUE(same_value(v, biconjugate(table, -x), 1e-8));
      EXPECT_TRUE(same_value(v, biconjugate(table, x.cwiseAbs()), 1e-8));
      EXPECT_TRUE(at_most(v, ev.penalty(x), 1e-8)) << model_name(model.kind);
      // the envelope is a lower bound on F and convex, so it cannot exceed F**
      EXPECT_TRUE(at_most(ev.envelope(x).value, v, 1e-7)) << model_name(model.kind);
    }
}

TEST(OracleProperty, CertifiedEnvelopesEqualBiconjugate) {
  std::mt19937_64 rng(107);
  int checked = 0;
  for (int t = 0; t < 25; ++t)
    for (const auto& model : oracle_models(rng)) {
      const ModelEvaluator ev(model);
      if (!ev.spec().certified_tu()) continue;
      const auto table = tabulate([&](const Vec& x) { return ev.penalty(x); }, ev.p());
      for (int k = 0; k < 4; ++k) {
        const Vec x = testing_util::random_box_point(rng, ev.p());
        ++checked;
        ASSERT_TRUE(same_value(ev.envelope(x).value, biconjugate(table, x), 1e-6))
            << model_name(model.kind) << " x=" << x.transpose();
      }
    }
  EXPECT_GT(checked, 300);
}

}  // namespace
}  // namespace tumod

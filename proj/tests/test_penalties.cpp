#include <gtest/gtest.h>

#include <random>

#include "tumod/penalties.hpp"
#include "test_util.hpp"

namespace tumod {
namespace {

using Vec = Eigen::VectorXd;

GroupStructure figure_one() {
  return GroupStructure::from_one_based(7, {{2}, {1, 3, 4}, {2, 3, 6}, {5, 6}, {5, 7}});
}
GroupStructure two_overlapping() { return GroupStructure::from_one_based(3, {{1, 2}, {2, 3}}); }

/// x with the given 1-based support and arbitrary nonzero magnitudes.
Vec supported(std::size_t p, const std::vector<std::size_t>& one_based) {
  Vec x = Vec::Zero(static_cast<Eigen::Index>(p));
  double v = 0.3;
  for (auto i : one_based) {
    x[static_cast<Eigen::Index>(i - 1)] = v;
    v = -v * 1.7;
  }
  return x;
}

/// Test-side oracle: cheapest covering subset by plain 2^M enumeration.
PenaltyValue subset_cover_oracle(const GroupStructure& g, const SupportVector& s,
                                 const std::vector<double>& cost, std::size_t max_size = 64) {
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << g.num_groups()); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) > max_size) continue;
    bool ok = true;
    for (auto i : s.indices()) {
      bool hit = false;
      for (std::size_t k = 0; k < g.num_groups(); ++k) hit = hit || ((mask >> k & 1) && g.contains(k, i));
      ok = ok && hit;
    }
    if (!ok) continue;
    double c = 0.0;
    for (std::size_t k = 0; k < g.num_groups(); ++k)
      if (mask >> k & 1) c += cost[k];
    best = std::min(best, c);
  }
  return std::isinf(best) ? PenaltyValue::infinity() : PenaltyValue::finite(best);
}

TEST(PenaltyValue, OrderingAndPrinting) {
  const auto inf = PenaltyValue::infinity();
  const auto two = PenaltyValue::finite(2.0);
  EXPECT_LT(two, inf);
  EXPECT_EQ(inf, PenaltyValue::infinity());
  EXPECT_NE(two, inf);
  EXPECT_EQ(to_string(inf), "inf");
  EXPECT_EQ(to_string(two), "2.000000");
  EXPECT_EQ(PenaltyValue::finite(-1e-12).value(), 0.0);
  EXPECT_THROW(PenaltyValue::finite(-1.0), DimensionError);
  EXPECT_THROW(PenaltyValue::finite(std::nan("")), DimensionError);
}

TEST(SupportVector, Threshold) {
  Vec x(4);
  x << 0.0, 1e-13, -2e-12, 5.0;
  const auto s = SupportVector::of(x);
  EXPECT_EQ(s.indices(), (std::vector<std::size_t>{2, 3}));
  EXPECT_EQ(s.mask(), 0b1100u);
  EXPECT_EQ(SupportVector::from_mask(4, 0b1100), s);
}

TEST(GroupIntersection, Examples) {
  const auto g = figure_one();
  EXPECT_EQ(group_intersection_penalty(Vec::Zero(7), g).value(), 0.0);
  EXPECT_EQ(group_intersection_penalty(supported(7, {2}), g).value(), 2.0);
  EXPECT_EQ(group_intersection_penalty(supported(7, {1, 2, 3, 4, 5, 6, 7}), g).value(), 5.0);
  EXPECT_THROW(group_intersection_penalty(Vec::Zero(6), g), DimensionError);
}

TEST(GroupCover, Examples) {
  const auto g = figure_one();
  EXPECT_EQ(group_cover_penalty(supported(7, {1, 3, 4}), g).value(), 1.0);
  EXPECT_EQ(group_cover_penalty(supported(7, {1, 2}), g).value(), 2.0);
  EXPECT_TRUE(group_cover_penalty(supported(2, {2}), GroupStructure::from_one_based(2, {{1}})).is_infinite());
  EXPECT_EQ(group_cover_penalty(Vec::Zero(7), g).value(), 0.0);
}

TEST(GroupCover, WeightsAndCap) {
  const auto g = GroupStructure::from_one_based(3, {{1, 2, 3}, {1}, {2}, {3}}, {5.0, 1.0, 1.0, 1.0});
  EXPECT_EQ(group_cover_penalty(supported(3, {1, 2, 3}), g).value(), 3.0);
  EXPECT_EQ(group_cover_penalty(supported(3, {1, 3}), g).value(), 2.0);
  std::vector<std::vector<std::size_t>> many(21, std::vector<std::size_t>{0});
  EXPECT_THROW(group_cover_penalty(Vec::Ones(1), GroupStructure(1, many)), SizeError);
  EXPECT_EQ(group_cover_penalty(Vec::Zero(1), GroupStructure(1, many)).value(), 0.0);
}

TEST(WithinGroup, Examples) {
  const auto g = two_overlapping();
  for (auto v : {WithinGroupVariant::Intersection, WithinGroupVariant::Cover})
    EXPECT_EQ(within_group_sparsity_penalty(Vec::Zero(3), g, v).value(), 0.0);
  EXPECT_EQ(within_group_sparsity_penalty(supported(3, {2}), g, WithinGroupVariant::Intersection).value(), 2.0);
  EXPECT_EQ(within_group_sparsity_penalty(supported(3, {2}), g, WithinGroupVariant::Cover).value(), 1.0);
  EXPECT_EQ(within_group_sparsity_penalty(supported(3, {1, 2, 3}), g, WithinGroupVariant::Intersection).value(),
            4.0);
  EXPECT_EQ(within_group_sparsity_penalty(supported(3, {1, 2, 3}), g, WithinGroupVariant::Cover).value(), 4.0);
  EXPECT_EQ(within_group_sparsity_penalty(supported(3, {1, 2}), g, WithinGroupVariant::Cover).value(), 2.0);
  const auto partial = GroupStructure::from_one_based(2, {{1}});
  EXPECT_TRUE(within_group_sparsity_penalty(supported(2, {2}), partial, WithinGroupVariant::Cover).is_infinite());
}

TEST(SparseGCover, Examples) {
  const auto app = appendix_interval_groups();
  EXPECT_EQ(sparse_g_cover_penalty(supported(200, {1, 4, 9}), app, 1).value(), 3.0);
  EXPECT_TRUE(sparse_g_cover_penalty(supported(200, {1, 4, 19}), app, 1).is_infinite());
  EXPECT_EQ(sparse_g_cover_penalty(supported(200, {1, 4, 19}), app, 2).value(), 3.0);
  const auto g = two_overlapping();
  EXPECT_TRUE(sparse_g_cover_penalty(supported(3, {1, 3}), g, 1).is_infinite());
  EXPECT_EQ(sparse_g_cover_penalty(Vec::Zero(3), g, 0).value(), 0.0);
  EXPECT_EQ(sparse_g_cover_penalty(Vec::Zero(3), g, 2).value(), 0.0);
}

TEST(TreeL0, Examples) {
  const auto t = TreeStructure::from_one_based_parents({0, 1, 1});
  EXPECT_EQ(tree_l0_penalty(supported(3, {1, 2}), t).value(), 2.0);
  EXPECT_TRUE(tree_l0_penalty(supported(3, {2}), t).is_infinite());
  EXPECT_EQ(tree_l0_penalty(Vec::Zero(3), t).value(), 0.0);
}

TEST(Knapsack, Examples) {
  const auto g = figure_one();
  EXPECT_EQ(knapsack_penalty(Vec::Zero(7), g).value(), 0.0);
  EXPECT_EQ(knapsack_penalty(supported(7, {1, 5}), g).value(), 1.0);
  EXPECT_TRUE(knapsack_penalty(supported(7, {5, 7}), g).is_infinite());
}

TEST(DispersiveL0, Examples) {
  const auto d = refractoriness_matrix(6, 3);
  EXPECT_EQ(dispersive_l0_penalty(supported(6, {1, 4}), d).value(), 2.0);
  EXPECT_TRUE(dispersive_l0_penalty(supported(6, {1, 2}), d).is_infinite());
  EXPECT_EQ(dispersive_l0_penalty(Vec::Zero(6), d).value(), 0.0);
  EXPECT_THROW(dispersive_l0_penalty(Vec::Zero(5), d), DimensionError);
}

TEST(PairwiseDispersive, Examples) {
  const std::vector<Edge> chain{{0, 1}, {1, 2}};
  EXPECT_EQ(pairwise_dispersive_penalty(supported(3, {1, 3}), chain).value(), 0.0);
  EXPECT_EQ(pairwise_dispersive_penalty(supported(3, {1, 2, 3}), chain).value(), 2.0);
  EXPECT_EQ(pairwise_dispersive_penalty(Vec::Zero(3), chain).value(), 0.0);
  EXPECT_THROW(pairwise_dispersive_penalty(Vec::Zero(3), {{0, 3}}), DimensionError);
}

// --- properties ---

Vec random_signal(std::mt19937_64& rng, std::size_t p) {
  std::bernoulli_distribution on(0.45);
  std::normal_distribution<double> mag;
  Vec x = Vec::Zero(static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < p; ++i)
    if (on(rng)) x[static_cast<Eigen::Index>(i)] = mag(rng) + (mag(rng) > 0 ? 0.1 : -0.1);
  return x;
}

TEST(PenaltyProperty, CoverMatchesSubsetEnumeration) {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 300; ++t) {
    const std::size_t p = 2 + t % 6, m = 1 + t % 7;
    const auto g = testing_util::random_structure(rng, p, m, {.weighted = t % 2 == 0});
    const Vec x = random_signal(rng, p);
    const auto s = SupportVector::of(x);
    EXPECT_TRUE(testing_util::same_value(group_cover_penalty(x, g), subset_cover_oracle(g, s, g.weights()), 1e-12));
    std::vector<double> hits(m, 0.0);
    for (std::size_t k = 0; k < m; ++k)
      for (auto j : g.group(k)) hits[k] += s[j];
    EXPECT_TRUE(testing_util::same_value(within_group_sparsity_penalty(x, g, WithinGroupVariant::Cover),
                                        subset_cover_oracle(g, s, hits), 1e-12));
    for (std::size_t G = 0; G <= m; ++G) {
      const bool coverable = subset_cover_oracle(g, s, std::vector<double>(m, 1.0), G).is_finite();
      const auto v = sparse_g_cover_penalty(x, g, G);
      EXPECT_EQ(v.is_finite(), coverable);
      if (coverable) {
        EXPECT_EQ(v.value(), static_cast<double>(s.count()));
      }
    }
  }
}

TEST(PenaltyProperty, DependOnlyOnSupport) {
  std::mt19937_64 rng(53);
  std::normal_distribution<double> n;
  for (int t = 0; t < 200; ++t) {
    const std::size_t p = 3 + t % 5;
    const auto g = testing_util::random_structure(rng, p, 1 + t % 4, {.weighted = true});
    const Vec x = random_signal(rng, p);
    Vec y = x;
    for (Eigen::Index i = 0; i < y.size(); ++i)
      if (y[i] != 0.0) y[i] = n(rng) > 0 ? 0.01 : -7.0;
    const auto bT = biadjacency(g).transpose();
    EXPECT_EQ(group_intersection_penalty(x, g), group_intersection_penalty(y, g));
    EXPECT_EQ(group_cover_penalty(x, g), group_cover_penalty(y, g));
    EXPECT_EQ(knapsack_penalty(x, g), knapsack_penalty(y, g));
    EXPECT_EQ(dispersive_l0_penalty(x, bT), dispersive_l0_penalty(y, bT));
    for (auto v : {WithinGroupVariant::Intersection, WithinGroupVariant::Cover})
      EXPECT_EQ(within_group_sparsity_penalty(x, g, v), within_group_sparsity_penalty(y, g, v));
  }
}

TEST(PenaltyProperty, MonotoneUnderSupportGrowth) {
  std::mt19937_64 rng(57);
  for (int t = 0; t < 300; ++t) {
    const std::size_t p = 3 + t % 5;
    const auto g = testing_util::random_structure(rng, p, 1 + t % 5, {.weighted = true});
    Vec x = random_signal(rng, p);
    Vec bigger = x;
    bigger[static_cast<Eigen::Index>(t % p)] = 0.5;
    const auto a = group_intersection_penalty(x, g), b = group_intersection_penalty(bigger, g);
    EXPECT_LE(a.value(), b.value() + 1e-12);
    const auto c = group_cover_penalty(x, g), d = group_cover_penalty(bigger, g);
    if (c.is_finite() && d.is_finite()) {
      EXPECT_LE(c.value(), d.value() + 1e-12);
    }
  }
}

TEST(PenaltyProperty, KnapsackAndDispersiveShareFeasibility) {
  std::mt19937_64 rng(59);
  for (int t = 0; t < 300; ++t) {
    const std::size_t p = 2 + t % 6;
    const auto g = testing_util::random_structure(rng, p, 1 + t % 4, {.weighted = false});
    const Vec x = random_signal(rng, p);
    EXPECT_EQ(knapsack_penalty(x, g).is_finite(),
              dispersive_l0_penalty(x, biadjacency(g).transpose()).is_finite());
  }
}

TEST(PenaltyProperty, UnitCoverBoundedByGroupCount) {
  std::mt19937_64 rng(61);
  for (int t = 0; t < 300; ++t) {
    const std::size_t p = 2 + t % 6, m = 1 + t % 6;
    const auto g = testing_util::random_structure(rng, p, m, {.weighted = false});
    const Vec x = random_signal(rng, p);
    const auto v = group_cover_penalty(x, g);
    if (v.is_infinite()) continue;
    EXPECT_LE(v.value(), static_cast<double>(m));
    EXPECT_EQ(v.value() == 0.0, SupportVector::of(x).empty());
  }
}

}  // namespace
}  // namespace tumod

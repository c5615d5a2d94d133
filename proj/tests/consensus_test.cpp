#include <gtest/gtest.h>

#include <limits>

#include "genrecomm/consensus.hpp"
#include "oracles.hpp"

using namespace genrecomm;
using genrecomm::oracle::make_graph;

namespace {

GenreGraph disjoint_cliques(std::initializer_list<std::size_t> sizes, double w) {
  std::size_t n = 0;
  for (auto s : sizes) n += s;
  auto g = make_graph(n);
  std::size_t base = 0;
  for (auto s : sizes) {
    for (std::size_t i = 0; i < s; ++i)
      for (std::size_t j = i + 1; j < s; ++j) g.set_weight(base + i, base + j, w);
    base += s;
  }
  return g;
}

std::set<std::set<NodeId>> groups_of(const Partition& p) {
  std::set<std::set<NodeId>> out;
  for (const auto& m : p.members()) out.emplace(m.begin(), m.end());
  return out;
}

}  // namespace

TEST(EpsilonMax, TableValues) {
  EXPECT_EQ(epsilon_max({51, 47, 11}), 2411u);
  EXPECT_EQ(epsilon_max({109}), 5886u);
  EXPECT_EQ(epsilon_max({1}), 0u);
  EXPECT_EQ(epsilon_max(std::initializer_list<std::size_t>{}), 0u);
  EXPECT_THROW(epsilon_max({3, 0}), std::invalid_argument);
}

TEST(EpsilonMax, OfGraphUsesComponents) {
  auto g = disjoint_cliques({3, 4}, 1.0);
  g.set_weight(0, 3, 1.0);
  EXPECT_EQ(epsilon_max(g), 21u);  // one component of 7
  EXPECT_LE(g.num_edges(), epsilon_max(g));
}

TEST(ConsensusRound, SaturatedCliquesAreFixedPoint) {
  auto g = disjoint_cliques({3, 4}, 10.0);
  g.set_kind(WeightKind::coassignment_count);
  auto s = ConsensusState::make(g, 10, 1);
  EXPECT_TRUE(s.converged);
  auto next = consensus_round(s, 5);
  EXPECT_EQ(next.graph, g);
  EXPECT_TRUE(next.converged);
  EXPECT_EQ(next.round, 2u);
}

TEST(ConsensusRound, TwoCliquesWeakBridgeSeparate) {
  auto g = oracle::two_cliques(6, 0.1);
  auto s = consensus_round(ConsensusState::make(g, 100, 0), 0);
  EXPECT_EQ(s.graph.kind(), WeightKind::coassignment_count);
  EXPECT_EQ(s.graph.weight(5, 6), 0.0);
  for (NodeId c : {0u, 6u})
    for (NodeId i = 0; i < 6; ++i)
      for (NodeId j = i + 1; j < 6; ++j) EXPECT_EQ(s.graph.weight(c + i, c + j), 100.0);
  EXPECT_EQ(s.num_edges, 30u);
  EXPECT_EQ(s.num_components, 2u);
  EXPECT_EQ(s.epsilon_max, 30u);
  EXPECT_TRUE(s.converged);
}

TEST(ConsensusRound, WeightsBoundedByRuns) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto g = oracle::random_graph(20, 0.25, seed);
    auto s = consensus_round(ConsensusState::make(g, 17, 0), seed);
    for (const auto& [k, w] : s.graph.edge_map()) {
      EXPECT_GT(w, 0.0);
      EXPECT_LE(w, 17.0);
    }
    EXPECT_LE(s.num_edges, s.epsilon_max);
  }
}

TEST(ConsensusRound, ParallelMatchesSerial) {
  auto g = oracle::random_graph(30, 0.2, 8);
  auto s0 = ConsensusState::make(g, 40, 0);
  EXPECT_EQ(consensus_round(s0, 3, 1).graph, consensus_round(s0, 3, 4).graph);
}

TEST(RunToConvergence, DisjointTriangles) {
  auto res = run_to_convergence(disjoint_cliques({3, 3}, 1.0), {100, 0, 50, 0});
  EXPECT_EQ(res.trace.size(), 2u);
  EXPECT_EQ(res.partition.num_communities, 2u);
  EXPECT_EQ(res.final_state.round, 1u);
}

TEST(RunToConvergence, SingleClique) {
  auto res = run_to_convergence(disjoint_cliques({6}, 1.0), {100, 0, 50, 0});
  EXPECT_EQ(res.partition.num_communities, 1u);
  EXPECT_EQ(res.trace.back().round, 1u);
}

TEST(RunToConvergence, RecoversPlantedPartition) {
  auto g = oracle::planted_partition(4, 8, 2024);
  auto res = run_to_convergence(g, {100, 7, 50, 0});
  std::set<std::set<NodeId>> planted;
  for (NodeId b = 0; b < 32; b += 8) planted.insert({b, b + 1, b + 2, b + 3, b + 4, b + 5, b + 6, b + 7});
  EXPECT_EQ(groups_of(res.partition), planted);
}

TEST(RunToConvergence, FinalStateIsCliques) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto g = oracle::random_graph(18, 0.3, seed);
    auto res = run_to_convergence(g, {30, seed, 50, 0});
    const auto& fs = res.final_state;
    EXPECT_EQ(fs.num_edges, fs.epsilon_max);
    for (const auto& [k, w] : fs.graph.edge_map()) {
      EXPECT_GT(w, 0.0);
      EXPECT_LE(w, 30.0);
    }
    EXPECT_EQ(res.partition.num_communities, fs.num_components);
  }
}

TEST(RunToConvergence, NonConvergenceCarriesTrace) {
  // One round is not enough to saturate this graph.
  auto g = oracle::random_graph(30, 0.3, 77);
  ConsensusParams p{5, 1, 1, 0};
  try {
    auto res = run_to_convergence(g, p);
    EXPECT_EQ(res.trace.size(), 2u);  // converged immediately; nothing more to check
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.trace().size(), 2u);
    EXPECT_EQ(e.trace()[0].round, 0u);
  }
  EXPECT_THROW(run_to_convergence(g, {0, 0, 5, 0}), std::invalid_argument);
  EXPECT_THROW(run_to_convergence(g, {5, 0, 0, 0}), std::invalid_argument);
}

TEST(RunToConvergence, Deterministic) {
  auto g = oracle::random_graph(25, 0.25, 4);
  auto a = run_to_convergence(g, {50, 9, 50, 1});
  auto b = run_to_convergence(g, {50, 9, 50, 3});
  EXPECT_EQ(a.partition, b.partition);
  EXPECT_EQ(a.trace, b.trace);
}

TEST(SplitCluster, TwoCliquesBecomeChildren) {
  auto g = oracle::two_cliques(4, 0.1);
  auto split = split_cluster(g, g.names(), "3", {100, 0, 50, 0});
  ASSERT_EQ(split.children.size(), 2u);
  EXPECT_EQ(split.children[0].label, "3.1");
  EXPECT_EQ(split.children[1].label, "3.2");
  EXPECT_EQ(split.children[0].genres, (std::vector<std::string>{"g000", "g001", "g002", "g003"}));
  EXPECT_DOUBLE_EQ(split.children[0].avg_intra_weight, 1.0);
}

TEST(SplitCluster, EdgelessClusterNotSplit) {
  auto g = make_graph(3);
  EXPECT_TRUE(split_cluster(g, g.names(), "1", {}).children.empty());
}

TEST(SplitCluster, CliqueStaysLeaf) {
  auto g = disjoint_cliques({5}, 2.0);
  EXPECT_TRUE(split_cluster(g, g.names(), "1", {100, 0, 50, 0}).children.empty());
}

TEST(SplitCluster, UsesOriginalWeights) {
  auto g = oracle::two_cliques(4, 0.1);
  for (NodeId i = 0; i < 4; ++i)
    for (NodeId j = i + 1; j < 4; ++j) g.set_weight(i, j, 7.0);
  auto split = split_cluster(g, g.names(), "1", {20, 0, 50, 0});
  ASSERT_EQ(split.children.size(), 2u);
  EXPECT_DOUBLE_EQ(split.children[0].avg_intra_weight, 7.0);
}

// Parent mean (12 + 0.1) / 13 < 1 = pooled children mean: split kept.
TEST(Hierarchy, SplitAcceptedWhenMeanWeightRises) {
  auto g = oracle::two_cliques(4, 0.1);
  ClusterNode node{"2", g.names(), avg_intra_weight(g, g.names()), {}};
  EXPECT_NEAR(node.avg_intra_weight, 12.1 / 13.0, 1e-12);
  Hierarchy h;
  detail::split_recursive(g, node, 1, {100, 0, 50, 0}, {4, 3}, h);
  ASSERT_EQ(node.children.size(), 2u);
  EXPECT_DOUBLE_EQ(pooled_intra_weight(g, node.children), 1.0);
  EXPECT_TRUE(h.warnings.empty());
}

// Uniform weights: children mean equals parent mean, so the split is rolled back.
TEST(Hierarchy, SplitRolledBackWithoutImprovement) {
  auto g = oracle::two_cliques(4, 1.0);
  ClusterNode node{"2", g.names(), avg_intra_weight(g, g.names()), {}};
  Hierarchy h;
  detail::split_recursive(g, node, 1, {100, 0, 50, 0}, {4, 3}, h);
  EXPECT_TRUE(node.children.empty());
  ASSERT_EQ(h.warnings.size(), 1u);
}

TEST(Hierarchy, DepthLimitStopsSplitting) {
  auto g = oracle::two_cliques(4, 0.1);
  ClusterNode node{"2", g.names(), avg_intra_weight(g, g.names()), {}};
  Hierarchy h;
  detail::split_recursive(g, node, 3, {100, 0, 50, 0}, {4, 3}, h);
  EXPECT_TRUE(node.children.empty());
}

TEST(Hierarchy, UnboundedSizeGivesSingleLayer) {
  auto g = oracle::planted_partition(4, 8, 5);
  SplitPolicy policy{std::numeric_limits<std::size_t>::max(), 3};
  auto h = hierarchical_pipeline(g, {100, 1, 50, 0}, policy);
  ASSERT_FALSE(h.root.children.empty());
  for (const auto& c : h.root.children) EXPECT_TRUE(c.is_leaf());
  EXPECT_EQ(h.traces.size(), 1u);
}

TEST(Hierarchy, LeavesPartitionNodesAndRunIsDeterministic) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto g = oracle::planted_partition(3, 10, seed);
    ConsensusParams params{40, seed, 50, 0};
    SplitPolicy policy{6, 3};
    auto h = hierarchical_pipeline(g, params, policy);
    std::multiset<std::string> seen;
    for (const auto* leaf : leaves(h.root)) seen.insert(leaf->genres.begin(), leaf->genres.end());
    EXPECT_EQ(seen, std::multiset<std::string>(g.names().begin(), g.names().end()));
    EXPECT_EQ(hierarchical_pipeline(g, params, policy).root, h.root);
  }
}

TEST(Hierarchy, JsonRoundTrip) {
  auto g = oracle::planted_partition(3, 6, 1);
  auto h = hierarchical_pipeline(g, {30, 0, 50, 0}, {4, 3});
  auto j = nlohmann::json::parse(to_json(h.root).dump());
  EXPECT_EQ(cluster_from_json(j), h.root);
  EXPECT_EQ(j.at("label"), "root");
  EXPECT_TRUE(j.at("children").is_array());
}

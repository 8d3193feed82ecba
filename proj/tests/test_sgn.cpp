#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "oracles.hpp"
#include "subgcn/error.hpp"
#include "subgcn/sgn.hpp"

using namespace subgcn;

namespace {

// Entities a=0, b=1, c=2, d=3, ...
KnowledgeGraph graph(std::size_t n, std::vector<RelationTriple> triples) {
  std::vector<std::string> ents(n);
  for (std::size_t i = 0; i < n; ++i) ents[i] = std::string(1, static_cast<char>('a' + i));
  return KnowledgeGraph(ents, {"r1", "r2"}, {}, std::move(triples), {});
}

std::set<std::pair<std::size_t, std::size_t>> link_set(const SubgraphNetwork& s) {
  return {s.links.begin(), s.links.end()};
}

}  // namespace

TEST(Skeleton, ErasesDirectionAndRelation) {
  auto s = build_skeleton(graph(2, {{0, 0, 1}, {1, 1, 0}}));
  EXPECT_EQ(s.edges, (std::vector<Edge>{{0, 1}}));
}

TEST(Skeleton, DropsSelfLoops) {
  auto s = build_skeleton(graph(1, {{0, 0, 0}}));
  EXPECT_TRUE(s.edges.empty());
  EXPECT_EQ(s.dropped_self_loops, 1u);
}

TEST(Skeleton, PathAndDegrees) {
  auto s = build_skeleton(graph(4, {{0, 0, 1}, {1, 0, 2}}));
  EXPECT_EQ(s.edges, (std::vector<Edge>{{0, 1}, {1, 2}}));
  EXPECT_EQ(s.degrees(), (std::vector<std::size_t>{1, 2, 1, 0}));
  EXPECT_EQ(s.num_nodes, 4u);
}

TEST(Skeleton, EdgesSortedAndNormalized) {
  auto s = build_skeleton(graph(4, {{3, 0, 0}, {2, 1, 1}, {0, 0, 3}, {1, 0, 0}}));
  EXPECT_EQ(s.edges, (std::vector<Edge>{{0, 1}, {0, 3}, {1, 2}}));
}

TEST(Sgn, PathHasOneLink) {
  auto sgn = build_sgn(build_skeleton(graph(3, {{0, 0, 1}, {1, 0, 2}})));
  EXPECT_EQ(sgn.lines.size(), 2u);
  EXPECT_EQ(sgn.links, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}}));
}

TEST(Sgn, TriangleGivesTriangle) {
  auto sgn = build_sgn(build_skeleton(graph(3, {{0, 0, 1}, {1, 0, 2}, {2, 0, 0}})));
  EXPECT_EQ(sgn.lines.size(), 3u);
  EXPECT_EQ(sgn.links.size(), 3u);
}

TEST(Sgn, StarGivesComplete) {
  // center c=2, leaves x,y,z = 0,1,3
  auto sgn = build_sgn(build_skeleton(graph(4, {{2, 0, 0}, {2, 0, 1}, {3, 1, 2}})));
  EXPECT_EQ(sgn.lines.size(), 3u);
  EXPECT_EQ(link_set(sgn), (std::set<std::pair<std::size_t, std::size_t>>{{0, 1}, {0, 2}, {1, 2}}));
}

TEST(Sgn, DisjointEdgesHaveNoLinks) {
  auto sgn = build_sgn(build_skeleton(graph(4, {{0, 0, 1}, {2, 0, 3}})));
  EXPECT_EQ(sgn.lines.size(), 2u);
  EXPECT_TRUE(sgn.links.empty());
}

TEST(Sgn, EmptyGraph) {
  auto sgn = build_sgn(build_skeleton(graph(3, {})));
  EXPECT_TRUE(sgn.lines.empty());
  EXPECT_TRUE(sgn.links.empty());
  EXPECT_EQ(subgraph_features(graph(3, {}), sgn).nnz(), 0u);
}

TEST(Sgn, HigherOrderRejected) {
  try {
    build_sgn(build_skeleton(graph(2, {{0, 0, 1}})), 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
  }
}

TEST(Sgn, MatchesBruteForceAndReference) {
  Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    auto kg = oracle::random_graph(2 + rng.below(12), 0.35, rng);
    auto skel = build_skeleton(kg);
    auto sgn = build_sgn(skel);
    EXPECT_EQ(sgn.lines, skel.edges);
    EXPECT_EQ(link_set(sgn), oracle::brute_force_line_graph(sgn.lines));
    EXPECT_TRUE(std::is_sorted(sgn.links.begin(), sgn.links.end()));
    for (auto [i, j] : sgn.links) EXPECT_LT(i, j);
    auto ref = reference::build_sgn(skel);
    EXPECT_EQ(ref.links, sgn.links);
    EXPECT_EQ(ref.lines, sgn.lines);
  }
}

TEST(Sgn, LinkCountIsSumOfDegreePairs) {
  Rng rng(22);
  for (int trial = 0; trial < 20; ++trial) {
    auto skel = build_skeleton(oracle::random_graph(30, 0.2, rng));
    std::size_t expect = 0;
    for (auto d : skel.degrees()) expect += d * (d > 0 ? d - 1 : 0) / 2;
    EXPECT_EQ(build_sgn(skel).links.size(), expect);
  }
}

TEST(SubgraphFeatures, PathRows) {
  auto kg = graph(4, {{0, 0, 1}, {1, 0, 2}});
  auto f = subgraph_features(kg, build_sgn(build_skeleton(kg)));
  auto d = f.to_dense();
  EXPECT_EQ(oracle::row_vec(d, 0), (std::vector<double>{1, 0}));
  EXPECT_EQ(oracle::row_vec(d, 1), (std::vector<double>{1, 1}));
  EXPECT_EQ(oracle::row_vec(d, 2), (std::vector<double>{0, 1}));
  EXPECT_EQ(oracle::row_vec(d, 3), (std::vector<double>{0, 0}));
}

TEST(SubgraphFeatures, StarCenterRowSumIsDegree) {
  auto kg = graph(4, {{2, 0, 0}, {2, 0, 1}, {3, 1, 2}});
  auto f = subgraph_features(kg, build_sgn(build_skeleton(kg)));
  EXPECT_EQ(f.row_sum(2), 3.0);
}

TEST(SubgraphFeatures, EntityCountMismatchThrows) {
  auto sgn = build_sgn(build_skeleton(graph(3, {{0, 0, 1}})));
  EXPECT_THROW(subgraph_features(graph(4, {{0, 0, 1}}), sgn), Error);
}

TEST(SubgraphFeatures, SaveLinks) {
  auto path = std::filesystem::temp_directory_path() / "subgcn_test_links.tsv";
  save_sgn_links(path, build_sgn(build_skeleton(graph(3, {{0, 0, 1}, {1, 0, 2}}))));
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "0\t1");
  std::filesystem::remove(path);
}

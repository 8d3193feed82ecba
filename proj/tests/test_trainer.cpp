#include <gtest/gtest.h>

#include <filesystem>
#include <numeric>

#include "oracles.hpp"
#include "subgcn/error.hpp"
#include "subgcn/pipeline.hpp"
#include "subgcn/trainer.hpp"

using namespace subgcn;
namespace fs = std::filesystem;

namespace {

std::vector<SeedPair> pairs(std::size_t m) {
  std::vector<SeedPair> out;
  for (Index i = 0; i < m; ++i) out.push_back({i, i});
  return out;
}

DenseMatrix row_matrix(std::vector<std::vector<double>> rows) {
  DenseMatrix m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  return m;
}

double mean(const std::vector<double>& v, std::size_t from, std::size_t to) {
  return std::accumulate(v.begin() + from, v.begin() + to, 0.0) / static_cast<double>(to - from);
}

}  // namespace

TEST(TrainingConfig, Validation) {
  TrainingConfig c;
  EXPECT_NO_THROW(c.validate());
  c.margin_attribute = 0.0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.negatives_per_side = 0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.learning_rate = -1;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.resample_every = 0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.margin_subgraph = 1.5;
  EXPECT_EQ(c.margin(ChannelKind::subgraph), 1.5);
  EXPECT_EQ(c.margin(ChannelKind::structure), 3.0);
}

TEST(Negatives, CountIsTwoKPerPositive) {
  Rng rng(1);
  auto b = sample_negatives(pairs(10), 50, 50, 20, rng);
  EXPECT_EQ(b.num_corrupted(), 400u);
  EXPECT_EQ(b.left.size(), 200u);
  EXPECT_EQ(b.positives.size(), 10u);
}

TEST(Negatives, OnlyCandidateIsForced) {
  Rng rng(2);
  auto b = sample_negatives(std::vector<SeedPair>{{0, 1}}, 2, 2, 1, rng);
  EXPECT_EQ(b.left, (std::vector<Index>{1}));
  EXPECT_EQ(b.right, (std::vector<Index>{0}));
}

TEST(Negatives, NeverTheTrueEntityAndInRange) {
  Rng rng(3);
  auto p = pairs(30);
  auto b = sample_negatives(p, 40, 35, 7, rng);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < 7; ++j) {
      EXPECT_NE(b.left[i * 7 + j], p[i].left);
      EXPECT_NE(b.right[i * 7 + j], p[i].right);
      EXPECT_LT(b.left[i * 7 + j], 40u);
      EXPECT_LT(b.right[i * 7 + j], 35u);
    }
}

TEST(Negatives, DeterministicPerSeed) {
  Rng a(4), b(4);
  auto x = sample_negatives(pairs(5), 20, 20, 3, a);
  auto y = sample_negatives(pairs(5), 20, 20, 3, b);
  EXPECT_EQ(x.left, y.left);
  EXPECT_EQ(x.right, y.right);
}

TEST(Negatives, Errors) {
  Rng rng(5);
  EXPECT_THROW(sample_negatives(pairs(1), 1, 5, 1, rng), Error);
  EXPECT_THROW(sample_negatives(pairs(1), 5, 5, 0, rng), Error);
  EXPECT_THROW(sample_negatives(std::vector<SeedPair>{{9, 0}}, 5, 5, 1, rng), Error);
}

TEST(MarginLoss, InactiveHingeIsZero) {
  // f(pos) = 0, f(neg) = 5, margin 3
  NegativeBatch b{{{0, 0}}, 1, {1}, {}};
  b.right = {1};
  auto e1 = row_matrix({{0.0}, {5.0}});
  auto e2 = row_matrix({{0.0}, {-5.0}});
  auto r = margin_loss(b, e1, e2, 3.0);
  EXPECT_EQ(r.loss, 0.0);
  EXPECT_EQ(r.active_terms, 0u);
  EXPECT_EQ(r.grad[0], DenseMatrix(2, 1));
}

TEST(MarginLoss, ActiveHingeValue) {
  // f(pos) = 2, f(neg) = 1 for both corruptions -> two terms of 4
  NegativeBatch b{{{0, 0}}, 1, {1}, {1}};
  auto e1 = row_matrix({{2.0}, {1.0}});
  auto e2 = row_matrix({{0.0}, {1.0}});
  auto r = margin_loss(b, e1, e2, 3.0);
  EXPECT_DOUBLE_EQ(r.loss, 8.0);
  EXPECT_EQ(r.active_terms, 2u);
  // d/d e1(0) : +1 from each positive distance, -1 from the right corruption (e1(0) - e2(1) = 1)
  EXPECT_DOUBLE_EQ(r.grad[0](0, 0), 2.0 - 1.0);
}

TEST(MarginLoss, MatchesEnumerationOracle) {
  Rng rng(6);
  for (int trial = 0; trial < 25; ++trial) {
    auto e1 = oracle::random_dense(12, 4, rng);
    auto e2 = oracle::random_dense(11, 4, rng);
    auto p = std::vector<SeedPair>{{0, 3}, {5, 1}, {7, 7}};
    auto b = sample_negatives(p, 12, 11, 4, rng);
    const double margin = rng.uniform(0.1, 3.0);
    EXPECT_NEAR(margin_loss(b, e1, e2, margin).loss, oracle::enumerate_margin_loss(b, e1, e2, margin), 1e-12);
  }
}

TEST(MarginLoss, GradientMatchesFiniteDifferences) {
  Rng rng(7);
  auto e1 = oracle::random_dense(8, 3, rng);
  auto e2 = oracle::random_dense(8, 3, rng);
  auto b = sample_negatives(std::vector<SeedPair>{{0, 0}, {1, 2}, {4, 6}}, 8, 8, 3, rng);
  auto r = margin_loss(b, e1, e2, 2.0);
  ASSERT_GT(r.active_terms, 0u);
  auto f = [&] { return margin_loss(b, e1, e2, 2.0).loss; };
  EXPECT_LT(oracle::max_relative_error(r.grad[0], oracle::finite_difference(e1, f)), 1e-4);
  EXPECT_LT(oracle::max_relative_error(r.grad[1], oracle::finite_difference(e2, f)), 1e-4);
}

TEST(MarginLoss, ZeroIffAllHingesInactive) {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    auto e1 = oracle::random_dense(6, 2, rng, -3, 3);
    auto e2 = oracle::random_dense(6, 2, rng, -3, 3);
    auto b = sample_negatives(std::vector<SeedPair>{{0, 0}, {1, 1}}, 6, 6, 2, rng);
    auto r = margin_loss(b, e1, e2, 1.0);
    EXPECT_EQ(r.loss == 0.0, r.active_terms == 0u);
  }
}

TEST(MarginLoss, RejectsBadInput) {
  NegativeBatch b{{{0, 0}}, 1, {1}, {1}};
  EXPECT_THROW(margin_loss(b, DenseMatrix(2, 2), DenseMatrix(2, 3), 1.0), Error);
  auto nan = DenseMatrix(2, 2);
  nan(0, 0) = std::nan("");
  try {
    margin_loss(b, nan, DenseMatrix(2, 2), 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::numeric);
  }
}

namespace {

struct Fixture {
  RunConfig cfg;
  PreparedData prep;
};

Fixture small_fixture(std::size_t n = 50) {
  Fixture f;
  f.cfg.synth_entities = n;
  f.cfg.synth_triples = 4 * n;
  f.cfg.synth_relations = 10;
  f.cfg.synth_attributes = 20;
  f.prep = prepare(generate_synthetic_pair(f.cfg.synthetic()), f.cfg);
  return f;
}

}  // namespace

TEST(TrainChannel, ZeroLearningRateChangesNothing) {
  auto f = small_fixture(20);
  f.cfg.dim_structure = 8;
  auto ch = init_channel(ChannelKind::structure, f.prep, f.cfg);
  const auto w1 = ch.w1();
  const auto h0 = std::get<DenseMatrix>(ch.input(0));
  auto tc = f.cfg.training();
  tc.learning_rate = 0.0;
  tc.epochs = 15;
  auto rep = train_channel(ch, f.prep.adj1, f.prep.adj2, f.prep.data.seeds.train(), tc);
  EXPECT_EQ(ch.w1(), w1);
  EXPECT_EQ(std::get<DenseMatrix>(ch.input(0)), h0);
  EXPECT_EQ(rep.loss_trace.size(), 15u);
}

TEST(TrainChannel, LossDecreasesOnSyntheticFixture) {
  auto f = small_fixture(50);
  auto tc = f.cfg.training();
  tc.epochs = 200;
  for (ChannelKind kind : {ChannelKind::structure, ChannelKind::attribute, ChannelKind::subgraph}) {
    auto ch = init_channel(kind, f.prep, f.cfg);
    auto rep = train_channel(ch, f.prep.adj1, f.prep.adj2, f.prep.data.seeds.train(), tc);
    ASSERT_EQ(rep.loss_trace.size(), 200u);
    EXPECT_LT(mean(rep.loss_trace, 180, 200), mean(rep.loss_trace, 0, 20)) << to_string(kind);
  }
}

TEST(TrainChannel, SameSeedBitwiseIdenticalCheckpoints) {
  auto f = small_fixture(30);
  f.cfg.dim_structure = 16;
  auto tc = f.cfg.training();
  tc.epochs = 25;
  auto run = [&] {
    auto ch = init_channel(ChannelKind::structure, f.prep, f.cfg);
    train_channel(ch, f.prep.adj1, f.prep.adj2, f.prep.data.seeds.train(), tc);
    return ch;
  };
  auto a = run(), b = run();
  EXPECT_EQ(a.w1(), b.w1());
  EXPECT_EQ(a.w2(), b.w2());
  EXPECT_EQ(a.input(0), b.input(0));
}

TEST(TrainChannel, PeriodicCheckpoints) {
  auto f = small_fixture(20);
  f.cfg.dim_subgraph = 4;
  auto tc = f.cfg.training();
  tc.epochs = 6;
  tc.checkpoint_every = 3;
  tc.checkpoint_dir = fs::temp_directory_path() / "subgcn_test_periodic";
  fs::remove_all(tc.checkpoint_dir);
  auto ch = init_channel(ChannelKind::subgraph, f.prep, f.cfg);
  train_channel(ch, f.prep.adj1, f.prep.adj2, f.prep.data.seeds.train(), tc, 99);
  auto [back, meta] = load_checkpoint(tc.checkpoint_dir / "subgraph");
  EXPECT_EQ(meta.epoch, 6u);
  EXPECT_EQ(meta.seed, 99u);
  EXPECT_EQ(back.w1(), ch.w1());
  fs::remove_all(tc.checkpoint_dir);
}

TEST(TrainChannel, DivergenceIsNumericError) {
  auto f = small_fixture(20);
  f.cfg.dim_structure = 8;
  auto ch = init_channel(ChannelKind::structure, f.prep, f.cfg);
  auto tc = f.cfg.training();
  tc.learning_rate = 1e300;
  tc.epochs = 50;
  try {
    train_channel(ch, f.prep.adj1, f.prep.adj2, f.prep.data.seeds.train(), tc);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::numeric);
  }
}

TEST(TrainChannel, EmptySeedsRejected) {
  auto f = small_fixture(20);
  auto ch = init_channel(ChannelKind::attribute, f.prep, f.cfg);
  EXPECT_THROW(train_channel(ch, f.prep.adj1, f.prep.adj2, {}, f.cfg.training()), Error);
}

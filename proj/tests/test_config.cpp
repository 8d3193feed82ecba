#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "subgcn/config.hpp"
#include "subgcn/error.hpp"

using namespace subgcn;

TEST(RunConfig, Defaults) {
  RunConfig c;
  EXPECT_EQ(c.dim_structure, 200u);
  EXPECT_EQ(c.dim_attribute, 100u);
  EXPECT_EQ(c.dim_subgraph, 100u);
  EXPECT_EQ(c.margin_structure, 3.0);
  EXPECT_EQ(c.epochs, 5000u);
  EXPECT_EQ(c.negatives_per_side, 20u);
  EXPECT_EQ(c.alpha, 0.72);
  EXPECT_EQ(c.beta, 0.2);
  EXPECT_EQ(c.gamma_weight, 0.08);
  EXPECT_EQ(c.train_fraction, 0.3);
  EXPECT_EQ(c.mode, Mode::sub_gcn);
  EXPECT_EQ(c.hits, (std::vector<std::size_t>{1, 10, 50}));
  EXPECT_EQ(c.sweep_fractions.size(), 6u);
  EXPECT_NO_THROW(c.validate());
}

TEST(RunConfig, ParseWithCommentsAndWhitespace) {
  auto c = RunConfig::parse(
      "# run\n"
      "  epochs = 12   # short\n"
      "mode=se+ae\n"
      "\n"
      "hits = 1, 5\n"
      "dataset = /data/zh_en\n"
      "output_activation = relu\n");
  EXPECT_EQ(c.epochs, 12u);
  EXPECT_EQ(c.mode, Mode::se_ae);
  EXPECT_EQ(c.hits, (std::vector<std::size_t>{1, 5}));
  EXPECT_EQ(c.dataset, "/data/zh_en");
  EXPECT_EQ(c.output_activation, Activation::relu);
}

TEST(RunConfig, UnknownKeyRejected) {
  try {
    RunConfig::parse("epoch = 5\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::config);
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
  }
}

TEST(RunConfig, MalformedValuesRejected) {
  EXPECT_THROW(RunConfig::parse("epochs = many\n"), Error);
  EXPECT_THROW(RunConfig::parse("epochs = -3\n"), Error);
  EXPECT_THROW(RunConfig::parse("alpha = nan\n"), Error);
  EXPECT_THROW(RunConfig::parse("hits = 1,,5\n"), Error);
  EXPECT_THROW(RunConfig::parse("mode = gcn\n"), Error);
  EXPECT_THROW(RunConfig::parse("just a line\n"), Error);
}

TEST(RunConfig, SerializeRoundTrips) {
  RunConfig c;
  c.dataset = "some/dir";
  c.mode = Mode::se;
  c.seed = 123456789012345ULL;
  c.learning_rate = 0.1 + 0.2;
  c.sweep_fractions = {0.25, 0.5};
  c.synth_perturbation = 0.05;
  auto back = RunConfig::parse(c.serialize());
  EXPECT_EQ(back, c);
  EXPECT_EQ(back.serialize(), c.serialize());
}

TEST(RunConfig, SerializeListsEveryKey) {
  auto text = RunConfig{}.serialize();
  std::size_t lines = 0;
  for (char ch : text) lines += ch == '\n';
  EXPECT_EQ(lines, 29u);
  EXPECT_EQ(text.rfind("dataset = ", 0), 0u);
}

TEST(RunConfig, ValidateCatchesBadValues) {
  auto bad = [](const char* text) {
    auto c = RunConfig::parse(text);
    EXPECT_THROW(c.validate(), Error) << text;
  };
  bad("train_fraction = 1\n");
  bad("dim_structure = 0\n");
  bad("alpha = 0.5\n");
  bad("epochs = 0\n");
  bad("sweep_fractions = 0.1, 1.5\n");
  bad("margin_subgraph = 0\n");
  bad("hits = 0\n");
}

TEST(RunConfig, ModeWeights) {
  RunConfig c;
  auto se = c.alignment(Mode::se);
  EXPECT_EQ(se.alpha, 1.0);
  EXPECT_EQ(se.beta, 0.0);
  EXPECT_EQ(se.gamma_weight, 0.0);
  auto sa = c.alignment(Mode::se_ae);
  EXPECT_DOUBLE_EQ(sa.alpha, 0.8);
  EXPECT_EQ(sa.beta, 0.2);
  EXPECT_EQ(sa.gamma_weight, 0.0);
  EXPECT_NO_THROW(sa.validate());
  auto full = c.alignment(Mode::sub_gcn);
  EXPECT_EQ(full.alpha, 0.72);
  EXPECT_EQ(full.gamma_weight, 0.08);
}

TEST(RunConfig, ModeChannels) {
  EXPECT_EQ(channels_for(Mode::se), (std::vector<ChannelKind>{ChannelKind::structure}));
  EXPECT_EQ(channels_for(Mode::se_ae).size(), 2u);
  EXPECT_EQ(channels_for(Mode::sub_gcn).size(), 3u);
  EXPECT_STREQ(to_string(Mode::se_ae), "se+ae");
  EXPECT_EQ(mode_from_string("sub-gcn"), Mode::sub_gcn);
}

TEST(RunConfig, DerivedStructs) {
  auto c = RunConfig::parse("seed = 9\nmargin_attribute = 2\nsynth_entities = 40\n");
  auto t = c.training();
  EXPECT_EQ(t.rng_seed, 9u);
  EXPECT_EQ(t.margin_attribute, 2.0);
  auto s = c.synthetic();
  EXPECT_EQ(s.n_entities, 40u);
  EXPECT_EQ(s.rng_seed, 9u);
}

TEST(RunConfig, LoadFromFile) {
  auto path = std::filesystem::temp_directory_path() / "subgcn_test_config.conf";
  { std::ofstream(path) << "epochs = 7\n"; }
  EXPECT_EQ(RunConfig::load(path).epochs, 7u);
  std::filesystem::remove(path);
  try {
    RunConfig::load(path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::io);
  }
}

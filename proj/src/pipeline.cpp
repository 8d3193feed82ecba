#include "subgcn/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>

#include "subgcn/error.hpp"
#include "subgcn/rng.hpp"
#include "text_util.hpp"

namespace subgcn {

namespace fs = std::filesystem;

PreparedData prepare(Dataset data, const RunConfig& cfg) {
  cfg.validate();
  PreparedData p;
  data.seeds = split_seeds(data.seeds, cfg.train_fraction, derive_seed(cfg.seed, "split"));
  p.data = std::move(data);
  const auto& kg1 = p.data.kg1;
  const auto& kg2 = p.data.kg2;

  p.adj1 = normalize(build_adjacency(kg1, relation_stats(kg1), cfg.adjacency_floor));
  p.adj2 = normalize(build_adjacency(kg2, relation_stats(kg2), cfg.adjacency_floor));

  p.vocab = build_shared_attributes(kg1, kg2, cfg.attribute_cap);
  p.attr1 = attribute_features(kg1, p.vocab.column_of_kg1, p.vocab.size());
  p.attr2 = attribute_features(kg2, p.vocab.column_of_kg2, p.vocab.size());

  p.skel1 = build_skeleton(kg1);
  p.skel2 = build_skeleton(kg2);
  p.sgn1 = build_sgn(p.skel1);
  p.sgn2 = build_sgn(p.skel2);
  p.sgn_feat1 = subgraph_features(kg1, p.sgn1);
  p.sgn_feat2 = subgraph_features(kg2, p.sgn2);
  return p;
}

GcnChannelConfig channel_config(ChannelKind kind, const PreparedData& prep, const RunConfig& cfg) {
  GcnChannelConfig c;
  switch (kind) {
    case ChannelKind::structure: c = GcnChannelConfig::structure(cfg.dim_structure); break;
    case ChannelKind::attribute:
      // An empty vocabulary still needs one (all-zero) input column.
      c = GcnChannelConfig::attribute(std::max<std::size_t>(prep.vocab.size(), 1), cfg.dim_attribute);
      break;
    case ChannelKind::subgraph:
      c = GcnChannelConfig::subgraph(std::max<std::size_t>({prep.sgn1.lines.size(), prep.sgn2.lines.size(), 1}),
                                     cfg.dim_subgraph);
      break;
  }
  c.output_activation = cfg.output_activation;
  return c;
}

std::uint64_t channel_seed(ChannelKind kind, const RunConfig& cfg) {
  return derive_seed(cfg.seed, std::string(to_string(kind)) + "/init");
}

GcnChannel init_channel(ChannelKind kind, const PreparedData& prep, const RunConfig& cfg) {
  const auto c = channel_config(kind, prep, cfg);
  const auto seed = channel_seed(kind, cfg);
  switch (kind) {
    case ChannelKind::structure:
      return GcnChannel::init_structure(c, prep.data.kg1.num_entities(), prep.data.kg2.num_entities(), seed);
    case ChannelKind::attribute: return GcnChannel::init_fixed(c, prep.attr1, prep.attr2, seed);
    case ChannelKind::subgraph: return GcnChannel::init_fixed(c, prep.sgn_feat1, prep.sgn_feat2, seed);
  }
  throw Error(ErrorKind::internal, "unreachable channel kind");
}

TrainedModel train_model(const PreparedData& prep, const RunConfig& cfg) {
  TrainedModel model;
  const auto train = prep.data.seeds.train();
  for (ChannelKind kind : channels_for(cfg.mode)) {
    GcnChannel ch = init_channel(kind, prep, cfg);
    model.reports.push_back(train_channel(ch, prep.adj1, prep.adj2, train, cfg.training(), channel_seed(kind, cfg)));
    model.channels.emplace(kind, std::move(ch));
  }
  return model;
}

EmbeddingSet embed_all(const std::map<ChannelKind, GcnChannel>& channels, const PreparedData& prep) {
  EmbeddingSet emb;
  for (const auto& [kind, ch] : channels) {
    DenseMatrix e1 = ch.embed(0, prep.adj1);
    DenseMatrix e2 = ch.embed(1, prep.adj2);
    switch (kind) {
      case ChannelKind::structure:
        emb.kg1.structure = std::move(e1);
        emb.kg2.structure = std::move(e2);
        break;
      case ChannelKind::attribute:
        emb.kg1.attribute = std::move(e1);
        emb.kg2.attribute = std::move(e2);
        break;
      case ChannelKind::subgraph:
        emb.kg1.subgraph = std::move(e1);
        emb.kg2.subgraph = std::move(e2);
        break;
    }
  }
  return emb;
}

void write_run(const fs::path& out_dir, const RunConfig& cfg, const TrainedModel& model) {
  std::error_code ec;
  fs::create_directories(out_dir / "checkpoints", ec);
  if (ec) throw Error(ErrorKind::io, "cannot create " + out_dir.string() + ": " + ec.message());
  {
    auto out = detail::open_output((out_dir / "manifest.conf").string());
    out << "# version: " << kVersion << '\n' << cfg.serialize();
    if (!out) throw Error(ErrorKind::io, "write failed: manifest.conf");
  }
  {
    auto out = detail::open_output((out_dir / "loss.csv").string());
    out << "epoch,channel,loss\n";
    for (const auto& r : model.reports)
      for (std::size_t e = 0; e < r.loss_trace.size(); ++e)
        out << e << ',' << to_string(r.kind) << ',' << detail::format_double(r.loss_trace[e]) << '\n';
    if (!out) throw Error(ErrorKind::io, "write failed: loss.csv");
  }
  for (const auto& [kind, ch] : model.channels)
    save_checkpoint(out_dir / "checkpoints" / to_string(kind), ch, {channel_seed(kind, cfg), cfg.epochs});
}

std::map<ChannelKind, GcnChannel> load_channels(const fs::path& run_dir, const std::vector<ChannelKind>& kinds,
                                                const PreparedData& prep, const RunConfig& cfg) {
  std::map<ChannelKind, GcnChannel> out;
  for (ChannelKind kind : kinds) {
    const fs::path dir = run_dir / "checkpoints" / to_string(kind);
    if (!fs::exists(dir / "manifest.txt"))
      throw Error(ErrorKind::io, "missing checkpoint for " + std::string(to_string(kind)) + " channel in " + dir.string());
    auto [ch, meta] = load_checkpoint(dir);
    const auto expected = channel_config(kind, prep, cfg);
    if (!(ch.config() == expected))
      throw Error(ErrorKind::validation, std::string(to_string(kind)) + " checkpoint dimensions do not match the config");
    if (ch.num_entities(0) != prep.data.kg1.num_entities() || ch.num_entities(1) != prep.data.kg2.num_entities())
      throw Error(ErrorKind::validation, std::string(to_string(kind)) + " checkpoint entity counts do not match the dataset");
    out.emplace(kind, std::move(ch));
  }
  return out;
}

void write_metrics_csv(const fs::path& path, const std::vector<std::pair<Mode, AlignmentResult>>& rows) {
  auto out = detail::open_output(path.string());
  out << "mode,direction,metric,value\n";
  for (const auto& [mode, result] : rows) write_metric_rows(out, result, to_string(mode));
  if (!out) throw Error(ErrorKind::io, "write failed: " + path.string());
}

std::vector<SweepRow> run_sweep(const Dataset& data, const RunConfig& cfg, const fs::path& csv_path,
                                std::vector<std::string>* warnings) {
  cfg.validate();
  {
    auto out = detail::open_output(csv_path.string());
    out << "fraction,direction";
    for (auto k : cfg.hits) out << ",hits" << k;
    out << '\n';
  }
  std::vector<SweepRow> rows;
  for (double fraction : cfg.sweep_fractions) {
    RunConfig run = cfg;
    run.train_fraction = fraction;
    const PreparedData prep = prepare(data, run);
    const TrainedModel model = train_model(prep, run);
    const auto result = evaluate(prep.data.seeds.test(), embed_all(model.channels, prep), run.alignment());

    // Appending per fraction bounds what a crash can lose to one cell.
    std::ofstream out(csv_path, std::ios::app);
    if (!out) throw Error(ErrorKind::io, "cannot append to " + csv_path.string());
    char buf[32];
    for (const DirectionResult* d : {&result.forward, &result.backward}) {
      out << detail::format_double(fraction) << ',' << to_string(d->direction);
      for (const auto& [k, v] : d->hits) {
        std::snprintf(buf, sizeof buf, "%.2f", v);
        out << ',' << buf;
      }
      out << '\n';
    }
    out.flush();

    if (warnings && !rows.empty()) {
      const auto& prev = rows.back().result;
      for (auto [a, b] : {std::pair{&prev.forward, &result.forward}, std::pair{&prev.backward, &result.backward}}) {
        if (b->hits_at(1) < a->hits_at(1))
          warnings->push_back(std::string("Hits@1 ") + to_string(b->direction) + " dropped from " +
                              detail::format_double(a->hits_at(1)) + " to " + detail::format_double(b->hits_at(1)) +
                              " at fraction " + detail::format_double(fraction));
      }
    }
    rows.push_back({fraction, result});
  }
  return rows;
}

const std::vector<KnownCounts>& known_dbp15k_counts() {
  static const std::vector<KnownCounts> table = {
      {"zh-en", {66469, 2830, 8113, 153929, 379684}, {98125, 2317, 7173, 237674, 567755}},
      {"ja-en", {65744, 2043, 5882, 164373, 354619}, {95680, 2096, 6066, 233319, 497230}},
      {"fr-en", {66858, 1379, 4547, 192191, 528665}, {105889, 2209, 6422, 278590, 576543}},
  };
  return table;
}

std::string detect_dbp15k_pair(const fs::path& dir) {
  std::string name = fs::absolute(dir).lexically_normal().filename().string();
  if (name.empty()) name = fs::absolute(dir).lexically_normal().parent_path().filename().string();
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) {
    return c == '_' ? '-' : static_cast<char>(std::tolower(c));
  });
  for (const auto& k : known_dbp15k_counts())
    if (name.find(k.pair) != std::string::npos) return k.pair;
  return "";
}

}  // namespace subgcn

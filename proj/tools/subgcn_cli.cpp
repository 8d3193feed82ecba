// subgcn: ingest / synthesize datasets, build subgraph networks, train,
// evaluate and sweep seed fractions. OMP_NUM_THREADS sets the thread count.

#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <tuple>
#include <string>
#include <vector>

#include "subgcn/config.hpp"
#include "subgcn/error.hpp"
#include "subgcn/pipeline.hpp"

namespace fs = std::filesystem;
using namespace subgcn;

namespace {

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> mode;
};

RunConfig resolve(const Globals& g) {
  RunConfig cfg = g.config_path.empty() ? RunConfig{} : RunConfig::load(g.config_path);
  if (g.seed) cfg.seed = *g.seed;
  if (g.mode) cfg.mode = mode_from_string(*g.mode);
  return cfg;
}

fs::path out_dir(const Globals& g, const fs::path& fallback) { return g.out ? fs::path(*g.out) : fallback; }

void ensure_dir(const fs::path& p) {
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create " + p.string() + ": " + ec.message());
}

std::string dataset_arg(const std::string& positional, const RunConfig& cfg) {
  const std::string d = positional.empty() ? cfg.dataset : positional;
  if (d.empty()) throw Error(ErrorKind::config, "no dataset given (positional argument or 'dataset' key)");
  return d;
}

void print_counts_row(const char* side, const GraphCounts& c) {
  std::printf("%-5s %10zu %10zu %11zu %13zu %13zu\n", side, c.entities, c.relations, c.attributes, c.relation_triples,
              c.attribute_triples);
}

void print_results(const char* mode, const AlignmentResult& r) {
  for (const DirectionResult* d : {&r.forward, &r.backward}) {
    std::printf("%-8s %-9s", mode, to_string(d->direction));
    for (const auto& [k, v] : d->hits) std::printf("  hits@%zu %6.2f", k, v);
    std::printf("  mean_rank %.2f\n", d->mean_rank);
  }
}

// ---------------------------------------------------------------------------

int cmd_ingest(const Globals& g, const std::string& dir, std::string expect) {
  const Dataset data = load_dbp15k(dir);
  const fs::path out = out_dir(g, "ingested");
  save_dbp15k(out, data);

  const GraphCounts c1 = counts_of(data.kg1), c2 = counts_of(data.kg2);
  std::printf("%-5s %10s %10s %11s %13s %13s\n", "side", "entities", "relations", "attributes", "rel_triples",
              "attr_triples");
  print_counts_row("KG1", c1);
  print_counts_row("KG2", c2);
  std::printf("seed pairs: %zu\n", data.seeds.size());
  {
    std::ofstream csv(out / "counts.csv");
    csv << "side,entities,relations,attributes,relation_triples,attribute_triples\n";
    for (auto [side, c] : {std::pair{"KG1", c1}, std::pair{"KG2", c2}})
      csv << side << ',' << c.entities << ',' << c.relations << ',' << c.attributes << ',' << c.relation_triples
          << ',' << c.attribute_triples << '\n';
    if (!csv) throw Error(ErrorKind::io, "write failed: " + (out / "counts.csv").string());
  }

  if (expect.empty()) expect = detect_dbp15k_pair(dir);
  if (expect.empty()) return 0;
  const KnownCounts* known = nullptr;
  for (const auto& k : known_dbp15k_counts())
    if (expect == k.pair) known = &k;
  if (!known) throw Error(ErrorKind::config, "unknown DBP15K pair '" + expect + "' (expected zh-en, ja-en or fr-en)");

  std::size_t mismatches = 0;
  auto check = [&](const char* side, const char* what, std::size_t got, std::size_t want) {
    if (got == want) return;
    ++mismatches;
    std::fprintf(stderr, "warning: %s %s: %zu, published %zu\n", side, what, got, want);
  };
  for (auto [side, got, want] : {std::tuple{"KG1", c1, known->side1}, std::tuple{"KG2", c2, known->side2}}) {
    check(side, "entities", got.entities, want.entities);
    check(side, "relations", got.relations, want.relations);
    check(side, "attributes", got.attributes, want.attributes);
    check(side, "relation triples", got.relation_triples, want.relation_triples);
    check(side, "attribute triples", got.attribute_triples, want.attribute_triples);
  }
  std::printf("DBP15K %s: %s\n", known->pair,
              mismatches == 0 ? "all counts match" : (std::to_string(mismatches) + " count mismatches").c_str());
  return 0;
}

int cmd_synth(const Globals& g) {
  const RunConfig cfg = resolve(g);
  const fs::path out = out_dir(g, "synthetic");
  const Dataset data = generate_synthetic_pair(cfg.synthetic());
  save_dbp15k(out, data);
  const GraphCounts c1 = counts_of(data.kg1), c2 = counts_of(data.kg2);
  std::printf("%-5s %10s %10s %11s %13s %13s\n", "side", "entities", "relations", "attributes", "rel_triples",
              "attr_triples");
  print_counts_row("KG1", c1);
  print_counts_row("KG2", c2);
  std::printf("seed pairs: %zu\nwritten to %s\n", data.seeds.size(), out.string().c_str());
  return 0;
}

int cmd_build_sgn(const Globals& g, const std::string& positional) {
  const RunConfig cfg = resolve(g);
  const Dataset data = load_dbp15k(dataset_arg(positional, cfg));
  const fs::path out = out_dir(g, "sgn");
  ensure_dir(out);
  int side = 1;
  for (const KnowledgeGraph* kg : {&data.kg1, &data.kg2}) {
    const Skeleton skel = build_skeleton(*kg);
    const SubgraphNetwork sgn = build_sgn(skel);
    save_sgn_links(out / ("sgn_links_" + std::to_string(side) + ".tsv"), sgn);
    save_sparse(out / ("sgn_features_" + std::to_string(side) + ".txt"), subgraph_features(*kg, sgn));
    std::printf("KG%d: %zu skeleton edges (%zu self-loops dropped), %zu SGN links\n", side, skel.edges.size(),
                skel.dropped_self_loops, sgn.links.size());
    ++side;
  }
  return 0;
}

int cmd_train(const Globals& g, const std::string& positional) {
  RunConfig cfg = resolve(g);
  // eval reopens the dataset through the manifest, possibly from another cwd
  cfg.dataset = fs::absolute(dataset_arg(positional, cfg)).lexically_normal().string();
  cfg.validate();
  const fs::path out = out_dir(g, "run");
  ensure_dir(out);

  std::printf("training %s on %s with %d thread(s)\n", to_string(cfg.mode), cfg.dataset.c_str(), omp_get_max_threads());
  const PreparedData prep = prepare(load_dbp15k(cfg.dataset), cfg);
  const TrainedModel model = train_model(prep, cfg);
  write_run(out, cfg, model);
  for (const auto& r : model.reports)
    std::printf("%-9s final loss %.6g  (%.1f s)\n", to_string(r.kind), r.loss_trace.back(), r.wall_seconds);
  std::printf("run written to %s\n", out.string().c_str());
  return 0;
}

int cmd_eval(const Globals& g, const std::string& run_dir, std::vector<std::string> modes, bool dump_ranks) {
  RunConfig cfg = RunConfig::load(fs::path(run_dir) / "manifest.conf");
  if (g.seed && *g.seed != cfg.seed) throw Error(ErrorKind::config, "--seed differs from the run's manifest");
  if (modes.empty()) modes.push_back(g.mode ? *g.mode : to_string(cfg.mode));

  std::vector<Mode> parsed;
  std::vector<ChannelKind> needed;
  for (const auto& m : modes) {
    parsed.push_back(mode_from_string(m));
    for (ChannelKind k : channels_for(parsed.back()))
      if (std::find(needed.begin(), needed.end(), k) == needed.end()) needed.push_back(k);
  }

  const PreparedData prep = prepare(load_dbp15k(cfg.dataset), cfg);
  const EmbeddingSet emb = embed_all(load_channels(run_dir, needed, prep, cfg), prep);
  const fs::path out = out_dir(g, run_dir);
  ensure_dir(out);

  std::vector<std::pair<Mode, AlignmentResult>> rows;
  for (Mode m : parsed) {
    rows.emplace_back(m, evaluate(prep.data.seeds.test(), emb, cfg.alignment(m)));
    print_results(to_string(m), rows.back().second);
    if (dump_ranks) {
      for (const DirectionResult* d : {&rows.back().second.forward, &rows.back().second.backward}) {
        const fs::path p = out / (std::string("ranks_") + to_string(m) + "_" +
                                  (d->direction == Direction::kg1_to_kg2 ? "forward" : "backward") + ".csv");
        std::ofstream f(p);
        write_rank_dump(f, *d);
        if (!f) throw Error(ErrorKind::io, "write failed: " + p.string());
      }
    }
  }
  write_metrics_csv(out / "metrics.csv", rows);
  std::printf("metrics written to %s\n", (out / "metrics.csv").string().c_str());
  return 0;
}

int cmd_sweep(const Globals& g, const std::string& positional, const std::vector<double>& fractions) {
  RunConfig cfg = resolve(g);
  cfg.dataset = dataset_arg(positional, cfg);
  if (!fractions.empty()) cfg.sweep_fractions = fractions;
  cfg.validate();
  const fs::path out = out_dir(g, "sweep");
  ensure_dir(out);
  {
    std::ofstream manifest(out / "manifest.conf");
    manifest << "# version: " << kVersion << '\n' << cfg.serialize();
  }
  std::vector<std::string> warnings;
  const auto rows = run_sweep(load_dbp15k(cfg.dataset), cfg, out / "sweep.csv", &warnings);
  for (const auto& row : rows) {
    std::printf("fraction %.2f\n", row.fraction);
    print_results(to_string(cfg.mode), row.result);
  }
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  std::printf("sweep written to %s\n", (out / "sweep.csv").string().c_str());
  return 0;
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config: return 2;
    case ErrorKind::io: return 3;
    case ErrorKind::parse: return 4;
    case ErrorKind::validation: return 5;
    case ErrorKind::numeric: return 6;
    case ErrorKind::internal: return 70;
  }
  return 70;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-lingual entity alignment with subgraph-network GCN channels"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--config", g.config_path, "run configuration file (key = value)");
  app.add_option("--seed", g.seed, "master seed, overrides the config");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--mode", g.mode, "se | se+ae | sub-gcn");

  std::string dataset, expect, run_dir;
  std::vector<std::string> modes;
  std::vector<double> fractions;
  bool dump_ranks = false;

  auto* ingest = app.add_subcommand("ingest", "load a DBP15K-layout dataset, report counts, write it normalized");
  ingest->add_option("dataset", dataset, "dataset directory")->required();
  ingest->add_option("--expect", expect, "compare against published counts of zh-en, ja-en or fr-en");

  auto* synth = app.add_subcommand("synth", "generate a synthetic aligned pair from the synth_* keys");

  auto* sgn = app.add_subcommand("build-sgn", "write skeleton line graphs and subgraph features");
  sgn->add_option("dataset", dataset, "dataset directory (default: config 'dataset')");

  auto* train = app.add_subcommand("train", "train the channels of --mode and write a run directory");
  train->add_option("dataset", dataset, "dataset directory (default: config 'dataset')");

  auto* eval = app.add_subcommand("eval", "evaluate a run directory in both directions");
  eval->add_option("run", run_dir, "run directory written by train")->required();
  eval->add_option("--modes", modes, "modes to score, comma separated (default: --mode or the run's mode)")
      ->delimiter(',');
  eval->add_flag("--ranks", dump_ranks, "also write per-entity true ranks");

  auto* sweep = app.add_subcommand("sweep", "train + evaluate once per seed fraction");
  sweep->add_option("dataset", dataset, "dataset directory (default: config 'dataset')");
  sweep->add_option("--fractions", fractions, "comma separated train fractions")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error:usage: %s\n", e.what());
    return 64;
  }

  try {
    if (*ingest) return cmd_ingest(g, dataset, expect);
    if (*synth) return cmd_synth(g);
    if (*sgn) return cmd_build_sgn(g, dataset);
    if (*train) return cmd_train(g, dataset);
    if (*eval) return cmd_eval(g, run_dir, modes, dump_ranks);
    if (*sweep) return cmd_sweep(g, dataset, fractions);
  } catch (const Error& e) {
    std::fprintf(stderr, "error:%s: %s\n", to_string(e.kind()), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error:internal: %s\n", e.what());
    return 70;
  }
  return 70;
}

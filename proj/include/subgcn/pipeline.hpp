#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "subgcn/adjacency.hpp"
#include "subgcn/aligner.hpp"
#include "subgcn/config.hpp"
#include "subgcn/gcn.hpp"
#include "subgcn/kg.hpp"
#include "subgcn/sgn.hpp"
#include "subgcn/trainer.hpp"

namespace subgcn {

// Everything derived from a dataset before training: split seeds,
// normalized adjacencies and the fixed attribute / subgraph inputs.
struct PreparedData {
  Dataset data;
  NormalizedAdjacency adj1;
  NormalizedAdjacency adj2;
  AttributeVocabulary vocab;
  SparseMatrix attr1;
  SparseMatrix attr2;
  Skeleton skel1;
  Skeleton skel2;
  SubgraphNetwork sgn1;
  SubgraphNetwork sgn2;
  SparseMatrix sgn_feat1;
  SparseMatrix sgn_feat2;
};

// Splits the seeds with train_fraction under a stream derived from cfg.seed.
PreparedData prepare(Dataset data, const RunConfig& cfg);

GcnChannelConfig channel_config(ChannelKind kind, const PreparedData& prep, const RunConfig& cfg);
std::uint64_t channel_seed(ChannelKind kind, const RunConfig& cfg);
GcnChannel init_channel(ChannelKind kind, const PreparedData& prep, const RunConfig& cfg);

struct TrainedModel {
  std::map<ChannelKind, GcnChannel> channels;
  std::vector<ChannelReport> reports;
};

// Trains channels_for(cfg.mode) in order structure, attribute, subgraph.
// Each channel is independent; its result does not depend on which other
// channels are trained.
TrainedModel train_model(const PreparedData& prep, const RunConfig& cfg);

EmbeddingSet embed_all(const std::map<ChannelKind, GcnChannel>& channels, const PreparedData& prep);

// Run directory layout:
//   manifest.conf               full RunConfig plus a version comment
//   loss.csv                    epoch,channel,loss
//   checkpoints/<channel>/      see save_checkpoint
void write_run(const std::filesystem::path& out_dir, const RunConfig& cfg, const TrainedModel& model);

// Loads checkpoints for `kinds` and checks them against what `cfg` and
// `prep` imply. Throws Error(validation) on a dimension mismatch.
std::map<ChannelKind, GcnChannel> load_channels(const std::filesystem::path& run_dir,
                                                const std::vector<ChannelKind>& kinds, const PreparedData& prep,
                                                const RunConfig& cfg);

// "mode,direction,metric,value" with a header line.
void write_metrics_csv(const std::filesystem::path& path, const std::vector<std::pair<Mode, AlignmentResult>>& rows);

struct SweepRow {
  double fraction;
  AlignmentResult result;
};

// One independent train + evaluate per fraction in cfg.sweep_fractions. Rows
// are appended to `csv_path` as each fraction finishes
// ("fraction,direction,hits<k>..." with a header). Returns the rows and
// appends a message to `warnings` for every drop in Hits@1 as the fraction
// grows.
std::vector<SweepRow> run_sweep(const Dataset& data, const RunConfig& cfg, const std::filesystem::path& csv_path,
                                std::vector<std::string>* warnings = nullptr);

// Published DBP15K side statistics, keyed by pair ("zh-en", "ja-en", "fr-en").
struct KnownCounts {
  const char* pair;
  GraphCounts side1;
  GraphCounts side2;
};
const std::vector<KnownCounts>& known_dbp15k_counts();
// "zh-en" etc. if the directory name identifies a DBP15K pair, else "".
std::string detect_dbp15k_pair(const std::filesystem::path& dir);

}  // namespace subgcn

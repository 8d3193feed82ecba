#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "subgcn/gcn.hpp"
#include "subgcn/kg.hpp"
#include "subgcn/rng.hpp"

namespace subgcn {

struct TrainingConfig {
  double margin_structure = 3.0;
  double margin_attribute = 3.0;
  double margin_subgraph = 3.0;
  std::size_t negatives_per_side = 20;
  std::size_t epochs = 5000;
  double learning_rate = 1.0;
  std::uint64_t rng_seed = 0;
  std::size_t resample_every = 10;
  // 0 disables periodic checkpoints; the final state is always the caller's.
  std::size_t checkpoint_every = 0;
  std::filesystem::path checkpoint_dir;

  double margin(ChannelKind kind) const;
  void validate() const;
};

// For every positive (e, v): k pairs (e', v) corrupted on the left and k pairs
// (e, v') corrupted on the right. left[i * k + j] is the j-th e' of
// positive i; right likewise.
struct NegativeBatch {
  std::vector<SeedPair> positives;
  std::size_t k = 0;
  std::vector<Index> left;
  std::vector<Index> right;

  std::size_t num_corrupted() const { return left.size() + right.size(); }
};

// Corrupted entities are uniform over the whole graph, redrawn if they hit the
// positive's own entity. Throws Error(validation) when a graph has fewer than
// two entities.
NegativeBatch sample_negatives(std::span<const SeedPair> positives, std::size_t n1, std::size_t n2, std::size_t k,
                               Rng& rng);

struct MarginLossResult {
  double loss = 0.0;
  std::array<DenseMatrix, 2> grad;  // d loss / d embeddings of KG1, KG2
  std::size_t active_terms = 0;
};

// sum over positives and their corruptions of
//   [ |h1(e) - h2(v)|_1 + margin - |h1(e') - h2(v')|_1 ]_+
// with the sign subgradient (sign(0) = 0) flowing only through active hinges.
MarginLossResult margin_loss(const NegativeBatch& batch, const DenseMatrix& emb1, const DenseMatrix& emb2,
                             double margin);

struct ChannelReport {
  ChannelKind kind = ChannelKind::structure;
  std::vector<double> loss_trace;  // one value per epoch, before that epoch's update
  double wall_seconds = 0.0;
};

// Full-batch SGD for `epochs` epochs. Negatives are resampled every
// `resample_every` epochs from a stream derived from config.rng_seed and the
// channel kind. Throws Error(numeric) on a non-finite loss.
ChannelReport train_channel(GcnChannel& channel, const NormalizedAdjacency& adj1, const NormalizedAdjacency& adj2,
                            std::span<const SeedPair> train_pairs, const TrainingConfig& config,
                            std::uint64_t channel_seed = 0);

}  // namespace subgcn

#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "subgcn/kg.hpp"
#include "subgcn/matrix.hpp"

namespace subgcn {

// Per-graph channel outputs. A channel that was not trained is left empty
// (0 x 0) and must carry zero weight.
struct KgEmbeddings {
  DenseMatrix structure;
  DenseMatrix attribute;
  DenseMatrix subgraph;
};

struct EmbeddingSet {
  KgEmbeddings kg1;
  KgEmbeddings kg2;
};

enum class Direction { kg1_to_kg2, kg2_to_kg1 };

const char* to_string(Direction d);

struct AlignmentConfig {
  double alpha = 0.72;         // structure weight
  double beta = 0.2;           // attribute weight
  double gamma_weight = 0.08;  // subgraph weight
  std::vector<std::size_t> hits_levels{1, 10, 50};

  // Weights nonnegative and summing to 1 within 1e-9; levels positive.
  void validate() const;
};

// alpha |hs_i - hs_j|_1 / d_s + beta |ha_i - ha_j|_1 / d_a + gamma |hg_i - hg_j|_1 / d_sgn,
// where i is in the source graph of `dir` and j in the target graph.
// Zero-weight channels are skipped.
double combined_distance(Index source, Index target, Direction dir, const EmbeddingSet& emb,
                         const AlignmentConfig& cfg);

struct Candidate {
  Index entity;
  double distance;
};

// Every target-graph entity by ascending distance, ties by ascending id.
std::vector<Candidate> rank_candidates(Index source, Direction dir, const EmbeddingSet& emb,
                                       const AlignmentConfig& cfg);

// 1-based position of `truth` in rank_candidates(source, ...), computed
// without sorting.
std::size_t true_rank(Index source, Index truth, Direction dir, const EmbeddingSet& emb, const AlignmentConfig& cfg);

struct DirectionResult {
  Direction direction = Direction::kg1_to_kg2;
  std::vector<Index> sources;
  std::vector<std::size_t> ranks;  // parallel to sources
  std::vector<std::pair<std::size_t, double>> hits;  // (k, percent)
  double mean_rank = 0.0;

  double hits_at(std::size_t k) const;
};

struct AlignmentResult {
  DirectionResult forward;   // KG1 -> KG2
  DirectionResult backward;  // KG2 -> KG1
};

// Hits@k = 100 * |{rank <= k}| / |test| in both directions over the full
// target entity sets. Throws Error(validation) on an empty test set.
AlignmentResult evaluate(std::span<const SeedPair> test_pairs, const EmbeddingSet& emb, const AlignmentConfig& cfg);

// Percent of ranks <= k.
double hits_from_ranks(std::span<const std::size_t> ranks, std::size_t k);

// "direction,metric,value" rows (hits with two decimals) prefixed by `mode,`
// when mode is non-empty. No header.
void write_metric_rows(std::ostream& out, const AlignmentResult& result, const char* mode);
// "entity,true_rank" with a header line.
void write_rank_dump(std::ostream& out, const DirectionResult& result);

namespace reference {

// Serial version of evaluate(); identical output.
AlignmentResult evaluate(std::span<const SeedPair> test_pairs, const EmbeddingSet& emb, const AlignmentConfig& cfg);

}  // namespace reference

}  // namespace subgcn

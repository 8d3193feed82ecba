#pragma once

#include <cstddef>
#include <map>

#include "subgcn/kg.hpp"
#include "subgcn/matrix.hpp"

namespace subgcn {

struct RelationStat {
  std::size_t triple_count = 0;
  std::size_t distinct_heads = 0;
  std::size_t distinct_tails = 0;

  // functionality: distinct heads per triple
  double fun() const { return static_cast<double>(distinct_heads) / static_cast<double>(triple_count); }
  // inverse functionality: distinct tails per triple
  double ifun() const { return static_cast<double>(distinct_tails) / static_cast<double>(triple_count); }
};

// Keyed by relation id; relations without triples are absent.
using RelationStats = std::map<Index, RelationStat>;

RelationStats relation_stats(const KnowledgeGraph& kg);

inline constexpr double kDefaultWeightFloor = 0.3;

// P[h][t] += max(ifun(r), floor) and P[t][h] += max(fun(r), floor) for every
// triple (h, r, t). Duplicate triples accumulate.
SparseMatrix build_adjacency(const KnowledgeGraph& kg, const RelationStats& stats,
                             double weight_floor = kDefaultWeightFloor);

// Q^{-1/2} S Q^{-1/2} with S = max(P + I, (P + I)^T) and Q = diag(row sums of S).
// Symmetric by construction (bitwise), nonnegative, positive diagonal.
class NormalizedAdjacency {
 public:
  NormalizedAdjacency() = default;
  const SparseMatrix& matrix() const { return m_; }
  std::size_t size() const { return m_.rows(); }

  friend NormalizedAdjacency normalize(const SparseMatrix& p);

 private:
  explicit NormalizedAdjacency(SparseMatrix m) : m_(std::move(m)) {}
  SparseMatrix m_;
};

// Throws Error(validation) on a non-square matrix or a negative entry.
NormalizedAdjacency normalize(const SparseMatrix& p);

}  // namespace subgcn

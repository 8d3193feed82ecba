#include "subgcn/adjacency.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "subgcn/error.hpp"

namespace subgcn {

RelationStats relation_stats(const KnowledgeGraph& kg) {
  std::vector<std::vector<Index>> heads(kg.num_relations()), tails(kg.num_relations());
  for (const auto& t : kg.relation_triples()) {
    heads[t.relation].push_back(t.head);
    tails[t.relation].push_back(t.tail);
  }
  auto distinct = [](std::vector<Index>& v) {
    std::sort(v.begin(), v.end());
    return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
  };
  RelationStats stats;
  for (Index r = 0; r < kg.num_relations(); ++r) {
    if (heads[r].empty()) continue;
    RelationStat s;
    s.triple_count = heads[r].size();
    s.distinct_heads = distinct(heads[r]);
    s.distinct_tails = distinct(tails[r]);
    stats.emplace(r, s);
  }
  return stats;
}

SparseMatrix build_adjacency(const KnowledgeGraph& kg, const RelationStats& stats, double weight_floor) {
  const std::size_t n = kg.num_entities();
  std::vector<Triplet> trips;
  trips.reserve(2 * kg.relation_triples().size());
  for (const auto& t : kg.relation_triples()) {
    if (t.head >= n || t.tail >= n) throw Error(ErrorKind::validation, "triple references an out-of-range entity");
    auto it = stats.find(t.relation);
    if (it == stats.end())
      throw Error(ErrorKind::validation, "no statistics for relation " + std::to_string(t.relation));
    trips.push_back({t.head, t.tail, std::max(it->second.ifun(), weight_floor)});
    trips.push_back({t.tail, t.head, std::max(it->second.fun(), weight_floor)});
  }
  return SparseMatrix::from_triplets(n, n, std::move(trips));
}

NormalizedAdjacency normalize(const SparseMatrix& p) {
  if (p.rows() != p.cols()) throw Error(ErrorKind::validation, "adjacency must be square");
  for (double v : p.values())
    if (v < 0.0 || !std::isfinite(v)) throw Error(ErrorKind::validation, "adjacency has a negative or non-finite entry");
  const std::size_t n = p.rows();

  // S = max(P + I, (P + I)^T), built entrywise over the union pattern.
  const SparseMatrix pt = p.transpose();
  std::vector<Triplet> sym;
  sym.reserve(2 * p.nnz() + n);
  for (std::size_t r = 0; r < n; ++r) {
    auto ac = p.row_cols(r), bc = pt.row_cols(r);
    auto av = p.row_values(r), bv = pt.row_values(r);
    std::size_t i = 0, j = 0;
    bool diag_done = false;
    auto emit = [&](Index c, double v) {
      if (c == r) {
        v += 1.0;
        diag_done = true;
      }
      sym.push_back({static_cast<Index>(r), c, v});
    };
    while (i < ac.size() || j < bc.size()) {
      if (j == bc.size() || (i < ac.size() && ac[i] < bc[j])) {
        emit(ac[i], av[i]);
        ++i;
      } else if (i == ac.size() || bc[j] < ac[i]) {
        emit(bc[j], bv[j]);
        ++j;
      } else {
        emit(ac[i], std::max(av[i], bv[j]));
        ++i;
        ++j;
      }
    }
    if (!diag_done) sym.push_back({static_cast<Index>(r), static_cast<Index>(r), 1.0});
  }
  SparseMatrix s = SparseMatrix::from_triplets(n, n, std::move(sym));

  std::vector<double> q(n);
  for (std::size_t r = 0; r < n; ++r) {
    q[r] = s.row_sum(r);
    if (!(q[r] > 0.0)) throw Error(ErrorKind::internal, "zero degree after adding self-loops");
  }
  std::vector<Triplet> out;
  out.reserve(s.nnz());
  for (std::size_t r = 0; r < n; ++r) {
    auto cols = s.row_cols(r);
    auto vals = s.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k)
      out.push_back({static_cast<Index>(r), cols[k], vals[k] / std::sqrt(q[r] * q[cols[k]])});
  }
  return NormalizedAdjacency(SparseMatrix::from_triplets(n, n, std::move(out)));
}

}  // namespace subgcn

#include "subgcn/aligner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>

#include "subgcn/error.hpp"

namespace subgcn {

const char* to_string(Direction d) { return d == Direction::kg1_to_kg2 ? "KG1->KG2" : "KG2->KG1"; }

void AlignmentConfig::validate() const {
  if (alpha < 0.0 || beta < 0.0 || gamma_weight < 0.0)
    throw Error(ErrorKind::config, "distance weights must be nonnegative");
  if (std::fabs(alpha + beta + gamma_weight - 1.0) > 1e-9)
    throw Error(ErrorKind::config, "distance weights must sum to 1");
  for (auto k : hits_levels)
    if (k == 0) throw Error(ErrorKind::config, "hits levels must be positive");
}

namespace {

struct ChannelTerm {
  const DenseMatrix* source;
  const DenseMatrix* target;
  double scale;  // weight / dimension
};

// The active (weighted) channels for one direction, checked once.
class DistanceView {
 public:
  DistanceView(Direction dir, const EmbeddingSet& emb, const AlignmentConfig& cfg) {
    const KgEmbeddings& src = dir == Direction::kg1_to_kg2 ? emb.kg1 : emb.kg2;
    const KgEmbeddings& dst = dir == Direction::kg1_to_kg2 ? emb.kg2 : emb.kg1;
    add(cfg.alpha, src.structure, dst.structure, "structure");
    add(cfg.beta, src.attribute, dst.attribute, "attribute");
    add(cfg.gamma_weight, src.subgraph, dst.subgraph, "subgraph");
    if (terms_.empty()) throw Error(ErrorKind::config, "all distance weights are zero");
    n_source_ = terms_.front().source->rows();
    n_target_ = terms_.front().target->rows();
    for (const auto& t : terms_)
      if (t.source->rows() != n_source_ || t.target->rows() != n_target_)
        throw Error(ErrorKind::validation, "channel embeddings disagree on entity counts");
  }

  std::size_t n_source() const { return n_source_; }
  std::size_t n_target() const { return n_target_; }

  double operator()(Index i, Index j) const {
    double d = 0.0;
    for (const auto& t : terms_) d += t.scale * l1_distance(t.source->row(i), t.target->row(j));
    return d;
  }

  void check_source(Index i) const {
    if (i >= n_source_) throw Error(ErrorKind::validation, "unknown source entity " + std::to_string(i));
  }
  void check_target(Index j) const {
    if (j >= n_target_) throw Error(ErrorKind::validation, "unknown target entity " + std::to_string(j));
  }

 private:
  void add(double weight, const DenseMatrix& s, const DenseMatrix& t, const char* name) {
    if (weight == 0.0) return;
    if (s.empty() || t.empty())
      throw Error(ErrorKind::validation, std::string("missing ") + name + " embeddings for a nonzero weight");
    if (s.cols() != t.cols()) throw Error(ErrorKind::validation, std::string(name) + " embedding widths differ");
    terms_.push_back({&s, &t, weight / static_cast<double>(s.cols())});
  }

  std::vector<ChannelTerm> terms_;
  std::size_t n_source_ = 0;
  std::size_t n_target_ = 0;
};

std::size_t rank_of(const DistanceView& dist, Index source, Index truth) {
  const double d_true = dist(source, truth);
  std::size_t better = 0;
  for (std::size_t j = 0; j < dist.n_target(); ++j) {
    const double d = dist(source, static_cast<Index>(j));
    if (d < d_true || (d == d_true && j < truth)) ++better;
  }
  return better + 1;
}

DirectionResult summarize(Direction dir, std::vector<Index> sources, std::vector<std::size_t> ranks,
                          const AlignmentConfig& cfg) {
  DirectionResult r;
  r.direction = dir;
  r.sources = std::move(sources);
  r.ranks = std::move(ranks);
  for (auto k : cfg.hits_levels) r.hits.emplace_back(k, hits_from_ranks(r.ranks, k));
  double sum = 0.0;
  for (auto x : r.ranks) sum += static_cast<double>(x);
  r.mean_rank = sum / static_cast<double>(r.ranks.size());
  return r;
}

template <bool Parallel>
AlignmentResult evaluate_impl(std::span<const SeedPair> test_pairs, const EmbeddingSet& emb,
                              const AlignmentConfig& cfg) {
  cfg.validate();
  if (test_pairs.empty()) throw Error(ErrorKind::validation, "empty test set");
  AlignmentResult out;
  for (Direction dir : {Direction::kg1_to_kg2, Direction::kg2_to_kg1}) {
    const DistanceView dist(dir, emb, cfg);
    const bool fwd = dir == Direction::kg1_to_kg2;
    std::vector<Index> sources(test_pairs.size());
    std::vector<Index> truths(test_pairs.size());
    for (std::size_t i = 0; i < test_pairs.size(); ++i) {
      sources[i] = fwd ? test_pairs[i].left : test_pairs[i].right;
      truths[i] = fwd ? test_pairs[i].right : test_pairs[i].left;
      dist.check_source(sources[i]);
      dist.check_target(truths[i]);
    }
    std::vector<std::size_t> ranks(test_pairs.size());
    const auto n = static_cast<std::int64_t>(test_pairs.size());
    if constexpr (Parallel) {
#pragma omp parallel for schedule(dynamic, 16)
      for (std::int64_t i = 0; i < n; ++i) ranks[i] = rank_of(dist, sources[i], truths[i]);
    } else {
      for (std::int64_t i = 0; i < n; ++i) ranks[i] = rank_of(dist, sources[i], truths[i]);
    }
    (fwd ? out.forward : out.backward) = summarize(dir, std::move(sources), std::move(ranks), cfg);
  }
  return out;
}

}  // namespace

double combined_distance(Index source, Index target, Direction dir, const EmbeddingSet& emb,
                         const AlignmentConfig& cfg) {
  const DistanceView dist(dir, emb, cfg);
  dist.check_source(source);
  dist.check_target(target);
  return dist(source, target);
}

std::vector<Candidate> rank_candidates(Index source, Direction dir, const EmbeddingSet& emb,
                                       const AlignmentConfig& cfg) {
  const DistanceView dist(dir, emb, cfg);
  dist.check_source(source);
  std::vector<Candidate> out(dist.n_target());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = {static_cast<Index>(j), dist(source, static_cast<Index>(j))};
  std::sort(out.begin(), out.end(), [](const Candidate& a, const Candidate& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.entity < b.entity;
  });
  return out;
}

std::size_t true_rank(Index source, Index truth, Direction dir, const EmbeddingSet& emb, const AlignmentConfig& cfg) {
  const DistanceView dist(dir, emb, cfg);
  dist.check_source(source);
  dist.check_target(truth);
  return rank_of(dist, source, truth);
}

double hits_from_ranks(std::span<const std::size_t> ranks, std::size_t k) {
  if (ranks.empty()) return 0.0;
  const auto hit = std::count_if(ranks.begin(), ranks.end(), [k](std::size_t r) { return r <= k; });
  return 100.0 * static_cast<double>(hit) / static_cast<double>(ranks.size());
}

double DirectionResult::hits_at(std::size_t k) const {
  for (const auto& [level, value] : hits)
    if (level == k) return value;
  return hits_from_ranks(ranks, k);
}

AlignmentResult evaluate(std::span<const SeedPair> test_pairs, const EmbeddingSet& emb, const AlignmentConfig& cfg) {
  return evaluate_impl<true>(test_pairs, emb, cfg);
}

namespace reference {

AlignmentResult evaluate(std::span<const SeedPair> test_pairs, const EmbeddingSet& emb, const AlignmentConfig& cfg) {
  return evaluate_impl<false>(test_pairs, emb, cfg);
}

}  // namespace reference

void write_metric_rows(std::ostream& out, const AlignmentResult& result, const char* mode) {
  char buf[32];
  for (const DirectionResult* d : {&result.forward, &result.backward}) {
    auto row = [&](const std::string& metric, double value) {
      std::snprintf(buf, sizeof buf, "%.2f", value);
      if (mode && *mode) out << mode << ',';
      out << to_string(d->direction) << ',' << metric << ',' << buf << '\n';
    };
    for (const auto& [k, v] : d->hits) row("hits@" + std::to_string(k), v);
    row("mean_rank", d->mean_rank);
  }
}

void write_rank_dump(std::ostream& out, const DirectionResult& result) {
  out << "entity,true_rank\n";
  for (std::size_t i = 0; i < result.sources.size(); ++i) out << result.sources[i] << ',' << result.ranks[i] << '\n';
}

}  // namespace subgcn

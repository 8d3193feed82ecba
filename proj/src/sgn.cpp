#include "subgcn/sgn.hpp"

#include <algorithm>
#include <cstdint>
#include <string>

#include "subgcn/error.hpp"
#include "text_util.hpp"

namespace subgcn {

std::vector<std::size_t> Skeleton::degrees() const {
  std::vector<std::size_t> deg(num_nodes, 0);
  for (const auto& [u, v] : edges) {
    ++deg[u];
    ++deg[v];
  }
  return deg;
}

Skeleton build_skeleton(const KnowledgeGraph& kg) {
  Skeleton skel;
  skel.num_nodes = kg.num_entities();
  skel.edges.reserve(kg.relation_triples().size());
  for (const auto& t : kg.relation_triples()) {
    if (t.head == t.tail) {
      ++skel.dropped_self_loops;
      continue;
    }
    skel.edges.emplace_back(std::min(t.head, t.tail), std::max(t.head, t.tail));
  }
  std::sort(skel.edges.begin(), skel.edges.end());
  skel.edges.erase(std::unique(skel.edges.begin(), skel.edges.end()), skel.edges.end());
  return skel;
}

namespace {

// Lines incident to each node, CSR-style; line indices ascend within a bucket
// because lines are sorted.
struct Buckets {
  std::vector<std::size_t> offset;
  std::vector<std::size_t> line;
};

Buckets node_buckets(const Skeleton& skel) {
  Buckets b;
  b.offset.assign(skel.num_nodes + 1, 0);
  for (const auto& [u, v] : skel.edges) {
    ++b.offset[u + 1];
    ++b.offset[v + 1];
  }
  for (std::size_t i = 0; i < skel.num_nodes; ++i) b.offset[i + 1] += b.offset[i];
  b.line.resize(b.offset.back());
  std::vector<std::size_t> cursor(b.offset.begin(), b.offset.end() - 1);
  for (std::size_t i = 0; i < skel.edges.size(); ++i) {
    b.line[cursor[skel.edges[i].first]++] = i;
    b.line[cursor[skel.edges[i].second]++] = i;
  }
  return b;
}

void check_edges(const Skeleton& skel) {
  for (const auto& [u, v] : skel.edges) {
    if (u >= v || v >= skel.num_nodes) throw Error(ErrorKind::validation, "skeleton edge not normalized or out of range");
  }
}

}  // namespace

SubgraphNetwork build_sgn(const Skeleton& skel, int order) {
  if (order != 1)
    throw Error(ErrorKind::config,
                "subgraph network order " + std::to_string(order) + " is not supported; only first order is implemented");
  check_edges(skel);

  SubgraphNetwork sgn;
  sgn.num_entities = skel.num_nodes;
  sgn.lines = skel.edges;

  const Buckets b = node_buckets(skel);
  // In a simple graph two distinct lines share at most one endpoint, so the
  // per-node pair sets are disjoint and can be written at fixed offsets.
  std::vector<std::size_t> out_offset(skel.num_nodes + 1, 0);
  for (std::size_t v = 0; v < skel.num_nodes; ++v) {
    const std::size_t d = b.offset[v + 1] - b.offset[v];
    out_offset[v + 1] = out_offset[v] + (d > 1 ? d * (d - 1) / 2 : 0);
  }
  sgn.links.resize(out_offset.back());

  const auto n = static_cast<std::int64_t>(skel.num_nodes);
#pragma omp parallel for schedule(dynamic, 64)
  for (std::int64_t v = 0; v < n; ++v) {
    std::size_t w = out_offset[v];
    for (std::size_t a = b.offset[v]; a < b.offset[v + 1]; ++a)
      for (std::size_t c = a + 1; c < b.offset[v + 1]; ++c) sgn.links[w++] = {b.line[a], b.line[c]};
  }
  std::sort(sgn.links.begin(), sgn.links.end());
  return sgn;
}

namespace reference {

SubgraphNetwork build_sgn(const Skeleton& skel) {
  check_edges(skel);
  SubgraphNetwork sgn;
  sgn.num_entities = skel.num_nodes;
  sgn.lines = skel.edges;
  const Buckets b = node_buckets(skel);
  for (std::size_t v = 0; v < skel.num_nodes; ++v)
    for (std::size_t a = b.offset[v]; a < b.offset[v + 1]; ++a)
      for (std::size_t c = a + 1; c < b.offset[v + 1]; ++c) sgn.links.emplace_back(b.line[a], b.line[c]);
  std::sort(sgn.links.begin(), sgn.links.end());
  return sgn;
}

}  // namespace reference

SparseMatrix subgraph_features(const KnowledgeGraph& kg, const SubgraphNetwork& sgn) {
  if (sgn.num_entities != kg.num_entities())
    throw Error(ErrorKind::validation, "subgraph network was built for " + std::to_string(sgn.num_entities) +
                                           " entities but the graph has " + std::to_string(kg.num_entities()));
  std::vector<Triplet> trips;
  trips.reserve(2 * sgn.lines.size());
  for (std::size_t i = 0; i < sgn.lines.size(); ++i) {
    trips.push_back({sgn.lines[i].first, static_cast<Index>(i), 1.0});
    trips.push_back({sgn.lines[i].second, static_cast<Index>(i), 1.0});
  }
  return SparseMatrix::from_triplets(kg.num_entities(), sgn.lines.size(), std::move(trips));
}

void save_sgn_links(const std::filesystem::path& path, const SubgraphNetwork& sgn) {
  auto out = detail::open_output(path.string());
  for (const auto& [i, j] : sgn.links) out << i << '\t' << j << '\n';
  if (!out) throw Error(ErrorKind::io, "write failed: " + path.string());
}

}  // namespace subgcn

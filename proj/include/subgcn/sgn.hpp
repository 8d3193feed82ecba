#pragma once

#include <filesystem>
#include <utility>
#include <vector>

#include "subgcn/kg.hpp"
#include "subgcn/matrix.hpp"

namespace subgcn {

using Edge = std::pair<Index, Index>;  // always first < second

// Undirected simple graph over the entity ids: relation labels, direction,
// duplicates and self-loops erased. Edges are sorted lexicographically.
struct Skeleton {
  std::size_t num_nodes = 0;
  std::vector<Edge> edges;
  std::size_t dropped_self_loops = 0;

  std::vector<std::size_t> degrees() const;
};

Skeleton build_skeleton(const KnowledgeGraph& kg);

// First-order subgraph network (the line graph of a skeleton): one node per
// skeleton edge ("line"), and a link between every two lines that share an
// endpoint. Line i is skeleton edge i; links are stored once as (i, j) with
// i < j, sorted.
struct SubgraphNetwork {
  std::size_t num_entities = 0;  // node count of the skeleton it came from
  std::vector<Edge> lines;
  std::vector<std::pair<std::size_t, std::size_t>> links;
};

// Only order 1 is supported; anything else throws Error(config).
SubgraphNetwork build_sgn(const Skeleton& skel, int order = 1);

// Entity x line incidence matrix: (e, i) = 1 iff e is an endpoint of line i.
SparseMatrix subgraph_features(const KnowledgeGraph& kg, const SubgraphNetwork& sgn);

// "i \t j" per link.
void save_sgn_links(const std::filesystem::path& path, const SubgraphNetwork& sgn);

namespace reference {

// Serial bucket enumeration, same output as build_sgn.
SubgraphNetwork build_sgn(const Skeleton& skel);

}  // namespace reference

}  // namespace subgcn

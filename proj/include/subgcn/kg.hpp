#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "subgcn/matrix.hpp"

namespace subgcn {

struct RelationTriple {
  Index head;
  Index relation;
  Index tail;
  friend bool operator==(const RelationTriple&, const RelationTriple&) = default;
};

struct AttributeTriple {
  Index entity;
  Index attribute;
  std::string value;  // stored verbatim, never featurized
  friend bool operator==(const AttributeTriple&, const AttributeTriple&) = default;
};

// One language side: dense ids 0..n for entities, relations and attributes,
// with the original URIs kept as labels. Immutable after construction.
class KnowledgeGraph {
 public:
  KnowledgeGraph() = default;
  // Throws Error(validation) if any triple references an undeclared id.
  KnowledgeGraph(std::vector<std::string> entity_labels, std::vector<std::string> relation_labels,
                 std::vector<std::string> attribute_labels, std::vector<RelationTriple> relation_triples,
                 std::vector<AttributeTriple> attribute_triples);

  std::size_t num_entities() const { return entity_labels_.size(); }
  std::size_t num_relations() const { return relation_labels_.size(); }
  std::size_t num_attributes() const { return attribute_labels_.size(); }

  const std::vector<std::string>& entity_labels() const { return entity_labels_; }
  const std::vector<std::string>& relation_labels() const { return relation_labels_; }
  const std::vector<std::string>& attribute_labels() const { return attribute_labels_; }
  const std::vector<RelationTriple>& relation_triples() const { return relation_triples_; }
  const std::vector<AttributeTriple>& attribute_triples() const { return attribute_triples_; }

  friend bool operator==(const KnowledgeGraph&, const KnowledgeGraph&) = default;

 private:
  std::vector<std::string> entity_labels_;
  std::vector<std::string> relation_labels_;
  std::vector<std::string> attribute_labels_;
  std::vector<RelationTriple> relation_triples_;
  std::vector<AttributeTriple> attribute_triples_;
};

struct SeedPair {
  Index left;   // entity in KG1
  Index right;  // entity in KG2
  friend bool operator==(const SeedPair&, const SeedPair&) = default;
};

enum class SplitTag : std::uint8_t { unassigned, train, test };

// Pre-aligned entity pairs. Pairs form a partial bijection between the two
// entity sets; each pair carries a split tag.
struct SeedAlignment {
  std::vector<SeedPair> pairs;
  std::vector<SplitTag> tags;  // parallel to pairs

  std::vector<SeedPair> train() const;
  std::vector<SeedPair> test() const;
  std::size_t size() const { return pairs.size(); }

  // Throws Error(validation) on a repeated id on either side or an id out of range.
  void validate(std::size_t n_left, std::size_t n_right) const;

  friend bool operator==(const SeedAlignment&, const SeedAlignment&) = default;
};

struct Dataset {
  KnowledgeGraph kg1;
  KnowledgeGraph kg2;
  SeedAlignment seeds;
};

struct GraphCounts {
  std::size_t entities = 0;
  std::size_t relations = 0;
  std::size_t attributes = 0;
  std::size_t relation_triples = 0;
  std::size_t attribute_triples = 0;
  friend bool operator==(const GraphCounts&, const GraphCounts&) = default;
};

GraphCounts counts_of(const KnowledgeGraph& kg);

// Reads the tab-separated DBP15K layout:
//   ent_ids_{1,2}       id \t URI
//   rel_ids_{1,2}       id \t URI
//   attr_ids_{1,2}      id \t URI          (optional)
//   triples_{1,2}       head \t relation \t tail
//   attr_triples_{1,2}  entity \t attribute \t value
//                       attribute is an id from attr_ids_k when that file
//                       exists, otherwise a predicate string indexed in
//                       first-seen order
//   ref_ent_ids         left \t right
// Ids in the files may be sparse and are remapped to dense ids in file order.
// Seed pairs come back with no split assigned.
Dataset load_dbp15k(const std::filesystem::path& dir);

// Writes the same layout with dense ids (attr_ids_k always written).
void save_dbp15k(const std::filesystem::path& dir, const Dataset& data);

// floor(train_fraction * m) pairs, sampled uniformly, become train; the rest test.
SeedAlignment split_seeds(const SeedAlignment& seeds, double train_fraction, std::uint64_t rng_seed);

struct SyntheticSpec {
  std::size_t n_entities = 200;
  std::size_t n_relations = 20;
  std::size_t n_rel_triples = 800;
  std::size_t n_attributes = 50;
  double attr_per_entity = 4.0;
  double perturbation_rate = 0.0;
  std::uint64_t rng_seed = 42;

  void validate() const;
};

// KG2 is a randomly permuted copy of KG1 with perturbation_rate of its
// relation triples rewired and the same share of attribute assignments
// resampled. The seed alignment is the full permutation.
Dataset generate_synthetic_pair(const SyntheticSpec& spec);

// Attribute space shared by both graphs: labels matched exactly, then capped
// to the `cap` most frequent labels (ties broken by label).
struct AttributeVocabulary {
  std::vector<std::string> labels;
  std::vector<std::int64_t> column_of_kg1;  // kg1 attribute id -> column, -1 if dropped
  std::vector<std::int64_t> column_of_kg2;

  std::size_t size() const { return labels.size(); }
};

AttributeVocabulary build_shared_attributes(const KnowledgeGraph& kg1, const KnowledgeGraph& kg2, std::size_t cap);

// Binary entity x vocabulary matrix; entities without attributes get empty rows.
SparseMatrix attribute_features(const KnowledgeGraph& kg, std::span<const std::int64_t> column_of, std::size_t width);

}  // namespace subgcn

#include "subgcn/kg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "subgcn/error.hpp"
#include "subgcn/rng.hpp"
#include "text_util.hpp"

namespace subgcn {

namespace fs = std::filesystem;

KnowledgeGraph::KnowledgeGraph(std::vector<std::string> entity_labels, std::vector<std::string> relation_labels,
                               std::vector<std::string> attribute_labels,
                               std::vector<RelationTriple> relation_triples,
                               std::vector<AttributeTriple> attribute_triples)
    : entity_labels_(std::move(entity_labels)),
      relation_labels_(std::move(relation_labels)),
      attribute_labels_(std::move(attribute_labels)),
      relation_triples_(std::move(relation_triples)),
      attribute_triples_(std::move(attribute_triples)) {
  const std::size_t ne = entity_labels_.size();
  for (std::size_t i = 0; i < relation_triples_.size(); ++i) {
    const auto& t = relation_triples_[i];
    if (t.head >= ne || t.tail >= ne || t.relation >= relation_labels_.size())
      throw Error(ErrorKind::validation, "relation triple #" + std::to_string(i) + " references an undeclared id");
  }
  for (std::size_t i = 0; i < attribute_triples_.size(); ++i) {
    const auto& t = attribute_triples_[i];
    if (t.entity >= ne || t.attribute >= attribute_labels_.size())
      throw Error(ErrorKind::validation, "attribute triple #" + std::to_string(i) + " references an undeclared id");
  }
}

GraphCounts counts_of(const KnowledgeGraph& kg) {
  return {kg.num_entities(), kg.num_relations(), kg.num_attributes(), kg.relation_triples().size(),
          kg.attribute_triples().size()};
}

std::vector<SeedPair> SeedAlignment::train() const {
  std::vector<SeedPair> out;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (tags[i] == SplitTag::train) out.push_back(pairs[i]);
  return out;
}

std::vector<SeedPair> SeedAlignment::test() const {
  std::vector<SeedPair> out;
  for (std::size_t i = 0; i < pairs.size(); ++i)
    if (tags[i] == SplitTag::test) out.push_back(pairs[i]);
  return out;
}

void SeedAlignment::validate(std::size_t n_left, std::size_t n_right) const {
  if (tags.size() != pairs.size()) throw Error(ErrorKind::internal, "seed tags out of sync with pairs");
  std::vector<bool> seen_left(n_left), seen_right(n_right);
  for (const auto& p : pairs) {
    if (p.left >= n_left || p.right >= n_right)
      throw Error(ErrorKind::validation, "seed pair references an unknown entity");
    if (seen_left[p.left]) throw Error(ErrorKind::validation, "entity " + std::to_string(p.left) + " seeded twice in KG1");
    if (seen_right[p.right])
      throw Error(ErrorKind::validation, "entity " + std::to_string(p.right) + " seeded twice in KG2");
    seen_left[p.left] = true;
    seen_right[p.right] = true;
  }
}

// ---------------------------------------------------------------------------
// DBP15K layout

namespace {

struct LineReader {
  explicit LineReader(const fs::path& p) : path(p), in(p) {
    if (!in) throw Error(ErrorKind::io, "missing file " + p.string());
  }

  // Next non-empty line with any trailing '\r' removed.
  bool next(std::string& line) {
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorKind::parse, path.string() + ":" + std::to_string(lineno) + ": " + what);
  }

  fs::path path;
  std::ifstream in;
  std::size_t lineno = 0;
};

struct IdTable {
  std::vector<std::string> labels;
  std::unordered_map<std::int64_t, Index> dense;

  Index lookup(std::int64_t raw, const LineReader& r, const char* what) const {
    auto it = dense.find(raw);
    if (it == dense.end()) r.fail(std::string("undeclared ") + what + " id " + std::to_string(raw));
    return it->second;
  }
};

std::int64_t parse_id(std::string_view field, const LineReader& r) {
  auto v = detail::parse_int<std::int64_t>(detail::trim(field));
  if (!v) r.fail("non-integer id '" + std::string(field) + "'");
  return *v;
}

IdTable read_id_file(const fs::path& path) {
  LineReader r(path);
  IdTable table;
  std::string line;
  while (r.next(line)) {
    auto f = detail::split(line, '\t', 2);
    if (f.size() != 2) r.fail("expected 2 tab-separated columns");
    auto raw = parse_id(f[0], r);
    if (!table.dense.emplace(raw, static_cast<Index>(table.labels.size())).second)
      r.fail("duplicate id " + std::to_string(raw));
    table.labels.emplace_back(f[1]);
  }
  return table;
}

KnowledgeGraph read_side(const fs::path& dir, int side, IdTable& entities) {
  const std::string k = std::to_string(side);
  entities = read_id_file(dir / ("ent_ids_" + k));
  IdTable relations = read_id_file(dir / ("rel_ids_" + k));

  std::vector<RelationTriple> rel_triples;
  {
    LineReader r(dir / ("triples_" + k));
    std::string line;
    while (r.next(line)) {
      auto f = detail::split(line, '\t');
      if (f.size() != 3) r.fail("expected 3 tab-separated columns");
      rel_triples.push_back({entities.lookup(parse_id(f[0], r), r, "entity"),
                             relations.lookup(parse_id(f[1], r), r, "relation"),
                             entities.lookup(parse_id(f[2], r), r, "entity")});
    }
  }

  const fs::path attr_ids_path = dir / ("attr_ids_" + k);
  const bool declared_attrs = fs::exists(attr_ids_path);
  IdTable attributes = declared_attrs ? read_id_file(attr_ids_path) : IdTable{};
  std::unordered_map<std::string, Index> attr_by_label;

  std::vector<AttributeTriple> attr_triples;
  const fs::path attr_triples_path = dir / ("attr_triples_" + k);
  if (fs::exists(attr_triples_path) || declared_attrs) {
    LineReader r(attr_triples_path);
    std::string line;
    while (r.next(line)) {
      auto f = detail::split(line, '\t', 3);
      if (f.size() != 3) r.fail("expected 3 tab-separated columns");
      Index attr;
      if (declared_attrs) {
        attr = attributes.lookup(parse_id(f[1], r), r, "attribute");
      } else {
        std::string label(f[1]);
        auto [it, fresh] = attr_by_label.emplace(label, static_cast<Index>(attributes.labels.size()));
        if (fresh) attributes.labels.push_back(label);
        attr = it->second;
      }
      attr_triples.push_back({entities.lookup(parse_id(f[0], r), r, "entity"), attr, std::string(f[2])});
    }
  }

  return KnowledgeGraph(entities.labels, std::move(relations.labels), std::move(attributes.labels),
                        std::move(rel_triples), std::move(attr_triples));
}

void write_labels(const fs::path& path, const std::vector<std::string>& labels) {
  auto out = detail::open_output(path.string());
  for (std::size_t i = 0; i < labels.size(); ++i) out << i << '\t' << labels[i] << '\n';
  if (!out) throw Error(ErrorKind::io, "write failed: " + path.string());
}

void write_side(const fs::path& dir, int side, const KnowledgeGraph& kg) {
  const std::string k = std::to_string(side);
  write_labels(dir / ("ent_ids_" + k), kg.entity_labels());
  write_labels(dir / ("rel_ids_" + k), kg.relation_labels());
  write_labels(dir / ("attr_ids_" + k), kg.attribute_labels());
  {
    auto out = detail::open_output((dir / ("triples_" + k)).string());
    for (const auto& t : kg.relation_triples()) out << t.head << '\t' << t.relation << '\t' << t.tail << '\n';
  }
  {
    auto out = detail::open_output((dir / ("attr_triples_" + k)).string());
    for (const auto& t : kg.attribute_triples()) out << t.entity << '\t' << t.attribute << '\t' << t.value << '\n';
  }
}

}  // namespace

Dataset load_dbp15k(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorKind::io, "dataset directory not found: " + dir.string());
  // Check the link file first so a missing file is reported before any parsing.
  if (!fs::exists(dir / "ref_ent_ids")) throw Error(ErrorKind::io, "missing file " + (dir / "ref_ent_ids").string());

  Dataset data;
  IdTable ents1, ents2;
  data.kg1 = read_side(dir, 1, ents1);
  data.kg2 = read_side(dir, 2, ents2);

  LineReader r(dir / "ref_ent_ids");
  std::string line;
  while (r.next(line)) {
    auto f = detail::split(line, '\t');
    if (f.size() != 2) r.fail("expected 2 tab-separated columns");
    data.seeds.pairs.push_back({ents1.lookup(parse_id(f[0], r), r, "KG1 entity"),
                                ents2.lookup(parse_id(f[1], r), r, "KG2 entity")});
  }
  data.seeds.tags.assign(data.seeds.pairs.size(), SplitTag::unassigned);
  data.seeds.validate(data.kg1.num_entities(), data.kg2.num_entities());
  return data;
}

void save_dbp15k(const fs::path& dir, const Dataset& data) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
  write_side(dir, 1, data.kg1);
  write_side(dir, 2, data.kg2);
  auto out = detail::open_output((dir / "ref_ent_ids").string());
  for (const auto& p : data.seeds.pairs) out << p.left << '\t' << p.right << '\n';
  if (!out) throw Error(ErrorKind::io, "write failed: " + (dir / "ref_ent_ids").string());
}

// ---------------------------------------------------------------------------

SeedAlignment split_seeds(const SeedAlignment& seeds, double train_fraction, std::uint64_t rng_seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw Error(ErrorKind::config, "train_fraction must lie strictly between 0 and 1");
  const std::size_t m = seeds.pairs.size();
  // The epsilon keeps products like 0.29 * 100 from flooring to 28.
  const auto n_train = static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(m) + 1e-9));
  if (n_train == 0 || n_train >= m)
    throw Error(ErrorKind::validation, "degenerate split: " + std::to_string(n_train) + " train of " +
                                           std::to_string(m) + " pairs");

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(rng_seed);
  rng.shuffle(std::span<std::size_t>(order));

  SeedAlignment out{seeds.pairs, std::vector<SplitTag>(m, SplitTag::test)};
  for (std::size_t i = 0; i < n_train; ++i) out.tags[order[i]] = SplitTag::train;
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic pairs

void SyntheticSpec::validate() const {
  if (n_entities < 2 || n_relations == 0 || n_rel_triples == 0 || n_attributes == 0)
    throw Error(ErrorKind::config, "synthetic spec counts must be positive (and at least 2 entities)");
  if (!(attr_per_entity >= 0.0)) throw Error(ErrorKind::config, "attr_per_entity must be >= 0");
  if (!(perturbation_rate >= 0.0 && perturbation_rate <= 1.0))
    throw Error(ErrorKind::config, "perturbation_rate must lie in [0, 1]");
  // Triples are distinct ordered (head, tail) pairs without self-loops.
  if (n_rel_triples > n_entities * (n_entities - 1))
    throw Error(ErrorKind::config, "n_rel_triples exceeds the number of distinct entity pairs");
}

Dataset generate_synthetic_pair(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(spec.rng_seed);
  const std::size_t n = spec.n_entities;

  std::vector<std::string> rel_labels(spec.n_relations), attr_labels(spec.n_attributes);
  for (std::size_t r = 0; r < rel_labels.size(); ++r) rel_labels[r] = "http://synthetic.org/relation/" + std::to_string(r);
  for (std::size_t a = 0; a < attr_labels.size(); ++a)
    attr_labels[a] = "http://synthetic.org/attribute/" + std::to_string(a);

  std::vector<RelationTriple> triples1;
  triples1.reserve(spec.n_rel_triples);
  std::unordered_set<std::uint64_t> used;
  while (triples1.size() < spec.n_rel_triples) {
    auto h = static_cast<Index>(rng.below(n));
    auto t = static_cast<Index>(rng.below(n));
    if (h == t || !used.insert(std::uint64_t{h} * n + t).second) continue;
    triples1.push_back({h, static_cast<Index>(rng.below(spec.n_relations)), t});
  }

  std::vector<AttributeTriple> attrs1;
  const auto max_count = static_cast<std::uint64_t>(std::llround(2.0 * spec.attr_per_entity));
  for (Index e = 0; e < n; ++e) {
    std::size_t count = std::min<std::size_t>(rng.below(max_count + 1), spec.n_attributes);
    std::vector<Index> chosen;
    while (chosen.size() < count) {
      auto a = static_cast<Index>(rng.below(spec.n_attributes));
      if (std::find(chosen.begin(), chosen.end(), a) == chosen.end()) chosen.push_back(a);
    }
    for (Index a : chosen) attrs1.push_back({e, a, "v" + std::to_string(rng.below(1000000))});
  }

  std::vector<Index> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  rng.shuffle(std::span<Index>(perm));

  std::vector<std::string> ents1(n), ents2(n);
  for (std::size_t e = 0; e < n; ++e) {
    ents1[e] = "http://kg1.synthetic.org/entity/" + std::to_string(e);
    ents2[e] = "http://kg2.synthetic.org/entity/" + std::to_string(e);
  }

  std::vector<RelationTriple> triples2;
  triples2.reserve(triples1.size());
  for (const auto& t : triples1) triples2.push_back({perm[t.head], t.relation, perm[t.tail]});
  rng.shuffle(std::span<RelationTriple>(triples2));

  std::vector<AttributeTriple> attrs2;
  attrs2.reserve(attrs1.size());
  for (const auto& t : attrs1) attrs2.push_back({perm[t.entity], t.attribute, t.value});
  rng.shuffle(std::span<AttributeTriple>(attrs2));

  auto pick_indices = [&](std::size_t total) {
    const auto k = static_cast<std::size_t>(std::llround(spec.perturbation_rate * static_cast<double>(total)));
    std::vector<std::size_t> idx(total);
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(std::span<std::size_t>(idx));
    idx.resize(std::min(k, total));
    return idx;
  };
  for (std::size_t i : pick_indices(triples2.size())) {
    auto& t = triples2[i];
    Index fresh;
    do {
      fresh = static_cast<Index>(rng.below(n));
    } while (fresh == t.head || fresh == t.tail);
    t.tail = fresh;
  }
  for (std::size_t i : pick_indices(attrs2.size())) attrs2[i].attribute = static_cast<Index>(rng.below(spec.n_attributes));

  Dataset data;
  data.kg1 = KnowledgeGraph(std::move(ents1), rel_labels, attr_labels, std::move(triples1), std::move(attrs1));
  data.kg2 = KnowledgeGraph(std::move(ents2), std::move(rel_labels), std::move(attr_labels), std::move(triples2),
                            std::move(attrs2));
  data.seeds.pairs.reserve(n);
  for (Index e = 0; e < n; ++e) data.seeds.pairs.push_back({e, perm[e]});
  data.seeds.tags.assign(n, SplitTag::unassigned);
  return data;
}

// ---------------------------------------------------------------------------
// Shared attribute space

AttributeVocabulary build_shared_attributes(const KnowledgeGraph& kg1, const KnowledgeGraph& kg2, std::size_t cap) {
  std::map<std::string, std::size_t> freq;
  for (const auto* kg : {&kg1, &kg2}) {
    for (const auto& label : kg->attribute_labels()) freq.emplace(label, 0);
    for (const auto& t : kg->attribute_triples()) ++freq[kg->attribute_labels()[t.attribute]];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > cap) ranked.resize(cap);

  AttributeVocabulary vocab;
  std::unordered_map<std::string, std::int64_t> column;
  for (auto& [label, count] : ranked) {
    column.emplace(label, static_cast<std::int64_t>(vocab.labels.size()));
    vocab.labels.push_back(label);
  }
  auto map_side = [&](const KnowledgeGraph& kg) {
    std::vector<std::int64_t> out(kg.num_attributes(), -1);
    for (std::size_t a = 0; a < out.size(); ++a) {
      auto it = column.find(kg.attribute_labels()[a]);
      if (it != column.end()) out[a] = it->second;
    }
    return out;
  };
  vocab.column_of_kg1 = map_side(kg1);
  vocab.column_of_kg2 = map_side(kg2);
  return vocab;
}

SparseMatrix attribute_features(const KnowledgeGraph& kg, std::span<const std::int64_t> column_of, std::size_t width) {
  if (column_of.size() != kg.num_attributes())
    throw Error(ErrorKind::validation, "attribute column map does not match the graph's attribute count");

  std::vector<std::uint64_t> keys;
  for (const auto& t : kg.attribute_triples()) {
    auto c = column_of[t.attribute];
    if (c >= 0) keys.push_back(std::uint64_t{t.entity} << 32 | static_cast<std::uint64_t>(c));
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  std::vector<Triplet> trips;
  trips.reserve(keys.size());
  for (auto k : keys) trips.push_back({static_cast<Index>(k >> 32), static_cast<Index>(k & 0xffffffffu), 1.0});
  return SparseMatrix::from_triplets(kg.num_entities(), width, std::move(trips));
}

}  // namespace subgcn

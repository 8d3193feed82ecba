#include "subgcn/config.hpp"

#include <cmath>
#include <sstream>

#include "subgcn/error.hpp"
#include "text_util.hpp"

namespace subgcn {

const char* to_string(Mode m) {
  switch (m) {
    case Mode::se: return "se";
    case Mode::se_ae: return "se+ae";
    case Mode::sub_gcn: return "sub-gcn";
  }
  return "sub-gcn";
}

Mode mode_from_string(std::string_view s) {
  if (s == "se") return Mode::se;
  if (s == "se+ae") return Mode::se_ae;
  if (s == "sub-gcn") return Mode::sub_gcn;
  throw Error(ErrorKind::config, "unknown mode '" + std::string(s) + "' (expected se, se+ae or sub-gcn)");
}

std::vector<ChannelKind> channels_for(Mode m) {
  switch (m) {
    case Mode::se: return {ChannelKind::structure};
    case Mode::se_ae: return {ChannelKind::structure, ChannelKind::attribute};
    case Mode::sub_gcn: return {ChannelKind::structure, ChannelKind::attribute, ChannelKind::subgraph};
  }
  return {};
}

namespace {

[[noreturn]] void bad_value(std::string_view key, std::string_view value) {
  throw Error(ErrorKind::config, "bad value '" + std::string(value) + "' for key '" + std::string(key) + "'");
}

std::size_t as_size(std::string_view key, std::string_view v) {
  auto x = detail::parse_int<std::size_t>(v);
  if (!x) bad_value(key, v);
  return *x;
}

std::uint64_t as_u64(std::string_view key, std::string_view v) {
  auto x = detail::parse_int<std::uint64_t>(v);
  if (!x) bad_value(key, v);
  return *x;
}

double as_double(std::string_view key, std::string_view v) {
  auto x = detail::parse_double(v);
  if (!x || !std::isfinite(*x)) bad_value(key, v);
  return *x;
}

template <typename T, typename F>
std::vector<T> as_list(std::string_view key, std::string_view v, F parse_one) {
  std::vector<T> out;
  for (auto item : detail::split(v, ',')) {
    auto t = detail::trim(item);
    if (t.empty()) bad_value(key, v);
    out.push_back(parse_one(key, t));
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ',';
    if constexpr (std::is_floating_point_v<T>)
      s += detail::format_double(xs[i]);
    else
      s += std::to_string(xs[i]);
  }
  return s;
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
  const auto v = detail::trim(value);
  if (key == "dataset") dataset = std::string(v);
  else if (key == "mode") mode = mode_from_string(v);
  else if (key == "seed") seed = as_u64(key, v);
  else if (key == "train_fraction") train_fraction = as_double(key, v);
  else if (key == "dim_structure") dim_structure = as_size(key, v);
  else if (key == "dim_attribute") dim_attribute = as_size(key, v);
  else if (key == "dim_subgraph") dim_subgraph = as_size(key, v);
  else if (key == "output_activation") output_activation = activation_from_string(v);
  else if (key == "margin_structure") margin_structure = as_double(key, v);
  else if (key == "margin_attribute") margin_attribute = as_double(key, v);
  else if (key == "margin_subgraph") margin_subgraph = as_double(key, v);
  else if (key == "negatives_per_side") negatives_per_side = as_size(key, v);
  else if (key == "epochs") epochs = as_size(key, v);
  else if (key == "learning_rate") learning_rate = as_double(key, v);
  else if (key == "resample_every") resample_every = as_size(key, v);
  else if (key == "checkpoint_every") checkpoint_every = as_size(key, v);
  else if (key == "alpha") alpha = as_double(key, v);
  else if (key == "beta") beta = as_double(key, v);
  else if (key == "gamma_weight") gamma_weight = as_double(key, v);
  else if (key == "hits") hits = as_list<std::size_t>(key, v, as_size);
  else if (key == "attribute_cap") attribute_cap = as_size(key, v);
  else if (key == "adjacency_floor") adjacency_floor = as_double(key, v);
  else if (key == "sweep_fractions") sweep_fractions = as_list<double>(key, v, as_double);
  else if (key == "synth_entities") synth_entities = as_size(key, v);
  else if (key == "synth_relations") synth_relations = as_size(key, v);
  else if (key == "synth_triples") synth_triples = as_size(key, v);
  else if (key == "synth_attributes") synth_attributes = as_size(key, v);
  else if (key == "synth_attr_per_entity") synth_attr_per_entity = as_double(key, v);
  else if (key == "synth_perturbation") synth_perturbation = as_double(key, v);
  else throw Error(ErrorKind::config, "unknown config key '" + std::string(key) + "'");
}

RunConfig RunConfig::parse(std::string_view text) {
  RunConfig cfg;
  std::size_t lineno = 0;
  for (auto raw : detail::split(text, '\n')) {
    ++lineno;
    auto line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorKind::config, "config line " + std::to_string(lineno) + ": expected key = value");
    cfg.set(detail::trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  auto in = detail::open_input(path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string RunConfig::serialize() const {
  std::ostringstream o;
  auto d = [](double x) { return detail::format_double(x); };
  o << "dataset = " << dataset << '\n'
    << "mode = " << to_string(mode) << '\n'
    << "seed = " << seed << '\n'
    << "train_fraction = " << d(train_fraction) << '\n'
    << "dim_structure = " << dim_structure << '\n'
    << "dim_attribute = " << dim_attribute << '\n'
    << "dim_subgraph = " << dim_subgraph << '\n'
    << "output_activation = " << to_string(output_activation) << '\n'
    << "margin_structure = " << d(margin_structure) << '\n'
    << "margin_attribute = " << d(margin_attribute) << '\n'
    << "margin_subgraph = " << d(margin_subgraph) << '\n'
    << "negatives_per_side = " << negatives_per_side << '\n'
    << "epochs = " << epochs << '\n'
    << "learning_rate = " << d(learning_rate) << '\n'
    << "resample_every = " << resample_every << '\n'
    << "checkpoint_every = " << checkpoint_every << '\n'
    << "alpha = " << d(alpha) << '\n'
    << "beta = " << d(beta) << '\n'
    << "gamma_weight = " << d(gamma_weight) << '\n'
    << "hits = " << join(hits) << '\n'
    << "attribute_cap = " << attribute_cap << '\n'
    << "adjacency_floor = " << d(adjacency_floor) << '\n'
    << "sweep_fractions = " << join(sweep_fractions) << '\n'
    << "synth_entities = " << synth_entities << '\n'
    << "synth_relations = " << synth_relations << '\n'
    << "synth_triples = " << synth_triples << '\n'
    << "synth_attributes = " << synth_attributes << '\n'
    << "synth_attr_per_entity = " << d(synth_attr_per_entity) << '\n'
    << "synth_perturbation = " << d(synth_perturbation) << '\n';
  return o.str();
}

void RunConfig::validate() const {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw Error(ErrorKind::config, "train_fraction must be in (0, 1)");
  if (dim_structure == 0 || dim_attribute == 0 || dim_subgraph == 0)
    throw Error(ErrorKind::config, "embedding dimensions must be positive");
  if (attribute_cap == 0) throw Error(ErrorKind::config, "attribute_cap must be positive");
  if (adjacency_floor < 0.0) throw Error(ErrorKind::config, "adjacency_floor must be >= 0");
  for (double f : sweep_fractions)
    if (!(f > 0.0 && f < 1.0)) throw Error(ErrorKind::config, "sweep fractions must be in (0, 1)");
  training().validate();
  alignment().validate();
}

TrainingConfig RunConfig::training() const {
  TrainingConfig t;
  t.margin_structure = margin_structure;
  t.margin_attribute = margin_attribute;
  t.margin_subgraph = margin_subgraph;
  t.negatives_per_side = negatives_per_side;
  t.epochs = epochs;
  t.learning_rate = learning_rate;
  t.rng_seed = seed;
  t.resample_every = resample_every;
  t.checkpoint_every = checkpoint_every;
  return t;
}

AlignmentConfig RunConfig::alignment(Mode m) const {
  AlignmentConfig a;
  a.hits_levels = hits;
  switch (m) {
    case Mode::se:
      a.alpha = 1.0;
      a.beta = 0.0;
      a.gamma_weight = 0.0;
      break;
    case Mode::se_ae:
      a.alpha = alpha + gamma_weight;
      a.beta = beta;
      a.gamma_weight = 0.0;
      break;
    case Mode::sub_gcn:
      a.alpha = alpha;
      a.beta = beta;
      a.gamma_weight = gamma_weight;
      break;
  }
  return a;
}

SyntheticSpec RunConfig::synthetic() const {
  SyntheticSpec s;
  s.n_entities = synth_entities;
  s.n_relations = synth_relations;
  s.n_rel_triples = synth_triples;
  s.n_attributes = synth_attributes;
  s.attr_per_entity = synth_attr_per_entity;
  s.perturbation_rate = synth_perturbation;
  s.rng_seed = seed;
  return s;
}

}  // namespace subgcn

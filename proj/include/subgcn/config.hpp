#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "subgcn/aligner.hpp"
#include "subgcn/gcn.hpp"
#include "subgcn/kg.hpp"
#include "subgcn/trainer.hpp"

namespace subgcn {

inline constexpr const char* kVersion = "subgcn 0.1.0";

enum class Mode { se, se_ae, sub_gcn };

const char* to_string(Mode m);
Mode mode_from_string(std::string_view s);

// Channels trained and used for ranking in each mode.
std::vector<ChannelKind> channels_for(Mode m);

// Every run parameter. Stored as "key = value" lines; '#' starts a comment.
//
//   key                    default   meaning
//   dataset                ""        dataset directory (DBP15K layout)
//   mode                   sub-gcn   se | se+ae | sub-gcn
//   seed                   42        master seed; all streams derive from it
//   train_fraction         0.3       share of seed pairs used for training
//   dim_structure          200       d_s
//   dim_attribute          100       d_a
//   dim_subgraph           100       d_sgn
//   output_activation      identity  identity | relu (second GCN layer)
//   margin_structure       3         hinge margins
//   margin_attribute       3
//   margin_subgraph        3
//   negatives_per_side     20        k corruptions per side per positive
//   epochs                 5000
//   learning_rate          1         SGD step on the per-term mean hinge loss
//   resample_every         10        epochs between negative resampling
//   checkpoint_every       0         periodic checkpoints (0 = final only)
//   alpha                  0.72      ranking weights, must sum to 1
//   beta                   0.2
//   gamma_weight           0.08
//   hits                   1,10,50
//   attribute_cap          2000      shared attribute vocabulary size cap
//   adjacency_floor        0.3       lower clip of functionality weights
//   sweep_fractions        0.1,0.2,0.3,0.4,0.5,0.6
//   synth_entities         200       synthetic generator (synth command)
//   synth_relations        20
//   synth_triples          800
//   synth_attributes       50
//   synth_attr_per_entity  4
//   synth_perturbation     0
struct RunConfig {
  std::string dataset;
  Mode mode = Mode::sub_gcn;
  std::uint64_t seed = 42;
  double train_fraction = 0.3;

  std::size_t dim_structure = 200;
  std::size_t dim_attribute = 100;
  std::size_t dim_subgraph = 100;
  Activation output_activation = Activation::identity;

  double margin_structure = 3.0;
  double margin_attribute = 3.0;
  double margin_subgraph = 3.0;
  std::size_t negatives_per_side = 20;
  std::size_t epochs = 5000;
  double learning_rate = 1.0;
  std::size_t resample_every = 10;
  std::size_t checkpoint_every = 0;

  double alpha = 0.72;
  double beta = 0.2;
  double gamma_weight = 0.08;
  std::vector<std::size_t> hits{1, 10, 50};

  std::size_t attribute_cap = 2000;
  double adjacency_floor = 0.3;
  std::vector<double> sweep_fractions{0.1, 0.2, 0.3, 0.4, 0.5, 0.6};

  std::size_t synth_entities = 200;
  std::size_t synth_relations = 20;
  std::size_t synth_triples = 800;
  std::size_t synth_attributes = 50;
  double synth_attr_per_entity = 4.0;
  double synth_perturbation = 0.0;

  // Throws Error(config) on an unknown key or a malformed value.
  void set(std::string_view key, std::string_view value);
  static RunConfig parse(std::string_view text);
  static RunConfig load(const std::filesystem::path& path);
  // All keys in the order of the table above; parse(serialize()) round-trips.
  std::string serialize() const;

  void validate() const;

  TrainingConfig training() const;
  // Ranking weights for `m`: weights of channels the mode drops move onto
  // the structure channel (se+ae at defaults is 0.8 / 0.2).
  AlignmentConfig alignment(Mode m) const;
  AlignmentConfig alignment() const { return alignment(mode); }
  SyntheticSpec synthetic() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

}  // namespace subgcn

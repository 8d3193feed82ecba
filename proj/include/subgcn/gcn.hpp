#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "subgcn/adjacency.hpp"
#include "subgcn/matrix.hpp"

namespace subgcn {

enum class ChannelKind { structure, attribute, subgraph };
enum class Activation { relu, identity };

const char* to_string(ChannelKind kind);
ChannelKind channel_kind_from_string(std::string_view s);
const char* to_string(Activation a);
Activation activation_from_string(std::string_view s);

struct GcnChannelConfig {
  ChannelKind kind = ChannelKind::structure;
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::size_t output_dim = 0;
  Activation hidden_activation = Activation::relu;
  Activation output_activation = Activation::identity;

  bool trainable_input() const { return kind == ChannelKind::structure; }

  // input = hidden = output = d_s
  static GcnChannelConfig structure(std::size_t d_s);
  // input_dim = shared attribute vocabulary size, hidden = output = d_a
  static GcnChannelConfig attribute(std::size_t vocab_size, std::size_t d_a);
  // input_dim = max line count over the two graphs, hidden = output = d_sgn
  static GcnChannelConfig subgraph(std::size_t max_lines, std::size_t d_sgn);

  void validate() const;
  friend bool operator==(const GcnChannelConfig&, const GcnChannelConfig&) = default;
};

struct ChannelGradients {
  DenseMatrix w1;
  DenseMatrix w2;
  std::array<DenseMatrix, 2> inputs;  // empty for fixed inputs
};

// Two-layer GCN with one weight pair shared by both graphs:
//   H1 = act1(A H0 W1),  H2 = act2(A H1 W2)
// H0 is a trainable dense matrix for the structure channel and a fixed
// sparse multi-hot matrix otherwise.
class GcnChannel {
 public:
  using Input = std::variant<DenseMatrix, SparseMatrix>;

  GcnChannel(GcnChannelConfig config, DenseMatrix w1, DenseMatrix w2, std::array<Input, 2> inputs);

  // Glorot-uniform weights; structure inputs uniform in +-1/sqrt(d_s).
  static GcnChannel init_structure(const GcnChannelConfig& config, std::size_t n1, std::size_t n2,
                                   std::uint64_t seed);
  // Fixed sparse inputs, zero-padded on the right to config.input_dim columns.
  static GcnChannel init_fixed(const GcnChannelConfig& config, const SparseMatrix& features1,
                               const SparseMatrix& features2, std::uint64_t seed);

  const GcnChannelConfig& config() const { return config_; }
  const DenseMatrix& w1() const { return w1_; }
  const DenseMatrix& w2() const { return w2_; }
  const Input& input(std::size_t side) const { return inputs_[side]; }
  std::size_t num_entities(std::size_t side) const;

  // Trainable tensors in a fixed order: W1, W2, then H0 of both graphs when
  // the input is trainable.
  std::vector<DenseMatrix*> parameters();
  std::vector<const DenseMatrix*> parameters() const;

  // Caches intermediate activations for backward(). Throws Error(numeric) on
  // non-finite output.
  std::array<DenseMatrix, 2> forward(const NormalizedAdjacency& adj1, const NormalizedAdjacency& adj2);

  // Pure evaluation without touching the cache.
  DenseMatrix embed(std::size_t side, const NormalizedAdjacency& adj) const;

  // Exact gradients of <grad_output, H2> summed over both graphs.
  // Throws Error(internal) when forward() has not been run.
  ChannelGradients backward(const std::array<DenseMatrix, 2>& grad_output) const;

  void apply_sgd(const ChannelGradients& grads, double learning_rate);

 private:
  struct Cache {
    const SparseMatrix* adj = nullptr;
    DenseMatrix pre1;  // A H0 W1
    DenseMatrix act1;
    DenseMatrix pre2;
  };

  DenseMatrix input_times(std::size_t side, const DenseMatrix& w) const;

  GcnChannelConfig config_;
  DenseMatrix w1_;
  DenseMatrix w2_;
  std::array<Input, 2> inputs_;
  std::array<SparseMatrix, 2> inputs_t_;  // transposes of sparse inputs
  std::array<std::optional<Cache>, 2> cache_;
};

struct CheckpointMeta {
  std::uint64_t seed = 0;
  std::size_t epoch = 0;
};

// Directory with manifest.txt, W1.txt, W2.txt, input_1.txt, input_2.txt.
// Dense tensors use the dense text format, fixed inputs the sparse one.
void save_checkpoint(const std::filesystem::path& dir, const GcnChannel& channel, const CheckpointMeta& meta);
std::pair<GcnChannel, CheckpointMeta> load_checkpoint(const std::filesystem::path& dir);

}  // namespace subgcn

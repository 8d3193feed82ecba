#include "subgcn/gcn.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <string>

#include "subgcn/error.hpp"
#include "subgcn/rng.hpp"
#include "text_util.hpp"

namespace subgcn {

namespace fs = std::filesystem;

const char* to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::structure: return "structure";
    case ChannelKind::attribute: return "attribute";
    case ChannelKind::subgraph: return "subgraph";
  }
  return "structure";
}

ChannelKind channel_kind_from_string(std::string_view s) {
  if (s == "structure") return ChannelKind::structure;
  if (s == "attribute") return ChannelKind::attribute;
  if (s == "subgraph") return ChannelKind::subgraph;
  throw Error(ErrorKind::config, "unknown channel kind '" + std::string(s) + "'");
}

const char* to_string(Activation a) { return a == Activation::relu ? "relu" : "identity"; }

Activation activation_from_string(std::string_view s) {
  if (s == "relu") return Activation::relu;
  if (s == "identity" || s == "linear") return Activation::identity;
  throw Error(ErrorKind::config, "unknown activation '" + std::string(s) + "'");
}

GcnChannelConfig GcnChannelConfig::structure(std::size_t d_s) {
  return {ChannelKind::structure, d_s, d_s, d_s};
}

GcnChannelConfig GcnChannelConfig::attribute(std::size_t vocab_size, std::size_t d_a) {
  return {ChannelKind::attribute, vocab_size, d_a, d_a};
}

GcnChannelConfig GcnChannelConfig::subgraph(std::size_t max_lines, std::size_t d_sgn) {
  return {ChannelKind::subgraph, max_lines, d_sgn, d_sgn};
}

void GcnChannelConfig::validate() const {
  if (input_dim == 0 || hidden_dim == 0 || output_dim == 0)
    throw Error(ErrorKind::config, std::string(to_string(kind)) + " channel dimensions must be positive");
  if (kind == ChannelKind::structure && (input_dim != hidden_dim || hidden_dim != output_dim))
    throw Error(ErrorKind::config, "structure channel requires input_dim == hidden_dim == output_dim");
}

namespace {

DenseMatrix glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0) / std::sqrt(static_cast<double>(fan_in + fan_out));
  DenseMatrix w(fan_in, fan_out);
  for (double& v : w.values()) v = rng.uniform(-bound, bound);
  return w;
}

void apply_activation(DenseMatrix& m, Activation a) {
  if (a == Activation::relu) kernels::relu_inplace(m);
}

}  // namespace

GcnChannel::GcnChannel(GcnChannelConfig config, DenseMatrix w1, DenseMatrix w2, std::array<Input, 2> inputs)
    : config_(config), w1_(std::move(w1)), w2_(std::move(w2)), inputs_(std::move(inputs)) {
  config_.validate();
  if (w1_.rows() != config_.input_dim || w1_.cols() != config_.hidden_dim)
    throw Error(ErrorKind::validation, "W1 shape does not match channel config");
  if (w2_.rows() != config_.hidden_dim || w2_.cols() != config_.output_dim)
    throw Error(ErrorKind::validation, "W2 shape does not match channel config");
  for (std::size_t s = 0; s < 2; ++s) {
    const bool dense = std::holds_alternative<DenseMatrix>(inputs_[s]);
    if (dense != config_.trainable_input())
      throw Error(ErrorKind::validation, "structure inputs must be dense and other inputs sparse");
    const std::size_t cols = dense ? std::get<DenseMatrix>(inputs_[s]).cols() : std::get<SparseMatrix>(inputs_[s]).cols();
    if (cols != config_.input_dim)
      throw Error(ErrorKind::validation, "input feature width " + std::to_string(cols) + " != input_dim " +
                                             std::to_string(config_.input_dim));
    if (!dense) inputs_t_[s] = std::get<SparseMatrix>(inputs_[s]).transpose();
  }
}

GcnChannel GcnChannel::init_structure(const GcnChannelConfig& config, std::size_t n1, std::size_t n2,
                                      std::uint64_t seed) {
  config.validate();
  if (config.kind != ChannelKind::structure) throw Error(ErrorKind::config, "init_structure needs a structure config");
  Rng rng(seed);
  DenseMatrix w1 = glorot(config.input_dim, config.hidden_dim, rng);
  DenseMatrix w2 = glorot(config.hidden_dim, config.output_dim, rng);
  const double bound = 1.0 / std::sqrt(static_cast<double>(config.input_dim));
  std::array<Input, 2> inputs;
  std::size_t sizes[2] = {n1, n2};
  for (std::size_t s = 0; s < 2; ++s) {
    DenseMatrix h(sizes[s], config.input_dim);
    for (double& v : h.values()) v = rng.uniform(-bound, bound);
    inputs[s] = std::move(h);
  }
  return GcnChannel(config, std::move(w1), std::move(w2), std::move(inputs));
}

GcnChannel GcnChannel::init_fixed(const GcnChannelConfig& config, const SparseMatrix& features1,
                                  const SparseMatrix& features2, std::uint64_t seed) {
  config.validate();
  if (config.trainable_input()) throw Error(ErrorKind::config, "init_fixed needs an attribute or subgraph config");
  if (features1.cols() > config.input_dim || features2.cols() > config.input_dim)
    throw Error(ErrorKind::validation, "feature column count exceeds configured input_dim " +
                                           std::to_string(config.input_dim));
  Rng rng(seed);
  DenseMatrix w1 = glorot(config.input_dim, config.hidden_dim, rng);
  DenseMatrix w2 = glorot(config.hidden_dim, config.output_dim, rng);
  return GcnChannel(config, std::move(w1), std::move(w2),
                    {features1.with_cols(config.input_dim), features2.with_cols(config.input_dim)});
}

std::size_t GcnChannel::num_entities(std::size_t side) const {
  return std::visit([](const auto& m) { return m.rows(); }, inputs_[side]);
}

std::vector<DenseMatrix*> GcnChannel::parameters() {
  std::vector<DenseMatrix*> out{&w1_, &w2_};
  if (config_.trainable_input())
    for (auto& in : inputs_) out.push_back(&std::get<DenseMatrix>(in));
  return out;
}

std::vector<const DenseMatrix*> GcnChannel::parameters() const {
  std::vector<const DenseMatrix*> out{&w1_, &w2_};
  if (config_.trainable_input())
    for (const auto& in : inputs_) out.push_back(&std::get<DenseMatrix>(in));
  return out;
}

DenseMatrix GcnChannel::input_times(std::size_t side, const DenseMatrix& w) const {
  if (const auto* dense = std::get_if<DenseMatrix>(&inputs_[side])) return kernels::matmul(*dense, w);
  return kernels::spmm(std::get<SparseMatrix>(inputs_[side]), w);
}

DenseMatrix GcnChannel::embed(std::size_t side, const NormalizedAdjacency& adj) const {
  const SparseMatrix& a = adj.matrix();
  if (a.rows() != num_entities(side))
    throw Error(ErrorKind::validation, "adjacency size " + std::to_string(a.rows()) + " != entity count " +
                                           std::to_string(num_entities(side)));
  DenseMatrix h = kernels::spmm(a, input_times(side, w1_));
  apply_activation(h, config_.hidden_activation);
  DenseMatrix out = kernels::spmm(a, kernels::matmul(h, w2_));
  apply_activation(out, config_.output_activation);
  return out;
}

std::array<DenseMatrix, 2> GcnChannel::forward(const NormalizedAdjacency& adj1, const NormalizedAdjacency& adj2) {
  std::array<DenseMatrix, 2> out;
  const NormalizedAdjacency* adjs[2] = {&adj1, &adj2};
  for (std::size_t s = 0; s < 2; ++s) {
    const SparseMatrix& a = adjs[s]->matrix();
    if (a.rows() != num_entities(s))
      throw Error(ErrorKind::validation, "adjacency size " + std::to_string(a.rows()) + " != entity count " +
                                             std::to_string(num_entities(s)));
    Cache c;
    c.adj = &a;
    c.pre1 = kernels::spmm(a, input_times(s, w1_));
    // Checked before the activation: ReLU would turn -inf and NaN into 0.
    if (!c.pre1.all_finite())
      throw Error(ErrorKind::numeric, std::string(to_string(config_.kind)) + " channel: non-finite hidden layer");
    c.act1 = c.pre1;
    apply_activation(c.act1, config_.hidden_activation);
    c.pre2 = kernels::spmm(a, kernels::matmul(c.act1, w2_));
    if (!c.pre2.all_finite())
      throw Error(ErrorKind::numeric, std::string(to_string(config_.kind)) + " channel produced non-finite embeddings");
    out[s] = c.pre2;
    apply_activation(out[s], config_.output_activation);
    cache_[s] = std::move(c);
  }
  return out;
}

ChannelGradients GcnChannel::backward(const std::array<DenseMatrix, 2>& grad_output) const {
  ChannelGradients g;
  g.w1 = DenseMatrix(w1_.rows(), w1_.cols());
  g.w2 = DenseMatrix(w2_.rows(), w2_.cols());
  for (std::size_t s = 0; s < 2; ++s) {
    if (!cache_[s]) throw Error(ErrorKind::internal, "backward called without a forward cache");
    const Cache& c = *cache_[s];
    if (grad_output[s].rows() != c.pre2.rows() || grad_output[s].cols() != c.pre2.cols())
      throw Error(ErrorKind::validation, "output gradient shape mismatch");

    // The normalized adjacency is symmetric, so A^T G = A G.
    DenseMatrix d2 = grad_output[s];
    if (config_.output_activation == Activation::relu) kernels::relu_backward_inplace(d2, c.pre2);
    DenseMatrix m2 = kernels::spmm(*c.adj, d2);
    kernels::add_inplace(g.w2, kernels::matmul_tn(c.act1, m2));

    DenseMatrix d1 = kernels::matmul_nt(m2, w2_);
    if (config_.hidden_activation == Activation::relu) kernels::relu_backward_inplace(d1, c.pre1);
    DenseMatrix m1 = kernels::spmm(*c.adj, d1);

    if (const auto* dense = std::get_if<DenseMatrix>(&inputs_[s])) {
      kernels::add_inplace(g.w1, kernels::matmul_tn(*dense, m1));
      g.inputs[s] = kernels::matmul_nt(m1, w1_);
    } else {
      kernels::add_inplace(g.w1, kernels::spmm(inputs_t_[s], m1));
    }
  }
  return g;
}

void GcnChannel::apply_sgd(const ChannelGradients& grads, double learning_rate) {
  kernels::sgd_step(w1_, grads.w1, learning_rate);
  kernels::sgd_step(w2_, grads.w2, learning_rate);
  if (config_.trainable_input()) {
    for (std::size_t s = 0; s < 2; ++s) kernels::sgd_step(std::get<DenseMatrix>(inputs_[s]), grads.inputs[s], learning_rate);
  }
  // Parameters changed; cached activations are stale.
  cache_[0].reset();
  cache_[1].reset();
}

// ---------------------------------------------------------------------------
// Checkpoints

void save_checkpoint(const fs::path& dir, const GcnChannel& channel, const CheckpointMeta& meta) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create " + dir.string() + ": " + ec.message());
  const auto& cfg = channel.config();
  {
    auto out = detail::open_output((dir / "manifest.txt").string());
    out << "kind=" << to_string(cfg.kind) << '\n'
        << "input_dim=" << cfg.input_dim << '\n'
        << "hidden_dim=" << cfg.hidden_dim << '\n'
        << "output_dim=" << cfg.output_dim << '\n'
        << "hidden_activation=" << to_string(cfg.hidden_activation) << '\n'
        << "output_activation=" << to_string(cfg.output_activation) << '\n'
        << "seed=" << meta.seed << '\n'
        << "epoch=" << meta.epoch << '\n';
    if (!out) throw Error(ErrorKind::io, "write failed: " + (dir / "manifest.txt").string());
  }
  save_dense(dir / "W1.txt", channel.w1());
  save_dense(dir / "W2.txt", channel.w2());
  for (std::size_t s = 0; s < 2; ++s) {
    const fs::path p = dir / ("input_" + std::to_string(s + 1) + ".txt");
    std::visit(
        [&](const auto& m) {
          if constexpr (std::is_same_v<std::decay_t<decltype(m)>, DenseMatrix>)
            save_dense(p, m);
          else
            save_sparse(p, m);
        },
        channel.input(s));
  }
}

std::pair<GcnChannel, CheckpointMeta> load_checkpoint(const fs::path& dir) {
  std::map<std::string, std::string> kv;
  {
    auto in = detail::open_input((dir / "manifest.txt").string());
    std::string line;
    while (std::getline(in, line)) {
      auto t = detail::trim(line);
      if (t.empty()) continue;
      auto eq = t.find('=');
      if (eq == std::string_view::npos) throw Error(ErrorKind::parse, "bad checkpoint manifest line: " + line);
      kv[std::string(t.substr(0, eq))] = std::string(t.substr(eq + 1));
    }
  }
  auto get = [&](const char* key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw Error(ErrorKind::parse, std::string("checkpoint manifest lacks '") + key + "'");
    return it->second;
  };
  auto get_size = [&](const char* key) {
    auto v = detail::parse_int<std::uint64_t>(get(key));
    if (!v) throw Error(ErrorKind::parse, std::string("checkpoint manifest: bad integer for ") + key);
    return *v;
  };

  GcnChannelConfig cfg;
  cfg.kind = channel_kind_from_string(get("kind"));
  cfg.input_dim = get_size("input_dim");
  cfg.hidden_dim = get_size("hidden_dim");
  cfg.output_dim = get_size("output_dim");
  cfg.hidden_activation = activation_from_string(get("hidden_activation"));
  cfg.output_activation = activation_from_string(get("output_activation"));
  CheckpointMeta meta{get_size("seed"), get_size("epoch")};

  std::array<GcnChannel::Input, 2> inputs;
  for (std::size_t s = 0; s < 2; ++s) {
    const fs::path p = dir / ("input_" + std::to_string(s + 1) + ".txt");
    if (cfg.trainable_input())
      inputs[s] = load_dense(p);
    else
      inputs[s] = load_sparse(p);
  }
  GcnChannel ch(cfg, load_dense(dir / "W1.txt"), load_dense(dir / "W2.txt"), std::move(inputs));
  return {std::move(ch), meta};
}

}  // namespace subgcn

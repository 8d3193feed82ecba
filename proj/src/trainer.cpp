#include "subgcn/trainer.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <string>

#include "subgcn/error.hpp"

namespace subgcn {

double TrainingConfig::margin(ChannelKind kind) const {
  switch (kind) {
    case ChannelKind::structure: return margin_structure;
    case ChannelKind::attribute: return margin_attribute;
    case ChannelKind::subgraph: return margin_subgraph;
  }
  return margin_structure;
}

void TrainingConfig::validate() const {
  if (!(margin_structure > 0.0 && margin_attribute > 0.0 && margin_subgraph > 0.0))
    throw Error(ErrorKind::config, "margins must be positive");
  if (negatives_per_side == 0) throw Error(ErrorKind::config, "negatives_per_side must be >= 1");
  if (epochs == 0) throw Error(ErrorKind::config, "epochs must be >= 1");
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
    throw Error(ErrorKind::config, "learning_rate must be finite and >= 0");
  if (resample_every == 0) throw Error(ErrorKind::config, "resample_every must be >= 1");
}

NegativeBatch sample_negatives(std::span<const SeedPair> positives, std::size_t n1, std::size_t n2, std::size_t k,
                               Rng& rng) {
  if (k == 0) throw Error(ErrorKind::config, "need at least one negative per side");
  if (n1 < 2 || n2 < 2) throw Error(ErrorKind::validation, "cannot corrupt a seed pair in a graph with one entity");
  NegativeBatch batch;
  batch.positives.assign(positives.begin(), positives.end());
  batch.k = k;
  batch.left.reserve(positives.size() * k);
  batch.right.reserve(positives.size() * k);
  auto draw = [&rng](std::size_t n, Index avoid) {
    Index x;
    do {
      x = static_cast<Index>(rng.below(n));
    } while (x == avoid);
    return x;
  };
  for (const auto& p : positives) {
    if (p.left >= n1 || p.right >= n2) throw Error(ErrorKind::validation, "seed pair references an unknown entity");
    for (std::size_t j = 0; j < k; ++j) batch.left.push_back(draw(n1, p.left));
    for (std::size_t j = 0; j < k; ++j) batch.right.push_back(draw(n2, p.right));
  }
  return batch;
}

namespace {

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// Adds s * sign(a - b) to ga and subtracts it from gb.
void push_l1_grad(std::span<const double> a, std::span<const double> b, std::span<double> ga, std::span<double> gb,
                  double s) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double g = s * sign(a[i] - b[i]);
    ga[i] += g;
    gb[i] -= g;
  }
}

}  // namespace

MarginLossResult margin_loss(const NegativeBatch& batch, const DenseMatrix& emb1, const DenseMatrix& emb2,
                             double margin) {
  if (emb1.cols() != emb2.cols()) throw Error(ErrorKind::validation, "embedding widths differ between graphs");
  if (!emb1.all_finite() || !emb2.all_finite()) throw Error(ErrorKind::numeric, "non-finite embedding input to loss");

  MarginLossResult res;
  res.grad[0] = DenseMatrix(emb1.rows(), emb1.cols());
  res.grad[1] = DenseMatrix(emb2.rows(), emb2.cols());
  DenseMatrix& g1 = res.grad[0];
  DenseMatrix& g2 = res.grad[1];

  const std::size_t k = batch.k;
  for (std::size_t i = 0; i < batch.positives.size(); ++i) {
    const auto [e, v] = batch.positives[i];
    if (e >= emb1.rows() || v >= emb2.rows()) throw Error(ErrorKind::validation, "seed entity has no embedding row");
    const double pos = l1_distance(emb1.row(e), emb2.row(v));
    for (std::size_t side = 0; side < 2; ++side) {
      for (std::size_t j = 0; j < k; ++j) {
        const Index ne = side == 0 ? batch.left[i * k + j] : e;
        const Index nv = side == 0 ? v : batch.right[i * k + j];
        const double neg = l1_distance(emb1.row(ne), emb2.row(nv));
        const double term = pos + margin - neg;
        if (!(term > 0.0)) continue;
        res.loss += term;
        ++res.active_terms;
        push_l1_grad(emb1.row(e), emb2.row(v), g1.row(e), g2.row(v), 1.0);
        push_l1_grad(emb1.row(ne), emb2.row(nv), g1.row(ne), g2.row(nv), -1.0);
      }
    }
  }
  return res;
}

ChannelReport train_channel(GcnChannel& channel, const NormalizedAdjacency& adj1, const NormalizedAdjacency& adj2,
                            std::span<const SeedPair> train_pairs, const TrainingConfig& config,
                            std::uint64_t channel_seed) {
  config.validate();
  if (train_pairs.empty()) throw Error(ErrorKind::validation, "no training seeds");
  const auto start = std::chrono::steady_clock::now();
  const ChannelKind kind = channel.config().kind;
  const double margin = config.margin(kind);
  Rng rng(derive_seed(config.rng_seed, std::string(to_string(kind)) + "/negatives"));

  ChannelReport report;
  report.kind = kind;
  report.loss_trace.reserve(config.epochs);
  NegativeBatch batch;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (epoch % config.resample_every == 0)
      batch = sample_negatives(train_pairs, channel.num_entities(0), channel.num_entities(1),
                               config.negatives_per_side, rng);
    auto out = channel.forward(adj1, adj2);
    auto loss = margin_loss(batch, out[0], out[1], margin);
    if (!std::isfinite(loss.loss)) {
      std::ostringstream msg;
      msg << to_string(kind) << " channel: non-finite loss at epoch " << epoch << " (|W1|=" << channel.w1().frobenius_norm()
          << ", |W2|=" << channel.w2().frobenius_norm() << ")";
      throw Error(ErrorKind::numeric, msg.str());
    }
    report.loss_trace.push_back(loss.loss);
    // The step follows the per-term mean, so one learning rate works for any
    // seed count and k.
    const double step = config.learning_rate / static_cast<double>(batch.num_corrupted());
    channel.apply_sgd(channel.backward(loss.grad), step);

    if (config.checkpoint_every != 0 && !config.checkpoint_dir.empty() && (epoch + 1) % config.checkpoint_every == 0)
      save_checkpoint(config.checkpoint_dir / to_string(kind), channel, {channel_seed, epoch + 1});
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace subgcn

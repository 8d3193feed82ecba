#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the kernels it is used to check.

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "subgcn/aligner.hpp"
#include "subgcn/kg.hpp"
#include "subgcn/matrix.hpp"
#include "subgcn/rng.hpp"
#include "subgcn/trainer.hpp"

namespace oracle {

using subgcn::DenseMatrix;
using subgcn::Index;

// Random graph on n nodes: each unordered pair becomes a triple with
// probability p, with random direction and relation.
inline subgcn::KnowledgeGraph random_graph(std::size_t n, double p, subgcn::Rng& rng, std::size_t n_rel = 3) {
  std::vector<std::string> ents(n), rels(n_rel);
  for (std::size_t i = 0; i < n; ++i) ents[i] = "e" + std::to_string(i);
  for (std::size_t i = 0; i < n_rel; ++i) rels[i] = "r" + std::to_string(i);
  std::vector<subgcn::RelationTriple> triples;
  for (Index u = 0; u < n; ++u)
    for (Index v = u + 1; v < n; ++v)
      if (rng.unit() < p) {
        auto r = static_cast<Index>(rng.below(n_rel));
        if (rng.below(2)) triples.push_back({u, r, v});
        else triples.push_back({v, r, u});
        // occasional parallel edge under another relation
        if (rng.unit() < 0.2) triples.push_back({v, static_cast<Index>(rng.below(n_rel)), u});
      }
  return subgcn::KnowledgeGraph(ents, rels, {}, triples, {});
}

// All pairs of distinct lines that share an endpoint, by direct comparison.
inline std::set<std::pair<std::size_t, std::size_t>> brute_force_line_graph(
    const std::vector<std::pair<Index, Index>>& lines) {
  std::set<std::pair<std::size_t, std::size_t>> links;
  for (std::size_t i = 0; i < lines.size(); ++i)
    for (std::size_t j = i + 1; j < lines.size(); ++j) {
      const auto [a, b] = lines[i];
      const auto [c, d] = lines[j];
      if (a == c || a == d || b == c || b == d) links.emplace(i, j);
    }
  return links;
}

// Textbook i-j-k product.
inline DenseMatrix naive_matmul(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

inline DenseMatrix random_dense(std::size_t r, std::size_t c, subgcn::Rng& rng, double lo = -1.0, double hi = 1.0) {
  DenseMatrix m(r, c);
  for (double& v : m.values()) v = rng.uniform(lo, hi);
  return m;
}

inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a.values()[i] - b.values()[i]));
  return m;
}

// Dense two-layer GCN evaluated with plain loops.
inline DenseMatrix dense_gcn(const DenseMatrix& adj, const DenseMatrix& h0, const DenseMatrix& w1,
                             const DenseMatrix& w2, bool relu_out) {
  auto relu = [](DenseMatrix m) {
    for (double& v : m.values()) v = std::max(v, 0.0);
    return m;
  };
  DenseMatrix h1 = relu(naive_matmul(adj, naive_matmul(h0, w1)));
  DenseMatrix h2 = naive_matmul(adj, naive_matmul(h1, w2));
  return relu_out ? relu(h2) : h2;
}

// Margin loss by explicit enumeration of every (positive, corrupted) pair.
inline double enumerate_margin_loss(const subgcn::NegativeBatch& batch, const DenseMatrix& e1, const DenseMatrix& e2,
                                    double margin) {
  auto l1 = [&](Index a, Index b) {
    double s = 0.0;
    for (std::size_t c = 0; c < e1.cols(); ++c) s += std::fabs(e1(a, c) - e2(b, c));
    return s;
  };
  std::vector<std::pair<std::pair<Index, Index>, std::pair<Index, Index>>> terms;
  for (std::size_t i = 0; i < batch.positives.size(); ++i) {
    const auto p = batch.positives[i];
    for (std::size_t j = 0; j < batch.k; ++j) terms.push_back({{p.left, p.right}, {batch.left[i * batch.k + j], p.right}});
    for (std::size_t j = 0; j < batch.k; ++j) terms.push_back({{p.left, p.right}, {p.left, batch.right[i * batch.k + j]}});
  }
  double loss = 0.0;
  for (const auto& [pos, neg] : terms) loss += std::max(0.0, l1(pos.first, pos.second) + margin - l1(neg.first, neg.second));
  return loss;
}

// Central difference of f with respect to every entry of `param`.
inline DenseMatrix finite_difference(DenseMatrix& param, const std::function<double()>& f, double step = 1e-5) {
  DenseMatrix g(param.rows(), param.cols());
  for (std::size_t i = 0; i < param.size(); ++i) {
    double& x = param.values()[i];
    const double saved = x;
    x = saved + step;
    const double up = f();
    x = saved - step;
    const double down = f();
    x = saved;
    g.values()[i] = (up - down) / (2.0 * step);
  }
  return g;
}

// Below `floor` the comparison is effectively absolute: a central difference
// of an O(10) objective carries ~1e-9 of rounding noise, which would swamp a
// relative test on entries whose true gradient is zero.
inline double max_relative_error(const DenseMatrix& analytic, const DenseMatrix& numeric, double floor = 1e-3) {
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double a = analytic.values()[i], n = numeric.values()[i];
    worst = std::max(worst, std::fabs(a - n) / std::max({std::fabs(a), std::fabs(n), floor}));
  }
  return worst;
}

// Exhaustive distance table and sort for one source entity.
inline std::vector<Index> exhaustive_ranking(const std::vector<std::vector<double>>& src_channels,
                                             const std::vector<std::vector<std::vector<double>>>& tgt_channels,
                                             const std::vector<double>& weights) {
  const std::size_t n = tgt_channels[0].size();
  std::vector<std::pair<double, Index>> table;
  for (std::size_t j = 0; j < n; ++j) {
    double d = 0.0;
    for (std::size_t c = 0; c < weights.size(); ++c) {
      if (weights[c] == 0.0) continue;
      double l1 = 0.0;
      for (std::size_t x = 0; x < src_channels[c].size(); ++x) l1 += std::fabs(src_channels[c][x] - tgt_channels[c][j][x]);
      d += weights[c] / static_cast<double>(src_channels[c].size()) * l1;
    }
    table.emplace_back(d, static_cast<Index>(j));
  }
  std::sort(table.begin(), table.end());
  std::vector<Index> order;
  for (auto& [d, j] : table) order.push_back(j);
  return order;
}

inline std::vector<double> row_vec(const DenseMatrix& m, std::size_t r) {
  return {m.row(r).begin(), m.row(r).end()};
}

}  // namespace oracle

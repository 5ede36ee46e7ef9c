#pragma once

// Symmetric InfoNCE over a batch of (query, target) pairs with optional
// mined hard negatives, and its analytic gradient through the linear
// embedder and the L2 normalization.
//
// Forward direction for pair i: the positive target is contrasted against
// every other in-batch target plus pair i's mined negatives. The backward
// direction contrasts the target against in-batch queries only; mined
// negatives are targets and have no query-side counterpart. Losses are
// computed in log-sum-exp form.

#include <cmath>
#include <vector>

#include "uvre/embedder.hpp"
#include "uvre/errors.hpp"
#include "uvre/schedule.hpp"

namespace uvre {

using DVec = std::vector<double>;

inline double ddot(const DVec& a, const DVec& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double log_sum_exp(const std::vector<double>& logits) {
  double m = logits[0];
  for (double v : logits) m = std::max(m, v);
  double s = 0.0;
  for (double v : logits) s += std::exp(v - m);
  return m + std::log(s);
}

// One direction of the loss for a single query: candidates are the in-batch
// positives (self included at `self_index`) plus this query's hard
// negatives. Zero when there is nothing to contrast against.
inline double infonce_direction(const DVec& query, const std::vector<DVec>& positives,
                                size_t self_index, const std::vector<DVec>& negatives, double tau) {
  if (positives.empty()) throw ConfigError("infonce: empty batch");
  if (self_index >= positives.size()) throw ConfigError("infonce: bad self index");
  if (!(tau > 0.0)) throw ConfigError("infonce: temperature must be positive");
  std::vector<double> logits;
  logits.reserve(positives.size() + negatives.size());
  for (const DVec& p : positives) logits.push_back(ddot(query, p) / tau);
  for (const DVec& n : negatives) logits.push_back(ddot(query, n) / tau);
  return log_sum_exp(logits) - logits[self_index];
}

// Mean over the batch of 0.5 * (forward + backward).
inline double symmetric_loss(const std::vector<DVec>& queries, const std::vector<DVec>& targets,
                             const std::vector<std::vector<DVec>>& negatives, double tau) {
  if (queries.size() != targets.size() || queries.empty()) {
    throw ConfigError("symmetric_loss: malformed batch");
  }
  const size_t b = queries.size();
  double total = 0.0;
  static const std::vector<DVec> no_negs;
  for (size_t i = 0; i < b; ++i) {
    const std::vector<DVec>& negs_i = negatives.empty() ? no_negs : negatives[i];
    total += 0.5 * (infonce_direction(queries[i], targets, i, negs_i, tau) +
                    infonce_direction(targets[i], queries, i, no_negs, tau));
  }
  return total / static_cast<double>(b);
}

// ---------------------------------------------------------------------------
// Analytic gradient
// ---------------------------------------------------------------------------

struct TrainBatch {
  std::vector<EmbeddingVector> queries;   // raw inputs, d_in
  std::vector<EmbeddingVector> targets;   // raw inputs, d_in
  std::vector<std::vector<EmbeddingVector>> negatives;  // raw, per pair (may be empty)
};

struct BatchGradient {
  double loss = 0.0;
  std::vector<double> grad;       // d_out x d_in, row-major (same layout as W)
  double mean_positive_score = 0.0;
  double mean_margin = 0.0;  // positive score minus best competing forward score
};

namespace detail {

struct Embedded {
  DVec z;       // pre-normalization projection
  DVec e;       // unit embedding
  double norm;  // |z|
  const EmbeddingVector* input;
};

inline Embedded embed_tracked(const ToyEmbedder& model, const EmbeddingVector& x) {
  Embedded out;
  out.input = &x;
  out.z = model.project(x);
  double n = 0.0;
  for (double v : out.z) n += v * v;
  out.norm = std::sqrt(n);
  if (out.norm < kZeroNormThreshold) throw ZeroVectorError("gradient: zero projection");
  out.e.resize(out.z.size());
  for (size_t i = 0; i < out.z.size(); ++i) out.e[i] = out.z[i] / out.norm;
  return out;
}

// d loss / d z = (g_e - (g_e . e) e) / |z| ; dW += g_z x^T
inline void backprop_normalization(const Embedded& item, const DVec& g_e, size_t d_in,
                                   std::vector<double>& grad_w) {
  const size_t d_out = item.e.size();
  const double ge_dot_e = ddot(g_e, item.e);
  for (size_t r = 0; r < d_out; ++r) {
    const double gz = (g_e[r] - ge_dot_e * item.e[r]) / item.norm;
    if (gz == 0.0) continue;
    double* row = grad_w.data() + r * d_in;
    const EmbeddingVector& x = *item.input;
    for (size_t c = 0; c < d_in; ++c) row[c] += gz * static_cast<double>(x[c]);
  }
}

}  // namespace detail

// Loss, analytic dL/dW, and the logged batch statistics in one pass.
inline BatchGradient gradient(const TrainBatch& batch, const ToyEmbedder& model, double tau) {
  const size_t b = batch.queries.size();
  if (b == 0 || batch.targets.size() != b) throw ConfigError("gradient: malformed batch");
  if (!batch.negatives.empty() && batch.negatives.size() != b) {
    throw ConfigError("gradient: negatives shape mismatch");
  }
  if (!(tau > 0.0)) throw ConfigError("gradient: temperature must be positive");

  std::vector<detail::Embedded> q(b), p(b);
  std::vector<std::vector<detail::Embedded>> negs(b);
  for (size_t i = 0; i < b; ++i) {
    q[i] = detail::embed_tracked(model, batch.queries[i]);
    p[i] = detail::embed_tracked(model, batch.targets[i]);
    if (!batch.negatives.empty()) {
      for (const EmbeddingVector& n : batch.negatives[i]) {
        negs[i].push_back(detail::embed_tracked(model, n));
      }
    }
  }

  // similarity matrices
  std::vector<double> s_qp(b * b);  // q_i . p_j
  for (size_t i = 0; i < b; ++i) {
    for (size_t j = 0; j < b; ++j) s_qp[i * b + j] = ddot(q[i].e, p[j].e);
  }
  std::vector<std::vector<double>> s_qn(b);
  for (size_t i = 0; i < b; ++i) {
    for (const auto& n : negs[i]) s_qn[i].push_back(ddot(q[i].e, n.e));
  }

  const double inv_w = 1.0 / (2.0 * static_cast<double>(b) * tau);
  std::vector<DVec> g_q(b, DVec(model.d_out(), 0.0));
  std::vector<DVec> g_p(b, DVec(model.d_out(), 0.0));
  std::vector<std::vector<DVec>> g_n(b);
  for (size_t i = 0; i < b; ++i) g_n[i].assign(negs[i].size(), DVec(model.d_out(), 0.0));

  double loss = 0.0;
  double mean_pos = 0.0;
  double mean_margin = 0.0;

  for (size_t i = 0; i < b; ++i) {
    // forward direction: candidates = batch targets + own negatives
    std::vector<double> logits;
    logits.reserve(b + negs[i].size());
    for (size_t j = 0; j < b; ++j) logits.push_back(s_qp[i * b + j] / tau);
    for (double s : s_qn[i]) logits.push_back(s / tau);
    const double lse_f = log_sum_exp(logits);
    loss += 0.5 * (lse_f - logits[i]);

    double best_other = -2.0;
    for (size_t j = 0; j < b; ++j) {
      if (j != i) best_other = std::max(best_other, s_qp[i * b + j]);
    }
    for (double s : s_qn[i]) best_other = std::max(best_other, s);
    mean_pos += s_qp[i * b + i];
    mean_margin += (b + negs[i].size() > 1) ? (s_qp[i * b + i] - best_other) : 0.0;

    for (size_t c = 0; c < logits.size(); ++c) {
      const double soft = std::exp(logits[c] - lse_f);
      const double coeff = inv_w * (soft - (c == i ? 1.0 : 0.0));
      if (coeff == 0.0) continue;
      if (c < b) {
        for (size_t r = 0; r < model.d_out(); ++r) {
          g_q[i][r] += coeff * p[c].e[r];
          g_p[c][r] += coeff * q[i].e[r];
        }
      } else {
        const size_t k = c - b;
        for (size_t r = 0; r < model.d_out(); ++r) {
          g_q[i][r] += coeff * negs[i][k].e[r];
          g_n[i][k][r] += coeff * q[i].e[r];
        }
      }
    }

    // backward direction: p_i against in-batch queries
    std::vector<double> logits_b(b);
    for (size_t j = 0; j < b; ++j) logits_b[j] = s_qp[j * b + i] / tau;
    const double lse_b = log_sum_exp(logits_b);
    loss += 0.5 * (lse_b - logits_b[i]);
    for (size_t j = 0; j < b; ++j) {
      const double soft = std::exp(logits_b[j] - lse_b);
      const double coeff = inv_w * (soft - (j == i ? 1.0 : 0.0));
      if (coeff == 0.0) continue;
      for (size_t r = 0; r < model.d_out(); ++r) {
        g_p[i][r] += coeff * q[j].e[r];
        g_q[j][r] += coeff * p[i].e[r];
      }
    }
  }

  BatchGradient out;
  out.loss = loss / static_cast<double>(b);
  out.mean_positive_score = mean_pos / static_cast<double>(b);
  out.mean_margin = mean_margin / static_cast<double>(b);
  out.grad.assign(model.d_out() * model.d_in(), 0.0);
  for (size_t i = 0; i < b; ++i) {
    detail::backprop_normalization(q[i], g_q[i], model.d_in(), out.grad);
    detail::backprop_normalization(p[i], g_p[i], model.d_in(), out.grad);
    for (size_t k = 0; k < negs[i].size(); ++k) {
      detail::backprop_normalization(negs[i][k], g_n[i][k], model.d_in(), out.grad);
    }
  }
  return out;
}

}  // namespace uvre

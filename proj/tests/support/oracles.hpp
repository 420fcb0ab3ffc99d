#pragma once

// Independent reference implementations used only to cross-check the
// library. Everything here is written directly from the defining equations
// with plain loops, on purpose sharing no code with src/.

#include <cmath>
#include <random>
#include <vector>

#include "seglm/lattice.hpp"
#include "seglm/slm.hpp"

namespace seglm::testing {

/// Plain-loop LSTM cell, gate order [i f g o].
inline HiddenState reference_lstm_step(const LstmParams& p,
                                       const HiddenState& state,
                                       const Eigen::VectorXd& x) {
  const int hidden = static_cast<int>(state.h.size());
  const int input = static_cast<int>(x.size());
  HiddenState next;
  next.h.resize(hidden);
  next.c.resize(hidden);
  std::vector<double> pre(4 * hidden, 0.0);
  for (int r = 0; r < 4 * hidden; ++r) {
    double acc = p.bias[r];
    for (int e = 0; e < input; ++e) acc += p.w_input(r, e) * x[e];
    for (int h = 0; h < hidden; ++h) acc += p.w_recur(r, h) * state.h[h];
    pre[r] = acc;
  }
  for (int j = 0; j < hidden; ++j) {
    const double gi = 1.0 / (1.0 + std::exp(-pre[j]));
    const double gf = 1.0 / (1.0 + std::exp(-pre[hidden + j]));
    const double gg = std::tanh(pre[2 * hidden + j]);
    const double go = 1.0 / (1.0 + std::exp(-pre[3 * hidden + j]));
    next.c[j] = gf * state.c[j] + gi * gg;
    next.h[j] = go * std::tanh(next.c[j]);
  }
  return next;
}

/// Log-softmax entry computed with plain loops.
inline double reference_log_softmax_at(const OutputParams& out,
                                       const Eigen::VectorXd& h, int index) {
  const int vocab = static_cast<int>(out.bias.size());
  std::vector<double> logits(vocab);
  for (int v = 0; v < vocab; ++v) {
    double acc = out.bias[v];
    for (int j = 0; j < h.size(); ++j) acc += out.weight(v, j) * h[j];
    logits[v] = acc;
  }
  double hi = logits[0];
  for (double l : logits) hi = std::max(hi, l);
  double sum = 0.0;
  for (double l : logits) sum += std::exp(l - hi);
  return logits[index] - (hi + std::log(sum));
}

/// Scores one segment from scratch: context encoded step by step, then the
/// language model over exactly this segment. O(n + len) work per call, no
/// sharing with other segments.
inline double naive_segment_score(const ModelParams& p,
                                  const std::vector<std::int32_t>& ids,
                                  Direction dir, int start, int len) {
  const LstmParams& ctx_params = p.ctx(dir);
  const LstmParams& lm_params = p.lm(dir);
  const OutputParams& out = p.output(dir);
  HiddenState ctx = HiddenState::zero(p.hidden_dim);
  for (int t = 0; t < start; ++t)
    ctx = reference_lstm_step(ctx_params, ctx, p.embedding.col(ids[t]));
  if (p.lm_zero_cell) ctx.c.setZero();
  HiddenState lm =
      reference_lstm_step(lm_params, ctx, p.embedding.col(p.eos_id));
  double score = 0.0;
  for (int i = 0; i < len; ++i) {
    score += reference_log_softmax_at(out, lm.h, ids[start + i]);
    lm = reference_lstm_step(lm_params, lm, p.embedding.col(ids[start + i]));
  }
  return score + reference_log_softmax_at(out, lm.h, p.eos_id);
}

inline SegmentScoreTable random_table(int n, int t_max, std::mt19937_64& rng,
                                      double lo = -3.0, double hi = -0.1) {
  std::uniform_real_distribution<double> dist(lo, hi);
  SegmentScoreTable table(n, t_max);
  for (int start = 0; start < n; ++start)
    for (int len = 1; len <= table.max_len_at(start); ++len)
      table.at(start, len) = dist(rng);
  return table;
}

inline SegmentScoreTable zero_table(int n, int t_max) {
  SegmentScoreTable table(n, t_max);
  for (int start = 0; start < n; ++start)
    for (int len = 1; len <= table.max_len_at(start); ++len)
      table.at(start, len) = 0.0;
  return table;
}

/// CharSequence over a small integer alphabet (test fixture helper).
inline CharSequence make_sequence(const std::vector<std::int32_t>& ids) {
  CharSequence seq;
  for (std::int32_t id : ids) {
    seq.ids.push_back(id);
    seq.syms.push_back(static_cast<Codepoint>(U'a' + id));
    seq.raw.push_back(std::string(1, static_cast<char>('a' + id)));
  }
  return seq;
}

inline CharSequence random_sequence(int n, int vocab_chars,
                                    std::mt19937_64& rng) {
  std::uniform_int_distribution<std::int32_t> dist(0, vocab_chars - 1);
  std::vector<std::int32_t> ids(n);
  for (auto& id : ids) id = dist(rng);
  return make_sequence(ids);
}

}  // namespace seglm::testing

#include "seglm/slm.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace seglm {

namespace {

void uniform_fill(Eigen::Ref<Eigen::MatrixXd> m, std::mt19937_64& rng,
                  double half_range) {
  std::uniform_real_distribution<double> dist(-half_range, half_range);
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = dist(rng);
}

LstmParams zero_lstm(int embed_dim, int hidden_dim) {
  return {Eigen::MatrixXd::Zero(4 * hidden_dim, embed_dim),
          Eigen::MatrixXd::Zero(4 * hidden_dim, hidden_dim),
          Eigen::VectorXd::Zero(4 * hidden_dim)};
}

}  // namespace

ModelParams ModelParams::init(int vocab_size, int embed_dim, int hidden_dim,
                              std::int32_t eos_id, std::uint64_t seed,
                              bool shared_output, bool lm_zero_cell) {
  if (eos_id < 0 || eos_id >= vocab_size)
    throw std::invalid_argument("eos id out of range");
  ModelParams p;
  p.vocab_size = vocab_size;
  p.embed_dim = embed_dim;
  p.hidden_dim = hidden_dim;
  p.eos_id = eos_id;
  p.shared_output = shared_output;
  p.lm_zero_cell = lm_zero_cell;
  p.embedding.resize(embed_dim, vocab_size);
  p.ctx_fwd = zero_lstm(embed_dim, hidden_dim);
  p.ctx_bwd = zero_lstm(embed_dim, hidden_dim);
  p.lm_fwd = zero_lstm(embed_dim, hidden_dim);
  p.lm_bwd = zero_lstm(embed_dim, hidden_dim);
  p.out_fwd = {Eigen::MatrixXd::Zero(vocab_size, hidden_dim),
               Eigen::VectorXd::Zero(vocab_size)};
  p.out_bwd = shared_output
                  ? OutputParams{Eigen::MatrixXd::Zero(0, 0),
                                 Eigen::VectorXd::Zero(0)}
                  : OutputParams{Eigen::MatrixXd::Zero(vocab_size, hidden_dim),
                                 Eigen::VectorXd::Zero(vocab_size)};

  std::mt19937_64 rng(seed);
  constexpr double kInitRange = 0.08;
  for (const ParamView& v : param_views(p)) {
    Eigen::Map<Eigen::MatrixXd> flat(v.data, v.size, 1);
    uniform_fill(flat, rng, kInitRange);
  }
  return p;
}

ModelParams ModelParams::zeros_like() const {
  ModelParams z = *this;
  for (const ParamView& v : param_views(z))
    Eigen::Map<Eigen::VectorXd>(v.data, v.size).setZero();
  return z;
}

std::vector<ParamView> param_views(ModelParams& p) {
  std::vector<ParamView> views;
  auto add = [&](const char* name, Eigen::MatrixXd& m) {
    views.push_back({name, m.data(), m.size()});
  };
  auto addv = [&](const char* name, Eigen::VectorXd& v) {
    views.push_back({name, v.data(), v.size()});
  };
  add("embedding", p.embedding);
  for (auto& [tag, lstm] :
       {std::pair<const char*, LstmParams*>{"ctx_fwd", &p.ctx_fwd},
        {"ctx_bwd", &p.ctx_bwd},
        {"lm_fwd", &p.lm_fwd},
        {"lm_bwd", &p.lm_bwd}}) {
    (void)tag;
    add(tag, lstm->w_input);
    add(tag, lstm->w_recur);
    addv(tag, lstm->bias);
  }
  add("out_w_fwd", p.out_fwd.weight);
  if (!p.shared_output) add("out_w_bwd", p.out_bwd.weight);
  addv("out_b_fwd", p.out_fwd.bias);
  if (!p.shared_output) addv("out_b_bwd", p.out_bwd.bias);
  return views;
}

std::ptrdiff_t param_count(const ModelParams& p) {
  std::ptrdiff_t total = 0;
  for (const ParamView& v : param_views(const_cast<ModelParams&>(p)))
    total += v.size;
  return total;
}

HiddenState lstm_step(const LstmParams& p, const HiddenState& state,
                      const Eigen::Ref<const Eigen::VectorXd>& input) {
  const Eigen::Index hidden = state.h.size();
  Eigen::VectorXd pre = p.w_input * input + p.w_recur * state.h + p.bias;
  auto sigmoid = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  HiddenState next;
  next.c.resize(hidden);
  next.h.resize(hidden);
  for (Eigen::Index j = 0; j < hidden; ++j) {
    const double gi = sigmoid(pre[j]);
    const double gf = sigmoid(pre[hidden + j]);
    const double gg = std::tanh(pre[2 * hidden + j]);
    const double go = sigmoid(pre[3 * hidden + j]);
    next.c[j] = gf * state.c[j] + gi * gg;
    next.h[j] = go * std::tanh(next.c[j]);
  }
  return next;
}

std::vector<std::int32_t> direction_ids(const CharSequence& sentence,
                                        Direction dir) {
  std::vector<std::int32_t> ids = sentence.ids;
  if (dir == Direction::backward) std::reverse(ids.begin(), ids.end());
  return ids;
}

std::vector<HiddenState> encode_context(const ModelParams& p,
                                        const std::vector<std::int32_t>& ids,
                                        Direction dir, ScoreStats* stats) {
  const LstmParams& ctx = p.ctx(dir);
  std::vector<HiddenState> states;
  states.reserve(ids.size() + 1);
  states.push_back(HiddenState::zero(p.hidden_dim));
  for (std::int32_t id : ids) {
    states.push_back(lstm_step(ctx, states.back(), p.embedding.col(id)));
    if (stats) ++stats->ctx_steps;
  }
  return states;
}

namespace {

/// Log-softmax of out.weight * h + out.bias, returned densely.
Eigen::VectorXd log_softmax(const OutputParams& out,
                            const Eigen::VectorXd& h) {
  Eigen::VectorXd logits = out.weight * h + out.bias;
  const double hi = logits.maxCoeff();
  const double lse = hi + std::log((logits.array() - hi).exp().sum());
  logits.array() -= lse;
  return logits;
}

}  // namespace

SegmentScoreTable score_segments(const ModelParams& p,
                                 const CharSequence& sentence, Direction dir,
                                 int t_max, ScoreStats* stats) {
  const std::vector<std::int32_t> ids = direction_ids(sentence, dir);
  const int n = static_cast<int>(ids.size());
  SegmentScoreTable table(n, t_max);
  const std::vector<HiddenState> ctx = encode_context(p, ids, dir, stats);
  const LstmParams& lm = p.lm(dir);
  const OutputParams& out = p.output(dir);

  for (int start = 0; start < n; ++start) {
    const int len_max = table.max_len_at(start);
    HiddenState state = ctx[start];
    if (p.lm_zero_cell) state.c.setZero();
    // The EOS embedding opens the segment and yields the first character
    // distribution; every nested prefix then shares this single run.
    state = lstm_step(lm, state, p.embedding.col(p.eos_id));
    if (stats) ++stats->lm_steps;
    Eigen::VectorXd logp = log_softmax(out, state.h);
    double char_log_sum = 0.0;
    for (int len = 1; len <= len_max; ++len) {
      char_log_sum += logp[ids[start + len - 1]];
      state = lstm_step(lm, state, p.embedding.col(ids[start + len - 1]));
      if (stats) ++stats->lm_steps;
      // The state after `len` characters both terminates this prefix (EOS
      // probability) and predicts character len+1 of the longer ones.
      logp = log_softmax(out, state.h);
      table.at(start, len) = char_log_sum + logp[p.eos_id];
    }
  }
  return table;
}

std::pair<SegmentScoreTable, SegmentScoreTable> score_bidi(
    const ModelParams& p, const CharSequence& sentence, int t_max,
    ScoreStats* stats) {
  return {score_segments(p, sentence, Direction::forward, t_max, stats),
          score_segments(p, sentence, Direction::backward, t_max, stats)};
}

}  // namespace seglm

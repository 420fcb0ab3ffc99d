#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <utility>
#include <vector>

#include "seglm/corpus.hpp"
#include "seglm/lattice.hpp"

namespace seglm {

enum class Direction { forward, backward };

struct HiddenState {
  Eigen::VectorXd h;
  Eigen::VectorXd c;

  static HiddenState zero(int hidden_dim) {
    return {Eigen::VectorXd::Zero(hidden_dim),
            Eigen::VectorXd::Zero(hidden_dim)};
  }
};

/// One LSTM's parameters. Gate rows are laid out [input; forget; cell;
/// output], each a block of H.
struct LstmParams {
  Eigen::MatrixXd w_input;  // 4H x E
  Eigen::MatrixXd w_recur;  // 4H x H
  Eigen::VectorXd bias;     // 4H
};

struct OutputParams {
  Eigen::MatrixXd weight;  // V x H
  Eigen::VectorXd bias;    // V
};

/// All trainable parameters: character embeddings, two context LSTMs, two
/// language-model LSTMs and the softmax projection(s). The embedding table
/// is shared across directions; the output projection is per-direction
/// unless shared_output is set.
struct ModelParams {
  int vocab_size = 0;
  int embed_dim = 0;
  int hidden_dim = 0;
  std::int32_t eos_id = -1;
  bool shared_output = false;
  bool lm_zero_cell = false;  // start LM cell at zero instead of the context cell

  Eigen::MatrixXd embedding;  // E x V, one column per symbol
  LstmParams ctx_fwd, ctx_bwd, lm_fwd, lm_bwd;
  OutputParams out_fwd, out_bwd;  // out_bwd aliases out_fwd when shared

  /// Uniform init in [-0.08, 0.08], deterministic for a fixed seed.
  static ModelParams init(int vocab_size, int embed_dim, int hidden_dim,
                          std::int32_t eos_id, std::uint64_t seed,
                          bool shared_output = false,
                          bool lm_zero_cell = false);
  /// Same shapes and flags, all values zero (gradient accumulator).
  ModelParams zeros_like() const;

  const LstmParams& ctx(Direction d) const {
    return d == Direction::forward ? ctx_fwd : ctx_bwd;
  }
  const LstmParams& lm(Direction d) const {
    return d == Direction::forward ? lm_fwd : lm_bwd;
  }
  const OutputParams& output(Direction d) const {
    return (d == Direction::forward || shared_output) ? out_fwd : out_bwd;
  }
};

/// Flat view over every parameter array in checkpoint order.
struct ParamView {
  const char* name;
  double* data;
  std::ptrdiff_t size;
};
std::vector<ParamView> param_views(ModelParams& p);
std::ptrdiff_t param_count(const ModelParams& p);

/// LSTM step counters for complexity checks.
struct ScoreStats {
  long ctx_steps = 0;
  long lm_steps = 0;
};

/// One LSTM cell update (sigmoid gates, tanh squashing).
HiddenState lstm_step(const LstmParams& p, const HiddenState& state,
                      const Eigen::Ref<const Eigen::VectorXd>& input);

/// States 0..n of the context LSTM for the chosen direction; state[t]
/// summarizes the first t characters of the (possibly reversed) sentence,
/// state[0] is the zero state. Computed in exactly n LSTM steps.
std::vector<HiddenState> encode_context(const ModelParams& p,
                                        const std::vector<std::int32_t>& ids,
                                        Direction dir,
                                        ScoreStats* stats = nullptr);

/// Fills a SegmentScoreTable for one direction. Each start position shares
/// one language-model run across all nested prefixes, so the total work is
/// at most n*(t_max+1) LM steps plus the n cached context steps.
SegmentScoreTable score_segments(const ModelParams& p,
                                 const CharSequence& sentence, Direction dir,
                                 int t_max, ScoreStats* stats = nullptr);

/// Forward table on the sentence plus backward table on the reversed
/// sentence (scored with the backward parameter sets).
std::pair<SegmentScoreTable, SegmentScoreTable> score_bidi(
    const ModelParams& p, const CharSequence& sentence, int t_max,
    ScoreStats* stats = nullptr);

/// ids of `sentence` in direction order (reversed for backward).
std::vector<std::int32_t> direction_ids(const CharSequence& sentence,
                                        Direction dir);

}  // namespace seglm

#include "seglm/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <thread>

#include "seglm/checkpoint.hpp"

namespace seglm {

namespace {

// ---------------------------------------------------------------------------
// Tape-based forward pass. Mirrors the inference path in slm.cpp but records
// everything the reverse sweep needs: per-step gate activations, cell states
// and the dense log-softmax at every language-model state.
// ---------------------------------------------------------------------------

struct StepCache {
  Eigen::VectorXd h_prev, c_prev;
  Eigen::VectorXd gates;  // [i f g o] post-activation, 4H
  Eigen::VectorXd c, h;
  std::int32_t input_sym;
};

StepCache lstm_step_cached(const LstmParams& p, const Eigen::VectorXd& h_prev,
                           const Eigen::VectorXd& c_prev,
                           const Eigen::Ref<const Eigen::VectorXd>& input,
                           std::int32_t input_sym) {
  const Eigen::Index hidden = h_prev.size();
  StepCache s;
  s.h_prev = h_prev;
  s.c_prev = c_prev;
  s.input_sym = input_sym;
  Eigen::VectorXd pre = p.w_input * input + p.w_recur * h_prev + p.bias;
  s.gates.resize(4 * hidden);
  s.c.resize(hidden);
  s.h.resize(hidden);
  auto sigmoid = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  for (Eigen::Index j = 0; j < hidden; ++j) {
    const double gi = sigmoid(pre[j]);
    const double gf = sigmoid(pre[hidden + j]);
    const double gg = std::tanh(pre[2 * hidden + j]);
    const double go = sigmoid(pre[3 * hidden + j]);
    s.gates[j] = gi;
    s.gates[hidden + j] = gf;
    s.gates[2 * hidden + j] = gg;
    s.gates[3 * hidden + j] = go;
    s.c[j] = gf * c_prev[j] + gi * gg;
    s.h[j] = go * std::tanh(s.c[j]);
  }
  return s;
}

/// Reverse of one LSTM step. dh/dc are the gradients flowing into (h, c);
/// dx, dh_prev and dc_prev come out, parameter gradients accumulate.
void lstm_backward(const LstmParams& p, const StepCache& s,
                   const Eigen::Ref<const Eigen::VectorXd>& x,
                   const Eigen::VectorXd& dh, const Eigen::VectorXd& dc_in,
                   LstmParams& grad, Eigen::VectorXd& dx,
                   Eigen::VectorXd& dh_prev, Eigen::VectorXd& dc_prev) {
  const Eigen::Index hidden = dh.size();
  Eigen::VectorXd dpre(4 * hidden);
  dc_prev.resize(hidden);
  for (Eigen::Index j = 0; j < hidden; ++j) {
    const double gi = s.gates[j];
    const double gf = s.gates[hidden + j];
    const double gg = s.gates[2 * hidden + j];
    const double go = s.gates[3 * hidden + j];
    const double tc = std::tanh(s.c[j]);
    const double dout = dh[j] * tc;
    const double dc = dc_in[j] + dh[j] * go * (1.0 - tc * tc);
    const double df = dc * s.c_prev[j];
    const double di = dc * gg;
    const double dg = dc * gi;
    dc_prev[j] = dc * gf;
    dpre[j] = di * gi * (1.0 - gi);
    dpre[hidden + j] = df * gf * (1.0 - gf);
    dpre[2 * hidden + j] = dg * (1.0 - gg * gg);
    dpre[3 * hidden + j] = dout * go * (1.0 - go);
  }
  grad.w_input.noalias() += dpre * x.transpose();
  grad.w_recur.noalias() += dpre * s.h_prev.transpose();
  grad.bias += dpre;
  dx.noalias() = p.w_input.transpose() * dpre;
  dh_prev.noalias() = p.w_recur.transpose() * dpre;
}

Eigen::VectorXd log_softmax_dense(const OutputParams& out,
                                  const Eigen::VectorXd& h) {
  Eigen::VectorXd logits = out.weight * h + out.bias;
  const double hi = logits.maxCoeff();
  const double lse = hi + std::log((logits.array() - hi).exp().sum());
  logits.array() -= lse;
  return logits;
}

struct LmRun {
  int start = 0;
  int len_max = 0;
  std::vector<StepCache> steps;       // len_max + 1
  std::vector<Eigen::VectorXd> logp;  // len_max + 1
};

struct DirectionTape {
  std::vector<std::int32_t> ids;
  std::vector<StepCache> ctx_steps;  // produce context states 1..n
  std::vector<LmRun> runs;           // one per start offset
  std::optional<SegmentScoreTable> scores;
  LatticeResult lattice;
};

double forward_direction(const ModelParams& p, const CharSequence& sentence,
                         Direction dir, int t_max, DirectionTape& tape) {
  tape.ids = direction_ids(sentence, dir);
  const auto& ids = tape.ids;
  const int n = static_cast<int>(ids.size());
  const LstmParams& ctx = p.ctx(dir);
  const LstmParams& lm = p.lm(dir);
  const OutputParams& out = p.output(dir);

  tape.ctx_steps.clear();
  tape.ctx_steps.reserve(n);
  {
    Eigen::VectorXd h = Eigen::VectorXd::Zero(p.hidden_dim);
    Eigen::VectorXd c = Eigen::VectorXd::Zero(p.hidden_dim);
    for (int t = 0; t < n; ++t) {
      tape.ctx_steps.push_back(
          lstm_step_cached(ctx, h, c, p.embedding.col(ids[t]), ids[t]));
      h = tape.ctx_steps.back().h;
      c = tape.ctx_steps.back().c;
    }
  }

  tape.scores.emplace(n, t_max);
  SegmentScoreTable& table = *tape.scores;
  tape.runs.assign(n, {});
  for (int start = 0; start < n; ++start) {
    LmRun& run = tape.runs[start];
    run.start = start;
    run.len_max = table.max_len_at(start);
    Eigen::VectorXd h = start == 0 ? Eigen::VectorXd::Zero(p.hidden_dim)
                                   : tape.ctx_steps[start - 1].h;
    Eigen::VectorXd c = (start == 0 || p.lm_zero_cell)
                            ? Eigen::VectorXd::Zero(p.hidden_dim)
                            : tape.ctx_steps[start - 1].c;
    run.steps.push_back(
        lstm_step_cached(lm, h, c, p.embedding.col(p.eos_id), p.eos_id));
    run.logp.push_back(log_softmax_dense(out, run.steps.back().h));
    double char_log_sum = 0.0;
    for (int len = 1; len <= run.len_max; ++len) {
      const std::int32_t sym = ids[start + len - 1];
      char_log_sum += run.logp[len - 1][sym];
      const StepCache& prev = run.steps.back();
      run.steps.push_back(
          lstm_step_cached(lm, prev.h, prev.c, p.embedding.col(sym), sym));
      run.logp.push_back(log_softmax_dense(out, run.steps.back().h));
      table.at(start, len) = char_log_sum + run.logp[len][p.eos_id];
    }
  }

  tape.lattice = forward_marginal(table);
  return tape.lattice.log_marginal;
}

OutputParams& output_grad(ModelParams& g, Direction dir) {
  return (dir == Direction::forward || g.shared_output) ? g.out_fwd
                                                        : g.out_bwd;
}

void backward_direction(const ModelParams& p, const DirectionTape& tape,
                        Direction dir, double dmarginal, ModelParams& g) {
  const auto& ids = tape.ids;
  const int n = static_cast<int>(ids.size());
  const int t_max = tape.scores->t_max();
  const LatticeResult& lat = tape.lattice;
  const LstmParams& lm = p.lm(dir);
  const LstmParams& ctx = p.ctx(dir);
  const OutputParams& out = p.output(dir);
  LstmParams& g_lm = dir == Direction::forward ? g.lm_fwd : g.lm_bwd;
  LstmParams& g_ctx = dir == Direction::forward ? g.ctx_fwd : g.ctx_bwd;
  OutputParams& g_out = output_grad(g, dir);

  // Lattice: log_marginal differentiates into per-segment posterior weights.
  std::vector<double> dprefix(n + 1, 0.0);
  std::vector<double> dscore(static_cast<std::size_t>(n) * t_max, 0.0);
  dprefix[n] = dmarginal;
  for (int t = n; t >= 1; --t) {
    if (dprefix[t] == 0.0) continue;
    const int k_hi = std::min(t_max, t);
    for (int k = 1; k <= k_hi; ++k) {
      const double da =
          dprefix[t] * std::exp(lat.alpha_at(t, k) - lat.prefix[t]);
      dscore[static_cast<std::size_t>(t - k) * t_max + (k - 1)] += da;
      dprefix[t - k] += da;
    }
  }

  // Per-start language-model runs, shared across nested prefixes.
  std::vector<Eigen::VectorXd> d_ctx_h(n), d_ctx_c(n);
  Eigen::VectorXd dx(p.embed_dim), dh_prev(p.hidden_dim), dc_prev;
  for (int start = n - 1; start >= 0; --start) {
    const LmRun& run = tape.runs[start];
    const int len_max = run.len_max;
    std::vector<double> suffix(len_max + 2, 0.0);
    for (int len = len_max; len >= 1; --len)
      suffix[len] =
          suffix[len + 1] +
          dscore[static_cast<std::size_t>(start) * t_max + (len - 1)];

    Eigen::VectorXd dh = Eigen::VectorXd::Zero(p.hidden_dim);
    Eigen::VectorXd dc = Eigen::VectorXd::Zero(p.hidden_dim);
    for (int j = len_max; j >= 0; --j) {
      const double w_char = j < len_max ? suffix[j + 1] : 0.0;
      const double w_eos =
          j >= 1 ? dscore[static_cast<std::size_t>(start) * t_max + (j - 1)]
                 : 0.0;
      const double w_sum = w_char + w_eos;
      if (w_sum != 0.0) {
        Eigen::VectorXd dlogits = -w_sum * run.logp[j].array().exp().matrix();
        if (j < len_max) dlogits[ids[start + j]] += w_char;
        if (j >= 1) dlogits[p.eos_id] += w_eos;
        g_out.weight.noalias() += dlogits * run.steps[j].h.transpose();
        g_out.bias += dlogits;
        dh.noalias() += out.weight.transpose() * dlogits;
      }
      const std::int32_t sym = run.steps[j].input_sym;
      lstm_backward(lm, run.steps[j], p.embedding.col(sym), dh, dc, g_lm, dx,
                    dh_prev, dc_prev);
      g.embedding.col(sym) += dx;
      dh.swap(dh_prev);
      dc.swap(dc_prev);
    }
    // Initial LM state came from the context encoder (zero state at 0).
    if (start > 0) {
      d_ctx_h[start] = std::move(dh);
      if (!p.lm_zero_cell) d_ctx_c[start] = std::move(dc);
    }
  }

  // Context chain. State n is never consumed, so start one step earlier.
  Eigen::VectorXd dh = Eigen::VectorXd::Zero(p.hidden_dim);
  Eigen::VectorXd dc = Eigen::VectorXd::Zero(p.hidden_dim);
  for (int t = n - 1; t >= 1; --t) {
    if (d_ctx_h[t].size() > 0) dh += d_ctx_h[t];
    if (d_ctx_c[t].size() > 0) dc += d_ctx_c[t];
    const StepCache& step = tape.ctx_steps[t - 1];
    lstm_backward(ctx, step, p.embedding.col(step.input_sym), dh, dc, g_ctx,
                  dx, dh_prev, dc_prev);
    g.embedding.col(step.input_sym) += dx;
    dh.swap(dh_prev);
    dc.swap(dc_prev);
  }
}

/// Adds the gradient of `scale * (-(A_fwd + A_bwd)/2)` for one sentence and
/// returns its loss. Non-finite marginals surface as NaN in the return.
double accumulate_sentence(const ModelParams& p, const CharSequence& sentence,
                           int t_max, double scale, ModelParams& g) {
  double total = 0.0;
  for (Direction dir : {Direction::forward, Direction::backward}) {
    DirectionTape tape;
    const double marginal = forward_direction(p, sentence, dir, t_max, tape);
    total += marginal;
    if (!std::isfinite(marginal))
      return std::numeric_limits<double>::quiet_NaN();
    backward_direction(p, tape, dir, -0.5 * scale, g);
  }
  return -0.5 * total;
}

}  // namespace

double sentence_loss(const ModelParams& p, const CharSequence& sentence,
                     int t_max) {
  auto [fwd, bwd] = score_bidi(p, sentence, t_max);
  return -0.5 * (forward_marginal(fwd).log_marginal +
                 backward_marginal(bwd).log_marginal);
}

ModelParams gradient(const ModelParams& p, std::span<const CharSequence> batch,
                     int t_max, double* mean_loss, int threads) {
  if (batch.empty()) throw std::invalid_argument("gradient of an empty batch");
  const std::size_t count = batch.size();
  const double scale = 1.0 / static_cast<double>(count);
  const int workers =
      std::max(1, std::min<int>(threads, static_cast<int>(count)));

  std::vector<ModelParams> grads;
  std::vector<double> losses(count, 0.0);
  grads.reserve(workers);
  for (int w = 0; w < workers; ++w) grads.push_back(p.zeros_like());

  auto run_range = [&](int w, std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      losses[i] = accumulate_sentence(p, batch[i], t_max, scale, grads[w]);
  };
  if (workers == 1) {
    run_range(0, 0, count);
  } else {
    std::vector<std::thread> pool;
    const std::size_t per = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::size_t lo = w * per;
      const std::size_t hi = std::min(count, lo + per);
      if (lo < hi) pool.emplace_back(run_range, w, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  for (std::size_t i = 0; i < count; ++i)
    if (!std::isfinite(losses[i])) throw NonFiniteLoss(i);

  ModelParams& total = grads[0];
  // Fixed worker order keeps the reduction deterministic.
  for (int w = 1; w < workers; ++w) {
    auto dst = param_views(total);
    auto src = param_views(grads[w]);
    for (std::size_t v = 0; v < dst.size(); ++v)
      Eigen::Map<Eigen::VectorXd>(dst[v].data, dst[v].size) +=
          Eigen::Map<const Eigen::VectorXd>(src[v].data, src[v].size);
  }
  if (mean_loss)
    *mean_loss = std::accumulate(losses.begin(), losses.end(), 0.0) * scale;
  return std::move(total);
}

namespace {

std::vector<CharSequence> split_long_sentences(
    const std::vector<CharSequence>& corpus, int cap) {
  std::vector<CharSequence> out;
  out.reserve(corpus.size());
  for (const auto& seq : corpus) {
    const int n = static_cast<int>(seq.size());
    if (n <= cap) {
      out.push_back(seq);
      continue;
    }
    for (int lo = 0; lo < n; lo += cap) {
      const int hi = std::min(n, lo + cap);
      CharSequence piece;
      piece.ids.assign(seq.ids.begin() + lo, seq.ids.begin() + hi);
      piece.syms.assign(seq.syms.begin() + lo, seq.syms.begin() + hi);
      piece.raw.assign(seq.raw.begin() + lo, seq.raw.begin() + hi);
      out.push_back(std::move(piece));
    }
  }
  return out;
}

double global_grad_norm(ModelParams& g) {
  double sq = 0.0;
  for (const ParamView& v : param_views(g))
    sq += Eigen::Map<const Eigen::VectorXd>(v.data, v.size).squaredNorm();
  return std::sqrt(sq);
}

}  // namespace

std::pair<ModelParams, TrainReport> train(
    const std::vector<CharSequence>& corpus, const Vocab& vocab,
    const TrainConfig& config) {
  if (corpus.empty()) throw std::invalid_argument("training corpus is empty");
  ModelParams params = ModelParams::init(
      vocab.size(), config.embed_dim, config.hidden_dim, vocab.eos_id,
      config.seed, config.shared_output, config.lm_zero_cell);
  TrainReport report;

  const std::vector<CharSequence> sentences =
      split_long_sentences(corpus, config.max_sentence_chars);
  const std::size_t total = sentences.size();
  const std::size_t batch_size =
      std::max<std::size_t>(1, static_cast<std::size_t>(config.batch_size));

  ModelParams mom1 = params.zeros_like();
  ModelParams mom2 = params.zeros_like();
  const AdamConfig adam{config.lr, config.adam_beta1, config.adam_beta2,
                        config.adam_epsilon};
  long step = 0;

  std::mt19937_64 order_rng(config.seed ^ 0x9E3779B97F4A7C15ull);
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);

  ModelParams last_good = params;
  const bool keep_files = !config.checkpoint_dir.empty();
  if (keep_files) std::filesystem::create_directories(config.checkpoint_dir);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    const auto started = std::chrono::steady_clock::now();
    std::shuffle(order.begin(), order.end(), order_rng);
    // Bucket nearby lengths so each batch does comparable lattice work.
    const std::size_t bucket = batch_size * 16;
    for (std::size_t lo = 0; lo < total; lo += bucket) {
      const std::size_t hi = std::min(total, lo + bucket);
      std::stable_sort(order.begin() + lo, order.begin() + hi,
                       [&](std::size_t a, std::size_t b) {
                         return sentences[a].size() < sentences[b].size();
                       });
    }

    double epoch_loss_sum = 0.0;
    std::vector<CharSequence> batch;
    for (std::size_t lo = 0; lo < total; lo += batch_size) {
      const std::size_t hi = std::min(total, lo + batch_size);
      batch.clear();
      for (std::size_t i = lo; i < hi; ++i) batch.push_back(sentences[order[i]]);

      double batch_loss = 0.0;
      ModelParams grads;
      try {
        grads = gradient(params, batch, config.t_max, &batch_loss,
                         config.threads);
      } catch (const NonFiniteLoss&) {
        report.diverged = true;
        report.diverged_epoch = epoch;
        return {std::move(last_good), std::move(report)};
      }
      epoch_loss_sum += batch_loss * static_cast<double>(hi - lo);

      if (config.grad_clip) {
        const double norm = global_grad_norm(grads);
        if (norm > config.grad_clip_norm) {
          const double rescale = config.grad_clip_norm / norm;
          for (const ParamView& v : param_views(grads))
            Eigen::Map<Eigen::VectorXd>(v.data, v.size) *= rescale;
        }
      }

      ++step;
      auto pv = param_views(params);
      auto gv = param_views(grads);
      auto m1 = param_views(mom1);
      auto m2 = param_views(mom2);
      for (std::size_t v = 0; v < pv.size(); ++v) {
        adam_update(Eigen::Map<const Eigen::VectorXd>(gv[v].data, gv[v].size),
                    Eigen::Map<Eigen::VectorXd>(m1[v].data, m1[v].size),
                    Eigen::Map<Eigen::VectorXd>(m2[v].data, m2[v].size),
                    Eigen::Map<Eigen::VectorXd>(pv[v].data, pv[v].size), step,
                    adam);
      }
    }

    const double mean_loss = epoch_loss_sum / static_cast<double>(total);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                      started)
            .count();
    report.epoch_loss.push_back(mean_loss);
    report.epoch_seconds.push_back(seconds);
    if (!std::isfinite(mean_loss)) {
      report.diverged = true;
      report.diverged_epoch = epoch;
      return {std::move(last_good), std::move(report)};
    }
    last_good = params;
    if (keep_files)
      save_checkpoint(config.checkpoint_dir / "model.bin", params);
  }
  return {std::move(params), std::move(report)};
}

void write_train_report_csv(const std::filesystem::path& path,
                            const TrainReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw std::runtime_error("cannot write train report: " + path.string());
  out << "epoch,mean_loss,seconds\n";
  for (std::size_t e = 0; e < report.epoch_loss.size(); ++e) {
    out << (e + 1) << ',';
    out.precision(17);
    out << report.epoch_loss[e] << ',' << report.epoch_seconds[e] << '\n';
  }
}

}  // namespace seglm

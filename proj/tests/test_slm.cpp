#include <doctest.h>

#include <cmath>
#include <random>

#include "seglm/slm.hpp"
#include "support/oracles.hpp"

using namespace seglm;
using namespace seglm::testing;

namespace {

ModelParams tiny_model(int vocab, int embed, int hidden, std::uint64_t seed,
                       bool shared = false, bool zero_cell = false) {
  return ModelParams::init(vocab, embed, hidden, vocab - 1, seed, shared,
                           zero_cell);
}

}  // namespace

TEST_CASE("lstm_step with all-zero parameters yields a zero state") {
  ModelParams p = tiny_model(4, 3, 5, 1);
  const LstmParams zero{Eigen::MatrixXd::Zero(20, 3),
                        Eigen::MatrixXd::Zero(20, 5),
                        Eigen::VectorXd::Zero(20)};
  const auto out =
      lstm_step(zero, HiddenState::zero(5), Eigen::VectorXd::Random(3));
  CHECK(out.h.cwiseAbs().maxCoeff() == 0.0);
  CHECK(out.c.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("lstm_step matches an independent reference cell") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  for (int it = 0; it < 20; ++it) {
    const int embed = 3, hidden = 4;
    LstmParams p{Eigen::MatrixXd(4 * hidden, embed),
                 Eigen::MatrixXd(4 * hidden, hidden),
                 Eigen::VectorXd(4 * hidden)};
    for (auto* m : {&p.w_input, &p.w_recur})
      for (Eigen::Index i = 0; i < m->size(); ++i) (*m)(i) = dist(rng);
    for (Eigen::Index i = 0; i < p.bias.size(); ++i) p.bias[i] = dist(rng);
    HiddenState state{Eigen::VectorXd(hidden), Eigen::VectorXd(hidden)};
    for (int j = 0; j < hidden; ++j) {
      state.h[j] = dist(rng);
      state.c[j] = dist(rng);
    }
    Eigen::VectorXd x(embed);
    for (int j = 0; j < embed; ++j) x[j] = dist(rng);

    const HiddenState a = lstm_step(p, state, x);
    const HiddenState b = reference_lstm_step(p, state, x);
    CHECK((a.h - b.h).cwiseAbs().maxCoeff() <= 1e-10);
    CHECK((a.c - b.c).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("repeated lstm_step keeps the hidden norm bounded by 1") {
  ModelParams p = tiny_model(6, 4, 4, 7);
  HiddenState state = HiddenState::zero(4);
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> sym(0, 5);
  for (int t = 0; t < 200; ++t)
    state = lstm_step(p.lm_fwd, state, p.embedding.col(sym(rng)));
  CHECK(state.h.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("encode_context state t depends on exactly t characters") {
  ModelParams p = tiny_model(5, 3, 4, 11);
  const CharSequence sent = make_sequence({0, 2, 1, 3});
  const auto ids = direction_ids(sent, Direction::forward);
  const auto states = encode_context(p, ids, Direction::forward);
  REQUIRE(states.size() == 5);
  CHECK(states[0].h.cwiseAbs().maxCoeff() == 0.0);

  HiddenState manual = HiddenState::zero(4);
  for (std::size_t t = 0; t < ids.size(); ++t) {
    manual = lstm_step(p.ctx_fwd, manual, p.embedding.col(ids[t]));
    CHECK((states[t + 1].h - manual.h).cwiseAbs().maxCoeff() == 0.0);
    CHECK((states[t + 1].c - manual.c).cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("single character uses one step") {
    ScoreStats stats;
    (void)encode_context(p, {1}, Direction::forward, &stats);
    CHECK(stats.ctx_steps == 1);
  }
}

TEST_CASE("uniform softmax scores are -(len+1) log V") {
  // Zero weights make every emission uniform over V symbols.
  ModelParams p = tiny_model(5, 3, 4, 0);
  for (const ParamView& v : param_views(p))
    Eigen::Map<Eigen::VectorXd>(v.data, v.size).setZero();
  const CharSequence sent = make_sequence({0, 1, 2, 3});
  const auto table = score_segments(p, sent, Direction::forward, 3);
  const double logv = std::log(5.0);
  for (int start = 0; start < 4; ++start)
    for (int len = 1; len <= table.max_len_at(start); ++len)
      CHECK(table(start, len) ==
            doctest::Approx(-(len + 1) * logv).epsilon(1e-12));
}

TEST_CASE("shared-prefix scoring equals naive per-segment scoring") {
  std::mt19937_64 rng(42);
  for (int it = 0; it < 25; ++it) {
    const bool zero_cell = it % 2 == 1;
    ModelParams p = tiny_model(6, 4, 5, 1000 + it, false, zero_cell);
    const CharSequence sent = random_sequence(5, 5, rng);
    for (Direction dir : {Direction::forward, Direction::backward}) {
      const auto ids = direction_ids(sent, dir);
      const auto table = score_segments(p, sent, dir, 3);
      for (int start = 0; start < 5; ++start)
        for (int len = 1; len <= table.max_len_at(start); ++len)
          REQUIRE(std::abs(table(start, len) -
                           naive_segment_score(p, ids, dir, start, len)) <=
                  1e-9);
    }
  }
}

TEST_CASE("step counters stay within the shared-run budget") {
  ModelParams p = tiny_model(7, 4, 4, 5);
  std::mt19937_64 rng(8);
  for (int n : {1, 3, 6, 10}) {
    for (int t_max : {1, 3, 5}) {
      const CharSequence sent = random_sequence(n, 6, rng);
      ScoreStats stats;
      (void)score_bidi(p, sent, t_max, &stats);
      CHECK(stats.ctx_steps <= 2 * n);
      CHECK(stats.lm_steps <= 2 * n * (t_max + 1));
    }
  }
}

TEST_CASE("per-state softmax normalizes over the vocabulary") {
  ModelParams p = tiny_model(6, 3, 4, 21);
  std::mt19937_64 rng(4);
  const CharSequence sent = random_sequence(4, 5, rng);
  const auto ids = direction_ids(sent, Direction::forward);
  // Reconstruct each LM state and check sum(exp(logp)) == 1.
  const auto ctx = encode_context(p, ids, Direction::forward);
  for (int start = 0; start < 4; ++start) {
    HiddenState state = ctx[start];
    state = lstm_step(p.lm_fwd, state, p.embedding.col(p.eos_id));
    for (int step = 0; step <= std::min(3, 4 - start); ++step) {
      Eigen::VectorXd logits =
          p.out_fwd.weight * state.h + p.out_fwd.bias;
      const double hi = logits.maxCoeff();
      const double lse = hi + std::log((logits.array() - hi).exp().sum());
      CHECK(std::abs((logits.array() - lse).exp().sum() - 1.0) <= 1e-6);
      if (start + step < 4)
        state = lstm_step(p.lm_fwd, state,
                          p.embedding.col(ids[start + step]));
    }
  }
}

TEST_CASE("score_bidi on a single character fills both 1x1 tables") {
  ModelParams p = tiny_model(4, 3, 3, 77);
  const CharSequence sent = make_sequence({2});
  const auto [fwd, bwd] = score_bidi(p, sent, 4);
  CHECK(fwd.size() == 1);
  CHECK(bwd.size() == 1);
  CHECK(std::isfinite(fwd(0, 1)));
  CHECK(std::isfinite(bwd(0, 1)));
}

TEST_CASE("tied parameters on a palindrome give mirrored tables") {
  ModelParams p = tiny_model(5, 3, 4, 13);
  p.ctx_bwd = p.ctx_fwd;
  p.lm_bwd = p.lm_fwd;
  p.out_bwd = p.out_fwd;
  const CharSequence sent = make_sequence({0, 1, 2, 1, 0});
  const auto [fwd, bwd] = score_bidi(p, sent, 3);
  for (int start = 0; start < 5; ++start)
    for (int len = 1; len <= fwd.max_len_at(start); ++len)
      CHECK(fwd(start, len) == doctest::Approx(bwd(start, len)).epsilon(1e-12));
}

TEST_CASE("all scores are finite for finite parameters") {
  std::mt19937_64 rng(55);
  ModelParams p = tiny_model(8, 4, 4, 3);
  const CharSequence sent = random_sequence(7, 7, rng);
  const auto [fwd, bwd] = score_bidi(p, sent, 4);
  for (const auto* t : {&fwd, &bwd})
    for (int start = 0; start < t->size(); ++start)
      for (int len = 1; len <= t->max_len_at(start); ++len)
        CHECK(std::isfinite((*t)(start, len)));
}

TEST_CASE("shared output projection uses the forward weights both ways") {
  ModelParams p = tiny_model(5, 3, 4, 9, /*shared=*/true);
  CHECK(&p.output(Direction::forward) == &p.output(Direction::backward));
  const CharSequence sent = make_sequence({0, 1, 2});
  const auto [fwd, bwd] = score_bidi(p, sent, 2);
  CHECK(std::isfinite(fwd(0, 1)));
  CHECK(std::isfinite(bwd(0, 1)));
}

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "seglm/adam.hpp"
#include "seglm/corpus.hpp"
#include "seglm/slm.hpp"

namespace seglm {

struct TrainConfig {
  double lr = 0.001;
  int epochs = 10;
  int batch_size = 32;
  int t_max = 3;
  int embed_dim = 300;
  int hidden_dim = 300;
  std::uint64_t seed = 42;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  bool grad_clip = false;
  double grad_clip_norm = 5.0;  // l2 threshold when enabled
  int max_sentence_chars = 80;  // longer sentences split at the cap
  int threads = 1;
  bool shared_output = false;
  bool lm_zero_cell = false;
  std::filesystem::path checkpoint_dir;  // per-epoch checkpoints when set
};

struct TrainReport {
  std::vector<double> epoch_loss;     // mean negative log-likelihood per sentence
  std::vector<double> epoch_seconds;  // wall time per epoch
  bool diverged = false;
  int diverged_epoch = -1;  // 1-based epoch where the loss went non-finite
};

class NonFiniteLoss : public std::runtime_error {
 public:
  explicit NonFiniteLoss(std::size_t sentence_index)
      : std::runtime_error("non-finite loss at sentence " +
                           std::to_string(sentence_index)),
        sentence_index_(sentence_index) {}
  std::size_t sentence_index() const { return sentence_index_; }

 private:
  std::size_t sentence_index_;
};

/// Negative mean of the two directional log marginals:
/// -(log_marginal_fwd + log_marginal_bwd) / 2.
double sentence_loss(const ModelParams& p, const CharSequence& sentence,
                     int t_max);

/// Exact gradient of the mean sentence_loss over the batch (reverse-mode
/// through the lattice, the shared-prefix scoring and the LSTMs).
/// Throws NonFiniteLoss identifying the first offending sentence.
ModelParams gradient(const ModelParams& p, std::span<const CharSequence> batch,
                     int t_max, double* mean_loss = nullptr, int threads = 1);

/// Shuffled minibatch Adam. Deterministic for a fixed seed and thread
/// count. On divergence stops early and returns the last finite state with
/// report.diverged set; any epoch checkpoints already written stay valid.
std::pair<ModelParams, TrainReport> train(const std::vector<CharSequence>& corpus,
                                          const Vocab& vocab,
                                          const TrainConfig& config);

void write_train_report_csv(const std::filesystem::path& path,
                            const TrainReport& report);

}  // namespace seglm

#pragma once

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace seglm {

class LatticeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Log-probability of every candidate segment (start, len) with
/// 1 <= len <= min(t_max, n - start). All probabilities are natural logs;
/// entries may be any finite real. Cells outside the valid region are NaN
/// and must never be read.
class SegmentScoreTable {
 public:
  SegmentScoreTable(int n, int t_max)
      : n_(n),
        t_max_(t_max),
        cells_(static_cast<std::size_t>(n) * t_max,
               std::numeric_limits<double>::quiet_NaN()) {
    if (n < 1) throw LatticeError("sentence length must be >= 1");
    if (t_max < 1) throw LatticeError("maximum word length must be >= 1");
  }

  int size() const { return n_; }
  int t_max() const { return t_max_; }
  int max_len_at(int start) const { return std::min(t_max_, n_ - start); }

  double operator()(int start, int len) const {
    return cells_[idx(start, len)];
  }
  double& at(int start, int len) { return cells_[idx(start, len)]; }

 private:
  std::size_t idx(int start, int len) const {
    return static_cast<std::size_t>(start) * t_max_ + (len - 1);
  }

  int n_;
  int t_max_;
  std::vector<double> cells_;
};

/// A segmentation as strictly increasing interior boundary offsets; 0 and n
/// are implicit. Empty boundaries = one word covering the whole sentence.
struct Segmentation {
  std::vector<std::int32_t> boundaries;

  bool operator==(const Segmentation&) const = default;

  std::size_t word_count() const { return boundaries.size() + 1; }
  /// (start, end) spans of the induced words.
  std::vector<std::pair<std::int32_t, std::int32_t>> spans(int n) const;
  /// Reflection through the sentence midpoint: boundary b -> n - b.
  Segmentation mirrored(int n) const;
  /// Boundary-set union with another segmentation of the same sentence.
  Segmentation merged(const Segmentation& other) const;
};

/// Forward (or backward, on a reversed-sentence table) lattice pass.
/// alpha(t, k) is the log mass of the length-t prefix whose final k
/// characters form one word; prefix[t] = logsumexp_k alpha(t, k) with
/// prefix[0] = 0 as the base case.
struct LatticeResult {
  int n = 0;
  int t_max = 0;
  std::vector<double> alpha;   // (t-1) * t_max + (k-1), t in 1..n
  std::vector<double> prefix;  // n + 1 entries
  double log_marginal = 0.0;

  double alpha_at(int t, int k) const {
    return alpha[static_cast<std::size_t>(t - 1) * t_max + (k - 1)];
  }
};

LatticeResult forward_marginal(const SegmentScoreTable& scores);

/// Identical recurrence; named for tables computed on reversed sentences.
LatticeResult backward_marginal(const SegmentScoreTable& scores_bwd);

/// Highest-scoring segmentation under the length cap. Ties prefer the
/// longer final word at each cell, which makes the result deterministic.
std::pair<Segmentation, double> viterbi(const SegmentScoreTable& scores);

/// Decodes over the per-segment geometric mean of forward and (position-
/// mirrored) backward scores.
Segmentation sgb_a(const SegmentScoreTable& scores_fwd,
                   const SegmentScoreTable& scores_bwd);

/// Union of the forward Viterbi boundaries and the mirrored backward
/// Viterbi boundaries; refines both one-directional results.
Segmentation sgb_c(const SegmentScoreTable& scores_fwd,
                   const SegmentScoreTable& scores_bwd);

/// Enumeration oracles. Guarded to n <= 12.
double brute_force_marginal(const SegmentScoreTable& scores);
std::pair<Segmentation, double> brute_force_best(
    const SegmentScoreTable& scores);

/// logsumexp of two log-domain values.
double log_add(double a, double b);

/// Number of compositions of n into parts of size 1..t_max.
std::uint64_t composition_count(int n, int t_max);

}  // namespace seglm

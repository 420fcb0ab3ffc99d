#include "seglm/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace seglm {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_pair(const SegmentScoreTable& fwd, const SegmentScoreTable& bwd) {
  if (fwd.size() != bwd.size() || fwd.t_max() != bwd.t_max())
    throw LatticeError("forward/backward score tables disagree: " +
                       std::to_string(fwd.size()) + "x" +
                       std::to_string(fwd.t_max()) + " vs " +
                       std::to_string(bwd.size()) + "x" +
                       std::to_string(bwd.t_max()));
}

}  // namespace

double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

std::vector<std::pair<std::int32_t, std::int32_t>> Segmentation::spans(
    int n) const {
  std::vector<std::pair<std::int32_t, std::int32_t>> out;
  out.reserve(boundaries.size() + 1);
  std::int32_t prev = 0;
  for (std::int32_t b : boundaries) {
    out.emplace_back(prev, b);
    prev = b;
  }
  out.emplace_back(prev, n);
  return out;
}

Segmentation Segmentation::mirrored(int n) const {
  Segmentation out;
  out.boundaries.reserve(boundaries.size());
  for (auto it = boundaries.rbegin(); it != boundaries.rend(); ++it)
    out.boundaries.push_back(n - *it);
  return out;
}

Segmentation Segmentation::merged(const Segmentation& other) const {
  Segmentation out;
  out.boundaries.resize(boundaries.size() + other.boundaries.size());
  auto end = std::set_union(boundaries.begin(), boundaries.end(),
                            other.boundaries.begin(), other.boundaries.end(),
                            out.boundaries.begin());
  out.boundaries.erase(end, out.boundaries.end());
  return out;
}

LatticeResult forward_marginal(const SegmentScoreTable& scores) {
  const int n = scores.size();
  const int t_max = scores.t_max();
  LatticeResult r;
  r.n = n;
  r.t_max = t_max;
  r.alpha.assign(static_cast<std::size_t>(n) * t_max, kNegInf);
  r.prefix.assign(n + 1, kNegInf);
  r.prefix[0] = 0.0;  // empty prefix
  for (int t = 1; t <= n; ++t) {
    double acc = kNegInf;
    const int k_hi = std::min(t_max, t);
    for (int k = 1; k <= k_hi; ++k) {
      const double a = scores(t - k, k) + r.prefix[t - k];
      r.alpha[static_cast<std::size_t>(t - 1) * t_max + (k - 1)] = a;
      acc = log_add(acc, a);
    }
    r.prefix[t] = acc;
  }
  r.log_marginal = r.prefix[n];
  return r;
}

LatticeResult backward_marginal(const SegmentScoreTable& scores_bwd) {
  return forward_marginal(scores_bwd);
}

std::pair<Segmentation, double> viterbi(const SegmentScoreTable& scores) {
  const int n = scores.size();
  const int t_max = scores.t_max();
  std::vector<double> best(n + 1, kNegInf);
  std::vector<int> back(n + 1, 0);
  best[0] = 0.0;
  for (int t = 1; t <= n; ++t) {
    const int k_hi = std::min(t_max, t);
    for (int k = 1; k <= k_hi; ++k) {
      const double cand = scores(t - k, k) + best[t - k];
      // >= so that the longer final word wins ties.
      if (cand >= best[t]) {
        best[t] = cand;
        back[t] = k;
      }
    }
  }
  Segmentation seg;
  for (int t = n; t > 0; t -= back[t])
    if (t != n) seg.boundaries.push_back(t);
  std::reverse(seg.boundaries.begin(), seg.boundaries.end());
  return {std::move(seg), best[n]};
}

Segmentation sgb_a(const SegmentScoreTable& scores_fwd,
                   const SegmentScoreTable& scores_bwd) {
  check_pair(scores_fwd, scores_bwd);
  const int n = scores_fwd.size();
  SegmentScoreTable avg(n, scores_fwd.t_max());
  for (int start = 0; start < n; ++start) {
    for (int len = 1; len <= avg.max_len_at(start); ++len) {
      // Geometric mean: the backward table indexes the reversed sentence,
      // so segment [start, start+len) lives at start' = n - start - len.
      avg.at(start, len) = 0.5 * (scores_fwd(start, len) +
                                  scores_bwd(n - start - len, len));
    }
  }
  return viterbi(avg).first;
}

Segmentation sgb_c(const SegmentScoreTable& scores_fwd,
                   const SegmentScoreTable& scores_bwd) {
  check_pair(scores_fwd, scores_bwd);
  const Segmentation fwd = viterbi(scores_fwd).first;
  const Segmentation bwd = viterbi(scores_bwd).first;
  return fwd.merged(bwd.mirrored(scores_fwd.size()));
}

namespace {

constexpr int kBruteForceLimit = 12;

void enumerate_rec(const SegmentScoreTable& scores, int pos, double acc,
                   std::vector<std::int32_t>& cuts,
                   const std::function<void(const std::vector<std::int32_t>&,
                                            double)>& visit) {
  const int n = scores.size();
  if (pos == n) {
    visit(cuts, acc);
    return;
  }
  const int k_hi = scores.max_len_at(pos);
  for (int len = 1; len <= k_hi; ++len) {
    if (pos + len < n) cuts.push_back(pos + len);
    enumerate_rec(scores, pos + len, acc + scores(pos, len), cuts, visit);
    if (pos + len < n) cuts.pop_back();
  }
}

void check_brute_force_size(const SegmentScoreTable& scores) {
  if (scores.size() > kBruteForceLimit)
    throw LatticeError(
        "brute-force enumeration refused for n = " +
        std::to_string(scores.size()) + " (limit " +
        std::to_string(kBruteForceLimit) + ")");
}

/// Tie order used by viterbi, expressed on whole segmentations: prefer the
/// longer final word, then recurse on the remaining prefix.
bool tie_prefers(const std::vector<std::int32_t>& cand,
                 const std::vector<std::int32_t>& best, int n) {
  int cand_end = n, best_end = n;
  auto ci = cand.rbegin();
  auto bi = best.rbegin();
  while (true) {
    const int cand_start = ci == cand.rend() ? 0 : *ci;
    const int best_start = bi == best.rend() ? 0 : *bi;
    if (cand_end - cand_start != best_end - best_start)
      return cand_end - cand_start > best_end - best_start;
    if (cand_start == 0 && best_start == 0) return false;  // identical
    cand_end = cand_start;
    best_end = best_start;
    ++ci;
    ++bi;
  }
}

}  // namespace

double brute_force_marginal(const SegmentScoreTable& scores) {
  check_brute_force_size(scores);
  std::vector<double> terms;
  std::vector<std::int32_t> cuts;
  enumerate_rec(scores, 0, 0.0, cuts,
                [&](const std::vector<std::int32_t>&, double total) {
                  terms.push_back(total);
                });
  double acc = kNegInf;
  for (double t : terms) acc = log_add(acc, t);
  return acc;
}

std::pair<Segmentation, double> brute_force_best(
    const SegmentScoreTable& scores) {
  check_brute_force_size(scores);
  Segmentation best;
  double best_score = kNegInf;
  bool have = false;
  std::vector<std::int32_t> cuts;
  enumerate_rec(scores, 0, 0.0, cuts,
                [&](const std::vector<std::int32_t>& c, double total) {
                  if (!have || total > best_score ||
                      (total == best_score &&
                       tie_prefers(c, best.boundaries, scores.size()))) {
                    best.boundaries = c;
                    best_score = total;
                    have = true;
                  }
                });
  return {std::move(best), best_score};
}

std::uint64_t composition_count(int n, int t_max) {
  std::vector<std::uint64_t> ways(n + 1, 0);
  ways[0] = 1;
  for (int t = 1; t <= n; ++t)
    for (int k = 1; k <= std::min(t_max, t); ++k) ways[t] += ways[t - k];
  return ways[n];
}

}  // namespace seglm

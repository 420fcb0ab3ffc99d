#include "seglm/evaluator.hpp"

#include <algorithm>
#include <map>

namespace seglm {

namespace {

std::map<std::int32_t, std::int32_t> word_starts(const Segmentation& seg,
                                                 int n) {
  std::map<std::int32_t, std::int32_t> starts;
  for (const auto& [b, e] : seg.spans(n)) starts[b] = e;
  return starts;
}

}  // namespace

std::vector<int> SegmentedText::lengths() const {
  std::vector<int> out;
  out.reserve(sentences.size());
  for (const auto& s : sentences) out.push_back(static_cast<int>(s.size()));
  return out;
}

EvalReport word_f1(const std::vector<int>& lengths,
                   const std::vector<Segmentation>& gold,
                   const std::vector<Segmentation>& pred) {
  if (gold.size() != pred.size() || gold.size() != lengths.size())
    throw EvalError("gold and prediction have different sentence counts: " +
                    std::to_string(gold.size()) + " vs " +
                    std::to_string(pred.size()));
  EvalReport report;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const int n = lengths[i];
    if ((!gold[i].boundaries.empty() && gold[i].boundaries.back() >= n) ||
        (!pred[i].boundaries.empty() && pred[i].boundaries.back() >= n))
      throw EvalError("segmentation exceeds sentence " + std::to_string(i + 1));
    const auto gold_spans = gold[i].spans(n);
    const auto pred_spans = pred[i].spans(n);
    report.gold_words += gold_spans.size();
    report.pred_words += pred_spans.size();
    // Both span lists are sorted; count exact (start, end) matches.
    std::size_t gi = 0, pi = 0;
    while (gi < gold_spans.size() && pi < pred_spans.size()) {
      if (gold_spans[gi] == pred_spans[pi]) {
        ++report.correct_words;
        ++gi;
        ++pi;
      } else if (gold_spans[gi].second <= pred_spans[pi].second) {
        ++gi;
      } else {
        ++pi;
      }
    }
  }
  if (report.pred_words > 0)
    report.precision = static_cast<double>(report.correct_words) /
                       static_cast<double>(report.pred_words);
  if (report.gold_words > 0)
    report.recall = static_cast<double>(report.correct_words) /
                    static_cast<double>(report.gold_words);
  if (report.precision + report.recall > 0)
    report.f1 = 2.0 * report.precision * report.recall /
                (report.precision + report.recall);
  return report;
}

Lexicon gold_lexicon(const std::vector<std::u32string>& sentences,
                     const std::vector<Segmentation>& gold) {
  if (sentences.size() != gold.size())
    throw EvalError("lexicon: sentence/segmentation count mismatch");
  Lexicon lexicon;
  for (std::size_t i = 0; i < sentences.size(); ++i)
    for (const auto& [b, e] :
         gold[i].spans(static_cast<int>(sentences[i].size())))
      lexicon.insert(sentences[i].substr(b, e - b));
  return lexicon;
}

namespace {

struct SentenceView {
  const std::u32string& text;
  std::map<std::int32_t, std::int32_t> gold_starts;
  std::map<std::int32_t, std::int32_t> pred_starts;

  std::int32_t gold_end(std::int32_t start) const {
    auto it = gold_starts.find(start);
    return it == gold_starts.end() ? -1 : it->second;
  }
  std::int32_t pred_end(std::int32_t start) const {
    auto it = pred_starts.find(start);
    return it == pred_starts.end() ? -1 : it->second;
  }
  std::u32string span(std::int32_t b, std::int32_t e) const {
    return text.substr(b, e - b);
  }
};

/// xy z vs x yz anchored at `pos`, either orientation. Returns the region
/// end or -1.
std::int32_t match_overlap(const SentenceView& s, const Lexicon& lexicon,
                           std::int32_t pos) {
  const std::int32_t ge = s.gold_end(pos);
  const std::int32_t pe = s.pred_end(pos);
  if (ge < 0 || pe < 0 || ge == pe) return -1;
  // shorter first word side provides x, the longer provides xy
  const bool gold_long = ge > pe;
  const std::int32_t j = gold_long ? pe : ge;  // end of x
  const std::int32_t k = gold_long ? ge : pe;  // end of xy
  const std::int32_t next_long = gold_long ? s.gold_end(k) : s.pred_end(k);
  const std::int32_t next_short = gold_long ? s.pred_end(j) : s.gold_end(j);
  if (next_long < 0 || next_short < 0 || next_long != next_short) return -1;
  const std::int32_t l = next_long;  // both sides close ranks at l
  if (!lexicon.contains(s.span(pos, k))) return -1;  // xy
  if (!lexicon.contains(s.span(j, l))) return -1;    // yz
  return l;
}

/// gold xy vs pred x y (or merged the other way) anchored at `pos`.
std::int32_t match_combination(const SentenceView& s, const Lexicon& lexicon,
                               std::int32_t pos) {
  const std::int32_t ge = s.gold_end(pos);
  const std::int32_t pe = s.pred_end(pos);
  if (ge < 0 || pe < 0 || ge == pe) return -1;
  const bool split = ge > pe;  // prediction cut the gold word
  const std::int32_t j = split ? pe : ge;
  const std::int32_t k = split ? ge : pe;
  // the short side must rejoin in exactly two words
  const std::int32_t second = split ? s.pred_end(j) : s.gold_end(j);
  if (second != k) return -1;
  if (!lexicon.contains(s.span(pos, j))) return -1;  // x
  if (!lexicon.contains(s.span(j, k))) return -1;    // y
  if (!lexicon.contains(s.span(pos, k))) return -1;  // xy
  return k;
}

/// First offset > pos where both sides agree on a word ending (or n).
std::int32_t next_agreement(const SentenceView& s, std::int32_t pos,
                            std::int32_t n) {
  std::int32_t g = pos, p = pos;
  while (g != p || g == pos) {
    if (g <= p)
      g = s.gold_end(g);
    else
      p = s.pred_end(p);
    if (g < 0 || p < 0) return n;
  }
  return g;
}

}  // namespace

AmbiguityReport ambiguity_analysis(const std::vector<std::u32string>& sentences,
                                   const std::vector<Segmentation>& gold,
                                   const std::vector<Segmentation>& pred,
                                   const Lexicon& lexicon) {
  if (sentences.size() != gold.size() || sentences.size() != pred.size())
    throw EvalError("ambiguity analysis: input counts differ");
  AmbiguityReport report;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const int n = static_cast<int>(sentences[i].size());
    SentenceView view{sentences[i], word_starts(gold[i], n),
                      word_starts(pred[i], n)};
    std::int32_t pos = 0;
    while (pos < n) {
      const std::int32_t ge = view.gold_end(pos);
      const std::int32_t pe = view.pred_end(pos);
      if (ge == pe && ge > 0) {
        pos = ge;  // agreement
        continue;
      }
      if (std::int32_t end = match_overlap(view, lexicon, pos); end > 0) {
        report.overlap_errors++;
        report.cases.push_back({i, pos, end, "overlap",
                                display_utf8(view.span(pos, end))});
        pos = end;
        continue;
      }
      if (std::int32_t end = match_combination(view, lexicon, pos); end > 0) {
        report.combination_errors++;
        report.cases.push_back({i, pos, end, "combination",
                                display_utf8(view.span(pos, end))});
        pos = end;
        continue;
      }
      const std::int32_t end = next_agreement(view, pos, n);
      report.residual_errors++;
      pos = end;
    }
  }
  return report;
}

namespace {

/// One line of a segmented file as symbols plus word-end offsets, before
/// setting-specific preprocessing.
struct RawLine {
  std::u32string text;
  std::vector<std::int32_t> word_ends;  // interior boundaries
};

void append_piece(SegmentedText& out, std::u32string&& text,
                  std::vector<std::int32_t>&& bounds) {
  if (text.empty()) return;
  Segmentation seg;
  seg.boundaries = std::move(bounds);
  out.sentences.push_back(std::move(text));
  out.segs.push_back(std::move(seg));
}

}  // namespace

SegmentedText read_segmented(const std::filesystem::path& path,
                             const LoadOptions& opts) {
  const std::u32string data = read_utf8_file(path);
  SegmentedText out;
  for (const auto& line : split_lines(data)) {
    // Token boundaries become candidate word boundaries.
    RawLine raw;
    bool in_word = false;
    for (Codepoint cp : line) {
      if (is_space(cp)) {
        if (in_word)
          raw.word_ends.push_back(static_cast<std::int32_t>(raw.text.size()));
        in_word = false;
        continue;
      }
      raw.text.push_back(cp);
      in_word = true;
    }
    if (in_word)
      raw.word_ends.push_back(static_cast<std::int32_t>(raw.text.size()));
    if (raw.text.empty()) continue;
    if (!raw.word_ends.empty() &&
        raw.word_ends.back() == static_cast<std::int32_t>(raw.text.size()))
      raw.word_ends.pop_back();  // the final offset is implicit

    if (opts.setting == 1) {
      append_piece(out, std::move(raw.text), std::move(raw.word_ends));
      continue;
    }

    // Settings 3/4: punctuation splits pieces; setting 4 collapses
    // non-native runs (dropping boundaries inside a run).
    std::u32string piece;
    std::vector<std::int32_t> bounds;
    std::size_t next_end = 0;
    bool in_run = false;
    auto at_boundary = [&](std::size_t offset) {
      while (next_end < raw.word_ends.size() &&
             raw.word_ends[next_end] < static_cast<std::int32_t>(offset))
        ++next_end;
      return next_end < raw.word_ends.size() &&
             raw.word_ends[next_end] == static_cast<std::int32_t>(offset);
    };
    auto mark_boundary = [&] {
      if (!piece.empty() &&
          (bounds.empty() ||
           bounds.back() != static_cast<std::int32_t>(piece.size())))
        bounds.push_back(static_cast<std::int32_t>(piece.size()));
    };
    auto close_piece = [&] {
      if (!bounds.empty() &&
          bounds.back() == static_cast<std::int32_t>(piece.size()))
        bounds.pop_back();
      append_piece(out, std::move(piece), std::move(bounds));
      piece.clear();
      bounds.clear();
      in_run = false;
    };
    for (std::size_t idx = 0; idx < raw.text.size(); ++idx) {
      const Codepoint cp = raw.text[idx];
      if (at_boundary(idx) && !in_run) mark_boundary();
      if (is_punct(cp)) {
        close_piece();
        continue;
      }
      if (opts.setting == 4 && !opts.native.contains(cp)) {
        if (!in_run) {
          piece.push_back(kSpecialRune);
          in_run = true;
        }
        continue;
      }
      if (in_run) {
        in_run = false;
        if (at_boundary(idx)) mark_boundary();
      }
      piece.push_back(cp);
    }
    close_piece();
  }
  return out;
}

}  // namespace seglm

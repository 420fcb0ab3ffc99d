#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_set>
#include <vector>

#include "seglm/corpus.hpp"
#include "seglm/lattice.hpp"

namespace seglm {

class EvalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::uint64_t gold_words = 0;
  std::uint64_t pred_words = 0;
  std::uint64_t correct_words = 0;
};

struct AmbiguityCase {
  std::size_t sentence;  // 0-based sentence index
  std::int32_t begin;    // character span of the ambiguous region
  std::int32_t end;
  std::string kind;  // "combination" or "overlap"
  std::string text;  // UTF-8 of the region
};

struct AmbiguityReport {
  std::uint64_t combination_errors = 0;
  std::uint64_t overlap_errors = 0;
  std::uint64_t residual_errors = 0;  // disagreements matching neither pattern
  std::vector<AmbiguityCase> cases;
};

/// Exact-span word precision/recall/F1. `lengths[i]` is the character count
/// of sentence i; all three vectors must agree, else EvalError names the
/// offending sentence.
EvalReport word_f1(const std::vector<int>& lengths,
                   const std::vector<Segmentation>& gold,
                   const std::vector<Segmentation>& pred);

using Lexicon = std::unordered_set<std::u32string>;

/// Every distinct gold word.
Lexicon gold_lexicon(const std::vector<std::u32string>& sentences,
                     const std::vector<Segmentation>& gold);

/// Classifies each gold/pred disagreement region left-to-right as an
/// overlap ambiguity (xy z vs x yz with xy and yz in the lexicon), a
/// combination ambiguity (xy vs x y with x, y, xy in the lexicon), or a
/// residual. Overlap wins when a region matches both.
AmbiguityReport ambiguity_analysis(const std::vector<std::u32string>& sentences,
                                   const std::vector<Segmentation>& gold,
                                   const std::vector<Segmentation>& pred,
                                   const Lexicon& lexicon);

/// A whitespace-segmented text file as sentences plus boundary sets.
struct SegmentedText {
  std::vector<std::u32string> sentences;
  std::vector<Segmentation> segs;

  std::vector<int> lengths() const;
};

/// Reads a gold/prediction file. Under settings 3/4 the same preprocessing
/// as load_corpus applies: punctuation tokens split sentences (acting as
/// hard breaks) and non-native runs collapse to one placeholder symbol;
/// word boundaries falling inside a collapsed run are dropped.
SegmentedText read_segmented(const std::filesystem::path& path,
                             const LoadOptions& opts = {});

}  // namespace seglm

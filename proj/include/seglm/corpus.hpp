#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "seglm/text.hpp"

namespace seglm {

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A sentence as vocabulary-indexed characters, aligned back to the raw text.
/// `syms[i]` is the Unicode scalar behind `ids[i]` (kSpecialRune for a
/// replaced non-native run) and `raw[i]` its original UTF-8 bytes.
struct CharSequence {
  std::vector<std::int32_t> ids;
  std::vector<Codepoint> syms;
  std::vector<std::string> raw;

  std::size_t size() const { return ids.size(); }
  std::string raw_text() const;
};

/// Character vocabulary. Layout: observed characters in first-occurrence
/// order, then EOS, then the non-native placeholder and the unknown fallback
/// when present. The reserved symbols never occur inside a CharSequence.
struct Vocab {
  std::vector<Codepoint> symbols;
  std::int32_t eos_id = -1;
  std::int32_t special_id = -1;  // -1 when absent
  std::int32_t unk_id = -1;      // -1 when absent

  std::int32_t size() const { return static_cast<std::int32_t>(symbols.size()); }
  std::int32_t lookup(Codepoint cp) const;
  /// Printable form of a symbol (reserved ones as <EOS>, <SPX>, <UNK>).
  std::string symbol_text(std::int32_t id) const;

  std::unordered_map<Codepoint, std::int32_t> index;
};

struct CorpusStats {
  std::uint64_t word_types = 0;
  std::uint64_t word_tokens = 0;
  std::uint64_t char_types = 0;
  std::uint64_t char_tokens = 0;
};

struct LoadOptions {
  int setting = 1;  // 1: raw, 3: punctuation delimits, 4: 3 + placeholder runs
  ScriptRanges native = native_script("cjk");
};

/// Splits one already-decoded line into sentences under a preprocessing
/// setting. Whitespace is always dropped; under settings 3/4 punctuation
/// splits the line into separate sentences; under setting 4 every maximal
/// run of characters outside the native script becomes one placeholder
/// token. Ids are left unassigned (-1).
std::vector<CharSequence> preprocess_line(std::u32string_view line,
                                          const LoadOptions& opts);

/// Reads a UTF-8 text file (one sentence per line, LF or CRLF), applies the
/// preprocessing setting and assigns vocabulary ids consistent with
/// build_vocab over the returned corpus. Blank lines are skipped.
std::vector<CharSequence> load_corpus(const std::filesystem::path& path,
                                      const LoadOptions& opts = {});

/// First-occurrence vocabulary over a corpus: observed characters, then EOS,
/// then the placeholder if any sequence contains one (or force_special),
/// then an unknown-fallback symbol if add_unk.
Vocab build_vocab(std::span<const CharSequence> corpus,
                  bool force_special = false, bool add_unk = false);

/// Assigns ids in-place from an existing vocabulary. Unknown characters map
/// to the placeholder, else the unknown symbol, else raise CorpusError.
void assign_ids(CharSequence& seq, const Vocab& vocab);

/// Word/character type and token counts of a whitespace-segmented gold file.
CorpusStats corpus_stats(const std::filesystem::path& gold_path);

void save_vocab(const std::filesystem::path& path, const Vocab& vocab);
Vocab load_vocab(const std::filesystem::path& path);

/// Reads a whole file and decodes it; DecodeError offsets are file offsets.
std::u32string read_utf8_file(const std::filesystem::path& path);

/// Splits decoded text into lines, swallowing trailing '\r'.
std::vector<std::u32string> split_lines(std::u32string_view text);

}  // namespace seglm

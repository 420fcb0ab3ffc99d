#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace seglm {

using Codepoint = char32_t;

// Sentinel values above the Unicode scalar range; they can never collide
// with a decoded character.
inline constexpr Codepoint kSpecialRune = 0x110000;  // placeholder for a non-native run
inline constexpr Codepoint kEosRune = 0x110001;      // end-of-segment symbol
inline constexpr Codepoint kUnkRune = 0x110002;      // unknown-character fallback

class DecodeError : public std::runtime_error {
 public:
  DecodeError(std::string msg, std::size_t byte_offset)
      : std::runtime_error(std::move(msg)), byte_offset_(byte_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

/// Strict UTF-8 decode of a whole buffer. Rejects overlong forms, surrogates
/// and truncated sequences; the exception carries the offending byte offset.
std::u32string decode_utf8(std::string_view bytes);

std::string encode_utf8(std::u32string_view text);
std::string encode_utf8(Codepoint cp);

/// Like encode_utf8, but renders the reserved sentinels as their literal
/// tokens (<SPX>, <EOS>, <UNK>) so the result is always valid UTF-8.
std::string display_utf8(std::u32string_view text);

bool is_space(Codepoint cp);
bool is_punct(Codepoint cp);

/// Inclusive codepoint ranges describing the native script of a corpus.
struct ScriptRanges {
  std::vector<std::pair<Codepoint, Codepoint>> ranges;

  bool contains(Codepoint cp) const {
    for (const auto& [lo, hi] : ranges)
      if (cp >= lo && cp <= hi) return true;
    return false;
  }
};

/// Presets: "cjk" (Han ideographs), "thai", "latin".
ScriptRanges native_script(std::string_view name);

}  // namespace seglm

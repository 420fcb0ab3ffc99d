#include "seglm/text.hpp"

#include <array>

namespace seglm {

std::u32string decode_utf8(std::string_view bytes) {
  std::u32string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  const auto fail = [&](const char* what, std::size_t at) {
    throw DecodeError("invalid UTF-8 (" + std::string(what) + ") at byte " +
                          std::to_string(at),
                      at);
  };
  while (i < bytes.size()) {
    const auto b0 = static_cast<unsigned char>(bytes[i]);
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    }
    int len;
    char32_t cp;
    if ((b0 & 0xE0) == 0xC0) {
      len = 2;
      cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
      cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
      cp = b0 & 0x07;
    } else {
      fail("bad lead byte", i);
      return out;  // unreachable
    }
    if (i + len > bytes.size()) fail("truncated sequence", i);
    for (int k = 1; k < len; ++k) {
      const auto b = static_cast<unsigned char>(bytes[i + k]);
      if ((b & 0xC0) != 0x80) fail("bad continuation byte", i + k);
      cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr std::array<char32_t, 5> min_cp = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < min_cp[len]) fail("overlong encoding", i);
    if (cp >= 0xD800 && cp <= 0xDFFF) fail("surrogate codepoint", i);
    if (cp > 0x10FFFF) fail("codepoint out of range", i);
    out.push_back(cp);
    i += len;
  }
  return out;
}

std::string encode_utf8(Codepoint cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

std::string encode_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size() * 3);
  for (Codepoint cp : text) out += encode_utf8(cp);
  return out;
}

std::string display_utf8(std::u32string_view text) {
  std::string out;
  out.reserve(text.size() * 3);
  for (Codepoint cp : text) {
    if (cp == kSpecialRune)
      out += "<SPX>";
    else if (cp == kEosRune)
      out += "<EOS>";
    else if (cp == kUnkRune)
      out += "<UNK>";
    else
      out += encode_utf8(cp);
  }
  return out;
}

bool is_space(Codepoint cp) {
  switch (cp) {
    case U' ':
    case U'\t':
    case U'\r':
    case U'\n':
    case U'\v':
    case U'\f':
    case 0x00A0:  // no-break space
    case 0x3000:  // ideographic space
    case 0xFEFF:  // zero-width no-break space / BOM
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;  // en quad .. hair space
  }
}

bool is_punct(Codepoint cp) {
  // ASCII punctuation.
  if ((cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
      (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E))
    return true;
  // General punctuation (dashes, ellipsis, quotes), CJK symbols and
  // punctuation, fullwidth/halfwidth variants, vertical forms.
  static constexpr std::pair<Codepoint, Codepoint> ranges[] = {
      {0x2010, 0x2027}, {0x2030, 0x205E}, {0x3001, 0x3003}, {0x3008, 0x3011},
      {0x3014, 0x301F}, {0x30FB, 0x30FB}, {0xFE10, 0xFE19}, {0xFE30, 0xFE4F},
      {0xFE50, 0xFE6B}, {0xFF01, 0xFF0F}, {0xFF1A, 0xFF20}, {0xFF3B, 0xFF40},
      {0xFF5B, 0xFF65}, {0x00A1, 0x00A1}, {0x00B7, 0x00B7}, {0x00BF, 0x00BF},
  };
  for (const auto& [lo, hi] : ranges)
    if (cp >= lo && cp <= hi) return true;
  switch (cp) {
    case 0x3002:  // ideographic full stop (inside 3001..3003 already)
      return true;
    default:
      return false;
  }
}

ScriptRanges native_script(std::string_view name) {
  if (name == "cjk") {
    return ScriptRanges{{
        {0x3400, 0x4DBF},    // CJK extension A
        {0x4E00, 0x9FFF},    // CJK unified ideographs
        {0xF900, 0xFAFF},    // compatibility ideographs
        {0x20000, 0x2EBEF},  // extensions B..F
    }};
  }
  if (name == "thai") {
    return ScriptRanges{{{0x0E00, 0x0E7F}}};
  }
  if (name == "latin") {
    return ScriptRanges{{{U'A', U'Z'}, {U'a', U'z'}}};
  }
  throw std::invalid_argument("unknown native script: " + std::string(name));
}

}  // namespace seglm

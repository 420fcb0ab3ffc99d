#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "seglm/corpus.hpp"

using namespace seglm;

namespace {

std::filesystem::path write_temp(const std::string& name,
                                 const std::string& content) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path, std::ios::binary);
  out << content;
  return path;
}

}  // namespace

TEST_CASE("utf8 decode round trip and error reporting") {
  const std::string text = "a我б";
  CHECK(encode_utf8(decode_utf8(text)) == text);

  // 0xE6 opens a 3-byte sequence; 'x' is not a continuation byte.
  const std::string bad = std::string("ab") + '\xE6' + "xy";
  CHECK_THROWS_AS((void)decode_utf8(bad), DecodeError);
  try {
    (void)decode_utf8(bad);
  } catch (const DecodeError& e) {
    CHECK(e.byte_offset() == 3);
  }

  // A lead byte with too few bytes left reports the lead itself.
  const std::string truncated = std::string("ab") + '\xE6';
  try {
    (void)decode_utf8(truncated);
    CHECK(false);
  } catch (const DecodeError& e) {
    CHECK(e.byte_offset() == 2);
  }

  const std::string overlong = std::string(1, '\xC0') + '\x80';
  CHECK_THROWS_AS((void)decode_utf8(overlong), DecodeError);
}

TEST_CASE("setting 1 keeps each line whole, whitespace removed") {
  LoadOptions opts;
  const auto pieces = preprocess_line(decode_utf8("我从小学唱歌"), opts);
  REQUIRE(pieces.size() == 1);
  CHECK(pieces[0].size() == 6);
  CHECK(pieces[0].raw_text() == "我从小学唱歌");

  const auto spaced = preprocess_line(decode_utf8("我 从小 学"), opts);
  REQUIRE(spaced.size() == 1);
  CHECK(spaced[0].size() == 4);
  CHECK(spaced[0].raw_text() == "我从小学");
}

TEST_CASE("setting 3 splits at punctuation delimiters") {
  LoadOptions opts;
  opts.setting = 3;
  const auto pieces = preprocess_line(decode_utf8("你好，世界"), opts);
  REQUIRE(pieces.size() == 2);
  CHECK(pieces[0].raw_text() == "你好");
  CHECK(pieces[1].raw_text() == "世界");

  // Punctuation-only input vanishes.
  CHECK(preprocess_line(decode_utf8("，。！"), opts).empty());
}

TEST_CASE("setting 4 collapses non-native runs to one placeholder") {
  LoadOptions opts;
  opts.setting = 4;
  const auto pieces = preprocess_line(decode_utf8("共ABC123节"), opts);
  REQUIRE(pieces.size() == 1);
  const CharSequence& seq = pieces[0];
  REQUIRE(seq.size() == 3);
  CHECK(seq.syms[0] == U'共');
  CHECK(seq.syms[1] == kSpecialRune);
  CHECK(seq.syms[2] == U'节');
  CHECK(seq.raw[1] == "ABC123");
  CHECK(seq.raw_text() == "共ABC123节");
}

TEST_CASE("setting monotonicity: setting 3 output is setting 1 minus punctuation") {
  const std::string line = "你好，世界。abc！";
  LoadOptions s1;
  LoadOptions s3;
  s3.setting = 3;
  std::multiset<Codepoint> chars1, chars3;
  for (const auto& p : preprocess_line(decode_utf8(line), s1))
    for (auto c : p.syms)
      if (!is_punct(c)) chars1.insert(c);
  for (const auto& p : preprocess_line(decode_utf8(line), s3))
    for (auto c : p.syms) chars3.insert(c);
  CHECK(chars1 == chars3);
}

TEST_CASE("build_vocab is first-occurrence ordered with trailing EOS") {
  std::vector<CharSequence> corpus = preprocess_line(U"aba", LoadOptions{});
  const Vocab vocab = build_vocab(corpus);
  CHECK(vocab.size() == 3);
  CHECK(vocab.symbols[0] == U'a');
  CHECK(vocab.symbols[1] == U'b');
  CHECK(vocab.eos_id == 2);
  CHECK(vocab.special_id == -1);

  // Idempotent and order-stable.
  const Vocab again = build_vocab(corpus);
  CHECK(again.symbols == vocab.symbols);
  CHECK(again.eos_id == vocab.eos_id);
}

TEST_CASE("build_vocab counts distinct characters across sentences") {
  std::vector<CharSequence> corpus;
  for (const auto& line : {U"我从小学", U"我从小"}) {
    auto pieces = preprocess_line(line, LoadOptions{});
    corpus.insert(corpus.end(), pieces.begin(), pieces.end());
  }
  const Vocab vocab = build_vocab(corpus);
  CHECK(vocab.size() == 5);  // 4 characters + EOS
}

TEST_CASE("load_corpus assigns ids consistent with build_vocab") {
  const auto path = write_temp("seglm_corpus_a.txt", "aba\nbc\n\ncab\n");
  const auto corpus = load_corpus(path);
  REQUIRE(corpus.size() == 3);  // blank line skipped
  const Vocab vocab = build_vocab(corpus);
  for (const auto& seq : corpus) {
    for (std::size_t i = 0; i < seq.size(); ++i) {
      CHECK(seq.ids[i] == vocab.lookup(seq.syms[i]));
      CHECK(seq.ids[i] < vocab.size());
      CHECK(seq.ids[i] != vocab.eos_id);
    }
  }
  std::filesystem::remove(path);
}

TEST_CASE("load_corpus on an empty file returns an empty list") {
  const auto path = write_temp("seglm_corpus_empty.txt", "");
  CHECK(load_corpus(path).empty());
  std::filesystem::remove(path);
}

TEST_CASE("load_corpus reports the byte offset of bad encoding") {
  const auto path =
      write_temp("seglm_corpus_bad.txt", std::string("ok\n") + '\xFF');
  CHECK_THROWS_AS((void)load_corpus(path), DecodeError);
  try {
    (void)load_corpus(path);
  } catch (const DecodeError& e) {
    CHECK(e.byte_offset() == 3);
  }
  std::filesystem::remove(path);
}

TEST_CASE("round trip: raw spans reproduce the line minus whitespace") {
  LoadOptions opts;
  for (const char* line : {"我 从小 学 唱歌", "a b  c", "唱歌"}) {
    std::string expect;
    for (const char* p = line; *p; ++p)
      if (*p != ' ') expect.push_back(*p);
    std::string got;
    for (const auto& piece : preprocess_line(decode_utf8(line), opts))
      got += piece.raw_text();
    CHECK(got == expect);
  }
}

TEST_CASE("corpus_stats counts types and tokens") {
  const auto path = write_temp("seglm_stats.txt", "我 从小 学\n我 学\n");
  const CorpusStats stats = corpus_stats(path);
  CHECK(stats.word_types == 3);
  CHECK(stats.word_tokens == 5);
  CHECK(stats.char_types == 4);  // 我, 从, 小, 学
  CHECK(stats.char_tokens == 6);
  std::filesystem::remove(path);
}

TEST_CASE("corpus_stats of an empty file is all zeros") {
  const auto path = write_temp("seglm_stats_empty.txt", "");
  const CorpusStats stats = corpus_stats(path);
  CHECK(stats.word_types == 0);
  CHECK(stats.word_tokens == 0);
  CHECK(stats.char_types == 0);
  CHECK(stats.char_tokens == 0);
  std::filesystem::remove(path);
}

TEST_CASE("vocab files round trip including reserved symbols") {
  LoadOptions opts;
  opts.setting = 4;
  auto corpus = preprocess_line(decode_utf8("共ABC节"), opts);
  const Vocab vocab = build_vocab(corpus, /*force_special=*/true,
                                  /*add_unk=*/true);
  const auto path = std::filesystem::temp_directory_path() / "seglm_vocab.txt";
  save_vocab(path, vocab);
  const Vocab loaded = load_vocab(path);
  CHECK(loaded.symbols == vocab.symbols);
  CHECK(loaded.eos_id == vocab.eos_id);
  CHECK(loaded.special_id == vocab.special_id);
  CHECK(loaded.unk_id == vocab.unk_id);
  std::filesystem::remove(path);
}

TEST_CASE("assign_ids falls back to placeholder then unknown") {
  CharSequence seq;
  seq.ids = {-1};
  seq.syms = {U'z'};
  seq.raw = {"z"};

  std::vector<CharSequence> base = preprocess_line(U"ab", LoadOptions{});
  SUBCASE("no fallback available") {
    const Vocab vocab = build_vocab(base);
    CHECK_THROWS_AS(assign_ids(seq, vocab), CorpusError);
  }
  SUBCASE("placeholder wins when present") {
    const Vocab vocab = build_vocab(base, /*force_special=*/true);
    assign_ids(seq, vocab);
    CHECK(seq.ids[0] == vocab.special_id);
  }
  SUBCASE("unknown symbol as last resort") {
    const Vocab vocab = build_vocab(base, false, /*add_unk=*/true);
    assign_ids(seq, vocab);
    CHECK(seq.ids[0] == vocab.unk_id);
  }
}

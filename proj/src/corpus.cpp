#include "seglm/corpus.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace seglm {

std::string CharSequence::raw_text() const {
  std::string out;
  for (const auto& r : raw) out += r;
  return out;
}

std::int32_t Vocab::lookup(Codepoint cp) const {
  auto it = index.find(cp);
  return it == index.end() ? -1 : it->second;
}

std::string Vocab::symbol_text(std::int32_t id) const {
  const Codepoint cp = symbols.at(static_cast<std::size_t>(id));
  if (cp == kEosRune) return "<EOS>";
  if (cp == kSpecialRune) return "<SPX>";
  if (cp == kUnkRune) return "<UNK>";
  return encode_utf8(cp);
}

std::u32string read_utf8_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return decode_utf8(buf.str());
}

std::vector<std::u32string> split_lines(std::u32string_view text) {
  std::vector<std::u32string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find(U'\n', start);
    if (nl == std::u32string_view::npos) {
      if (start < text.size()) {
        std::u32string_view line = text.substr(start);
        if (!line.empty() && line.back() == U'\r') line.remove_suffix(1);
        lines.emplace_back(line);
      }
      break;
    }
    std::u32string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == U'\r') line.remove_suffix(1);
    lines.emplace_back(line);
    start = nl + 1;
  }
  return lines;
}

namespace {

void flush_special_run(CharSequence& seq, std::u32string& run) {
  if (run.empty()) return;
  seq.ids.push_back(-1);
  seq.syms.push_back(kSpecialRune);
  seq.raw.push_back(encode_utf8(run));
  run.clear();
}

void push_char(CharSequence& seq, Codepoint cp) {
  seq.ids.push_back(-1);
  seq.syms.push_back(cp);
  seq.raw.push_back(encode_utf8(cp));
}

}  // namespace

std::vector<CharSequence> preprocess_line(std::u32string_view line,
                                          const LoadOptions& opts) {
  if (opts.setting != 1 && opts.setting != 3 && opts.setting != 4)
    throw CorpusError("unsupported preprocessing setting " +
                      std::to_string(opts.setting));

  std::vector<CharSequence> out;
  CharSequence cur;
  std::u32string run;  // pending non-native run (setting 4)
  const bool split_punct = opts.setting >= 3;
  const bool replace_foreign = opts.setting == 4;

  auto close_sentence = [&] {
    flush_special_run(cur, run);
    if (!cur.ids.empty()) out.push_back(std::move(cur));
    cur = CharSequence{};
  };

  for (Codepoint cp : line) {
    // Whitespace is deleted before anything else looks at the text, so a
    // non-native run continues across it.
    if (is_space(cp)) continue;
    if (split_punct && is_punct(cp)) {
      close_sentence();
      continue;
    }
    if (replace_foreign && !opts.native.contains(cp)) {
      run.push_back(cp);
      continue;
    }
    flush_special_run(cur, run);
    push_char(cur, cp);
  }
  close_sentence();
  return out;
}

std::vector<CharSequence> load_corpus(const std::filesystem::path& path,
                                      const LoadOptions& opts) {
  const std::u32string text = read_utf8_file(path);
  std::vector<CharSequence> corpus;
  for (const auto& line : split_lines(text)) {
    auto pieces = preprocess_line(line, opts);
    for (auto& p : pieces) corpus.push_back(std::move(p));
  }
  const Vocab vocab =
      build_vocab(corpus, /*force_special=*/opts.setting == 4);
  for (auto& seq : corpus) assign_ids(seq, vocab);
  return corpus;
}

Vocab build_vocab(std::span<const CharSequence> corpus, bool force_special,
                  bool add_unk) {
  Vocab vocab;
  bool saw_special = false;
  for (const auto& seq : corpus) {
    for (Codepoint cp : seq.syms) {
      if (cp == kSpecialRune) {
        saw_special = true;
        continue;
      }
      if (vocab.index.emplace(cp, vocab.size()).second)
        vocab.symbols.push_back(cp);
    }
  }
  vocab.eos_id = vocab.size();
  vocab.symbols.push_back(kEosRune);
  vocab.index.emplace(kEosRune, vocab.eos_id);
  if (saw_special || force_special) {
    vocab.special_id = vocab.size();
    vocab.symbols.push_back(kSpecialRune);
    vocab.index.emplace(kSpecialRune, vocab.special_id);
  }
  if (add_unk) {
    vocab.unk_id = vocab.size();
    vocab.symbols.push_back(kUnkRune);
    vocab.index.emplace(kUnkRune, vocab.unk_id);
  }
  return vocab;
}

void assign_ids(CharSequence& seq, const Vocab& vocab) {
  for (std::size_t i = 0; i < seq.syms.size(); ++i) {
    std::int32_t id = vocab.lookup(seq.syms[i]);
    if (id < 0) id = vocab.special_id;
    if (id < 0) id = vocab.unk_id;
    if (id < 0)
      throw CorpusError("character '" + seq.raw[i] +
                        "' is not in the vocabulary and no placeholder or "
                        "unknown symbol is available");
    seq.ids[i] = id;
  }
}

CorpusStats corpus_stats(const std::filesystem::path& gold_path) {
  const std::u32string text = read_utf8_file(gold_path);
  CorpusStats stats;
  std::set<std::u32string> word_types;
  std::set<Codepoint> char_types;
  std::u32string word;
  auto flush_word = [&] {
    if (word.empty()) return;
    ++stats.word_tokens;
    stats.char_tokens += word.size();
    for (Codepoint cp : word) char_types.insert(cp);
    word_types.insert(word);
    word.clear();
  };
  for (Codepoint cp : text) {
    if (is_space(cp))
      flush_word();
    else
      word.push_back(cp);
  }
  flush_word();
  stats.word_types = word_types.size();
  stats.char_types = char_types.size();
  return stats;
}

void save_vocab(const std::filesystem::path& path, const Vocab& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorpusError("cannot write vocab file: " + path.string());
  for (std::int32_t id = 0; id < vocab.size(); ++id)
    out << vocab.symbol_text(id) << '\n';
}

Vocab load_vocab(const std::filesystem::path& path) {
  const std::u32string text = read_utf8_file(path);
  Vocab vocab;
  for (const auto& line : split_lines(text)) {
    Codepoint cp;
    if (line == U"<EOS>") {
      cp = kEosRune;
      vocab.eos_id = vocab.size();
    } else if (line == U"<SPX>") {
      cp = kSpecialRune;
      vocab.special_id = vocab.size();
    } else if (line == U"<UNK>") {
      cp = kUnkRune;
      vocab.unk_id = vocab.size();
    } else if (line.size() == 1) {
      cp = line[0];
    } else {
      throw CorpusError("vocab file " + path.string() +
                        ": line is neither a single character nor a "
                        "reserved token: '" +
                        encode_utf8(line) + "'");
    }
    vocab.index.emplace(cp, vocab.size());
    vocab.symbols.push_back(cp);
  }
  if (vocab.eos_id < 0)
    throw CorpusError("vocab file " + path.string() + " lacks <EOS>");
  return vocab;
}

}  // namespace seglm

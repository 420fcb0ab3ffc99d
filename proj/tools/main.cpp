#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <thread>

#include "manifest.hpp"
#include "seglm/checkpoint.hpp"
#include "seglm/evaluator.hpp"
#include "seglm/trainer.hpp"

namespace fs = std::filesystem;
using namespace seglm;

namespace {

// Exit codes: 0 success, 1 runtime or numeric failure, 2 usage/path errors.
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CommonOpts {
  int setting = 1;
  std::string native = "cjk";

  LoadOptions load_options() const {
    LoadOptions opts;
    opts.setting = setting;
    opts.native = native_script(native);
    return opts;
  }
};

void add_setting_flags(CLI::App* cmd, CommonOpts& common) {
  cmd->add_option("--setting", common.setting, "Preprocessing setting")
      ->check(CLI::IsMember({1, 3, 4}))
      ->capture_default_str();
  cmd->add_option("--native-script", common.native,
                  "Native script for setting 4 (cjk, thai, latin)")
      ->check(CLI::IsMember({"cjk", "thai", "latin"}))
      ->capture_default_str();
}

std::string render_words(const CharSequence& seq, const Segmentation& seg) {
  std::string out;
  const auto spans = seg.spans(static_cast<int>(seq.size()));
  for (std::size_t w = 0; w < spans.size(); ++w) {
    if (w) out += ' ';
    for (std::int32_t i = spans[w].first; i < spans[w].second; ++i)
      out += seq.raw[i];
  }
  return out;
}

Segmentation decode_piece(const ModelParams& params, const CharSequence& seq,
                          const std::string& decoder, int t_max) {
  const auto [fwd, bwd] = score_bidi(params, seq, t_max);
  if (decoder == "sgb-a") return sgb_a(fwd, bwd);
  if (decoder == "sgb-c") return sgb_c(fwd, bwd);
  if (decoder == "fwd") return viterbi(fwd).first;
  if (decoder == "bwd")
    return viterbi(bwd).first.mirrored(static_cast<int>(seq.size()));
  throw std::invalid_argument("unknown decoder: " + decoder);
}

std::vector<Segmentation> decode_all(const ModelParams& params,
                                     const std::vector<CharSequence>& pieces,
                                     const std::string& decoder, int t_max,
                                     int threads) {
  std::vector<Segmentation> segs(pieces.size());
  const int workers = std::max(
      1, std::min<int>(threads, static_cast<int>(pieces.size())));
  auto run = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      segs[i] = decode_piece(params, pieces[i], decoder, t_max);
  };
  if (workers == 1) {
    run(0, pieces.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t per = (pieces.size() + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::size_t lo = w * per;
      const std::size_t hi = std::min(pieces.size(), lo + per);
      if (lo < hi) pool.emplace_back(run, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  return segs;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string corpus;
  std::string out_dir;
  CommonOpts common;
  TrainConfig cfg;
  bool add_unk = false;
};

int run_train(const TrainArgs& args, const std::vector<std::string>& argv) {
  const fs::path out_dir(args.out_dir);
  fs::create_directories(out_dir);

  const LoadOptions load_opts = args.common.load_options();
  std::vector<CharSequence> corpus = load_corpus(args.corpus, load_opts);
  if (corpus.empty()) {
    std::cerr << "seglm train: corpus is empty after preprocessing\n";
    return kExitRuntime;
  }
  const Vocab vocab = build_vocab(corpus, args.common.setting == 4,
                                  args.add_unk);
  for (auto& seq : corpus) assign_ids(seq, vocab);
  save_vocab(out_dir / "vocab.txt", vocab);

  TrainConfig cfg = args.cfg;
  cfg.checkpoint_dir = out_dir;
  const auto [params, report] = train(corpus, vocab, cfg);
  save_checkpoint(out_dir / "model.bin", params);
  write_train_report_csv(out_dir / "train_report.csv", report);

  cli::RunManifest manifest;
  manifest.command = "train";
  manifest.argv = argv;
  manifest.settings = {
      {"setting", std::to_string(args.common.setting)},
      {"native_script", args.common.native},
      {"t_max", std::to_string(cfg.t_max)},
      {"epochs", std::to_string(cfg.epochs)},
      {"lr", std::to_string(cfg.lr)},
      {"batch_size", std::to_string(cfg.batch_size)},
      {"embed_dim", std::to_string(cfg.embed_dim)},
      {"hidden_dim", std::to_string(cfg.hidden_dim)},
      {"threads", std::to_string(cfg.threads)},
      {"shared_output", cfg.shared_output ? "true" : "false"},
      {"lm_zero_cell", cfg.lm_zero_cell ? "true" : "false"},
      {"add_unk", args.add_unk ? "true" : "false"},
  };
  manifest.inputs = {args.corpus};
  manifest.outputs = {(out_dir / "model.bin").string(),
                      (out_dir / "vocab.txt").string(),
                      (out_dir / "train_report.csv").string()};
  manifest.checkpoint = (out_dir / "model.bin").string();
  manifest.seed = cfg.seed;
  manifest.write(out_dir / "manifest.json");

  for (std::size_t e = 0; e < report.epoch_loss.size(); ++e)
    std::cout << "epoch " << (e + 1) << " mean_loss "
              << report.epoch_loss[e] << " (" << report.epoch_seconds[e]
              << "s)\n";
  if (report.diverged) {
    std::cerr << "seglm train: loss diverged in epoch "
              << report.diverged_epoch
              << "; last finite checkpoint retained\n";
    return kExitRuntime;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// segment
// ---------------------------------------------------------------------------

struct SegmentArgs {
  std::string checkpoint;
  std::string vocab;
  std::string input;
  std::string output;  // empty = stdout
  std::string decoder = "sgb-a";
  int t_max = 3;
  int threads = 1;
  CommonOpts common;
};

int run_segment(const SegmentArgs& args, const std::vector<std::string>& argv) {
  const fs::path vocab_path = args.vocab.empty()
                                  ? fs::path(args.checkpoint).parent_path() /
                                        "vocab.txt"
                                  : fs::path(args.vocab);
  const Vocab vocab = load_vocab(vocab_path);
  ModelParams params = load_checkpoint(args.checkpoint, vocab.eos_id);
  if (params.vocab_size != vocab.size())
    throw CheckpointError("checkpoint vocabulary size " +
                          std::to_string(params.vocab_size) +
                          " does not match vocab file (" +
                          std::to_string(vocab.size()) + ")");

  const LoadOptions load_opts = args.common.load_options();
  const std::u32string text = read_utf8_file(args.input);
  std::vector<CharSequence> pieces;
  for (const auto& line : split_lines(text))
    for (auto& piece : preprocess_line(line, load_opts)) {
      assign_ids(piece, vocab);
      pieces.push_back(std::move(piece));
    }

  const std::vector<Segmentation> segs =
      decode_all(params, pieces, args.decoder, args.t_max, args.threads);

  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!args.output.empty()) {
    file.open(args.output, std::ios::binary);
    if (!file)
      throw std::runtime_error("cannot write output: " + args.output);
    out = &file;
  }
  for (std::size_t i = 0; i < pieces.size(); ++i)
    *out << render_words(pieces[i], segs[i]) << '\n';

  if (!args.output.empty()) {
    cli::RunManifest manifest;
    manifest.command = "segment";
    manifest.argv = argv;
    manifest.settings = {{"decoder", args.decoder},
                         {"t_max", std::to_string(args.t_max)},
                         {"setting", std::to_string(args.common.setting)},
                         {"native_script", args.common.native}};
    manifest.inputs = {args.input, vocab_path.string()};
    manifest.outputs = {args.output};
    manifest.checkpoint = args.checkpoint;
    manifest.write(fs::path(args.output).string() + ".manifest.json");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// eval / analyze / stats
// ---------------------------------------------------------------------------

struct PairArgs {
  std::string gold;
  std::string pred;
  std::string out_dir;
  CommonOpts common;
};

int run_eval(const PairArgs& args, const std::vector<std::string>& argv) {
  const LoadOptions opts = args.common.load_options();
  const SegmentedText gold = read_segmented(args.gold, opts);
  const SegmentedText pred = read_segmented(args.pred, opts);
  if (gold.sentences != pred.sentences) {
    for (std::size_t i = 0;
         i < std::min(gold.sentences.size(), pred.sentences.size()); ++i)
      if (gold.sentences[i] != pred.sentences[i])
        throw EvalError("gold and prediction disagree on the text of "
                        "sentence " +
                        std::to_string(i + 1));
    throw EvalError("gold and prediction have different sentence counts");
  }
  const EvalReport r = word_f1(gold.lengths(), gold.segs, pred.segs);
  std::cout << "precision " << r.precision << "\nrecall " << r.recall
            << "\nf1 " << r.f1 << "\ngold_words " << r.gold_words
            << "\npred_words " << r.pred_words << "\ncorrect_words "
            << r.correct_words << '\n';
  if (!args.out_dir.empty()) {
    const fs::path dir(args.out_dir);
    fs::create_directories(dir);
    {
      std::ofstream csv(dir / "eval.csv", std::ios::binary);
      csv << "precision,recall,f1,gold_words,pred_words,correct_words\n"
          << r.precision << ',' << r.recall << ',' << r.f1 << ','
          << r.gold_words << ',' << r.pred_words << ',' << r.correct_words
          << '\n';
    }
    cli::RunManifest manifest;
    manifest.command = "eval";
    manifest.argv = argv;
    manifest.settings = {{"setting", std::to_string(args.common.setting)}};
    manifest.inputs = {args.gold, args.pred};
    manifest.outputs = {(dir / "eval.csv").string()};
    manifest.write(dir / "manifest.json");
  }
  return 0;
}

int run_analyze(const PairArgs& args, const std::vector<std::string>& argv) {
  const LoadOptions opts = args.common.load_options();
  const SegmentedText gold = read_segmented(args.gold, opts);
  const SegmentedText pred = read_segmented(args.pred, opts);
  const Lexicon lexicon = gold_lexicon(gold.sentences, gold.segs);
  const AmbiguityReport r =
      ambiguity_analysis(gold.sentences, gold.segs, pred.segs, lexicon);
  std::cout << "combination_errors " << r.combination_errors
            << "\noverlap_errors " << r.overlap_errors
            << "\nresidual_errors " << r.residual_errors << '\n';
  if (!args.out_dir.empty()) {
    const fs::path dir(args.out_dir);
    fs::create_directories(dir);
    {
      std::ofstream csv(dir / "ambiguity.csv", std::ios::binary);
      csv << "combination_errors,overlap_errors,residual_errors\n"
          << r.combination_errors << ',' << r.overlap_errors << ','
          << r.residual_errors << '\n';
    }
    {
      std::ofstream jsonl(dir / "cases.jsonl", std::ios::binary);
      for (const auto& c : r.cases) {
        nlohmann::json j;
        j["sentence"] = c.sentence;
        j["begin"] = c.begin;
        j["end"] = c.end;
        j["kind"] = c.kind;
        j["text"] = c.text;
        jsonl << j.dump() << '\n';
      }
    }
    cli::RunManifest manifest;
    manifest.command = "analyze";
    manifest.argv = argv;
    manifest.settings = {{"setting", std::to_string(args.common.setting)}};
    manifest.inputs = {args.gold, args.pred};
    manifest.outputs = {(dir / "ambiguity.csv").string(),
                        (dir / "cases.jsonl").string()};
    manifest.write(dir / "manifest.json");
  }
  return 0;
}

int run_stats(const std::string& input, const std::string& out_dir,
              const std::vector<std::string>& argv) {
  const CorpusStats s = corpus_stats(input);
  std::cout << "word_types " << s.word_types << "\nword_tokens "
            << s.word_tokens << "\nchar_types " << s.char_types
            << "\nchar_tokens " << s.char_tokens << '\n';
  if (!out_dir.empty()) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    {
      std::ofstream csv(dir / "stats.csv", std::ios::binary);
      csv << "word_types,word_tokens,char_types,char_tokens\n"
          << s.word_types << ',' << s.word_tokens << ',' << s.char_types
          << ',' << s.char_tokens << '\n';
    }
    cli::RunManifest manifest;
    manifest.command = "stats";
    manifest.argv = argv;
    manifest.inputs = {input};
    manifest.outputs = {(dir / "stats.csv").string()};
    manifest.write(dir / "manifest.json");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// full-repro: run the published benchmark grid on user-supplied corpora and
// report F1 next to the published numbers. Informational only.
// ---------------------------------------------------------------------------

struct ReferenceRow {
  const char* dataset;
  int setting;
  const char* decoder;
  int t;
  double f1;
};

// Published F1 (percent) for this method on the SIGHAN bakeoff corpora and
// the InterBEST "Novel" subset.
constexpr ReferenceRow kPublished[] = {
    {"cityu", 1, "sgb-a", 3, 78.7}, {"msr", 1, "sgb-a", 3, 79.4},
    {"pku", 1, "sgb-a", 3, 78.4},   {"as", 1, "sgb-a", 3, 79.4},
    {"cityu", 1, "sgb-c", 3, 77.4}, {"msr", 1, "sgb-c", 3, 80.2},
    {"pku", 1, "sgb-c", 3, 79.6},   {"as", 1, "sgb-c", 3, 78.6},
    {"cityu", 1, "sgb-a", 4, 79.2}, {"msr", 1, "sgb-a", 4, 80.5},
    {"pku", 1, "sgb-a", 4, 77.9},   {"as", 1, "sgb-a", 4, 80.2},
    {"cityu", 1, "sgb-c", 4, 80.0}, {"msr", 1, "sgb-c", 4, 74.0},
    {"pku", 1, "sgb-c", 4, 80.0},   {"as", 1, "sgb-c", 4, 81.0},
    {"cityu", 1, "sgb-a", 5, 72.5}, {"msr", 1, "sgb-a", 5, 72.8},
    {"pku", 1, "sgb-a", 5, 75.4},   {"as", 1, "sgb-a", 5, 64.5},
    {"cityu", 1, "sgb-c", 5, 78.5}, {"msr", 1, "sgb-c", 5, 80.4},
    {"pku", 1, "sgb-c", 5, 78.4},   {"as", 1, "sgb-c", 5, 82.4},
    {"cityu", 3, "sgb-a", 3, 79.5}, {"msr", 3, "sgb-a", 3, 80.6},
    {"pku", 3, "sgb-a", 3, 80.4},   {"as", 3, "sgb-a", 3, 81.9},
    {"cityu", 3, "sgb-c", 3, 77.6}, {"msr", 3, "sgb-c", 3, 81.1},
    {"pku", 3, "sgb-c", 3, 80.4},   {"as", 3, "sgb-c", 3, 79.7},
    {"cityu", 3, "sgb-a", 4, 80.3}, {"msr", 3, "sgb-a", 4, 80.6},
    {"pku", 3, "sgb-a", 4, 80.3},   {"as", 3, "sgb-a", 4, 82.7},
    {"cityu", 3, "sgb-c", 4, 80.5}, {"msr", 3, "sgb-c", 4, 81.7},
    {"pku", 3, "sgb-c", 4, 81.0},   {"as", 3, "sgb-c", 4, 82.3},
    {"cityu", 3, "sgb-a", 5, 78.3}, {"msr", 3, "sgb-a", 5, 80.1},
    {"pku", 3, "sgb-a", 5, 79.1},   {"as", 3, "sgb-a", 5, 82.8},
    {"cityu", 3, "sgb-c", 5, 80.2}, {"msr", 3, "sgb-c", 5, 82.3},
    {"pku", 3, "sgb-c", 5, 81.2},   {"as", 3, "sgb-c", 5, 83.5},
    {"cityu", 4, "sgb-a", 3, 79.5}, {"msr", 4, "sgb-a", 3, 82.7},
    {"pku", 4, "sgb-a", 3, 80.9},   {"as", 4, "sgb-a", 3, 81.7},
    {"cityu", 4, "sgb-c", 3, 80.7}, {"msr", 4, "sgb-c", 3, 83.1},
    {"pku", 4, "sgb-c", 3, 81.6},   {"as", 4, "sgb-c", 3, 82.0},
    {"cityu", 4, "sgb-a", 4, 80.5}, {"msr", 4, "sgb-a", 4, 81.7},
    {"pku", 4, "sgb-a", 4, 79.4},   {"as", 4, "sgb-a", 4, 83.0},
    {"cityu", 4, "sgb-c", 4, 81.2}, {"msr", 4, "sgb-c", 4, 83.6},
    {"pku", 4, "sgb-c", 4, 81.5},   {"as", 4, "sgb-c", 4, 83.9},
    {"cityu", 4, "sgb-a", 5, 78.7}, {"msr", 4, "sgb-a", 5, 82.6},
    {"pku", 4, "sgb-a", 5, 79.9},   {"as", 4, "sgb-a", 5, 82.3},
    {"cityu", 4, "sgb-c", 5, 79.8}, {"msr", 4, "sgb-c", 5, 83.7},
    {"pku", 4, "sgb-c", 5, 80.8},   {"as", 4, "sgb-c", 5, 83.8},
    {"novel", 1, "sgb-a", 12, 80.1}, {"novel", 1, "sgb-c", 12, 79.2},
};

std::optional<double> published_f1(const std::string& dataset, int setting,
                                   const std::string& decoder, int t) {
  for (const auto& row : kPublished)
    if (dataset == row.dataset && setting == row.setting &&
        decoder == row.decoder && t == row.t)
      return row.f1;
  return std::nullopt;
}

int default_batch_size(const std::string& dataset) {
  if (dataset == "cityu") return 32;
  if (dataset == "msr") return 64;
  if (dataset == "pku") return 16;
  return 256;  // as, novel
}

struct ReproArgs {
  std::string dataset = "msr";
  std::string train_file;
  std::string gold_file;
  std::string out_dir;
  std::vector<int> settings{1, 3, 4};
  std::vector<int> t_list{3, 4, 5};
  TrainConfig cfg;
  std::string native = "cjk";
};

int run_full_repro(const ReproArgs& args,
                   const std::vector<std::string>& argv) {
  fs::create_directories(args.out_dir);
  std::cout << "dataset=" << args.dataset
            << "  (training on train+test, evaluating on test)\n";
  std::cout << "setting  T  decoder  f1%     published%\n";
  for (int setting : args.settings) {
    LoadOptions opts;
    opts.setting = setting;
    opts.native = native_script(args.native);

    std::vector<CharSequence> corpus;
    for (const auto* path : {&args.train_file, &args.gold_file})
      for (const auto& line : split_lines(read_utf8_file(*path)))
        for (auto& piece : preprocess_line(line, opts))
          corpus.push_back(std::move(piece));
    const Vocab vocab = build_vocab(corpus, setting == 4);
    for (auto& seq : corpus) assign_ids(seq, vocab);

    const SegmentedText gold = read_segmented(args.gold_file, opts);

    for (int t : args.t_list) {
      TrainConfig cfg = args.cfg;
      cfg.t_max = t;
      if (cfg.batch_size <= 0) cfg.batch_size = default_batch_size(args.dataset);
      const fs::path run_dir = fs::path(args.out_dir) /
                               ("setting" + std::to_string(setting) + "_T" +
                                std::to_string(t));
      fs::create_directories(run_dir);
      cfg.checkpoint_dir = run_dir;
      const auto [params, report] = train(corpus, vocab, cfg);
      save_checkpoint(run_dir / "model.bin", params);
      write_train_report_csv(run_dir / "train_report.csv", report);

      std::vector<CharSequence> pieces;
      pieces.reserve(gold.sentences.size());
      for (const auto& text : gold.sentences) {
        CharSequence seq;
        for (Codepoint cp : text) {
          seq.ids.push_back(-1);
          seq.syms.push_back(cp);
          seq.raw.push_back(cp == kSpecialRune ? "<SPX>" : encode_utf8(cp));
        }
        assign_ids(seq, vocab);
        pieces.push_back(std::move(seq));
      }
      for (const std::string decoder : {"sgb-a", "sgb-c"}) {
        const auto segs =
            decode_all(params, pieces, decoder, t, cfg.threads);
        const EvalReport r = word_f1(gold.lengths(), gold.segs, segs);
        std::ofstream pred_out(run_dir / (decoder + "_pred.txt"),
                               std::ios::binary);
        for (std::size_t i = 0; i < pieces.size(); ++i)
          pred_out << render_words(pieces[i], segs[i]) << '\n';
        const auto ref = published_f1(args.dataset, setting, decoder, t);
        std::printf("%7d %2d  %-7s %6.2f  %s\n", setting, t, decoder.c_str(),
                    100.0 * r.f1,
                    ref ? std::to_string(*ref).substr(0, 4).c_str() : "-");
      }
    }
  }
  cli::RunManifest manifest;
  manifest.command = "full-repro";
  manifest.argv = argv;
  manifest.inputs = {args.train_file, args.gold_file};
  manifest.outputs = {args.out_dir};
  manifest.seed = args.cfg.seed;
  manifest.write(fs::path(args.out_dir) / "manifest.json");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised word segmentation with bi-directional segmental "
               "language models"};
  app.require_subcommand(1);
  std::vector<std::string> raw_args(argv, argv + argc);

  TrainArgs train_args;
  auto* train_cmd = app.add_subcommand("train", "Train a model on raw text");
  train_cmd->add_option("--corpus", train_args.corpus, "Unsegmented UTF-8 corpus")
      ->required()
      ->check(CLI::ExistingFile);
  train_cmd->add_option("--out-dir", train_args.out_dir,
                        "Directory for checkpoint, vocab, report, manifest")
      ->required();
  add_setting_flags(train_cmd, train_args.common);
  train_cmd->add_option("--t-max", train_args.cfg.t_max, "Maximum word length")
      ->capture_default_str();
  train_cmd->add_option("--seed", train_args.cfg.seed, "Random seed")
      ->capture_default_str();
  train_cmd->add_option("--epochs", train_args.cfg.epochs, "Training epochs")
      ->capture_default_str();
  train_cmd->add_option("--lr", train_args.cfg.lr, "Adam learning rate")
      ->capture_default_str();
  train_cmd->add_option("--batch-size", train_args.cfg.batch_size, "Batch size")
      ->capture_default_str();
  train_cmd->add_option("--embed-dim", train_args.cfg.embed_dim,
                        "Character embedding size")
      ->capture_default_str();
  train_cmd->add_option("--hidden-dim", train_args.cfg.hidden_dim,
                        "LSTM hidden size")
      ->capture_default_str();
  train_cmd->add_option("--threads", train_args.cfg.threads,
                        "Gradient worker threads")
      ->capture_default_str();
  train_cmd->add_flag("--clip", train_args.cfg.grad_clip,
                      "Clip gradients to l2 norm 5.0");
  train_cmd->add_option("--clip-norm", train_args.cfg.grad_clip_norm,
                        "Clipping threshold")
      ->capture_default_str();
  train_cmd->add_option("--max-sentence-chars",
                        train_args.cfg.max_sentence_chars,
                        "Split longer sentences for training")
      ->capture_default_str();
  train_cmd->add_flag("--shared-output", train_args.cfg.shared_output,
                      "Share the softmax projection across directions");
  train_cmd->add_flag("--lm-zero-cell", train_args.cfg.lm_zero_cell,
                      "Zero the language model's initial cell state");
  train_cmd->add_flag("--unk", train_args.add_unk,
                      "Reserve an unknown-character symbol");

  SegmentArgs seg_args;
  auto* seg_cmd = app.add_subcommand("segment", "Segment raw text");
  seg_cmd->add_option("--checkpoint", seg_args.checkpoint, "Model file")
      ->required()
      ->check(CLI::ExistingFile);
  seg_cmd->add_option("--vocab", seg_args.vocab,
                      "Vocabulary file (default: vocab.txt beside the model)")
      ->check(CLI::ExistingFile);
  seg_cmd->add_option("--input", seg_args.input, "Raw text to segment")
      ->required()
      ->check(CLI::ExistingFile);
  seg_cmd->add_option("--output", seg_args.output,
                      "Output file (default: stdout)");
  seg_cmd->add_option("--decoder", seg_args.decoder,
                      "Decoding rule")
      ->check(CLI::IsMember({"sgb-a", "sgb-c", "fwd", "bwd"}))
      ->capture_default_str();
  seg_cmd->add_option("--t-max", seg_args.t_max, "Maximum word length")
      ->capture_default_str();
  seg_cmd->add_option("--threads", seg_args.threads, "Decoder threads")
      ->capture_default_str();
  add_setting_flags(seg_cmd, seg_args.common);

  PairArgs eval_args;
  auto* eval_cmd =
      app.add_subcommand("eval", "Word F1 against a gold segmentation");
  eval_cmd->add_option("--gold", eval_args.gold, "Gold segmented file")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--pred", eval_args.pred, "Predicted segmented file")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--out-dir", eval_args.out_dir, "Report directory");
  add_setting_flags(eval_cmd, eval_args.common);

  PairArgs analyze_args;
  auto* analyze_cmd = app.add_subcommand(
      "analyze", "Combination/overlap ambiguity error analysis");
  analyze_cmd->add_option("--gold", analyze_args.gold, "Gold segmented file")
      ->required()
      ->check(CLI::ExistingFile);
  analyze_cmd->add_option("--pred", analyze_args.pred, "Predicted file")
      ->required()
      ->check(CLI::ExistingFile);
  analyze_cmd->add_option("--out-dir", analyze_args.out_dir,
                          "Report directory");
  add_setting_flags(analyze_cmd, analyze_args.common);

  std::string stats_input, stats_out_dir;
  auto* stats_cmd =
      app.add_subcommand("stats", "Corpus statistics of a segmented file");
  stats_cmd->add_option("--input", stats_input, "Segmented file")
      ->required()
      ->check(CLI::ExistingFile);
  stats_cmd->add_option("--out-dir", stats_out_dir, "Report directory");

  ReproArgs repro_args;
  repro_args.cfg.batch_size = 0;  // resolved per dataset
  auto* repro_cmd = app.add_subcommand(
      "full-repro",
      "Benchmark grid over settings and T on user-supplied corpora");
  repro_cmd->add_option("--dataset", repro_args.dataset,
                        "cityu, msr, pku, as or novel")
      ->check(CLI::IsMember({"cityu", "msr", "pku", "as", "novel"}))
      ->capture_default_str();
  repro_cmd->add_option("--train", repro_args.train_file, "Training text")
      ->required()
      ->check(CLI::ExistingFile);
  repro_cmd
      ->add_option("--gold", repro_args.gold_file, "Gold-segmented test text")
      ->required()
      ->check(CLI::ExistingFile);
  repro_cmd->add_option("--out-dir", repro_args.out_dir, "Output directory")
      ->required();
  repro_cmd->add_option("--settings", repro_args.settings,
                        "Preprocessing settings to run")
      ->capture_default_str();
  repro_cmd->add_option("--t-list", repro_args.t_list,
                        "Maximum word lengths to run")
      ->capture_default_str();
  repro_cmd->add_option("--epochs", repro_args.cfg.epochs)
      ->capture_default_str();
  repro_cmd->add_option("--embed-dim", repro_args.cfg.embed_dim)
      ->capture_default_str();
  repro_cmd->add_option("--hidden-dim", repro_args.cfg.hidden_dim)
      ->capture_default_str();
  repro_cmd->add_option("--batch-size", repro_args.cfg.batch_size);
  repro_cmd->add_option("--threads", repro_args.cfg.threads)
      ->capture_default_str();
  repro_cmd->add_option("--seed", repro_args.cfg.seed)->capture_default_str();
  repro_cmd
      ->add_option("--native-script", repro_args.native,
                   "Native script for setting 4")
      ->check(CLI::IsMember({"cjk", "thai", "latin"}))
      ->capture_default_str();

  for (CLI::App* cmd : {train_cmd, seg_cmd, eval_cmd, analyze_cmd, stats_cmd,
                        repro_cmd})
    cmd->set_config("--config", "", "Read options from a key=value file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (train_cmd->parsed()) return run_train(train_args, raw_args);
    if (seg_cmd->parsed()) return run_segment(seg_args, raw_args);
    if (eval_cmd->parsed()) return run_eval(eval_args, raw_args);
    if (analyze_cmd->parsed()) return run_analyze(analyze_args, raw_args);
    if (stats_cmd->parsed())
      return run_stats(stats_input, stats_out_dir, raw_args);
    if (repro_cmd->parsed()) return run_full_repro(repro_args, raw_args);
  } catch (const std::exception& e) {
    std::cerr << "seglm: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "seglm/checkpoint.hpp"
#include "seglm/evaluator.hpp"
#include "seglm/trainer.hpp"

namespace py = pybind11;
using namespace seglm;

namespace {

SegmentScoreTable table_from_rows(
    const std::vector<std::vector<double>>& rows, int t_max) {
  SegmentScoreTable table(static_cast<int>(rows.size()), t_max);
  for (int start = 0; start < table.size(); ++start) {
    const auto& row = rows[start];
    if (static_cast<int>(row.size()) < table.max_len_at(start))
      throw LatticeError("row " + std::to_string(start) + " is too short");
    for (int len = 1; len <= table.max_len_at(start); ++len)
      table.at(start, len) = row[len - 1];
  }
  return table;
}

std::vector<std::vector<double>> table_rows(const SegmentScoreTable& t) {
  std::vector<std::vector<double>> rows(t.size());
  for (int start = 0; start < t.size(); ++start)
    for (int len = 1; len <= t.max_len_at(start); ++len)
      rows[start].push_back(t(start, len));
  return rows;
}

CharSequence sequence_from_text(const std::string& utf8, const Vocab& vocab) {
  CharSequence seq;
  for (Codepoint cp : decode_utf8(utf8)) {
    if (is_space(cp)) continue;
    seq.ids.push_back(-1);
    seq.syms.push_back(cp);
    seq.raw.push_back(encode_utf8(cp));
  }
  assign_ids(seq, vocab);
  return seq;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Bi-directional segmental language model word segmentation";

  py::register_exception<DecodeError>(m, "DecodeError", PyExc_ValueError);
  py::register_exception<CorpusError>(m, "CorpusError", PyExc_ValueError);
  py::register_exception<LatticeError>(m, "LatticeError", PyExc_ValueError);
  py::register_exception<EvalError>(m, "EvalError", PyExc_ValueError);
  py::register_exception<CheckpointError>(m, "CheckpointError",
                                          PyExc_ValueError);

  py::class_<CharSequence>(m, "CharSequence")
      .def(py::init<>())
      .def_readonly("ids", &CharSequence::ids)
      .def_readonly("raw", &CharSequence::raw)
      .def("__len__", &CharSequence::size)
      .def("text", &CharSequence::raw_text);

  py::class_<Vocab>(m, "Vocab")
      .def_readonly("eos_id", &Vocab::eos_id)
      .def_readonly("special_id", &Vocab::special_id)
      .def_readonly("unk_id", &Vocab::unk_id)
      .def("__len__", &Vocab::size)
      .def("symbol", &Vocab::symbol_text);

  py::class_<CorpusStats>(m, "CorpusStats")
      .def_readonly("word_types", &CorpusStats::word_types)
      .def_readonly("word_tokens", &CorpusStats::word_tokens)
      .def_readonly("char_types", &CorpusStats::char_types)
      .def_readonly("char_tokens", &CorpusStats::char_tokens);

  py::class_<LoadOptions>(m, "LoadOptions")
      .def(py::init([](int setting, const std::string& native) {
             LoadOptions o;
             o.setting = setting;
             o.native = native_script(native);
             return o;
           }),
           py::arg("setting") = 1, py::arg("native") = "cjk")
      .def_readwrite("setting", &LoadOptions::setting);

  m.def("load_corpus", &load_corpus, py::arg("path"),
        py::arg("options") = LoadOptions{});
  m.def(
      "build_vocab",
      [](const std::vector<CharSequence>& corpus, bool force_special,
         bool add_unk) { return build_vocab(corpus, force_special, add_unk); },
      py::arg("corpus"), py::arg("force_special") = false,
      py::arg("add_unk") = false);
  m.def("corpus_stats", &corpus_stats, py::arg("gold_path"));
  m.def("save_vocab", &save_vocab);
  m.def("load_vocab", &load_vocab);
  m.def("sequence_from_text", &sequence_from_text, py::arg("text"),
        py::arg("vocab"));

  py::class_<Segmentation>(m, "Segmentation")
      .def(py::init([](std::vector<std::int32_t> b) {
             return Segmentation{std::move(b)};
           }),
           py::arg("boundaries") = std::vector<std::int32_t>{})
      .def_readwrite("boundaries", &Segmentation::boundaries)
      .def("spans", &Segmentation::spans)
      .def("mirrored", &Segmentation::mirrored)
      .def("merged", &Segmentation::merged)
      .def("word_count", &Segmentation::word_count)
      .def("__eq__", [](const Segmentation& a, const Segmentation& b) {
        return a == b;
      });

  py::class_<SegmentScoreTable>(m, "SegmentScoreTable")
      .def(py::init(&table_from_rows), py::arg("rows"), py::arg("t_max"))
      .def_property_readonly("n", &SegmentScoreTable::size)
      .def_property_readonly("t_max", &SegmentScoreTable::t_max)
      .def("score", [](const SegmentScoreTable& t, int start, int len) {
        return t(start, len);
      })
      .def("rows", &table_rows);

  py::class_<LatticeResult>(m, "LatticeResult")
      .def_readonly("log_marginal", &LatticeResult::log_marginal)
      .def("alpha", &LatticeResult::alpha_at);

  m.def("forward_marginal", &forward_marginal);
  m.def("backward_marginal", &backward_marginal);
  m.def("viterbi", &viterbi);
  m.def("sgb_a", &sgb_a);
  m.def("sgb_c", &sgb_c);
  m.def("brute_force_marginal", &brute_force_marginal);
  m.def("brute_force_best", &brute_force_best);
  m.def("composition_count", &composition_count);

  py::class_<ModelParams>(m, "ModelParams")
      .def_static("init", &ModelParams::init, py::arg("vocab_size"),
                  py::arg("embed_dim"), py::arg("hidden_dim"),
                  py::arg("eos_id"), py::arg("seed"),
                  py::arg("shared_output") = false,
                  py::arg("lm_zero_cell") = false)
      .def_readonly("vocab_size", &ModelParams::vocab_size)
      .def_readonly("embed_dim", &ModelParams::embed_dim)
      .def_readonly("hidden_dim", &ModelParams::hidden_dim)
      .def_readonly("eos_id", &ModelParams::eos_id);

  py::class_<ScoreStats>(m, "ScoreStats")
      .def(py::init<>())
      .def_readonly("ctx_steps", &ScoreStats::ctx_steps)
      .def_readonly("lm_steps", &ScoreStats::lm_steps);

  m.def(
      "score_bidi",
      [](const ModelParams& p, const CharSequence& s, int t_max) {
        return score_bidi(p, s, t_max);
      },
      py::arg("params"), py::arg("sentence"), py::arg("t_max"));
  m.def("sentence_loss", &sentence_loss, py::arg("params"),
        py::arg("sentence"), py::arg("t_max"));

  m.def("save_checkpoint", &save_checkpoint);
  m.def("load_checkpoint", &load_checkpoint, py::arg("path"),
        py::arg("eos_id"));

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("lr", &TrainConfig::lr)
      .def_readwrite("epochs", &TrainConfig::epochs)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("t_max", &TrainConfig::t_max)
      .def_readwrite("embed_dim", &TrainConfig::embed_dim)
      .def_readwrite("hidden_dim", &TrainConfig::hidden_dim)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_readwrite("threads", &TrainConfig::threads)
      .def_readwrite("grad_clip", &TrainConfig::grad_clip)
      .def_readwrite("shared_output", &TrainConfig::shared_output)
      .def_readwrite("lm_zero_cell", &TrainConfig::lm_zero_cell)
      .def_readwrite("max_sentence_chars", &TrainConfig::max_sentence_chars);

  py::class_<TrainReport>(m, "TrainReport")
      .def_readonly("epoch_loss", &TrainReport::epoch_loss)
      .def_readonly("epoch_seconds", &TrainReport::epoch_seconds)
      .def_readonly("diverged", &TrainReport::diverged);

  m.def("train", &train, py::arg("corpus"), py::arg("vocab"),
        py::arg("config"),
        py::call_guard<py::gil_scoped_release>());

  m.def(
      "segment_text",
      [](const ModelParams& params, const Vocab& vocab,
         const std::string& line, const std::string& decoder, int t_max) {
        CharSequence seq = sequence_from_text(line, vocab);
        if (seq.size() == 0) return std::string();
        const auto [fwd, bwd] = score_bidi(params, seq, t_max);
        Segmentation seg;
        if (decoder == "sgb-a")
          seg = sgb_a(fwd, bwd);
        else if (decoder == "sgb-c")
          seg = sgb_c(fwd, bwd);
        else if (decoder == "fwd")
          seg = viterbi(fwd).first;
        else if (decoder == "bwd")
          seg = viterbi(bwd).first.mirrored(static_cast<int>(seq.size()));
        else
          throw std::invalid_argument("unknown decoder: " + decoder);
        std::string out;
        for (const auto& [b, e] : seg.spans(static_cast<int>(seq.size()))) {
          if (!out.empty()) out += ' ';
          for (std::int32_t i = b; i < e; ++i) out += seq.raw[i];
        }
        return out;
      },
      py::arg("params"), py::arg("vocab"), py::arg("line"),
      py::arg("decoder") = "sgb-a", py::arg("t_max") = 3);

  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("precision", &EvalReport::precision)
      .def_readonly("recall", &EvalReport::recall)
      .def_readonly("f1", &EvalReport::f1)
      .def_readonly("gold_words", &EvalReport::gold_words)
      .def_readonly("pred_words", &EvalReport::pred_words)
      .def_readonly("correct_words", &EvalReport::correct_words);

  m.def("word_f1", &word_f1, py::arg("lengths"), py::arg("gold"),
        py::arg("pred"));

  py::class_<AmbiguityCase>(m, "AmbiguityCase")
      .def_readonly("sentence", &AmbiguityCase::sentence)
      .def_readonly("begin", &AmbiguityCase::begin)
      .def_readonly("end", &AmbiguityCase::end)
      .def_readonly("kind", &AmbiguityCase::kind)
      .def_readonly("text", &AmbiguityCase::text);

  py::class_<AmbiguityReport>(m, "AmbiguityReport")
      .def_readonly("combination_errors", &AmbiguityReport::combination_errors)
      .def_readonly("overlap_errors", &AmbiguityReport::overlap_errors)
      .def_readonly("residual_errors", &AmbiguityReport::residual_errors)
      .def_readonly("cases", &AmbiguityReport::cases);

  m.def(
      "ambiguity_analysis",
      [](const std::vector<std::string>& sentences,
         const std::vector<Segmentation>& gold,
         const std::vector<Segmentation>& pred,
         const std::vector<std::string>& lexicon) {
        std::vector<std::u32string> s32;
        s32.reserve(sentences.size());
        for (const auto& s : sentences) s32.push_back(decode_utf8(s));
        Lexicon lex;
        for (const auto& w : lexicon) lex.insert(decode_utf8(w));
        return ambiguity_analysis(s32, gold, pred, lex);
      },
      py::arg("sentences"), py::arg("gold"), py::arg("pred"),
      py::arg("lexicon"));

  py::class_<SegmentedText>(m, "SegmentedText")
      .def_property_readonly("sentences",
                             [](const SegmentedText& t) {
                               std::vector<std::string> out;
                               out.reserve(t.sentences.size());
                               for (const auto& s : t.sentences)
                                 out.push_back(display_utf8(s));
                               return out;
                             })
      .def_readonly("segs", &SegmentedText::segs)
      .def("lengths", &SegmentedText::lengths);

  m.def("read_segmented", &read_segmented, py::arg("path"),
        py::arg("options") = LoadOptions{});

  m.attr("__version__") = "0.1.0";
}

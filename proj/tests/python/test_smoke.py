"""End-to-end smoke tests for the python bindings."""

import math
import random

import pytest

import seglm


@pytest.fixture(scope="module")
def toy_corpus(tmp_path_factory):
    path = tmp_path_factory.mktemp("corpus") / "toy.txt"
    lines = ["abcab", "abab", "cabab", "ababab"] * 3
    path.write_text("\n".join(lines), encoding="utf-8")
    return path


def test_corpus_vocab_roundtrip(toy_corpus, tmp_path):
    corpus = seglm.load_corpus(str(toy_corpus))
    assert len(corpus) == 12
    vocab = seglm.build_vocab(corpus)
    assert len(vocab) == 4  # a, b, c, EOS
    assert vocab.symbol(vocab.eos_id) == "<EOS>"
    vocab_path = tmp_path / "vocab.txt"
    seglm.save_vocab(str(vocab_path), vocab)
    assert seglm.load_vocab(str(vocab_path)).eos_id == vocab.eos_id


def test_lattice_matches_brute_force():
    rng = random.Random(11)
    rows = [[rng.uniform(-3.0, -0.1) for _ in range(3)] for _ in range(6)]
    table = seglm.SegmentScoreTable(rows, 3)
    marginal = seglm.forward_marginal(table).log_marginal
    assert marginal == pytest.approx(seglm.brute_force_marginal(table), abs=1e-9)
    seg, best = seglm.viterbi(table)
    bseg, bbest = seglm.brute_force_best(table)
    assert seg.boundaries == bseg.boundaries
    assert best == pytest.approx(bbest, abs=1e-12)


def test_zero_scores_count_segmentations():
    rows = [[0.0, 0.0] for _ in range(4)]
    table = seglm.SegmentScoreTable(rows, 2)
    marginal = seglm.forward_marginal(table).log_marginal
    assert math.exp(marginal) == pytest.approx(seglm.composition_count(4, 2))


def test_train_and_segment(toy_corpus, tmp_path):
    corpus = seglm.load_corpus(str(toy_corpus))
    vocab = seglm.build_vocab(corpus)
    cfg = seglm.TrainConfig()
    cfg.epochs = 3
    cfg.embed_dim = 8
    cfg.hidden_dim = 8
    cfg.t_max = 2
    cfg.batch_size = 4
    cfg.seed = 5
    params, report = seglm.train(corpus, vocab, cfg)
    assert len(report.epoch_loss) == 3
    assert all(math.isfinite(x) for x in report.epoch_loss)
    assert not report.diverged

    ckpt = tmp_path / "model.bin"
    seglm.save_checkpoint(str(ckpt), params)
    loaded = seglm.load_checkpoint(str(ckpt), vocab.eos_id)
    line = seglm.segment_text(loaded, vocab, "abcab", decoder="sgb-a", t_max=2)
    assert line.replace(" ", "") == "abcab"
    merged = seglm.segment_text(loaded, vocab, "abcab", decoder="sgb-c", t_max=2)
    assert set(len(w) for w in merged.split()) <= {1, 2}


def test_word_f1_fixture():
    gold = [seglm.Segmentation([1, 3, 4])]
    pred = [seglm.Segmentation([1, 2, 4])]
    report = seglm.word_f1([6], gold, pred)
    assert report.precision == pytest.approx(0.5)
    assert report.recall == pytest.approx(0.5)
    assert report.f1 == pytest.approx(0.5)


def test_ambiguity_analysis():
    report = seglm.ambiguity_analysis(
        ["从小学"],
        [seglm.Segmentation([1])],
        [seglm.Segmentation([2])],
        ["从", "小学", "从小", "学"],
    )
    assert report.overlap_errors == 1
    assert report.combination_errors == 0
    assert report.cases[0].kind == "overlap"


def test_sentence_loss_is_finite(tmp_path):
    path = tmp_path / "ab.txt"
    path.write_text("ab\n", encoding="utf-8")
    corpus = seglm.load_corpus(str(path))
    vocab = seglm.build_vocab(corpus)
    params = seglm.ModelParams.init(len(vocab), 2, 3, vocab.eos_id, seed=0)
    loss = seglm.sentence_loss(params, corpus[0], 2)
    assert math.isfinite(loss)


def test_read_segmented(tmp_path):
    path = tmp_path / "gold.txt"
    path.write_text("我 从小 学\n我 学\n", encoding="utf-8")
    text = seglm.read_segmented(str(path))
    assert text.sentences == ["我从小学", "我学"]
    assert text.segs[0].boundaries == [1, 3]
    assert text.lengths() == [4, 2]

"""Unsupervised word segmentation with bi-directional segmental language models."""

from seglm._core import (  # noqa: F401
    AmbiguityCase,
    AmbiguityReport,
    CharSequence,
    CorpusStats,
    EvalReport,
    LatticeResult,
    LoadOptions,
    ModelParams,
    ScoreStats,
    SegmentScoreTable,
    Segmentation,
    SegmentedText,
    TrainConfig,
    TrainReport,
    Vocab,
    __version__,
    ambiguity_analysis,
    backward_marginal,
    brute_force_best,
    brute_force_marginal,
    build_vocab,
    composition_count,
    corpus_stats,
    forward_marginal,
    load_checkpoint,
    load_corpus,
    load_vocab,
    read_segmented,
    save_checkpoint,
    save_vocab,
    score_bidi,
    segment_text,
    sentence_loss,
    sequence_from_text,
    sgb_a,
    sgb_c,
    train,
    viterbi,
    word_f1,
)

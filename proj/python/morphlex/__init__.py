"""Corpus-free morphological lexicon refinement and BPE tokenizer evaluation."""

from ._core import (
    BpeModel,
    best_explanation,
    count_words,
    import_vocab,
    initial_scores,
    integrated_performance_score,
    kneedle_elbow,
    lexical_morpheme_coverage,
    load_curve_csv,
    max_gain_point,
    otsu_threshold,
    over_split_rate,
    prefilter,
    q90_point,
    recommend_range,
    reduction_stats,
    run_refinement,
    support_counts,
    train_bpe,
    write_model,
)

__all__ = [
    "BpeModel",
    "best_explanation",
    "count_words",
    "import_vocab",
    "initial_scores",
    "integrated_performance_score",
    "kneedle_elbow",
    "lexical_morpheme_coverage",
    "load_curve_csv",
    "max_gain_point",
    "otsu_threshold",
    "over_split_rate",
    "prefilter",
    "q90_point",
    "recommend_range",
    "reduction_stats",
    "run_refinement",
    "support_counts",
    "train_bpe",
    "write_model",
]

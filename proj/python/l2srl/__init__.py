"""Scoring, agreement selection and tagging for L2-L1 parallel SRL corpora."""

from ._core import (
    Corpus,
    Model,
    heuristic_align,
    load_model,
    oracle,
    read_alignments,
    read_corpus,
    run_cli,
    score,
    select,
    tag,
    train,
)

__all__ = [
    "Corpus",
    "Model",
    "heuristic_align",
    "load_model",
    "oracle",
    "read_alignments",
    "read_corpus",
    "run_cli",
    "score",
    "select",
    "tag",
    "train",
]

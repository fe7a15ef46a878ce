"""Empirical complexity fits, code embeddings and tree classifiers."""

from ._rtheta import (
    Classifier,
    RthetaError,
    embed_store,
    embedding_header,
    evaluate,
    evaluate_basis,
    fit,
    grid,
    parse_perf,
    run_stage,
)

__all__ = [
    "Classifier",
    "RthetaError",
    "embed_store",
    "embedding_header",
    "evaluate",
    "evaluate_basis",
    "fit",
    "grid",
    "parse_perf",
    "run_stage",
]

"""Potential loss analysis for cross-process wafer defect attribution.

Thin wrapper over the C++ core: kernel-based process embedding, partial
trajectory regression (PTR) and the Bellman-surrogate PLA model with
non-negative per-process attribution, plus the file-based pipeline commands
(simulate / embed / train / attribute / evaluate) that mirror the CLI.
"""

from plakit._core import (
    PlaError,
    __version__,
    attribute,
    config_hash,
    default_config,
    embed,
    embed_tokens,
    evaluate,
    psi,
    simulate,
    subseq_kernel,
    subseq_kernel_sum,
    train,
)

__all__ = [
    "PlaError",
    "__version__",
    "attribute",
    "config_hash",
    "default_config",
    "embed",
    "embed_tokens",
    "evaluate",
    "psi",
    "simulate",
    "subseq_kernel",
    "subseq_kernel_sum",
    "train",
]

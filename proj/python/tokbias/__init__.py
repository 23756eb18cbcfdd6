"""Python bindings for the tokbias C++ core."""

from ._core import (
    Error,
    Vocabulary,
    Encoder,
    Dictionary,
    load_rank_file,
    load_profile,
    classify_text,
    length_histogram,
    plan_sample,
    draw_sample,
    segment,
    containment_check,
    metrics_from_fixtures,
    render_report,
    format4,
)

__all__ = [
    "Error",
    "Vocabulary",
    "Encoder",
    "Dictionary",
    "load_rank_file",
    "load_profile",
    "classify_text",
    "length_histogram",
    "plan_sample",
    "draw_sample",
    "segment",
    "containment_check",
    "metrics_from_fixtures",
    "render_report",
    "format4",
]

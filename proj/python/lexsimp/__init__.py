"""Lexical simplification toolkit."""

import json as _json

from ._lexsimp import (
    LexsimpError,
    align_edits,
    combine_score,
    f1_scores,
    majority_elements,
    mark_target,
    parse_word_list,
    parse_yes_no,
    render_prompt,
    run_cli,
    vote_rank,
)
from ._lexsimp import dataset_stats as _dataset_stats

__all__ = [
    "LexsimpError",
    "align_edits",
    "combine_score",
    "dataset_stats",
    "f1_scores",
    "majority_elements",
    "mark_target",
    "parse_word_list",
    "parse_yes_no",
    "render_prompt",
    "run_cli",
    "vote_rank",
]


def dataset_stats(path):
    """NOI, NOC and substitute-count marginals of a JSONL dataset."""
    return _json.loads(_dataset_stats(str(path)))

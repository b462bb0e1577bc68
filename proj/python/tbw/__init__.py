"""Universal Dependencies treebank tools with a Kakataibo schema profile.

Functions work on CoNLL-U text and return plain Python values. Trained
models are returned as the text of their model file.
"""

from ._tbw import (
    TbwError,
    __version__,
    decode_mst,
    delexicalize,
    deprel_distribution,
    evaluate_dep,
    evaluate_pos,
    fixtures_conllu,
    length_stats,
    normalize,
    parse,
    run_experiments,
    split,
    tag,
    train_parser,
    train_tagger,
    upos_distribution,
    validate,
)

__all__ = [
    "TbwError",
    "__version__",
    "decode_mst",
    "delexicalize",
    "deprel_distribution",
    "evaluate_dep",
    "evaluate_pos",
    "fixtures_conllu",
    "length_stats",
    "normalize",
    "parse",
    "run_experiments",
    "split",
    "tag",
    "train_parser",
    "train_tagger",
    "upos_distribution",
    "validate",
]

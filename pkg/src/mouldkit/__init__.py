"""Exact mould calculus for prenormal forms of local diffeomorphisms."""

from .alphabet import TruncationContext, enumerate_words, format_word, parse_word, word_norm
from .moulds import (
    Mould,
    MouldError,
    dump_tsv,
    load_tsv,
    mould_compose,
    mould_exp,
    mould_id,
    mould_inverse,
    mould_log,
    mould_mul,
    mould_one,
)
from .operators import (
    HomOperator,
    OperatorSeries,
    PreparedDiffeo,
    bch_star,
    commutes_with_flin,
    conjugate,
    extract_B,
    extract_D,
    mould_expand,
    operator_exp,
    operator_log,
    operator_to_map,
)
from .polys import TruncatedPoly, dump_jet, flin_apply, load_jet, poly_substitute
from .prenormal import (
    Dem_mould,
    NormalizationTrace,
    dem_mould,
    dulac_iterate,
    linearization_mould,
    linearize,
    resonance_profile,
    sem_explicit,
    sem_moulds,
    trim_iterate,
    verify_prenormal,
)
from .scalars import Scalar, parse_scalar
from .specfile import parse_spec

__version__ = "0.1.0"

__all__ = [
    "TruncationContext",
    "enumerate_words",
    "format_word",
    "parse_word",
    "word_norm",
    "Mould",
    "MouldError",
    "dump_tsv",
    "load_tsv",
    "mould_compose",
    "mould_exp",
    "mould_id",
    "mould_inverse",
    "mould_log",
    "mould_mul",
    "mould_one",
    "HomOperator",
    "OperatorSeries",
    "PreparedDiffeo",
    "bch_star",
    "commutes_with_flin",
    "conjugate",
    "extract_B",
    "extract_D",
    "mould_expand",
    "operator_exp",
    "operator_log",
    "operator_to_map",
    "TruncatedPoly",
    "dump_jet",
    "flin_apply",
    "load_jet",
    "poly_substitute",
    "Dem_mould",
    "NormalizationTrace",
    "dem_mould",
    "dulac_iterate",
    "linearization_mould",
    "linearize",
    "resonance_profile",
    "sem_explicit",
    "sem_moulds",
    "trim_iterate",
    "verify_prenormal",
    "Scalar",
    "parse_scalar",
    "parse_spec",
]

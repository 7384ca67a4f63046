"""The finitely based machine-encoding variety and its word-problem solvers."""

from .signature import FBSignature, build_signature
from .normal import SpaceTimeNormalForm, NotSpaceTimeError, normalize_space_time
from .laws import LawInstance, instantiate_laws, validate_law_instance
from .encode import presentation_from_tape, forward_derive, DerivationTable
from .countermodel import CountermodelSlice, build_countermodel_slice
from .degenerate import reduce_degenerate, translate_term
from .base import BaseSets, BaseTable, build_base, close_F_bar, derive_base_table
from .solver import decide_fb, SolveOutcome

__all__ = [
    "FBSignature", "build_signature",
    "SpaceTimeNormalForm", "NotSpaceTimeError", "normalize_space_time",
    "LawInstance", "instantiate_laws", "validate_law_instance",
    "presentation_from_tape", "forward_derive", "DerivationTable",
    "CountermodelSlice", "build_countermodel_slice",
    "reduce_degenerate", "translate_term",
    "BaseSets", "BaseTable", "build_base", "close_F_bar", "derive_base_table",
    "decide_fb", "SolveOutcome",
]

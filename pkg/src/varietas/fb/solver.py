"""Front door for the machine-encoding variety's word problem."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..config import Limits
from ..terms import Presentation, Term
from ..turing import AdjustedMachine
from .signature import FBSignature, build_signature
from .base import BaseData, assemble_base_data, build_base, derive_base_table, BaseTable
from .degenerate import solve_degenerate
from .encode import forward_derive, DegeneracyCertificate
from .stages import A0Decider, StageTower, nf_deep


@dataclass(frozen=True)
class SolveOutcome:
    verdict: str                 # "equal" | "unequal" | "unknown"
    case: str                    # "degenerate" | "nondegenerate"
    table_mode: str              # "derived" | "supplied" | "none"
    reason: str = ""
    certificate: Optional[DegeneracyCertificate] = None
    stage_used: Optional[int] = None


class ConfigError(Exception):
    pass


def find_degeneracy_certificate(
    p: Presentation, m: AdjustedMachine, fbsig: FBSignature, horizon: int
) -> Optional[DegeneracyCertificate]:
    """Bounded search: run the forward derivation and report the collapse
    chain if the halting state is reached within the horizon."""
    try:
        table = forward_derive(p, m, horizon, fbsig)
    except Exception:
        return None
    return table.certificate


def decide_fb(
    p: Presentation,
    m: AdjustedMachine,
    lhs: Term,
    rhs: Term,
    case: str = "auto",
    limits: Limits = Limits(),
    base_table: Optional[BaseTable] = None,
    certificate: Optional[DegeneracyCertificate] = None,
    fbsig: Optional[FBSignature] = None,
) -> SolveOutcome:
    """Decide a word-problem query for the machine-encoding variety.

    ``case`` selects the degenerate or non-degenerate route; ``auto`` runs a
    bounded certificate search first.  Which case holds is not uniformly
    decidable, so ``auto`` is a best effort: an inconclusive search falls
    back to the non-degenerate route.
    """
    if fbsig is None:
        fbsig = build_signature(m)
    if case not in ("auto", "degenerate", "nondegenerate"):
        raise ConfigError(f"unknown case {case!r}")
    if case == "nondegenerate" and certificate is not None:
        raise ConfigError("a degeneracy certificate contradicts the chosen case")

    if case == "auto":
        if certificate is None:
            certificate = find_degeneracy_certificate(
                p, m, fbsig, limits.time_window)
        case = "degenerate" if certificate is not None else "nondegenerate"

    if case == "degenerate":
        if certificate is None:
            certificate = find_degeneracy_certificate(
                p, m, fbsig, limits.time_window)
        equal = solve_degenerate(p, fbsig, lhs, rhs)
        return SolveOutcome(
            "equal" if equal else "unequal", "degenerate", "none",
            certificate=certificate,
        )

    from .stages import nf_presentation
    p = nf_presentation(p)
    bs = build_base(p, fbsig, limits.time_window, limits.space_window)
    if base_table is not None:
        bd = assemble_base_data(bs, base_table, base_table.provenance)
    else:
        bd = derive_base_table(p, m, fbsig, bs, horizon=limits.bt_horizon)

    a0 = A0Decider(bd)
    tower = StageTower(a0, limits.stage_bound)
    lhs_nf = nf_deep(lhs, p.generators)
    rhs_nf = nf_deep(rhs, p.generators)
    stage_l = tower.min_stage(lhs_nf)
    stage_r = tower.min_stage(rhs_nf)
    if stage_l is None or stage_r is None:
        missing = lhs if stage_l is None else rhs
        return SolveOutcome(
            "unknown", "nondegenerate", bd.table.provenance,
            reason=f"term not covered within {limits.stage_bound} stages: {missing!r}",
        )
    n = max(stage_l, stage_r)
    equal = tower.equiv(lhs_nf, rhs_nf, n)
    return SolveOutcome(
        "equal" if equal else "unequal", "nondegenerate", bd.table.provenance,
        stage_used=n,
    )

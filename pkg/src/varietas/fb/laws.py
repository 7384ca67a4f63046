"""The defining laws of the finitely based variety, as ground instances.

Schemas carry pattern variables ?x ?y ?z; instantiation substitutes terms
from a caller-supplied domain.  Machine-indexed families (state/letter
pairs) expand against the adjusted machine's total transition maps.

The published motion values for the two pushing states disagree between the
flow-chart prose and the law table; the pushing state that moves the right
marker returns LEFT, so its head-step law uses S_inv (and symmetrically S
for the left-marker state).  That is the orientation the simulator realizes,
and the default here; ``swap_lr_motion=True`` restores the other signs.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Iterable, Iterator, Optional

from ..terms import Term, format_term
from ..turing import AdjustedMachine
from .signature import (
    C, C_Q, C_S, C_STAR, E, F, FBSignature, H, K, K_STAR, N_H, N_Q, N_S,
    ONE, ONE_F, P, R, S, S_INV, T, U, ZERO, ZERO_F, space_power,
)

X, Y, Z = Term("?x"), Term("?y"), Term("?z")


@dataclass(frozen=True)
class LawInstance:
    family: str
    name: str
    lhs: Term
    rhs: Term

    def __repr__(self) -> str:
        return f"<{self.name}: {format_term(self.lhs)} ~ {format_term(self.rhs)}>"


@dataclass(frozen=True)
class LawSchema:
    family: str
    name: str
    lhs: Term
    rhs: Term

    def variables(self) -> tuple[str, ...]:
        seen: list[str] = []

        def walk(t: Term) -> None:
            if t.head.startswith("?") and t.head not in seen:
                seen.append(t.head)
            for a in t.args:
                walk(a)

        walk(self.lhs)
        walk(self.rhs)
        return tuple(seen)

    def instantiate(self, env: dict[str, Term]) -> LawInstance:
        return LawInstance(self.family, self.name, _subst(self.lhs, env), _subst(self.rhs, env))


def _subst(t: Term, env: dict[str, Term]) -> Term:
    if t.head.startswith("?"):
        return env[t.head]
    if not t.args:
        return t
    return Term(t.head, tuple(_subst(a, env) for a in t.args))


def _u(op: str, t: Term) -> Term:
    return Term(op, (t,))


def _c(name: str) -> Term:
    return Term(name)


def _mu_term(mu: int, t: Term) -> Term:
    return space_power(mu, t)


VALUE_CONSTANTS = (ZERO, ONE, ZERO_F, ONE_F)


def unit_law_schemas() -> list[LawSchema]:
    """Family I: the projection/commutation laws of the space-time moves."""
    mk = lambda name, lhs, rhs: LawSchema("I", f"I.{name}", lhs, rhs)
    PX = _u(P, X)
    return [
        mk("PP", _u(P, PX), PX),
        mk("PT", _u(P, _u(T, X)), _u(T, X)),
        mk("TP", _u(T, PX), _u(T, X)),
        mk("PS", _u(P, _u(S, X)), _u(S, X)),
        mk("SP", _u(S, PX), _u(S, X)),
        mk("PSi", _u(P, _u(S_INV, X)), _u(S_INV, X)),
        mk("SiP", _u(S_INV, PX), _u(S_INV, X)),
        mk("PH", _u(P, _u(H, X)), _u(H, X)),
        mk("HP", _u(H, PX), _u(H, X)),
        mk("PNH", _u(P, Term(N_H, (X, Y, Z))), Term(N_H, (X, Y, Z))),
        mk("NHP", Term(N_H, (X, Y, _u(P, Z))), Term(N_H, (X, Y, Z))),
        mk("PK", _u(P, Term(K, (X, Y))), Term(K, (X, Y))),
        mk("KP", Term(K, (X, _u(P, Y))), Term(K, (X, Y))),
        mk("HS", _u(H, _u(S, X)), _u(H, X)),
        mk("HSi", _u(H, _u(S_INV, X)), _u(H, X)),
        mk("HH", _u(H, _u(H, X)), _u(H, X)),
        mk("HTH", _u(H, _u(T, _u(H, X))), _u(H, _u(T, X))),
        mk("TS", _u(T, _u(S, X)), _u(S, _u(T, X))),
        mk("TSi", _u(T, _u(S_INV, X)), _u(S_INV, _u(T, X))),
        mk("SSi", _u(S, _u(S_INV, X)), PX),
        mk("SiS", _u(S_INV, _u(S, X)), PX),
        mk("NHH", Term(N_H, (X, Y, _u(H, Z))), Term(N_H, (X, Y, Z))),
        mk("HNH", _u(H, Term(N_H, (X, Y, Z))), _u(H, _u(T, Z))),
    ]


def machine_law_schemas(m: AdjustedMachine, swap_lr_motion: bool = False) -> list[LawSchema]:
    """Family II: one step of the machine on the head square."""
    out: list[LawSchema] = []
    HX = _u(H, X)
    CS_HX = _u(C_S, HX)
    base = [q for q in m.states if q not in m.lr_states]
    for q, a in product(m.states, m.alphabet):
        nq, mu, na = m.step_data(q, a)
        out.append(LawSchema("II", f"II.NQ[{q},{a}]",
                             Term(N_Q, (_c(q), _c(a), HX)), _c(nq)))
        out.append(LawSchema("II", f"II.NS[{q},{a}]",
                             Term(N_S, (_c(q), _c(a), HX)), _c(na)))
        if q not in m.lr_states:
            out.append(LawSchema("II", f"II.NH[{q},{a}]",
                                 Term(N_H, (_c(q), _c(a), HX)),
                                 _mu_term(mu, _u(T, HX))))
    for q in base:
        ql, qr = f"{q}_L", f"{q}_R"
        mu_l = 1 if not swap_lr_motion else -1
        mu_r = -mu_l
        out.append(LawSchema("II", f"II.NQL[{q}]",
                             Term(N_Q, (_c(ql), CS_HX, HX)), _c(q)))
        out.append(LawSchema("II", f"II.NQR[{q}]",
                             Term(N_Q, (_c(qr), CS_HX, HX)), _c(q)))
        out.append(LawSchema("II", f"II.NHL[{q}]",
                             Term(N_H, (_c(ql), CS_HX, HX)), _mu_term(mu_l, _u(T, HX))))
        out.append(LawSchema("II", f"II.NHR[{q}]",
                             Term(N_H, (_c(qr), CS_HX, HX)), _mu_term(mu_r, _u(T, HX))))
        out.append(LawSchema("II", f"II.NSL[{q}]",
                             Term(N_S, (_c(ql), CS_HX, HX)), _c("e_L")))
        out.append(LawSchema("II", f"II.NSR[{q}]",
                             Term(N_S, (_c(qr), CS_HX, HX)), _c("e_R")))
    return out


def step_law_schemas() -> list[LawSchema]:
    """Family III: the next configuration from the current one."""
    HX = _u(H, X)
    triple = (_u(C_Q, HX), _u(C_S, HX), HX)
    return [
        LawSchema("III", "III.CS", _u(C_S, _u(T, HX)), Term(N_S, triple)),
        LawSchema("III", "III.CQ", _u(C_Q, _u(T, HX)), Term(N_Q, triple)),
        LawSchema("III", "III.HT", _u(H, _u(T, X)), Term(N_H, triple)),
    ]


def reading_law_schemas() -> list[LawSchema]:
    """Family IV: square reads are projection-invariant and off-head squares
    keep their letter across a time step."""
    PX = _u(P, X)
    HX = _u(H, X)
    return [
        LawSchema("IV", "IV.CQP", _u(C_Q, PX), _u(C_Q, X)),
        LawSchema("IV", "IV.CQH", _u(C_Q, HX), _u(C_Q, X)),
        LawSchema("IV", "IV.CSP", _u(C_S, X), _u(C_S, PX)),
        LawSchema("IV", "IV.CSTR1", _u(C_S, _u(T, PX)),
                  Term(C_STAR, (PX, Term(R, (PX, HX))))),
        LawSchema("IV", "IV.CSTR2", _u(C_S, _u(T, PX)),
                  Term(C_STAR, (PX, Term(R, (HX, PX))))),
        LawSchema("IV", "IV.CS1", _u(C_S, PX), Term(C_STAR, (PX, _c(ONE)))),
    ]


def comparison_law_schemas() -> list[LawSchema]:
    """Family V: R and F compare positions and times through U."""
    PX, PY = _u(P, X), _u(P, Y)
    return [
        LawSchema("V", "V.RP", Term(R, (X, Y)), Term(R, (PX, PY))),
        LawSchema("V", "V.FP", Term(F, (X, Y)), Term(F, (PX, PY))),
        LawSchema("V", "V.RPP", Term(R, (PX, PX)), _c(ZERO)),
        LawSchema("V", "V.RS", Term(R, (PX, _u(S, PY))), _u(U, Term(R, (PX, PY)))),
        LawSchema("V", "V.FH", Term(F, (PX, PY)), Term(F, (_u(H, X), _u(H, Y)))),
        LawSchema("V", "V.FPP", Term(F, (PX, PX)), _c(ZERO_F)),
        LawSchema("V", "V.FT", Term(F, (PX, _u(T, PY))), _u(U, Term(F, (PX, PY)))),
        LawSchema("V", "V.U0", _u(U, _c(ZERO)), _c(ONE)),
        LawSchema("V", "V.U1", _u(U, _c(ONE)), _c(ONE)),
        LawSchema("V", "V.U0F", _u(U, _c(ZERO_F)), _c(ONE_F)),
        LawSchema("V", "V.U1F", _u(U, _c(ONE_F)), _c(ONE_F)),
    ]


def projection_collapse_schemas(fbsig: FBSignature) -> list[LawSchema]:
    """Family VI: P of every non-space-time operation (constants included)
    is constant at P(c)."""
    PC = _u(P, _c(C))
    out = [
        LawSchema("VI", "VI.PU", _u(P, _u(U, X)), PC),
        LawSchema("VI", "VI.PE", _u(P, _u(E, X)), PC),
        LawSchema("VI", "VI.PCS", _u(P, _u(C_S, X)), PC),
        LawSchema("VI", "VI.PCQ", _u(P, _u(C_Q, X)), PC),
        LawSchema("VI", "VI.PF", _u(P, Term(F, (X, Y))), PC),
        LawSchema("VI", "VI.PR", _u(P, Term(R, (X, Y))), PC),
        LawSchema("VI", "VI.PKstar", _u(P, Term(K_STAR, (X, Y))), PC),
        LawSchema("VI", "VI.PCstar", _u(P, Term(C_STAR, (X, Y))), PC),
        LawSchema("VI", "VI.PNQ", _u(P, Term(N_Q, (X, Y, Z))), PC),
        LawSchema("VI", "VI.PNS", _u(P, Term(N_S, (X, Y, Z))), PC),
    ]
    for d in fbsig.constants():
        out.append(LawSchema("VI", f"VI.Pconst[{d}]", _u(P, _c(d)), PC))
    return out


def comparison_transfer_schemas(fbsig: FBSignature) -> list[LawSchema]:
    """Family VII: K collapses space-time under 0=1, and Kstar detects
    unwanted identifications."""
    PX, PY = _u(P, X), _u(P, Y)
    PC = _u(P, _c(C))
    out = [
        LawSchema("VII", "VII.K0", Term(K, (_c(ZERO), PX)), PX),
        LawSchema("VII", "VII.K1", Term(K, (_c(ONE), PX)), PC),
        LawSchema("VII", "VII.K0F", Term(K, (_c(ZERO_F), PX)), PX),
        LawSchema("VII", "VII.K1F", Term(K, (_c(ONE_F), PX)), PC),
    ]
    consts = fbsig.constants()
    letters = set(fbsig.letters)
    states = set(fbsig.states)
    for d in consts:
        out.append(LawSchema("VII", f"VII.Kdd[{d}]",
                             Term(K_STAR, (_c(d), _c(d))), _c(ZERO)))
        for e in consts:
            if d != e:
                out.append(LawSchema("VII", f"VII.Kde[{d},{e}]",
                                     Term(K_STAR, (_c(d), _c(e))), _c(ONE)))
        if d != C:
            out.append(LawSchema("VII", f"VII.KPd[{d}]",
                                 Term(K_STAR, (PX, _c(d))), _c(ONE)))
        if d not in letters:
            out.append(LawSchema("VII", f"VII.KCSd[{d}]",
                                 Term(K_STAR, (_u(C_S, PX), _c(d))), _c(ONE)))
        if d not in states:
            out.append(LawSchema("VII", f"VII.KCQd[{d}]",
                                 Term(K_STAR, (_u(C_Q, PX), _c(d))), _c(ONE)))
        if d not in (ZERO, ONE):
            out.append(LawSchema("VII", f"VII.KRd[{d}]",
                                 Term(K_STAR, (Term(R, (PX, PY)), _c(d))), _c(ONE)))
        if d not in (ZERO_F, ONE_F):
            out.append(LawSchema("VII", f"VII.KFd[{d}]",
                                 Term(K_STAR, (Term(F, (PX, PY)), _c(d))), _c(ONE)))
    # the five interpreted ranges: equal shape compares to 0, distinct
    # shapes to 1; each slot carries its own variables
    shapes = {
        "P": _u(P, Term("?x1")),
        "CS": _u(C_S, _u(P, Term("?x2"))),
        "CQ": _u(C_Q, _u(P, Term("?x3"))),
        "R": Term(R, (_u(P, Term("?x4")), _u(P, Term("?y4")))),
        "F": Term(F, (_u(P, Term("?x5")), _u(P, Term("?y5")))),
    }
    for tag, shape in shapes.items():
        out.append(LawSchema("VII", f"VII.Ktt[{tag}]",
                             Term(K_STAR, (shape, shape)), _c(ZERO)))
    for tag1, s1 in shapes.items():
        for tag2, s2 in shapes.items():
            if tag1 != tag2:
                out.append(LawSchema("VII", f"VII.Kst[{tag1},{tag2}]",
                                     Term(K_STAR, (s1, s2)), _c(ONE)))
    return out


def halting_law_schemas(m: AdjustedMachine) -> list[LawSchema]:
    """Family VIII: reached states map to 1, the halting state to 0."""
    return [
        LawSchema("VIII", "VIII.ECQ", _u(E, _u(C_Q, _u(P, X))), _c(ONE)),
        LawSchema("VIII", "VIII.Eh", _u(E, _c(m.halt)), _c(ZERO)),
    ]


def all_law_schemas(fbsig: FBSignature, swap_lr_motion: bool = False) -> list[LawSchema]:
    return (
        unit_law_schemas()
        + machine_law_schemas(fbsig.machine, swap_lr_motion)
        + step_law_schemas()
        + reading_law_schemas()
        + comparison_law_schemas()
        + projection_collapse_schemas(fbsig)
        + comparison_transfer_schemas(fbsig)
        + halting_law_schemas(fbsig.machine)
    )


def instantiate_laws(
    fbsig: FBSignature,
    domain: Iterable[Term],
    families: Optional[set[str]] = None,
    swap_lr_motion: bool = False,
) -> Iterator[LawInstance]:
    """Every schema instantiated with every tuple from the domain."""
    domain = list(domain)
    for schema in all_law_schemas(fbsig, swap_lr_motion):
        if families is not None and schema.family not in families:
            continue
        variables = schema.variables()
        if not variables:
            yield schema.instantiate({})
            continue
        for combo in product(domain, repeat=len(variables)):
            yield schema.instantiate(dict(zip(variables, combo)))


def _match(pattern: Term, t: Term, env: dict[str, Term]) -> bool:
    if pattern.head.startswith("?"):
        bound = env.get(pattern.head)
        if bound is None:
            env[pattern.head] = t
            return True
        return bound == t
    if pattern.head != t.head or len(pattern.args) != len(t.args):
        return False
    return all(_match(p, a, env) for p, a in zip(pattern.args, t.args))


def validate_law_instance(
    fbsig: FBSignature, lhs: Term, rhs: Term, swap_lr_motion: bool = False
) -> Optional[str]:
    """Name of a schema this ground equation instantiates, else None."""
    for schema in all_law_schemas(fbsig, swap_lr_motion):
        for a, b in ((lhs, rhs), (rhs, lhs)):
            env: dict[str, Term] = {}
            if _match(schema.lhs, a, env) and _match(schema.rhs, b, env):
                return schema.name
    return None

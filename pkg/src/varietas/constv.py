"""The constants-only machine-encoding variety.

All laws are ground: the space-time fragment is generated from the single
constant c (the head anchor is the law H(c) = c), machine steps act on the
head squares H_k = H(T^k(c)), and the two comparison operations are merged
into one.  Every law family is recursively enumerated; the word problem for
a presentation runs through the closure engine on a stage-zero partial
subalgebra built from the laws and a finite base table.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import count, product
from typing import Iterable, Iterator, Optional

from .config import Limits
from .congruence import CongruenceDecider, PartialSubalgebra
from .terms import (
    Equation, OperationSymbol, Presentation, Signature, Term, subterm_closure,
)
from .turing import AdjustedMachine
from .fb.laws import LawInstance
from .fb.base import BaseTable
from .fb.signature import (
    C, C_Q, C_S, E, F, H, K, N_H, N_Q, N_S, ONE, ONE_F, R, S, S_INV, T,
    ZERO, ZERO_F, space_power, time_power,
)

UNARY_C = (T, S, S_INV, H, C_S, C_Q, E)
BINARY_C = (F, R, K)
TERNARY_C = (N_H, N_Q, N_S)


@dataclass(frozen=True)
class CSignature:
    machine: AdjustedMachine = field(compare=False)
    signature: Signature = field(compare=False)

    def constants(self) -> list[str]:
        return [C, ZERO, ONE, ZERO_F, ONE_F,
                *self.machine.states, *self.machine.alphabet]


def build_c_signature(m: AdjustedMachine) -> CSignature:
    symbols = [OperationSymbol(n, 0) for n in (C, ZERO, ONE, ZERO_F, ONE_F)]
    symbols += [OperationSymbol(q, 0) for q in m.states]
    symbols += [OperationSymbol(a, 0) for a in m.alphabet]
    symbols += [OperationSymbol(n, 1) for n in UNARY_C]
    symbols += [OperationSymbol(n, 2) for n in BINARY_C]
    symbols += [OperationSymbol(n, 3) for n in TERNARY_C]
    return CSignature(m, Signature(symbols, inverses={S: S_INV}))


# ----------------------------------------------------------------------------
# the space-time fragment
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class LambdaC:
    """S^n T^m (H_k) with H_k the head square at time k; c itself is
    (0, 0, 0)."""
    space: int
    m: int
    k: int

    @property
    def time(self) -> int:
        return self.m + self.k

    def term(self) -> Term:
        core = Term(C) if self.k == 0 else Term(H, (time_power(self.k, Term(C)),))
        return space_power(self.space, time_power(self.m, core))

    def shifted(self, dspace: int = 0, dm: int = 0) -> "LambdaC":
        return LambdaC(self.space + dspace, self.m + dm, self.k)


def h_k(k: int) -> LambdaC:
    return LambdaC(0, 0, k)


class NotLambdaError(ValueError):
    pass


def normalize_c(t: Term) -> LambdaC:
    """Canonical coordinates of a term built from c via the four moves."""
    if t.is_leaf:
        if t.head == C:
            return LambdaC(0, 0, 0)
        raise NotLambdaError(f"{t!r} is not in the c-fragment")
    (arg,) = t.args if len(t.args) == 1 else (None,)
    if arg is None:
        raise NotLambdaError(f"{t!r} is not in the c-fragment")
    if t.head == S:
        return normalize_c(arg).shifted(dspace=1)
    if t.head == S_INV:
        return normalize_c(arg).shifted(dspace=-1)
    if t.head == T:
        return normalize_c(arg).shifted(dm=1)
    if t.head == H:
        inner = normalize_c(arg)
        return h_k(inner.time)
    raise NotLambdaError(f"{t!r} is not in the c-fragment")


def lambda_of(t: Term) -> Optional[LambdaC]:
    """Coordinates when t is the canonical term of a space-time element."""
    try:
        nf = normalize_c(t)
    except NotLambdaError:
        return None
    return nf if nf.term() == t else None


def nf_deep_c(t: Term) -> Term:
    if not t.args:
        return t
    t = Term(t.head, tuple(nf_deep_c(a) for a in t.args))
    if t.head in (S, S_INV, T, H):
        try:
            return normalize_c(t).term()
        except NotLambdaError:
            return t
    return t


# ----------------------------------------------------------------------------
# law enumeration
# ----------------------------------------------------------------------------

def _lam_tuples(size: int) -> Iterator[LambdaC]:
    for n_abs in range(size + 1):
        for m in range(size + 1 - n_abs):
            k = size - n_abs - m
            yield LambdaC(n_abs, m, k)
            if n_abs:
                yield LambdaC(-n_abs, m, k)


def law_instances_c(
    csig: CSignature, swap_lr_motion: bool = False
) -> Iterator[LawInstance]:
    """Total enumeration of the ground law families, in size-major order.

    The pushing-state head-step laws use the motion the machine realizes
    (the left-marker state returns right); ``swap_lr_motion`` restores the
    swapped signs.
    """
    m = csig.machine
    base = [q for q in m.states if q not in m.lr_states]
    consts = csig.constants()
    mu_l = 1 if not swap_lr_motion else -1
    seen: set[tuple[Term, Term]] = set()

    def emit(family: str, name: str, lhs: Term, rhs: Term):
        key = (lhs, rhs)
        if key not in seen:
            seen.add(key)
            return LawInstance(family, name, lhs, rhs)
        return None

    def batch(size: int) -> Iterator[LawInstance]:
        lams = list(_lam_tuples(size))
        if size == 0:
            out = emit("I", "I.Hc", Term(H, (Term(C),)), Term(C))
            if out:
                yield out
        for lam in lams:
            lt = lam.term()
            for op, moved in ((T, lam.shifted(dm=1)),
                              (S, lam.shifted(dspace=1)),
                              (S_INV, lam.shifted(dspace=-1))):
                out = emit("I", f"I.{op}[{lam}]", Term(op, (lt,)), moved.term())
                if out:
                    yield out
            out = emit("I", f"I.H[{lam}]", Term(H, (lt,)), h_k(lam.time).term())
            if out:
                yield out
        k = size
        hk = h_k(k).term()
        cs_hk = Term(C_S, (hk,))
        for q, a in product(m.states, m.alphabet):
            nq, mu, na = m.step_data(q, a)
            out = emit("II", f"II.NQ[{q},{a},{k}]",
                       Term(N_Q, (Term(q), Term(a), hk)), Term(nq))
            if out:
                yield out
            out = emit("II", f"II.NH[{q},{a},{k}]",
                       Term(N_H, (Term(q), Term(a), hk)),
                       LambdaC(mu, 1, k).term())
            if out:
                yield out
            if q not in m.lr_states:
                out = emit("II", f"II.NS[{q},{a},{k}]",
                           Term(N_S, (Term(q), Term(a), hk)), Term(na))
                if out:
                    yield out
        for q in base:
            pairs = [
                (N_Q, f"{q}_L", Term(q)), (N_Q, f"{q}_R", Term(q)),
                (N_H, f"{q}_L", LambdaC(mu_l, 1, k).term()),
                (N_H, f"{q}_R", LambdaC(-mu_l, 1, k).term()),
                (N_S, f"{q}_L", Term("e_L")), (N_S, f"{q}_R", Term("e_R")),
            ]
            for op, st, rhs in pairs:
                out = emit("II", f"II.{op}LR[{st},{k}]",
                           Term(op, (Term(st), cs_hk, hk)), rhs)
                if out:
                    yield out
        cq_hk = Term(C_Q, (hk,))
        triple = (cq_hk, cs_hk, hk)
        for op, lhs, name in (
            (N_S, Term(C_S, (LambdaC(0, 1, k).term(),)), "CS"),
            (N_Q, Term(C_Q, (LambdaC(0, 1, k).term(),)), "CQ"),
            (N_H, h_k(k + 1).term(), "H"),
        ):
            out = emit("III", f"III.{name}[{k}]", lhs, Term(op, triple))
            if out:
                yield out
        for lam in lams:
            out = emit("IV", f"IV.CQ[{lam}]",
                       Term(C_Q, (lam.term(),)),
                       Term(C_Q, (h_k(lam.time).term(),)))
            if out:
                yield out
        for lam in lams:
            lt = lam.term()
            out = emit("V", f"V.R0[{lam}]", Term(R, (lt, lt)), Term(ZERO))
            if out:
                yield out
            out = emit("V", f"V.F0[{lam}]", Term(F, (lt, lt)), Term(ZERO_F))
            if out:
                yield out
            for j in range(1, size + 1):
                out = emit("V", f"V.R1[{lam},{j}]",
                           Term(R, (lt, lam.shifted(dspace=j).term())), Term(ONE))
                if out:
                    yield out
                out = emit("V", f"V.F1[{lam},{j}]",
                           Term(F, (lt, lam.shifted(dm=j).term())), Term(ONE_F))
                if out:
                    yield out
            for gam in lams:
                out = emit("V", f"V.FH[{lam},{gam}]",
                           Term(F, (lt, gam.term())),
                           Term(F, (h_k(lam.time).term(), h_k(gam.time).term())))
                if out:
                    yield out
        for lam in lams:
            if lam.m >= 1 and lam.space != 0 and lam.m == 1:
                out = emit("VI", f"VI.CS[{lam}]",
                           Term(C_S, (lam.term(),)),
                           Term(C_S, (LambdaC(lam.space, 0, lam.k).term(),)))
                if out:
                    yield out
        for lam in lams:
            lt = lam.term()
            out = emit("VII", f"VII.K0[{lam}]", Term(K, (Term(ZERO), lt)), lt)
            if out:
                yield out
            out = emit("VII", f"VII.K1[{lam}]", Term(K, (Term(ONE), lt)), Term(C))
            if out:
                yield out
            for d in consts:
                if d != C:
                    out = emit("VII", f"VII.Klamd[{lam},{d}]",
                               Term(K, (lt, Term(d))), Term(ONE))
                    if out:
                        yield out
                if d not in m.alphabet:
                    out = emit("VII", f"VII.KCSd[{lam},{d}]",
                               Term(K, (Term(C_S, (lt,)), Term(d))), Term(ONE))
                    if out:
                        yield out
                if d not in m.states:
                    out = emit("VII", f"VII.KCQd[{lam},{d}]",
                               Term(K, (Term(C_Q, (lt,)), Term(d))), Term(ONE))
                    if out:
                        yield out
        if size == 0:
            for d in consts:
                out = emit("VII", f"VII.Kdd[{d}]",
                           Term(K, (Term(d), Term(d))), Term(ZERO))
                if out:
                    yield out
                for e in consts:
                    if d != e and e != C:
                        out = emit("VII", f"VII.Kde[{d},{e}]",
                                   Term(K, (Term(d), Term(e))), Term(ONE))
                        if out:
                            yield out
        for lam in lams:
            for gam in lams:
                lt, gt = lam.term(), gam.term()
                for d in consts:
                    # the origin constant is itself a space-time element, so
                    # the collapse laws must leave it out: on equal squares
                    # the comparison value is 0 and K(0, c) is already c
                    if d not in (ZERO, ONE, C):
                        out = emit("VII", f"VII.KRd[{lam},{gam},{d}]",
                                   Term(K, (Term(R, (lt, gt)), Term(d))), Term(ONE))
                        if out:
                            yield out
                    if d not in (ZERO_F, ONE_F, C):
                        out = emit("VII", f"VII.KFd[{lam},{gam},{d}]",
                                   Term(K, (Term(F, (lt, gt)), Term(d))), Term(ONE))
                        if out:
                            yield out
                shapes = {
                    "lam": lt, "CS": Term(C_S, (lt,)), "CQ": Term(C_Q, (lt,)),
                    "R": Term(R, (lt, gt)), "F": Term(F, (lt, gt)),
                }
                for tag, s in shapes.items():
                    out = emit("VII", f"VII.Ktt[{tag},{lam},{gam}]",
                               Term(K, (s, s)), Term(ZERO))
                    if out:
                        yield out
                for t1, t2 in product(shapes, shapes):
                    if t1 == t2:
                        continue
                    # comparison values in the first slot meet the collapse
                    # lines when the second slot is a square: those pairs
                    # would force c against the collapse value, so they are
                    # not laws of the merged-comparison variety
                    if t1 in ("R", "F") and t2 == "lam":
                        continue
                    out = emit("VII", f"VII.Kst[{t1},{t2},{lam},{gam}]",
                               Term(K, (shapes[t1], shapes[t2])), Term(ONE))
                    if out:
                        yield out
        for lam in lams:
            out = emit("VIII", f"VIII.ECQ[{lam}]",
                       Term(E, (Term(C_Q, (lam.term(),)),)), Term(ONE))
            if out:
                yield out
        if size == 0:
            out = emit("VIII", "VIII.Eh", Term(E, (Term(m.halt),)), Term(ZERO))
            if out:
                yield out

    for size in count(0):
        yield from batch(size)


def enumerate_laws_c(csig: CSignature, n: int, **kw) -> list[LawInstance]:
    out = []
    for inst in law_instances_c(csig, **kw):
        out.append(inst)
        if len(out) >= n:
            break
    return out


def law_instance_c(csig: CSignature, lhs: Term, rhs: Term,
                   search: int = 20000) -> Optional[str]:
    """Name of the enumerated law instance matching the equation, if it
    appears within the first ``search`` instances."""
    for inst in enumerate_laws_c(csig, search):
        if (inst.lhs, inst.rhs) in ((lhs, rhs), (rhs, lhs)):
            return inst.name
    return None


# ----------------------------------------------------------------------------
# degenerate case
# ----------------------------------------------------------------------------

def degenerate_relations_c(csig: CSignature) -> list[Equation]:
    """The finitely many equations equivalent to the laws once every
    space-time element collapses onto c."""
    m = csig.machine
    c = Term(C)
    eqs = [
        Equation(Term(S, (c,)), c),
        Equation(Term(S_INV, (c,)), c),
        Equation(Term(T, (c,)), c),
        Equation(Term(H, (c,)), c),
    ]
    for q, a in product(m.states, m.alphabet):
        nq, _, na = m.step_data(q, a)
        eqs.append(Equation(Term(N_Q, (Term(q), Term(a), c)), Term(nq)))
        eqs.append(Equation(Term(N_H, (Term(q), Term(a), c)), c))
        if q not in m.lr_states:
            eqs.append(Equation(Term(N_S, (Term(q), Term(a), c)), Term(na)))
    cs_c, cq_c = Term(C_S, (c,)), Term(C_Q, (c,))
    for q in m.states:
        if q in m.lr_states:
            continue
        for tag, marker in (("_L", "e_L"), ("_R", "e_R")):
            eqs.append(Equation(Term(N_Q, (Term(q + tag), cs_c, c)), Term(q)))
            eqs.append(Equation(Term(N_H, (Term(q + tag), cs_c, c)), c))
            eqs.append(Equation(Term(N_S, (Term(q + tag), cs_c, c)), Term(marker)))
    eqs.append(Equation(cs_c, Term(N_S, (cq_c, cs_c, c))))
    eqs.append(Equation(cq_c, Term(N_Q, (cq_c, cs_c, c))))
    eqs.append(Equation(c, Term(N_H, (cq_c, cs_c, c))))
    eqs.append(Equation(cq_c, Term(C_Q, (Term(H, (c,)),))))
    rcc, fcc = Term(R, (c, c)), Term(F, (c, c))
    eqs += [
        Equation(rcc, Term(ZERO)), Equation(rcc, Term(ONE)),
        Equation(fcc, Term(ZERO_F)), Equation(fcc, Term(ONE_F)),
        Equation(Term(K, (Term(ZERO), c)), c),
        Equation(Term(K, (Term(ONE), c)), c),
    ]
    consts = csig.constants()
    for d in consts:
        eqs.append(Equation(Term(K, (Term(d), Term(d))), Term(ZERO)))
        for e in consts:
            if d != e and e != C:
                eqs.append(Equation(Term(K, (Term(d), Term(e))), Term(ONE)))
        if d != C:
            eqs.append(Equation(Term(K, (c, Term(d))), Term(ONE)))
        if d not in m.alphabet:
            eqs.append(Equation(Term(K, (cs_c, Term(d))), Term(ONE)))
        if d not in m.states:
            eqs.append(Equation(Term(K, (cq_c, Term(d))), Term(ONE)))
        if d not in (ZERO, ONE):
            eqs.append(Equation(Term(K, (rcc, Term(d))), Term(ONE)))
        if d not in (ZERO_F, ONE_F):
            eqs.append(Equation(Term(K, (fcc, Term(d))), Term(ONE)))
    shapes = [c, cs_c, cq_c, rcc, fcc]
    for s in shapes:
        eqs.append(Equation(Term(K, (s, s)), Term(ZERO)))
    for s, t in product(shapes, shapes):
        if s != t:
            eqs.append(Equation(Term(K, (s, t)), Term(ONE)))
    eqs.append(Equation(Term(E, (cq_c,)), Term(ONE)))
    eqs.append(Equation(Term(E, (Term(m.halt),)), Term(ZERO)))
    return eqs


def solve_degenerate_c(p: Presentation, csig: CSignature,
                       lhs: Term, rhs: Term) -> bool:
    from .terms import evans_solve

    relations = list(p.relations) + degenerate_relations_c(csig)
    merged = Presentation(p.generators, tuple(relations), csig.signature)
    return evans_solve(merged, lhs, rhs)

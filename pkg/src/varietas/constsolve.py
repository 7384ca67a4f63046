"""Word-problem solver for the constants-only variety.

The non-degenerate route builds a decidable stage-zero partial subalgebra
(the law terms plus a finite base set around the presentation) and feeds it
to the generic closure engine; realizability implements the per-operation
case analysis.  The degenerate route collapses space-time onto c and hands
the finitely many remaining equations to the uniform solver.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Optional

from .config import Limits
from .congruence import CongruenceDecider, PartialSubalgebra
from .constv import (
    CSignature, LambdaC, build_c_signature, degenerate_relations_c, h_k,
    lambda_of, nf_deep_c, normalize_c, solve_degenerate_c,
)
from .fb.base import BaseTable
from .fb.solver import SolveOutcome
from .terms import Presentation, Term, subterm_closure
from .turing import AdjustedMachine, run
from .fb.signature import (
    C, C_Q, C_S, E, F, H, K, N_H, N_Q, N_S, ONE, ONE_F, R, S, S_INV, T,
    ZERO, ZERO_F, time_power,
)

_PENDING = object()


# ----------------------------------------------------------------------------
# the carrier A and its variety-equivalence
# ----------------------------------------------------------------------------

@dataclass
class ConstCarrier:
    csig: CSignature

    def __post_init__(self) -> None:
        self.machine = self.csig.machine
        self.consts = set(self.csig.constants())

    # -- canonical forms under the ground laws ---------------------------------

    def canon(self, t: Term) -> Term:
        lam = lambda_of(t)
        if lam is not None:
            return t
        if t.is_leaf:
            return t
        args = tuple(self.canon(a) for a in t.args)
        t = Term(t.head, args)
        head = t.head
        m = self.machine
        if head in (S, S_INV, T, H):
            lam = lambda_of_term(t)
            return lam.term() if lam is not None else t
        if head in (N_Q, N_S, N_H):
            shape = self.n_shape(t)
            x, y, z = t.args
            k = normalize_c(z).k if lambda_of(z) else None
            if shape == "machine":
                nq, mu, na = m.step_data(x.head, y.head)
                if head == N_Q:
                    return Term(nq)
                if head == N_S:
                    return Term(na)
                return LambdaC(mu, 1, k).term()
            if shape == "pushing":
                if head == N_Q:
                    return Term(m.return_state[x.head])
                if head == N_S:
                    return Term("e_L" if x.head.endswith("_L") else "e_R")
                side = 1 if x.head.endswith("_L") else -1
                return LambdaC(side, 1, k).term()
            if shape == "live":
                if head == N_Q:
                    return self.canon(Term(C_Q, (LambdaC(0, 1, k).term(),)))
                if head == N_S:
                    return self.canon(Term(C_S, (LambdaC(0, 1, k).term(),)))
                return h_k(k + 1).term()
            return t
        if head == C_Q:
            lam = lambda_of(t.args[0])
            if lam is not None:
                return Term(C_Q, (h_k(lam.time).term(),))
            return t
        if head == C_S:
            lam = lambda_of(t.args[0])
            if lam is not None and lam.m == 1 and lam.space != 0:
                return Term(C_S, (LambdaC(lam.space, 0, lam.k).term(),))
            return t
        if head == R:
            l1, l2 = lambda_of(t.args[0]), lambda_of(t.args[1])
            if l1 is not None and l2 is not None:
                if l1 == l2:
                    return Term(ZERO)
                if (l1.m, l1.k) == (l2.m, l2.k) and l2.space > l1.space:
                    return Term(ONE)
            return t
        if head == F:
            l1, l2 = lambda_of(t.args[0]), lambda_of(t.args[1])
            if l1 is not None and l2 is not None:
                if l2.time > l1.time:
                    return Term(ONE_F)
                if l2.time == l1.time:
                    return Term(ZERO_F)
                return Term(F, (h_k(l1.time).term(), h_k(l2.time).term()))
            return t
        if head == K:
            return self.canon_k(t)
        if head == E:
            (x,) = t.args
            if x.is_leaf and x.head == m.halt:
                return Term(ZERO)
            if x.args and x.head == C_Q and lambda_of(x.args[0]) is not None:
                return Term(ONE)
            return t
        return t

    def canon_k(self, t: Term) -> Term:
        a, b = t.args
        m = self.machine
        lam_b = lambda_of(b)
        if lam_b is not None and a.is_leaf:
            if a.head == ZERO:
                return b
            if a.head == ONE:
                return Term(C)
        if a == b and (self.shape_of(a) is not None
                       or (a.is_leaf and a.head in self.consts)):
            return Term(ZERO)
        if a.is_leaf and b.is_leaf and a.head in self.consts \
                and b.head in self.consts and a != b and b.head != C:
            return Term(ONE)
        sa, sb = self.shape_of(a), self.shape_of(b)
        if sa is not None and sb is not None and sa != sb:
            # comparison values in the first slot may still collapse onto a
            # square in the second, so those pairs carry no forced value
            if not (sa in (R, F) and sb == "lam"):
                return Term(ONE)
        if sa is not None and b.is_leaf and b.head in self.consts:
            excluded = {
                "lam": {C}, "CS": set(m.alphabet), "CQ": set(m.states),
                "R": {ZERO, ONE}, "F": {ZERO_F, ONE_F},
            }[sa]
            if b.head not in excluded:
                return Term(ONE)
        return t

    def shape_of(self, t: Term) -> Optional[str]:
        if lambda_of(t) is not None:
            return "lam"
        if t.args and t.head == C_S and lambda_of(t.args[0]) is not None:
            return "CS"
        if t.args and t.head == C_Q and lambda_of(t.args[0]) is not None:
            return "CQ"
        if t.args and t.head in (R, F):
            if all(lambda_of(a) is not None for a in t.args):
                return t.head
        return None

    def n_shape(self, t: Term) -> Optional[str]:
        x, y, z = t.args
        lam = lambda_of(z)
        if lam is None or lam != h_k(lam.k) or lam.m != 0 or lam.space != 0:
            return None
        m = self.machine
        if x.is_leaf and x.head in m.states and y.is_leaf and y.head in m.alphabet:
            if t.head == N_S and x.head in m.lr_states:
                return None
            return "machine"
        cs_z, cq_z = Term(C_S, (z,)), Term(C_Q, (z,))
        if x.is_leaf and x.head in m.lr_states and y == cs_z:
            return "pushing"
        if x == cq_z and y == cs_z:
            return "live"
        return None

    # -- membership -------------------------------------------------------------

    def member(self, t: Term) -> bool:
        if t.is_leaf:
            return t.head in self.consts
        if lambda_of(t) is not None:
            return True
        head = t.head
        if head in (C_S, C_Q):
            return lambda_of(t.args[0]) is not None
        if head in (R, F):
            return all(lambda_of(a) is not None for a in t.args)
        if head in (N_Q, N_S, N_H):
            return self.n_shape(t) is not None
        if head == E:
            (x,) = t.args
            if x.is_leaf and x.head == self.machine.halt:
                return True
            return bool(x.args) and x.head == C_Q \
                and lambda_of(x.args[0]) is not None
        if head == K:
            a, b = t.args
            if lambda_of(b) is not None:
                if a.is_leaf and a.head in (ZERO, ONE):
                    return True
                if self.shape_of(a) is not None:
                    return True
                return False
            if a.is_leaf and b.is_leaf and a.head in self.consts \
                    and b.head in self.consts:
                return a == b or b.head != C
            sa, sb = self.shape_of(a), self.shape_of(b)
            if sa is not None and sb is not None and (a == b or sa != sb):
                return True
            if sa is not None and b.is_leaf and b.head in self.consts:
                excluded = {
                    "lam": {C}, "CS": set(self.machine.alphabet),
                    "CQ": set(self.machine.states),
                    "R": {ZERO, ONE}, "F": {ZERO_F, ONE_F},
                }[sa]
                return b.head not in excluded
            return False
        return False

    def variety_equal(self, s: Term, t: Term) -> bool:
        return self.canon(s) == self.canon(t)


def lambda_of_term(t: Term) -> Optional[LambdaC]:
    from .constv import NotLambdaError
    try:
        return normalize_c(t)
    except NotLambdaError:
        return None


# ----------------------------------------------------------------------------
# stage zero around a presentation
# ----------------------------------------------------------------------------

@dataclass
class ConstA0:
    carrier: ConstCarrier
    presentation: Presentation
    b_set: frozenset[Term]
    table: BaseTable
    max_time: int
    space_window: int = 32
    time_window: int = 32
    _memo: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.machine = self.carrier.machine
        self._a_and_b = [t for t in sorted(self.b_set, key=str)
                         if self.carrier.member(t)]

    def member(self, t: Term) -> bool:
        return t in self.b_set or self.carrier.member(t)

    # -- machine facts ----------------------------------------------------------

    def _memoized(self, key, fn):
        if key in self._memo:
            v = self._memo[key]
            return None if v is _PENDING else v
        self._memo[key] = _PENDING
        out = fn()
        self._memo[key] = out
        return out

    def head_pos(self, k: int) -> Optional[int]:
        if k == 0:
            return 0
        def compute():
            if k <= self.max_time:
                for member in self.table.class_members(h_k(k).term()):
                    lam = lambda_of(member)
                    if lam is not None and lam.k == 0 and lam.m == k:
                        return lam.space
            q = self.cq_at(k - 1)
            prev = self.head_pos(k - 1)
            if q is None or prev is None:
                return None
            if q in self.machine.lr_states:
                return prev + (1 if q.endswith("_L") else -1)
            a = self.cs_at_head(k - 1)
            if a is None:
                return None
            _, mu, _ = self.machine.step_data(q, a)
            return prev + mu
        return self._memoized(("head", k), compute)

    def cq_at(self, k: int) -> Optional[str]:
        def compute():
            if k <= self.max_time:
                anchor = Term(C_Q, (h_k(k).term(),))
                for member in self.table.class_members(anchor):
                    if member.is_leaf and member.head in self.machine.states:
                        return member.head
            if k > 0:
                q = self.cq_at(k - 1)
                if q is None:
                    return None
                if q in self.machine.lr_states:
                    return self.machine.return_state[q]
                a = self.cs_at_head(k - 1)
                if a is None:
                    return None
                nq, _, _ = self.machine.step_data(q, a)
                return nq
            return None
        return self._memoized(("cq", k), compute)

    def cs_at_head(self, k: int) -> Optional[str]:
        h = self.head_pos(k)
        if h is None:
            return None
        return self.cs_abs(h, k)

    def cs_abs(self, n: int, mtime: int) -> Optional[str]:
        def compute():
            if mtime <= self.max_time:
                t = Term(C_S, (LambdaC(n, mtime, 0).term(),))
                for member in self.table.class_members(t):
                    if member.is_leaf and member.head in self.machine.alphabet:
                        return member.head
            if mtime > 0:
                h_prev = self.head_pos(mtime - 1)
                if h_prev is None:
                    return None
                if n != h_prev:
                    return self.cs_abs(n, mtime - 1)
                q = self.cq_at(mtime - 1)
                if q is None:
                    return None
                if q in self.machine.lr_states:
                    return "e_L" if q.endswith("_L") else "e_R"
                a = self.cs_abs(h_prev, mtime - 1)
                if a is None:
                    return None
                _, _, printed = self.machine.step_data(q, a)
                return printed
            return None
        return self._memoized(("cs", n, mtime), compute)

    # -- element equivalence ------------------------------------------------------

    def absolute(self, lam: LambdaC) -> Optional[tuple[int, int]]:
        if lam.k == 0:
            return (lam.space, lam.m)
        h = self.head_pos(lam.k)
        if h is None:
            return None
        return (lam.space + h, lam.m + lam.k)

    def lam_eq(self, a: LambdaC, b: LambdaC) -> bool:
        if a == b:
            return True
        if a.time <= self.max_time and b.time <= self.max_time:
            if self.table.equal(a.term(), b.term()):
                return True
        pa, pb = self.absolute(a), self.absolute(b)
        return pa is not None and pb is not None and pa == pb

    def as_lam(self, t: Term) -> Optional[LambdaC]:
        t = self.carrier.canon(nf_deep_c(t))
        lam = lambda_of(t)
        if lam is not None:
            return lam
        if t in self.b_set:
            for member in self.table.class_members(t):
                lam = lambda_of(member)
                if lam is not None:
                    return lam
        return None

    def r_value(self, a: LambdaC, b: LambdaC) -> Optional[str]:
        if self.lam_eq(a, b):
            return ZERO
        if a.time <= self.max_time and b.time <= self.max_time:
            t = Term(R, (a.term(), b.term()))
            if self.table.equal(t, Term(ZERO)):
                return ZERO
            if self.table.equal(t, Term(ONE)):
                return ONE
        pa, pb = self.absolute(a), self.absolute(b)
        if pa is not None and pb is not None and pa[1] == pb[1] and pb[0] > pa[0]:
            return ONE
        if (a.m, a.k) == (b.m, b.k) and b.space > a.space:
            return ONE
        return None

    def f_value(self, a: LambdaC, b: LambdaC) -> Optional[str]:
        if b.time > a.time:
            return ONE_F
        if b.time == a.time:
            return ZERO_F
        if a.time <= self.max_time and b.time <= self.max_time:
            t = Term(F, (a.term(), b.term()))
            for v in (ZERO_F, ONE_F):
                if self.table.equal(t, Term(v)):
                    return v
        return None

    def cs_value(self, lam: LambdaC) -> Optional[str]:
        pos = self.absolute(lam)
        if pos is not None:
            v = self.cs_abs(*pos)
            if v is not None:
                return v
        if lam.time <= self.max_time:
            t = Term(C_S, (lam.term(),))
            for member in self.table.class_members(t):
                if member.is_leaf and member.head in self.machine.alphabet:
                    return member.head
        return None

    def eq(self, s: Term, t: Term) -> bool:
        s = self.carrier.canon(nf_deep_c(s))
        t = self.carrier.canon(nf_deep_c(t))
        if s == t:
            return True
        key = ("eq", s, t)
        if key in self._memo:
            v = self._memo[key]
            return False if v is _PENDING else v
        self._memo[key] = _PENDING
        out = self._eq(s, t)
        self._memo[key] = out
        return out

    def _eq(self, s: Term, t: Term) -> bool:
        in_b_s, in_b_t = s in self.b_set, t in self.b_set
        if in_b_s and in_b_t:
            if self.table.equal(s, t):
                return True
        ks, kt = self._kind(s), self._kind(t)
        if ks is not None and kt is not None:
            return self._eq_core(ks, kt)
        if in_b_s and kt is not None:
            return self._eq_bridge(s, kt)
        if in_b_t and ks is not None:
            return self._eq_bridge(t, ks)
        return False

    def _eq_bridge(self, b: Term, kind) -> bool:
        for c in self._a_and_b:
            kc = self._kind(c)
            if kc is not None and self._eq_core(kind, kc) \
                    and self.table.equal(c, b):
                return True
        return False

    def _kind(self, t: Term):
        if t.is_leaf and t.head in self.carrier.consts:
            return ("const", t.head)
        lam = lambda_of(t)
        if lam is not None:
            return ("lam", lam)
        if t.args and t.head in (C_S, C_Q):
            lam = lambda_of(t.args[0])
            if lam is not None:
                return (t.head, lam)
        if t.args and t.head in (R, F):
            l1, l2 = lambda_of(t.args[0]), lambda_of(t.args[1])
            if l1 is not None and l2 is not None:
                return (t.head, (l1, l2))
        if t.args and t.head == K:
            l1, l2 = lambda_of(t.args[0]), lambda_of(t.args[1])
            if l1 is not None and l2 is not None:
                return ("K", (l1, l2))
        return None

    def _eq_core(self, ks, kt) -> bool:
        tag_s, tag_t = ks[0], kt[0]
        if tag_s == "const" and tag_t == "const":
            return ks[1] == kt[1]
        if tag_s == "lam" and tag_t == "lam":
            return self.lam_eq(ks[1], kt[1])
        if {tag_s, tag_t} == {"lam", "const"}:
            lam = ks[1] if tag_s == "lam" else kt[1]
            d = kt[1] if tag_s == "lam" else ks[1]
            if d == C:
                return self.lam_eq(lam, LambdaC(0, 0, 0))
            if lam.time <= self.max_time:
                return self.table.equal(lam.term(), Term(d))
            return False
        if tag_s == C_S and tag_t == C_S:
            va, vb = self.cs_value(ks[1]), self.cs_value(kt[1])
            if va is not None and vb is not None:
                return va == vb
            if self.lam_eq(ks[1], kt[1]):
                return True
            if ks[1].time <= self.max_time and kt[1].time <= self.max_time:
                return self.table.equal(Term(C_S, (ks[1].term(),)),
                                        Term(C_S, (kt[1].term(),)))
            return False
        if {tag_s, tag_t} == {C_S, "const"}:
            lam = ks[1] if tag_s == C_S else kt[1]
            d = kt[1] if tag_s == C_S else ks[1]
            return d in self.machine.alphabet and self.cs_value(lam) == d
        if tag_s == C_Q and tag_t == C_Q:
            va, vb = self.cq_at(ks[1].time), self.cq_at(kt[1].time)
            if va is not None and vb is not None:
                return va == vb
            if ks[1].time == kt[1].time:
                return True
            if ks[1].time <= self.max_time and kt[1].time <= self.max_time:
                return self.table.equal(
                    Term(C_Q, (h_k(ks[1].time).term(),)),
                    Term(C_Q, (h_k(kt[1].time).term(),)))
            return False
        if {tag_s, tag_t} == {C_Q, "const"}:
            lam = ks[1] if tag_s == C_Q else kt[1]
            d = kt[1] if tag_s == C_Q else ks[1]
            return d in self.machine.states and self.cq_at(lam.time) == d
        if tag_s == R and tag_t == R:
            v1, v2 = self.r_value(*ks[1]), self.r_value(*kt[1])
            if v1 is not None and v2 is not None:
                return v1 == v2
            return self.lam_eq(ks[1][0], kt[1][0]) and self.lam_eq(ks[1][1], kt[1][1])
        if {tag_s, tag_t} == {R, "const"}:
            pair = ks[1] if tag_s == R else kt[1]
            d = kt[1] if tag_s == R else ks[1]
            return d in (ZERO, ONE) and self.r_value(*pair) == d
        if tag_s == F and tag_t == F:
            v1, v2 = self.f_value(*ks[1]), self.f_value(*kt[1])
            if v1 is not None and v2 is not None:
                return v1 == v2
            return self.lam_eq(ks[1][0], kt[1][0]) and self.lam_eq(ks[1][1], kt[1][1])
        if {tag_s, tag_t} == {F, "const"}:
            pair = ks[1] if tag_s == F else kt[1]
            d = kt[1] if tag_s == F else ks[1]
            return d in (ZERO_F, ONE_F) and self.f_value(*pair) == d
        if tag_s == "K" and tag_t == "K":
            return self.lam_eq(ks[1][0], kt[1][0]) and self.lam_eq(ks[1][1], kt[1][1])
        return False

    # -- realizability (the closure hypothesis) ------------------------------------

    def realize(self, op: str, args: tuple[Term, ...]) -> Optional[Term]:
        m = self.machine
        if op in (T, S, S_INV, H):
            lam = self.as_lam(args[0])
            return Term(op, (lam.term(),)) if lam is not None else None
        if op in (R, F):
            l1, l2 = self.as_lam(args[0]), self.as_lam(args[1])
            if l1 is not None and l2 is not None:
                return Term(op, (l1.term(), l2.term()))
            return None
        if op in (C_Q, C_S):
            lam = self.as_lam(args[0])
            return Term(op, (lam.term(),)) if lam is not None else None
        if op in (N_Q, N_S, N_H):
            a1, a2, a3 = args
            lam = self.as_lam(a3)
            if lam is None:
                return None
            k = lam.time
            anchor = h_k(k)
            if not self.lam_eq(lam, anchor):
                return None
            hk_t = anchor.term()
            for q in m.states:
                if not self.eq(a1, Term(q)):
                    continue
                if q in m.lr_states:
                    if self.eq(a2, Term(C_S, (hk_t,))):
                        return Term(op, (Term(q), Term(C_S, (hk_t,)), hk_t))
                    continue
                for a in m.alphabet:
                    if self.eq(a2, Term(a)):
                        return Term(op, (Term(q), Term(a), hk_t))
            if self.eq(a1, Term(C_Q, (hk_t,))) and self.eq(a2, Term(C_S, (hk_t,))):
                return Term(op, (Term(C_Q, (hk_t,)), Term(C_S, (hk_t,)), hk_t))
            return None
        if op == E:
            (a,) = args
            if self.eq(a, Term(m.halt)):
                return Term(E, (Term(m.halt),))
            rep = self._cq_image_rep(a)
            if rep is not None:
                return Term(E, (rep,))
            return None
        if op == K:
            return self._realize_k(args)
        return None

    def _cq_image_rep(self, a: Term) -> Optional[Term]:
        ka = self._kind(self.carrier.canon(nf_deep_c(a)))
        if ka is not None and ka[0] == C_Q:
            return Term(C_Q, (ka[1].term(),))
        if a in self.b_set:
            for member in self.table.class_members(a):
                km = self._kind(member)
                if km is not None and km[0] == C_Q:
                    return Term(C_Q, (km[1].term(),))
        for q in self.machine.states:
            if self.eq(a, Term(q)):
                for k in range(self.max_time + 1):
                    if self.cq_at(k) == q:
                        return Term(C_Q, (h_k(k).term(),))
        return None

    def _shape_rep(self, a: Term) -> Optional[tuple[str, Term]]:
        canon = self.carrier.canon(nf_deep_c(a))
        ka = self._kind(canon)
        if ka is not None:
            tag = ka[0]
            if tag == "lam":
                return ("lam", ka[1].term())
            if tag in (C_S, C_Q):
                return (tag, Term(tag, (ka[1].term(),)))
            if tag in (R, F):
                return (tag, Term(tag, (ka[1][0].term(), ka[1][1].term())))
            if tag == "const":
                return ("const", canon)
        if a in self.b_set:
            for member in self.table.class_members(a):
                if member != a:
                    rep = self._shape_rep(member)
                    if rep is not None and rep[0] != "const":
                        return rep
                km = self._kind(member)
                if km is not None and km[0] == "const":
                    return ("const", member)
        return None

    def _realize_k(self, args: tuple[Term, Term]) -> Optional[Term]:
        a1, a2 = args
        r1, r2 = self._shape_rep(a1), self._shape_rep(a2)
        lam2 = self.as_lam(a2)
        if lam2 is not None:
            # second slot a space-time element
            for v in (ZERO, ONE):
                if self.eq(a1, Term(v)):
                    return Term(K, (Term(v), lam2.term()))
            if r1 is not None and r1[0] != "const":
                return Term(K, (r1[1], lam2.term()))
            return None
        if r1 is not None and r1[0] == "const" and r2 is not None \
                and r2[0] == "const":
            d, e = r1[1], r2[1]
            if d == e or e.head != C:
                return Term(K, (d, e))
            return None
        lam1 = self.as_lam(a1)
        if lam1 is not None and r2 is not None:
            if r2[0] == "const" and r2[1].head != C:
                return Term(K, (lam1.term(), r2[1]))
            if r2[0] != "const":
                return Term(K, (lam1.term(), r2[1]))
            return None
        if r1 is not None and r2 is not None and r1[0] != "const":
            excluded = {
                C_S: set(self.machine.alphabet), C_Q: set(self.machine.states),
                R: {ZERO, ONE}, F: {ZERO_F, ONE_F},
            }.get(r1[0], set())
            if r2[0] == "const" and r2[1].head not in excluded:
                return Term(K, (r1[1], r2[1]))
            if r2[0] != "const":
                if r1[0] != r2[0]:
                    return Term(K, (r1[1], r2[1]))
                if self.eq(a1, a2):
                    return Term(K, (r1[1], r1[1]))
        return None

    def as_subalgebra(self) -> PartialSubalgebra:
        return PartialSubalgebra(self.member, self.eq, self.realize)


# ----------------------------------------------------------------------------
# building the base set and table
# ----------------------------------------------------------------------------

def _close_f_bar_c(
    lams: Iterable[LambdaC], table: BaseTable,
) -> set[LambdaC]:
    # one saturate/span/peel pass per time layer, top-down
    elems = set(lams)
    m_top = max((e.time for e in elems), default=0)
    for j in range(m_top + 1):
        elems.add(LambdaC(0, j, 0))
    for layer_time in range(m_top, -1, -1):
        layer = {e for e in elems if e.time == layer_time}
        saturated = set(layer)
        for e in layer:
            for member in table.class_members(e.term()):
                lam = lambda_of(member)
                if lam is not None and lam.time == layer_time:
                    saturated.add(lam)
        spaces = [e.space for e in saturated] + [0]
        k1, k2 = max(spaces), min(spaces)
        for e in saturated:
            for k in range(-k1, -k2 + 1):
                elems.add(e.shifted(dspace=k))
        elems.update(saturated)
        for e in list(elems):
            if e.time != layer_time:
                continue
            n = e.space
            step = -1 if n > 0 else 1
            while n != 0:
                n += step
                elems.add(LambdaC(n, e.m, e.k))
            for mm in range(e.m - 1, -1, -1):
                elems.add(LambdaC(0, mm, e.k))
            for kk in range(e.k, -1, -1):
                elems.add(LambdaC(0, kk, 0))
                elems.add(h_k(kk))
            if e.m >= 1:
                elems.add(e.shifted(dm=-1))
    return elems


def build_a0_const(
    p: Presentation, csig: CSignature, oracle: BaseTable,
    provenance: str, limits: Limits = Limits(),
) -> ConstA0:
    carrier = ConstCarrier(csig)
    base_terms: set[Term] = set()
    for eq in p.relations:
        base_terms.add(nf_deep_c(eq.lhs))
        base_terms.add(nf_deep_c(eq.rhs))
    b = set(subterm_closure(base_terms))
    for d in csig.constants():
        b.add(Term(d))
    for t in sorted(b, key=str):
        members = oracle.class_members(t) if oracle.covers(t) else [t]
        lam_reps = [u for u in members if lambda_of(u) is not None]
        a_reps = [u for u in members if carrier.member(u)]
        if lam_reps:
            b.add(sorted(lam_reps, key=str)[0])
        elif a_reps:
            b.add(sorted(a_reps, key=str)[0])
    lams = [lambda_of(t) for t in sorted(b, key=str)]
    f_bar = _close_f_bar_c([l for l in lams if l is not None], oracle)
    b |= {e.term() for e in f_bar}
    f_terms = sorted((e.term() for e in f_bar), key=str)
    for t in f_terms:
        b.add(Term(C_Q, (t,)))
        b.add(Term(C_S, (t,)))
    for t, u in product(f_terms, f_terms):
        b.add(Term(R, (t, u)))
        b.add(Term(F, (t, u)))
    b = set(subterm_closure(b))
    cls = {t: c for t, c in oracle._cls.items() if t in b}
    next_id = max(cls.values(), default=-1) + 1
    for t in b:
        if t not in cls:
            cls[t] = next_id
            next_id += 1
    table = BaseTable(frozenset(b), cls, provenance)
    max_time = max((e.time for e in f_bar), default=0)
    return ConstA0(carrier, p, frozenset(b), table, max_time,
                   limits.space_window, limits.time_window)


def derive_base_table_c(
    p: Presentation, m: AdjustedMachine, csig: CSignature,
    horizon: int = 8, span: int = 6,
) -> BaseTable:
    """Sound saturation of ground facts and law consequences."""
    from .fb.base import _saturate

    carrier = ConstCarrier(csig)
    pairs: list[tuple[Term, Term]] = []
    for eq in p.relations:
        pairs.append((nf_deep_c(eq.lhs), nf_deep_c(eq.rhs)))
    # simulate from the encoded tape if the presentation is one
    try:
        from .fb.encode import tape_from_presentation
        tape = tape_from_presentation(p, m)
    except Exception:
        tape = None
    if tape is not None:
        tr = run(m, tape, horizon)
        for t, row in enumerate(tr.rows):
            pairs.append((h_k(t).term(), LambdaC(row.head, t, 0).term()))
            pairs.append((Term(C_Q, (h_k(t).term(),)), Term(row.state)))
            for n, a in row.cells:
                pairs.append((Term(C_S, (LambdaC(n, t, 0).term(),)), Term(a)))
            if row.state == m.halt:
                break
    lam_window = [LambdaC(n, mm, 0)
                  for n in range(-span, span + 1) for mm in range(horizon + 1)]
    lam_window += [h_k(k) for k in range(horizon + 1)]
    for e in lam_window:
        t = e.term()
        pairs.append((Term(R, (t, t)), Term(ZERO)))
        pairs.append((Term(F, (t, t)), Term(ZERO_F)))
        for j in range(1, span + 1):
            pairs.append((Term(R, (t, e.shifted(dspace=j).term())), Term(ONE)))
        for j in range(1, horizon + 1):
            pairs.append((Term(F, (t, e.shifted(dm=j).term())), Term(ONE_F)))
    universe: set[Term] = set()
    for a, b in pairs:
        universe.add(a)
        universe.add(b)
    universe |= {e.term() for e in lam_window}
    universe |= {Term(C_S, (e.term(),)) for e in lam_window}
    universe |= {Term(C_Q, (e.term(),)) for e in lam_window}
    universe |= {Term(E, (Term(C_Q, (e.term(),)),)) for e in lam_window}
    universe = set(subterm_closure(universe))
    for t in list(universe):
        canon = carrier.canon(t)
        if canon != t:
            pairs.append((t, canon))
            universe.add(canon)
    table = _saturate(set(subterm_closure(universe)), pairs)
    return BaseTable(table.domain, table._cls, "derived")


# ----------------------------------------------------------------------------
# the solver
# ----------------------------------------------------------------------------

def decide_const(
    p: Presentation,
    m: AdjustedMachine,
    lhs: Term,
    rhs: Term,
    case: str = "auto",
    limits: Limits = Limits(),
    base_table: Optional[BaseTable] = None,
    csig: Optional[CSignature] = None,
) -> SolveOutcome:
    if csig is None:
        csig = build_c_signature(m)
    if case not in ("auto", "degenerate", "nondegenerate"):
        raise ValueError(f"unknown case {case!r}")
    if case == "auto":
        degenerate = _halts_within(p, m, limits.time_window)
        case = "degenerate" if degenerate else "nondegenerate"
    if case == "degenerate":
        equal = solve_degenerate_c(p, csig, lhs, rhs)
        return SolveOutcome("equal" if equal else "unequal", "degenerate", "none")
    if base_table is None:
        oracle = derive_base_table_c(p, m, csig, horizon=limits.bt_horizon)
        provenance = "derived"
    else:
        oracle, provenance = base_table, base_table.provenance
    a0 = build_a0_const(p, csig, oracle, provenance, limits)
    decider = CongruenceDecider(a0.as_subalgebra())
    equal = decider.decide(nf_deep_c(lhs), nf_deep_c(rhs))
    return SolveOutcome("equal" if equal else "unequal", "nondegenerate", provenance)


def _halts_within(p: Presentation, m: AdjustedMachine, horizon: int) -> bool:
    try:
        from .fb.encode import tape_from_presentation
        tape = tape_from_presentation(p, m)
    except Exception:
        return False
    return run(m, tape, horizon).halted_at is not None

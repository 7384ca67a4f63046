"""The staged partial-subalgebra solver for the non-degenerate case.

Stage zero is the carrier A united with the finite set B; its equivalence is
driven by the base table in the small-time zone (times up to each
component's maximum in B) and by the machine-step recursion above it.  Each
later stage adjoins the images of the ten non-space-time operations, then
either head-step or comparison-collapse terms (alternating by parity), then
the space/time-shift prefixes of the new elements.

Queries are on deeply normalized terms (every maximal space-time subterm in
normal form); use :func:`nf_deep` at the boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from ..terms import Term, subterm_closure
from .signature import (
    C, C_Q, C_S, C_STAR, E, F, H, K, K_STAR, N_H, N_Q, N_S,
    ONE, ONE_F, P, R, S, S_INV, T, U, ZERO, ZERO_F,
    SPACE_TIME_OPS, space_power, time_power,
)
from .normal import (
    SHAPE_H, SHAPE_NH, SHAPE_ST, NotSpaceTimeError, SpaceTimeNormalForm,
    normalize_space_time,
)
from .base import BaseData, BaseSets, BaseTable, VALUE_CONSTS

TEN_OPS = (R, F, U, C_Q, N_Q, C_S, N_S, C_STAR, E, K_STAR)

_PENDING = object()


def nf_deep(t: Term, generators: tuple[str, ...] = ()) -> Term:
    """Normalize every maximal space-time subterm, bottom-up."""
    if not t.args:
        return t
    t = Term(t.head, tuple(nf_deep(a, generators) for a in t.args))
    if t.head in SPACE_TIME_OPS:
        return normalize_space_time(t, generators).term()
    return t


def route_term(t: Term, bs: BaseSets) -> Optional[Term]:
    """Canonical partner of an ignorable carrier element (a ground law
    consequence), or None when the term has no routing."""
    if not t.args:
        return None
    head = t.head
    m = bs.fbsig.machine
    if head == U:
        (x,) = t.args
        if x.is_leaf and x.head in (ZERO, ONE):
            return Term(ONE)
        if x.is_leaf and x.head in (ZERO_F, ONE_F):
            return Term(ONE_F)
        if x.args and x.head == R and bs._rf_pair(x):
            lam, gam = x.args
            return Term(R, (lam, nf_deep(Term(S, (gam,)), bs.presentation.generators)))
        if x.args and x.head == F and bs._rf_pair(x):
            lam, gam = x.args
            return Term(F, (lam, nf_deep(Term(T, (gam,)), bs.presentation.generators)))
        return None
    if head in (N_Q, N_S):
        shape = bs._n_family(t)
        x, y, z = t.args
        if shape == "machine":
            nq, _, na = m.step_data(x.head, y.head)
            return Term(nq if head == N_Q else na)
        if shape == "pushing" and head == N_Q:
            return Term(m.return_state[x.head])
        if shape == "live":
            nxt = nf_deep(Term(T, (z,)), bs.presentation.generators)
            return Term(C_Q if head == N_Q else C_S, (nxt,))
        return None
    if head == C_STAR:
        shape = bs._cstar_shape(t)
        lam = t.args[0]
        if shape == "one":
            return Term(C_S, (lam,))
        if shape in ("right", "left"):
            return Term(C_S, (nf_deep(Term(T, (lam,)), bs.presentation.generators),))
        return None
    if head == K:
        a, b = t.args
        if bs.lam_member(b) is not None and a.is_leaf:
            if a.head in (ZERO, ZERO_F):
                return b
            if a.head in (ONE, ONE_F):
                return Term(P, (Term(C),))
        return None
    if head == K_STAR:
        shape = bs._kstar_shape(t)
        if shape == "consts":
            return Term(ZERO if t.args[0] == t.args[1] else ONE)
        if shape in ("diag",):
            return Term(ZERO)
        if shape == "shapes":
            return Term(ZERO if t.args[0] == t.args[1] else ONE)
        if shape in ("lam-const", "cs-const", "cq-const", "r-const", "f-const"):
            return Term(ONE)
        return None
    if head == E:
        (x,) = t.args
        if x.is_leaf and x.head == m.halt:
            return Term(ZERO)
        if x.args and x.head == C_Q and bs.lam_member(x.args[0]) is not None:
            return Term(ONE)
        return None
    return None


def nf_presentation(p, generators=None):
    """The presentation with every space-time subterm in normal form."""
    from ..terms import Equation, Presentation

    gens = p.generators if generators is None else generators
    relations = tuple(
        Equation(nf_deep(eq.lhs, gens), nf_deep(eq.rhs, gens))
        for eq in p.relations
    )
    return Presentation(p.generators, relations, p.signature)


# ----------------------------------------------------------------------------
# stage zero
# ----------------------------------------------------------------------------

@dataclass
class A0Decider:
    """Membership and equivalence on the stage-zero partial subalgebra."""

    bd: BaseData
    swap_lr_motion: bool = False
    _memo_lam: dict = field(default_factory=dict)
    _memo_val: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.bs: BaseSets = self.bd.bs
        self.bt: BaseTable = self.bd.table
        self.machine = self.bs.fbsig.machine
        self.gens = self.bs.presentation.generators
        self._a_and_b = [t for t in sorted(self.bd.b_set, key=str)
                         if self.bs.a_member(t)]
        self._bt_r_facts = self._collect_rf_facts(R, (ZERO, ONE))
        self._bt_f_facts = self._collect_rf_facts(F, (ZERO_F, ONE_F))

    # -- plumbing -------------------------------------------------------------

    def _collect_rf_facts(self, op: str, values: tuple[str, str]):
        facts = []
        for t in self.bd.b_set:
            if t.args and t.head == op:
                pair = self.bs._rf_pair(t)
                if pair is None:
                    continue
                val = None
                for v in values:
                    if self.bt.equal(t, Term(v)):
                        val = v
                if val is not None:
                    facts.append((pair[0], pair[1], val))
        return facts

    def small(self, nf: SpaceTimeNormalForm) -> bool:
        return nf.time <= self.bd.small_limit(nf.seed)

    def _mu_lr(self, q: str) -> int:
        side = 1 if q.endswith("_L") else -1
        return side if not self.swap_lr_motion else -side

    def member(self, t: Term) -> bool:
        return t in self.bd.b_set or self.bs.a_member(t)

    def head_elt(self, nf: SpaceTimeNormalForm) -> SpaceTimeNormalForm:
        return SpaceTimeNormalForm(nf.seed, SHAPE_H, 0, 0, nf.time)

    def nf_of_term(self, t: Term) -> Optional[SpaceTimeNormalForm]:
        return self.bs.lam_member(t)

    # -- machine values along a component -------------------------------------

    def cq_at(self, seed: Term, t: int) -> Optional[str]:
        key = ("cq", seed, t)
        if key in self._memo_val:
            v = self._memo_val[key]
            return None if v is _PENDING else v
        self._memo_val[key] = _PENDING
        out: Optional[str] = None
        if t <= self.bd.small_limit(seed):
            anchor = Term(C_Q, (SpaceTimeNormalForm(seed, SHAPE_H, 0, 0, t).term(),))
            for member in self.bt.class_members(anchor):
                if member.is_leaf and member.head in self.machine.states:
                    out = member.head
                    break
        if out is None and t > 0:
            q = self.cq_at(seed, t - 1)
            if q is not None:
                if q in self.machine.lr_states:
                    out = self.machine.return_state[q]
                else:
                    a = self.cs_at_head(seed, t - 1)
                    if a is not None:
                        out, _, _ = self.machine.step_data(q, a)
        self._memo_val[key] = out
        return out

    def head_pos(self, seed: Term, t: int) -> Optional[int]:
        """Space coordinate h with the head square at time t equivalent to
        S^h T^t(seed)."""
        key = ("head", seed, t)
        if key in self._memo_val:
            v = self._memo_val[key]
            return None if v is _PENDING else v
        self._memo_val[key] = _PENDING
        out: Optional[int] = None
        if t <= self.bd.small_limit(seed):
            anchor = SpaceTimeNormalForm(seed, SHAPE_H, 0, 0, t).term()
            for member in self.bt.class_members(anchor):
                nf = self.nf_of_term(member)
                if nf is not None and nf.shape == SHAPE_ST and nf.seed == seed \
                        and nf.time == t:
                    out = nf.space
                    break
        if out is None and t > 0:
            prev = self.head_pos(seed, t - 1)
            q = self.cq_at(seed, t - 1)
            if prev is not None and q is not None:
                if q in self.machine.lr_states:
                    out = prev + self._mu_lr(q)
                else:
                    a = self.cs_at_head(seed, t - 1)
                    if a is not None:
                        _, mu, _ = self.machine.step_data(q, a)
                        out = prev + mu
        self._memo_val[key] = out
        return out

    def cs_at_head(self, seed: Term, t: int) -> Optional[str]:
        return self.cs_value(SpaceTimeNormalForm(seed, SHAPE_H, 0, 0, t))

    # -- resolution of space-time elements -------------------------------------

    def resolve(self, nf: SpaceTimeNormalForm) -> SpaceTimeNormalForm:
        while True:
            if nf.shape == SHAPE_NH:
                step = self._resolve_nh(nf)
                if step is not None:
                    nf = step
                    continue
            if nf.shape == SHAPE_H:
                h = self.head_pos(nf.seed, nf.k)
                if h is not None:
                    nf = SpaceTimeNormalForm(
                        nf.seed, SHAPE_ST, nf.space + h, nf.m + nf.k)
                    continue
            return nf

    def _resolve_nh(self, nf: SpaceTimeNormalForm) -> Optional[SpaceTimeNormalForm]:
        s, u = nf.payload
        q = self._as_state(s)
        a = self._as_letter(u)
        if q is not None and a is not None:
            if q in self.machine.lr_states:
                mu = self._mu_lr(q)
            else:
                _, mu, _ = self.machine.step_data(q, a)
            return SpaceTimeNormalForm(
                nf.seed, SHAPE_H, nf.space + mu, nf.m + 1, nf.k)
        anchor = time_power(nf.k, nf.seed)
        if self.eq(s, Term(C_Q, (anchor,))) and self.eq(u, Term(C_S, (anchor,))):
            return SpaceTimeNormalForm(nf.seed, SHAPE_H, nf.space, nf.m, nf.k + 1)
        return None

    def _as_state(self, t: Term) -> Optional[str]:
        if t.is_leaf and t.head in self.machine.states:
            return t.head
        if t in self.bd.b_set:
            for member in self.bt.class_members(t):
                if member.is_leaf and member.head in self.machine.states:
                    return member.head
        return None

    def _as_letter(self, t: Term) -> Optional[str]:
        if t.is_leaf and t.head in self.machine.alphabet:
            return t.head
        if t in self.bd.b_set:
            for member in self.bt.class_members(t):
                if member.is_leaf and member.head in self.machine.alphabet:
                    return member.head
        return None

    # -- space-time equivalence -------------------------------------------------

    def lam_class_small(self, nf: SpaceTimeNormalForm) -> list[SpaceTimeNormalForm]:
        shift = nf.shifted(dspace=-nf.space)
        out = [nf]
        for member in self.bt.class_members(shift.term()):
            m_nf = self.nf_of_term(member)
            if m_nf is not None:
                out.append(m_nf.shifted(dspace=nf.space))
        return out

    def lam_eq(self, a: SpaceTimeNormalForm, b: SpaceTimeNormalForm) -> bool:
        key = ("lam", a, b)
        if key in self._memo_lam:
            v = self._memo_lam[key]
            return False if v is _PENDING else v
        self._memo_lam[key] = _PENDING
        out = self._lam_eq(a, b)
        self._memo_lam[key] = out
        return out

    def _lam_eq(self, a: SpaceTimeNormalForm, b: SpaceTimeNormalForm) -> bool:
        a = self.resolve(a)
        b = self.resolve(b)
        if a == b:
            return True
        if self.small(a) and self.small(b):
            sa = a.shifted(dspace=-a.space)
            sb = b.shifted(dspace=-a.space)
            return self.bt.equal(sa.term(), sb.term())
        # peel common time steps down to the small zone
        if a.m >= 1 and b.m >= 1:
            return self.lam_eq(a.shifted(dm=-1), b.shifted(dm=-1))
        if a.seed == b.seed and a.shape == b.shape:
            if a.shape == SHAPE_NH and (a.space, a.m, a.k) == (b.space, b.m, b.k):
                s1, u1 = a.payload
                s2, u2 = b.payload
                return self.bt.equal(s1, s2) and self.bt.equal(u1, u2)
            return False
        return False

    # -- comparison values -------------------------------------------------------

    def r_value(self, a: SpaceTimeNormalForm, b: SpaceTimeNormalForm) -> Optional[str]:
        key = ("r", a, b)
        if key in self._memo_val:
            v = self._memo_val[key]
            return None if v is _PENDING else v
        self._memo_val[key] = _PENDING
        out = self._r_value(a, b)
        self._memo_val[key] = out
        return out

    def _r_value(self, a, b) -> Optional[str]:
        a, b = self.resolve(a), self.resolve(b)
        span = self.bs.space_window
        if self.lam_eq(a, b):
            return ZERO
        if self.small(a) and self.small(b):
            if self.bt.equal(Term(R, (a.term(), b.term())), Term(ZERO)):
                return ZERO
            for lam, gam, val in self._bt_r_facts:
                if not self.lam_eq(a, lam):
                    continue
                lo = 1 if val == ONE else 0
                for n in range(lo, span + 1):
                    if self.lam_eq(b, gam.shifted(dspace=n)):
                        if val == ZERO and n == 0:
                            return ZERO
                        return ONE
        for n in range(1, span + 1):
            if self.lam_eq(b, a.shifted(dspace=n)):
                return ONE
        return None

    def f_value(self, a: SpaceTimeNormalForm, b: SpaceTimeNormalForm) -> Optional[str]:
        x, y = self.head_elt(a), self.head_elt(b)
        if self.small(a) and self.small(b):
            t = Term(F, (x.term(), y.term()))
            if self.bt.equal(t, Term(ZERO_F)):
                return ZERO_F
            if self.bt.equal(t, Term(ONE_F)):
                return ONE_F
        if self.lam_eq(x, y):
            return ZERO_F
        for n in range(1, self.bs.time_window + 1):
            if self.lam_eq(y, SpaceTimeNormalForm(a.seed, SHAPE_H, 0, 0, a.time + n)):
                return ONE_F
        return None

    def off_head(self, nf: SpaceTimeNormalForm) -> bool:
        h = self.head_elt(nf)
        return self.r_value(nf, h) == ONE or self.r_value(h, nf) == ONE

    # -- letter reads -------------------------------------------------------------

    def cs_value(self, nf: SpaceTimeNormalForm) -> Optional[str]:
        key = ("cs", nf)
        if key in self._memo_val:
            v = self._memo_val[key]
            return None if v is _PENDING else v
        self._memo_val[key] = _PENDING
        out = self._cs_value(self.resolve(nf))
        self._memo_val[key] = out
        return out

    def _cs_value(self, nf: SpaceTimeNormalForm) -> Optional[str]:
        if self.small(nf):
            for node in self._cs_search(nf):
                t = Term(C_S, (node.term(),))
                if self.bt.covers(t):
                    for member in self.bt.class_members(t):
                        if member.is_leaf and member.head in self.machine.alphabet:
                            return member.head
            return None
        t = nf.time
        # the square the head just left: it received the printed letter
        old_head = SpaceTimeNormalForm(nf.seed, SHAPE_H, 0, 1, t - 1)
        if self.lam_eq(nf, old_head):
            q = self.cq_at(nf.seed, t - 1)
            if q is None:
                return None
            if q in self.machine.lr_states:
                return "e_L" if self._mu_lr(q) > 0 else "e_R"
            a = self.cs_at_head(nf.seed, t - 1)
            if a is None:
                return None
            _, _, printed = self.machine.step_data(q, a)
            return printed
        if nf.m >= 1:
            prev = nf.shifted(dm=-1)
            if self.off_head(prev):
                return self.cs_value(prev)
        rs = self.resolve(nf)
        if rs.m >= 1 and rs != nf:
            prev = rs.shifted(dm=-1)
            if self.off_head(prev):
                return self.cs_value(prev)
        return None

    def _cs_search(self, start: SpaceTimeNormalForm) -> list[SpaceTimeNormalForm]:
        """Small-zone reachability under letter-preserving moves: table-known
        read equalities, class mates, and time steps off the head."""
        limit = 2 * sum(self.bd.max_time.values()) + 4
        seen = {start}
        frontier = [start]
        order = [start]
        steps = 0
        while frontier and steps < limit:
            steps += 1
            nxt = []
            for node in frontier:
                for nb in self._cs_neighbors(node):
                    if nb not in seen and self.small(nb):
                        seen.add(nb)
                        nxt.append(nb)
                        order.append(nb)
            frontier = nxt
        return order

    def _cs_neighbors(self, node: SpaceTimeNormalForm):
        out = list(self.lam_class_small(node))
        t = Term(C_S, (node.term(),))
        if self.bt.covers(t):
            for member in self.bt.class_members(t):
                if member.args and member.head == C_S:
                    nb = self.nf_of_term(member.args[0])
                    if nb is not None:
                        out.append(nb)
        if self.off_head(node):
            out.append(node.shifted(dm=1))
        if node.m >= 1:
            prev = node.shifted(dm=-1)
            if self.off_head(prev):
                out.append(prev)
        return out

    def cs_pair(self, a: SpaceTimeNormalForm, b: SpaceTimeNormalForm) -> bool:
        va, vb = self.cs_value(a), self.cs_value(b)
        if va is not None and vb is not None:
            return va == vb
        if self.lam_eq(a, b):
            return True
        if self.small(a) and self.small(b):
            ra, rb = self.resolve(a), self.resolve(b)
            targets = {rb} | set(self.lam_class_small(rb))
            return any(node in targets for node in self._cs_search(ra))
        for x, y in ((a, b), (b, a)):
            if x.m >= 1:
                prev = x.shifted(dm=-1)
                if self.off_head(prev) and self.cs_pair(prev, y):
                    return True
        return False

    def cq_pair(self, a: SpaceTimeNormalForm, b: SpaceTimeNormalForm) -> bool:
        va, vb = self.cq_at(a.seed, a.time), self.cq_at(b.seed, b.time)
        if va is not None and vb is not None:
            return va == vb
        if self.lam_eq(self.head_elt(a), self.head_elt(b)):
            return True
        if self.small(a) and self.small(b):
            return self.bt.equal(Term(C_Q, (self.head_elt(a).term(),)),
                                 Term(C_Q, (self.head_elt(b).term(),)))
        return False

    def r_pair(self, p1, p2) -> bool:
        (a1, b1), (a2, b2) = p1, p2
        v1, v2 = self.r_value(a1, b1), self.r_value(a2, b2)
        if v1 is not None and v2 is not None:
            return v1 == v2
        if self.lam_eq(a1, a2) and self.lam_eq(b1, b2):
            return True
        if all(self.small(x) for x in (a1, b1, a2, b2)):
            for lam1, gam1, _ in self._bt_r_facts:
                if not self.lam_eq(a1, lam1):
                    continue
                for lam2, gam2, _ in self._bt_r_facts:
                    if not self.lam_eq(a2, lam2):
                        continue
                    if not self.bt.equal(Term(R, (lam1.term(), gam1.term())),
                                         Term(R, (lam2.term(), gam2.term()))):
                        continue
                    for n in range(0, self.bs.space_window + 1):
                        if self.lam_eq(b1, gam1.shifted(dspace=n)) and \
                                self.lam_eq(b2, gam2.shifted(dspace=n)):
                            return True
        return False

    def f_pair(self, p1, p2) -> bool:
        (a1, b1), (a2, b2) = p1, p2
        v1, v2 = self.f_value(a1, b1), self.f_value(a2, b2)
        if v1 is not None and v2 is not None:
            return v1 == v2
        if self.lam_eq(a1, a2) and self.lam_eq(b1, b2):
            return True
        if all(self.small(x) for x in (a1, b1, a2, b2)):
            t1 = Term(F, (self.head_elt(a1).term(), self.head_elt(b1).term()))
            t2 = Term(F, (self.head_elt(a2).term(), self.head_elt(b2).term()))
            if self.bt.equal(t1, t2):
                return True
        return False

    # -- the equivalence -----------------------------------------------------------

    def _kind(self, t: Term):
        if t.is_leaf:
            if t.head in self.bs.fbsig.constants():
                return ("const", t.head)
            return None
        nf = self.nf_of_term(t)
        if nf is not None:
            return ("lam", nf)
        if t.head in (C_S, C_Q):
            inner = self.nf_of_term(t.args[0])
            if inner is not None:
                return (t.head, inner)
        if t.head in (R, F):
            pair = self.bs._rf_pair(t)
            if pair is not None:
                return (t.head, pair)
        return None

    def eq(self, s: Term, t: Term) -> bool:
        if s == t:
            return True
        rs = route_term(s, self.bs)
        rt = route_term(t, self.bs)
        if rs is not None or rt is not None:
            return self.eq(rs if rs is not None else s,
                           rt if rt is not None else t)
        in_b_s, in_b_t = s in self.bd.b_set, t in self.bd.b_set
        if in_b_s and in_b_t:
            return self.bt.equal(s, t)
        ks, kt = self._kind(s), self._kind(t)
        if ks is not None and kt is not None:
            return self._eq_core(ks, kt)
        if in_b_s and kt is not None:
            return self._eq_b_vs_core(s, kt)
        if in_b_t and ks is not None:
            return self._eq_b_vs_core(t, ks)
        return False

    def _eq_b_vs_core(self, b: Term, kind) -> bool:
        for c in self._a_and_b:
            kc = self._kind(c)
            if kc is not None and self._eq_core(kind, kc) and self.bt.equal(c, b):
                return True
        return False

    def _eq_core(self, ks, kt) -> bool:
        tag_s, tag_t = ks[0], kt[0]
        if tag_s == "const" and tag_t == "const":
            return ks[1] == kt[1]
        if tag_s == "lam" and tag_t == "lam":
            return self.lam_eq(ks[1], kt[1])
        if {tag_s, tag_t} == {"lam", "const"}:
            lam = ks[1] if tag_s == "lam" else kt[1]
            d = kt[1] if tag_s == "lam" else ks[1]
            lam = self.resolve(lam)
            if self.small(lam):
                return self.bt.equal(lam.term(), Term(d))
            return False
        if tag_s == C_S and tag_t == C_S:
            return self.cs_pair(ks[1], kt[1])
        if tag_s == C_Q and tag_t == C_Q:
            return self.cq_pair(ks[1], kt[1])
        if {tag_s, tag_t} == {C_S, "const"}:
            lam = ks[1] if tag_s == C_S else kt[1]
            d = kt[1] if tag_s == C_S else ks[1]
            return d in self.machine.alphabet and self.cs_value(lam) == d
        if {tag_s, tag_t} == {C_Q, "const"}:
            lam = ks[1] if tag_s == C_Q else kt[1]
            d = kt[1] if tag_s == C_Q else ks[1]
            return d in self.machine.states and self.cq_at(lam.seed, lam.time) == d
        if tag_s == R and tag_t == R:
            return self.r_pair(ks[1], kt[1])
        if tag_s == F and tag_t == F:
            return self.f_pair(ks[1], kt[1])
        if {tag_s, tag_t} == {R, "const"}:
            pair = ks[1] if tag_s == R else kt[1]
            d = kt[1] if tag_s == R else ks[1]
            return d in (ZERO, ONE) and self.r_value(*pair) == d
        if {tag_s, tag_t} == {F, "const"}:
            pair = ks[1] if tag_s == F else kt[1]
            d = kt[1] if tag_s == F else ks[1]
            return d in (ZERO_F, ONE_F) and self.f_value(*pair) == d
        # distinct interpreted ranges stay apart in the non-degenerate case
        return False


# ----------------------------------------------------------------------------
# the stage tower
# ----------------------------------------------------------------------------

class StageBoundExceeded(Exception):
    pass


@dataclass
class StageReport:
    stage: int
    checked: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


class StageTower:
    """The increasing chain of partial subalgebras above stage zero."""

    def __init__(self, a0: A0Decider, stage_bound: int = 4) -> None:
        self.a0 = a0
        self.bs = a0.bs
        self.bound = stage_bound
        self.gens = a0.bs.presentation.generators
        self._memo_member: dict = {}
        self._memo_eq: dict = {}

    # -- membership -------------------------------------------------------------

    def member(self, t: Term, n: int) -> bool:
        key = (t, n)
        if key in self._memo_member:
            return self._memo_member[key]
        out = self._member(t, n)
        self._memo_member[key] = out
        return out

    def _member(self, t: Term, n: int) -> bool:
        if n <= 0:
            return self.a0.member(t)
        prev = n - 1
        if self.member(t, prev):
            return True
        if t.args and t.head in TEN_OPS:
            if all(self.member(a, prev) for a in t.args):
                return True
        nf = self._nf(t)
        if nf is None:
            return False
        if prev % 2 == 0 and nf.shape == SHAPE_NH:
            s, u = nf.payload
            if self.member_prime(s, prev) and self.member_prime(u, prev) \
                    and self.member(time_power(nf.k, nf.seed), prev):
                return True
        if prev % 2 == 1 and nf.seed.args and nf.seed.head == K \
                and nf.shape in (SHAPE_ST, SHAPE_H):
            s, lam = nf.seed.args
            if self.member_prime(s, prev) and self.member(lam, prev):
                return True
        return False

    def member_prime(self, t: Term, n: int) -> bool:
        if self.member(t, n):
            return True
        return bool(t.args) and t.head in TEN_OPS \
            and all(self.member(a, n) for a in t.args)

    def min_stage(self, t: Term) -> Optional[int]:
        for n in range(self.bound + 1):
            if self.member(t, n):
                return n
        return None

    def _nf(self, t: Term) -> Optional[SpaceTimeNormalForm]:
        if not t.args or t.head not in SPACE_TIME_OPS:
            return None
        try:
            nf = normalize_space_time(t, self.gens)
        except NotSpaceTimeError:
            return None
        return nf if nf.term() == t else None

    # -- reduction to stage zero (property iv) -----------------------------------

    def reduce_to_a0(self, t: Term, n: int) -> Optional[Term]:
        if self.a0.member(t):
            return t
        if n <= 0:
            return None
        prev = n - 1
        nf = self._nf(t)
        if nf is None:
            return None
        core_red = self._reduce_core(nf, prev)
        if core_red is not None:
            return self.reduce_to_a0(core_red, prev) or \
                (core_red if self.a0.member(core_red) else None)
        return None

    def _reduce_core(self, nf: SpaceTimeNormalForm, prev: int) -> Optional[Term]:
        """Apply the head-step or collapse reduction under the shift prefix."""
        if nf.shape == SHAPE_NH:
            s, u = nf.payload
            red = self._nh_reduce(s, u, nf.seed, nf.k, prev)
            if red is not None:
                return nf_deep(space_power(nf.space, time_power(nf.m, red)), self.gens)
            return None
        if nf.seed.args and nf.seed.head == K:
            s, lam = nf.seed.args
            red = self._k_reduce(s, lam, prev)
            if red is not None:
                rest = SpaceTimeNormalForm(red, nf.shape, nf.space, nf.m, nf.k) \
                    if not nf.seed.args else None
                del rest
                inner = red
                core = inner
                if nf.shape == SHAPE_H:
                    core = Term(H, (time_power(nf.k, inner),))
                return nf_deep(space_power(nf.space, time_power(nf.m, core)), self.gens)
        return None

    def _nh_reduce(self, s: Term, u: Term, seed: Term, k: int, prev: int) -> Optional[Term]:
        """The five head-step collapse clauses at an even stage."""
        anchor = time_power(k, seed)
        h_anchor = Term(H, (anchor,))
        machine = self.a0.machine
        for b in sorted(self.a0.bd.b_set, key=str):
            if b.args and b.head == N_H:
                b_nf = self.a0.nf_of_term(b)
                if b_nf is not None and b_nf.shape == SHAPE_NH:
                    s2, u2 = b_nf.payload
                    if self.equiv(s, s2, prev) and self.equiv(u, u2, prev) and \
                            self.a0.lam_eq(
                                SpaceTimeNormalForm(seed, SHAPE_H, 0, 0, k),
                                self.a0.head_elt(b_nf)):
                        return b
        for q in machine.states:
            if self.equiv(s, Term(q), prev):
                if q in machine.lr_states:
                    if self.equiv(u, Term(C_S, (h_anchor,)), prev):
                        mu = self.a0._mu_lr(q)
                        return nf_deep(
                            space_power(mu, Term(T, (h_anchor,))), self.gens)
                else:
                    for a in machine.alphabet:
                        if self.equiv(u, Term(a), prev):
                            _, mu, _ = machine.step_data(q, a)
                            return nf_deep(
                                space_power(mu, Term(T, (h_anchor,))), self.gens)
        if self.equiv(s, Term(C_Q, (h_anchor,)), prev) and \
                self.equiv(u, Term(C_S, (h_anchor,)), prev):
            return nf_deep(Term(H, (Term(T, (anchor,)),)), self.gens)
        return None

    def _k_reduce(self, s: Term, lam: Term, prev: int) -> Optional[Term]:
        for b in sorted(self.a0.bd.b_set, key=str):
            if b.args and b.head == K:
                s2, lam2 = b.args
                if self.equiv(s, s2, prev) and self.equiv(lam, lam2, prev):
                    return b
        for v, out in ((ZERO, lam), (ZERO_F, lam),
                       (ONE, Term(P, (Term(C),))), (ONE_F, Term(P, (Term(C),)))):
            if self.equiv(s, Term(v), prev):
                return out
        return None

    # -- equivalence ---------------------------------------------------------------

    def equiv(self, s: Term, t: Term, n: int) -> bool:
        if s == t:
            return True
        key = (s, t, n)
        if key in self._memo_eq:
            v = self._memo_eq[key]
            return False if v is _PENDING else v
        self._memo_eq[key] = _PENDING
        out = self._equiv(s, t, n)
        self._memo_eq[key] = out
        return out

    def _equiv(self, s: Term, t: Term, n: int) -> bool:
        if n <= 0:
            return self.a0.eq(s, t)
        prev = n - 1
        sp, tp = self.member(s, prev), self.member(t, prev)
        if sp and tp:
            return self.equiv(s, t, prev)
        if not (self.member(s, n) and self.member(t, n)):
            return False
        # one side is new at this stage
        for a, b in ((s, t), (t, s)):
            nf = self._nf(a)
            if nf is not None and not self.member(a, prev):
                res = self._equiv_new_spacetime(a, nf, b, prev)
                if res is not None:
                    return res
        if s.args and s.head in TEN_OPS and not sp:
            return self._equiv_image(s, t, prev)
        if t.args and t.head in TEN_OPS and not tp:
            return self._equiv_image(t, s, prev)
        return False

    def _anchors_equal(self, nf: SpaceTimeNormalForm, b_nf: SpaceTimeNormalForm,
                       prev: int) -> bool:
        ha = SpaceTimeNormalForm(nf.seed, SHAPE_H, 0, 0, nf.k)
        hb = SpaceTimeNormalForm(b_nf.seed, SHAPE_H, 0, 0, b_nf.k)
        if ha == hb:
            return True
        if self.a0.member(ha.term()) and self.a0.member(hb.term()):
            return self.a0.lam_eq(ha, hb)
        return self.equiv(ha.term(), hb.term(), prev)

    def _equiv_new_spacetime(
        self, a: Term, nf: SpaceTimeNormalForm, b: Term, prev: int
    ) -> Optional[bool]:
        """New head-step/collapse elements and their shift prefixes."""
        b_nf = self._nf(b)
        if nf.shape == SHAPE_NH and prev % 2 == 0:
            # pairwise against any head-step element, previous or new
            if b_nf is not None and b_nf.shape == SHAPE_NH \
                    and (nf.space, nf.m) == (b_nf.space, b_nf.m) \
                    and self._anchors_equal(nf, b_nf, prev):
                s1, u1 = nf.payload
                s2, u2 = b_nf.payload
                if self.equiv(s1, s2, prev) and self.equiv(u1, u2, prev):
                    return True
            red_a = self._reduce_core(nf, prev)
            if b_nf is not None and b_nf.shape == SHAPE_NH \
                    and not self.member(b, prev):
                red_b = self._reduce_core(b_nf, prev)
                if red_a is not None and red_b is not None:
                    return self.equiv(red_a, red_b, prev)
                return False
            if red_a is not None:
                return self.equiv(red_a, b, prev)
            return False
        if nf.seed.args and nf.seed.head == K and prev % 2 == 1:
            if b_nf is not None and b_nf.seed.args and b_nf.seed.head == K \
                    and nf.shape == b_nf.shape \
                    and (nf.space, nf.m, nf.k) == (b_nf.space, b_nf.m, b_nf.k):
                if nf.shape == SHAPE_H:
                    if nf.seed == b_nf.seed:
                        return True
                else:
                    s1, l1 = nf.seed.args
                    s2, l2 = b_nf.seed.args
                    if self.equiv(s1, s2, prev) and self.equiv(l1, l2, prev):
                        return True
            red_a = self._reduce_core(nf, prev)
            if b_nf is not None and b_nf.seed.args and b_nf.seed.head == K \
                    and not self.member(b, prev):
                red_b = self._reduce_core(b_nf, prev)
                if red_a is not None and red_b is not None:
                    return self.equiv(red_a, red_b, prev)
                return False
            if red_a is not None:
                return self.equiv(red_a, b, prev)
            return False
        return None

    # -- the ten image tables ---------------------------------------------------

    def _p_term(self, x: Term) -> Term:
        return nf_deep(Term(P, (x,)), self.gens)

    def _h_term(self, x: Term) -> Term:
        return nf_deep(Term(H, (x,)), self.gens)

    def stage_value(self, x: Term, prev: int) -> Optional[Term]:
        """Constant (or read) the image element collapses to, when the
        inductive hypotheses give one."""
        if not x.args or x.head not in TEN_OPS:
            return None
        op = x.head
        if op == R:
            s, t = x.args
            l1 = self.reduce_to_a0(self._p_term(s), prev)
            l2 = self.reduce_to_a0(self._p_term(t), prev)
            if l1 is not None and l2 is not None:
                n1, n2 = self.a0.nf_of_term(l1), self.a0.nf_of_term(l2)
                if n1 is not None and n2 is not None:
                    v = self.a0.r_value(n1, n2)
                    if v is not None:
                        return Term(v)
            if self.equiv(self._p_term(s), self._p_term(t), prev):
                return Term(ZERO)
            for k in range(1, self.bs.space_window + 1):
                shifted = nf_deep(space_power(k, self._p_term(s)), self.gens)
                if self.equiv(self._p_term(t), shifted, prev):
                    return Term(ONE)
            return None
        if op == F:
            s, t = x.args
            h1, h2 = self._h_term(s), self._h_term(t)
            l1 = self.reduce_to_a0(h1, prev)
            l2 = self.reduce_to_a0(h2, prev)
            if l1 is not None and l2 is not None:
                n1, n2 = self.a0.nf_of_term(l1), self.a0.nf_of_term(l2)
                if n1 is not None and n2 is not None:
                    v = self.a0.f_value(n1, n2)
                    if v is not None:
                        return Term(v)
            if self.equiv(h1, h2, prev):
                return Term(ZERO_F)
            for k in range(1, self.bs.time_window + 1):
                shifted = nf_deep(Term(H, (time_power(k, s),)), self.gens)
                if self.equiv(h2, shifted, prev):
                    return Term(ONE_F)
            return None
        if op == U:
            (s,) = x.args
            for b in self._b_terms():
                if self.equiv(s, b, prev):
                    routed = route_term(Term(U, (b,)), self.bs)
                    if routed is not None and routed.is_leaf:
                        return routed
            rep = self._find_image(s, R, prev)
            if rep is not None:
                lam1, lam2 = rep
                stepped = Term(R, (lam1, nf_deep(Term(S, (lam2,)), self.gens)))
                return self.stage_value(stepped, prev)
            rep = self._find_image(s, F, prev)
            if rep is not None:
                lam1, lam2 = rep
                stepped = Term(F, (lam1, nf_deep(Term(T, (lam2,)), self.gens)))
                return self.stage_value(stepped, prev)
            return None
        if op == C_Q:
            (s,) = x.args
            lam = self.reduce_to_a0(self._h_term(s), prev)
            if lam is not None:
                n1 = self.a0.nf_of_term(lam)
                if n1 is not None:
                    q = self.a0.cq_at(n1.seed, n1.time)
                    if q is not None:
                        return Term(q)
            return None
        if op == C_S:
            (s,) = x.args
            lam = self.reduce_to_a0(self._p_term(s), prev)
            if lam is not None:
                n1 = self.a0.nf_of_term(lam)
                if n1 is not None:
                    a = self.a0.cs_value(n1)
                    if a is not None:
                        return Term(a)
            return None
        if op == N_Q:
            s, t, u = x.args
            m = self.a0.machine
            if self.equiv(u, self._h_term(u), prev):
                for q in m.states:
                    if not self.equiv(s, Term(q), prev):
                        continue
                    if q in m.lr_states:
                        if self.equiv(t, Term(C_S, (self._h_term(u),)), prev):
                            return Term(m.return_state[q])
                        continue
                    for a in m.alphabet:
                        if self.equiv(t, Term(a), prev):
                            nq, _, _ = m.step_data(q, a)
                            return Term(nq)
                if self.equiv(s, Term(C_Q, (u,)), prev) and \
                        self.equiv(t, Term(C_S, (u,)), prev):
                    return self.stage_value(
                        Term(C_Q, (nf_deep(Term(T, (u,)), self.gens),)), prev)
            return self._b_value(x, prev)
        if op == N_S:
            s, t, u = x.args
            m = self.a0.machine
            if self.equiv(u, self._h_term(u), prev):
                for q in m.states:
                    if not self.equiv(s, Term(q), prev):
                        continue
                    if q in m.lr_states:
                        if self.equiv(t, Term(C_S, (self._h_term(u),)), prev):
                            return Term("e_L" if q.endswith("_L") else "e_R")
                        continue
                    for a in m.alphabet:
                        if self.equiv(t, Term(a), prev):
                            _, _, na = m.step_data(q, a)
                            return Term(na)
                if self.equiv(s, Term(C_Q, (u,)), prev) and \
                        self.equiv(t, Term(C_S, (u,)), prev):
                    return self.stage_value(
                        Term(C_S, (nf_deep(Term(T, (u,)), self.gens),)), prev)
            return self._b_value(x, prev)
        if op == C_STAR:
            s, t = x.args
            hs = self._h_term(s)
            if self.equiv(t, Term(R, (hs, s)), prev) or \
                    self.equiv(t, Term(R, (s, hs)), prev):
                return self.stage_value(
                    Term(C_S, (nf_deep(Term(T, (s,)), self.gens),)), prev)
            if self.equiv(t, Term(ONE), prev) and \
                    self.equiv(s, self._p_term(s), prev):
                return self.stage_value(Term(C_S, (s,)), prev)
            return self._b_value(x, prev)
        if op == E:
            (s,) = x.args
            if self.equiv(s, Term(self.a0.machine.halt), prev):
                return Term(ZERO)
            if self._find_image(s, C_Q, prev) is not None:
                return Term(ONE)
            for q in self.a0.machine.states:
                if q != self.a0.machine.halt and self.equiv(s, Term(q), prev):
                    return Term(ONE)
            return self._b_value(x, prev)
        if op == K_STAR:
            s, t = x.args
            if self.equiv(s, t, prev):
                if self._constant_like(s, prev) or \
                        self.equiv(s, self._p_term(s), prev) or \
                        any(self._find_image(s, o, prev) is not None
                            for o in (C_S, C_Q, R, F)):
                    return Term(ZERO)
            if self._kstar_one(s, t, prev):
                return Term(ONE)
            # distinct constants through representatives
            rs, rt = self._a0_rep(s, prev), self._a0_rep(t, prev)
            if rs is not None and rt is not None and rs.is_leaf and rt.is_leaf \
                    and rs.head in self.bs.fbsig.constants() \
                    and rt.head in self.bs.fbsig.constants():
                return Term(ZERO if rs == rt else ONE)
            return self._b_value(x, prev)
        return None

    def _b_terms(self) -> list[Term]:
        return sorted(self.a0.bd.b_set, key=str)

    def _a0_rep(self, x: Term, prev: int) -> Optional[Term]:
        """A stage-zero element equivalent to ``x``, routed to its canonical
        partner, when one is reachable."""
        rep: Optional[Term] = None
        if self.a0.member(x):
            rep = x
        if rep is None:
            rep = self.reduce_to_a0(x, prev)
        if rep is None and x.args and x.head in TEN_OPS and prev >= 1:
            rep = self.stage_value(x, prev - 1)
        if rep is None:
            for d in self.bs.fbsig.constants():
                if self.equiv(x, Term(d), prev):
                    return Term(d)
            return None
        if rep.args:
            routed = route_term(rep, self.bs)
            if routed is not None and routed.is_leaf:
                return routed
            if rep in self.a0.bd.b_set:
                for member in self.a0.bt.class_members(rep):
                    if member.is_leaf:
                        return member
        return rep

    def _b_value(self, x: Term, prev: int) -> Optional[Term]:
        """Collapse through a stage-zero element of the same shape: push the
        arguments down to representatives and read the image's value there."""
        if not x.args:
            return None
        reps = [self._a0_rep(a, prev) for a in x.args]
        if all(r is not None for r in reps):
            t0 = Term(x.head, tuple(reps))
            if self.a0.member(t0):
                routed = route_term(t0, self.bs)
                if routed is not None and routed.is_leaf:
                    return routed
                for member in self.a0.bt.class_members(t0):
                    if member.is_leaf:
                        return member
        for b in self._b_terms():
            if b.args and b.head == x.head and len(b.args) == len(x.args):
                if all(self.equiv(xa, ba, prev) for xa, ba in zip(x.args, b.args)):
                    for member in self.a0.bt.class_members(b):
                        if member.is_leaf:
                            return member
        return None

    def _constant_like(self, s: Term, prev: int) -> bool:
        return any(self.equiv(s, Term(d), prev)
                   for d in self.bs.fbsig.constants())

    def _kstar_one(self, s: Term, t: Term, prev: int) -> bool:
        consts = self.bs.fbsig.constants()
        letters = set(self.a0.machine.alphabet)
        states = set(self.a0.machine.states)

        def const_match(u: Term, excluded: set[str]) -> bool:
            return any(self.equiv(u, Term(d), prev)
                       for d in consts if d not in excluded)

        if self.equiv(s, self._p_term(s), prev) and const_match(t, {C}):
            return True
        if self._find_image(s, C_S, prev) is not None and const_match(t, letters):
            return True
        if self._find_image(s, C_Q, prev) is not None and const_match(t, states):
            return True
        if self._find_image(s, R, prev) is not None and const_match(t, {ZERO, ONE}):
            return True
        if self._find_image(s, F, prev) is not None and const_match(t, {ZERO_F, ONE_F}):
            return True
        ranges = []
        for u in (s, t):
            tags = set()
            if self.equiv(u, self._p_term(u), prev):
                tags.add("P")
            for o in (C_S, C_Q, R, F):
                if self._find_image(u, o, prev) is not None:
                    tags.add(o)
            ranges.append(tags)
        if ranges[0] and ranges[1] and not (ranges[0] & ranges[1]):
            return True
        return False

    def _find_image(self, s: Term, op: str, prev: int):
        """Property (v): a representation of ``s`` in the image of ``op``."""

        def pack(args: tuple[Term, ...]):
            return args[0] if len(args) == 1 else tuple(args)

        if s.args and s.head == op:
            return pack(s.args)
        for b in self._b_terms():
            if b.args and b.head == op and self.equiv(s, b, prev):
                return pack(b.args)
        return None

    def _equiv_image(self, x: Term, y: Term, prev: int) -> bool:
        # the structural clause applies whether the partner is old or new
        if y.args and y.head == x.head and len(x.args) == len(y.args) \
                and self._image_pairwise(x, y, prev):
            return True
        vx = self.stage_value(x, prev)
        y_is_image = bool(y.args) and y.head in TEN_OPS and not self.member(y, prev)
        if y_is_image:
            vy = self.stage_value(y, prev)
            if vx is not None and vy is not None and self.equiv(vx, vy, prev):
                return True
            return False
        if vx is not None and self.equiv(vx, y, prev):
            return True
        return False

    def _image_pairwise(self, x: Term, y: Term, prev: int) -> bool:
        op = x.head
        if op == R:
            return self.equiv(self._p_term(x.args[0]), self._p_term(y.args[0]), prev) \
                and self.equiv(self._p_term(x.args[1]), self._p_term(y.args[1]), prev)
        if op == F:
            return self.equiv(self._h_term(x.args[0]), self._h_term(y.args[0]), prev) \
                and self.equiv(self._h_term(x.args[1]), self._h_term(y.args[1]), prev)
        if op == C_Q:
            return self.equiv(self._h_term(x.args[0]), self._h_term(y.args[0]), prev)
        if op == C_S:
            return self.equiv(self._p_term(x.args[0]), self._p_term(y.args[0]), prev)
        return all(self.equiv(a, b, prev) for a, b in zip(x.args, y.args))

    # -- invariant checks ----------------------------------------------------------

    def stage_report(self, n: int, sample: Iterable[Term]) -> StageReport:
        report = StageReport(stage=n)
        members = [t for t in dict.fromkeys(sample) if self.member(t, n)]

        def eq(a, b):
            return self.equiv(a, b, n)

        # closure under the space-time moves (property i); moves act on the
        # canonical representative of an element, so route first
        for t in members:
            nf = self._nf(t)
            if nf is None:
                continue
            candidates = [t]
            routed = route_term(t, self.bs)
            if routed is not None:
                candidates.append(routed)
            red = self.reduce_to_a0(t, n)
            if red is not None:
                candidates.append(red)
            for op in (P, T, H):
                report.checked += 1
                if not any(self.member(nf_deep(Term(op, (cand,)), self.gens), n)
                           for cand in candidates):
                    report.violations.append(f"(i) {op} image of {t!r} left stage {n}")
        # restriction coherence with the previous stage
        if n >= 1:
            for a in members:
                for b in members:
                    if self.member(a, n - 1) and self.member(b, n - 1):
                        report.checked += 1
                        if self.equiv(a, b, n - 1) != eq(a, b):
                            report.violations.append(
                                f"(restriction) {a!r} ~ {b!r} unstable at {n}")
        # transitivity and symmetry on the sample
        related = [(a, b) for a in members for b in members if eq(a, b)]
        for a, b in related:
            report.checked += 1
            if not eq(b, a):
                report.violations.append(f"(sym) {a!r} ~ {b!r}")
        rel_set = set(related)
        for a, b in related:
            for b2, c in related:
                if b2 == b:
                    report.checked += 1
                    if (a, c) not in rel_set and not eq(a, c):
                        report.violations.append(f"(iv) {a!r},{b!r},{c!r}")
        # partial congruence on sampled composites
        heads: dict = {}
        for t in members:
            if t.args:
                heads.setdefault((t.head, len(t.args)), []).append(t)
        for ts in heads.values():
            for a in ts:
                for b in ts:
                    if all(self.member(x, n) and self.member(y, n)
                           and eq(x, y) for x, y in zip(a.args, b.args)):
                        report.checked += 1
                        if not eq(a, b):
                            report.violations.append(f"(v) {a!r} vs {b!r}")
        # reduction to stage zero produces equivalent elements
        for t in members:
            nf = self._nf(t)
            if nf is None:
                continue
            report.checked += 1
            red = self.reduce_to_a0(t, n)
            if red is not None and not eq(t, red):
                report.violations.append(f"(iv-alg) {t!r} reduces to inequivalent {red!r}")
        return report

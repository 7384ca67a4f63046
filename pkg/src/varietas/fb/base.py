"""Finite base data for the non-degenerate solver.

Three layers:

* the infinite-but-decidable carrier A: window-free membership clauses over
  the presentation's generating space-time terms;
* the finite set B around the presentation terms, closed under subterms,
  time prefixes, the span/time-predecessor closure, and the reads over it;
* the base table: the presented congruence restricted to B.  That finite
  relation exists for every presentation but is not uniformly computable;
  it is either derived here (a sound under-approximation saturated from the
  forward derivation and the ground laws) or supplied from a file, and the
  provenance is carried into every verdict.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable, Optional

from ..terms import Presentation, Term, TermError, parse_term, format_term, subterm_closure
from ..turing import AdjustedMachine
from .signature import (
    C, C_Q, C_S, C_STAR, E, F, FBSignature, H, K, K_STAR, N_H, N_Q, N_S,
    ONE, ONE_F, P, R, S, S_INV, T, U, ZERO, ZERO_F,
    space_power, time_power,
)
from .normal import (
    SHAPE_H, SHAPE_NH, SHAPE_ST, NotSpaceTimeError, SpaceTimeNormalForm,
    normalize_space_time,
)
from .encode import forward_derive, _head, _sq

VALUE_CONSTS = (ZERO, ONE, ZERO_F, ONE_F)


class BaseTableMiss(Exception):
    """A query the finite table cannot answer."""


@dataclass(frozen=True)
class BaseTable:
    domain: frozenset[Term]
    _cls: dict[Term, int] = field(compare=False, hash=False)
    provenance: str = "supplied"

    @classmethod
    def from_pairs(
        cls, pairs: Iterable[tuple[Term, Term]], provenance: str,
        extra_terms: Iterable[Term] = (),
    ) -> "BaseTable":
        parent: dict[Term, Term] = {}

        def find(x: Term) -> Term:
            while parent.setdefault(x, x) != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        terms = set(extra_terms)
        for a, b in pairs:
            terms.add(a)
            terms.add(b)
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        ids: dict[Term, int] = {}
        table: dict[Term, int] = {}
        for t in terms:
            r = find(t)
            table[t] = ids.setdefault(r, len(ids))
        return cls(frozenset(terms), table, provenance)

    def covers(self, t: Term) -> bool:
        return t in self.domain

    def equal(self, s: Term, t: Term) -> bool:
        if s == t:
            return True
        cs, ct = self._cls.get(s), self._cls.get(t)
        return cs is not None and cs == ct

    def class_members(self, t: Term) -> list[Term]:
        c = self._cls.get(t)
        if c is None:
            return [t]
        return [u for u, cu in self._cls.items() if cu == c]

    def restricted(self, keep: Iterable[Term], provenance: str) -> "BaseTable":
        keep = set(keep)
        table = {t: c for t, c in self._cls.items() if t in keep}
        return BaseTable(frozenset(table), table, provenance)


def parse_base_table(text: str, fbsig: FBSignature, gens: Iterable[str]) -> BaseTable:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not line.startswith("eq ") or "=" not in line:
            raise TermError(f"line {lineno}: expected 'eq <term> = <term>'")
        left, right = line[3:].split("=", 1)
        pairs.append((parse_term(left, fbsig.signature, gens),
                      parse_term(right, fbsig.signature, gens)))
    return BaseTable.from_pairs(pairs, "supplied")


# ----------------------------------------------------------------------------
# the carrier A
# ----------------------------------------------------------------------------

@dataclass
class BaseSets:
    fbsig: FBSignature
    presentation: Presentation
    b_p: frozenset[Term]                  # presentation terms, subterms, constants
    g_p: tuple[Term, ...]                 # generating space-time terms
    time_window: int
    space_window: int
    miss_log: list[str] = field(default_factory=list)

    # -- normal-form helpers --------------------------------------------------

    def nf(self, t: Term) -> Optional[SpaceTimeNormalForm]:
        try:
            return normalize_space_time(t, self.presentation.generators)
        except NotSpaceTimeError:
            return None

    def lam_member(self, t: Term) -> Optional[SpaceTimeNormalForm]:
        """t is literally a normal-form member of the presentation's
        space-time components (payloads from the presentation's subterm set)."""
        nf = self.nf(t)
        if nf is None or nf.term() != t:
            return None
        if not self.seed_in_g(nf.seed):
            return None
        if nf.shape == SHAPE_NH:
            s, u = nf.payload
            if s not in self.b_p or u not in self.b_p:
                return None
        return nf

    def seed_in_g(self, seed: Term) -> bool:
        return seed in self.g_p

    def lam_window(self) -> list[SpaceTimeNormalForm]:
        """Bounded enumeration of the space-time carrier."""
        out: list[SpaceTimeNormalForm] = []
        payloads = [(s, u) for s in sorted(self.b_p, key=str)[:4]
                    for u in sorted(self.b_p, key=str)[:4]]
        for g in self.g_p:
            for n in range(-self.space_window, self.space_window + 1):
                for m in range(self.time_window + 1):
                    out.append(SpaceTimeNormalForm(g, SHAPE_ST, n, m))
                    for k in range(self.time_window + 1 - m):
                        out.append(SpaceTimeNormalForm(g, SHAPE_H, n, m, k))
        return out

    # -- membership in A (the ten clauses) ------------------------------------

    def a_member(self, t: Term) -> bool:
        sig = self.fbsig
        consts = set(sig.constants())
        if t.is_leaf:
            return t.head in consts or t in self.g_p
        if t in self.g_p:
            return True
        if self.lam_member(t) is not None:
            return True
        head = t.head
        if head == U:
            (x,) = t.args
            if x.is_leaf and x.head in VALUE_CONSTS:
                return True
            if x.args and x.head in (R, F):
                return self._rf_pair(x) is not None
            return False
        if head in (R, F):
            return self._rf_pair(t) is not None
        if head in (N_Q, N_S, N_H):
            return self._n_family(t) is not None
        if head in (C_S, C_Q):
            return self.lam_member(t.args[0]) is not None
        if head == C_STAR:
            return self._cstar_shape(t) is not None
        if head == K_STAR:
            return self._kstar_shape(t) is not None
        if head == K:
            a, b = t.args
            lam = self.lam_member(b)
            if lam is not None and a.is_leaf and a.head in VALUE_CONSTS:
                return True
            return False
        if head == E:
            (x,) = t.args
            if x.is_leaf and x.head == sig.machine.halt:
                return True
            return bool(x.args) and x.head == C_Q \
                and self.lam_member(x.args[0]) is not None
        return False

    def _rf_pair(self, t: Term) -> Optional[tuple[SpaceTimeNormalForm, SpaceTimeNormalForm]]:
        a, b = t.args
        la, lb = self.lam_member(a), self.lam_member(b)
        if la is not None and lb is not None:
            return la, lb
        return None

    def _n_family(self, t: Term) -> Optional[str]:
        """Clause shapes for the three step operations: machine pairs over a
        head square, the two pushing-state reads, and the live-step triple."""
        x, y, z = t.args
        zl = self.lam_member(z)
        if zl is None or zl.shape != SHAPE_H or zl.space != 0 or zl.m != 0:
            return None
        m = self.fbsig.machine
        if x.is_leaf and x.head in m.states and y.is_leaf and y.head in m.alphabet:
            return "machine"
        cs_z = Term(C_S, (z,))
        cq_z = Term(C_Q, (z,))
        if t.head == N_Q and x.is_leaf and x.head in m.lr_states and y == cs_z:
            return "pushing"
        if x == cq_z and y == cs_z:
            return "live"
        return None

    def _cstar_shape(self, t: Term) -> Optional[str]:
        a, b = t.args
        lam = self.lam_member(a)
        if lam is None:
            return None
        if b.is_leaf and b.head == ONE:
            return "one"
        if b.args and b.head == R:
            h_lam = Term(H, (time_power(lam.time, lam.seed),))
            if b.args == (a, h_lam):
                return "right"
            if b.args == (h_lam, a):
                return "left"
        return None

    def _kstar_shape(self, t: Term) -> Optional[str]:
        a, b = t.args
        consts = set(self.fbsig.constants())
        if a.is_leaf and a.head in consts and b.is_leaf and b.head in consts:
            return "consts"
        la, lb = self.lam_member(a), self.lam_member(b)
        if la is not None and b.is_leaf and b.head in consts and b.head != C:
            return "lam-const"
        if la is not None and a == b:
            return "diag"
        sa, sb = self._range_shape(a), self._range_shape(b)
        if sa is not None and sb is not None and (a == b or sa != sb):
            return "shapes"
        if sa == "CS" and b.is_leaf and b.head in consts \
                and b.head not in self.fbsig.letters:
            return "cs-const"
        if sa == "CQ" and b.is_leaf and b.head in consts \
                and b.head not in self.fbsig.states:
            return "cq-const"
        if sa == "R" and b.is_leaf and b.head in (set(consts) - {ZERO, ONE}):
            return "r-const"
        if sa == "F" and b.is_leaf and b.head in (set(consts) - {ZERO_F, ONE_F}):
            return "f-const"
        return None

    def _range_shape(self, t: Term) -> Optional[str]:
        if self.lam_member(t) is not None:
            return "P"
        if t.args and t.head == C_S and self.lam_member(t.args[0]) is not None:
            return "CS"
        if t.args and t.head == C_Q and self.lam_member(t.args[0]) is not None:
            return "CQ"
        if t.args and t.head in (R, F) and self._rf_pair(t) is not None:
            return t.head
        return None


def build_base(
    p: Presentation, fbsig: FBSignature,
    time_window: int = 32, space_window: int = 32,
) -> BaseSets:
    from .stages import nf_presentation

    p = nf_presentation(p)
    base_terms: set[Term] = set()
    for eq in p.relations:
        base_terms.add(eq.lhs)
        base_terms.add(eq.rhs)
    for g in p.generators:
        base_terms.add(Term(g))
    b_p = set(subterm_closure(base_terms))
    for d in fbsig.constants():
        b_p.add(Term(d))
    g_p: list[Term] = [Term(P, (Term(C),))]
    for x in p.generators:
        g_p.append(Term(P, (Term(x),)))
    for t in sorted(b_p, key=str):
        if t.args and t.head == K:
            g_p.append(t)
    return BaseSets(fbsig, p, frozenset(b_p), tuple(g_p),
                    time_window, space_window)


# ----------------------------------------------------------------------------
# the span/prefix closure of a finite space-time set
# ----------------------------------------------------------------------------

def _right_subterms(nf: SpaceTimeNormalForm) -> list[SpaceTimeNormalForm]:
    out = []
    n = nf.space
    step = -1 if n > 0 else 1
    while n != 0:
        n += step
        out.append(SpaceTimeNormalForm(nf.seed, nf.shape, n, nf.m, nf.k, nf.payload))
    core = out[-1] if out else nf
    for m in range(core.m - 1, -1, -1):
        out.append(SpaceTimeNormalForm(nf.seed, nf.shape, 0, m, nf.k, nf.payload))
    if nf.shape in (SHAPE_H, SHAPE_NH):
        for k in range(nf.k, -1, -1):
            out.append(SpaceTimeNormalForm(nf.seed, SHAPE_ST, 0, k))
    return out


def close_F_bar(
    terms: Iterable[Term],
    bt: BaseTable,
    bs: BaseSets,
) -> set[Term]:
    """Close a finite space-time set under right subterms, table-known
    equivalence, the span of each top time layer, and time predecessors;
    the maximum time coordinate per component is preserved."""
    elems: set[SpaceTimeNormalForm] = set()
    for t in terms:
        nf = bs.lam_member(t)
        if nf is None:
            raise TermError(f"{format_term(t)} is not a normal-form space-time term")
        elems.add(nf)

    def comp_max(seed: Term, current: set[SpaceTimeNormalForm]) -> int:
        times = [e.time for e in current if e.seed == seed]
        return max(times) if times else 0

    def class_of(nf: SpaceTimeNormalForm) -> list[SpaceTimeNormalForm]:
        out = [nf]
        t = nf.term()
        if bt.covers(t):
            for member in bt.class_members(t):
                m_nf = bs.lam_member(member)
                if m_nf is not None:
                    out.append(m_nf)
        return out

    # each (component, time) layer is saturated, spanned, and peeled exactly
    # once, top-down; only genuinely new layers trigger another sweep
    processed: set[tuple[Term, int]] = set()
    while True:
        pending = sorted(
            {(e.seed, e.time) for e in elems} - processed,
            key=lambda st: (-st[1], str(st[0])),
        )
        if not pending:
            break
        for seed, layer_time in pending:
            if (seed, layer_time) in processed:
                continue
            processed.add((seed, layer_time))
            for j in range(layer_time + 1):
                elems.add(SpaceTimeNormalForm(seed, SHAPE_ST, 0, j))
            layer = {e for e in elems
                     if e.seed == seed and e.time == layer_time}
            saturated: set[SpaceTimeNormalForm] = set()
            for e in layer:
                saturated.update(class_of(e))
            same = {e for e in saturated
                    if e.seed == seed and e.time == layer_time}
            spaces = [e.space for e in same] + [0]
            k1, k2 = max(spaces), min(spaces)
            for e in same:
                for k in range(-k1, -k2 + 1):
                    elems.add(e.shifted(dspace=k))
            elems.update(saturated)
            for e in list(elems):
                if e.seed == seed and e.time == layer_time:
                    elems.update(_right_subterms(e))
                    if e.m >= 1:
                        elems.add(e.shifted(dm=-1))
    return {e.term() for e in elems}


# ----------------------------------------------------------------------------
# B and the derived table
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class BaseData:
    """B together with its table and the carrier data."""
    bs: BaseSets
    b_set: frozenset[Term]
    table: BaseTable
    max_time: dict[Term, int] = field(compare=False, hash=False, default_factory=dict)

    def small_limit(self, seed: Term) -> int:
        return self.max_time.get(seed, 0)


def _build_b(
    bs: BaseSets, oracle: BaseTable,
) -> tuple[set[Term], dict[Term, int]]:
    b: set[Term] = set(bs.b_p)

    def size(t: Term) -> int:
        return 1 + sum(size(a) for a in t.args)

    # (i) a carrier representative for each presentation term: space-time
    # ones when available, else the smallest carrier member (the term itself
    # when it already lies in the carrier)
    for t in sorted(bs.b_p, key=str):
        members = oracle.class_members(t) if oracle.covers(t) else [t]
        lam_reps = [u for u in members if bs.lam_member(u) is not None]
        if lam_reps:
            b.add(min(lam_reps, key=lambda u: (size(u), str(u))))
            continue
        if bs.a_member(t):
            continue
        a_reps = [u for u in members if bs.a_member(u)]
        if a_reps:
            b.add(min(a_reps, key=lambda u: (size(u), str(u))))
    # (ii) time prefixes up to each component's current maximum
    lam_elems = [bs.lam_member(t) for t in sorted(b, key=str)]
    lam_elems = [e for e in lam_elems if e is not None]
    for e in lam_elems:
        for j in range(e.time + 1):
            b.add(time_power(j, e.seed))
        if e.shape in (SHAPE_H, SHAPE_NH):
            for m in range(e.m + 1):
                b.add(SpaceTimeNormalForm(e.seed, e.shape, 0, m, e.k, e.payload).term())
    # (iii) the closure of the space-time part
    f = [t for t in sorted(b, key=str) if bs.lam_member(t) is not None]
    f_bar = close_F_bar(f, oracle, bs)
    b |= f_bar
    # (iv) reads and comparisons over the closed part
    f_bar_sorted = sorted(f_bar, key=str)
    for t in f_bar_sorted:
        b.add(Term(C_Q, (t,)))
        b.add(Term(C_S, (t,)))
    for t, u in product(f_bar_sorted, f_bar_sorted):
        b.add(Term(R, (t, u)))
        b.add(Term(F, (t, u)))
        b.add(Term(U, (Term(R, (t, u)),)))
        b.add(Term(U, (Term(F, (t, u)),)))
    b = set(subterm_closure(b))
    max_time: dict[Term, int] = {}
    for t in b:
        e = bs.lam_member(t)
        if e is not None:
            max_time[e.seed] = max(max_time.get(e.seed, 0), e.time)
    return b, max_time


def assemble_base_data(bs: BaseSets, oracle: BaseTable, provenance: str) -> BaseData:
    b, max_time = _build_b(bs, oracle)
    table = oracle.restricted(b, provenance)
    # keep singletons for uncovered members of B so the domain is all of B
    cls = dict(table._cls)
    next_id = max(cls.values(), default=-1) + 1
    for t in b:
        if t not in cls:
            cls[t] = next_id
            next_id += 1
    table = BaseTable(frozenset(b), cls, provenance)
    return BaseData(bs, frozenset(b), table, max_time)


# -- derived mode -------------------------------------------------------------

def _routing_pairs(bs: BaseSets, universe: set[Term]) -> list[tuple[Term, Term]]:
    """Ground law consequences among universe terms (the canonical-partner
    routing of the ignored ranges, plus the R/F ladder over the window)."""
    from .stages import route_term

    pairs = []
    for t in universe:
        r = route_term(t, bs)
        if r is not None and r != t:
            pairs.append((t, r))
    return pairs


def derive_base_table(
    p: Presentation, m: AdjustedMachine, fbsig: FBSignature, bs: BaseSets,
    horizon: int = 8,
) -> BaseData:
    """Sound under-approximation of the presented congruence on B.

    Saturates ground facts (the forward derivation) and ground law
    consequences by congruence closure over a finite universe, then builds B
    per the closure recipe and restricts.  Everything lives in the
    normal-form world, so head facts anchor on the projected origin square.
    """
    from .stages import nf_deep

    gens = p.generators
    table = forward_derive(p, m, horizon, fbsig)
    seed_pairs: list[tuple[Term, Term]] = []
    for eq in p.relations:
        seed_pairs.append((nf_deep(eq.lhs, gens), nf_deep(eq.rhs, gens)))
    for fact in table.facts:
        lhs, rhs = nf_deep(fact.lhs, gens), nf_deep(fact.rhs, gens)
        if fact.kind in ("anchor", "head") and rhs.is_leaf:
            rhs = Term(P, (rhs,))
        seed_pairs.append((lhs, rhs))

    span = max((abs(n) for row in table.letters.values() for n in row), default=1) + 1
    lam_small: list[SpaceTimeNormalForm] = []
    for g in bs.g_p:
        for n in range(-span, span + 1):
            for mm in range(min(horizon, bs.time_window) + 1):
                lam_small.append(SpaceTimeNormalForm(g, SHAPE_ST, n, mm))
                lam_small.append(SpaceTimeNormalForm(g, SHAPE_H, n, 0, mm))
    # comparison ladders (consequences of the counting laws)
    for e in lam_small:
        t = e.term()
        seed_pairs.append((Term(R, (t, t)), Term(ZERO)))
        seed_pairs.append((Term(F, (t, t)), Term(ZERO_F)))
        for j in range(1, 2 * span + 1):
            up = e.shifted(dspace=j)
            if abs(up.space) <= span + 2 * span:
                seed_pairs.append((Term(R, (t, up.term())), Term(ONE)))
        for j in range(1, horizon + 1):
            seed_pairs.append((Term(F, (t, e.shifted(dm=j).term())), Term(ONE_F)))

    universe: set[Term] = set()
    for a, b in seed_pairs:
        universe.add(a)
        universe.add(b)
    universe |= set(bs.b_p)
    universe |= {e.term() for e in lam_small}
    universe = set(subterm_closure(universe))
    universe |= {Term(U, (t,)) for t in universe
                 if t.args and t.head in (R, F)}
    universe |= {Term(C_S, (e.term(),)) for e in lam_small}
    universe |= {Term(C_Q, (e.term(),)) for e in lam_small}
    universe |= {Term(E, (Term(C_Q, (e.term(),)),)) for e in lam_small}
    # reads are projection/head-invariant: bridge raw and projected squares
    for t in list(universe):
        if t.args and t.head in (C_S, C_Q):
            proj = Term(t.head, (nf_deep(Term(P, (t.args[0],)), gens),))
            seed_pairs.append((t, proj))
            universe.add(proj)
    seed_pairs += _routing_pairs(bs, universe)

    oracle = _saturate(universe, seed_pairs)

    # second pass: make sure the eventual B terms live in the universe
    b_guess, _ = _build_b(bs, oracle)
    missing = b_guess - universe
    if missing:
        universe |= set(subterm_closure(missing))
        seed_pairs += _routing_pairs(bs, missing)
        oracle = _saturate(universe, seed_pairs)
    return assemble_base_data(bs, oracle, "derived")


def _saturate(universe: set[Term], pairs: list[tuple[Term, Term]]) -> BaseTable:
    """Ground congruence closure over a finite carrier."""
    parent: dict[Term, Term] = {}

    def find(x: Term) -> Term:
        while parent.setdefault(x, x) != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: Term, b: Term) -> bool:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        parent[ra] = rb
        return True

    for t in universe:
        find(t)
    for a, b in pairs:
        if a in universe and b in universe:
            union(a, b)
    composite = [t for t in universe if t.args]
    changed = True
    while changed:
        changed = False
        sig_map: dict[tuple, Term] = {}
        for t in composite:
            key = (t.head, tuple(find(a) for a in t.args))
            other = sig_map.get(key)
            if other is None:
                sig_map[key] = t
            elif union(t, other):
                changed = True
    ids: dict[Term, int] = {}
    table: dict[Term, int] = {}
    for t in universe:
        r = find(t)
        table[t] = ids.setdefault(r, len(ids))
    return BaseTable(frozenset(universe), table, "derived")

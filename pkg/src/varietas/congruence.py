"""Closure of a decidable partial subalgebra to the congruence it generates.

A partial subalgebra (A, ~A) is given by three procedures: membership in A,
the partial congruence on A, and a realizer that answers whether an operation
applied to A-members is equivalent-into-A (returning a witness term).  The
engine closes it to the full congruence on FX and decides membership in that
congruence, uniformly in the three procedures.

The closed carrier B is reached by structural recursion: a composite term
belongs to B when all its children do and their A-representatives can be
realized; its own representative is the realized term.  A term of depth d
therefore needs at most d closure stages, which is what makes the stage-wise
union effective.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Iterable, Optional

from .terms import Term

Realizer = Callable[[str, tuple[Term, ...]], Optional[Term]]


@dataclass(frozen=True)
class PartialSubalgebra:
    """Decidable partial subalgebra: the unit the closure engine consumes.

    ``realize(op, args)`` must return some term ``op(b1..bn)`` in A with
    ``bi ~A args[i]``, or None if there is none; its non-None-ness is exactly
    the realizability hypothesis, and the witness is what lets the engine
    produce representatives.  All three procedures must be pure.
    """

    contains: Callable[[Term], bool]
    equivalent: Callable[[Term, Term], bool]
    realize: Realizer

    def realizable(self, op: str, args: tuple[Term, ...]) -> bool:
        return self.realize(op, args) is not None


def finite_partial_subalgebra(
    carrier: Iterable[Term], seeds: Iterable[tuple[Term, Term]]
) -> PartialSubalgebra:
    """Materialize a finite carrier with the smallest partial congruence
    containing ``seeds``; the realizer searches the carrier."""
    from .terms import smallest_partial_congruence

    rel = smallest_partial_congruence(carrier, seeds)
    terms = set(rel)
    by_head: dict[str, list[Term]] = {}
    for t in terms:
        if t.args:
            by_head.setdefault(t.head, []).append(t)

    def contains(t: Term) -> bool:
        return t in terms

    def equivalent(s: Term, t: Term) -> bool:
        cls = rel.get(s)
        return cls is not None and t in cls

    def realize(op: str, args: tuple[Term, ...]) -> Optional[Term]:
        for cand in by_head.get(op, ()):
            if len(cand.args) == len(args) and all(
                equivalent(c, a) for c, a in zip(cand.args, args)
            ):
                return cand
        return None

    return PartialSubalgebra(contains, equivalent, realize)


@dataclass
class StageReport:
    stage: int
    checked: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


class CongruenceDecider:
    """Decides the congruence on FX generated by a partial subalgebra.

    Memoizes closure membership per term; queries are stable and independent
    of the order in which terms were seen.  Not thread-safe: use one decider
    per caller or serialize externally.
    """

    def __init__(self, base: PartialSubalgebra) -> None:
        self.base = base
        self._member: dict[Term, Optional[Term]] = {}

    # -- closure membership -------------------------------------------------

    def member(self, t: Term) -> tuple[bool, Optional[Term]]:
        """Whether ``t`` lies in the closed carrier B; on success also some
        A-term representative equivalent to it."""
        if t in self._member:
            rep = self._member[t]
            return rep is not None, rep
        if self.base.contains(t):
            self._member[t] = t
            return True, t
        if not t.args:
            self._member[t] = None
            return False, None
        reps = []
        for a in t.args:
            ok, rep = self.member(a)
            if not ok:
                self._member[t] = None
                return False, None
            reps.append(rep)
        witness = self.base.realize(t.head, tuple(reps))
        self._member[t] = witness
        return witness is not None, witness

    def equivalent_in_closure(self, s: Term, t: Term) -> bool:
        """The closed partial congruence on B: representatives must be ~A."""
        s_ok, s_rep = self.member(s)
        t_ok, t_rep = self.member(t)
        if not (s_ok and t_ok):
            return False
        return self.base.equivalent(s_rep, t_rep)

    # -- the generated congruence on all of FX ------------------------------

    def decide(self, s: Term, t: Term) -> bool:
        """s and t decompose into skeletons over maximal B-subterms; they are
        congruent iff the skeletons agree and matching B-subterms are
        equivalent in the closure."""
        s_in, _ = self.member(s)
        t_in, _ = self.member(t)
        if s_in and t_in:
            return self.equivalent_in_closure(s, t)
        if s_in != t_in:
            return False
        if s.head != t.head or len(s.args) != len(t.args):
            return False
        if not s.args:
            return s == t
        return all(self.decide(a, b) for a, b in zip(s.args, t.args))

    # -- stage-wise verification --------------------------------------------

    def stage_of(self, t: Term) -> Optional[int]:
        """Closure stage at which ``t`` enters B: 0 on A, else one above its
        children.  None when t is outside B."""
        ok, _ = self.member(t)
        if not ok:
            return None
        if self.base.contains(t):
            return 0
        return 1 + max(self.stage_of(a) for a in t.args)

    def stage_invariant_check(self, k: int, sample: Iterable[Term]) -> StageReport:
        """Verify the five stage-induction claims on a finite sample:

        (i)   the stage relations are increasing,
        (ii)  A-representatives are unique up to ~A,
        (iii) a later stage restricted to an earlier carrier is the earlier
              relation,
        (iv)  each stage relation is transitive,
        (v)   each stage relation is a partial congruence.
        """
        report = StageReport(stage=k)
        sample = list(dict.fromkeys(sample))
        staged: list[tuple[Term, int]] = []
        for t in sample:
            st = self.stage_of(t)
            if st is not None and st <= k:
                staged.append((t, st))

        def eq_at(s: Term, t: Term, stage: int) -> bool:
            # claim (iii) makes the stage restriction the restriction of the
            # limit relation, so equality at a stage is equality in B once
            # both members have entered.
            return self.equivalent_in_closure(s, t)

        members = [t for t, _ in staged]
        in_a = [t for t in members if self.base.contains(t)]

        # (ii) representative uniqueness on the sample
        for t in members:
            report.checked += 1
            _, rep = self.member(t)
            for a in in_a:
                if self.equivalent_in_closure(t, a) and not self.base.equivalent(rep, a):
                    report.violations.append(
                        f"(ii) {t!r}: representative {rep!r} not ~A {a!r}"
                    )

        # (i)+(iii): relations increase and restrict coherently
        for s, ss in staged:
            for t, ts in staged:
                report.checked += 1
                lo = max(ss, ts)
                if lo < k and eq_at(s, t, lo) != eq_at(s, t, k):
                    report.violations.append(f"(i)/(iii) {s!r} ~ {t!r} unstable")

        # (iv) transitivity
        for s, _ in staged:
            for t, _ in staged:
                if not eq_at(s, t, k):
                    continue
                for u, _ in staged:
                    report.checked += 1
                    if eq_at(t, u, k) and not eq_at(s, u, k):
                        report.violations.append(
                            f"(iv) transitivity fails on {s!r},{t!r},{u!r}"
                        )

        # (v) partial congruence on the sampled members
        heads: dict[tuple[str, int], list[Term]] = {}
        for t in members:
            if t.args:
                heads.setdefault((t.head, len(t.args)), []).append(t)
        for (head, _n), ts in heads.items():
            for s, t in product(ts, ts):
                report.checked += 1
                if all(eq_at(a, b, k) for a, b in zip(s.args, t.args)):
                    if not eq_at(s, t, k):
                        report.violations.append(
                            f"(v) congruence fails on {s!r},{t!r}"
                        )
        return report

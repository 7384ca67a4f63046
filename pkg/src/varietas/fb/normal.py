"""Canonical forms for space-time terms.

Every space-time term (one headed by P, S, S_inv, T, H, N_H, or K) reduces,
by the unit laws of the variety, to one of three shapes relative to a
component seed g::

    S^n T^m (g)                      time m,     space n
    S^n T^m H T^k (g)                time m+k,   space n
    S^n T^m N_H(s, u, T^k(g))        time m+k+1, space n

Component seeds are P(c), P(x) for a generator x, and K(s, lam) for a
normal-form space-time term lam.  P over a constant or over the image of a
non-space-time operation collapses to the P(c) component; that single step
uses the projection-collapse law rather than a unit law and is what keeps
the seed set closed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..terms import Term
from .signature import (
    C, H, K, N_H, P, S, S_INV, T,
    SPACE_TIME_OPS, space_power, time_power,
)

SHAPE_ST = "SnTm"
SHAPE_H = "SnTmHTk"
SHAPE_NH = "SnTmNH"


class NotSpaceTimeError(ValueError):
    """Input is not in the image of a space-time operation."""


@dataclass(frozen=True)
class SpaceTimeNormalForm:
    seed: Term
    shape: str
    space: int
    m: int
    k: int = 0
    payload: Optional[tuple[Term, Term]] = None

    def __post_init__(self) -> None:
        if self.shape == SHAPE_NH and self.payload is None:
            raise ValueError("N_H shape needs its two payload arguments")

    @property
    def time(self) -> int:
        if self.shape == SHAPE_ST:
            return self.m
        if self.shape == SHAPE_H:
            return self.m + self.k
        return self.m + self.k + 1

    def core(self) -> Term:
        """The part under the S^n T^m prefix."""
        if self.shape == SHAPE_ST:
            return self.seed
        if self.shape == SHAPE_H:
            return Term(H, (time_power(self.k, self.seed),))
        s, u = self.payload
        return Term(N_H, (s, u, time_power(self.k, self.seed)))

    def time_prefix(self) -> Term:
        return time_power(self.m, self.core())

    def term(self) -> Term:
        return space_power(self.space, self.time_prefix())

    def shifted(self, dspace: int = 0, dm: int = 0) -> "SpaceTimeNormalForm":
        return SpaceTimeNormalForm(
            self.seed, self.shape, self.space + dspace, self.m + dm,
            self.k, self.payload,
        )

    def at_origin(self) -> "SpaceTimeNormalForm":
        return SpaceTimeNormalForm(self.seed, self.shape, 0, self.m, self.k, self.payload)


def _seed(seed_term: Term) -> SpaceTimeNormalForm:
    return SpaceTimeNormalForm(seed_term, SHAPE_ST, 0, 0)


def normalize_space_time(t: Term, generators: tuple[str, ...] = ()) -> SpaceTimeNormalForm:
    """Normal form of a space-time term; idempotent on reconstructed terms.

    ``generators`` lists the leaf names that anchor their own components;
    all other leaves are constants and collapse into the component of c.
    """
    if t.is_leaf or t.head not in SPACE_TIME_OPS:
        raise NotSpaceTimeError(f"not a space-time term: {t!r}")
    gen_set = set(generators)

    def inner(u: Term) -> SpaceTimeNormalForm:
        if u.args and u.head in SPACE_TIME_OPS:
            return go(u)
        if u.is_leaf:
            atom = u if u.head in gen_set else Term(C)
            return _seed(Term(P, (atom,)))
        return _seed(Term(P, (Term(C),)))

    def go(u: Term) -> SpaceTimeNormalForm:
        head = u.head
        if head == P:
            return inner(u.args[0])
        if head == S:
            return inner(u.args[0]).shifted(dspace=1)
        if head == S_INV:
            return inner(u.args[0]).shifted(dspace=-1)
        if head == T:
            return inner(u.args[0]).shifted(dm=1)
        if head == H:
            nf = inner(u.args[0])
            return SpaceTimeNormalForm(nf.seed, SHAPE_H, 0, 0, k=nf.time)
        if head == N_H:
            s, v, w = u.args
            nf = inner(w)
            return SpaceTimeNormalForm(nf.seed, SHAPE_NH, 0, 0, k=nf.time, payload=(s, v))
        if head == K:
            s, w = u.args
            lam = inner(w)
            return _seed(Term(K, (s, lam.term())))
        raise NotSpaceTimeError(f"not a space-time term: {u!r}")

    return go(t)


def nf_term(t: Term, generators: tuple[str, ...] = ()) -> Term:
    return normalize_space_time(t, generators).term()


def nf_of(nf: SpaceTimeNormalForm, op: str, generators: tuple[str, ...] = ()) -> SpaceTimeNormalForm:
    """Apply a unary space-time move to an already-normalized element."""
    if op == S:
        return nf.shifted(dspace=1)
    if op == S_INV:
        return nf.shifted(dspace=-1)
    if op == T:
        return nf.shifted(dm=1)
    if op == P:
        return nf
    if op == H:
        return SpaceTimeNormalForm(nf.seed, SHAPE_H, 0, 0, k=nf.time)
    raise ValueError(f"not a unary space-time move: {op}")

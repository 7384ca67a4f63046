"""Independent oracles the test suite checks the solvers against.

None of these reuse the production code paths they verify: congruence
questions are settled by transparent pair saturation over a finite carrier,
equational questions by bounded rewriting, and the constants-only variety
by direct evaluation in a separating model built straight from a machine
trace.
"""

from __future__ import annotations

import random
from itertools import product
from typing import Iterable, Optional

from varietas.terms import Equation, Term, subterm_closure
from varietas.turing import AdjustedMachine, TapeConfiguration, run
from varietas.fb.signature import (
    C, C_Q, C_S, E, F, H, K, N_H, N_Q, N_S, ONE, ONE_F, R, S, S_INV, T,
    ZERO, ZERO_F,
)


# ----------------------------------------------------------------------------
# brute-force congruence saturation
# ----------------------------------------------------------------------------

def saturated_classes(
    carrier: Iterable[Term], seeds: Iterable[tuple[Term, Term]]
) -> dict[Term, set]:
    """Smallest partial congruence by transparent class merging: sweep all
    composite pairs until nothing merges."""
    terms = list(dict.fromkeys(carrier))
    cls: dict[Term, set] = {t: {t} for t in terms}

    def merge(a: Term, b: Term) -> bool:
        sa, sb = cls[a], cls[b]
        if sa is sb:
            return False
        union = sa | sb
        for t in union:
            cls[t] = union
        return True

    for a, b in seeds:
        merge(a, b)
    groups: dict[tuple[str, int], list[Term]] = {}
    for t in terms:
        if t.args:
            groups.setdefault((t.head, len(t.args)), []).append(t)
    changed = True
    while changed:
        changed = False
        for group in groups.values():
            for i, s in enumerate(group):
                for t in group[i + 1:]:
                    if cls[s] is cls[t]:
                        continue
                    if all(cls[x] is cls[y] for x, y in zip(s.args, t.args)):
                        if merge(s, t):
                            changed = True
    return cls


def congruence_oracle(
    a_carrier: Iterable[Term], seeds: list[tuple[Term, Term]],
    s: Term, t: Term,
) -> bool:
    """Whether s ~ t in the congruence on the whole term algebra generated
    by the seed pairs (complete for ground equations over the subterm
    closure of everything involved)."""
    carrier = subterm_closure(list(a_carrier) + [s, t])
    cls = saturated_classes(carrier, seeds)
    return cls[s] is cls[t]


# ----------------------------------------------------------------------------
# bounded equational derivation (rewriting both ways)
# ----------------------------------------------------------------------------

def _positions(t: Term, path=()) -> list[tuple]:
    out = [path]
    for i, a in enumerate(t.args):
        out += _positions(a, path + (i,))
    return out


def _subterm_at(t: Term, path: tuple) -> Term:
    for i in path:
        t = t.args[i]
    return t


def _replace_at(t: Term, path: tuple, new: Term) -> Term:
    if not path:
        return new
    i = path[0]
    args = list(t.args)
    args[i] = _replace_at(args[i], path[1:], new)
    return Term(t.head, tuple(args))


def term_size(t: Term) -> int:
    return 1 + sum(term_size(a) for a in t.args)


def rewrite_orbit(
    equations: list[tuple[Term, Term]], start: Term, depth: int,
    max_size: int = 40, max_terms: int = 60000,
) -> set[Term]:
    """All terms reachable from ``start`` by at most ``depth`` ground
    rewrite applications, either orientation, any position."""
    seen = {start}
    frontier = [start]
    for _ in range(depth):
        nxt = []
        for t in frontier:
            for path in _positions(t):
                sub = _subterm_at(t, path)
                for lhs, rhs in equations:
                    for a, b in ((lhs, rhs), (rhs, lhs)):
                        if sub == a:
                            new = _replace_at(t, path, b)
                            if new not in seen and term_size(new) <= max_size:
                                seen.add(new)
                                nxt.append(new)
                                if len(seen) >= max_terms:
                                    return seen
        frontier = nxt
        if not frontier:
            break
    return seen


def derivable_within(equations, s: Term, t: Term, depth: int, **kw) -> bool:
    return t in rewrite_orbit(equations, s, depth, **kw)


# ----------------------------------------------------------------------------
# pattern rewriting (for law schemas with variables)
# ----------------------------------------------------------------------------

def _match(pattern: Term, t: Term, variables: set[str], env: dict) -> Optional[dict]:
    if pattern.head in variables and not pattern.args:
        bound = env.get(pattern.head)
        if bound is None:
            env = dict(env)
            env[pattern.head] = t
            return env
        return env if bound == t else None
    if pattern.head != t.head or len(pattern.args) != len(t.args):
        return None
    for p, a in zip(pattern.args, t.args):
        env = _match(p, a, variables, env)
        if env is None:
            return None
    return env


def _instantiate(pattern: Term, env: dict) -> Term:
    if not pattern.args:
        return env.get(pattern.head, pattern)
    return Term(pattern.head, tuple(_instantiate(a, env) for a in pattern.args))


def schema_rewrite_orbit(
    schemas: list[Equation], start: Term, depth: int,
    max_size: int = 30, max_terms: int = 40000,
) -> set[Term]:
    seen = {start}
    frontier = [start]
    for _ in range(depth):
        nxt = []
        for t in frontier:
            for path in _positions(t):
                sub = _subterm_at(t, path)
                for eq in schemas:
                    variables = set(eq.variables)
                    for a, b in ((eq.lhs, eq.rhs), (eq.rhs, eq.lhs)):
                        env = _match(a, sub, variables, {})
                        if env is None or len(env) != len(variables):
                            continue
                        new = _replace_at(t, path, _instantiate(b, env))
                        if new not in seen and term_size(new) <= max_size:
                            seen.add(new)
                            nxt.append(new)
                            if len(seen) >= max_terms:
                                return seen
        frontier = nxt
        if not frontier:
            break
    return seen


# ----------------------------------------------------------------------------
# random generators (seeded by the caller)
# ----------------------------------------------------------------------------

def random_term(rng: random.Random, leaves: list[Term],
                ops: list[tuple[str, int]], depth: int) -> Term:
    if depth <= 0 or (leaves and rng.random() < 0.35):
        return rng.choice(leaves)
    name, arity = rng.choice(ops)
    if arity == 0:
        return Term(name)
    return Term(name, tuple(
        random_term(rng, leaves, ops, depth - 1) for _ in range(arity)))


def random_subterm_closed_carrier(
    rng: random.Random, leaves: list[Term], ops: list[tuple[str, int]],
    max_size: int,
) -> list[Term]:
    carrier: set[Term] = set()
    while len(carrier) < max_size:
        t = random_term(rng, leaves, [o for o in ops if o[1] > 0], rng.randint(1, 3))
        new = carrier | subterm_closure([t])
        if len(new) > max_size:
            break
        carrier = new
    if not carrier:
        carrier = set(leaves[:1])
    return sorted(carrier, key=str)


# ----------------------------------------------------------------------------
# separating model for the constants-only variety (direct evaluation)
# ----------------------------------------------------------------------------

STAR = ("star",)


class ConstModel:
    """The separating algebra for a non-halting run, constants-only type."""

    def __init__(self, m: AdjustedMachine, tape: TapeConfiguration,
                 time_window: int, space_window: int):
        tr = run(m, tape, time_window)
        if tr.halted_at is not None:
            raise ValueError("need a non-halting run")
        self.m = m
        self.tw, self.sw = time_window, space_window
        self.heads = [row.head for row in tr.rows]
        self.states = [row.state for row in tr.rows]
        self.letters = {}
        for t, row in enumerate(tr.rows):
            for n, a in row.cells:
                self.letters[(n, t)] = a
        self.int_min = -(2 * space_window + 2)

    def constant(self, name: str):
        if name == C:
            return ("st", 0, 0)
        if name == ZERO:
            return ("int", 0)
        if name == ONE:
            return ("int", 1)
        if name == ZERO_F:
            return ("intF", 0)
        if name == ONE_F:
            return ("intF", 1)
        if name in self.m.states:
            return ("state", name)
        if name in self.m.alphabet:
            return ("letter", name)
        raise ValueError(name)

    def _in_window(self, n, t):
        return abs(n) <= self.sw and 0 <= t <= self.tw

    def op(self, name: str, args: tuple):
        if any(a is None for a in args):
            return None
        if name in (T, S, S_INV):
            x = args[0] if args[0][0] == "st" else ("st", 0, 0)
            dn = {T: (0, 1), S: (1, 0), S_INV: (-1, 0)}[name]
            n, t = x[1] + dn[0], x[2] + dn[1]
            return ("st", n, t) if self._in_window(n, t) else None
        if name == H:
            x = args[0]
            t = x[2] if x[0] == "st" else 0
            return ("st", self.heads[t], t)
        if name == C_Q:
            x = args[0]
            t = x[2] if x[0] == "st" else 0
            return ("state", self.states[t])
        if name == C_S:
            x = args[0]
            n, t = (x[1], x[2]) if x[0] == "st" else (0, 0)
            return ("letter", self.letters.get((n, t), self.m.blank))
        if name == E:
            x = args[0]
            if x[0] == "state":
                return ("int", 0 if x[1] == self.m.halt else 1)
            return STAR
        if name == R:
            x, y = args
            if x[0] != "st" or y[0] != "st":
                return STAR
            if y[1] > x[1]:
                return ("int", 1)
            v = y[1] - x[1]
            return ("int", v) if v >= self.int_min else None
        if name == F:
            x, y = args
            if x[0] != "st" or y[0] != "st":
                return STAR
            if y[2] > x[2]:
                return ("intF", 1)
            v = y[2] - x[2]
            return ("intF", v) if v >= self.int_min else None
        if name == K:
            x, y = args
            if y[0] == "st":
                if x in (("int", 0), ("intF", 0)):
                    return y
                if x in (("int", 1), ("intF", 1)):
                    return ("st", 0, 0)
            if x == STAR or y == STAR:
                return STAR
            return ("int", 0) if x == y else ("int", 1)
        if name in (N_Q, N_S, N_H):
            x, y, z = args
            if name == N_H:
                zst = z if z[0] == "st" else ("st", 0, 0)
                t = zst[2]
                if t + 1 > self.tw:
                    return None
                if x[0] == "state" and y[0] == "letter":
                    _, mu, _ = self.m.step_data(x[1], y[1])
                    n2 = self.heads[t] + mu
                else:
                    n2 = self.heads[t]
                return ("st", n2, t + 1) if self._in_window(n2, t + 1) else None
            if x[0] == "state" and y[0] == "letter" and z[0] == "st" \
                    and z[1] == self.heads[z[2]]:
                nq, _, na = self.m.step_data(x[1], y[1])
                return ("state", nq) if name == N_Q else ("letter", na)
            return STAR
        raise ValueError(name)

    def eval_term(self, t: Term):
        if not t.args:
            return self.constant(t.head)
        args = tuple(self.eval_term(a) for a in t.args)
        if any(a is None for a in args):
            return None
        return self.op(t.head, args)

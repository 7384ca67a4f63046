"""Finite slice of the separating model for a non-halting run.

The model's carrier is a junk point, the machine's states and letters, the
squares S^n T^m(c) of a space-time grid, and two integer rays capped at 1
(the R- and F-comparison values).  Operations follow the published
construction, with the comparison table completed symmetrically: the
equality test answers 0 on equal non-junk points and 1 on distinct ones,
which satisfies every comparison law instance (the published case list
covers only square-versus-constant pairs).  Head-step values on junk
arguments are the time-step of the head square rather than a bare junk
value; the head-of-a-step laws force that choice.

Everything is windowed: squares live in |n| <= space_window and
m <= time_window, and a law instance counts as checked only when both sides
evaluate inside the window.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterator, Optional

from ..terms import Presentation, Term
from ..turing import AdjustedMachine, TapeConfiguration, run
from .signature import (
    C, C_Q, C_S, C_STAR, E, F, FBSignature, H, K, K_STAR, N_H, N_Q, N_S,
    ONE, ONE_F, P, R, S, S_INV, T, U, ZERO, ZERO_F, build_signature,
)

STAR = ("star",)


def _st(n: int, m: int):
    return ("st", n, m)


def _int(i: int):
    return ("int", i)


def _intf(i: int):
    return ("intF", i)


def _state(q: str):
    return ("state", q)


def _letter(a: str):
    return ("letter", a)


class SliceError(Exception):
    pass


@dataclass
class LawCheckReport:
    checked: int = 0
    skipped_outside_window: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


@dataclass
class CountermodelSlice:
    fbsig: FBSignature
    space_window: int
    time_window: int
    heads: list[int]
    states: list[str]
    letter_at: dict[tuple[int, int], str]
    blank: str
    int_min: int

    # -- elements ------------------------------------------------------------

    def constant(self, name: str):
        if name == C:
            return _st(0, 0)
        if name == ZERO:
            return _int(0)
        if name == ONE:
            return _int(1)
        if name == ZERO_F:
            return _intf(0)
        if name == ONE_F:
            return _intf(1)
        if name in self.fbsig.machine.states:
            return _state(name)
        if name in self.fbsig.machine.alphabet:
            return _letter(name)
        raise SliceError(f"unknown constant {name!r}")

    def squares(self) -> Iterator[tuple]:
        for n in range(-self.space_window, self.space_window + 1):
            for m in range(self.time_window + 1):
                yield _st(n, m)

    def carrier(self) -> Iterator[tuple]:
        yield STAR
        for q in self.fbsig.machine.states:
            yield _state(q)
        for a in self.fbsig.machine.alphabet:
            yield _letter(a)
        for i in range(self.int_min, 2):
            yield _int(i)
            yield _intf(i)
        yield from self.squares()

    def _in_window(self, n: int, m: int) -> bool:
        return abs(n) <= self.space_window and 0 <= m <= self.time_window

    def _grid_letter(self, n: int, m: int) -> str:
        return self.letter_at.get((n, m), self.blank)

    # -- operations -----------------------------------------------------------

    def eval_op(self, op: str, args: tuple) -> Optional[tuple]:
        if any(a is None for a in args):
            return None
        m = self.fbsig.machine
        if op == T:
            x = args[0] if args[0][0] == "st" else _st(0, 0)
            return _st(x[1], x[2] + 1) if self._in_window(x[1], x[2] + 1) else None
        if op == S:
            x = args[0] if args[0][0] == "st" else _st(0, 0)
            return _st(x[1] + 1, x[2]) if self._in_window(x[1] + 1, x[2]) else None
        if op == S_INV:
            x = args[0] if args[0][0] == "st" else _st(0, 0)
            return _st(x[1] - 1, x[2]) if self._in_window(x[1] - 1, x[2]) else None
        if op == P:
            x = args[0]
            return x if x[0] == "st" else _st(0, 0)
        if op == H:
            x = args[0]
            if x[0] != "st":
                return _st(self.heads[0], 0)
            return _st(self.heads[x[2]], x[2])
        if op == U:
            x = args[0]
            if x[0] == "int":
                return _int(min(x[1] + 1, 1))
            if x[0] == "intF":
                return _intf(min(x[1] + 1, 1))
            return STAR
        if op == E:
            x = args[0]
            if x[0] == "state":
                return _int(0 if x[1] == m.halt else 1)
            return STAR
        if op == C_Q:
            x = args[0]
            t = x[2] if x[0] == "st" else 0
            return _state(self.states[t])
        if op == C_S:
            x = args[0]
            n, t = (x[1], x[2]) if x[0] == "st" else (0, 0)
            return _letter(self._grid_letter(n, t))
        if op == R:
            x = args[0] if args[0][0] == "st" else _st(0, 0)
            y = args[1] if args[1][0] == "st" else _st(0, 0)
            n, k = x[1], y[1]
            if k > n:
                return _int(1)
            return _int(k - n) if k - n >= self.int_min else None
        if op == F:
            x = args[0] if args[0][0] == "st" else _st(0, 0)
            y = args[1] if args[1][0] == "st" else _st(0, 0)
            mt, j = x[2], y[2]
            if j > mt:
                return _intf(1)
            return _intf(j - mt) if j - mt >= self.int_min else None
        if op == K:
            x, y = args
            if y[0] == "st":
                if x in (_int(0), _intf(0)):
                    return y
                if x in (_int(1), _intf(1)):
                    return _st(0, 0)
            return _st(0, 0)
        if op == K_STAR:
            x, y = args
            if x == STAR or y == STAR:
                return STAR
            return _int(0) if x == y else _int(1)
        if op == C_STAR:
            x, y = args
            if x[0] != "st" or y[0] != "int":
                return STAR
            if y[1] == 1:
                return _letter(self._grid_letter(x[1], x[2]))
            if x[2] + 1 > self.time_window:
                return None
            return _letter(self._grid_letter(x[1], x[2] + 1))
        if op == N_H:
            x, y, z = args
            zst = z if z[0] == "st" else _st(0, 0)
            t = zst[2]
            if t + 1 > self.time_window:
                return None
            if x[0] == "state" and y[0] == "letter":
                _, mu, _ = self.fbsig.machine.step_data(x[1], y[1])
                n2 = self.heads[t] + mu
            else:
                n2 = self.heads[t]
            return _st(n2, t + 1) if self._in_window(n2, t + 1) else None
        if op == N_Q:
            x, y, z = args
            if x[0] == "state" and y[0] == "letter" and z[0] == "st" \
                    and z[1] == self.heads[z[2]]:
                nq, _, _ = self.fbsig.machine.step_data(x[1], y[1])
                return _state(nq)
            return STAR
        if op == N_S:
            x, y, z = args
            if x[0] == "state" and y[0] == "letter" and z[0] == "st" \
                    and z[1] == self.heads[z[2]]:
                _, _, na = self.fbsig.machine.step_data(x[1], y[1])
                return _letter(na)
            return STAR
        raise SliceError(f"unknown operation {op!r}")

    def eval_term(self, t: Term, env: Optional[dict] = None) -> Optional[tuple]:
        if not t.args:
            if env is not None and t.head in env:
                return env[t.head]
            return self.constant(t.head)
        args = tuple(self.eval_term(a, env) for a in t.args)
        if any(a is None for a in args):
            return None
        return self.eval_op(t.head, args)

    def separates_zero_one(self) -> bool:
        return self.eval_term(Term(ZERO)) != self.eval_term(Term(ONE))

    def check_presentation(self, p: Presentation) -> list[str]:
        bad = []
        for eq in p.relations:
            l, r = self.eval_term(eq.lhs), self.eval_term(eq.rhs)
            if l is None or r is None or l != r:
                bad.append(f"{eq!r} evaluates to {l} vs {r}")
        return bad


def build_countermodel_slice(
    m: AdjustedMachine,
    tape: TapeConfiguration,
    time_window: int,
    space_window: int,
    fbsig: Optional[FBSignature] = None,
) -> tuple[CountermodelSlice, LawCheckReport]:
    """Run the machine ``time_window`` steps (it must not halt) and carve the
    model out of the trace; the report covers every law instance whose
    evaluation stays inside the window."""
    if fbsig is None:
        fbsig = build_signature(m)
    tr = run(m, tape, time_window)
    if tr.halted_at is not None:
        raise SliceError(
            f"machine halts at {tr.halted_at}; no separating slice at this window"
        )
    heads = [row.head for row in tr.rows]
    states = [row.state for row in tr.rows]
    letter_at = {}
    for t, row in enumerate(tr.rows):
        for n, a in row.cells:
            letter_at[(n, t)] = a
    slc = CountermodelSlice(
        fbsig=fbsig,
        space_window=space_window,
        time_window=time_window,
        heads=heads,
        states=states,
        letter_at=letter_at,
        blank=m.blank,
        int_min=-(2 * space_window + 2),
    )
    report = check_slice_laws(slc)
    return slc, report


# ----------------------------------------------------------------------------
# the law check: exact per-family domains
# ----------------------------------------------------------------------------

def _junk_reps(slc: CountermodelSlice) -> list[tuple]:
    m = slc.fbsig.machine
    return [
        STAR,
        _state(m.start),
        _state(m.halt),
        _letter(m.blank),
        _int(1), _int(0), _int(-1),
        _intf(1), _intf(0),
    ]


def check_slice_laws(slc: CountermodelSlice) -> LawCheckReport:
    report = LawCheckReport()
    m = slc.fbsig.machine
    all_elts = list(slc.carrier())
    squares = list(slc.squares())
    reps = _junk_reps(slc)
    state_elts = [_state(q) for q in m.states]
    letter_elts = [_letter(a) for a in m.alphabet]

    def check(name: str, lhs, rhs) -> None:
        if lhs is None or rhs is None:
            report.skipped_outside_window += 1
            return
        report.checked += 1
        if lhs != rhs:
            report.violations.append(f"{name}: {lhs} != {rhs}")

    op = slc.eval_op

    # family I: unary move laws over the whole carrier
    for x in all_elts:
        px = op(P, (x,))
        check("I.PP", op(P, (px,)), px)
        tx = op(T, (x,))
        check("I.PT", op(P, (tx,)) if tx else None, tx)
        check("I.TP", op(T, (px,)), tx)
        sx = op(S, (x,))
        check("I.PS", op(P, (sx,)) if sx else None, sx)
        check("I.SP", op(S, (px,)), sx)
        six = op(S_INV, (x,))
        check("I.PSi", op(P, (six,)) if six else None, six)
        check("I.SiP", op(S_INV, (px,)), six)
        hx = op(H, (x,))
        check("I.PH", op(P, (hx,)), hx)
        check("I.HP", op(H, (px,)), hx)
        check("I.HS", op(H, (sx,)) if sx else None, hx if sx else None)
        check("I.HSi", op(H, (six,)) if six else None, hx if six else None)
        check("I.HH", op(H, (hx,)), hx)
        check("I.HTH", op(H, (op(T, (hx,)),)) if op(T, (hx,)) else None,
              op(H, (tx,)) if tx else None)
        check("I.TS", op(T, (sx,)) if sx else None, op(S, (tx,)) if tx else None)
        check("I.TSi", op(T, (six,)) if six else None,
              op(S_INV, (tx,)) if tx else None)
        check("I.SSi", op(S, (six,)) if six else None, px if six else None)
        check("I.SiS", op(S_INV, (sx,)) if sx else None, px if sx else None)

    # family I, N_H laws: machine pairs plus junk-pair representatives
    nh_pairs = [(q, a) for q in state_elts for a in letter_elts]
    junk_pairs = [(x, y) for x in reps for y in reps
                  if not (x[0] == "state" and y[0] == "letter")][:20]
    for x, y in nh_pairs + junk_pairs:
        for z in all_elts:
            nh = op(N_H, (x, y, z))
            check("I.PNH", op(P, (nh,)) if nh else None, nh)
            check("I.NHP", op(N_H, (x, y, op(P, (z,)))), nh)
            hz = op(H, (z,))
            check("I.NHH", op(N_H, (x, y, hz)), nh)
            tz = op(T, (z,))
            check("I.HNH", op(H, (nh,)) if nh else None,
                  op(H, (tz,)) if tz else None)
    for x in reps:
        for y in squares[:40]:
            k = op(K, (x, y))
            check("I.PK", op(P, (k,)), k)
            check("I.KP", op(K, (x, op(P, (y,)))), k)

    # family II over head squares (H of anything lands on one) and junk
    h_images = [op(H, (z,)) for z in squares] + [op(H, (STAR,))]
    h_images = sorted(set(h_images))
    base = [q for q in m.states if q not in m.lr_states]
    for q, a in product(m.states, m.alphabet):
        nq, mu, na = m.step_data(q, a)
        for hx in h_images:
            check(f"II.NQ[{q},{a}]", op(N_Q, (_state(q), _letter(a), hx)),
                  _state(nq))
            check(f"II.NS[{q},{a}]", op(N_S, (_state(q), _letter(a), hx)),
                  _letter(na))
            if q not in m.lr_states:
                thx = op(T, (hx,))
                target = None
                if thx is not None:
                    target = op(S, (thx,)) if mu > 0 else op(S_INV, (thx,))
                check(f"II.NH[{q},{a}]",
                      op(N_H, (_state(q), _letter(a), hx)) if thx and target else None,
                      target)
    for q in base:
        for hx in h_images:
            csx = op(C_S, (hx,))
            thx = op(T, (hx,))
            check(f"II.NQL[{q}]", op(N_Q, (_state(f"{q}_L"), csx, hx)), _state(q))
            check(f"II.NQR[{q}]", op(N_Q, (_state(f"{q}_R"), csx, hx)), _state(q))
            check(f"II.NSL[{q}]", op(N_S, (_state(f"{q}_L"), csx, hx)), _letter("e_L"))
            check(f"II.NSR[{q}]", op(N_S, (_state(f"{q}_R"), csx, hx)), _letter("e_R"))
            if thx is not None:
                check(f"II.NHL[{q}]", op(N_H, (_state(f"{q}_L"), csx, hx)),
                      op(S, (thx,)))
                check(f"II.NHR[{q}]", op(N_H, (_state(f"{q}_R"), csx, hx)),
                      op(S_INV, (thx,)))

    # family III over every element
    for x in all_elts:
        hx = op(H, (x,))
        cq, cs = op(C_Q, (hx,)), op(C_S, (hx,))
        thx = op(T, (hx,))
        tx = op(T, (x,))
        check("III.CS", op(C_S, (thx,)) if thx else None,
              op(N_S, (cq, cs, hx)) if thx else None)
        check("III.CQ", op(C_Q, (thx,)) if thx else None,
              op(N_Q, (cq, cs, hx)) if thx else None)
        check("III.HT", op(H, (tx,)) if tx else None,
              op(N_H, (cq, cs, hx)) if tx else None)

    # family IV over every element
    for x in all_elts:
        px = op(P, (x,))
        hx = op(H, (x,))
        check("IV.CQP", op(C_Q, (px,)), op(C_Q, (x,)))
        check("IV.CQH", op(C_Q, (hx,)), op(C_Q, (x,)))
        check("IV.CSP", op(C_S, (x,)), op(C_S, (px,)))
        tpx = op(T, (px,))
        check("IV.CSTR1", op(C_S, (tpx,)) if tpx else None,
              op(C_STAR, (px, op(R, (px, hx)))) if tpx else None)
        check("IV.CSTR2", op(C_S, (tpx,)) if tpx else None,
              op(C_STAR, (px, op(R, (hx, px)))) if tpx else None)
        check("IV.CS1", op(C_S, (px,)), op(C_STAR, (px, _int(1))))

    # family V: R depends only on the two space coordinates and F only on
    # the two times, so position/time pairs cover every square instance
    check("V.U0", op(U, (_int(0),)), _int(1))
    check("V.U1", op(U, (_int(1),)), _int(1))
    check("V.U0F", op(U, (_intf(0),)), _intf(1))
    check("V.U1F", op(U, (_intf(1),)), _intf(1))
    W, TW = slc.space_window, slc.time_window
    for n1 in range(-W, W + 1):
        x = _st(n1, 0)
        check("V.RPP", op(R, (x, x)), _int(0))
        check("V.FPP", op(F, (x, x)), _intf(0))
        for n2 in range(-W, W + 1):
            y = _st(n2, 0)
            check("V.RP", op(R, (x, y)), op(R, (op(P, (x,)), op(P, (y,)))))
            sy = op(S, (y,))
            check("V.RS", op(R, (x, sy)) if sy else None,
                  op(U, (op(R, (x, y)),)) if sy else None)
    for m1 in range(TW + 1):
        x = _st(0, m1)
        for m2 in range(TW + 1):
            y = _st(0, m2)
            check("V.FP", op(F, (x, y)), op(F, (op(P, (x,)), op(P, (y,)))))
            check("V.FH", op(F, (x, y)), op(F, (op(H, (x,)), op(H, (y,)))))
            ty = op(T, (y,))
            check("V.FT", op(F, (x, ty)) if ty else None,
                  op(U, (op(F, (x, y)),)) if ty else None)
    for x in reps:
        for y in reps:
            check("V.RP(junk)", op(R, (x, y)), op(R, (op(P, (x,)), op(P, (y,)))))
            check("V.FP(junk)", op(F, (x, y)), op(F, (op(P, (x,)), op(P, (y,)))))

    # family VI: P collapses every non-space-time image to P(c)
    pc = op(P, (slc.constant(C),))
    ranges = {
        "U": {op(U, (x,)) for x in all_elts},
        "E": {op(E, (x,)) for x in all_elts},
        "CS": {op(C_S, (x,)) for x in all_elts},
        "CQ": {op(C_Q, (x,)) for x in all_elts},
        "R": {op(R, (x, y)) for x in squares for y in squares[:1]}
             | {op(R, (squares[0], y)) for y in squares}
             | {op(R, (x, y)) for x in reps for y in reps},
        "F": {op(F, (x, y)) for x in squares for y in squares[:1]}
             | {op(F, (squares[0], y)) for y in squares}
             | {op(F, (x, y)) for x in reps for y in reps},
        "Kstar": {op(K_STAR, (x, y)) for x in reps + squares[:20]
                  for y in reps + squares[:20]},
        "Cstar": {op(C_STAR, (x, y)) for x in squares for y in
                  [_int(1), _int(0), _int(-1), STAR]},
        "NQ": {op(N_Q, (x, y, z)) for x in reps for y in reps for z in reps}
              | {op(N_Q, (_state(q), _letter(a), hz))
                 for q in m.states for a in m.alphabet
                 for hz in h_images},
        "NS": {op(N_S, (x, y, z)) for x in reps for y in reps for z in reps}
              | {op(N_S, (_state(q), _letter(a), hz))
                 for q in m.states for a in m.alphabet
                 for hz in h_images},
    }
    for tag, values in ranges.items():
        for v in values:
            check(f"VI.P{tag}", op(P, (v,)) if v is not None else None,
                  pc if v is not None else None)
    for d in slc.fbsig.constants():
        check(f"VI.Pconst[{d}]", op(P, (slc.constant(d),)), pc)

    # family VII: K over comparison values and squares
    for y in squares + reps:
        target = y if y[0] == "st" else _st(0, 0)
        check("VII.K0", op(K, (_int(0), op(P, (y,)))), op(P, (y,)))
        check("VII.K0F", op(K, (_intf(0), op(P, (y,)))), op(P, (y,)))
        check("VII.K1", op(K, (_int(1), op(P, (y,)))), _st(0, 0))
        check("VII.K1F", op(K, (_intf(1), op(P, (y,)))), _st(0, 0))
        del target

    consts = [slc.constant(d) for d in slc.fbsig.constants()]
    letters = set(m.alphabet)
    states = set(m.states)
    for d_name in slc.fbsig.constants():
        d = slc.constant(d_name)
        check(f"VII.Kdd[{d_name}]", op(K_STAR, (d, d)), _int(0))
        for e_name in slc.fbsig.constants():
            if d_name != e_name:
                e = slc.constant(e_name)
                check("VII.Kde", op(K_STAR, (d, e)), _int(1))
        for x in squares:
            if d_name != C:
                check("VII.KPd", op(K_STAR, (x, d)), _int(1))
        cs_range = {v for v in ranges["CS"] if v is not None}
        cq_range = {v for v in ranges["CQ"] if v is not None}
        r_range = {v for v in ranges["R"] if v is not None and v[0] == "int"}
        f_range = {v for v in ranges["F"] if v is not None and v[0] == "intF"}
        if d_name not in letters:
            for v in cs_range:
                check("VII.KCSd", op(K_STAR, (v, d)), _int(1))
        if d_name not in states:
            for v in cq_range:
                check("VII.KCQd", op(K_STAR, (v, d)), _int(1))
        if d_name not in (ZERO, ONE):
            for v in r_range:
                check("VII.KRd", op(K_STAR, (v, d)), _int(1))
        if d_name not in (ZERO_F, ONE_F):
            for v in f_range:
                check("VII.KFd", op(K_STAR, (v, d)), _int(1))

    shape_ranges = {
        "P": set(squares),
        "CS": {v for v in ranges["CS"] if v is not None},
        "CQ": {v for v in ranges["CQ"] if v is not None},
        "R": {v for v in ranges["R"] if v is not None and v[0] == "int"},
        "F": {v for v in ranges["F"] if v is not None and v[0] == "intF"},
    }
    for tag, values in shape_ranges.items():
        for v in values:
            check(f"VII.Ktt[{tag}]", op(K_STAR, (v, v)), _int(0))
    for tag1, vs1 in shape_ranges.items():
        for tag2, vs2 in shape_ranges.items():
            if tag1 == tag2:
                continue
            for v1 in vs1:
                for v2 in vs2:
                    check(f"VII.Kst[{tag1},{tag2}]",
                          op(K_STAR, (v1, v2)), _int(1))

    # family VIII
    for x in all_elts:
        check("VIII.ECQ", op(E, (op(C_Q, (op(P, (x,)),)),)), _int(1))
    check("VIII.Eh", op(E, (_state(m.halt),)), _int(0))
    return report

"""Deterministic single-tape machines with total transition maps.

A machine's action is given by three total functions on (state, letter):
next state, motion (-1/+1), and the letter printed.  Totality defaults:

* at the halting state: stay in it, print the scanned letter, move right;
* any (state, letter) pair missing from a machine file: enter the halting
  state, print the scanned letter, move right.

The endmarker adjustment adds letters ``e_L``/``e_R`` and, per state q, two
states ``q_L``/``q_R`` that push a reached marker one square outward (leaving
a blank behind) and return.  While in a pushing state the machine prints the
marker and moves back toward the interior, so the motion out of ``q_R`` is
-1 and out of ``q_L`` is +1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

LEFT = -1
RIGHT = 1

E_LEFT = "e_L"
E_RIGHT = "e_R"


class MachineError(Exception):
    """Invalid machine description or tape literal."""


@dataclass(frozen=True)
class TuringMachine:
    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    blank: str
    start: str
    halt: str
    next_state: dict[tuple[str, str], str] = field(hash=False)
    motion: dict[tuple[str, str], int] = field(hash=False)
    printed: dict[tuple[str, str], str] = field(hash=False)

    def __post_init__(self) -> None:
        if self.halt not in self.states or self.start not in self.states:
            raise MachineError("start/halt state not declared")
        if self.blank not in self.alphabet:
            raise MachineError("blank letter not in alphabet")
        for (q, a) in self.next_state:
            if q not in self.states or a not in self.alphabet:
                raise MachineError(f"transition on undeclared pair ({q},{a})")

    def step_data(self, q: str, a: str) -> tuple[str, int, str]:
        key = (q, a)
        if key in self.next_state:
            return self.next_state[key], self.motion[key], self.printed[key]
        # totality convention: unspecified pairs fall into the halting state
        if q == self.halt:
            return self.halt, RIGHT, a
        return self.halt, RIGHT, a


@dataclass(frozen=True)
class AdjustedMachine:
    """Endmarker-adjusted machine; behaves like ``base`` on the interior."""

    base: TuringMachine
    states: tuple[str, ...]
    alphabet: tuple[str, ...]
    lr_states: frozenset[str]
    pushing_side: dict[str, int] = field(hash=False)   # q_R -> +1, q_L -> -1
    return_state: dict[str, str] = field(hash=False)

    @property
    def blank(self) -> str:
        return self.base.blank

    @property
    def start(self) -> str:
        return self.base.start

    @property
    def halt(self) -> str:
        return self.base.halt

    def base_states(self) -> tuple[str, ...]:
        return self.base.states

    def step_data(self, q: str, a: str) -> tuple[str, int, str]:
        """Total (next state, motion, printed letter)."""
        if q in self.lr_states:
            # pushing state: print the marker, move back, resume.  The
            # scanned letter is irrelevant (unreachable pairs included).
            side = self.pushing_side[q]
            marker = E_RIGHT if side == RIGHT else E_LEFT
            return self.return_state[q], -side, marker
        if a == E_RIGHT:
            return q + "_R", RIGHT, self.blank
        if a == E_LEFT:
            return q + "_L", LEFT, self.blank
        return self.base.step_data(q, a)


def adjust(m: TuringMachine) -> AdjustedMachine:
    """Add endmarkers and the per-state pushing states."""
    if E_LEFT in m.alphabet or E_RIGHT in m.alphabet:
        raise MachineError("alphabet already contains an endmarker letter")
    pushing_side: dict[str, int] = {}
    return_state: dict[str, str] = {}
    new_states: list[str] = list(m.states)
    for q in m.states:
        for suffix, side in ((f"{q}_L", LEFT), (f"{q}_R", RIGHT)):
            if suffix in m.states:
                raise MachineError(f"state name {suffix!r} already taken")
            new_states.append(suffix)
            pushing_side[suffix] = side
            return_state[suffix] = q
    return AdjustedMachine(
        base=m,
        states=tuple(new_states),
        alphabet=m.alphabet + (E_LEFT, E_RIGHT),
        lr_states=frozenset(pushing_side),
        pushing_side=pushing_side,
        return_state=return_state,
    )


@dataclass(frozen=True)
class TapeConfiguration:
    cells: tuple[tuple[int, str], ...]   # finite support over the blank
    head: int
    state: str
    time: int = 0

    def letter(self, n: int, blank: str) -> str:
        for pos, a in self.cells:
            if pos == n:
                return a
        return blank

    def as_dict(self) -> dict[int, str]:
        return dict(self.cells)


def make_tape(cells: dict[int, str], head: int, state: str, blank: str) -> TapeConfiguration:
    support = tuple(sorted((n, a) for n, a in cells.items() if a != blank))
    return TapeConfiguration(support, head, state, 0)


def step(m: AdjustedMachine, c: TapeConfiguration) -> TapeConfiguration:
    scanned = c.letter(c.head, m.blank)
    q, move, out = m.step_data(c.state, scanned)
    cells = c.as_dict()
    if out == m.blank:
        cells.pop(c.head, None)
    else:
        cells[c.head] = out
    support = tuple(sorted(cells.items()))
    return TapeConfiguration(support, c.head + move, q, c.time + 1)


@dataclass(frozen=True)
class SpaceTimeTrace:
    rows: tuple[TapeConfiguration, ...]
    halted_at: Optional[int]

    def __len__(self) -> int:
        return len(self.rows)


def run(m: AdjustedMachine, c0: TapeConfiguration, max_steps: int) -> SpaceTimeTrace:
    rows = [c0]
    c = c0
    halted = c0.time if c0.state == m.halt else None
    while halted is None and c.time - c0.time < max_steps:
        c = step(m, c)
        rows.append(c)
        if c.state == m.halt:
            halted = c.time
    return SpaceTimeTrace(tuple(rows), halted)


def trace_query(tr: SpaceTimeTrace, t: int, n: int, blank: str) -> tuple[str, bool, str]:
    """(letter at square n, head-at-n?, state) at time t."""
    if t < 0 or t >= len(tr.rows):
        raise MachineError(f"time {t} outside the trace")
    row = tr.rows[t]
    return row.letter(n, blank), row.head == n, row.state


# ----------------------------------------------------------------------------
# machine files and tape literals
# ----------------------------------------------------------------------------

def parse_machine(text: str) -> TuringMachine:
    states: list[str] = []
    alphabet: list[str] = []
    halt: Optional[str] = None
    start: Optional[str] = None
    next_state: dict[tuple[str, str], str] = {}
    motion: dict[tuple[str, str], int] = {}
    printed: dict[tuple[str, str], str] = {}

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "states":
            states.extend(parts[1:])
        elif kind == "alphabet":
            alphabet.extend(parts[1:])
        elif kind == "halt":
            halt = parts[1]
        elif kind == "start":
            start = parts[1]
        elif kind == "delta":
            if len(parts) != 7 or parts[3] != "->":
                raise MachineError(
                    f"line {lineno}: expected 'delta q a -> q2 b +1|-1'"
                )
            q, a, q2, b, mv = parts[1], parts[2], parts[4], parts[5], parts[6]
            if mv not in ("+1", "-1", "1"):
                raise MachineError(f"line {lineno}: motion must be +1 or -1")
            next_state[(q, a)] = q2
            motion[(q, a)] = RIGHT if mv in ("+1", "1") else LEFT
            printed[(q, a)] = b
        else:
            raise MachineError(f"line {lineno}: unknown directive {kind!r}")

    if halt is None or start is None:
        raise MachineError("machine needs 'halt' and 'start' lines")
    if not alphabet:
        raise MachineError("machine needs an alphabet")
    blank = alphabet[0] if "B" not in alphabet else "B"
    try:
        return TuringMachine(
            tuple(states), tuple(alphabet), blank, start, halt,
            next_state, motion, printed,
        )
    except MachineError:
        raise
    except Exception as exc:  # defensive: surface as a machine error
        raise MachineError(str(exc))


def format_machine(m: TuringMachine) -> str:
    lines = [
        "states " + " ".join(m.states),
        "alphabet " + " ".join(m.alphabet),
        f"start {m.start}",
        f"halt {m.halt}",
    ]
    for (q, a), q2 in sorted(m.next_state.items()):
        mv = "+1" if m.motion[(q, a)] == RIGHT else "-1"
        lines.append(f"delta {q} {a} -> {q2} {m.printed[(q, a)]} {mv}")
    return "\n".join(lines) + "\n"


def parse_tape(text: str, m: AdjustedMachine) -> TapeConfiguration:
    """``e_L a0 a1 ... ak e_R @i`` with the head at interior index i."""
    tokens = text.split()
    head = 0
    if tokens and tokens[-1].startswith("@"):
        head = int(tokens[-1][1:])
        tokens = tokens[:-1]
    if len(tokens) < 3 or tokens[0] != E_LEFT or tokens[-1] != E_RIGHT:
        raise MachineError("tape literal must be 'e_L a0 ... ak e_R [@i]'")
    letters = tokens[1:-1]
    for a in letters:
        if a not in m.alphabet:
            raise MachineError(f"letter {a!r} not in the machine alphabet")
    cells = {-1: E_LEFT, len(letters): E_RIGHT}
    for i, a in enumerate(letters):
        cells[i] = a
    if not (0 <= head < len(letters)):
        raise MachineError("head index outside the inscription")
    return make_tape(cells, head, m.start, m.blank)


def render_trace(tr: SpaceTimeTrace, m: AdjustedMachine, window: int = 30) -> str:
    lo = min(min((pos for pos, _ in row.cells), default=0) for row in tr.rows)
    hi = max(max((pos for pos, _ in row.cells), default=0) for row in tr.rows)
    lo, hi = max(lo, -window), min(hi, window)
    lines = []
    for row in tr.rows:
        cells = "".join(
            ("[" + row.letter(n, m.blank) + "]")
            if n == row.head else (" " + row.letter(n, m.blank) + " ")
            for n in range(lo, hi + 1)
        )
        lines.append(f"t={row.time:<4d} {cells} {row.state}")
    if tr.halted_at is not None:
        lines.append(f"HALTED@{tr.halted_at}")
    return "\n".join(lines)

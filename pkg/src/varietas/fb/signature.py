"""Operation symbols of the finitely based variety, instantiated per machine.

Constants are ``c``, every state and letter of the adjusted machine, and the
four comparison values ``0``, ``1``, ``0F``, ``1F``.  The unary space-time
moves are ``T`` (time), ``S``/``S_inv`` (space), ``H`` (to the head), ``P``
(space-time projection); ``C_S``/``C_Q`` read a square's letter and the
machine state, ``U`` is the capped increment, ``E`` the halting detector.
``F``/``R`` compare times and positions, ``K``/``Kstar``/``Cstar`` are the
comparison/transfer operations, and ``N_H``/``N_Q``/``N_S`` step the head,
state, and scanned letter to the next instant.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..terms import OperationSymbol, Signature, Term, TermError
from ..turing import AdjustedMachine

C = "c"
T, S, S_INV, H, P = "T", "S", "S_inv", "H", "P"
C_S, C_Q, U, E = "C_S", "C_Q", "U", "E"
F, R, K, K_STAR, C_STAR = "F", "R", "K", "Kstar", "Cstar"
N_H, N_Q, N_S = "N_H", "N_Q", "N_S"

ZERO, ONE, ZERO_F, ONE_F = "0", "1", "0F", "1F"

UNARY = (T, S, S_INV, H, P, C_S, C_Q, U, E)
BINARY = (F, R, K, K_STAR, C_STAR)
TERNARY = (N_H, N_Q, N_S)

#: operations whose images are space-time terms; P composed with anything
#: else is constant at P(c)
SPACE_TIME_OPS = frozenset({P, S, S_INV, T, H, N_H, K})


@dataclass(frozen=True)
class FBSignature:
    machine: AdjustedMachine = field(compare=False)
    signature: Signature = field(compare=False)

    @property
    def states(self) -> tuple[str, ...]:
        return self.machine.states

    @property
    def letters(self) -> tuple[str, ...]:
        return self.machine.alphabet

    def constants(self) -> list[str]:
        return [C, ZERO, ONE, ZERO_F, ONE_F, *self.states, *self.letters]


def build_signature(machine: AdjustedMachine) -> FBSignature:
    reserved = set(UNARY) | set(BINARY) | set(TERNARY) | {C, ZERO, ONE, ZERO_F, ONE_F}
    clash = reserved & (set(machine.states) | set(machine.alphabet))
    if clash:
        raise TermError(f"machine names collide with operation symbols: {sorted(clash)}")
    symbols = [OperationSymbol(name, 0) for name in (C, ZERO, ONE, ZERO_F, ONE_F)]
    symbols += [OperationSymbol(q, 0) for q in machine.states]
    symbols += [OperationSymbol(a, 0) for a in machine.alphabet]
    symbols += [OperationSymbol(name, 1) for name in UNARY]
    symbols += [OperationSymbol(name, 2) for name in BINARY]
    symbols += [OperationSymbol(name, 3) for name in TERNARY]
    sig = Signature(symbols, inverses={S: S_INV})
    return FBSignature(machine, sig)


def is_space_time_headed(t: Term) -> bool:
    return bool(t.args) and t.head in SPACE_TIME_OPS


def space_power(n: int, t: Term) -> Term:
    """S^n for n of either sign."""
    sym = S if n >= 0 else S_INV
    for _ in range(abs(n)):
        t = Term(sym, (t,))
    return t


def time_power(m: int, t: Term) -> Term:
    for _ in range(m):
        t = Term(T, (t,))
    return t

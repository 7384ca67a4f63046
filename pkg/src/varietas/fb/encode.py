"""Tape configurations as presentations, and the forward derivation.

A tape inscription ``e_L a0 .. ak e_R`` with the head on a0 becomes the
ground relations::

    C_Q(c) = q0,  C_S(S^-1(c)) = e_L,  C_S(S^i(c)) = a_i,  C_S(S^k+1(c)) = e_R

The relations do not constrain which square the head occupies at time 0;
the encoding reads the origin square c as the scanned one, and the forward
derivation records that anchor as an explicit assumption row.  Everything
else is pushed forward through the step laws: the state is a function of
time alone, the head moves by the machine's motion map, the scanned square
receives the printed letter, and off-head squares carry their letter to the
next instant through the comparison transfer.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from ..terms import Equation, Presentation, Term, format_term
from ..turing import AdjustedMachine, E_LEFT, E_RIGHT, TapeConfiguration, MachineError
from .signature import (
    C, C_Q, C_S, E, FBSignature, H, ONE, T, ZERO, build_signature,
    space_power, time_power,
)


def _c_term() -> Term:
    return Term(C)


def _sq(n: int, t: int) -> Term:
    """The square n steps from the origin at time t."""
    return space_power(n, time_power(t, _c_term()))


def _head(t: int) -> Term:
    return Term(H, (time_power(t, _c_term()),))


def presentation_from_tape(
    m: AdjustedMachine, tape: TapeConfiguration, fbsig: Optional[FBSignature] = None
) -> Presentation:
    """The ground presentation describing an initial inscription."""
    if fbsig is None:
        fbsig = build_signature(m)
    cells = tape.as_dict()
    if tape.head != 0:
        raise MachineError("encoded tapes start with the head at square 0")
    positions = sorted(cells)
    if not positions or cells[positions[0]] != E_LEFT or cells[positions[-1]] != E_RIGHT:
        raise MachineError("encoded tapes need endmarkers at the support boundary")
    if positions[0] != -1:
        raise MachineError("the left endmarker must sit at square -1")
    k = positions[-1] - 1
    relations = [Equation(Term(C_Q, (_c_term(),)), Term(tape.state))]
    for n in range(-1, k + 2):
        letter = cells.get(n, m.blank)
        relations.append(Equation(Term(C_S, (_sq(n, 0),)), Term(letter)))
    pres = Presentation((), tuple(relations), fbsig.signature)
    pres.validate()
    return pres


def tape_from_presentation(p: Presentation, m: AdjustedMachine) -> TapeConfiguration:
    """Inverse of :func:`presentation_from_tape` (round-trip check)."""
    from ..turing import make_tape
    from .normal import normalize_space_time

    state: Optional[str] = None
    cells: dict[int, str] = {}
    for eq in p.relations:
        if eq.lhs.head == C_Q:
            state = eq.rhs.head
        elif eq.lhs.head == C_S:
            nf = normalize_space_time(eq.lhs.args[0]) if eq.lhs.args[0].args else None
            n = nf.space if nf is not None else 0
            cells[n] = eq.rhs.head
        else:
            raise MachineError("not a tape presentation")
    if state is None:
        raise MachineError("missing initial state relation")
    return make_tape(cells, 0, state, m.blank)


@dataclass(frozen=True)
class Fact:
    time: int
    kind: str            # "state" | "head" | "cell" | "anchor"
    lhs: Term
    rhs: Term
    cell: Optional[int] = None
    cites: tuple[str, ...] = ()

    def __repr__(self) -> str:
        return f"[t={self.time} {self.kind}] {format_term(self.lhs)} ~ {format_term(self.rhs)}"


@dataclass(frozen=True)
class DegeneracyCertificate:
    """A chain of equalities ending in 0 ~ 1, each step citing its law or
    relation."""
    chain: tuple[Term, ...]
    citations: tuple[str, ...]
    halt_time: int

    def lines(self) -> list[str]:
        out = []
        for i in range(len(self.chain) - 1):
            out.append(
                f"{format_term(self.chain[i])} ~ {format_term(self.chain[i + 1])}"
                f"    [{self.citations[i]}]"
            )
        return out


@dataclass
class DerivationTable:
    states: dict[int, str] = field(default_factory=dict)
    heads: dict[int, int] = field(default_factory=dict)
    letters: dict[int, dict[int, str]] = field(default_factory=dict)
    facts: list[Fact] = field(default_factory=list)
    certificate: Optional[DegeneracyCertificate] = None

    def state_fact(self, t: int) -> tuple[str, int]:
        return self.states[t], self.heads[t]


class DerivationError(Exception):
    pass


def forward_derive(
    p: Presentation, m: AdjustedMachine, horizon: int,
    fbsig: Optional[FBSignature] = None,
) -> DerivationTable:
    """Push the presentation's facts through the laws for ``horizon`` steps.

    Facts derived per time t: the state (position-independent), the head
    square relative to the origin, and each known square's letter.  Stops at
    the halting state and emits the 0 ~ 1 certificate chain.
    """
    if fbsig is None:
        fbsig = build_signature(m)
    tape = tape_from_presentation(p, m)
    table = DerivationTable()

    q0 = tape.state
    letters0 = tape.as_dict()
    table.states[0] = q0
    table.heads[0] = 0
    table.letters[0] = dict(letters0)
    table.facts.append(Fact(0, "anchor", _head(0), _sq(0, 0),
                            cites=("encoding: initial head square is c",)))
    table.facts.append(Fact(0, "state", Term(C_Q, (_head(0),)), Term(q0),
                            cites=("relation C_Q(c)", "IV.CQH")))
    for n, a in sorted(letters0.items()):
        table.facts.append(Fact(0, "cell", Term(C_S, (_sq(n, 0),)), Term(a),
                                cites=(f"relation C_S(S^{n}(c))",)))

    for t in range(horizon):
        q = table.states[t]
        if q == m.halt:
            break
        head = table.heads[t]
        known = table.letters[t]
        if q in m.lr_states:
            # the pushing step never consults the scanned letter; the
            # endmarker laws fire with a symbolic second argument
            nq, mu, printed = m.step_data(q, m.blank)
            cites_q = (f"II.NQ{'R' if q.endswith('_R') else 'L'}[{nq}]", "III.CQ")
            cites_h = (f"II.NH{'R' if q.endswith('_R') else 'L'}[{nq}]", "III.HT")
            cites_a = (f"II.NS{'R' if q.endswith('_R') else 'L'}[{nq}]", "III.CS")
        else:
            scanned = known.get(head)
            if scanned is None:
                raise DerivationError(
                    f"t={t}: the scanned square {head} has no derived letter"
                )
            nq, mu, printed = m.step_data(q, scanned)
            cites_q = (f"II.NQ[{q},{scanned}]", "III.CQ")
            cites_h = (f"II.NH[{q},{scanned}]", "III.HT")
            cites_a = (f"II.NS[{q},{scanned}]", "III.CS")

        nt = t + 1
        table.states[nt] = nq
        table.heads[nt] = head + mu
        nxt = dict(known)
        nxt[head] = printed
        table.letters[nt] = nxt

        table.facts.append(Fact(nt, "state", Term(C_Q, (_head(nt),)), Term(nq),
                                cites=cites_q))
        table.facts.append(Fact(nt, "head", _head(nt), _sq(head + mu, nt),
                                cites=cites_h))
        table.facts.append(Fact(nt, "cell", Term(C_S, (_sq(head, nt),)),
                                Term(printed), cell=head, cites=cites_a))
        for n, a in nxt.items():
            if n != head:
                table.facts.append(Fact(nt, "cell", Term(C_S, (_sq(n, nt),)),
                                        Term(a), cell=n,
                                        cites=("IV.CSTR1/2", "IV.CS1", "V.RS")))
        if nq == m.halt:
            table.certificate = _halting_certificate(table, nt, m, q0)
            break
    return table


def _halting_certificate(
    table: DerivationTable, halt_time: int, m: AdjustedMachine, q0: str
) -> DegeneracyCertificate:
    lam = _head(halt_time)
    chain = (
        Term(ZERO),
        Term(E, (Term(m.halt),)),
        Term(E, (Term(C_Q, (lam,)),)),
        Term(ONE),
        Term(E, (Term(q0),)),
    )
    citations = (
        "VIII.Eh",
        f"derived C_Q(HT^{halt_time}(c)) ~ {m.halt}",
        "VIII.ECQ with IV.CQP",
        "VIII.ECQ via relation C_Q(c) ~ " + q0,
    )
    return DegeneracyCertificate(chain, citations, halt_time)

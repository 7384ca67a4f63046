"""Reduction of a degenerate-space-time presentation to a constants-only type.

When all space-time collapses to a point, the space-time moves and the two
comparison operations become constant, so the type shrinks: P, T, S, S_inv,
H, N_H, R, F, C_Q, C_S are deleted and three fresh constants c1, c2, c3
stand for the collapsed square, its state read, and its letter read.  The
machine-step and comparison laws survive with those constants substituted,
every term of the big type translates effectively, and the resulting
finitely presented constants-only problem is decided by the uniform solver.
"""

from __future__ import annotations

from itertools import product
from typing import Optional

from ..terms import (
    Equation, OperationSymbol, Presentation, Signature, Term,
)
from ..turing import AdjustedMachine
from .signature import (
    C, C_Q, C_S, C_STAR, E, F, FBSignature, H, K, K_STAR, N_H, N_Q, N_S,
    ONE, ONE_F, P, R, S, S_INV, T, U, ZERO, ZERO_F,
)

C1, C2, C3 = "c1", "c2", "c3"

#: operations that become constant under degeneracy, with their images
_COLLAPSED = {
    P: C1, T: C1, S: C1, S_INV: C1, H: C1, N_H: C1,
    R: ZERO, F: ZERO_F, C_Q: C2, C_S: C3,
}

KEPT_UNARY = (U, E)
KEPT_BINARY = (K, K_STAR, C_STAR)
KEPT_TERNARY = (N_Q, N_S)


def reduced_signature(fbsig: FBSignature) -> Signature:
    symbols = [OperationSymbol(name, 0)
               for name in (*fbsig.constants(), C1, C2, C3)]
    symbols += [OperationSymbol(name, 1) for name in KEPT_UNARY]
    symbols += [OperationSymbol(name, 2) for name in KEPT_BINARY]
    symbols += [OperationSymbol(name, 3) for name in KEPT_TERNARY]
    return Signature(symbols)


def translate_term(t: Term) -> Term:
    """Rewrite a term of the machine variety into the reduced type."""
    if t.head in _COLLAPSED:
        return Term(_COLLAPSED[t.head])
    if not t.args:
        return t
    return Term(t.head, tuple(translate_term(a) for a in t.args))


def _reduced_laws(m: AdjustedMachine, fbsig: FBSignature) -> list[Equation]:
    """The constants-only laws of the reduced variety."""
    c1, c2, c3 = Term(C1), Term(C2), Term(C3)
    zero, one = Term(ZERO), Term(ONE)
    zero_f, one_f = Term(ZERO_F), Term(ONE_F)
    eqs: list[Equation] = [
        Equation(zero, one),
        Equation(zero_f, one_f),
    ]
    # machine-step laws with the collapsed square and reads substituted
    for q, a in product(m.states, m.alphabet):
        nq, _, na = m.step_data(q, a)
        eqs.append(Equation(Term(N_Q, (Term(q), Term(a), c1)), Term(nq)))
        eqs.append(Equation(Term(N_S, (Term(q), Term(a), c1)), Term(na)))
    for q in m.states:
        if q in m.lr_states:
            continue
        for tag, marker in (("_L", "e_L"), ("_R", "e_R")):
            eqs.append(Equation(Term(N_Q, (Term(q + tag), c3, c1)), Term(q)))
            eqs.append(Equation(Term(N_S, (Term(q + tag), c3, c1)), Term(marker)))
    eqs.append(Equation(c3, Term(C_STAR, (c1, one))))
    for d, v in ((zero, one), (one, one), (zero_f, one_f), (one_f, one_f)):
        eqs.append(Equation(Term(U, (d,)), v))
    # comparison laws with c1/c2/c3/0 substituted for the deleted ranges
    eqs.append(Equation(Term(K, (zero, c1)), c1))
    eqs.append(Equation(Term(K, (one, c1)), c1))
    eqs.append(Equation(Term(K, (zero_f, c1)), c1))
    eqs.append(Equation(Term(K, (one_f, c1)), c1))
    consts = fbsig.constants()
    letters = set(fbsig.letters)
    states = set(fbsig.states)
    for d in consts:
        eqs.append(Equation(Term(K_STAR, (Term(d), Term(d))), zero))
        for e in consts:
            if d != e:
                eqs.append(Equation(Term(K_STAR, (Term(d), Term(e))), one))
        if d != C:
            eqs.append(Equation(Term(K_STAR, (c1, Term(d))), one))
        if d not in letters:
            eqs.append(Equation(Term(K_STAR, (c3, Term(d))), one))
        if d not in states:
            eqs.append(Equation(Term(K_STAR, (c2, Term(d))), one))
        if d not in (ZERO, ONE):
            eqs.append(Equation(Term(K_STAR, (zero, Term(d))), one))
        if d not in (ZERO_F, ONE_F):
            eqs.append(Equation(Term(K_STAR, (zero, Term(d))), one))
    shapes = {"P": c1, "CS": c3, "CQ": c2, "R": zero, "F": zero}
    for tag, s in shapes.items():
        eqs.append(Equation(Term(K_STAR, (s, s)), zero))
    for t1, t2 in product(shapes, shapes):
        if t1 != t2:
            eqs.append(Equation(Term(K_STAR, (shapes[t1], shapes[t2])), one))
    eqs.append(Equation(Term(E, (c2,)), one))
    eqs.append(Equation(Term(E, (Term(m.halt),)), zero))
    return eqs


def reduce_degenerate(p: Presentation, fbsig: FBSignature) -> Presentation:
    """Presentation over the reduced type, equivalent to ``p`` whenever the
    space-time of ``p`` is degenerate (caller asserts degeneracy)."""
    sig = reduced_signature(fbsig)
    relations = [Equation(translate_term(eq.lhs), translate_term(eq.rhs))
                 for eq in p.relations]
    relations += _reduced_laws(fbsig.machine, fbsig)
    reduced = Presentation(p.generators, tuple(relations), sig)
    reduced.validate()
    return reduced


def solve_degenerate(
    p: Presentation, fbsig: FBSignature, lhs: Term, rhs: Term
) -> bool:
    from ..terms import evans_solve

    reduced = reduce_degenerate(p, fbsig)
    return evans_solve(reduced, translate_term(lhs), translate_term(rhs))

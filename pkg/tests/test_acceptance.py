"""Acceptance criteria, one test per criterion, one verdict line each.

Run with ``pytest tests/test_acceptance.py -s`` to see the lines.
"""

import random
import time
from itertools import product

import pytest

from varietas.config import Limits
from varietas.congruence import CongruenceDecider, finite_partial_subalgebra
from varietas.constsolve import (
    build_a0_const, decide_const, derive_base_table_c,
)
from varietas.constv import LambdaC, build_c_signature, enumerate_laws_c, lambda_of
from varietas.fb import build_countermodel_slice, build_signature, decide_fb
from varietas.fb.base import build_base, derive_base_table
from varietas.fb.encode import forward_derive, presentation_from_tape
from varietas.fb.normal import (
    SHAPE_H, SHAPE_NH, SHAPE_ST, SpaceTimeNormalForm, normalize_space_time,
)
from varietas.fb.signature import space_power, time_power
from varietas.fb.stages import A0Decider, StageTower, nf_deep
from varietas.infv import (
    build_finite_quotient, build_inf_signature, builtin_listing, decide_inf,
    enumerate_laws_inf, eval_witness, parse_inf_term, witness_gen,
)
from varietas.samples import sample_machine
from varietas.terms import (
    Equation, Presentation, Term, evans_solve, format_presentation,
    parse_presentation, parse_term,
)
from varietas.turing import make_tape, run

from oracles import (
    congruence_oracle, random_subterm_closed_carrier, random_term,
    rewrite_orbit, schema_rewrite_orbit,
)


def report(n, name, ok, detail):
    line = f"ACCEPTANCE {n} {name}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line)
    assert ok, line


def test_criterion_1_closure_oracle_equivalence():
    rng = random.Random(20260810)
    leaves = [Term("a"), Term("b"), Term("k")]
    ops = [("f", 1), ("g", 2)]
    t0 = time.time()
    instances = queries = 0
    for _ in range(1000):
        carrier = random_subterm_closed_carrier(rng, leaves, ops, 12)
        seeds = [(rng.choice(carrier), rng.choice(carrier))
                 for _ in range(rng.randint(0, 4))]
        decider = CongruenceDecider(finite_partial_subalgebra(carrier, seeds))
        instances += 1
        for _ in range(2):
            s = random_term(rng, leaves, ops, 5)
            t = random_term(rng, leaves, ops, 5)
            assert decider.decide(s, t) == congruence_oracle(carrier, seeds, s, t)
            queries += 1
    dt = time.time() - t0
    report(1, "closure-oracle equivalence",
           instances == 1000 and dt < 60,
           f"{instances} subalgebras, {queries} queries, {dt:.1f}s")


def test_criterion_2_evans_reproduction():
    from varietas.terms import OperationSymbol, Signature

    sig = Signature([
        OperationSymbol("f", 1), OperationSymbol("g", 2),
        OperationSymbol("a", 0), OperationSymbol("b", 0),
    ])
    rng = random.Random(31337)
    leaves = [Term("a"), Term("b")]
    ops = [("f", 1), ("g", 2)]
    agreements = 0
    for _ in range(200):
        gens = [f"x{i}" for i in range(rng.randint(1, 3))]
        gen_leaves = leaves + [Term(g) for g in gens]
        relations = [(random_term(rng, gen_leaves, ops, 2),
                      random_term(rng, gen_leaves, ops, 2))
                     for _ in range(rng.randint(1, 3))]
        p = Presentation(tuple(gens),
                         tuple(Equation(l, r) for l, r in relations), sig)
        start = random_term(rng, gen_leaves, ops, 3)
        orbit6 = rewrite_orbit(relations, start, 6, max_size=26, max_terms=9000)
        # a positive reachable within the oracle bound
        target = rng.choice(sorted(rewrite_orbit(relations, start, 3,
                                                 max_size=22, max_terms=3000),
                                   key=str))
        assert evans_solve(p, start, target) == (target in orbit6) == True
        # a random pair, judged by the oracle
        other = random_term(rng, gen_leaves, ops, 3)
        assert evans_solve(p, start, other) == (other in orbit6)
        agreements += 2
    report(2, "uniform-solver reproduction", agreements == 400,
           f"200 presentations, {agreements} query agreements")


def test_criterion_3_normal_form_tables():
    gx = Term("P", (Term("x"),))
    payload = (Term("s1"), Term("s2"))
    checked = 0
    for n in range(-5, 6):
        for m in range(6):
            for k in range(6):
                plain = space_power(n, time_power(m, gx))
                h_src = space_power(n, time_power(m, Term("H", (time_power(k, gx),))))
                nh_src = space_power(
                    n, time_power(m, Term("N_H", (*payload, time_power(k, gx)))))
                rows = [
                    # head move: everything lands on the head form at the
                    # source's time
                    (Term("H", (plain,)), Term("H", (time_power(m, gx),))),
                    (Term("H", (h_src,)), Term("H", (time_power(m + k, gx),))),
                    (Term("H", (nh_src,)),
                     Term("H", (time_power(m + k + 1, gx),))),
                    # time step: the middle power grows
                    (Term("T", (plain,)), space_power(n, time_power(m + 1, gx))),
                    (Term("T", (h_src,)),
                     space_power(n, time_power(m + 1, Term("H", (time_power(k, gx),))))),
                    (Term("T", (nh_src,)),
                     space_power(n, time_power(
                         m + 1, Term("N_H", (*payload, time_power(k, gx)))))),
                    # head-step placement: anchored at the source's time
                    (Term("N_H", (*payload, plain)),
                     Term("N_H", (*payload, time_power(m, gx)))),
                    (Term("N_H", (*payload, h_src)),
                     Term("N_H", (*payload, time_power(m + k, gx)))),
                    (Term("N_H", (*payload, nh_src)),
                     Term("N_H", (*payload, time_power(m + k + 1, gx)))),
                ]
                for src, expected in rows:
                    got = normalize_space_time(src, ("x", "s1", "s2")).term()
                    assert got == expected, (src, got, expected)
                    checked += 1
    report(3, "normal-form table reproduction", checked == 11 * 6 * 6 * 9,
           f"{checked} exact rows")


def test_criterion_4_encoding_fidelity():
    total = 0
    for name in ("halting", "looping", "marcher"):
        m, tape = sample_machine(name)
        fbsig = build_signature(m)
        p = presentation_from_tape(m, tape, fbsig)
        table = forward_derive(p, m, 100, fbsig)
        tr = run(m, tape, 100)
        for t in sorted(table.states):
            row = tr.rows[t]
            assert table.states[t] == row.state, (name, t)
            assert table.heads[t] == row.head, (name, t)
            for n, letter in table.letters[t].items():
                assert row.letter(n, m.blank) == letter, (name, t, n)
            for n, a in row.cells:
                assert table.letters[t].get(n) == a, (name, t, n)
            total += 1
    report(4, "encoding fidelity", total >= 3 + 101 + 101,
           f"{total} derived configurations match the runs exactly")


def test_criterion_5_halting_certificate_and_separation():
    lim = Limits(time_window=12, space_window=8, stage_bound=4, bt_horizon=6)
    m, tape = sample_machine("halting")
    fbsig = build_signature(m)
    p = presentation_from_tape(m, tape, fbsig)
    runs = [decide_fb(p, m, Term("0"), Term("1"), limits=lim)
            for _ in range(2)]
    ok_halt = all(o.verdict == "equal" and o.case == "degenerate"
                  and o.certificate is not None
                  and o.certificate.lines()[-1].startswith("1 ~ E(q0)")
                  for o in runs)

    m2, tape2 = sample_machine("looping")
    fbsig2 = build_signature(m2)
    p2 = presentation_from_tape(m2, tape2, fbsig2)
    runs2 = [decide_fb(p2, m2, Term("0"), Term("1"), limits=lim)
             for _ in range(2)]
    ok_loop = all(o.verdict == "unequal" and o.table_mode == "derived"
                  for o in runs2)
    report(5, "halting certificate and separation", ok_halt and ok_loop,
           "halting: EQUAL with chain ending '1 ~ E(q0)'; "
           "looping: UNEQUAL at stage bound 4, derived table; repeated runs agree")


def test_criterion_6_countermodel_law_check():
    m, tape = sample_machine("looping")
    t0 = time.time()
    slc, rep = build_countermodel_slice(m, tape, 20, 20)
    dt = time.time() - t0
    p = presentation_from_tape(m, tape, build_signature(m))
    ok = rep.ok and slc.separates_zero_one() and dt < 120 \
        and not slc.check_presentation(p)
    report(6, "countermodel law check", ok,
           f"{rep.checked} instances, {len(rep.violations)} violations, "
           f"0 != 1 separated, {dt:.1f}s")


def _const_setup(name):
    m, tape = sample_machine(name)
    csig = build_c_signature(m)
    pres = parse_presentation(
        format_presentation(presentation_from_tape(m, tape, None)),
        csig.signature)
    return m, csig, pres


def test_criterion_7_const_solver():
    lim = Limits(time_window=8, space_window=5, bt_horizon=6)
    rng = random.Random(607)
    queries = 0
    for name, tape_text in (("looping", None), ("marcher", None),
                            ("looping", "alt")):
        m, tape = sample_machine(name)
        if tape_text == "alt":
            tape = make_tape({-1: "e_L", 0: "b", 1: "a", 2: "e_R"},
                             0, m.start, m.blank)
        csig = build_c_signature(m)
        pres = parse_presentation(
            format_presentation(presentation_from_tape(m, tape, None)),
            csig.signature)
        sig = csig.signature
        laws = [(i.lhs, i.rhs) for i in enumerate_laws_c(csig, 2500)]
        eqs = laws + [(eq.lhs, eq.rhs) for eq in pres.relations]
        start_texts = ["C_S(c)", "E(C_Q(T(c)))", "K(0,S(c))",
                       "R(T(c),S(T(c)))", "H(T^2(c))", "F(c,c)",
                       "N_Q(q0,a,H(c))"]
        consts = csig.constants()
        per = 0
        while per < 67 and queries < 200:
            start = parse_term(rng.choice(start_texts), sig)
            orbit = sorted(rewrite_orbit(eqs, start, 4, max_size=22,
                                         max_terms=2500), key=str)
            target = rng.choice(orbit)
            out = decide_const(pres, m, start, target, limits=lim)
            assert out.verdict == "equal", (name, start, target)
            per += 1
            queries += 1
            d, e = rng.sample(consts, 2)
            out2 = decide_const(pres, m, Term(d), Term(e), limits=lim)
            oracle_pos = Term(e) in rewrite_orbit(eqs, Term(d), 5,
                                                  max_size=20, max_terms=2500)
            assert out2.verdict == ("equal" if oracle_pos else "unequal"), (d, e)
            per += 1
            queries += 1

    # realizability against brute force over a materialized window
    m, csig, pres = _const_setup("looping")
    oracle_bt = derive_base_table_c(pres, m, csig, horizon=6)
    a0 = build_a0_const(pres, csig, oracle_bt, "derived", lim)
    window = [Term(d) for d in csig.constants()]
    window += [LambdaC(n, mm, k).term()
               for n in range(-2, 3) for mm in range(3) for k in range(2)]
    lams = [t for t in window if lambda_of(t) is not None]
    window += [Term("C_S", (t,)) for t in lams[:6]]
    window += [Term("C_Q", (t,)) for t in lams[:6]]
    window += [Term("R", (lams[0], lams[1])), Term("F", (lams[0], lams[2])),
               Term("E", (Term(m.halt),)), Term("K", (Term("0"), lams[0]))]
    window = [t for t in window if a0.member(t)]
    arities = {"T": 1, "S": 1, "S_inv": 1, "H": 1, "C_S": 1, "C_Q": 1,
               "E": 1, "R": 2, "F": 2, "K": 2, "N_Q": 3, "N_S": 3, "N_H": 3}

    def brute(op, args):
        for combo in product(window, repeat=arities[op]):
            if all(a0.eq(b, a) for b, a in zip(combo, args)) and \
                    a0.carrier.member(Term(op, combo)):
                return True
        return False

    checks = 0
    for op in ("T", "S", "H", "C_S", "C_Q", "E", "R", "F", "K"):
        for _ in range(4):
            args = tuple(rng.choice(window) for _ in range(arities[op]))
            if brute(op, args):
                assert a0.realize(op, args) is not None, (op, args)
            checks += 1
    report(7, "constants-only solver", queries >= 200 and checks == 36,
           f"{queries} oracle-agreed queries, {checks} realizability checks")


def test_criterion_8_infinite_signature_solver():
    t0 = time.time()
    xl = builtin_listing("primes")
    sig = build_inf_signature()
    gens20 = tuple(f"b{i}" for i in range(1, 21))
    free20 = Presentation(gens20, (), sig)
    hits = 0
    for k in range(1, 21):
        prod_text = " ".join(gens20[:k])
        query = parse_inf_term(f"h{k}({prod_text})", gens20)
        got = decide_inf(free20, query, Term("0"), xl)
        want = xl.contains(k)
        assert got == want, k
        env = {g: witness_gen(g) for g in gens20}
        wit = eval_witness(query, env, xl)
        assert (wit == ("zero",)) == want, k
        hits += 1

    gens = tuple(f"b{i}" for i in range(1, 6))
    free = Presentation(gens, (), sig)
    schemas = enumerate_laws_inf(xl, 120)
    rng = random.Random(88)
    start_texts = ["h2(b1 b2)", "b1 (b2 b3)", "h4(h4(b1))", "b1 b1",
                   "h3(b2) b1", "h5(b1 b2 b3 b4 b5)", "h7(b1 b2)",
                   "b3 h2(b1)"]
    queries = 0
    while queries < 500:
        start = parse_inf_term(rng.choice(start_texts), gens)
        orbit = sorted(schema_rewrite_orbit(schemas, start, 6, max_size=18,
                                            max_terms=2000), key=str)
        target = rng.choice(orbit)
        assert decide_inf(free, start, target, xl), (start, target)
        queries += 1
        u, v = rng.sample(gens, 2)
        assert not decide_inf(free, Term(u), Term(v), xl)
        queries += 1
    dt = time.time() - t0
    report(8, "infinite-signature solver", hits == 20 and queries >= 500 and dt < 30,
           f"20 collapse indices, {queries} oracle-agreed queries, {dt:.1f}s")


def test_criterion_9_stage_invariants():
    lim = Limits(time_window=10, space_window=6, bt_horizon=6)
    sample_texts = [
        "0", "1", "q0", "a", "h", "c", "P(c)", "T(P(c))", "S(P(c))",
        "H(T(P(c)))", "C_S(P(c))", "C_Q(T(P(c)))",
        "R(P(c),S(P(c)))", "F(P(c),T(P(c)))",
        "E(h)", "E(C_Q(P(c)))", "E(E(h))",
        "U(E(h))", "Kstar(E(h),E(h))",
        "N_H(E(h),C_S(c),H(c))", "N_H(q0,a,H(T(P(c))))",
        "K(E(h),T(c))", "K(0,P(c))", "R(T(c),E(h))", "C_S(T^3(P(c)))",
        "U(0)", "U(R(P(c),P(c)))", "Cstar(P(c),1)",
    ]
    tuples = violations = 0
    for name in ("looping", "marcher"):
        m, tape = sample_machine(name)
        fbsig = build_signature(m)
        p = presentation_from_tape(m, tape, fbsig)
        bs = build_base(p, fbsig, lim.time_window, lim.space_window)
        bd = derive_base_table(p, m, fbsig, bs, horizon=lim.bt_horizon)
        tower = StageTower(A0Decider(bd), 4)
        sample = [nf_deep(parse_term(t, fbsig.signature)) for t in sample_texts]
        for n in range(5):
            rep = tower.stage_report(n, sample)
            tuples += rep.checked
            violations += len(rep.violations)
            assert rep.ok, (name, n, rep.violations[:3])
    report(9, "stage invariants", tuples >= 500 and violations == 0,
           f"{tuples} sampled tuples across stages 0..4, {violations} violations")

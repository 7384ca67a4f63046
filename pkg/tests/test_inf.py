import random
from itertools import product

import pytest

from varietas.infv import (
    FiniteQuotient, S_ZERO, build_finite_quotient, build_inf_signature,
    builtin_listing, decide_inf, enumerate_laws_inf, eval_witness,
    format_inf_term, h_name, law_instance_inf, listing_from_values,
    parse_inf_term, witness_a, witness_gen,
)
from varietas.terms import Equation, Presentation, Term

from oracles import schema_rewrite_orbit

XL = builtin_listing("primes")
SIG = build_inf_signature()
GENS = tuple(f"b{i}" for i in range(1, 7))
FREE = Presentation(GENS, (), SIG)


def pt(text, gens=GENS):
    return parse_inf_term(text, gens)


class TestSyntax:
    def test_juxtaposition_and_star(self):
        assert pt("b1 b2") == pt("b1 * b2")

    def test_round_trip(self):
        t = pt("h3(b1 b2 (b3 b4))")
        assert parse_inf_term(format_inf_term(t), GENS) == t

    def test_zero(self):
        assert pt("0") == Term("0")


class TestListings:
    def test_primes(self):
        assert XL.listing(1) == 2 and XL.listing(2) == 3 and XL.listing(3) == 5
        assert XL.contains(7) and not XL.contains(9)

    def test_injective_file_listing(self):
        xl = listing_from_values([2, 9, 4])
        assert xl.contains(9) and not xl.contains(3)
        with pytest.raises(ValueError):
            listing_from_values([2, 2])


class TestLawRecognition:
    def test_fixed_schemas(self):
        v1, v2 = Term("v1"), Term("v2")
        assert law_instance_inf(
            Equation(Term("*", (v1, v2)), Term("*", (v2, v1)), ("v1", "v2")), XL)
        assert law_instance_inf(
            Equation(Term("h1", (Term("h2", (v1,)),)), Term("0"), ("v1",)), XL)
        assert law_instance_inf(
            Equation(Term("h4", (Term("h4", (v1,)),)),
                     Term("h4", (v1,)), ("v1",)), XL)
        assert not law_instance_inf(
            Equation(Term("h4", (v1,)), Term("0"), ("v1",)), XL)

    def test_indexed_collapse(self):
        # j = m_k: iteration count must match the listing position
        def collapse(j, k):
            prod = Term("v1")
            for i in range(1, j):
                prod = Term("*", (prod, Term(f"v{i+1}")))
            t = prod
            for _ in range(k):
                t = Term(h_name(j), (t,))
            return Equation(t, Term("0"), tuple(f"v{i+1}" for i in range(j)))

        assert law_instance_inf(collapse(2, 1), XL)      # m_1 = 2
        assert law_instance_inf(collapse(3, 2), XL)      # m_2 = 3
        assert not law_instance_inf(collapse(3, 3), XL)  # m_3 = 5
        assert not law_instance_inf(collapse(4, 1), XL)

    def test_enumerated_instances_recognized(self):
        for eq in enumerate_laws_inf(XL, 200):
            assert law_instance_inf(eq, XL), eq


class TestWitness:
    def env(self):
        return {g: witness_gen(g) for g in GENS}

    def test_square_zero(self):
        assert eval_witness(pt("b1 b1"), self.env(), XL) == S_ZERO

    def test_outside_listing_survives(self):
        out = eval_witness(pt("h4(b1 b2 b3 b4)"), self.env(), XL)
        assert out == witness_a(4)

    def test_inside_listing_collapses(self):
        assert eval_witness(pt("h3(b1 b2 b3)"), self.env(), XL) == S_ZERO

    def test_absorbing_point(self):
        env = self.env()
        assert eval_witness(pt("h4(h4(b1 b2 b3 b4))"), env, XL) == witness_a(4)
        assert eval_witness(pt("h6(h4(b1))"), env, XL) == S_ZERO


class TestQuotient:
    def test_free_products(self):
        p = Presentation(("b1", "b2"), (), SIG)
        fq = build_finite_quotient(p, XL)
        nonzero = [x for x in fq.carrier() if x[0] == "s"]
        assert len(nonzero) == 3      # b1, b2, b1b2

    def test_idempotence_inside(self):
        fq = build_finite_quotient(FREE, XL)
        for i in range(fq.cutoff + 1):
            x = fq.eval_raw(pt("b1 b2"))
            assert fq.h(i, fq.h(i, x)) == fq.h(i, x)

    def test_unreachable_part(self):
        fq = build_finite_quotient(FREE, XL)
        subset = fq.eval_raw(pt("b1 b2"))
        atom = fq.h(1, fq.eval_raw(pt("b1")))
        assert fq.in_c(subset)
        assert not fq.in_c(atom)
        assert not fq.in_c(S_ZERO)

    def test_relations_quotient(self):
        p = Presentation(("b1", "b2"),
                         (Equation(pt("b1", ("b1", "b2")),
                                   pt("b2", ("b1", "b2"))),), SIG)
        assert decide_inf(p, pt("b1 b2", ("b1", "b2")), Term("0"), XL)
        p2 = Presentation(("b1", "b2"),
                          (Equation(pt("h1(b1)", ("b1", "b2")), Term("0")),), SIG)
        assert decide_inf(p2, pt("h1(h1(b1))", ("b1", "b2")), Term("0"), XL)
        assert not decide_inf(p2, pt("b1", ("b1", "b2")), Term("0"), XL)


class TestDecide:
    def test_commutativity(self):
        assert decide_inf(FREE, pt("b1 b2"), pt("b2 b1"), XL)

    def test_collapse_tracks_listing(self):
        assert decide_inf(FREE, pt("h2(b1 b2)"), Term("0"), XL)
        assert decide_inf(FREE, pt("h3(b1 b2 b3)"), Term("0"), XL)
        assert not decide_inf(FREE, pt("h4(b1 b2 b3 b4)"), Term("0"), XL)

    def test_large_index_fixed_points(self):
        fq = build_finite_quotient(FREE, XL)
        i = fq.cutoff + 3
        assert decide_inf(FREE, pt(f"h{i}(b1)"), pt(f"h{i}(h{i}(b1))"), XL)
        assert not decide_inf(FREE, pt(f"h{i}(b1)"), Term("0"), XL)
        assert decide_inf(FREE, pt(f"h{i+1}(h{i}(b1))"), Term("0"), XL)

    def test_zero_absorption(self):
        assert decide_inf(FREE, pt("h5(0)"), Term("0"), XL)
        assert decide_inf(FREE, pt("b1 0"), Term("0"), XL)

    def test_laws_hold_in_explicit_algebra(self):
        fq = build_finite_quotient(FREE, XL)
        elements = [S_ZERO,
                    fq.eval_raw(pt("b1")),
                    fq.eval_raw(pt("b1 b2")),
                    fq.h(1, fq.eval_raw(pt("b1"))),
                    fq.h(fq.cutoff + 2, fq.eval_raw(pt("b1")))]

        def ev(term, env):
            if term.is_leaf:
                if term.head == "0":
                    return S_ZERO
                return env[term.head]
            if term.head == "*":
                return fq.mul(ev(term.args[0], env), ev(term.args[1], env))
            from varietas.infv import h_index
            return fq.h(h_index(term.head), ev(term.args[0], env))

        checked = 0
        for eq in enumerate_laws_inf(XL, 400):
            vars_ = eq.variables
            for combo in product(elements[:3], repeat=len(vars_)):
                env = dict(zip(vars_, combo))
                assert ev(eq.lhs, env) == ev(eq.rhs, env), eq
                checked += 1
        assert checked > 500

    def test_against_schema_rewriting_oracle(self):
        schemas = enumerate_laws_inf(XL, 120)
        rng = random.Random(5150)
        starts = [pt(s) for s in
                  ("h2(b1 b2)", "b1 (b2 b3)", "h4(h4(b1))", "b1 b1",
                   "h3(b2) b1", "h5(b1 b2 b3 b4 b5)")]
        for start in starts:
            orbit = sorted(schema_rewrite_orbit(schemas, start, 4,
                                                max_size=18, max_terms=2500),
                           key=str)
            for target in rng.sample(orbit, min(6, len(orbit))):
                assert decide_inf(FREE, start, target, XL), (start, target)

    def test_negative_queries(self):
        assert not decide_inf(FREE, pt("b1"), pt("b2"), XL)
        assert not decide_inf(FREE, pt("h4(b1)"), pt("h4(b2)"), XL)
        assert not decide_inf(FREE, pt("b1 b2"), pt("b1 b3"), XL)

import pytest

from varietas.fb.encode import (
    DerivationTable, forward_derive, presentation_from_tape,
    tape_from_presentation,
)
from varietas.fb.laws import validate_law_instance
from varietas.fb.signature import build_signature
from varietas.samples import sample_machine
from varietas.terms import Term, parse_term
from varietas.turing import MachineError, make_tape, run


class TestPresentationFromTape:
    def test_single_letter_tape(self, halting, fbsig_halting):
        m, _ = halting
        tape = make_tape({-1: "e_L", 0: "a", 1: "e_R"}, 0, m.start, m.blank)
        p = presentation_from_tape(m, tape, fbsig_halting)
        assert len(p.relations) == 4
        assert p.generators == ()
        sig = fbsig_halting.signature
        expected = {
            (parse_term("C_Q(c)", sig), Term("q0")),
            (parse_term("C_S(S^-1(c))", sig), Term("e_L")),
            (parse_term("C_S(c)", sig), Term("a")),
            (parse_term("C_S(S(c))", sig), Term("e_R")),
        }
        assert {(eq.lhs, eq.rhs) for eq in p.relations} == expected

    def test_roundtrip(self, halting, fbsig_halting):
        m, tape = halting
        p = presentation_from_tape(m, tape, fbsig_halting)
        again = tape_from_presentation(p, m)
        assert again == tape

    def test_malformed_tapes(self, halting, fbsig_halting):
        m, _ = halting
        with pytest.raises(MachineError):
            presentation_from_tape(
                m, make_tape({0: "a"}, 0, m.start, m.blank), fbsig_halting)
        with pytest.raises(MachineError):
            presentation_from_tape(
                m, make_tape({-1: "e_L", 0: "a", 1: "e_R"}, 1, m.start, m.blank),
                fbsig_halting)


class TestForwardDerive:
    @pytest.mark.parametrize("name", ["halting", "looping", "marcher"])
    def test_matches_simulation(self, name):
        m, tape = sample_machine(name)
        fbsig = build_signature(m)
        p = presentation_from_tape(m, tape, fbsig)
        horizon = 100
        table = forward_derive(p, m, horizon, fbsig)
        tr = run(m, tape, horizon)
        for t in sorted(table.states):
            row = tr.rows[t]
            assert table.states[t] == row.state
            assert table.heads[t] == row.head
            for n, letter in table.letters[t].items():
                assert row.letter(n, m.blank) == letter
            for n, a in row.cells:
                assert table.letters[t].get(n) == a

    def test_time_zero_facts_are_the_relations(self, halting, fbsig_halting):
        m, tape = halting
        p = presentation_from_tape(m, tape, fbsig_halting)
        table = forward_derive(p, m, 0, fbsig_halting)
        assert table.states[0] == tape.state
        assert table.letters[0] == tape.as_dict()
        assert table.heads[0] == 0

    def test_certificate_chain(self, halting, fbsig_halting):
        m, tape = halting
        p = presentation_from_tape(m, tape, fbsig_halting)
        table = forward_derive(p, m, 50, fbsig_halting)
        cert = table.certificate
        assert cert is not None and cert.halt_time == 5
        assert cert.chain[0] == Term("0")
        assert cert.chain[3] == Term("1")
        assert cert.chain[-1] == Term("E", (Term("q0"),))
        assert cert.lines()[-1].startswith("1 ~ E(q0)")

    def test_no_certificate_when_looping(self, looping, fbsig_looping):
        m, tape = looping
        p = presentation_from_tape(m, tape, fbsig_looping)
        table = forward_derive(p, m, 60, fbsig_looping)
        assert table.certificate is None

    def test_cited_machine_laws_validate(self, halting, fbsig_halting):
        # every machine-law citation in the derivation names a real schema
        from varietas.fb.laws import all_law_schemas

        m, tape = halting
        p = presentation_from_tape(m, tape, fbsig_halting)
        table = forward_derive(p, m, 50, fbsig_halting)
        names = {s.name for s in all_law_schemas(fbsig_halting)}
        for fact in table.facts:
            for cite in fact.cites:
                if cite.startswith(("II.", "III.", "IV.", "V.", "VIII.")):
                    base = cite.split("/")[0]
                    assert any(n.startswith(base.split("[")[0]) for n in names), cite

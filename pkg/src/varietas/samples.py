"""Built-in sample machines and tapes for demos and tests."""

from __future__ import annotations

from .turing import AdjustedMachine, TapeConfiguration, adjust, parse_machine, parse_tape

#: halts in a handful of steps: writes b over the first two letters, then
#: steps left into the halting state
HALTING = """\
states q0 q1 h
alphabet B a b
start q0
halt h
delta q0 a -> q1 b +1
delta q1 a -> q1 b +1
delta q1 b -> h b -1
delta q1 B -> h B -1
"""

#: bounces between the first two squares forever
LOOPING = """\
states q0 q1 h
alphabet B a b
start q0
halt h
delta q0 a -> q1 a +1
delta q0 b -> q1 b +1
delta q1 a -> q0 a -1
delta q1 b -> q0 b -1
"""

#: marches right forever, pushing the right endmarker outward each lap
MARCHER = """\
states q0 h
alphabet B a
start q0
halt h
delta q0 a -> q0 a +1
delta q0 B -> q0 a +1
"""

HALTING_TAPE = "e_L a a e_R @0"
LOOPING_TAPE = "e_L a b e_R @0"
MARCHER_TAPE = "e_L a e_R @0"


def sample_machine(name: str) -> tuple[AdjustedMachine, TapeConfiguration]:
    texts = {
        "halting": (HALTING, HALTING_TAPE),
        "looping": (LOOPING, LOOPING_TAPE),
        "marcher": (MARCHER, MARCHER_TAPE),
    }
    if name not in texts:
        raise ValueError(f"unknown sample {name!r}")
    machine_text, tape_text = texts[name]
    m = adjust(parse_machine(machine_text))
    return m, parse_tape(tape_text, m)

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from varietas.fb import build_signature
from varietas.fb.encode import presentation_from_tape
from varietas.samples import sample_machine


@pytest.fixture(scope="session")
def halting():
    return sample_machine("halting")


@pytest.fixture(scope="session")
def looping():
    return sample_machine("looping")


@pytest.fixture(scope="session")
def marcher():
    return sample_machine("marcher")


@pytest.fixture(scope="session")
def fbsig_halting(halting):
    return build_signature(halting[0])


@pytest.fixture(scope="session")
def fbsig_looping(looping):
    return build_signature(looping[0])


@pytest.fixture(scope="session")
def tape_presentation_halting(halting, fbsig_halting):
    m, tape = halting
    return presentation_from_tape(m, tape, fbsig_halting)


@pytest.fixture(scope="session")
def tape_presentation_looping(looping, fbsig_looping):
    m, tape = looping
    return presentation_from_tape(m, tape, fbsig_looping)

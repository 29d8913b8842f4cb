import pytest

from monadic.frame import AugmentedFrame


@pytest.fixture
def grz2():
    """Two-point reflexive chain x<y inside a single E-block."""
    return AugmentedFrame(["x", "y"], [("x", "x"), ("y", "y"), ("x", "y")], [["x", "y"]])


@pytest.fixture
def mcas():
    from monadic.translate import named

    return named("MCas").formula


@pytest.fixture
def mboxcas():
    from monadic.translate import named

    return named("MBoxCas").formula

import random

import pytest

from monadic import _kernels_py as py
from monadic import kernels
from monadic.formula import random_formula
from monadic.frame import _CLASS_FILTER, enumerate_frames, partitions
from monadic.semantics import Flavor, compile_formula, valuation_choices

try:
    from monadic import _ckernels as cy
except ImportError:  # extension not built
    cy = None

needs_ext = pytest.mark.skipif(cy is None, reason="compiled kernels not built")


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")
    assert kernels.compiled_available() == (kernels.BACKEND == "cython")
    if kernels.compiled_available():
        assert cy is not None


@needs_ext
def test_eval_parity():
    rng = random.Random(0)
    frames = list(enumerate_frames(3, "augmented"))
    for _ in range(60):
        modal = rng.random() < 0.5
        flavor = Flavor.MOD if modal else Flavor.INT
        prog = compile_formula(random_formula(rng, 3, modal=modal), flavor)
        for F in rng.sample(frames, 20):
            env = [rng.randrange(1 << F.size) for _ in prog.slots]
            args = (prog.ops, prog.arg_a, prog.arg_b, F.succ, F.blk, F.qrel, env)
            assert cy.eval_program(*args) == py.eval_program(*args)


@needs_ext
def test_refutation_parity():
    rng = random.Random(1)
    frames = list(enumerate_frames(3, "mipc"))
    for _ in range(60):
        prog = compile_formula(random_formula(rng, 3), Flavor.INT)
        for F in rng.sample(frames, 20):
            choices = [valuation_choices(F, Flavor.INT)] * len(prog.slots)
            args = (prog.ops, prog.arg_a, prog.arg_b, F.succ, F.blk, F.qrel, choices)
            assert cy.first_refutation(*args) == py.first_refutation(*args)


@needs_ext
@pytest.mark.parametrize("cls", ["any", "augmented", "ms4", "mipc", "mgl", "m_plus_ipc"])
def test_enumeration_parity(cls):
    mode, comm, clean = _CLASS_FILTER[cls]
    for k in (1, 2, 3):
        parts = [tuple(p) for p in _blocks(k)]
        assert cy.enumerate_codes(k, mode, comm, clean, parts) == py.enumerate_codes(k, mode, comm, clean, parts)


def _blocks(k):
    for rgs in partitions(k):
        yield [sum(1 << j for j in range(k) if rgs[j] == rgs[i]) for i in range(k)]


@needs_ext
def test_large_frame_falls_back():
    k = 70
    succ = [1 << i for i in range(k)]
    out = kernels.eval_program([0], [0], [0], succ, succ, succ, [5])
    assert out == [5]


def test_pure_python_switch_gives_same_search():
    import os
    import subprocess
    import sys

    code = (
        "from monadic import kernels; from monadic.search import search_countermodel;"
        "from monadic.translate import named;"
        "cm = search_countermodel(named('MCas').formula, 'MIPC', 3);"
        "print(kernels.BACKEND, cm.index, cm.world, sorted(cm.valuation['p']))"
    )
    outs = {}
    for flag in ("1", ""):
        env = dict(os.environ, MONADIC_PURE_PYTHON=flag)
        outs[flag] = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout.split()
    assert outs["1"][0] == "python"
    assert outs["1"][1:] == outs[""][1:]

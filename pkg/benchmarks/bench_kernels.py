"""Time the compiled kernels against the pure-Python ones.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import random
import timeit

from monadic import _kernels_py as py
from monadic.formula import random_formula
from monadic.frame import _CLASS_FILTER, enumerate_frames, partitions
from monadic.semantics import Flavor, compile_formula, valuation_choices
from monadic.translate import named, split

try:
    from monadic import _ckernels as cy
except ImportError:
    cy = None


def _blocks(k):
    return [tuple(sum(1 << j for j in range(k) if rgs[j] == rgs[i]) for i in range(k)) for rgs in partitions(k)]


def workloads():
    rng = random.Random(0)
    mipc3 = list(enumerate_frames(3, "mipc"))
    mgl4 = list(enumerate_frames(4, "mgl"))
    int_progs = [compile_formula(random_formula(rng, 4), Flavor.INT) for _ in range(20)]
    gl_prog = compile_formula(split(named("MBoxCas").formula), Flavor.MOD)

    def evaluate(k):
        for F in mipc3:
            for prog in int_progs:
                k.eval_program(prog.ops, prog.arg_a, prog.arg_b, F.succ, F.blk, F.qrel, [F.full] * len(prog.slots))

    def refute(k):
        for F in mipc3:
            choices = valuation_choices(F, Flavor.INT)
            for prog in int_progs:
                k.first_refutation(prog.ops, prog.arg_a, prog.arg_b, F.succ, F.blk, F.qrel, [choices] * len(prog.slots))

    def validity_mgl4(k):
        for F in mgl4:
            k.first_refutation(gl_prog.ops, gl_prog.arg_a, gl_prog.arg_b, F.succ, F.blk, F.qrel,
                               [list(range(1 << F.size))] * len(gl_prog.slots))

    parts4 = _blocks(4)

    def enumerate4(k):
        for cls in ("ms4", "mgl"):
            mode, comm, clean = _CLASS_FILTER[cls]
            k.enumerate_codes(4, mode, comm, clean, parts4)

    return {
        "eval 20 formulas x MIPC<=3": evaluate,
        "first_refutation MIPC<=3": refute,
        "split(MBoxCas) on MGL<=4": validity_mgl4,
        "enumerate codes k=4": enumerate4,
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    backends = [("python", py)] + ([("cython", cy)] if cy is not None else [])
    if cy is None:
        print("compiled kernels not built; timing the Python backend only")
    print(f"{'workload':32} " + " ".join(f"{name:>10}" for name, _ in backends) + ("    speedup" if cy else ""))
    for label, fn in workloads().items():
        times = [min(timeit.repeat(lambda: fn(mod), number=1, repeat=args.repeat)) for _, mod in backends]
        row = f"{label:32} " + " ".join(f"{t * 1000:8.1f}ms" for t in times)
        if len(times) == 2:
            row += f"  {times[0] / times[1]:8.1f}x"
        print(row)


if __name__ == "__main__":
    main()

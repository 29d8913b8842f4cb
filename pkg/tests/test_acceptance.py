"""Acceptance criteria 1-8.

Each check returns ``(ok, detail)``; the pytest wrappers print one PASS/FAIL
line per criterion.  Run directly with ``python tests/test_acceptance.py``.
"""

from __future__ import annotations

import io
import json
import random
import sys
import time

import pytest

from monadic import kernels
from monadic.cli import run as cli_run
from monadic.formula import (
    Box,
    Exists,
    Forall,
    Imp,
    Var,
    bound_profile,
    random_formula,
    to_text,
)
from monadic.frame import (
    AugmentedFrame,
    classify,
    clean_clusters,
    enumerate_frames,
    irreflexive_reduction,
    reflexive_closure,
    skeleton,
)
from monadic.search import search_countermodel, verify_translation_chain
from monadic.semantics import Flavor, Model, compile_formula, frame_validity, upset_masks
from monadic.translate import godel, named, split

p = Var("p")


def _grz2() -> AugmentedFrame:
    return AugmentedFrame(["x", "y"], [("x", "x"), ("y", "y"), ("x", "y")], [["x", "y"]])


def _mask(F: AugmentedFrame, prog, env: dict[str, int]) -> int:
    vals = kernels.eval_program(prog.ops, prog.arg_a, prog.arg_b, F.succ, F.blk, F.qrel, [env.get(s, 0) for s in prog.slots])
    return vals[-1]


def _envs(choices: list[int], names=("p", "q")):
    for a in choices:
        for b in choices:
            yield {names[0]: a, names[1]: b}


# --------------------------------------------------------------------------

def criterion_1():
    start = time.perf_counter()
    F = _grz2()
    M = Model(F, {"p": {"y"}}, Flavor.MOD)
    bb = lambda f: Box(Forall(f))
    antecedent = bb(Imp(Box(Imp(Box(p), bb(p))), bb(p)))
    checks = {
        "M□Cas false at x": M.holds("x", named("MBoxCas").formula) is False,
        "x ⊨ ■(□(□p→■p)→■p)": M.holds("x", antecedent) is True,
        "x ⊭ ■p": M.holds("x", bb(p)) is False,
        "y ⊨ □p": M.holds("y", Box(p)) is True,
    }
    elapsed = time.perf_counter() - start
    ok = all(checks.values()) and elapsed < 1.0
    bad = [k for k, v in checks.items() if not v]
    return ok, f"{len(checks) - len(bad)}/{len(checks)} claims hold in {elapsed * 1000:.1f} ms" + (f"; failed: {bad}" if bad else "")


def criterion_2():
    f = split(named("MBoxCas").formula)
    frames = refuted = 0
    start = time.perf_counter()
    for F in enumerate_frames(4, "mgl"):
        frames += 1
        if not frame_validity(F, f, Flavor.MOD).valid:
            refuted += 1
    elapsed = time.perf_counter() - start
    return refuted == 0 and frames > 0, f"{frames} MGL frames ≤4 worlds, {refuted} refutations, {elapsed:.2f} s"


def criterion_3():
    mcas, mbox = named("MCas").formula, named("MBoxCas").formula
    bad_int = bad_grz = n_int = n_grz = dirty = 0
    for F in enumerate_frames(3, "mipc"):
        n_int += 1
        clean = clean_clusters(F)[0]
        dirty += not clean
        if frame_validity(F, mcas, Flavor.INT).valid != clean:
            bad_int += 1
    for F in enumerate_frames(3, "mgrz"):
        n_grz += 1
        clean = clean_clusters(F)[0]
        if frame_validity(F, mbox, Flavor.MOD).valid != clean:
            bad_grz += 1
    ok = bad_int == 0 and bad_grz == 0
    return ok, f"MIPC {n_int} frames ({dirty} dirty) / {bad_int} exceptions; MGrz {n_grz} frames / {bad_grz} exceptions"


def criterion_4(n_formulas: int = 200, seed: int = 2024):
    rng = random.Random(seed)
    int_fs = [random_formula(rng, 3) for _ in range(n_formulas)]
    mod_fs = [random_formula(rng, 3, modal=True) for _ in range(n_formulas)]
    counter = {"godel": 0, "skeleton": 0, "upset": 0, "split_i": 0, "split_r": 0}
    cases = dict.fromkeys(counter, 0)

    # (F,x) ⊨ φ  ⇔  (F,x) ⊨ φᵗ  on MIPC frames, upset valuations
    progs = [(compile_formula(f, Flavor.INT), compile_formula(godel(f), Flavor.MOD)) for f in int_fs]
    for F in enumerate_frames(3, "mipc"):
        for env in _envs(upset_masks(F)):
            for pi, pt in progs:
                cases["godel"] += 1
                if _mask(F, pi, env) != _mask(F, pt, env):
                    counter["godel"] += 1

    # (F,x) ⊨ φᵗ  ⇔  (F∼,[x]) ⊨ν∼ φ  on MS4 frames, all valuations
    box_p = compile_formula(Box(p), Flavor.MOD)
    for F in enumerate_frames(3, "ms4"):
        S, cls = skeleton(F)
        pos = [S.index[cls[w]] for w in F.worlds]
        ups = set(upset_masks(S))

        def down(mask: int) -> int:
            out = 0
            for i in range(F.size):
                if mask >> i & 1:
                    out |= 1 << pos[i]
            return out

        for env in _envs(range(1 << F.size)):
            senv = {v: down(_mask(F, box_p, {"p": m})) for v, m in env.items()}
            cases["upset"] += 1
            if not all(m in ups for m in senv.values()):
                counter["upset"] += 1
            for pi, pt in progs:
                cases["skeleton"] += 1
                lhs = _mask(F, pt, env)
                rhs = _mask(S, pi, senv)
                if any((lhs >> i & 1) != (rhs >> pos[i] & 1) for i in range(F.size)):
                    counter["skeleton"] += 1

    # (F,x) ⊨ φ  ⇔  (Fⁱ,x) ⊨ φˢ  on M⁺Grz frames, and (F,x) ⊨ φˢ ⇔ (Fʳ,x) ⊨ φ on MGL frames
    mprogs = [(compile_formula(f, Flavor.MOD), compile_formula(split(f), Flavor.MOD)) for f in mod_fs]
    for F in enumerate_frames(3, "m_plus_grz"):
        Fi = irreflexive_reduction(F)
        for env in _envs(range(1 << F.size)):
            for pf, ps in mprogs:
                cases["split_i"] += 1
                if _mask(F, pf, env) != _mask(Fi, ps, env):
                    counter["split_i"] += 1
    for F in enumerate_frames(3, "mgl"):
        Fr = reflexive_closure(F)
        for env in _envs(range(1 << F.size)):
            for pf, ps in mprogs:
                cases["split_r"] += 1
                if _mask(F, ps, env) != _mask(Fr, pf, env):
                    counter["split_r"] += 1

    ok = not any(counter.values())
    detail = ", ".join(f"{k}: {counter[k]}/{cases[k]}" for k in counter)
    return ok, f"counterexamples/cases ({n_formulas} int + {n_formulas} modal formulas, ≤3 worlds): {detail}"


def criterion_5():
    bad = n = 0
    for F in enumerate_frames(3, "m_plus_grz"):
        n += 1
        if not classify(irreflexive_reduction(F)).mgl_finite:
            bad += 1
    for F in enumerate_frames(3, "mgl"):
        n += 1
        if not classify(reflexive_closure(F)).m_plus_grz:
            bad += 1
    refl = 0
    for F in enumerate_frames(3, "any"):
        if all(F.succ[i] >> i & 1 for i in range(F.size)):
            refl += 1
            if reflexive_closure(irreflexive_reduction(F)) != F:
                bad += 1
    return bad == 0, f"{n} class checks + {refl} reflexive frames, {bad} exceptions"


def criterion_6():
    mcas = named("MCas").formula
    cm = search_countermodel(mcas, "MIPC", 2)
    if cm is None:
        return False, "no countermodel found"
    dirty = not clean_clusters(cm.frame)[0]
    refuted = cm.refutes(mcas)
    runs = [search_countermodel(mcas, "MIPC", 2, threads=t) for t in (1, 1, 2, 4, 4)]
    same = all(r == cm for r in runs)
    outs = []
    for t in ("1", "4"):
        buf = io.StringIO()
        cli_run(["search", "--formula", to_text(mcas), "--logic", "MIPC", "--max-worlds", "2", "--threads", t, "--json"], buf, io.StringIO())
        doc = json.loads(buf.getvalue())
        doc.pop("stats")
        outs.append(doc)
    cli_same = outs[0] == outs[1] and outs[0]["countermodel"] == cm.as_dict()
    ok = cm.frame.size == 2 and dirty and refuted and same and cli_same
    vals = {k: sorted(v) for k, v in cm.valuation.items()}
    return ok, (
        f"witness {cm.frame.size} worlds, dirty={dirty}, refuted at {cm.world} with {vals}, "
        f"identical over {len(runs)} runs (threads 1..4)={same}, CLI --threads 4 identical={cli_same}"
    )


def _oracle_counts(f):
    """Distinct subtrees by naive recursive union; independent of the library listing."""
    def subs(g):
        out = {g}
        for c in g.children():
            out |= subs(c)
        return out

    s = subs(f)
    count = lambda cls: sum(isinstance(g, cls) for g in s)
    return len(s), count(Exists), count(Forall), count(Imp), count(Box)


def criterion_7():
    mcas, mbox = named("MCas").formula, named("MBoxCas").formula
    a = bound_profile(mcas, "M+IPC")
    b = bound_profile(mbox, "M+Grz")
    _, e1, e2, e3, _ = _oracle_counts(mcas)
    n, _, _, _, m = _oracle_counts(mbox)
    c = 1 + e1 + e2
    oracle_a = (e1, e2, e3, c, c * e3 + e2, c * (e2 + e3))
    oracle_b = (n, m, 2**n, 2**n * m, 2**n * m + 1)
    got_a = (a.m1, a.m2, a.m3, a.cluster_cap, a.branch_cap, a.depth_cap)
    got_b = (b.n, b.m, b.cluster_cap, b.branch_cap, b.depth_cap)
    ok = got_a == oracle_a == (0, 2, 3, 3, 11, 15) and got_b == oracle_b == (10, 4, 1024, 4096, 4097)
    return ok, f"MCas/M+IPC (m1,m2,m3,caps)={got_a}; M□Cas/M+Grz (n,m,caps)={got_b}; oracle agrees={got_a == oracle_a and got_b == oracle_b}"


def criterion_8(n_formulas: int = 50, seed: int = 8):
    rng = random.Random(seed)
    disagree = transfer_bad = refutable = 0
    for _ in range(n_formulas):
        f = random_formula(rng, 3, names=("p", "q"))
        r = verify_translation_chain(f, 3)
        if not r.agree:
            disagree += 1
        if not r.transfers_ok:
            transfer_bad += 1
        refutable += r.statuses[0]
    ok = disagree == 0 and transfer_bad == 0
    return ok, f"{n_formulas} formulas ({refutable} refutable), {disagree} status disagreements, {transfer_bad} failed frame transfers"


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
}


def _report(n: int, ok: bool, detail: str) -> str:
    return f"criterion {n}: {'PASS' if ok else 'FAIL'} - {detail}"


@pytest.mark.parametrize("n", sorted(CRITERIA))
def test_criterion(n, capsys):
    ok, detail = CRITERIA[n]()
    with capsys.disabled():
        print("\n" + _report(n, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for n, check in CRITERIA.items():
        ok, detail = check()
        failed += not ok
        print(_report(n, ok, detail), flush=True)
    sys.exit(1 if failed else 0)

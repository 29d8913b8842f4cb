"""Countermodel search and bounded decision procedures.

Provability in a logic is read as validity on all of its finite frames; for
M+IPC and M+Grz the bound profile of a formula gives a world count beyond
which no new countermodels can appear, so an exhausted search up to that
count proves the formula.  For the other logics the search is a
semi-decision under a user cap.
"""

from __future__ import annotations

import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .formula import BoundProfile, Formula, LanguageError, Logic, LogicId, bound_profile, is_modal, to_text
from .frame import (
    MAX_ENUM_WORLDS,
    AugmentedFrame,
    CapExceeded,
    enumerate_frames,
    enumeration_estimate,
    frame_to_json,
    irreflexive_reduction,
    max_states,
    reflexive_closure,
)
from .semantics import Flavor, Model, Program, compile_formula, refute_on, valuation_choices
from .translate import godel, split

DEFAULT_SEMI_CAP = 3


@dataclass(frozen=True)
class Countermodel:
    frame: AugmentedFrame
    valuation: dict[str, frozenset[str]]
    world: str
    flavor: Flavor
    index: int = 0  # position of the frame in the enumeration

    def model(self) -> Model:
        return Model(self.frame, self.valuation, self.flavor)

    def refutes(self, f: Formula) -> bool:
        """Re-evaluate ``f`` at the witness world; True when it is false there."""
        return not self.model().holds(self.world, f)

    def as_dict(self) -> dict:
        return {
            "frame": frame_to_json(self.frame),
            "valuation": {p: self.frame.ordered(ws) for p, ws in self.valuation.items()},
            "world": self.world,
            "flavor": self.flavor.value,
        }


@dataclass
class SearchStats:
    frames_examined: int = 0
    valuations_examined: int = 0
    elapsed: float = 0.0

    def as_dict(self) -> dict:
        return {
            "frames_examined": self.frames_examined,
            "valuations_examined": self.valuations_examined,
            "elapsed": round(self.elapsed, 6),
        }


@dataclass(frozen=True)
class SearchResult:
    countermodel: Countermodel | None
    max_worlds: int
    class_id: str
    stats: SearchStats = field(compare=False, default_factory=SearchStats)


def _check_language(f: Formula, logic: Logic) -> None:
    if logic.intuitionistic and is_modal(f):
        raise LanguageError(f"{logic.value} expects an intuitionistic formula")


def _flavor(logic: Logic) -> Flavor:
    return Flavor.INT if logic.intuitionistic else Flavor.MOD


def _search_class(
    f: Formula,
    class_id: str,
    flavor: Flavor,
    max_worlds: int,
    threads: int = 1,
) -> SearchResult:
    if max_worlds < 1:
        raise ValueError("max_worlds must be at least 1")
    start = time.perf_counter()
    stats = SearchStats()
    prog = compile_formula(f, flavor)
    frames = list(enumerate_frames(max_worlds, class_id))
    limit = max_states()
    space = (1 << max_worlds) ** len(prog.slots)
    if space > limit:
        raise CapExceeded("valuation space per frame", space, limit, frontier=max_worlds)
    found = _scan(frames, prog, flavor, threads, stats)
    stats.elapsed = time.perf_counter() - start
    cm = None
    if found is not None:
        idx, verdict = found
        F = frames[idx]
        cm = Countermodel(F, verdict.valuation, verdict.world, flavor, idx)
    return SearchResult(cm, max_worlds, class_id, stats)


def _scan(frames: list[AugmentedFrame], prog: Program, flavor: Flavor, threads: int, stats: SearchStats):
    """Least-index refuted frame; identical for every thread count."""
    if threads <= 1:
        for i, F in enumerate(frames):
            verdict = refute_on(F, prog, valuation_choices(F, flavor))
            stats.frames_examined += 1
            stats.valuations_examined += verdict.examined
            if not verdict.valid:
                return i, verdict
        return None

    lock = threading.Lock()
    best = [len(frames), None]

    def worker(offset: int) -> None:
        for i in range(offset, len(frames), threads):
            if i >= best[0]:
                return
            F = frames[i]
            verdict = refute_on(F, prog, valuation_choices(F, flavor))
            with lock:
                stats.frames_examined += 1
                stats.valuations_examined += verdict.examined
                if not verdict.valid:
                    if i < best[0]:
                        best[0], best[1] = i, verdict
                    return

    with ThreadPoolExecutor(max_workers=threads) as pool:
        list(pool.map(worker, range(threads)))
    if best[1] is None:
        return None
    return best[0], best[1]


def search(f: Formula, logic: LogicId, max_worlds: int, threads: int = 1) -> SearchResult:
    logic = Logic.parse(logic)
    _check_language(f, logic)
    return _search_class(f, logic.frame_class, _flavor(logic), max_worlds, threads)


def search_countermodel(f: Formula, logic: LogicId, max_worlds: int, threads: int = 1) -> Countermodel | None:
    """First countermodel of ``f`` on the logic's frames with at most ``max_worlds`` worlds."""
    return search(f, logic, max_worlds, threads).countermodel


# --------------------------------------------------------------------------
# Decision

PROVABLE = "provable"
NOT_PROVABLE = "not_provable"
EXHAUSTED = "exhausted"


@dataclass(frozen=True)
class DecideVerdict:
    outcome: str
    logic: Logic
    formula: str
    searched: int
    world_cap: int | None
    complete: bool
    profile: BoundProfile
    countermodel: Countermodel | None = None
    stats: SearchStats = field(default_factory=SearchStats, compare=False)
    note: str = ""

    def as_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "logic": self.logic.value,
            "formula": self.formula,
            "searched": self.searched,
            "world_cap": self.world_cap,
            "complete": self.complete,
            "profile": self.profile.as_dict(),
            "countermodel": self.countermodel.as_dict() if self.countermodel else None,
            "stats": self.stats.as_dict(),
            "note": self.note,
        }


def _feasible(target: int, class_id: str) -> int:
    """Largest world count up to ``target`` the enumeration guard allows."""
    limit = max_states()
    k = 0
    while k < min(target, MAX_ENUM_WORLDS) and enumeration_estimate(k + 1, class_id) <= limit:
        k += 1
    return k


def decide(f: Formula, logic: LogicId, user_cap: int | None = None, threads: int = 1) -> DecideVerdict:
    logic = Logic.parse(logic)
    _check_language(f, logic)
    profile = bound_profile(f, logic)
    wcap = profile.world_cap
    notes = [profile.note] if profile.note else []
    caps = [c for c in (user_cap, wcap) if c is not None]
    if caps:
        target = min(caps)
    else:
        target = DEFAULT_SEMI_CAP
        notes.append(f"no cap given; searched up to the default {DEFAULT_SEMI_CAP} worlds")
    if target < 1:
        raise ValueError("the search cap must be at least 1 world")
    reach = _feasible(target, logic.frame_class)
    if reach < target:
        notes.append(f"enumeration guard limits the search to {reach} worlds (target {target})")
    if reach < 1:
        raise CapExceeded("enumeration guard", enumeration_estimate(1, logic.frame_class), max_states(), 0)
    result = _search_class(f, logic.frame_class, _flavor(logic), reach, threads)
    if result.countermodel is not None:
        outcome = NOT_PROVABLE
    elif wcap is not None and reach >= wcap:
        outcome = PROVABLE
    else:
        outcome = EXHAUSTED
    if wcap is not None and outcome == EXHAUSTED:
        notes.append(f"complete only at {wcap} worlds")
    return DecideVerdict(
        outcome=outcome,
        logic=logic,
        formula=to_text(f),
        searched=reach,
        world_cap=wcap,
        complete=wcap is not None and reach >= wcap,
        profile=profile,
        countermodel=result.countermodel,
        stats=result.stats,
        note="; ".join(notes),
    )


# --------------------------------------------------------------------------
# M+IPC -> M+Grz -> MGL

@dataclass(frozen=True)
class Transfer:
    """A witness moved to the neighbouring frame class and re-checked there."""

    frame: AugmentedFrame
    formula: str
    refuted: bool

    def as_dict(self) -> dict:
        return {"frame": frame_to_json(self.frame), "formula": self.formula, "refuted": self.refuted}


@dataclass(frozen=True)
class ChainReport:
    formula: str
    max_worlds: int
    int_witness: Countermodel | None
    grz_witness: Countermodel | None
    gl_witness: Countermodel | None
    grz_to_gl: Transfer | None
    gl_to_grz: Transfer | None

    @property
    def statuses(self) -> tuple[bool, bool, bool]:
        return (self.int_witness is not None, self.grz_witness is not None, self.gl_witness is not None)

    @property
    def agree(self) -> bool:
        return len(set(self.statuses)) == 1

    @property
    def transfers_ok(self) -> bool:
        return all(t is None or t.refuted for t in (self.grz_to_gl, self.gl_to_grz))

    def as_dict(self) -> dict:
        def wit(c):
            return c.as_dict() if c else None

        return {
            "formula": self.formula,
            "max_worlds": self.max_worlds,
            "refutable": dict(zip(("M+IPC", "M+Grz", "MGL"), self.statuses)),
            "agree": self.agree,
            "witnesses": {"M+IPC": wit(self.int_witness), "M+Grz": wit(self.grz_witness), "MGL": wit(self.gl_witness)},
            "transfers": {
                "M+Grz->MGL": self.grz_to_gl.as_dict() if self.grz_to_gl else None,
                "MGL->M+Grz": self.gl_to_grz.as_dict() if self.gl_to_grz else None,
            },
        }


def verify_translation_chain(f: Formula, max_worlds: int, threads: int = 1) -> ChainReport:
    """Compare refutability of f, its Gödel translation and the split of that
    on M+IPC, M+Grz and MGL frames up to ``max_worlds`` worlds."""
    if is_modal(f):
        raise LanguageError("the translation chain starts from an intuitionistic formula")
    t = godel(f)
    s = split(t)
    int_w = search_countermodel(f, Logic.M_PLUS_IPC, max_worlds, threads)
    grz_w = search_countermodel(t, Logic.M_PLUS_GRZ, max_worlds, threads)
    gl_w = search_countermodel(s, Logic.MGL, max_worlds, threads)
    grz_to_gl = gl_to_grz = None
    if grz_w is not None:
        Fi = irreflexive_reduction(grz_w.frame)
        moved = Countermodel(Fi, grz_w.valuation, grz_w.world, Flavor.MOD)
        grz_to_gl = Transfer(Fi, to_text(s), moved.refutes(s))
    if gl_w is not None:
        Fr = reflexive_closure(gl_w.frame)
        moved = Countermodel(Fr, gl_w.valuation, gl_w.world, Flavor.MOD)
        gl_to_grz = Transfer(Fr, to_text(t), moved.refutes(t))
    return ChainReport(to_text(f), max_worlds, int_w, grz_w, gl_w, grz_to_gl, gl_to_grz)

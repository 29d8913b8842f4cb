"""Model checking on finite augmented frames.

Formulas are compiled to a straight-line program over their distinct
subformulas and evaluated as world bitsets, so each subformula is computed
once per model and valuation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Mapping

from . import kernels
from .formula import (
    And,
    Bot,
    Box,
    Dia,
    Exists,
    Forall,
    Formula,
    Imp,
    Neg,
    Or,
    Var,
    subformulas,
)
from .frame import AugmentedFrame, CapExceeded, max_states


class Flavor(str, Enum):
    INT = "int"
    MOD = "mod"

    @classmethod
    def parse(cls, text: "str | Flavor") -> "Flavor":
        if isinstance(text, Flavor):
            return text
        key = text.lower()
        if key in ("int", "intuitionistic"):
            return cls.INT
        if key in ("mod", "modal"):
            return cls.MOD
        raise ValueError(f"unknown flavor {text!r}; use 'int' or 'mod'")


_INT_OPS = {
    And: kernels.OP_AND,
    Or: kernels.OP_OR,
    Imp: kernels.OP_IMP_I,
    Neg: kernels.OP_NEG_I,
    Forall: kernels.OP_ALL_Q,
    Exists: kernels.OP_EX_E,
}
_MOD_OPS = {
    And: kernels.OP_AND,
    Or: kernels.OP_OR,
    Imp: kernels.OP_IMP,
    Neg: kernels.OP_NEG,
    Box: kernels.OP_BOX,
    Dia: kernels.OP_DIA,
    Forall: kernels.OP_ALL_E,
    Exists: kernels.OP_EX_E,
}


@dataclass(frozen=True)
class Program:
    ops: tuple[int, ...]
    arg_a: tuple[int, ...]
    arg_b: tuple[int, ...]
    nodes: tuple[Formula, ...]
    slots: tuple[str, ...]


@lru_cache(maxsize=4096)
def compile_formula(f: Formula, flavor: Flavor) -> Program:
    table = _INT_OPS if flavor is Flavor.INT else _MOD_OPS
    nodes = subformulas(f)
    pos = {g: i for i, g in enumerate(nodes)}
    slots: dict[str, int] = {}
    ops, aa, bb = [], [], []
    for g in nodes:
        a = b = 0
        if isinstance(g, Var):
            op = kernels.OP_VAR
            a = slots.setdefault(g.name, len(slots))
        elif isinstance(g, Bot):
            op = kernels.OP_BOT
        else:
            try:
                op = table[type(g)]
            except KeyError:
                raise ValueError(f"{type(g).__name__} is not allowed in {flavor.value} formulas") from None
            kids = g.children()
            a = pos[kids[0]]
            b = pos[kids[-1]]
        ops.append(op)
        aa.append(a)
        bb.append(b)
    return Program(tuple(ops), tuple(aa), tuple(bb), tuple(nodes), tuple(slots))


def _check_flavor(flavor, expected: Flavor) -> None:
    if Flavor.parse(flavor) is not expected:
        raise ValueError(f"model flavor is {Flavor.parse(flavor).value}, expected {expected.value}")


def upset_masks(F: AugmentedFrame) -> list[int]:
    """R-upsets of ``F`` as bitmasks, ascending."""
    return [u for u in range(1 << F.size) if all(F.succ[i] & ~u == 0 for i in range(F.size) if u >> i & 1)]


def upsets(F: AugmentedFrame) -> list[frozenset[str]]:
    return [F.to_set(u) for u in upset_masks(F)]


@dataclass
class Model:
    """A frame with a valuation; unmapped variables are false everywhere."""

    frame: AugmentedFrame
    valuation: Mapping[str, frozenset[str]]
    flavor: Flavor = Flavor.MOD
    _env: dict[str, int] = field(init=False, repr=False, compare=False)
    _memo: dict = field(init=False, repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        self.flavor = Flavor.parse(self.flavor)
        self.valuation = {p: frozenset(ws) for p, ws in self.valuation.items()}
        self._env = {p: self.frame.to_mask(ws) for p, ws in self.valuation.items()}
        if self.flavor is Flavor.INT:
            for p, mask in self._env.items():
                if any(self.frame.succ[i] & ~mask for i in range(self.frame.size) if mask >> i & 1):
                    raise ValueError(f"intuitionistic valuation of {p!r} is not an R-upset")

    def truth_mask(self, f: Formula) -> int:
        if f not in self._memo:
            prog = compile_formula(f, self.flavor)
            env = [self._env.get(p, 0) for p in prog.slots]
            F = self.frame
            vals = kernels.eval_program(prog.ops, prog.arg_a, prog.arg_b, F.succ, F.blk, F.qrel, env)
            for g, v in zip(prog.nodes, vals):
                self._memo[g] = v
        return self._memo[f]

    def truth_set(self, f: Formula) -> frozenset[str]:
        return self.frame.to_set(self.truth_mask(f))

    def holds(self, world: str, f: Formula) -> bool:
        try:
            i = self.frame.index[world]
        except KeyError:
            raise ValueError(f"unknown world {world!r}") from None
        return bool(self.truth_mask(f) >> i & 1)


def eval_int(M: Model, x: str, f: Formula) -> bool:
    _check_flavor(M.flavor, Flavor.INT)
    return M.holds(x, f)


def eval_mod(M: Model, x: str, f: Formula) -> bool:
    _check_flavor(M.flavor, Flavor.MOD)
    return M.holds(x, f)


@dataclass(frozen=True)
class Verdict:
    valid: bool
    valuation: dict[str, frozenset[str]] | None = None
    world: str | None = None
    examined: int = 0

    @property
    def refuted(self) -> bool:
        return not self.valid

    def as_dict(self, frame: AugmentedFrame | None = None) -> dict:
        out: dict = {"valid": self.valid}
        if not self.valid:
            order = frame.ordered if frame is not None else sorted
            out["valuation"] = {p: list(order(ws)) for p, ws in self.valuation.items()}
            out["world"] = self.world
        out["valuations_examined"] = self.examined
        return out


def valuation_choices(F: AugmentedFrame, flavor: Flavor) -> list[int]:
    if Flavor.parse(flavor) is Flavor.INT:
        return upset_masks(F)
    return list(range(1 << F.size))


def refute_on(F: AugmentedFrame, prog: Program, choices: list[int]) -> Verdict:
    """First refuting valuation of a compiled formula on ``F``, if any."""
    idx, world, examined = kernels.first_refutation(
        prog.ops, prog.arg_a, prog.arg_b, F.succ, F.blk, F.qrel, [choices] * len(prog.slots)
    )
    if idx is None:
        return Verdict(True, examined=examined)
    valuation = {p: F.to_set(choices[j]) for p, j in zip(prog.slots, idx)}
    return Verdict(False, valuation, F.worlds[world], examined)


def frame_validity(F: AugmentedFrame, f: Formula, flavor: "Flavor | str", limit: int | None = None) -> Verdict:
    """Check ``f`` at every world under every admissible valuation of its variables.

    Intuitionistic valuations range over R-upsets, modal ones over all subsets;
    both in ascending bitmask order, variables in order of first occurrence.
    """
    flavor = Flavor.parse(flavor)
    prog = compile_formula(f, flavor)
    if F.size > 24:
        raise CapExceeded("valuation space", 1 << F.size, limit or max_states())
    choices = valuation_choices(F, flavor)
    limit = max_states() if limit is None else limit
    space = len(choices) ** len(prog.slots)
    if space > limit:
        raise CapExceeded("valuation space", space, limit)
    return refute_on(F, prog, choices)

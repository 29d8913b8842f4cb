"""Gödel and splitting translations, plus the library of named formulas."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .formula import (
    BOT,
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
    parse_int,
    parse_mod,
)


def godel(f: Formula) -> Formula:
    """Translate an intuitionistic formula into the bimodal language.

    Atoms, implications, negations and universal quantifiers get a leading box;
    the remaining connectives are translated homomorphically.
    """
    if isinstance(f, Var):
        return Box(f)
    if isinstance(f, Bot):
        return f
    if isinstance(f, And):
        return And(godel(f.left), godel(f.right))
    if isinstance(f, Or):
        return Or(godel(f.left), godel(f.right))
    if isinstance(f, Imp):
        return Box(Imp(godel(f.left), godel(f.right)))
    if isinstance(f, Neg):
        return Box(Neg(godel(f.arg)))
    if isinstance(f, Forall):
        return Box(Forall(godel(f.arg)))
    if isinstance(f, Exists):
        return Exists(godel(f.arg))
    raise TypeError(f"{type(f).__name__} is not an intuitionistic connective")


def split(f: Formula) -> Formula:
    """Replace every box by its reflexive version: []g becomes g & []g.

    Diamonds become g | <>g, the dual; quantifiers are left alone.
    """
    if isinstance(f, (Var, Bot)):
        return f
    if isinstance(f, Box):
        g = split(f.arg)
        return And(g, Box(g))
    if isinstance(f, Dia):
        g = split(f.arg)
        return Or(g, Dia(g))
    if isinstance(f, (Neg, Forall, Exists)):
        return type(f)(split(f.arg))
    return type(f)(split(f.left), split(f.right))


def bbox(f: Formula) -> Formula:
    """The derived S4 box interpreted by Q: []A f."""
    return Box(Forall(f))


def bbox_plus(f: Formula) -> Formula:
    """Split form of ``bbox``: A f & []A f."""
    return And(Forall(f), Box(Forall(f)))


class Named(str, Enum):
    MCAS = "MCas"
    MBOXCAS = "MBoxCas"
    GRZ = "grz"
    GL = "gl"
    BRIDGE = "bridge"
    BARCAN_CONVERSE_ABSENT_NOTE = "barcan_converse_absent_note"


@dataclass(frozen=True)
class NamedFormula:
    id: Named
    formula: Formula
    modal: bool
    note: str = ""


_p = Var("p")

_LIBRARY = {
    Named.MCAS: NamedFormula(Named.MCAS, parse_int("A((p -> A p) -> A p) -> A p"), False),
    Named.MBOXCAS: NamedFormula(
        Named.MBOXCAS,
        Imp(bbox(Imp(Box(Imp(Box(_p), bbox(_p))), bbox(_p))), bbox(_p)),
        True,
    ),
    Named.GRZ: NamedFormula(Named.GRZ, parse_mod("[]([](p -> []p) -> p) -> p"), True),
    Named.GL: NamedFormula(Named.GL, parse_mod("[]([]p -> p) -> []p"), True),
    Named.BRIDGE: NamedFormula(Named.BRIDGE, parse_mod("[]A p -> A[]p"), True),
    Named.BARCAN_CONVERSE_ABSENT_NOTE: NamedFormula(
        Named.BARCAN_CONVERSE_ABSENT_NOTE,
        parse_mod("A[]p -> []A p"),
        True,
        note="the converse of the bridge axiom; not valid on augmented frames in general",
    ),
}

NAMES = tuple(n.value for n in Named)


def named(id: "str | Named") -> NamedFormula:
    try:
        key = Named(id)
    except ValueError:
        raise KeyError(f"unknown named formula {id!r}; known: {', '.join(NAMES)}") from None
    return _LIBRARY[key]


__all__ = ["godel", "split", "bbox", "bbox_plus", "named", "Named", "NamedFormula", "NAMES", "BOT"]

"""Formula ASTs for the intuitionistic monadic language and the bimodal language.

Both languages share one family of immutable node classes.  ``Box`` and ``Dia``
only occur in modal formulas; every other constructor is common to both.

Concrete syntax (ASCII)::

    atom     identifier [a-z][a-zA-Z0-9_]*, "false", "true"
    prefix   "~"  "[]"  "<>"  "A"  "E"        (tightest)
    binary   "&" (left)  >  "|" (left)  >  "->" (right)
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Union


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def children(self) -> tuple["Formula", ...]:
        return ()

    def __str__(self) -> str:
        return to_text(self)


@dataclass(frozen=True, repr=False)
class Var(Formula):
    name: str

    def __repr__(self) -> str:
        return f"Var({self.name!r})"


@dataclass(frozen=True, repr=False)
class Bot(Formula):
    def __repr__(self) -> str:
        return "Bot()"


@dataclass(frozen=True)
class _Unary(Formula):
    arg: Formula

    def children(self) -> tuple[Formula, ...]:
        return (self.arg,)


@dataclass(frozen=True)
class _Binary(Formula):
    left: Formula
    right: Formula

    def children(self) -> tuple[Formula, ...]:
        return (self.left, self.right)


class Neg(_Unary):
    pass


class Box(_Unary):
    pass


class Dia(_Unary):
    pass


class Forall(_Unary):
    pass


class Exists(_Unary):
    pass


class And(_Binary):
    pass


class Or(_Binary):
    pass


class Imp(_Binary):
    pass


BOT = Bot()
MODAL_ONLY = (Box, Dia)


def is_modal(f: Formula) -> bool:
    """True when ``f`` uses a relational modality and so is not intuitionistic."""
    return any(isinstance(g, MODAL_ONLY) for g in walk(f))


def walk(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal of every node (with repetitions)."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(g.children()))


def size(f: Formula) -> int:
    return sum(1 for _ in walk(f))


def variables(f: Formula) -> list[str]:
    """Variable names of ``f`` in order of first occurrence."""
    seen: dict[str, None] = {}
    for g in walk(f):
        if isinstance(g, Var):
            seen.setdefault(g.name, None)
    return list(seen)


def subformulas(f: Formula) -> list[Formula]:
    """Syntactically distinct subtrees of ``f``, ``f`` last.

    Post-order, left to right, first occurrence wins; children always precede
    their parents, so the list doubles as an evaluation schedule.
    """
    seen: dict[Formula, None] = {}

    def visit(g: Formula) -> None:
        if g in seen:
            return
        for c in g.children():
            visit(c)
        seen[g] = None

    visit(f)
    return list(seen)


def rename(f: Formula, mapping: dict[str, str]) -> Formula:
    if isinstance(f, Var):
        return Var(mapping.get(f.name, f.name))
    if isinstance(f, Bot):
        return f
    if isinstance(f, _Unary):
        return type(f)(rename(f.arg, mapping))
    return type(f)(rename(f.left, mapping), rename(f.right, mapping))


# --------------------------------------------------------------------------
# Lexing and parsing

class ParseError(ValueError):
    """Malformed formula text.  ``pos`` is a 0-based character offset."""

    def __init__(self, message: str, pos: int, expected: tuple[str, ...] = ()):
        detail = f"{message} at position {pos}"
        if expected:
            detail += f" (expected {', '.join(expected)})"
        super().__init__(detail)
        self.pos = pos
        self.expected = expected


class LexError(ParseError):
    pass


KEYWORDS = frozenset({"false", "true"})
_IDENT = re.compile(r"[a-z][a-zA-Z0-9_]*")
_SYMBOLS = ("->", "[]", "<>", "~", "&", "|", "(", ")")
PREFIX_OPS = {"~": Neg, "[]": Box, "<>": Dia, "A": Forall, "E": Exists}
_ATOM_START = ("identifier", "false", "true", "(", "~", "[]", "<>", "A", "E")


@dataclass(frozen=True)
class Token:
    kind: str  # "ident", "false", "true", an operator symbol, or "eof"
    text: str
    pos: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        m = _IDENT.match(text, i)
        if m:
            word = m.group()
            kind = word if word in KEYWORDS else "ident"
            tokens.append(Token(kind, word, i))
            i = m.end()
            continue
        if c in "AE":
            tokens.append(Token(c, c, i))
            i += 1
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(Token(sym, sym, i))
                i += len(sym)
                break
        else:
            raise LexError(f"unexpected character {c!r}", i)
    tokens.append(Token("eof", "", n))
    return tokens


# binding power and associativity of the binary connectives
_BINARY = {"&": (3, And, "left"), "|": (2, Or, "left"), "->": (1, Imp, "right")}


class _Parser:
    def __init__(self, text: str, modal: bool):
        self.tokens = tokenize(text)
        self.i = 0
        self.modal = modal

    def peek(self) -> Token:
        return self.tokens[self.i]

    def take(self) -> Token:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expected_atoms(self) -> tuple[str, ...]:
        if self.modal:
            return _ATOM_START
        return tuple(t for t in _ATOM_START if t not in ("[]", "<>"))

    def parse(self) -> Formula:
        f = self.expr(0)
        tok = self.peek()
        if tok.kind != "eof":
            raise ParseError(f"unexpected {tok.text!r}", tok.pos, ("&", "|", "->", "end of input"))
        return f

    def expr(self, min_bp: int) -> Formula:
        lhs = self.prefix()
        while True:
            tok = self.peek()
            if tok.kind not in _BINARY:
                return lhs
            bp, cls, assoc = _BINARY[tok.kind]
            if bp < min_bp:
                return lhs
            self.take()
            rhs = self.expr(bp + 1 if assoc == "left" else bp)
            lhs = cls(lhs, rhs)

    def prefix(self) -> Formula:
        tok = self.take()
        if tok.kind in PREFIX_OPS:
            if not self.modal and tok.kind in ("[]", "<>"):
                raise ParseError(
                    f"modal operator {tok.text!r} in intuitionistic formula",
                    tok.pos,
                    self.expected_atoms(),
                )
            return PREFIX_OPS[tok.kind](self.prefix())
        if tok.kind == "ident":
            return Var(tok.text)
        if tok.kind == "false":
            return BOT
        if tok.kind == "true":
            return Neg(BOT) if self.modal else Imp(BOT, BOT)
        if tok.kind == "(":
            f = self.expr(0)
            close = self.take()
            if close.kind != ")":
                raise ParseError(f"unexpected {close.text or 'end of input'!r}", close.pos, (")",))
            return f
        what = "end of input" if tok.kind == "eof" else repr(tok.text)
        raise ParseError(f"unexpected {what}", tok.pos, self.expected_atoms())


def parse_int(text: str) -> Formula:
    """Parse a formula of the intuitionistic monadic language."""
    return _Parser(text, modal=False).parse()


def parse_mod(text: str) -> Formula:
    """Parse a formula of the bimodal language."""
    return _Parser(text, modal=True).parse()


# --------------------------------------------------------------------------
# Printing

_PREFIX_TEXT = {Neg: "~", Box: "[]", Dia: "<>", Forall: "A ", Exists: "E "}
_BIN_TEXT = {And: " & ", Or: " | ", Imp: " -> "}
_PREC = {Imp: 1, Or: 2, And: 3}


def to_text(f: Formula) -> str:
    """ASCII rendering with the fewest parentheses that still round-trip."""
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Bot):
        return "false"
    if isinstance(f, _Unary):
        inner = to_text(f.arg)
        if isinstance(f.arg, _Binary):
            inner = f"({inner})"
        return _PREFIX_TEXT[type(f)] + inner
    prec = _PREC[type(f)]
    left, right = to_text(f.left), to_text(f.right)
    if isinstance(f.left, _Binary):
        lp = _PREC[type(f.left)]
        if lp < prec or (lp == prec and isinstance(f, Imp)):
            left = f"({left})"
    if isinstance(f.right, _Binary):
        rp = _PREC[type(f.right)]
        if rp < prec or (rp == prec and not isinstance(f, Imp)):
            right = f"({right})"
    return left + _BIN_TEXT[type(f)] + right


# --------------------------------------------------------------------------
# Bound profiles

class Logic(str, Enum):
    MIPC = "MIPC"
    MS4 = "MS4"
    MGRZ = "MGrz"
    MGL = "MGL"
    M_PLUS_IPC = "M+IPC"
    M_PLUS_GRZ = "M+Grz"

    @property
    def intuitionistic(self) -> bool:
        return self in (Logic.MIPC, Logic.M_PLUS_IPC)

    @property
    def frame_class(self) -> str:
        return _FRAME_CLASS[self]

    @classmethod
    def parse(cls, text: "str | Logic") -> "Logic":
        if isinstance(text, Logic):
            return text
        key = text.lower().replace("_", "").replace("-", "").replace("plus", "+")
        for logic in cls:
            if logic.value.lower() == key:
                return logic
        raise ValueError(f"unknown logic {text!r}; choose from {', '.join(l.value for l in cls)}")


_FRAME_CLASS = {
    Logic.MIPC: "mipc",
    Logic.MS4: "ms4",
    Logic.MGRZ: "mgrz",
    Logic.MGL: "mgl",
    Logic.M_PLUS_IPC: "m_plus_ipc",
    Logic.M_PLUS_GRZ: "m_plus_grz",
}

LogicId = Union[str, Logic]

# world caps wider than this many bits are reported as overflow
WORLD_CAP_BITS = 256


class LanguageError(ValueError):
    pass


@dataclass(frozen=True)
class BoundProfile:
    """Subformula counts of a formula and the finite-model search caps they imply.

    Caps are ``None`` for logics without a size bound for countermodels
    (MIPC, MS4, MGrz, MGL); for those, searches are only semi-decisions.
    """

    logic: Logic
    n: int
    m1: int
    m2: int
    m3: int
    m: int
    cluster_cap: int | None
    branch_cap: int | None
    depth_cap: int | None
    world_cap: int | None = None
    note: str = field(default="", compare=False)

    def as_dict(self) -> dict:
        return {
            "logic": self.logic.value,
            "n": self.n,
            "m1": self.m1,
            "m2": self.m2,
            "m3": self.m3,
            "m": self.m,
            "cluster_cap": self.cluster_cap,
            "branch_cap": self.branch_cap,
            "depth_cap": self.depth_cap,
            "world_cap": self.world_cap,
            "note": self.note,
        }


def world_cap(cluster_cap: int, branch_cap: int, depth_cap: int) -> int | None:
    """cluster_cap * sum(branch_cap**level for level in 0..depth_cap), or None on overflow."""
    if branch_cap <= 1:
        levels = depth_cap + 1 if branch_cap == 1 else 1
        return cluster_cap * levels
    if (depth_cap + 1) * branch_cap.bit_length() + cluster_cap.bit_length() > WORLD_CAP_BITS:
        return None
    return cluster_cap * (branch_cap ** (depth_cap + 1) - 1) // (branch_cap - 1)


def bound_profile(f: Formula, logic: LogicId) -> BoundProfile:
    logic = Logic.parse(logic)
    if logic.intuitionistic and is_modal(f):
        raise LanguageError(f"{logic.value} expects an intuitionistic formula, got a modal one")
    subs = subformulas(f)
    n = len(subs)
    m1 = sum(isinstance(g, Exists) for g in subs)
    m2 = sum(isinstance(g, Forall) for g in subs)
    # ~g needs a successor witness just like g -> false, and <>g like []~g
    m3 = sum(isinstance(g, (Imp, Neg)) for g in subs)
    m = sum(isinstance(g, (Box, Dia)) for g in subs)
    caps: tuple[int | None, int | None, int | None] = (None, None, None)
    note = ""
    if logic is Logic.M_PLUS_IPC:
        c = 1 + m1 + m2
        caps = (c, c * m3 + m2, c * (m2 + m3))
    elif logic is Logic.M_PLUS_GRZ:
        caps = (2**n, 2**n * m, 2**n * m + 1)
    else:
        note = f"no countermodel size bound is available for {logic.value}; search is a semi-decision"
    wcap = None
    if caps[0] is not None:
        wcap = world_cap(*caps)
        if wcap is None:
            note = f"world cap exceeds 2^{WORLD_CAP_BITS}; complete search is out of reach"
    return BoundProfile(logic, n, m1, m2, m3, m, *caps, world_cap=wcap, note=note)


# --------------------------------------------------------------------------
# Random formulas (for property tests and status-agreement runs)

_INT_UNARY = (Neg, Forall, Exists)
_MOD_UNARY = (Neg, Box, Dia, Forall, Exists)
_BINARIES = (And, Or, Imp)


def random_formula(
    rng: random.Random,
    depth: int,
    names: tuple[str, ...] = ("p", "q"),
    modal: bool = False,
) -> Formula:
    """A random formula of nesting depth at most ``depth``."""
    if depth <= 0 or rng.random() < 0.2:
        return BOT if rng.random() < 0.1 else Var(rng.choice(names))
    unary = _MOD_UNARY if modal else _INT_UNARY
    if rng.random() < 0.5:
        return rng.choice(unary)(random_formula(rng, depth - 1, names, modal))
    cls = rng.choice(_BINARIES)
    return cls(
        random_formula(rng, depth - 1, names, modal),
        random_formula(rng, depth - 1, names, modal),
    )

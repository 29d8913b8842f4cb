"""Finite augmented Kripke frames (W, R, E).

E is stored as a partition, so it is an equivalence relation by construction.
Internally every frame keeps one bitmask per world for its R-successors and
for its E-block; bit ``i`` stands for ``worlds[i]``.
"""

from __future__ import annotations

import itertools
import json
import os
import random
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator

from . import kernels

DEFAULT_MAX_STATES = 1 << 26
MAX_ENUM_WORLDS = 8


class CapExceeded(RuntimeError):
    """A combinatorial guard tripped before any work was done."""

    def __init__(self, message: str, estimate: int, limit: int, frontier: int | None = None):
        super().__init__(f"{message}: {estimate} states > limit {limit}")
        self.estimate = estimate
        self.limit = limit
        self.frontier = frontier


def max_states() -> int:
    """Global guard on enumeration work; WORKBENCH_MAX_STATES overrides it."""
    raw = os.environ.get("WORKBENCH_MAX_STATES")
    if raw:
        return int(raw)
    return DEFAULT_MAX_STATES


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class AugmentedFrame:
    """An immutable finite frame.  Compare frames with ``==`` (same ids) or
    :func:`isomorphic` (structure only)."""

    def __init__(self, worlds: Iterable[str], R: Iterable[tuple[str, str]], E: Iterable[Iterable[str]]):
        worlds = tuple(worlds)
        if not worlds:
            raise ValueError("a frame needs at least one world")
        index = {w: i for i, w in enumerate(worlds)}
        if len(index) != len(worlds):
            raise ValueError("duplicate world ids")
        succ = [0] * len(worlds)
        for a, b in R:
            if a not in index or b not in index:
                raise ValueError(f"R mentions unknown world in pair ({a!r}, {b!r})")
            succ[index[a]] |= 1 << index[b]
        blk = [0] * len(worlds)
        covered = 0
        for block in E:
            mask = 0
            for w in block:
                if w not in index:
                    raise ValueError(f"E block mentions unknown world {w!r}")
                bit = 1 << index[w]
                if mask & bit:
                    raise ValueError(f"world {w!r} repeated in an E block")
                mask |= bit
            if not mask:
                raise ValueError("E blocks must be nonempty")
            if covered & mask:
                raise ValueError("E blocks overlap")
            covered |= mask
            for i in _bits(mask):
                blk[i] = mask
        if covered != (1 << len(worlds)) - 1:
            missing = [w for i, w in enumerate(worlds) if not covered >> i & 1]
            raise ValueError(f"E blocks do not cover worlds {missing}")
        self._init(worlds, tuple(succ), tuple(blk))

    def _init(self, worlds, succ, blk):
        self.worlds = worlds
        self.succ = succ
        self.blk = blk

    @classmethod
    def from_masks(cls, worlds: tuple[str, ...], succ: tuple[int, ...], blk: tuple[int, ...]) -> "AugmentedFrame":
        """Trusted constructor; ``blk`` must already describe a partition."""
        self = cls.__new__(cls)
        self._init(tuple(worlds), tuple(succ), tuple(blk))
        return self

    # -- views -------------------------------------------------------------

    @property
    def size(self) -> int:
        return len(self.worlds)

    @cached_property
    def index(self) -> dict[str, int]:
        return {w: i for i, w in enumerate(self.worlds)}

    @cached_property
    def R(self) -> frozenset[tuple[str, str]]:
        return frozenset(
            (self.worlds[i], self.worlds[j]) for i in range(self.size) for j in _bits(self.succ[i])
        )

    @cached_property
    def E(self) -> tuple[frozenset[str], ...]:
        """Blocks ordered by their first world."""
        seen = []
        for i in range(self.size):
            if self.blk[i] not in seen:
                seen.append(self.blk[i])
        return tuple(self.to_set(m) for m in seen)

    @cached_property
    def qrel(self) -> tuple[int, ...]:
        out = []
        for i in range(self.size):
            q = 0
            for j in _bits(self.succ[i]):
                q |= self.blk[j]
            out.append(q)
        return tuple(out)

    @property
    def full(self) -> int:
        return (1 << self.size) - 1

    def to_mask(self, ws: Iterable[str]) -> int:
        mask = 0
        for w in ws:
            try:
                mask |= 1 << self.index[w]
            except KeyError:
                raise ValueError(f"unknown world {w!r}") from None
        return mask

    def to_set(self, mask: int) -> frozenset[str]:
        return frozenset(self.worlds[i] for i in _bits(mask))

    def ordered(self, ws: Iterable[str]) -> list[str]:
        """World ids in frame order."""
        ws = set(ws)
        return [w for w in self.worlds if w in ws]

    def block_of(self, w: str) -> frozenset[str]:
        return self.to_set(self.blk[self.index[w]])

    def successors(self, w: str) -> frozenset[str]:
        return self.to_set(self.succ[self.index[w]])

    # -- identity ----------------------------------------------------------

    def _key(self):
        return (self.worlds, self.succ, self.blk)

    def __eq__(self, other):
        if not isinstance(other, AugmentedFrame):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        pairs = sorted(self.R, key=lambda p: (self.index[p[0]], self.index[p[1]]))
        blocks = [self.ordered(b) for b in self.E]
        return f"AugmentedFrame(worlds={list(self.worlds)}, R={pairs}, E={blocks})"


# --------------------------------------------------------------------------
# Relation algebra

def q_relation(F: AugmentedFrame) -> frozenset[tuple[str, str]]:
    """x Q y iff x R z and z E y for some z."""
    return frozenset(
        (F.worlds[i], F.worlds[j]) for i in range(F.size) for j in _bits(F.qrel[i])
    )


def r_max(F: AugmentedFrame, A: Iterable[str]) -> frozenset[str]:
    a = F.to_mask(A)
    return F.to_set(sum(1 << i for i in _bits(a) if F.succ[i] & a & ~(1 << i) == 0))


def q_max(F: AugmentedFrame, A: Iterable[str]) -> frozenset[str]:
    a = F.to_mask(A)
    keep = 0
    for i in _bits(a):
        if all(F.succ[j] >> i & 1 for j in _bits(F.succ[i] & a)):
            keep |= 1 << i
    return F.to_set(keep)


def irr_max(F: AugmentedFrame, A: Iterable[str]) -> frozenset[str]:
    a = F.to_mask(A)
    return F.to_set(sum(1 << i for i in _bits(a) if F.succ[i] & a == 0))


# --------------------------------------------------------------------------
# Classification

def is_reflexive(F: AugmentedFrame) -> bool:
    return all(F.succ[i] >> i & 1 for i in range(F.size))


def is_irreflexive(F: AugmentedFrame) -> bool:
    return not any(F.succ[i] >> i & 1 for i in range(F.size))


def is_transitive(F: AugmentedFrame) -> bool:
    return all(F.succ[j] & ~F.succ[i] == 0 for i in range(F.size) for j in _bits(F.succ[i]))


def is_antisymmetric(F: AugmentedFrame) -> bool:
    return not any(
        j != i and F.succ[j] >> i & 1 for i in range(F.size) for j in _bits(F.succ[i])
    )


def is_commutative(F: AugmentedFrame) -> bool:
    return bool(kernels.commutes(F.succ, F.blk))


def clean_clusters(F: AugmentedFrame) -> tuple[bool, list[frozenset[str]]]:
    """Whether every E-block is clean, and the dirty blocks in frame order.

    A block is dirty when two distinct members are R-related.
    """
    dirty = []
    for block in F.E:
        mask = F.to_mask(block)
        if any(F.succ[i] & mask & ~(1 << i) for i in _bits(mask)):
            dirty.append(block)
    return not dirty, dirty


@dataclass(frozen=True)
class FrameClassReport:
    e_equivalence: bool
    commutative: bool
    r_preorder: bool
    r_partial_order: bool
    r_strict_partial_order: bool
    clean_clusters: bool
    mipc: bool
    ms4: bool
    mgrz_finite: bool
    mgl_finite: bool
    m_plus_ipc: bool
    m_plus_grz: bool
    dirty_blocks: tuple[tuple[str, ...], ...] = field(default=())

    def member(self, class_id: str) -> bool:
        return _CLASS_TEST[check_class_id(class_id)](self)

    def as_dict(self) -> dict:
        out = {k: getattr(self, k) for k in self.__dataclass_fields__ if k != "dirty_blocks"}
        out["dirty_blocks"] = [list(b) for b in self.dirty_blocks]
        return out


def classify(F: AugmentedFrame) -> FrameClassReport:
    refl, irrefl = is_reflexive(F), is_irreflexive(F)
    trans, anti = is_transitive(F), is_antisymmetric(F)
    comm = is_commutative(F)
    is_clean, dirty = clean_clusters(F)
    preorder = refl and trans
    partial = preorder and anti
    strict = irrefl and trans
    return FrameClassReport(
        e_equivalence=True,
        commutative=comm,
        r_preorder=preorder,
        r_partial_order=partial,
        r_strict_partial_order=strict,
        clean_clusters=is_clean,
        mipc=partial and comm,
        ms4=preorder and comm,
        mgrz_finite=partial and comm,
        mgl_finite=strict and comm and is_clean,
        m_plus_ipc=partial and comm and is_clean,
        m_plus_grz=partial and comm and is_clean,
        dirty_blocks=tuple(tuple(F.ordered(b)) for b in dirty),
    )


_CLASS_TEST = {
    "any": lambda r: True,
    "augmented": lambda r: r.commutative,
    "ms4": lambda r: r.ms4,
    "mipc": lambda r: r.mipc,
    "mgrz": lambda r: r.mgrz_finite,
    "mgl": lambda r: r.mgl_finite,
    "m_plus_ipc": lambda r: r.m_plus_ipc,
    "m_plus_grz": lambda r: r.m_plus_grz,
}
CLASS_IDS = tuple(_CLASS_TEST)

# relation shape, commutativity, clean clusters
_CLASS_FILTER = {
    "any": (kernels.R_ANY, False, False),
    "augmented": (kernels.R_ANY, True, False),
    "ms4": (kernels.R_PREORDER, True, False),
    "mipc": (kernels.R_PARTIAL, True, False),
    "mgrz": (kernels.R_PARTIAL, True, False),
    "mgl": (kernels.R_STRICT, True, True),
    "m_plus_ipc": (kernels.R_PARTIAL, True, True),
    "m_plus_grz": (kernels.R_PARTIAL, True, True),
}


def check_class_id(class_id: str) -> str:
    key = class_id.lower().replace("-", "_").replace("+", "_plus_").replace("__", "_").strip("_")
    key = {"mgrz_finite": "mgrz", "mgl_finite": "mgl", "mplus_ipc": "m_plus_ipc", "mplus_grz": "m_plus_grz"}.get(key, key)
    if key not in _CLASS_TEST:
        raise ValueError(f"unknown frame class {class_id!r}; choose from {', '.join(CLASS_IDS)}")
    return key


def in_class(F: AugmentedFrame, class_id: str) -> bool:
    return classify(F).member(class_id)


# --------------------------------------------------------------------------
# Transformations

def skeleton(F: AugmentedFrame) -> tuple[AugmentedFrame, dict[str, str]]:
    """Quotient of an MS4 frame by mutual R-accessibility.

    Each class is named after its first member in frame order.  Classes are
    R-related when their members are, and E-related when their members are
    Q-related in both directions.  Returns the quotient and the world-to-class map.
    """
    if not classify(F).ms4:
        raise ValueError("skeleton requires an MS4 frame (preorder R, commutative)")
    k = F.size
    rep = []
    for i in range(k):
        rep.append(next(j for j in range(k) if F.succ[i] >> j & 1 and F.succ[j] >> i & 1))
    reps = sorted(set(rep))
    pos = {r: n for n, r in enumerate(reps)}
    succ = []
    for r in reps:
        mask = 0
        for j in _bits(F.succ[r]):
            mask |= 1 << pos[rep[j]]
        succ.append(mask)
    blk = []
    for r in reps:
        mask = 0
        for s in reps:
            if F.qrel[r] >> s & 1 and F.qrel[s] >> r & 1:
                mask |= 1 << pos[s]
        blk.append(mask)
    quotient = AugmentedFrame.from_masks(tuple(F.worlds[r] for r in reps), tuple(succ), tuple(blk))
    return quotient, {F.worlds[i]: F.worlds[rep[i]] for i in range(k)}


def irreflexive_reduction(F: AugmentedFrame) -> AugmentedFrame:
    succ = tuple(s & ~(1 << i) for i, s in enumerate(F.succ))
    return AugmentedFrame.from_masks(F.worlds, succ, F.blk)


def reflexive_closure(F: AugmentedFrame) -> AugmentedFrame:
    succ = tuple(s | (1 << i) for i, s in enumerate(F.succ))
    return AugmentedFrame.from_masks(F.worlds, succ, F.blk)


# --------------------------------------------------------------------------
# Canonical forms

def _encode(F: AugmentedFrame, perm: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    """Relation code and restricted-growth partition string with world
    ``perm[n]`` placed at position ``n``."""
    k = F.size
    where = [0] * k
    for n, i in enumerate(perm):
        where[i] = n
    code = 0
    for i in range(k):
        for j in _bits(F.succ[i]):
            code |= 1 << (where[i] * k + where[j])
    labels: dict[int, int] = {}
    rgs = []
    for i in perm:
        rgs.append(labels.setdefault(F.blk[i], len(labels)))
    return code, tuple(rgs)


def encoding(F: AugmentedFrame) -> tuple[int, tuple[int, ...]]:
    return _encode(F, tuple(range(F.size)))


def canonical_form(F: AugmentedFrame) -> tuple[int, int, tuple[int, ...]]:
    """Lexicographically least encoding over all world permutations."""
    best = min(_encode(F, p) for p in itertools.permutations(range(F.size)))
    return (F.size, *best)


def isomorphic(F: AugmentedFrame, G: AugmentedFrame) -> bool:
    return F.size == G.size and canonical_form(F) == canonical_form(G)


# --------------------------------------------------------------------------
# Enumeration

def partitions(k: int) -> list[tuple[int, ...]]:
    """All partitions of range(k) as block-mask-per-element tuples, in
    lexicographic order of their restricted growth strings."""
    out = []

    def grow(prefix: list[int], top: int) -> None:
        if len(prefix) == k:
            masks = {}
            for i, b in enumerate(prefix):
                masks[b] = masks.get(b, 0) | 1 << i
            out.append(tuple(masks[b] for b in prefix))
            return
        for b in range(top + 2):
            grow(prefix + [b], max(top, b))

    grow([], -1)
    return out


def _estimate(k: int, class_id: str) -> int:
    mode, comm, _ = _CLASS_FILTER[class_id]
    if mode == kernels.R_ANY:
        return (1 << (k * k)) * len(partitions(k))
    return 1 << (k * k - k)


def enumeration_estimate(max_worlds: int, class_id: str = "any") -> int:
    class_id = check_class_id(class_id)
    return sum(_estimate(k, class_id) for k in range(1, max_worlds + 1))


def world_ids(k: int) -> tuple[str, ...]:
    return tuple(f"w{i}" for i in range(k))


def enumerate_frames(
    max_worlds: int,
    class_filter: str = "any",
    dedup: bool = False,
    limit: int | None = None,
) -> Iterator[AugmentedFrame]:
    """Every labeled frame on w0..w{k-1}, k <= max_worlds, in the class.

    Order: world count, then relation code, then partition.  With ``dedup``
    only the frame carrying the canonical encoding of its isomorphism class
    is emitted.
    """
    if max_worlds < 1:
        raise ValueError("max_worlds must be at least 1")
    class_id = check_class_id(class_filter)
    if max_worlds > MAX_ENUM_WORLDS:
        raise CapExceeded("enumeration world count", max_worlds, MAX_ENUM_WORLDS)
    limit = max_states() if limit is None else limit
    estimate = enumeration_estimate(max_worlds, class_id)
    if estimate > limit:
        frontier = max((k for k in range(1, max_worlds + 1) if enumeration_estimate(k, class_id) <= limit), default=0)
        raise CapExceeded(f"enumerating {class_id} frames up to {max_worlds} worlds", estimate, limit, frontier)
    mode, comm, need_clean = _CLASS_FILTER[class_id]
    for k in range(1, max_worlds + 1):
        parts = partitions(k)
        names = world_ids(k)
        mask = (1 << k) - 1
        for code, pi in kernels.enumerate_codes(k, mode, comm, need_clean, parts):
            succ = tuple((code >> (i * k)) & mask for i in range(k))
            F = AugmentedFrame.from_masks(names, succ, parts[pi])
            if dedup and canonical_form(F)[1:] != encoding(F):
                continue
            yield F


def count_frames(max_worlds: int, class_filter: str = "any", dedup: bool = False) -> int:
    return sum(1 for _ in enumerate_frames(max_worlds, class_filter, dedup))


# --------------------------------------------------------------------------
# Random frames

def _closure(succ: list[int]) -> list[int]:
    k = len(succ)
    out = list(succ)
    changed = True
    while changed:
        changed = False
        for i in range(k):
            acc = out[i]
            for j in _bits(out[i]):
                acc |= out[j]
            if acc != out[i]:
                out[i] = acc
                changed = True
    return out


def _repair_commutativity(succ: list[int], blk: list[int], reflexive: bool) -> list[int]:
    """Add x R z whenever x E y, y R z and no R-successor of x sits in E(z)."""
    k = len(succ)
    succ = list(succ)
    for _ in range(k * k + 1):
        if kernels.commutes(succ, blk):
            return succ
        for x in range(k):
            for y in _bits(blk[x]):
                for z in _bits(succ[y]):
                    if succ[x] & blk[z] == 0:
                        succ[x] |= 1 << z
        succ = _closure(succ)
        if reflexive:
            succ = [s | 1 << i for i, s in enumerate(succ)]
    return succ


def random_frame(seed: int, max_worlds: int, class_id: str = "mipc", retries: int = 1000) -> AugmentedFrame:
    """A reproducible random frame of the class with at most ``max_worlds`` worlds."""
    class_id = check_class_id(class_id)
    mode, comm, need_clean = _CLASS_FILTER[class_id]
    rng = random.Random(seed)
    for _ in range(retries):
        k = rng.randint(1, max_worlds)
        density = rng.choice((0.2, 0.4, 0.6))
        if mode in (kernels.R_PARTIAL, kernels.R_STRICT):
            order = list(range(k))
            rng.shuffle(order)
            succ = [0] * k
            for a in range(k):
                for b in range(a + 1, k):
                    if rng.random() < density:
                        succ[order[a]] |= 1 << order[b]
            succ = _closure(succ)
        else:
            succ = [sum(1 << j for j in range(k) if rng.random() < density) for _ in range(k)]
            if mode == kernels.R_PREORDER:
                succ = _closure(succ)
        reflexive = mode in (kernels.R_PREORDER, kernels.R_PARTIAL)
        if reflexive:
            succ = [s | 1 << i for i, s in enumerate(succ)]
        label = list(range(k))
        for _ in range(rng.randint(0, k - 1) if k > 1 else 0):
            a, b = rng.sample(range(k), 2)
            old, new = label[a], label[b]
            label = [new if x == old else x for x in label]
        blk = [sum(1 << j for j in range(k) if label[j] == label[i]) for i in range(k)]
        if comm:
            succ = _repair_commutativity(succ, blk, reflexive)
        F = AugmentedFrame.from_masks(world_ids(k), tuple(succ), tuple(blk))
        if in_class(F, class_id):
            return F
    raise RuntimeError(f"no {class_id} frame generated after {retries} attempts (seed {seed})")


# --------------------------------------------------------------------------
# Interchange formats

def frame_to_json(F: AugmentedFrame) -> dict:
    return {
        "worlds": sorted(F.worlds),
        "R": [list(p) for p in sorted(F.R)],
        "E": sorted((sorted(b) for b in F.E), key=lambda b: b[0]),
    }


def frame_from_json(data: dict) -> AugmentedFrame:
    try:
        worlds = data["worlds"]
        pairs = data["R"]
        blocks = data["E"]
    except (KeyError, TypeError):
        raise ValueError('frame JSON needs "worlds", "R" and "E"') from None
    if not all(isinstance(w, str) for w in worlds):
        raise ValueError("world ids must be strings")
    for p in pairs:
        if not (isinstance(p, (list, tuple)) and len(p) == 2):
            raise ValueError(f"R entries must be pairs, got {p!r}")
    return AugmentedFrame(worlds, [tuple(p) for p in pairs], blocks)


def read_frame(path: str | os.PathLike) -> AugmentedFrame:
    with open(path, encoding="utf-8") as fh:
        return frame_from_json(json.load(fh))


def write_frame(F: AugmentedFrame, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(frame_to_json(F), fh, indent=2)
        fh.write("\n")


def _dot_id(w: str) -> str:
    return json.dumps(w)


def to_dot(F: AugmentedFrame, name: str = "frame") -> str:
    """Graphviz source: R as solid edges, E-blocks as dashed clusters."""
    refl = is_reflexive(F)
    lines = [f"// augmented frame: {F.size} worlds, {len(F.E)} E-blocks"]
    if refl:
        lines.append("// R is reflexive; reflexive loops omitted")
    lines.append(f"digraph {_dot_id(name)} {{")
    lines.append("  node [shape=circle];")
    for n, block in enumerate(F.E):
        lines.append(f"  subgraph cluster_{n} {{")
        lines.append("    style=dashed;")
        lines.append('    label="E";')
        for w in F.ordered(block):
            lines.append(f"    {_dot_id(w)};")
        lines.append("  }")
    for i, w in enumerate(F.worlds):
        for j in _bits(F.succ[i]):
            if refl and i == j:
                continue
            lines.append(f"  {_dot_id(w)} -> {_dot_id(F.worlds[j])};")
    lines.append("}")
    return "\n".join(lines) + "\n"

"""Backend selection for the bitset kernels.

The compiled extension is used when it imports; set ``MONADIC_PURE_PYTHON=1``
to force the pure-Python implementation.  Frames wider than the compiled
kernel's word size always go through the Python path.
"""

import os

from . import _kernels_py
from ._kernels_py import (  # noqa: F401
    OP_ALL_E,
    OP_ALL_Q,
    OP_AND,
    OP_BOT,
    OP_BOX,
    OP_DIA,
    OP_EX_E,
    OP_IMP,
    OP_IMP_I,
    OP_NEG,
    OP_NEG_I,
    OP_OR,
    OP_VAR,
    R_ANY,
    R_PARTIAL,
    R_PREORDER,
    R_STRICT,
)

_compiled = None
if os.environ.get("MONADIC_PURE_PYTHON", "").lower() not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _compiled
    except ImportError:  # extension not built
        _compiled = None

BACKEND = _compiled.BACKEND if _compiled is not None else _kernels_py.BACKEND


def compiled_available() -> bool:
    return _compiled is not None


def _pick(k: int, limit: int = 64):
    if _compiled is not None and k <= limit:
        return _compiled
    return _kernels_py


def eval_program(ops, arg_a, arg_b, succ, blk, qrel, env):
    return _pick(len(succ)).eval_program(ops, arg_a, arg_b, succ, blk, qrel, env)


def first_refutation(ops, arg_a, arg_b, succ, blk, qrel, choices):
    return _pick(len(succ)).first_refutation(ops, arg_a, arg_b, succ, blk, qrel, choices)


def commutes(succ, blk):
    return _pick(len(succ)).commutes(succ, blk)


def clean(succ, blk):
    return _pick(len(succ)).clean(succ, blk)


def relation_ok(k, code, mode):
    return _pick(k, 8).relation_ok(k, code, mode)


def enumerate_codes(k, mode, need_comm, need_clean, partitions):
    return _pick(k, 8).enumerate_codes(k, mode, need_comm, need_clean, partitions)

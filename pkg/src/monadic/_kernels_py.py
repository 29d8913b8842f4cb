"""Pure-Python bitset kernels.

Worlds are indexed 0..k-1 and sets of worlds are int bitmasks.  A frame is
given by ``succ`` (R-successor mask per world) and ``blk`` (E-block mask per
world); ``qrel`` holds the Q-successor masks.

A compiled formula is three parallel sequences ``ops``, ``arg_a``, ``arg_b``;
instruction ``i`` refers to earlier instructions by index and the last
instruction is the root.
"""

from itertools import product

BACKEND = "python"

OP_VAR = 0
OP_BOT = 1
OP_AND = 2
OP_OR = 3
OP_IMP = 4      # classical
OP_NEG = 5      # classical
OP_BOX = 6
OP_DIA = 7
OP_ALL_E = 8
OP_EX_E = 9
OP_IMP_I = 10   # intuitionistic, via R
OP_NEG_I = 11   # intuitionistic, via R
OP_ALL_Q = 12   # intuitionistic universal, via Q

# relation-shape filters for frame enumeration
R_ANY = 0
R_PREORDER = 1
R_PARTIAL = 2
R_STRICT = 3


def eval_program(ops, arg_a, arg_b, succ, blk, qrel, env):
    """Truth set of every instruction of a compiled formula."""
    k = len(succ)
    full = (1 << k) - 1
    vals = [0] * len(ops)
    for i, op in enumerate(ops):
        a = arg_a[i]
        if op == OP_VAR:
            v = env[a]
        elif op == OP_BOT:
            v = 0
        elif op == OP_AND:
            v = vals[a] & vals[arg_b[i]]
        elif op == OP_OR:
            v = vals[a] | vals[arg_b[i]]
        elif op == OP_IMP:
            v = (full & ~vals[a]) | vals[arg_b[i]]
        elif op == OP_NEG:
            v = full & ~vals[a]
        else:
            s = vals[a]
            v = 0
            if op == OP_BOX:
                for x in range(k):
                    if succ[x] & ~s == 0:
                        v |= 1 << x
            elif op == OP_DIA:
                for x in range(k):
                    if succ[x] & s:
                        v |= 1 << x
            elif op == OP_ALL_E:
                for x in range(k):
                    if blk[x] & ~s == 0:
                        v |= 1 << x
            elif op == OP_EX_E:
                for x in range(k):
                    if blk[x] & s:
                        v |= 1 << x
            elif op == OP_IMP_I:
                bad = s & ~vals[arg_b[i]]
                for x in range(k):
                    if succ[x] & bad == 0:
                        v |= 1 << x
            elif op == OP_NEG_I:
                for x in range(k):
                    if succ[x] & s == 0:
                        v |= 1 << x
            elif op == OP_ALL_Q:
                for x in range(k):
                    if qrel[x] & ~s == 0:
                        v |= 1 << x
            else:
                raise ValueError(f"bad opcode {op}")
        vals[i] = v
    return vals


def first_refutation(ops, arg_a, arg_b, succ, blk, qrel, choices):
    """Search valuations in lexicographic order for one falsifying the root.

    ``choices[slot]`` lists the admissible truth sets of each variable.
    Returns ``(indices, world, examined)`` where ``indices`` picks one entry per
    slot, or ``(None, -1, examined)`` if the root holds everywhere.
    """
    k = len(succ)
    full = (1 << k) - 1
    examined = 0
    for idx in product(*(range(len(c)) for c in choices)):
        env = [choices[s][j] for s, j in enumerate(idx)]
        examined += 1
        root = eval_program(ops, arg_a, arg_b, succ, blk, qrel, env)[-1]
        miss = full & ~root
        if miss:
            return list(idx), (miss & -miss).bit_length() - 1, examined
    return None, -1, examined


def relation_ok(k, code, mode):
    """Check the R-shape filter on a relation given as a k*k bit code."""
    mask = (1 << k) - 1
    succ = [(code >> (i * k)) & mask for i in range(k)]
    for i in range(k):
        si = succ[i]
        diag = (si >> i) & 1
        if mode == R_STRICT and diag:
            return False
        if mode in (R_PREORDER, R_PARTIAL) and not diag:
            return False
        rest = si
        while rest:
            low = rest & -rest
            j = low.bit_length() - 1
            rest ^= low
            if succ[j] & ~si:
                return False
            if mode != R_PREORDER and j != i and (succ[j] >> i) & 1:
                return False
    return True


def commutes(succ, blk):
    """For all x E y and y R z some w has x R w and w E z."""
    k = len(succ)
    for x in range(k):
        sat = 0
        rest = succ[x]
        while rest:
            low = rest & -rest
            sat |= blk[low.bit_length() - 1]
            rest ^= low
        reach = 0
        rest = blk[x]
        while rest:
            low = rest & -rest
            reach |= succ[low.bit_length() - 1]
            rest ^= low
        if reach & ~sat:
            return False
    return True


def clean(succ, blk):
    for x in range(len(succ)):
        if succ[x] & blk[x] & ~(1 << x):
            return False
    return True


def enumerate_codes(k, mode, need_comm, need_clean, partitions):
    """All (relation code, partition index) pairs passing the filters.

    ``partitions`` is a list of block-mask-per-world tuples.  Relations are
    scanned in increasing code order; only codes consistent with the diagonal
    implied by ``mode`` are visited.
    """
    diag_bits = [i * k + i for i in range(k)]
    if mode in (R_PREORDER, R_PARTIAL):
        free = [b for b in range(k * k) if b not in diag_bits]
        base = sum(1 << b for b in diag_bits)
    elif mode == R_STRICT:
        free = [b for b in range(k * k) if b not in diag_bits]
        base = 0
    else:
        free = list(range(k * k))
        base = 0
    mask = (1 << k) - 1
    out = []
    for m in range(1 << len(free)):
        code = base
        j = 0
        while m:
            if m & 1:
                code |= 1 << free[j]
            m >>= 1
            j += 1
        if mode != R_ANY and not relation_ok(k, code, mode):
            continue
        succ = [(code >> (i * k)) & mask for i in range(k)]
        for pi, blk in enumerate(partitions):
            if need_comm and not commutes(succ, blk):
                continue
            if need_clean and not clean(succ, blk):
                continue
            out.append((code, pi))
    return out

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled bitset kernels; same contracts as ``_kernels_py``.

Frames are limited to 64 worlds (one machine word per world set) and
relation codes to 8 worlds; callers fall back to the Python kernels beyond.
"""

from libc.stdlib cimport malloc, free
from libc.stdint cimport uint64_t

BACKEND = "cython"
MAX_WORLDS = 64
MAX_CODE_WORLDS = 8

cdef enum:
    OP_VAR = 0
    OP_BOT = 1
    OP_AND = 2
    OP_OR = 3
    OP_IMP = 4
    OP_NEG = 5
    OP_BOX = 6
    OP_DIA = 7
    OP_ALL_E = 8
    OP_EX_E = 9
    OP_IMP_I = 10
    OP_NEG_I = 11
    OP_ALL_Q = 12

cdef enum:
    R_ANY = 0
    R_PREORDER = 1
    R_PARTIAL = 2
    R_STRICT = 3


cdef extern from *:
    int __builtin_ctzll(unsigned long long) nogil


cdef inline int _low_index(uint64_t x) noexcept nogil:
    return __builtin_ctzll(x)


cdef void _run(int n, int *ops, int *aa, int *bb, int k,
               uint64_t *succ, uint64_t *blk, uint64_t *qrel,
               uint64_t *env, uint64_t *vals) noexcept nogil:
    cdef uint64_t full = (<uint64_t>0xFFFFFFFFFFFFFFFF) if k == 64 else ((<uint64_t>1 << k) - 1)
    cdef int i, x, op
    cdef uint64_t v, s, bad
    for i in range(n):
        op = ops[i]
        if op == OP_VAR:
            v = env[aa[i]]
        elif op == OP_BOT:
            v = 0
        elif op == OP_AND:
            v = vals[aa[i]] & vals[bb[i]]
        elif op == OP_OR:
            v = vals[aa[i]] | vals[bb[i]]
        elif op == OP_IMP:
            v = (full & ~vals[aa[i]]) | vals[bb[i]]
        elif op == OP_NEG:
            v = full & ~vals[aa[i]]
        else:
            s = vals[aa[i]]
            v = 0
            if op == OP_BOX:
                for x in range(k):
                    if succ[x] & ~s == 0:
                        v |= (<uint64_t>1) << x
            elif op == OP_DIA:
                for x in range(k):
                    if succ[x] & s:
                        v |= (<uint64_t>1) << x
            elif op == OP_ALL_E:
                for x in range(k):
                    if blk[x] & ~s == 0:
                        v |= (<uint64_t>1) << x
            elif op == OP_EX_E:
                for x in range(k):
                    if blk[x] & s:
                        v |= (<uint64_t>1) << x
            elif op == OP_IMP_I:
                bad = s & ~vals[bb[i]]
                for x in range(k):
                    if succ[x] & bad == 0:
                        v |= (<uint64_t>1) << x
            elif op == OP_NEG_I:
                for x in range(k):
                    if succ[x] & s == 0:
                        v |= (<uint64_t>1) << x
            elif op == OP_ALL_Q:
                for x in range(k):
                    if qrel[x] & ~s == 0:
                        v |= (<uint64_t>1) << x
        vals[i] = v


cdef class _Program:
    cdef int n
    cdef int *ops
    cdef int *aa
    cdef int *bb
    cdef int k
    cdef uint64_t succ[64]
    cdef uint64_t blk[64]
    cdef uint64_t qrel[64]
    cdef uint64_t *vals

    def __cinit__(self, ops, arg_a, arg_b, succ, blk, qrel):
        cdef int i
        self.n = len(ops)
        self.k = len(succ)
        if self.k > MAX_WORLDS:
            raise ValueError("too many worlds for the compiled kernel")
        self.ops = <int *>malloc(self.n * sizeof(int))
        self.aa = <int *>malloc(self.n * sizeof(int))
        self.bb = <int *>malloc(self.n * sizeof(int))
        self.vals = <uint64_t *>malloc((self.n + 1) * sizeof(uint64_t))
        if not self.ops or not self.aa or not self.bb or not self.vals:
            raise MemoryError()
        for i in range(self.n):
            self.ops[i] = ops[i]
            self.aa[i] = arg_a[i]
            self.bb[i] = arg_b[i]
            if self.ops[i] < 0 or self.ops[i] > OP_ALL_Q:
                raise ValueError(f"bad opcode {ops[i]}")
        for i in range(self.k):
            self.succ[i] = succ[i]
            self.blk[i] = blk[i]
            self.qrel[i] = qrel[i]

    def __dealloc__(self):
        free(self.ops)
        free(self.aa)
        free(self.bb)
        free(self.vals)


def eval_program(ops, arg_a, arg_b, succ, blk, qrel, env):
    cdef _Program prog = _Program(ops, arg_a, arg_b, succ, blk, qrel)
    cdef int nenv = len(env)
    cdef uint64_t *cenv = <uint64_t *>malloc((nenv + 1) * sizeof(uint64_t))
    cdef int i
    if not cenv:
        raise MemoryError()
    try:
        for i in range(nenv):
            cenv[i] = env[i]
        _run(prog.n, prog.ops, prog.aa, prog.bb, prog.k,
             prog.succ, prog.blk, prog.qrel, cenv, prog.vals)
        return [prog.vals[i] for i in range(prog.n)]
    finally:
        free(cenv)


def first_refutation(ops, arg_a, arg_b, succ, blk, qrel, choices):
    cdef _Program prog = _Program(ops, arg_a, arg_b, succ, blk, qrel)
    cdef int nslots = len(choices)
    cdef int total = 0
    cdef int s, j, x
    cdef uint64_t full = (<uint64_t>0xFFFFFFFFFFFFFFFF) if prog.k == 64 else ((<uint64_t>1 << prog.k) - 1)
    cdef uint64_t miss = 0
    cdef long long examined = 0
    for s in range(nslots):
        if len(choices[s]) == 0:
            return None, -1, 0
        total += len(choices[s])
    cdef uint64_t *flat = <uint64_t *>malloc((total + 1) * sizeof(uint64_t))
    cdef int *start = <int *>malloc((nslots + 1) * sizeof(int))
    cdef int *count = <int *>malloc((nslots + 1) * sizeof(int))
    cdef int *idx = <int *>malloc((nslots + 1) * sizeof(int))
    cdef uint64_t *env = <uint64_t *>malloc((nslots + 1) * sizeof(uint64_t))
    if not flat or not start or not count or not idx or not env:
        free(flat); free(start); free(count); free(idx); free(env)
        raise MemoryError()
    try:
        j = 0
        for s in range(nslots):
            start[s] = j
            count[s] = len(choices[s])
            for c in choices[s]:
                flat[j] = c
                j += 1
            idx[s] = 0
            env[s] = flat[start[s]]
        with nogil:
            while True:
                examined += 1
                _run(prog.n, prog.ops, prog.aa, prog.bb, prog.k,
                     prog.succ, prog.blk, prog.qrel, env, prog.vals)
                miss = full & ~prog.vals[prog.n - 1]
                if miss:
                    break
                # odometer, last slot fastest
                s = nslots - 1
                while s >= 0:
                    idx[s] += 1
                    if idx[s] < count[s]:
                        env[s] = flat[start[s] + idx[s]]
                        break
                    idx[s] = 0
                    env[s] = flat[start[s]]
                    s -= 1
                if s < 0:
                    break
        if miss:
            return [idx[s] for s in range(nslots)], _low_index(miss), examined
        return None, -1, examined
    finally:
        free(flat); free(start); free(count); free(idx); free(env)


cdef bint _relation_ok(int k, uint64_t *succ, int mode) noexcept nogil:
    cdef int i, j
    cdef uint64_t si, rest, diag
    for i in range(k):
        si = succ[i]
        diag = (si >> i) & 1
        if mode == R_STRICT and diag:
            return False
        if (mode == R_PREORDER or mode == R_PARTIAL) and not diag:
            return False
        rest = si
        while rest:
            j = _low_index(rest)
            rest &= rest - 1
            if succ[j] & ~si:
                return False
            if mode != R_PREORDER and j != i and (succ[j] >> i) & 1:
                return False
    return True


cdef bint _commutes(int k, uint64_t *succ, uint64_t *blk) noexcept nogil:
    cdef int x
    cdef uint64_t sat, reach, rest
    for x in range(k):
        sat = 0
        rest = succ[x]
        while rest:
            sat |= blk[_low_index(rest)]
            rest &= rest - 1
        reach = 0
        rest = blk[x]
        while rest:
            reach |= succ[_low_index(rest)]
            rest &= rest - 1
        if reach & ~sat:
            return False
    return True


cdef bint _clean(int k, uint64_t *succ, uint64_t *blk) noexcept nogil:
    cdef int x
    for x in range(k):
        if succ[x] & blk[x] & ~((<uint64_t>1) << x):
            return False
    return True


def relation_ok(int k, code, int mode):
    cdef uint64_t succ[64]
    cdef int i
    cdef uint64_t c = code
    cdef uint64_t mask = ((<uint64_t>1) << k) - 1
    if k > MAX_CODE_WORLDS:
        raise ValueError("too many worlds for a relation code")
    for i in range(k):
        succ[i] = (c >> (i * k)) & mask
    return _relation_ok(k, succ, mode)


def commutes(succ, blk):
    cdef uint64_t cs[64]
    cdef uint64_t cb[64]
    cdef int k = len(succ), i
    if k > MAX_WORLDS:
        raise ValueError("too many worlds for the compiled kernel")
    for i in range(k):
        cs[i] = succ[i]
        cb[i] = blk[i]
    return _commutes(k, cs, cb)


def clean(succ, blk):
    cdef uint64_t cs[64]
    cdef uint64_t cb[64]
    cdef int k = len(succ), i
    if k > MAX_WORLDS:
        raise ValueError("too many worlds for the compiled kernel")
    for i in range(k):
        cs[i] = succ[i]
        cb[i] = blk[i]
    return _clean(k, cs, cb)


def enumerate_codes(int k, int mode, bint need_comm, bint need_clean, partitions):
    if k > MAX_CODE_WORLDS or k < 1:
        raise ValueError("relation codes support 1..8 worlds")
    cdef int nparts = len(partitions)
    cdef int nfree = 0
    cdef int free_bits[64]
    cdef int b, i, pi, j
    cdef uint64_t base = 0
    cdef uint64_t mask = ((<uint64_t>1) << k) - 1
    cdef uint64_t m, mm, code, limit
    cdef uint64_t succ[8]
    cdef uint64_t *blks = <uint64_t *>malloc((nparts * k + 1) * sizeof(uint64_t))
    if not blks:
        raise MemoryError()
    for pi in range(nparts):
        for i in range(k):
            blks[pi * k + i] = partitions[pi][i]
    for b in range(k * k):
        if b % (k + 1) == 0 and mode != R_ANY:
            if mode != R_STRICT:
                base |= (<uint64_t>1) << b
        else:
            free_bits[nfree] = b
            nfree += 1
    if nfree >= 63:
        free(blks)
        raise ValueError("relation space too large")
    limit = (<uint64_t>1) << nfree
    out = []
    try:
        m = 0
        while m < limit:
            code = base
            mm = m
            j = 0
            while mm:
                if mm & 1:
                    code |= (<uint64_t>1) << free_bits[j]
                mm >>= 1
                j += 1
            for i in range(k):
                succ[i] = (code >> (i * k)) & mask
            if mode == R_ANY or _relation_ok(k, succ, mode):
                for pi in range(nparts):
                    if need_comm and not _commutes(k, succ, &blks[pi * k]):
                        continue
                    if need_clean and not _clean(k, succ, &blks[pi * k]):
                        continue
                    out.append((code, pi))
            m += 1
        return out
    finally:
        free(blks)

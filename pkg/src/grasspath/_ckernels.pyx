# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels for sparse Grassmann arithmetic.

Elements cross the boundary as ``dict[int, complex]`` keyed by monomial
bitmask. Bit ``k`` set means generator ``k`` is present; generators inside a
monomial are ordered by ascending bit. Masks must fit in 64 bits, otherwise
``OverflowError`` is raised and the caller falls back to the Python kernels.
"""

from libc.math cimport hypot
from libc.stdint cimport uint64_t
from libcpp.unordered_map cimport unordered_map
from libcpp.vector cimport vector


cdef extern from *:
    int popcount "__builtin_popcountll"(unsigned long long) nogil


cdef struct Sparse:
    vector[uint64_t] keys
    vector[double] re
    vector[double] im


cdef inline int swap_parity(uint64_t a, uint64_t b) noexcept nogil:
    # parity of pairs (x in a, y in b) with x > y
    cdef int n = 0
    cdef uint64_t low
    while b:
        low = b & (~b + 1)
        n += popcount(a & ~((low << 1) - 1))
        b ^= low
    return n & 1


cdef void load(dict d, Sparse* s) except *:
    cdef object k, v
    cdef double complex c
    s.keys.reserve(len(d))
    s.re.reserve(len(d))
    s.im.reserve(len(d))
    for k, v in d.items():
        c = v
        s.keys.push_back(<uint64_t>k)
        s.re.push_back(c.real)
        s.im.push_back(c.imag)


cdef dict dump(Sparse* s, double drop):
    cdef dict out = {}
    cdef size_t i
    for i in range(s.keys.size()):
        if hypot(s.re[i], s.im[i]) >= drop:
            out[s.keys[i]] = complex(s.re[i], s.im[i])
    return out


cdef void mul_sparse(Sparse* a, Sparse* b, Sparse* out) noexcept nogil:
    cdef unordered_map[uint64_t, size_t] index
    cdef unordered_map[uint64_t, size_t].iterator it
    cdef size_t i, j, slot
    cdef uint64_t ma, mb, m
    cdef double ar, ai, br, bi, cr, ci
    for i in range(a.keys.size()):
        ma = a.keys[i]
        ar = a.re[i]
        ai = a.im[i]
        for j in range(b.keys.size()):
            mb = b.keys[j]
            if ma & mb:
                continue
            br = b.re[j]
            bi = b.im[j]
            cr = ar * br - ai * bi
            ci = ar * bi + ai * br
            if swap_parity(ma, mb):
                cr = -cr
                ci = -ci
            m = ma | mb
            it = index.find(m)
            if it == index.end():
                index[m] = out.keys.size()
                out.keys.push_back(m)
                out.re.push_back(cr)
                out.im.push_back(ci)
            else:
                slot = index[m]
                out.re[slot] += cr
                out.im[slot] += ci


cdef void prune(Sparse* s, double drop) noexcept nogil:
    cdef size_t i, k = 0
    for i in range(s.keys.size()):
        if hypot(s.re[i], s.im[i]) >= drop:
            s.keys[k] = s.keys[i]
            s.re[k] = s.re[i]
            s.im[k] = s.im[i]
            k += 1
    s.keys.resize(k)
    s.re.resize(k)
    s.im.resize(k)


def mul(dict a, dict b, double drop):
    """Product ``a * b`` with anticommutation signs."""
    cdef Sparse sa, sb, out
    load(a, &sa)
    load(b, &sb)
    with nogil:
        mul_sparse(&sa, &sb, &out)
    return dump(&out, drop)


def exp_nilpotent(dict n, double drop):
    """``sum_k n**k / k!`` for an element with no scalar part."""
    cdef Sparse sn, term, nxt, acc
    cdef unordered_map[uint64_t, size_t] index
    cdef size_t i
    cdef double k = 0.0
    load(n, &sn)
    if sn.keys.size() and 0 in n:
        raise ValueError("exp_nilpotent needs an element without scalar part")
    term.keys.push_back(0)
    term.re.push_back(1.0)
    term.im.push_back(0.0)
    index[0] = 0
    acc.keys.push_back(0)
    acc.re.push_back(1.0)
    acc.im.push_back(0.0)
    with nogil:
        while term.keys.size():
            k += 1.0
            nxt.keys.clear()
            nxt.re.clear()
            nxt.im.clear()
            mul_sparse(&term, &sn, &nxt)
            for i in range(nxt.keys.size()):
                nxt.re[i] /= k
                nxt.im[i] /= k
            prune(&nxt, drop)
            term.keys.swap(nxt.keys)
            term.re.swap(nxt.re)
            term.im.swap(nxt.im)
            for i in range(term.keys.size()):
                if index.count(term.keys[i]):
                    acc.re[index[term.keys[i]]] += term.re[i]
                    acc.im[index[term.keys[i]]] += term.im[i]
                else:
                    index[term.keys[i]] = acc.keys.size()
                    acc.keys.push_back(term.keys[i])
                    acc.re.push_back(term.re[i])
                    acc.im.push_back(term.im[i])
    return dump(&acc, drop)


def integrate_pair(dict f, object eta_bit, object bar_bit, double drop):
    """Berezin integral with measure ``d eta d etabar exp(-etabar eta)``.

    Terms free of the pair pass through; terms holding both are reduced by
    ``T(eta etabar R) = R``; terms holding exactly one vanish.
    """
    cdef uint64_t e = <uint64_t>eta_bit
    cdef uint64_t b = <uint64_t>bar_bit
    cdef uint64_t pair = e | b
    cdef uint64_t m, rest
    cdef int parity
    cdef dict out = {}
    cdef object k, v
    for k, v in f.items():
        m = <uint64_t>k
        if (m & pair) == 0:
            out[k] = out.get(k, 0) + v
        elif (m & pair) == pair:
            parity = popcount(m & (e - 1)) + popcount((m ^ e) & (b - 1))
            rest = m ^ pair
            if parity & 1:
                out[rest] = out.get(rest, 0) - v
            else:
                out[rest] = out.get(rest, 0) + v
    return {key: val for key, val in out.items() if abs(val) >= drop}

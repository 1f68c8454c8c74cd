"""Pure-Python kernels for sparse Grassmann arithmetic.

Same contract as the compiled ``_ckernels`` module, without the 64-bit limit
on monomial masks.
"""


def swap_parity(a, b):
    """Parity of the generator pairs ``(x in a, y in b)`` with ``x > y``."""
    n = 0
    while b:
        low = b & -b
        n += (a & ~((low << 1) - 1)).bit_count()
        b ^= low
    return n & 1


def _prune(terms, drop):
    return {m: c for m, c in terms.items() if abs(c) >= drop}


def mul(a, b, drop):
    out = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            if ma & mb:
                continue
            c = ca * cb
            if swap_parity(ma, mb):
                c = -c
            m = ma | mb
            out[m] = out.get(m, 0) + c
    return _prune(out, drop)


def exp_nilpotent(n, drop):
    if 0 in n:
        raise ValueError("exp_nilpotent needs an element without scalar part")
    acc = {0: 1 + 0j}
    term = {0: 1 + 0j}
    k = 0
    while term:
        k += 1
        term = {m: c / k for m, c in mul(term, n, 0.0).items()}
        term = _prune(term, drop)
        for m, c in term.items():
            acc[m] = acc.get(m, 0) + c
    return _prune(acc, drop)


def integrate_pair(f, eta_bit, bar_bit, drop):
    pair = eta_bit | bar_bit
    out = {}
    for m, c in f.items():
        hit = m & pair
        if not hit:
            out[m] = out.get(m, 0) + c
        elif hit == pair:
            parity = (m & (eta_bit - 1)).bit_count()
            parity += ((m ^ eta_bit) & (bar_bit - 1)).bit_count()
            rest = m ^ pair
            out[rest] = out.get(rest, 0) + (-c if parity & 1 else c)
    return _prune(out, drop)

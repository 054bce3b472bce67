# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled exhaustive search over all 2^n integer bid vectors.

Tie-break order matches the pure-Python fallback: higher expected value,
then fewer bid-on keywords, then lexicographically smaller bid vector.
"""


def best_integer_bids_native(double[:, ::1] clicks, double[:, ::1] costs,
                             double[::1] probs, double budget):
    """Return (mask, value) of the best integer bid vector.

    ``clicks`` and ``costs`` are (scenarios, keywords) arrays; bit i of the
    mask is the bid on keyword i.
    """
    cdef Py_ssize_t S = clicks.shape[0]
    cdef Py_ssize_t n = clicks.shape[1]
    cdef unsigned long long nmask = 1ULL << n
    cdef unsigned long long m, best_m = 0
    cdef Py_ssize_t s, i
    cdef int pop, best_pop = 0, replace
    cdef double v, clk, cst, best_v

    best_v = _mask_value(clicks, costs, probs, budget, 0)
    for m in range(1, nmask):
        v = 0.0
        for s in range(S):
            clk = 0.0
            cst = 0.0
            for i in range(n):
                if (m >> i) & 1:
                    clk += clicks[s, i]
                    cst += costs[s, i]
            if cst > budget:
                v += probs[s] * clk * budget / cst
            else:
                v += probs[s] * clk
        if v < best_v:
            continue
        pop = _popcount(m)
        replace = 0
        if v > best_v:
            replace = 1
        elif pop < best_pop:
            replace = 1
        elif pop == best_pop and _lex_less(m, best_m, n):
            replace = 1
        if replace:
            best_v = v
            best_m = m
            best_pop = pop
    return best_m, best_v


cdef double _mask_value(double[:, ::1] clicks, double[:, ::1] costs,
                        double[::1] probs, double budget, unsigned long long m):
    cdef Py_ssize_t s, i
    cdef double v = 0.0, clk, cst
    for s in range(clicks.shape[0]):
        clk = 0.0
        cst = 0.0
        for i in range(clicks.shape[1]):
            if (m >> i) & 1:
                clk += clicks[s, i]
                cst += costs[s, i]
        if cst > budget:
            v += probs[s] * clk * budget / cst
        else:
            v += probs[s] * clk
    return v


cdef inline int _popcount(unsigned long long m):
    cdef int c = 0
    while m:
        m &= m - 1
        c += 1
    return c


cdef inline int _lex_less(unsigned long long a, unsigned long long b, Py_ssize_t n):
    cdef Py_ssize_t i
    cdef int ai, bi
    for i in range(n):
        ai = (a >> i) & 1
        bi = (b >> i) & 1
        if ai != bi:
            return ai < bi
    return 0

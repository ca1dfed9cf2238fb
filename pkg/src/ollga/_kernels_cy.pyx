# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels.

Twin of _kernels_py: consumes the splitmix64 stream draw-for-draw
identically, so results are independent of which backend is active.
See _kernels_py for the shared draw-order contract.
"""

from libc.stdlib cimport malloc, free

ctypedef unsigned long long u64

cdef extern from *:
    """
    static inline unsigned long long ollga_mulhi64(unsigned long long a,
                                                   unsigned long long b) {
        return (unsigned long long)(((__uint128_t)a * b) >> 64);
    }
    """
    u64 ollga_mulhi64(u64 a, u64 b) nogil

cdef u64 _GOLDEN = 0x9E3779B97F4A7C15ULL
cdef double _INV_2_53 = 1.0 / 9007199254740992.0


cdef inline u64 _next(u64* state) nogil:
    state[0] = state[0] + _GOLDEN
    cdef u64 z = state[0]
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline double _dbl(u64* state) nogil:
    return <double>(_next(state) >> 11) * _INV_2_53


cdef inline u64 _below(u64* state, u64 bound) nogil:
    return ollga_mulhi64(_next(state), bound)


cdef inline long _fitness(long om, long n, long k) nogil:
    if om <= n - k or om == n:
        return om + k
    return n - om


cdef inline void _isort(long* a, long m) nogil:
    cdef long i, j, v
    for i in range(1, m):
        v = a[i]
        j = i - 1
        while j >= 0 and a[j] > v:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = v


cdef long _binomial(long n, double p, u64* s) nogil:
    cdef long ell = 0
    cdef long i
    for i in range(n):
        if _dbl(s) < p:
            ell += 1
    return ell


cdef long _mutation_phase(const unsigned char* parent, long n, long parent_om,
                          long k, long ell, long lam_m, u64* s,
                          long* idx, long* cand, long* winner,
                          long* hit_out) nogil:
    """Writes the winner's ell flip positions (sorted) into `winner`.
    Returns winner length (== ell); sets hit_out to the 1-based index of
    the first optimal mutant, or 0."""
    cdef long best_fit = -1
    cdef long ties = 0
    cdef long hit = 0
    cdef long i, j, r, q, delta, om, fit
    for i in range(lam_m):
        for j in range(n):
            idx[j] = j
        delta = 0
        for j in range(ell):
            r = j + <long>_below(s, <u64>(n - j))
            q = idx[r]
            idx[r] = idx[j]
            idx[j] = q
            cand[j] = q
            delta += 1 - 2 * <long>parent[q]
        om = parent_om + delta
        fit = _fitness(om, n, k)
        if om == n and hit == 0:
            hit = i + 1
        if fit > best_fit:
            best_fit = fit
            ties = 1
            for j in range(ell):
                winner[j] = cand[j]
        elif fit == best_fit:
            ties += 1
            if _below(s, <u64>ties) == 0:
                for j in range(ell):
                    winner[j] = cand[j]
    _isort(winner, ell)
    hit_out[0] = hit
    return ell


cdef long _crossover_phase(const unsigned char* parent, long n, long parent_om,
                           long k, const long* positions, long m, double c,
                           long lam_c, u64* s,
                           long* cand, long* winner, long* hit_out) nogil:
    """Writes the winner subset (positions taken from x') into `winner`.
    Returns its length; sets hit_out as in _mutation_phase."""
    cdef long best_fit = -1
    cdef long ties = 0
    cdef long hit = 0
    cdef long wlen = 0
    cdef long i, j, q, clen, delta, om, fit
    for i in range(lam_c):
        clen = 0
        delta = 0
        for j in range(m):
            if _dbl(s) < c:
                q = positions[j]
                cand[clen] = q
                clen += 1
                delta += 1 - 2 * <long>parent[q]
        om = parent_om + delta
        fit = _fitness(om, n, k)
        if om == n and hit == 0:
            hit = i + 1
        if fit > best_fit:
            best_fit = fit
            ties = 1
            wlen = clen
            for j in range(clen):
                winner[j] = cand[j]
        elif fit == best_fit:
            ties += 1
            if _below(s, <u64>ties) == 0:
                wlen = clen
                for j in range(clen):
                    winner[j] = cand[j]
    hit_out[0] = hit
    return wlen


def binomial(long n, double p, u64 state):
    cdef u64 s = state
    cdef long ell = _binomial(n, p, &s)
    return ell, s


def sample_positions(long n, long m, u64 state):
    cdef u64 s = state
    cdef long* idx = <long*>malloc(n * sizeof(long))
    if idx == NULL:
        raise MemoryError()
    cdef long j, r, q
    try:
        for j in range(n):
            idx[j] = j
        for j in range(m):
            r = j + <long>_below(&s, <u64>(n - j))
            q = idx[r]
            idx[r] = idx[j]
            idx[j] = q
        return [idx[j] for j in range(m)], s
    finally:
        free(idx)


def select_biased(positions, double c, u64 state):
    cdef u64 s = state
    subset = []
    cdef long q
    for q in positions:
        if _dbl(&s) < c:
            subset.append(q)
    return subset, s


def mutation_phase(parent, long parent_om, long k, long ell, long lam_m,
                   u64 state):
    cdef const unsigned char[:] pv = parent
    cdef long n = pv.shape[0]
    cdef u64 s = state
    cdef long* buf = <long*>malloc(3 * n * sizeof(long))
    if buf == NULL:
        raise MemoryError()
    cdef long hit = 0
    cdef long j
    try:
        _mutation_phase(&pv[0], n, parent_om, k, ell, lam_m, &s,
                        buf, buf + n, buf + 2 * n, &hit)
        return [buf[2 * n + j] for j in range(ell)], hit, s
    finally:
        free(buf)


def crossover_phase(parent, long parent_om, long k, positions, double c,
                    long lam_c, u64 state):
    cdef const unsigned char[:] pv = parent
    cdef long n = pv.shape[0]
    cdef long m = len(positions)
    cdef u64 s = state
    cdef long* buf = <long*>malloc(3 * (m + 1) * sizeof(long))
    if buf == NULL:
        raise MemoryError()
    cdef long hit = 0
    cdef long j, wlen
    try:
        for j in range(m):
            buf[j] = positions[j]
        wlen = _crossover_phase(&pv[0], n, parent_om, k, buf, m, c, lam_c,
                                &s, buf + (m + 1), buf + 2 * (m + 1), &hit)
        return [buf[2 * (m + 1) + j] for j in range(wlen)], hit, s
    finally:
        free(buf)


def ga_iteration(parent, long parent_om, long k, double p, double c,
                 long lam_m, long lam_c, u64 state):
    cdef unsigned char[:] pv = parent
    cdef long n = pv.shape[0]
    cdef u64 s = state
    cdef long* buf = <long*>malloc(5 * n * sizeof(long))
    if buf == NULL:
        raise MemoryError()
    cdef long* idx = buf
    cdef long* cand = buf + n
    cdef long* winner = buf + 2 * n
    cdef long* ccand = buf + 3 * n
    cdef long* cwinner = buf + 4 * n
    cdef long hit_m = 0
    cdef long hit_c = 0
    cdef long ell, wlen, j, q, delta, om_y, hit
    try:
        with nogil:
            ell = _binomial(n, p, &s)
            _mutation_phase(&pv[0], n, parent_om, k, ell, lam_m, &s,
                            idx, cand, winner, &hit_m)
            wlen = _crossover_phase(&pv[0], n, parent_om, k, winner, ell, c,
                                    lam_c, &s, ccand, cwinner, &hit_c)
            hit = hit_m if hit_m else (lam_m + hit_c if hit_c else 0)
            delta = 0
            for j in range(wlen):
                delta += 1 - 2 * <long>pv[cwinner[j]]
            om_y = parent_om + delta
            if _fitness(om_y, n, k) >= _fitness(parent_om, n, k):
                for j in range(wlen):
                    q = cwinner[j]
                    pv[q] ^= 1
                parent_om = om_y
        return parent_om, hit, s
    finally:
        free(buf)


def ea_iteration(parent, long parent_om, long k, double rate, u64 state):
    cdef unsigned char[:] pv = parent
    cdef long n = pv.shape[0]
    cdef u64 s = state
    cdef long* flips = <long*>malloc(n * sizeof(long))
    if flips == NULL:
        raise MemoryError()
    cdef long cnt = 0
    cdef long delta = 0
    cdef long q, om, hit, j
    try:
        with nogil:
            for q in range(n):
                if _dbl(&s) < rate:
                    flips[cnt] = q
                    cnt += 1
                    delta += 1 - 2 * <long>pv[q]
            om = parent_om + delta
            hit = 1 if om == n else 0
            if _fitness(om, n, k) >= _fitness(parent_om, n, k):
                for j in range(cnt):
                    pv[flips[j]] ^= 1
                parent_om = om
        return parent_om, hit, s
    finally:
        free(flips)

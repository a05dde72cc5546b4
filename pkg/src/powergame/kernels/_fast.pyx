# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: CSR matvec, fixed-point iteration, episode simulator.

Mirrors ``_pure`` operation for operation (same accumulation order, same
libm calls) so both backends produce bit-identical results.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport fabs, log1p

cnp.import_array()

BACKEND_NAME = "fast"

cdef unsigned long long GOLDEN_C = 0x9E3779B97F4A7C15ULL
cdef double INV_2_53 = 2.0 ** -53

GOLDEN = GOLDEN_C
MASK64 = (1 << 64) - 1


cdef inline unsigned long long _mix64(unsigned long long z) noexcept nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


def mix64(z):
    return int(_mix64(<unsigned long long> (z & 0xFFFFFFFFFFFFFFFF)))


def splitmix64_sequence(seed, Py_ssize_t n):
    """First ``n`` raw 64-bit outputs of the stream with initial state ``seed``."""
    out = np.empty(n, dtype=np.uint64)
    cdef unsigned long long[::1] view = out
    cdef unsigned long long state = <unsigned long long> (seed & 0xFFFFFFFFFFFFFFFF)
    cdef Py_ssize_t i
    for i in range(n):
        state = state + GOLDEN_C
        view[i] = _mix64(state)
    return out


def u01_sequence(seed, Py_ssize_t n):
    """First ``n`` uniforms in [0, 1) of the stream with initial state ``seed``."""
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] view = out
    cdef unsigned long long state = <unsigned long long> (seed & 0xFFFFFFFFFFFFFFFF)
    cdef Py_ssize_t i
    for i in range(n):
        state = state + GOLDEN_C
        view[i] = <double> (_mix64(state) >> 11) * INV_2_53
    return out


def csr_matvec(const long long[::1] indptr, const long long[::1] indices,
               const double[::1] data, const double[::1] x):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    out = np.zeros(n, dtype=np.float64)
    cdef double[::1] y = out
    cdef Py_ssize_t i, k
    cdef double acc
    for i in range(n):
        acc = 0.0
        for k in range(indptr[i], indptr[i + 1]):
            acc += data[k] * x[indices[k]]
        y[i] = acc
    return out


def picard_solve(const long long[::1] indptr, const long long[::1] indices,
                 const double[::1] data, const double[::1] z,
                 double tol, long long max_iter):
    """Iterate r <- W r + z from r = 0; stop when the step shrinks to ``tol``.

    Returns ``(r, iterations, last_diff)``; the caller decides whether
    ``last_diff <= tol`` counts as convergence.
    """
    cdef Py_ssize_t n = indptr.shape[0] - 1
    r_arr = np.zeros(n, dtype=np.float64)
    y_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] r = r_arr
    cdef double[::1] y = y_arr
    cdef double[::1] tmp
    cdef Py_ssize_t i, k
    cdef long long it = 0
    cdef double acc, d, diff = np.inf
    while it < max_iter:
        it += 1
        diff = 0.0
        for i in range(n):
            acc = 0.0
            for k in range(indptr[i], indptr[i + 1]):
                acc += data[k] * r[indices[k]]
            y[i] = acc + z[i]
            d = fabs(y[i] - r[i])
            if d > diff:
                diff = d
        tmp = r
        r = y
        y = tmp
        if diff <= tol:
            break
    # after an odd number of buffer swaps the latest iterate lives in y_arr
    out = y_arr if (it % 2 == 1) else r_arr
    return out, int(it), float(diff)


def simulate_batch(const long long[::1] ev_indptr, const double[::1] ev_prob,
                   const long long[::1] ev_target, const double[::1] total_rate,
                   const double[::1] cost_rate, const double[::1] reward_rate,
                   const double[::1] win_lo, const double[::1] win_hi,
                   double win_payout, long long start, long long n_episodes,
                   seed, long long max_events):
    """Run ``n_episodes`` independent episodes of the jump chain.

    Same contract as the pure backend: returns ``(utilities, event_counts)``.
    """
    utilities = np.empty(n_episodes, dtype=np.float64)
    counts = np.empty(n_episodes, dtype=np.int64)
    cdef double[::1] util_view = utilities
    cdef long long[::1] count_view = counts
    cdef unsigned long long base = <unsigned long long> (seed & 0xFFFFFFFFFFFFFFFF)
    cdef unsigned long long state
    cdef long long idx, events, s, lo, hi, e, chosen, target
    cdef double u, dt, utility, acc

    with nogil:
        for idx in range(n_episodes):
            state = _mix64(base + GOLDEN_C * (<unsigned long long> idx + 1))
            s = start
            utility = 0.0
            events = 0
            while events < max_events:
                state = state + GOLDEN_C
                u = <double> (_mix64(state) >> 11) * INV_2_53
                dt = -log1p(-u) / total_rate[s]
                utility += (reward_rate[s] - cost_rate[s]) * dt

                state = state + GOLDEN_C
                u = <double> (_mix64(state) >> 11) * INV_2_53
                lo = ev_indptr[s]
                hi = ev_indptr[s + 1]
                chosen = hi - 1
                acc = 0.0
                for e in range(lo, hi):
                    acc += ev_prob[e]
                    if u < acc:
                        chosen = e
                        break
                events += 1
                target = ev_target[chosen]
                if target < 0:
                    if win_payout != 0.0:
                        state = state + GOLDEN_C
                        u = <double> (_mix64(state) >> 11) * INV_2_53
                        if win_lo[s] <= u and u < win_hi[s]:
                            utility += win_payout
                    break
                s = target
            util_view[idx] = utility
            count_view[idx] = events
    return utilities, counts

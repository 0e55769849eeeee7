# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: xoshiro256** stream and the two chain generators.

Must stay bit-identical to ``_pykernels``; the test-suite compares them.
"""

import numpy as np

from libc.stdint cimport uint64_t, uint8_t
from libc.stdlib cimport malloc, free

BACKEND = "cython"

cdef inline uint64_t _rotl(uint64_t x, int k) noexcept nogil:
    return (x << k) | (x >> (64 - k))


cdef inline uint64_t _next(uint64_t* s) noexcept nogil:
    cdef uint64_t result = _rotl(s[1] * 5, 7) * 9
    cdef uint64_t t = s[1] << 17
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], 45)
    return result


cdef inline double _uniform(uint64_t* s) noexcept nogil:
    return <double>(_next(s) >> 11) * (1.0 / 9007199254740992.0)


def splitmix64(uint64_t x):
    """Return (output, next_state) of one SplitMix64 step."""
    x = x + 0x9E3779B97F4A7C15ULL
    cdef uint64_t z = x
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31), x


def next_raw(uint64_t[::1] state, Py_ssize_t n):
    out = np.empty(n, dtype=np.uint64)
    cdef uint64_t[::1] o = out
    cdef uint64_t s[4]
    cdef Py_ssize_t i
    for i in range(4):
        s[i] = state[i]
    with nogil:
        for i in range(n):
            o[i] = _next(s)
    for i in range(4):
        state[i] = s[i]
    return out


def fill_uniform(uint64_t[::1] state, Py_ssize_t n):
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef uint64_t s[4]
    cdef Py_ssize_t i
    for i in range(4):
        s[i] = state[i]
    with nogil:
        for i in range(n):
            o[i] = _uniform(s)
    for i in range(4):
        state[i] = s[i]
    return out


def run_additive(const double[::1] memory, double abar, uint64_t[::1] state,
                 Py_ssize_t burn_in, Py_ssize_t length):
    cdef Py_ssize_t n = memory.shape[0]
    out = np.empty(length, dtype=np.uint8)
    cdef uint8_t[::1] o = out
    cdef uint64_t s[4]
    cdef uint8_t* ring = <uint8_t*>malloc(n)
    cdef Py_ssize_t i, r, head = 0, total = burn_in + length
    cdef double p
    cdef uint8_t a
    if ring == NULL:
        raise MemoryError()
    for i in range(4):
        s[i] = state[i]
    try:
        with nogil:
            # ring[head] is the oldest symbol; ring[(head - r) mod n] is a_{i-r}
            for i in range(n):
                ring[i] = 1 if _uniform(s) < abar else 0
            for i in range(total):
                p = abar
                for r in range(1, n + 1):
                    p = p + memory[r - 1] * (<double>ring[(head - r + n) % n] - abar)
                a = 1 if _uniform(s) < p else 0
                ring[head] = a
                head = head + 1
                if head == n:
                    head = 0
                if i >= burn_in:
                    o[i - burn_in] = a
    finally:
        free(ring)
    for i in range(4):
        state[i] = s[i]
    return out


def run_stepwise(Py_ssize_t n, double mu, double nu, uint64_t[::1] state,
                 Py_ssize_t burn_in, Py_ssize_t length):
    out = np.empty(length, dtype=np.uint8)
    cdef uint8_t[::1] o = out
    cdef uint64_t s[4]
    cdef uint8_t* ring = <uint8_t*>malloc(n)
    cdef Py_ssize_t i, head = 0, k = 0, total = burn_in + length
    cdef double p, base = 0.5 - nu
    cdef uint8_t a
    if ring == NULL:
        raise MemoryError()
    for i in range(4):
        s[i] = state[i]
    try:
        with nogil:
            for i in range(n):
                ring[i] = 1 if _uniform(s) < base else 0
                k = k + ring[i]
            for i in range(total):
                p = base + mu * (2.0 * <double>k / <double>n - 1.0)
                a = 1 if _uniform(s) < p else 0
                k = k - ring[head] + a
                ring[head] = a
                head = head + 1
                if head == n:
                    head = 0
                if i >= burn_in:
                    o[i - burn_in] = a
    finally:
        free(ring)
    for i in range(4):
        state[i] = s[i]
    return out

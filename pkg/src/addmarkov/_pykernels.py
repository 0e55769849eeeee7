"""Pure-Python fallback for the compiled kernels.

Same algorithms and floating-point operation order as ``_kernels.pyx`` so
that both backends emit identical sequences for identical seeds.
"""

import numpy as np

BACKEND = "python"

_MASK = (1 << 64) - 1
_INV53 = 1.0 / 9007199254740992.0


def splitmix64(x):
    """Return (output, next_state) of one SplitMix64 step."""
    x = (int(x) + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31), x


class _Xoshiro:
    __slots__ = ("s0", "s1", "s2", "s3")

    def __init__(self, state):
        self.s0, self.s1, self.s2, self.s3 = (int(v) for v in state)

    def next(self):
        s0, s1, s2, s3 = self.s0, self.s1, self.s2, self.s3
        x = (s1 * 5) & _MASK
        result = ((((x << 7) | (x >> 57)) & _MASK) * 9) & _MASK
        t = (s1 << 17) & _MASK
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = ((s3 << 45) | (s3 >> 19)) & _MASK
        self.s0, self.s1, self.s2, self.s3 = s0, s1, s2, s3
        return result

    def uniform(self):
        return (self.next() >> 11) * _INV53

    def store(self, state):
        state[:] = np.array([self.s0, self.s1, self.s2, self.s3], dtype=np.uint64)


def next_raw(state, n):
    g = _Xoshiro(state)
    out = np.array([g.next() for _ in range(n)], dtype=np.uint64)
    g.store(state)
    return out


def fill_uniform(state, n):
    g = _Xoshiro(state)
    out = np.array([g.uniform() for _ in range(n)], dtype=np.float64)
    g.store(state)
    return out


def run_additive(memory, abar, state, burn_in, length):
    g = _Xoshiro(state)
    memory = [float(f) for f in memory]
    n = len(memory)
    abar = float(abar)
    window = [1 if g.uniform() < abar else 0 for _ in range(n)]
    out = bytearray(length)
    for i in range(burn_in + length):
        p = abar
        for r in range(1, n + 1):
            p = p + memory[r - 1] * (float(window[-r]) - abar)
        a = 1 if g.uniform() < p else 0
        window.append(a)
        del window[0]
        if i >= burn_in:
            out[i - burn_in] = a
    g.store(state)
    return np.frombuffer(bytes(out), dtype=np.uint8).copy()


def run_stepwise(n, mu, nu, state, burn_in, length):
    g = _Xoshiro(state)
    base = 0.5 - float(nu)
    mu = float(mu)
    window = [1 if g.uniform() < base else 0 for _ in range(n)]
    k = sum(window)
    head = 0
    out = bytearray(length)
    for i in range(burn_in + length):
        p = base + mu * (2.0 * float(k) / float(n) - 1.0)
        a = 1 if g.uniform() < p else 0
        k = k - window[head] + a
        window[head] = a
        head += 1
        if head == n:
            head = 0
        if i >= burn_in:
            out[i - burn_in] = a
    g.store(state)
    return np.frombuffer(bytes(out), dtype=np.uint8).copy()

"""Exact stationary word statistics and block / conditional entropies (nats).

Words of length L are integer-encoded with the oldest symbol in the least
significant bit. The order-N chain is a 2^N-state chain on N-words whose
transitions append one symbol, so every state has exactly two successors
and two predecessors.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .chain import AdditiveChainSpec, ChainSpec, require_valid
from .generator import SymbolSequence

MAX_ORDER = 20
MAX_WORD = 21
MAX_EMPIRICAL_WORD = 30


class CapExceededError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class WordDistribution:
    length: int
    probs: np.ndarray

    def marginal(self) -> "WordDistribution":
        """Sum out the most recent symbol."""
        half = 1 << (self.length - 1)
        return WordDistribution(self.length - 1, self.probs[:half] + self.probs[half:])


@dataclass(frozen=True, eq=False)
class EntropyCurve:
    """``H[L]`` for L = 0..L_max + 1 and ``h[L] = H[L+1] - H[L]`` for L = 0..L_max."""

    H: np.ndarray
    h: np.ndarray

    def to_csv(self) -> str:
        rows = ["L,H,h"]
        rows += [f"{L},{self.H[L]:.17g},{self.h[L]:.17g}" for L in range(len(self.h))]
        return "\n".join(rows) + "\n"


def _bits(n: int) -> np.ndarray:
    """bits[w, j] = symbol j (0 = oldest) of every n-word w."""
    words = np.arange(1 << n, dtype=np.int64)
    return ((words[:, None] >> np.arange(n)) & 1).astype(np.float64)


def cpdf_table(spec: ChainSpec) -> np.ndarray:
    """P(next = 1 | N-word) for every integer-encoded N-word."""
    n = spec.order
    if n > MAX_ORDER:
        raise CapExceededError(f"exact mode supports N <= {MAX_ORDER}, got {n}")
    if isinstance(spec, AdditiveChainSpec):
        # oldest-first bit j is the symbol at lag r = N - j
        weights = spec.memory[::-1]
        return spec.mean + _bits(n) @ weights - spec.mean * weights.sum()
    k = np.zeros(1 << n, dtype=np.int64)
    words = np.arange(1 << n, dtype=np.int64)
    for j in range(n):
        k += (words >> j) & 1
    return (0.5 - spec.nu) + spec.mu * (2.0 * k / n - 1.0)


def _transitions(p1: np.ndarray, n: int):
    """Predecessor words and transition probabilities into every N-word.

    Word t has newest symbol t >> (n-1); its two predecessors differ only in
    the oldest symbol that was shifted out.
    """
    size = 1 << n
    t = np.arange(size, dtype=np.int64)
    pred0 = (t << 1) & (size - 1)
    pred1 = pred0 | 1
    newest = t >> (n - 1)
    trans0 = np.where(newest == 1, p1[pred0], 1.0 - p1[pred0])
    trans1 = np.where(newest == 1, p1[pred1], 1.0 - p1[pred1])
    return pred0, pred1, trans0, trans1


def _step(pi: np.ndarray, p1: np.ndarray, n: int) -> np.ndarray:
    pred0, pred1, trans0, trans1 = _transitions(p1, n)
    return pi[pred0] * trans0 + pi[pred1] * trans1


def stationary_distribution(spec: ChainSpec, tol: float = 1e-12,
                            max_iter: int = 1_000_000) -> WordDistribution:
    """Stationary N-word distribution by power iteration from the uniform vector."""
    require_valid(spec)
    n = spec.order
    pred0, pred1, trans0, trans1 = _transitions(cpdf_table(spec), n)
    size = 1 << n
    pi = np.full(size, 1.0 / size)
    for _ in range(max_iter):
        new = pi[pred0] * trans0 + pi[pred1] * trans1
        new /= new.sum()
        if np.abs(new - pi).sum() < tol:
            return WordDistribution(n, new)
        pi = new
    raise RuntimeError(f"power iteration did not converge in {max_iter} sweeps")


def ck_residual(spec: ChainSpec, dist: WordDistribution) -> float:
    """max_w |P(w) - sum_a P(a w_prefix) P(w_last | a w_prefix)|."""
    return float(np.max(np.abs(dist.probs - _step(dist.probs, cpdf_table(spec), spec.order))))


def word_probabilities(spec: ChainSpec, length: int,
                       stationary: WordDistribution | None = None) -> WordDistribution:
    n = spec.order
    if max(length, n) > MAX_WORD or n > MAX_ORDER:
        raise CapExceededError(f"exact mode supports N <= {MAX_ORDER} and L <= {MAX_WORD}")
    if length < 0:
        raise ValueError("word length must be non-negative")
    dist = stationary or stationary_distribution(spec)
    if length <= n:
        probs = dist.probs
        for _ in range(n - length):
            probs = _drop_newest(probs)
        return WordDistribution(length, probs)
    p1 = cpdf_table(spec)
    probs = dist.probs
    for L in range(n, length):
        tail = np.arange(1 << L, dtype=np.int64) >> (L - n)
        up = p1[tail]
        probs = np.concatenate([probs * (1.0 - up), probs * up])
    return WordDistribution(length, probs)


def _drop_newest(probs: np.ndarray) -> np.ndarray:
    half = len(probs) // 2
    return probs[:half] + probs[half:]


def block_entropy(dist: WordDistribution) -> float:
    p = dist.probs[dist.probs > 0]
    return float(-np.sum(p * np.log(p)))


def entropy_curve(spec: ChainSpec, L_max: int) -> EntropyCurve:
    if L_max + 1 > MAX_WORD:
        raise CapExceededError(f"exact entropy curve needs L_max + 1 <= {MAX_WORD}")
    stationary = stationary_distribution(spec)
    top = word_probabilities(spec, L_max + 1, stationary)
    H = np.empty(L_max + 2)
    dist = top
    for L in range(L_max + 1, -1, -1):
        H[L] = block_entropy(dist)
        if L:
            dist = dist.marginal()
    return EntropyCurve(H, np.diff(H))


def source_entropy(spec: ChainSpec) -> float:
    """Entropy rate; for an order-N chain this is the saturated value h_N."""
    return float(entropy_curve(spec, spec.order).h[spec.order])


def word_counts(symbols: np.ndarray, length: int) -> np.ndarray:
    """Sliding-window counts of integer-encoded words (oldest symbol = LSB)."""
    a = np.asarray(symbols, dtype=np.int64)
    count = len(a) - length + 1
    codes = np.zeros(count, dtype=np.int64)
    for j in range(length):
        codes |= a[j:j + count] << j
    if length <= 22:
        return np.bincount(codes, minlength=1 << length)
    _, counts = np.unique(codes, return_counts=True)
    return counts


def empirical_entropy_curve(seq: SymbolSequence, L_max: int) -> EntropyCurve:
    """Plug-in block entropies from sliding-window word frequencies (no bias correction)."""
    a = seq.symbols if isinstance(seq, SymbolSequence) else np.asarray(seq)
    if L_max + 1 > MAX_EMPIRICAL_WORD:
        raise CapExceededError(f"empirical entropy supports L_max <= {MAX_EMPIRICAL_WORD - 1}")
    if len(a) < L_max + 1:
        raise ValueError("sequence shorter than L_max + 1")
    if (1 << (L_max + 1)) > len(a) / 100:
        warnings.warn(f"word length {L_max + 1} is undersampled for {len(a)} symbols",
                      RuntimeWarning, stacklevel=2)
    H = np.zeros(L_max + 2)
    for L in range(1, L_max + 2):
        counts = word_counts(a, L)
        p = counts[counts > 0] / counts.sum()
        H[L] = -np.sum(p * np.log(p))
    return EntropyCurve(H, np.diff(H))

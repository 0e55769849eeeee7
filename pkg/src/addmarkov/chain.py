"""Chain specifications for binary additive and step-wise memory Markov chains.

Both families expose ``cpdf_one(window)``, the probability that the next
symbol is 1 given the last ``order`` symbols (most recent last), so that the
generator and the entropy code never need to know which family they hold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np

VALIDATION_MARGIN = 1e-12


class SpecError(ValueError):
    """Raised for malformed or invalid chain specifications."""


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    cpdf_min: float
    cpdf_max: float

    def describe(self) -> str:
        state = "valid" if self.ok else "invalid"
        return (f"{state}: worst-case P(1|history) spans "
                f"[{self.cpdf_min:.17g}, {self.cpdf_max:.17g}], "
                f"required inside [{VALIDATION_MARGIN:g}, {1 - VALIDATION_MARGIN:.12f}]")


@dataclass(frozen=True, eq=False)
class AdditiveChainSpec:
    """Additive chain: P(1|history) = abar + sum_r F(r) (a_{i-r} - abar)."""

    order: int
    mean: float
    memory: np.ndarray = field(repr=False)

    def __post_init__(self):
        memory = np.array(self.memory, dtype=float).reshape(-1)
        memory.setflags(write=False)
        object.__setattr__(self, "memory", memory)
        if int(self.order) != self.order or self.order < 1:
            raise SpecError(f"order must be a positive integer, got {self.order!r}")
        if len(memory) != self.order:
            raise SpecError(f"memory has {len(memory)} entries, expected {self.order}")
        if not np.all(np.isfinite(memory)):
            raise SpecError("memory function has non-finite entries")
        if not 0.0 < self.mean < 1.0:
            raise SpecError(f"mean must lie in (0, 1), got {self.mean!r}")

    def __eq__(self, other):
        if not isinstance(other, AdditiveChainSpec):
            return NotImplemented
        return (self.order == other.order and self.mean == other.mean
                and np.array_equal(self.memory, other.memory))

    __hash__ = None

    @property
    def family(self) -> str:
        return "additive"

    def cpdf_one(self, window: Sequence[int]) -> float:
        w = _check_window(window, self.order)
        p = self.mean
        # r = 1 is the most recent symbol, i.e. the last window entry
        for r in range(1, self.order + 1):
            p += self.memory[r - 1] * (w[-r] - self.mean)
        return float(p)

    def to_dict(self) -> dict:
        return {"family": "additive", "N": self.order, "abar": self.mean,
                "F": [float(x) for x in self.memory]}


@dataclass(frozen=True)
class StepWiseChainSpec:
    """Step-wise chain: P(1|k) = 1/2 - nu + mu (2k/N - 1), k = ones in the window."""

    order: int
    mu: float
    nu: float = 0.0

    def __post_init__(self):
        if int(self.order) != self.order or self.order < 1:
            raise SpecError(f"order must be a positive integer, got {self.order!r}")
        if not (np.isfinite(self.mu) and np.isfinite(self.nu)):
            raise SpecError("mu and nu must be finite")

    @property
    def family(self) -> str:
        return "stepwise"

    def cpdf_one_k(self, k: int) -> float:
        return (0.5 - self.nu) + self.mu * (2.0 * k / self.order - 1.0)

    def cpdf_one(self, window: Sequence[int]) -> float:
        w = _check_window(window, self.order)
        return self.cpdf_one_k(int(sum(w)))

    def to_dict(self) -> dict:
        return {"family": "stepwise", "N": self.order, "mu": self.mu, "nu": self.nu}


ChainSpec = Union[AdditiveChainSpec, StepWiseChainSpec]


@dataclass(frozen=True)
class HistoryWindow:
    """The last N symbols, most recent last."""

    symbols: tuple

    def __post_init__(self):
        symbols = tuple(int(a) for a in self.symbols)
        if any(a not in (0, 1) for a in symbols):
            raise SpecError("history window must contain only 0 and 1")
        object.__setattr__(self, "symbols", symbols)

    @property
    def ones_count(self) -> int:
        return sum(self.symbols)

    def __len__(self):
        return len(self.symbols)


def _check_window(window, order: int) -> tuple:
    if isinstance(window, HistoryWindow):
        w = window.symbols
    else:
        w = tuple(int(a) for a in window)
    if len(w) != order:
        raise SpecError(f"window length {len(w)} does not match chain order {order}")
    return w


def validate_additive(spec: AdditiveChainSpec) -> ValidationReport:
    """Exact worst-case CPDF bounds; each history term is extremized on its own."""
    abar = spec.mean
    hi = np.where(spec.memory > 0, spec.memory * (1 - abar), -spec.memory * abar)
    lo = np.where(spec.memory > 0, -spec.memory * abar, spec.memory * (1 - abar))
    cmax = abar + float(hi.sum())
    cmin = abar + float(lo.sum())
    ok = cmin >= VALIDATION_MARGIN and cmax <= 1 - VALIDATION_MARGIN
    return ValidationReport(ok, cmin, cmax)


def validate_stepwise(spec: StepWiseChainSpec) -> ValidationReport:
    # P(1|k) is linear in k, so the extremes sit at k = 0 and k = N
    ends = (spec.cpdf_one_k(0), spec.cpdf_one_k(spec.order))
    cmin, cmax = min(ends), max(ends)
    ok = (abs(spec.mu) < 0.5 and cmin >= VALIDATION_MARGIN
          and cmax <= 1 - VALIDATION_MARGIN)
    return ValidationReport(ok, cmin, cmax)


def validate(spec: ChainSpec) -> ValidationReport:
    if isinstance(spec, AdditiveChainSpec):
        return validate_additive(spec)
    return validate_stepwise(spec)


def require_valid(spec: ChainSpec) -> None:
    report = validate(spec)
    if not report.ok:
        raise SpecError(report.describe())


def eval_additive_cpdf(spec: AdditiveChainSpec, window, a: int) -> float:
    p1 = spec.cpdf_one(window)
    return p1 if a == 1 else 1.0 - p1


def eval_stepwise_cpdf(spec: StepWiseChainSpec, k: int, a: int) -> float:
    if not 0 <= k <= spec.order:
        raise SpecError(f"k={k} outside 0..{spec.order}")
    p1 = spec.cpdf_one_k(k)
    return p1 if a == 1 else 1.0 - p1


def eval_cpdf(spec: ChainSpec, window, a: int) -> float:
    p1 = spec.cpdf_one(window)
    return p1 if a == 1 else 1.0 - p1


def two_sided_prob(spec: ChainSpec, before, after) -> float:
    """P(a_i = 1 | N symbols before, N symbols after).

    Each branch weight is the product of the N + 1 one-step probabilities
    that slide the window across positions i..i+N.
    """
    n = spec.order
    before = _check_window(before, n)
    after = _check_window(after, n)

    def branch(a):
        seq = before + (a,) + after
        weight = 1.0
        for pos in range(n, 2 * n + 1):
            weight *= eval_cpdf(spec, seq[pos - n:pos], seq[pos])
        return weight

    w1, w0 = branch(1), branch(0)
    return w1 / (w1 + w0)


def constant_memory_image(spec: AdditiveChainSpec) -> StepWiseChainSpec:
    """The step-wise chain that reproduces a constant memory function exactly."""
    f0 = spec.memory[0]
    if not np.all(spec.memory == f0):
        raise SpecError("memory function is not constant")
    mu = spec.order * f0 / 2
    return StepWiseChainSpec(spec.order, mu, 0.5 * (1 - 2 * spec.mean) * (1 - 2 * mu))


def linear_memory(order: int, f0: float) -> np.ndarray:
    """F(r) = f0 (1 - r/N) for r = 1..N (so F(N) = 0)."""
    r = np.arange(1, order + 1)
    return f0 * (1 - r / order)


def spec_from_dict(data: dict) -> ChainSpec:
    try:
        family = data["family"]
        if family == "additive":
            return AdditiveChainSpec(int(data["N"]), float(data["abar"]),
                                     np.asarray(data["F"], dtype=float))
        if family == "stepwise":
            return StepWiseChainSpec(int(data["N"]), float(data["mu"]),
                                     float(data.get("nu", 0.0)))
    except (KeyError, TypeError) as exc:
        raise SpecError(f"malformed spec document: {exc}") from exc
    raise SpecError(f"unknown chain family {data.get('family')!r}")


def spec_to_json(spec: ChainSpec) -> str:
    return json.dumps(spec.to_dict())


def spec_from_json(text: str) -> ChainSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise SpecError("spec document must be a JSON object")
    return spec_from_dict(data)


def load_spec(path) -> ChainSpec:
    return spec_from_json(Path(path).read_text())

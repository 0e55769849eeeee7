"""Information temperature of step-wise (and, via the mapping, additive) chains.

Natural units: the mean fictive interaction energy is 1, so ``1/tau`` is
dimensionless. ``mu = 0`` is the infinite-temperature point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field


class TemperatureError(ValueError):
    pass


def _check_mu(mu: float) -> None:
    if not abs(mu) < 0.5:
        raise TemperatureError(f"|mu| must be < 1/2 for a finite temperature, got {mu!r}")


def _log_ratio(mu: float) -> float:
    return math.log((1 + 2 * mu) / (1 - 2 * mu))


def inv_temperature(order: int, mu: float) -> float:
    """1/tau = ln((1 + 2mu)/(1 - 2mu)) / (2N)."""
    _check_mu(mu)
    if order < 1:
        raise TemperatureError("order must be >= 1")
    return _log_ratio(mu) / (2 * order)


def mu_from_inv_temperature(order: int, inv_tau: float) -> float:
    return 0.5 * math.tanh(order * inv_tau)


VARIANTS = ("n1_ising", "n2_entropy", "n3_asymptotic_small_mu", "high_T")


def inv_temperature_reference(order: int, mu: float, variant: str) -> float:
    """Reference formulas the unified expression must reproduce."""
    _check_mu(mu)
    required = {"n1_ising": 1, "n2_entropy": 2, "n3_asymptotic_small_mu": 3}
    if variant not in VARIANTS:
        raise TemperatureError(f"unknown variant {variant!r}")
    if variant in required and order != required[variant]:
        raise TemperatureError(f"variant {variant} requires N={required[variant]}, got N={order}")
    if variant == "n1_ising":
        return 0.5 * math.log((1 + 2 * mu) / (1 - 2 * mu))
    if variant == "n2_entropy":
        return 0.25 * math.log((1 + 2 * mu) / (1 - 2 * mu))
    if variant == "n3_asymptotic_small_mu":
        return 2 * mu / 3
    return 2 * mu / order


def persistence_parameter(order: int, mu: float) -> float:
    """n = N (1 - 2mu) / (4mu); n >> 1 weak, n << 1 strong persistence."""
    if mu == 0:
        raise TemperatureError("persistence parameter undefined at mu = 0 (infinite temperature)")
    return order * (1 - 2 * mu) / (4 * mu)


@dataclass(frozen=True)
class TemperatureReport:
    order: int
    mu: float
    inv_tau: float
    tau: float | str
    variant_values: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"N": self.order, "mu": self.mu, "inv_tau": self.inv_tau,
                "tau": self.tau, "variant_values": dict(self.variant_values)}


def temperature_report(order: int, mu: float) -> TemperatureReport:
    inv_tau = inv_temperature(order, mu)
    tau = "inf" if inv_tau == 0 else 1.0 / inv_tau
    variants = {"high_T": inv_temperature_reference(order, mu, "high_T")}
    if order == 1:
        variants["n1_ising"] = inv_temperature_reference(1, mu, "n1_ising")
    elif order == 2:
        variants["n2_entropy"] = inv_temperature_reference(2, mu, "n2_entropy")
    elif order == 3:
        variants["n3_asymptotic_small_mu"] = inv_temperature_reference(3, mu, "n3_asymptotic_small_mu")
    return TemperatureReport(order, mu, inv_tau, tau, variants)

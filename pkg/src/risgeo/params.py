"""Shared parameter containers and engineering-unit conversions.

All module math runs in linear units (watts, linear gains, meters); dBm/dB
enter only through the conversion helpers and `SystemParams.from_engineering`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .errors import DomainError


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** ((dbm - 30.0) / 10.0)


def watts_to_dbm(watts: float) -> float:
    if watts <= 0:
        raise DomainError("power must be positive to express in dBm")
    return 10.0 * math.log10(watts) + 30.0


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(linear: float) -> float:
    if linear <= 0:
        raise DomainError("gain must be positive to express in dB")
    return 10.0 * math.log10(linear)


@dataclass(frozen=True)
class SystemParams:
    """Physical link parameters in linear units.

    Pathloss follows gain ~ beta_ref * distance^(-alpha) per hop, with
    separate exponents for the direct, feeder (BS-RIS) and access (RIS-UE)
    links.  The served user lies in the cell-edge annulus [d_min, d_max];
    a reflector serves only within `serve_radius` of the user.
    """

    tx_power: float
    noise_power: float
    beta_ref: float
    alpha_direct: float
    alpha_bs_ris: float
    alpha_ris_ue: float
    d_min: float
    d_max: float
    serve_radius: float

    def __post_init__(self):
        if self.tx_power <= 0 or self.noise_power <= 0 or self.beta_ref <= 0:
            raise DomainError("powers and reference gain must be strictly positive")
        if self.alpha_direct < 2 or self.alpha_bs_ris < 2:
            raise DomainError("direct and feeder pathloss exponents must be >= 2")
        if not 2.0 <= self.alpha_ris_ue <= 4.0:
            raise DomainError("access pathloss exponent must lie in [2, 4]")
        if not 0 < self.d_min < self.d_max:
            raise DomainError("annulus requires 0 < d_min < d_max")
        if self.serve_radius <= 0:
            raise DomainError("serve_radius must be positive")

    @classmethod
    def from_engineering(
        cls,
        tx_power_dbm: float,
        noise_dbm: float,
        beta_db: float,
        alpha_direct: float,
        alpha_bs_ris: float,
        alpha_ris_ue: float,
        d_min: float,
        d_max: float,
        serve_radius: float,
    ) -> "SystemParams":
        return cls(
            tx_power=dbm_to_watts(tx_power_dbm),
            noise_power=dbm_to_watts(noise_dbm),
            beta_ref=db_to_linear(beta_db),
            alpha_direct=alpha_direct,
            alpha_bs_ris=alpha_bs_ris,
            alpha_ris_ue=alpha_ris_ue,
            d_min=d_min,
            d_max=d_max,
            serve_radius=serve_radius,
        )

    @property
    def snr_gain(self) -> float:
        """Transmit power over noise power (linear)."""
        return self.tx_power / self.noise_power

    def beta_direct(self, d: float) -> float:
        if d <= 0:
            raise DomainError("distance must be positive")
        return self.beta_ref * d ** (-self.alpha_direct)

    def beta_bs_ris(self, l: float) -> float:
        if l <= 0:
            raise DomainError("distance must be positive")
        return self.beta_ref * l ** (-self.alpha_bs_ris)

    def beta_ris_ue(self, r: float) -> float:
        if r <= 0:
            raise DomainError("distance must be positive")
        return self.beta_ref * r ** (-self.alpha_ris_ue)


@dataclass(frozen=True)
class LinkGeometry:
    """Fixed link distances: BS-UE (d), BS-RIS (l), RIS-UE (r), in meters."""

    d: float
    l: float
    r: float

    def __post_init__(self):
        if self.d <= 0 or self.l <= 0 or self.r <= 0:
            raise DomainError("all link distances must be positive")


#: Relative slack allowed on the density * array-size = budget coupling.
_BUDGET_COUPLING_TOL = 1e-9


@dataclass(frozen=True)
class DeploymentParams:
    """Reflector deployment: density (per m^2), elements per reflector, optional budget.

    When element_budget is present the coupling density * elements_per_ris
    == element_budget must hold to within 1e-9 relative.
    """

    density: float
    elements_per_ris: int
    element_budget: Optional[float] = None

    def __post_init__(self):
        if self.density <= 0:
            raise DomainError("density must be positive")
        if self.elements_per_ris < 1:
            raise DomainError("elements_per_ris must be at least 1")
        if self.element_budget is not None:
            lhs = self.density * self.elements_per_ris
            if abs(lhs - self.element_budget) > _BUDGET_COUPLING_TOL * self.element_budget:
                raise DomainError(
                    "density * elements_per_ris must equal element_budget "
                    f"({lhs} vs {self.element_budget})"
                )


@dataclass(frozen=True)
class RateEstimate:
    """A rate value in bps/Hz with its provenance.

    std_error is present only for Monte-Carlo estimates; `warning` carries
    soft-precondition flags from the producing operation.
    """

    value: float
    method: str  # "closed_form" | "quadrature" | "monte_carlo"
    std_error: Optional[float] = None
    warning: Optional[str] = None

    _METHODS = ("closed_form", "quadrature", "monte_carlo")

    def __post_init__(self):
        if self.method not in self._METHODS:
            raise DomainError(f"unknown method {self.method!r}")
        if self.value < 0:
            raise DomainError("rates are nonnegative")
        if self.std_error is not None and self.std_error < 0:
            raise DomainError("std_error must be nonnegative")
        if self.method == "monte_carlo" and self.std_error is None:
            raise DomainError("monte_carlo estimates must carry a std_error")

"""Physical constants, CSL parameters and the dimensionless working frame.

All heavy numerics downstream run in a frame where times are measured in
units of ``1/(c k_ref)`` and the particle mass is one.  SI magnitudes only
reappear when a rate or a photon number is assembled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from scipy import constants

__all__ = [
    "PhysicalParams",
    "DerivedParams",
    "ScaleFrame",
    "derive",
    "make_frame",
    "gamma_from_lambda",
    "lambda_from_gamma",
]

#: Conventional CSL values (GRW rate and correlation length).  These are the
#: customary choices in the literature, not measured quantities.
DEFAULT_LAMBDA = 1e-16
DEFAULT_R_C = 1e-7


def gamma_from_lambda(lambda_csl: float, r_C: float) -> float:
    """Raw collapse coupling gamma [m^3/s] from the collapse rate."""
    return lambda_csl * 8.0 * math.pi**1.5 * r_C**3


def lambda_from_gamma(gamma: float, r_C: float) -> float:
    return gamma / (8.0 * math.pi**1.5 * r_C**3)


@dataclass(frozen=True)
class PhysicalParams:
    """SI parameters of a single charged particle in a harmonic trap.

    Defaults describe an electron with the conventional CSL parameters and
    no trap (``omega0 = 0``).
    """

    e: float = constants.e
    m: float = constants.m_e
    m0: float = constants.m_p
    eps0: float = constants.epsilon_0
    hbar: float = constants.hbar
    c: float = constants.c
    lambda_csl: float = DEFAULT_LAMBDA
    r_C: float = DEFAULT_R_C
    omega0: float = 0.0

    def __post_init__(self):
        for f in fields(self):
            value = getattr(self, f.name)
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise TypeError(f"{f.name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise ValueError(f"{f.name} must be finite, got {value!r}")
            if f.name == "omega0":
                if value < 0:
                    raise ValueError(f"omega0 must be >= 0, got {value!r}")
            elif value <= 0:
                raise ValueError(f"{f.name} must be > 0, got {value!r}")

    @property
    def gamma(self) -> float:
        return gamma_from_lambda(self.lambda_csl, self.r_C)

    @classmethod
    def from_gamma(cls, gamma: float, r_C: float, **kwargs) -> "PhysicalParams":
        return cls(lambda_csl=lambda_from_gamma(gamma, r_C), r_C=r_C, **kwargs)


@dataclass(frozen=True)
class DerivedParams:
    beta: float   # radiation-reaction constant e^2/(6 pi eps0 c^3) [kg s]
    kappa: float  # spring constant m omega0^2 [kg/s^2]
    gamma: float  # collapse coupling [m^3/s]


def derive(params: PhysicalParams) -> DerivedParams:
    beta = params.e**2 / (6.0 * math.pi * params.eps0 * params.c**3)
    kappa = params.m * params.omega0**2
    return DerivedParams(beta=beta, kappa=kappa, gamma=params.gamma)


@dataclass(frozen=True)
class ScaleFrame:
    """Unit conventions for the dimensionless kernel computations.

    ``t_unit = 1/(c k_ref)`` and ``w_unit = 1/t_unit``.  The particle mass is
    the mass unit, so the radiation-reaction constant becomes the pure number
    ``damping = beta * w_unit / m``.

    ``number_prefactor`` turns a dimensionless kernel ``T`` into the photon
    number ``number_prefactor * Re T / omega_k_hat``; ``rate_prefactor`` turns
    its time derivative into ``dGamma/dk = rate_prefactor * omega_k_hat *
    Re dT/dt_hat``.  Both already contain the 8 pi k^2 direction and
    polarization sum where relevant.
    """

    t_unit: float
    w_unit: float
    k_ref: float
    damping: float
    number_prefactor: float
    rate_prefactor: float

    def to_time(self, t: float) -> float:
        return t / self.t_unit

    def from_time(self, t_hat: float) -> float:
        return t_hat * self.t_unit

    def to_freq(self, omega: float) -> float:
        return omega / self.w_unit

    def from_freq(self, omega_hat: float) -> float:
        return omega_hat * self.w_unit

    def omega_hat(self, k: float, c: float) -> float:
        """Dimensionless photon frequency for wavenumber ``k``."""
        return (c * k) / self.w_unit


def make_frame(params: PhysicalParams, k_ref: float, beta: float | None = None) -> ScaleFrame:
    """Build the working frame for reference wavenumber ``k_ref`` [1/m].

    ``beta`` overrides the radiation-reaction constant, which is how the
    beta-scaling studies probe the approach to the lowest order.
    """
    if not (k_ref > 0 and math.isfinite(k_ref)):
        raise ValueError(f"k_ref must be a positive finite wavenumber, got {k_ref!r}")
    if beta is None:
        beta = derive(params).beta
    w_unit = params.c * k_ref
    t_unit = 1.0 / w_unit
    base = (params.e**2 * params.hbar * params.lambda_csl) / (
        32.0 * math.pi**3 * params.eps0 * params.m0**2 * params.r_C**2
    )
    return ScaleFrame(
        t_unit=t_unit,
        w_unit=w_unit,
        k_ref=k_ref,
        damping=beta * w_unit / params.m,
        number_prefactor=base * t_unit**4,
        rate_prefactor=8.0 * math.pi * base * t_unit / params.c**2,
    )

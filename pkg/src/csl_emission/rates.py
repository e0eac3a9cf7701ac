"""Photon numbers and emission-rate densities dGamma/dk.

All rate densities are per unit wavenumber and already include the
``8 pi k^2`` sum over directions and polarizations.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial

from . import kernels
from .kernels import Order, Piece
from .noise import NoiseModel, White
from .oracles import central_diff
from .params import PhysicalParams, derive, make_frame

__all__ = [
    "Formula",
    "ResonanceError",
    "RateResult",
    "RateSpectrum",
    "naive_rate",
    "resummed_rate",
    "resummed_free_rate",
    "photon_number",
    "rate_from_photon_number",
    "rate_spectrum",
    "DEFAULT_GUARD",
]

#: default half-width of the excluded band, relative to the trap frequency
DEFAULT_GUARD = 1e-6
#: slope convergence tolerance
SLOPE_RTOL = 1e-4


class Formula(enum.Enum):
    NaiveFirstOrder = "NaiveFirstOrder"
    ResummedHarmonic = "ResummedHarmonic"
    ResummedFree = "ResummedFree"
    FromPhotonNumber = "FromPhotonNumber"


class ResonanceError(ValueError):
    def __init__(self, k, omega_k, omega0):
        super().__init__(
            f"k = {k!r} 1/m is resonant: omega_k = {omega_k:.17g} rad/s lies inside the "
            f"guard band around omega0 = {omega0:.17g} rad/s"
        )
        self.k = k


def _check_k(k):
    if not (k > 0 and math.isfinite(k)):
        raise ValueError(f"k must be a positive finite wavenumber, got {k!r}")


def _rate_constant(p: PhysicalParams) -> float:
    """``e^2 hbar lambda / (4 pi^2 eps0 m0^2 r_C^2)``."""
    return p.e**2 * p.hbar * p.lambda_csl / (4.0 * math.pi**2 * p.eps0 * p.m0**2 * p.r_C**2)


def naive_rate(params: PhysicalParams, model: NoiseModel, k: float) -> float:
    """First-order rate density; counts both ``f~(0)`` and ``f~(omega_k)``."""
    _check_k(k)
    omega_k = params.c * k
    spec = float(model.spectrum(0.0)) + float(model.spectrum(omega_k))
    return _rate_constant(params) / (params.c**3 * k) * spec


def is_resonant(params: PhysicalParams, k: float, guard: float = DEFAULT_GUARD) -> bool:
    return params.omega0 > 0 and abs(params.c * k - params.omega0) < guard * params.omega0


def resummed_rate(params: PhysicalParams, model: NoiseModel, k: float,
                  guard: float = DEFAULT_GUARD) -> float:
    """Rate density of the bound charge after summing the radiation reaction.

    Only the noise spectrum at the photon frequency enters.  Raises
    :class:`ResonanceError` within ``guard * omega0`` of the trap frequency.
    """
    _check_k(k)
    omega_k = params.c * k
    if is_resonant(params, k, guard):
        raise ResonanceError(k, omega_k, params.omega0)
    detuning = omega_k**2 - params.omega0**2
    return (_rate_constant(params) * params.c * k**3 / detuning**2
            * float(model.spectrum(omega_k)))


def resummed_free_rate(params: PhysicalParams, model: NoiseModel, k: float) -> float:
    """Free-charge limit of :func:`resummed_rate`."""
    _check_k(k)
    return _rate_constant(params) / (params.c**3 * k) * float(model.spectrum(params.c * k))


# ----------------------------------------------------------- photon number path

def _frame(params, model, k, beta_scale):
    beta = derive(params).beta * beta_scale
    frame = make_frame(params, k, beta=beta)
    return frame, model.scaled(frame.t_unit), frame.to_freq(params.omega0)


def photon_number(params: PhysicalParams, model: NoiseModel, k: float, t: float,
                  order=Order.LowestOrder, *, beta_scale: float = 1.0) -> float:
    """Expected photon number in mode ``k`` after time ``t`` [s].

    Raises :class:`~csl_emission.kernels.KernelRealityError` if the kernel
    total is not real to tolerance.
    """
    _check_k(k)
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return 0.0
    frame, m_hat, w0 = _frame(params, model, k, beta_scale)
    pieces = kernels.kernel_pieces(m_hat, 1.0, frame.to_time(t), damping=frame.damping,
                                   omega0=w0, order=Order(order))
    total = kernels.check_reality(pieces)
    return frame.number_prefactor * total.real


@dataclass(frozen=True)
class RateResult:
    rate: float
    converged: bool
    t: float
    order: Order


def _slope_lowest(frame, m_hat, w0, t_hat):
    pieces = kernels.kernel_pieces_rate(m_hat, 1.0, t_hat, damping=frame.damping,
                                        omega0=w0, order=Order.LowestOrder)
    return kernels.check_reality(pieces).real


def _slope_exact(frame, m_hat, w0, t_hat, h_rel):
    def re_total(s):
        pieces = kernels.kernel_pieces(m_hat, 1.0, s, damping=frame.damping, omega0=w0,
                                       order=Order.ExactBeta)
        return kernels.check_reality(pieces).real

    return central_diff(re_total, t_hat, h_rel)


def rate_from_photon_number(params: PhysicalParams, model: NoiseModel, k: float, t: float,
                            order=Order.LowestOrder, *, beta_scale: float = 1.0,
                            h_rel: float = 1e-5) -> RateResult:
    """``8 pi k^2 d<a+a>/dt`` at time ``t``, as a rate density.

    ``LowestOrder`` differentiates the window integral analytically and is
    converged once the window rate is within ``SLOPE_RTOL`` of half the
    spectrum.  ``ExactBeta`` uses a central difference and is converged when
    the slope at ``0.9 t`` agrees with the slope at ``t`` to ``SLOPE_RTOL``.
    """
    _check_k(k)
    if not t > 0:
        raise ValueError("t must be > 0")
    order = Order(order)
    frame, m_hat, w0 = _frame(params, model, k, beta_scale)
    t_hat = frame.to_time(t)
    if order is Order.LowestOrder:
        slope = _slope_lowest(frame, m_hat, w0, t_hat)
        if isinstance(m_hat, White):
            converged = True
        else:
            target = float(m_hat.spectrum(1.0))
            wr = kernels.window_rate(m_hat, 1.0, t_hat)
            converged = abs(2.0 * wr - target) <= SLOPE_RTOL * max(target, 1e-12)
    else:
        slope = _slope_exact(frame, m_hat, w0, t_hat, h_rel)
        earlier = _slope_exact(frame, m_hat, w0, 0.9 * t_hat, h_rel)
        converged = abs(slope - earlier) <= SLOPE_RTOL * max(abs(slope), 1e-300)
    return RateResult(frame.rate_prefactor * slope, bool(converged), t, order)


# -------------------------------------------------------------------- spectra

@dataclass(frozen=True)
class RateSpectrum:
    samples: list            # (k [1/m], rate density [1/(m s)])
    formula: Formula
    params: PhysicalParams
    noise: NoiseModel
    converged: list = field(default_factory=list)
    excluded: list = field(default_factory=list)  # resonant k values left out

    @property
    def all_converged(self) -> bool:
        return all(self.converged)


def _one(k, params, model, formula, t, order, beta_scale, guard):
    if formula is Formula.NaiveFirstOrder:
        return naive_rate(params, model, k), True
    if formula is Formula.ResummedHarmonic:
        return resummed_rate(params, model, k, guard), True
    if formula is Formula.ResummedFree:
        return resummed_free_rate(params, model, k), True
    res = rate_from_photon_number(params, model, k, t, order, beta_scale=beta_scale)
    return res.rate, res.converged


def rate_spectrum(params: PhysicalParams, model: NoiseModel, ks, formula=Formula.ResummedHarmonic,
                  *, t: float | None = None, order=Order.LowestOrder, beta_scale: float = 1.0,
                  guard: float = DEFAULT_GUARD, jobs: int = 1) -> RateSpectrum:
    """Evaluate one formula on a wavenumber grid.

    Resonant wavenumbers (within ``guard * omega0``) are skipped for the
    harmonic formulas and listed in ``excluded``.  ``jobs > 1`` spreads the
    samples over worker processes; output order always follows ``ks``.
    """
    formula = Formula(formula)
    order = Order(order)
    if formula is Formula.FromPhotonNumber and t is None:
        raise ValueError("FromPhotonNumber needs a time t")
    ks = [float(k) for k in ks]
    skip = formula in (Formula.ResummedHarmonic, Formula.FromPhotonNumber)
    excluded = [k for k in ks if skip and is_resonant(params, k, guard)]
    kept = [k for k in ks if k not in excluded]
    work = partial(_one, params=params, model=model, formula=formula, t=t, order=order,
                   beta_scale=beta_scale, guard=guard)
    if jobs > 1 and len(kept) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(work, kept))
    else:
        results = [work(k) for k in kept]
    return RateSpectrum(
        samples=[(k, r) for k, (r, _) in zip(kept, results)],
        formula=formula,
        params=params,
        noise=model,
        converged=[c for _, c in results],
        excluded=excluded,
    )

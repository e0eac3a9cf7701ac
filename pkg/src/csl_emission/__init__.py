"""Spontaneous photon emission of a charged particle driven by collapse noise.

Rate densities for the naive first-order and the radiation-reaction
resummed descriptions, the photon-number kernel they come from, and the
brute-force oracles that check them.
"""

__version__ = "0.1.0"

from .params import PhysicalParams, DerivedParams, ScaleFrame, derive, make_frame
from .noise import White, ExponentialOU, GaussianCorr, Mixture, make_noise
from .greens import RunawayPolicy, char_roots, roots, eval_propagators
from .kernels import Order, Piece, i_ab, window_integral, window_rate, t_piece, t_total
from .rates import (
    Formula,
    RateSpectrum,
    naive_rate,
    resummed_rate,
    resummed_free_rate,
    photon_number,
    rate_from_photon_number,
    rate_spectrum,
)

__all__ = [
    "PhysicalParams", "DerivedParams", "ScaleFrame", "derive", "make_frame",
    "White", "ExponentialOU", "GaussianCorr", "Mixture", "make_noise",
    "RunawayPolicy", "char_roots", "roots", "eval_propagators",
    "Order", "Piece", "i_ab", "window_integral", "window_rate", "t_piece", "t_total",
    "Formula", "RateSpectrum", "naive_rate", "resummed_rate", "resummed_free_rate",
    "photon_number", "rate_from_photon_number", "rate_spectrum",
]

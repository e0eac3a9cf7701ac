"""Characteristic roots and the propagator functions F0, F1, G0+-, G1+-.

The bound charge with radiation reaction has the resolvent
``1/H(z)`` with ``H(z) = -beta (z - z1)(z - z2)(z - z3)``; the overall sign is
the one that reproduces the printed residue coefficients
``-1/(beta (z1-z2)(z1-z3))`` etc.  Each propagator is a finite sum of
exponentials ``coef * exp(rate * t)``, kept symbolically as a list of
:class:`ExpTerm` so the kernel integrals can be done term by term.

Root ``z1 = m/beta`` is the runaway solution.  ``DropRunaway`` deletes its
terms and nothing else.
"""

from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass
from typing import NamedTuple

from .params import DerivedParams, PhysicalParams

__all__ = [
    "CharRoots",
    "RunawayPolicy",
    "PropagatorSet",
    "ExpTerm",
    "RunawayOverflowError",
    "roots",
    "char_roots",
    "eval_propagators",
    "asymptotic_G0",
    "oscillatory_denominator",
    "f0_terms",
    "f1_terms",
    "g0_terms",
    "g1_terms",
    "evaluate_terms",
    "asymptotic_G0_limit",
    "bracket",
]

#: largest runaway exponent z1*t evaluated under KeepAll
RUNAWAY_EXPONENT_LIMIT = 600.0


class RunawayPolicy(enum.Enum):
    DropRunaway = "DropRunaway"
    KeepAll = "KeepAll"


class RunawayOverflowError(ValueError):
    pass


class ExpTerm(NamedTuple):
    coef: complex
    rate: complex
    tag: str  # "z1", "z2", "z3", "osc" or "const"


@dataclass(frozen=True)
class CharRoots:
    z1: complex
    z2: complex
    z3: complex
    beta: float
    mass: float
    omega0: float

    @property
    def decay_rate(self) -> float:
        """Damping rate of the bound motion, ``omega0^2 beta / (2 m)``."""
        return -self.z2.real


def char_roots(mass: float, beta: float, omega0: float) -> CharRoots:
    """Closed-form roots for a given mass, radiation constant and trap frequency."""
    if not beta > 0:
        raise ValueError(
            "beta must be > 0: the roots degenerate at beta = 0 (z1 = m/beta); "
            "use the lowest-order limiting forms instead"
        )
    if mass <= 0 or omega0 < 0:
        raise ValueError("need mass > 0 and omega0 >= 0")
    damping = omega0**2 * beta / (2.0 * mass)
    z1 = complex(mass / beta, 0.0)
    z2 = complex(-damping, omega0)
    z3 = complex(-damping, -omega0)
    return CharRoots(z1, z2, z3, float(beta), float(mass), float(omega0))


def roots(params: PhysicalParams, derived: DerivedParams) -> CharRoots:
    return char_roots(params.m, derived.beta, params.omega0)


def oscillatory_denominator(mass: float, beta: float, omega0: float, s: complex) -> complex:
    """``beta (z1+s)(z2+s)(z3+s)`` written so that ``beta = 0`` is allowed.

    Uses ``beta z1 = m`` and ``(z2+s)(z3+s) = s^2 - 2 d s + d^2 + omega0^2``
    with ``d = omega0^2 beta / (2 m)``.  Equals ``H(-s)``.
    """
    d = omega0**2 * beta / (2.0 * mass)
    return (mass + beta * s) * (s * s - 2.0 * d * s + d * d + omega0**2)


def _residues(r: CharRoots):
    if r.z2 == r.z3:
        raise ValueError(
            "z2 == z3 (omega0 = 0): the expanded propagator forms are singular; "
            "the finite-beta propagators need a trap, omega0 > 0"
        )
    b = r.beta
    c1 = -1.0 / (b * (r.z1 - r.z2) * (r.z1 - r.z3))
    c2 = 1.0 / (b * (r.z1 - r.z2) * (r.z2 - r.z3))
    c3 = -1.0 / (b * (r.z1 - r.z3) * (r.z2 - r.z3))
    return ((c1, r.z1, "z1"), (c2, r.z2, "z2"), (c3, r.z3, "z3"))


def _apply(terms, policy):
    if policy is RunawayPolicy.DropRunaway:
        return [t for t in terms if t.tag != "z1"]
    return list(terms)


def f0_terms(r: CharRoots, policy=RunawayPolicy.DropRunaway):
    return _apply([ExpTerm(c, z, tag) for c, z, tag in _residues(r)], policy)


def f1_terms(r: CharRoots, policy=RunawayPolicy.DropRunaway):
    terms = [ExpTerm(c / z, z, tag) for c, z, tag in _residues(r)]
    terms.append(ExpTerm(1.0 / (r.beta * r.z1 * r.z2 * r.z3), 0j, "const"))
    return _apply(terms, policy)


def _sign(sign) -> int:
    if sign in (+1, "+"):
        return 1
    if sign in (-1, "-"):
        return -1
    raise ValueError(f"sign must be +1 or -1, got {sign!r}")


def g0_terms(r: CharRoots, omega_k: float, sign, policy=RunawayPolicy.DropRunaway):
    s = _sign(sign) * 1j * omega_k
    terms = [ExpTerm(c / (z + s), z, tag) for c, z, tag in _residues(r)]
    # residue at z = -s; the sign makes G0(0) = 0 for both branches
    terms.append(ExpTerm(1.0 / oscillatory_denominator(r.mass, r.beta, r.omega0, s), -s, "osc"))
    return _apply(terms, policy)


def g1_terms(r: CharRoots, omega_k: float, sign, policy=RunawayPolicy.DropRunaway):
    s = _sign(sign) * 1j * omega_k
    terms = [ExpTerm(c * z / (z + s), z, tag) for c, z, tag in _residues(r)]
    terms.append(ExpTerm(-s / oscillatory_denominator(r.mass, r.beta, r.omega0, s), -s, "osc"))
    return _apply(terms, policy)


def evaluate_terms(terms, t) -> complex:
    return sum(term.coef * cmath.exp(term.rate * t) for term in terms)


@dataclass(frozen=True)
class PropagatorSet:
    omega_k: float
    t: float
    policy: RunawayPolicy
    F0: complex
    F1: complex
    G0_plus: complex
    G0_minus: complex
    G1_plus: complex
    G1_minus: complex


def eval_propagators(r: CharRoots, omega_k: float, t: float,
                     policy=RunawayPolicy.DropRunaway) -> PropagatorSet:
    """Evaluate all six propagator functions at photon frequency ``omega_k`` and time ``t``.

    Times and frequencies must be in the same units as the roots.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t!r}")
    policy = RunawayPolicy(policy)
    if policy is RunawayPolicy.KeepAll and r.z1.real * t > RUNAWAY_EXPONENT_LIMIT:
        raise RunawayOverflowError(
            f"z1*t = {r.z1.real * t:.3g} exceeds {RUNAWAY_EXPONENT_LIMIT:g}; "
            "exp(z1 t) would overflow. Use RunawayPolicy.DropRunaway."
        )
    return PropagatorSet(
        omega_k=omega_k,
        t=t,
        policy=policy,
        F0=evaluate_terms(f0_terms(r, policy), t),
        F1=evaluate_terms(f1_terms(r, policy), t),
        G0_plus=evaluate_terms(g0_terms(r, omega_k, +1, policy), t),
        G0_minus=evaluate_terms(g0_terms(r, omega_k, -1, policy), t),
        G1_plus=evaluate_terms(g1_terms(r, omega_k, +1, policy), t),
        G1_minus=evaluate_terms(g1_terms(r, omega_k, -1, policy), t),
    )


def asymptotic_G0(r: CharRoots, omega_k: float, t: float, sign) -> complex:
    """Surviving oscillatory term of G0+- once the transients have died out."""
    s = _sign(sign) * 1j * omega_k
    return cmath.exp(-s * t) / oscillatory_denominator(r.mass, r.beta, r.omega0, s)


def asymptotic_G0_limit(mass: float, beta: float, omega0: float, omega_k: float,
                        t: float, sign) -> complex:
    """Same as :func:`asymptotic_G0` but accepts ``beta = 0``."""
    s = _sign(sign) * 1j * omega_k
    return cmath.exp(-s * t) / oscillatory_denominator(mass, beta, omega0, s)


def bracket(mass: float, beta: float, omega0: float) -> float:
    """``1 - kappa/(beta z1 z2 z3)`` with ``kappa = m omega0^2``.

    Equals ``x/(1+x)`` with ``x = (omega0 beta / 2m)^2``; zero at beta = 0
    and at omega0 = 0.
    """
    x = (omega0 * beta / (2.0 * mass)) ** 2
    return x / (1.0 + x)


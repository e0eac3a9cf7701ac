"""Two-time noise integrals and the photon-number kernel T(t).

The kernel is split as ``T = T_A + T_B + T_C + T_D`` with

* ``u(t1) = -exp(-i w t) G1^-(k, t1)``
* ``v(t1) = G0^+(k, t) [-i w + i w kappa F1(t1) + kappa F0(t1)]``

and ``T_XY = int_0^t int_0^t f(t1 - t2) conj(X(t2)) Y(t1)``:
A = (u, u), B = (u, v), C = (v, u), D = (v, v).  Both ``u`` and the bracket
in ``v`` are finite sums of exponentials, so every piece reduces to
weighted sums of ``I(a, b)``.

``LowestOrder`` keeps only the persistent exponents (the oscillatory term
of G1^- and the constant term of the bracket); ``ExactBeta`` keeps every
non-runaway exponent.  In both, the outer ``G0^+(k, t)`` factor is the
surviving oscillatory term.

Everything here is dimensionless: mass one, times in the frame unit.
"""

from __future__ import annotations

import cmath
import enum
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import greens
from .greens import ExpTerm, RunawayPolicy
from .noise import NoiseModel
from .params import PhysicalParams, derive, make_frame

__all__ = [
    "Order",
    "Piece",
    "KernelValue",
    "KernelRealityError",
    "BranchDiscrepancyWarning",
    "DEGENERATE_THRESHOLD",
    "i_ab",
    "i_ab_rate",
    "window_integral",
    "window_rate",
    "u_terms",
    "v_terms",
    "kernel_pieces",
    "kernel_pieces_rate",
    "t_piece",
    "t_total",
]

#: switch to the a+b -> 0 branch below this value of |a+b| t
DEGENERATE_THRESHOLD = 1e-6
_BAND = (0.5, 2.0)
_BAND_RTOL = 1e-8
REALITY_RTOL = 1e-10


class Order(enum.Enum):
    LowestOrder = "LowestOrder"
    ExactBeta = "ExactBeta"


class Piece(enum.Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"
    Total = "Total"
    Iab = "Iab"
    Window = "Window"


class BranchDiscrepancyWarning(RuntimeWarning):
    pass


class KernelRealityError(ArithmeticError):
    def __init__(self, message, pieces):
        super().__init__(message)
        self.pieces = pieces


@dataclass(frozen=True)
class KernelValue:
    value: complex
    piece: Piece
    t: float
    k: float
    meta: dict = field(default_factory=dict, compare=False)


def _hint(*rates):
    return max((abs(r) for r in rates), default=0.0)


def _two_term(model, a, b, t):
    s = a + b
    # exp((a+b)t) is carried inside the first integrand so nothing overflows
    first = model.integrate(
        lambda x: 0.5 * (np.exp(a * t + b * (t - x)) + np.exp(b * t + a * (t - x))),
        t, phase_rate=_hint(a, b))
    second = model.integrate(
        lambda x: 0.5 * (np.exp(a * x) + np.exp(b * x)),
        t, phase_rate=_hint(a, b))
    return 2.0 * first / s - 2.0 * second / s


def _exprel_small(z):
    # (exp(z) - 1)/z for |z| <~ 1e-5
    return 1.0 + z / 2.0 + z * z / 6.0 + z**3 / 24.0 + z**4 / 120.0


def _degenerate(model, a, b, t):
    # int f(x) (e^{ax} + e^{bx}) (e^{s(t-x)} - 1)/s dx; reduces to
    # 2 int f(x) (t - x) cosh(a x) dx at s = 0
    s = a + b
    return model.integrate(
        lambda x: (np.exp(a * x) + np.exp(b * x)) * (t - x) * _exprel_small(s * (t - x)),
        t, phase_rate=_hint(a, b))


def i_ab(model: NoiseModel, a: complex, b: complex, t: float) -> complex:
    """``int_0^t int_0^t f(t1 - t2) exp(a t1) exp(b t2) dt1 dt2``.

    Requires ``Re a, Re b <= 0``.  Uses the two-term closed form with the
    inner x-integrals done by quadrature (exactly for white noise), and the
    ``a + b -> 0`` branch when ``|a + b| t`` is below
    :data:`DEGENERATE_THRESHOLD`.  Near the switch both branches are
    computed and a :class:`BranchDiscrepancyWarning` is issued if they
    disagree.
    """
    a = complex(a)
    b = complex(b)
    if a.real > 1e-300 or b.real > 1e-300:
        raise ValueError(f"i_ab needs Re a, Re b <= 0 (runaway-free), got a={a}, b={b}")
    if t <= 0:
        return 0j
    x = abs(a + b) * t
    lo, hi = _BAND[0] * DEGENERATE_THRESHOLD, _BAND[1] * DEGENERATE_THRESHOLD
    if x >= DEGENERATE_THRESHOLD:
        value = _two_term(model, a, b, t)
    else:
        value = _degenerate(model, a, b, t)
    if lo <= x <= hi:
        other = _degenerate(model, a, b, t) if x >= DEGENERATE_THRESHOLD else _two_term(model, a, b, t)
        scale = max(abs(value), abs(other), 1e-300)
        if abs(value - other) > _BAND_RTOL * scale:
            warnings.warn(
                f"I(a,b) branches disagree by {abs(value - other) / scale:.2e} "
                f"at |a+b|t = {x:.3e}", BranchDiscrepancyWarning, stacklevel=2)
    return value


def i_ab_rate(model: NoiseModel, a: complex, b: complex, t: float) -> complex:
    """Time derivative of :func:`i_ab`,
    ``int_0^t f(x) [exp(a t + b (t-x)) + exp(b t + a (t-x))] dx``."""
    a = complex(a)
    b = complex(b)
    if t <= 0:
        return 0j
    return model.integrate(
        lambda x: np.exp(a * t + b * (t - x)) + np.exp(b * t + a * (t - x)),
        t, phase_rate=_hint(a, b))


def window_integral(model: NoiseModel, omega: float, t: float) -> float:
    """``int_0^t f(x) (t - x) cos(omega x) dx``."""
    if t <= 0:
        return 0.0
    val = model.integrate(lambda x: (t - x) * np.cos(omega * x) + 0j, t, phase_rate=abs(omega))
    return val.real


def window_rate(model: NoiseModel, omega: float, t: float) -> float:
    """``d/dt`` of :func:`window_integral`, i.e. ``int_0^t f(x) cos(omega x) dx``.

    Tends to half the noise spectrum at ``omega`` for long times.
    """
    if t <= 0:
        return 0.0
    val = model.integrate(lambda x: np.cos(omega * x) + 0j, t, phase_rate=abs(omega))
    return val.real


# ---------------------------------------------------------------- kernel terms

def u_terms(omega_k, t, *, damping, omega0, order):
    """Exponential terms of ``u(t1) = -exp(-i w t) G1^-(k, t1)``."""
    order = Order(order)
    phase = -cmath.exp(-1j * omega_k * t)
    if order is Order.LowestOrder:
        s = -1j * omega_k
        coef = -s / greens.oscillatory_denominator(1.0, damping, omega0, s)
        return [ExpTerm(phase * coef, 1j * omega_k, "osc")]
    r = greens.char_roots(1.0, damping, omega0)
    return [ExpTerm(phase * c, z, tag)
            for c, z, tag in greens.g1_terms(r, omega_k, -1, RunawayPolicy.DropRunaway)]


def v_terms(omega_k, t, *, damping, omega0, order):
    """Exponential terms of ``v(t1) = G0^+(k,t) [-i w + i w kappa F1 + kappa F0]``."""
    order = Order(order)
    g0 = greens.asymptotic_G0_limit(1.0, damping, omega0, omega_k, t, +1)
    const = -1j * omega_k * greens.bracket(1.0, damping, omega0)
    terms = [ExpTerm(g0 * const, 0j, "const")]
    if order is Order.LowestOrder:
        return terms
    kappa = omega0**2
    r = greens.char_roots(1.0, damping, omega0)
    f0 = {tm.tag: tm for tm in greens.f0_terms(r)}
    f1 = {tm.tag: tm for tm in greens.f1_terms(r)}
    for tag in ("z2", "z3"):
        coef = kappa * (1j * omega_k * f1[tag].coef + f0[tag].coef)
        terms.append(ExpTerm(g0 * coef, f0[tag].rate, tag))
    return terms


_PAIRS = {Piece.A: ("u", "u"), Piece.B: ("u", "v"), Piece.C: ("v", "u"), Piece.D: ("v", "v")}


def _combine(model, left, right, t, integral):
    total = 0j
    for lt in left:          # conjugated factor, variable t2
        for rt in right:     # plain factor, variable t1
            c = lt.coef.conjugate() * rt.coef
            if c == 0:
                continue
            total += c * integral(model, rt.rate, lt.rate.conjugate(), t)
    return total


def _pieces(model, omega_k, t, damping, omega0, order, integral, pieces):
    terms = {
        "u": u_terms(omega_k, t, damping=damping, omega0=omega0, order=order),
        "v": v_terms(omega_k, t, damping=damping, omega0=omega0, order=order),
    }
    out = {}
    for piece in pieces:
        left, right = _PAIRS[piece]
        out[piece] = _combine(model, terms[left], terms[right], t, integral)
    return out


def kernel_pieces(model, omega_k, t, *, damping, omega0, order, pieces=tuple(_PAIRS)):
    """Dimensionless ``{Piece: value}`` for the requested pieces."""
    if t <= 0:
        return {Piece(p): 0j for p in pieces}
    return _pieces(model, omega_k, t, damping, omega0, Order(order), i_ab,
                   [Piece(p) for p in pieces])


def kernel_pieces_rate(model, omega_k, t, *, damping, omega0, order, pieces=tuple(_PAIRS)):
    """Analytic time derivatives of :func:`kernel_pieces`.

    The coefficient products carry no net time dependence (the phases of
    ``u`` and ``v`` cancel), so only the ``I(a, b)`` factors are
    differentiated.  For the lowest-order ``T_A`` this is exactly twice the
    window rate.
    """
    order = Order(order)
    pieces = [Piece(p) for p in pieces]
    if t <= 0:
        return {p: 0j for p in pieces}
    out = {}
    if order is Order.LowestOrder and Piece.A in pieces:
        (ua,) = u_terms(omega_k, t, damping=damping, omega0=omega0, order=order)
        out[Piece.A] = abs(ua.coef) ** 2 * 2.0 * window_rate(model, omega_k, t) + 0j
        pieces = [p for p in pieces if p is not Piece.A]
    out.update(_pieces(model, omega_k, t, damping, omega0, order, i_ab_rate, pieces))
    return out


# ---------------------------------------------------------------- SI wrappers

def _scaled_setup(params: PhysicalParams, model, k, t, beta_scale):
    beta = derive(params).beta * beta_scale
    frame = make_frame(params, k, beta=beta)
    return frame, model.scaled(frame.t_unit), frame.to_time(t)


def t_piece(piece, params: PhysicalParams, model: NoiseModel, k: float, t: float,
            order=Order.LowestOrder, *, beta_scale: float = 1.0) -> KernelValue:
    """One kernel piece at wavenumber ``k`` [1/m] and time ``t`` [s].

    The value is dimensionless, in the frame with ``k_ref = k`` (so the
    photon frequency is one).  ``beta_scale`` multiplies the
    radiation-reaction constant; zero is allowed for ``LowestOrder``.
    """
    piece = Piece(piece)
    if piece not in _PAIRS:
        raise ValueError(f"t_piece computes A, B, C or D, not {piece}")
    order = Order(order)
    frame, m_hat, t_hat = _scaled_setup(params, model, k, t, beta_scale)
    val = kernel_pieces(m_hat, 1.0, t_hat, damping=frame.damping,
                        omega0=frame.to_freq(params.omega0), order=order,
                        pieces=(piece,))[piece]
    return KernelValue(val, piece, t, k, {"noise": model, "order": order,
                                          "policy": RunawayPolicy.DropRunaway,
                                          "beta_scale": beta_scale})


def check_reality(pieces: dict, rtol: float = REALITY_RTOL) -> complex:
    total = sum(pieces.values())
    scale = max(abs(total), max((abs(v) for v in pieces.values()), default=0.0))
    if scale > 0 and abs(total.imag) > rtol * scale:
        raise KernelRealityError(
            f"kernel total has imaginary part {total.imag:.3e} "
            f"(relative {abs(total.imag) / scale:.2e})", dict(pieces))
    return total


def t_total(params: PhysicalParams, model: NoiseModel, k: float, t: float,
            order=Order.LowestOrder, *, beta_scale: float = 1.0) -> KernelValue:
    order = Order(order)
    frame, m_hat, t_hat = _scaled_setup(params, model, k, t, beta_scale)
    pieces = kernel_pieces(m_hat, 1.0, t_hat, damping=frame.damping,
                           omega0=frame.to_freq(params.omega0), order=order)
    total = check_reality(pieces)
    return KernelValue(total, Piece.Total, t, k, {"noise": model, "order": order,
                                                  "pieces": pieces,
                                                  "beta_scale": beta_scale})


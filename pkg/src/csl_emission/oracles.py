"""Independent brute-force checks.

Nothing in here calls the closed forms it is used to verify: the 2D
quadrature integrates double integrals directly, the Gaussian moments are
integrated on a 3D grid, and the commutator rule is tested on truncated
number-basis matrices with a locally written matrix exponential.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from ._quad import gauss_legendre, panel_rule

__all__ = [
    "Quad2DResult",
    "quad2d",
    "GaussianMomentCheck",
    "gaussian_moment_closed_form",
    "gaussian_moment_check",
    "iij_limit_check",
    "FockOperators",
    "fock_operators",
    "expm",
    "ExpmConvergenceError",
    "commutator_identity_check",
    "central_diff",
    "loglog_slope",
]


# ------------------------------------------------------------------ 2D quadrature

@dataclass(frozen=True)
class Quad2DResult:
    value: complex
    abs_err_estimate: float
    panels: int
    converged: bool


_LO, _HI = 7, 14


def _square_rule(n):
    x, w = gauss_legendre(n)
    u = 0.5 * (x + 1.0)
    wu = 0.5 * w
    uu, vv = np.meshgrid(u, u, indexing="ij")
    ww = np.outer(wu, wu)
    return uu.ravel(), vv.ravel(), ww.ravel()


_SQ = {n: _square_rule(n) for n in (_LO, _HI)}


def _panel(integrand, x0, y0, h, diagonal, n):
    u, v, w = _SQ[n]
    if not diagonal:
        vals = integrand(x0 + h * u, y0 + h * v)
        return h * h * np.sum(w * vals)
    # split along t1 = t2; collapsed (Duffy) map on each triangle
    lower = integrand(x0 + h * u, y0 + h * u * v)   # t2 <= t1
    upper = integrand(x0 + h * u * v, y0 + h * u)   # t1 <= t2
    return h * h * np.sum(w * u * (lower + upper))


def quad2d(integrand, t, target_rel_err=1e-10, *, max_panels=40_000):
    """Adaptive quadrature of ``integrand(t1, t2)`` over ``[0, t]^2``.

    Panels are squares from a dyadic quadtree; squares on the diagonal
    ``t1 = t2`` are integrated as two triangles, so a kink of
    ``f(t1 - t2)`` at zero lag costs nothing.  The error estimate of a panel
    is the difference between a 7x7 and a 14x14 Gauss rule; the panel with
    the largest estimate is split until the summed estimate drops below
    ``target_rel_err`` times the result.
    """
    if target_rel_err < 1e-10:
        raise ValueError("target_rel_err below 1e-10 is not supported")
    if t <= 0:
        return Quad2DResult(0j, 0.0, 0, True)

    def evaluate(x0, y0, h, diag):
        hi = complex(_panel(integrand, x0, y0, h, diag, _HI))
        lo = complex(_panel(integrand, x0, y0, h, diag, _LO))
        return hi, abs(hi - lo)

    heap = []
    counter = 0
    value, err = evaluate(0.0, 0.0, t, True)
    heapq.heappush(heap, (-err, counter, 0.0, 0.0, t, True, value))
    n_panels = 1
    total = value
    total_err = err
    l1 = abs(value)
    while True:
        tol = target_rel_err * max(abs(total), 1e-3 * l1)
        if total_err <= tol:
            converged = True
            break
        if n_panels + 3 > max_panels:
            converged = False
            break
        neg_err, _, x0, y0, h, diag, pval = heapq.heappop(heap)
        total -= pval
        total_err += neg_err
        h2 = 0.5 * h
        for i in (0, 1):
            for j in (0, 1):
                cdiag = diag and i == j
                cx, cy = x0 + i * h2, y0 + j * h2
                cval, cerr = evaluate(cx, cy, h2, cdiag)
                counter += 1
                heapq.heappush(heap, (-cerr, counter, cx, cy, h2, cdiag, cval))
                total += cval
                total_err += cerr
        n_panels += 3
        l1 = sum(abs(item[6]) for item in heap) if n_panels % 64 == 1 else max(l1, abs(total))
    # re-sum to shed accumulated rounding from the running totals
    vals = [item[6] for item in heap]
    total = complex(math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals))
    total_err = math.fsum(-item[0] for item in heap)
    return Quad2DResult(total, total_err, n_panels, converged)


# ------------------------------------------------------------ Gaussian moments

@dataclass(frozen=True)
class GaussianMomentCheck:
    numeric: np.ndarray
    analytic: np.ndarray
    max_rel_err: float


def gaussian_moment_closed_form(a_vec, r_C):
    """X_ij for half-separation ``a = (q - q')/2`` and smearing length ``r_C``."""
    a = np.asarray(a_vec, dtype=float)
    pref = np.exp(-a @ a / r_C**2) / ((2.0 * math.pi) ** 3 * r_C**6)
    return pref * (np.eye(3) * math.pi**1.5 * r_C**5 / 2.0 - np.outer(a, a) * r_C**3 * math.pi**1.5)


def _box_rule(half_width, n_panels=4, n=16):
    x, w = panel_rule(-half_width, half_width, 2.0 * half_width / n_panels, n)
    return x, w


def _g(x2, r_C):
    return np.exp(-x2 / (2.0 * r_C**2)) / (math.sqrt(2.0 * math.pi) * r_C) ** 3


def gaussian_moment_check(a_vec, r_C, *, half_width=8.0):
    """Integrate ``int g(x-q)(x_i-q_i)(x_j-q'_j) g(x-q') dx`` on a 3D grid.

    ``q = a`` and ``q' = -a`` (only the separation matters).  The box is
    ``+-half_width * r_C`` per axis.
    """
    if not r_C > 0:
        raise ValueError("r_C must be > 0")
    a = np.asarray(a_vec, dtype=float)
    x, w = _box_rule(half_width * r_C)
    X = np.stack(np.meshgrid(x, x, x, indexing="ij"))          # (3, n, n, n)
    W = w[:, None, None] * w[None, :, None] * w[None, None, :]
    dq = X - a[:, None, None, None]
    dqp = X + a[:, None, None, None]
    G = W * _g(np.sum(dq**2, axis=0), r_C) * _g(np.sum(dqp**2, axis=0), r_C)
    numeric = np.empty((3, 3))
    for i in range(3):
        Gi = G * dq[i]
        for j in range(3):
            numeric[i, j] = np.sum(Gi * dqp[j])
    analytic = gaussian_moment_closed_form(a, r_C)
    scale = np.max(np.abs(analytic))
    return GaussianMomentCheck(numeric, analytic, float(np.max(np.abs(numeric - analytic)) / scale))


def iij_limit_check(r_C, width_ratio=0.01):
    """I_ij for a packet pair localized to relative width ``width_ratio * r_C``.

    The separation ``d = q - q'`` is Gaussian-distributed with standard
    deviation ``w`` per axis; the smeared moment ``X_ij(d/2)`` is integrated
    against it on a 3D grid.  The localized limit is
    ``delta_ij / (16 pi^{3/2} r_C)``.
    """
    if not r_C > 0:
        raise ValueError("r_C must be > 0")
    width = width_ratio * r_C
    x, w = _box_rule(8.0 * width)
    D = np.stack(np.meshgrid(x, x, x, indexing="ij"))
    W = w[:, None, None] * w[None, :, None] * w[None, None, :]
    d2 = np.sum(D**2, axis=0)
    K = np.exp(-d2 / (2.0 * width**2)) / (math.sqrt(2.0 * math.pi) * width) ** 3
    pref = W * K * np.exp(-d2 / (4.0 * r_C**2)) / (8.0 * math.pi**1.5 * r_C**3)
    out = np.empty((3, 3))
    for i in range(3):
        for j in range(3):
            bracket = (r_C**2 / 2.0 if i == j else 0.0) - D[i] * D[j] / 4.0
            out[i, j] = np.sum(pref * bracket)
    return out


# ----------------------------------------------------------- truncated Fock space

@dataclass(frozen=True)
class FockOperators:
    dim: int
    q_matrix: np.ndarray
    p_matrix: np.ndarray


def fock_operators(dim: int) -> FockOperators:
    """Position and momentum in the number basis, hbar = m = omega = 1."""
    if dim < 2:
        raise ValueError("dim must be >= 2")
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(complex)
    ad = a.conj().T
    q = (a + ad) / math.sqrt(2.0)
    p = 1j * (ad - a) / math.sqrt(2.0)
    return FockOperators(dim, q, p)


class ExpmConvergenceError(ArithmeticError):
    pass


def expm(M, tol=1e-12, max_terms=60):
    """Matrix exponential by scaling and squaring with a Taylor core.

    The argument is halved until its 1-norm is at most 1/2; the series is
    then summed until the tail bound ``term * x / (1 - x)`` is below
    ``tol`` relative to the partial sum.
    """
    M = np.asarray(M)
    norm = float(np.max(np.sum(np.abs(M), axis=0))) if M.size else 0.0
    if not math.isfinite(norm):
        raise ExpmConvergenceError(f"matrix exponential of non-finite argument (norm {norm})")
    s = max(0, math.ceil(math.log2(norm / 0.5))) if norm > 0.5 else 0
    B = M / 2.0**s
    x = norm / 2.0**s
    out = np.eye(M.shape[0], dtype=np.result_type(M, complex))
    term = out.copy()
    for k in range(1, max_terms + 1):
        term = term @ B / k
        out = out + term
        tnorm = float(np.max(np.sum(np.abs(term), axis=0)))
        if tnorm * x / (1.0 - x) <= tol * max(1.0, float(np.max(np.sum(np.abs(out), axis=0)))):
            break
    else:
        raise ExpmConvergenceError(f"Taylor series did not converge; ||M|| = {norm:.3g}")
    for _ in range(s):
        out = out @ out
    return out


#: Reject exponents so large that squaring would amplify rounding beyond use.
EXPM_NORM_LIMIT = 1e4


def commutator_identity_check(dim, alpha, a_coef=1.0, b_coef=1.0):
    """Relative error of ``[A, exp(alpha O^2)] = [A, O] 2 alpha O exp(alpha O^2)``.

    ``A = q``, ``B = p`` and ``O = a q + b p`` as truncated matrices.  The
    error is measured on the central ``dim/2`` block, away from both the
    vacuum corner and the truncation edge.  Returns 0 when both sides vanish
    there to rounding (``O`` commuting with ``A``).
    """
    if dim < 16:
        raise ValueError("dim must be >= 16")
    ops = fock_operators(dim)
    A = ops.q_matrix
    O = a_coef * ops.q_matrix + b_coef * ops.p_matrix
    M = alpha * (O @ O)
    norm = float(np.max(np.sum(np.abs(M), axis=0)))
    if norm > EXPM_NORM_LIMIT:
        raise ExpmConvergenceError(f"||alpha O^2|| = {norm:.3g} exceeds {EXPM_NORM_LIMIT:g}")
    try:
        E = expm(M)
    except ExpmConvergenceError as exc:
        raise ExpmConvergenceError(f"exp(alpha O^2) failed, ||alpha O^2|| = {norm:.3g}") from exc
    lhs = A @ E - E @ A
    C = A @ O - O @ A
    rhs = C @ (2.0 * alpha * O @ E)
    blk = slice(dim // 4, dim // 4 + dim // 2)
    lhs_b, rhs_b = lhs[blk, blk], rhs[blk, blk]
    denom = np.linalg.norm(lhs_b)
    floor = 1e-12 * np.linalg.norm(A) * np.linalg.norm(E)
    if denom <= floor and np.linalg.norm(rhs_b) <= floor:
        return 0.0
    return float(np.linalg.norm(lhs_b - rhs_b) / denom)


# ----------------------------------------------------------------- derivatives

def central_diff(fn, t, h_rel=1e-5):
    """Central difference at ``t`` with step ``h_rel * t``, one Richardson step."""
    h = h_rel * abs(t) if t != 0 else h_rel

    def d(step):
        return (fn(t + step) - fn(t - step)) / (2.0 * step)

    return (4.0 * d(0.5 * h) - d(h)) / 3.0


def loglog_slope(x, y):
    """Least-squares slope of ``log|y|`` against ``log x``; None if any y is zero."""
    x = np.asarray(x, dtype=float)
    y = np.abs(np.asarray(y))
    if np.any(y == 0) or not np.all(np.isfinite(y)) or len(x) < 2:
        return None
    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)

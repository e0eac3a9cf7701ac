"""Oracle suite behind ``csl-emission verify``.

Each check returns a measured error and is judged against its tolerance
times a global ``tolerance_scale``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import kernels, oracles, rates
from .noise import ExponentialOU, GaussianCorr, White
from .params import PhysicalParams

__all__ = ["CheckResult", "CHECKS", "run_checks", "format_table"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    tolerance: float
    error: float
    passed: bool


def _rel(x, y):
    return abs(x - y) / max(abs(y), 1e-300)


def check_factor_two(params=None):
    p = params or PhysicalParams()
    w = White()
    ks = np.logspace(5, 9, 50)
    return max(abs(rates.naive_rate(p, w, k) / rates.resummed_free_rate(p, w, k) - 2.0) / 2.0
               for k in ks)


def check_resummation(params=None):
    base = params or PhysicalParams()
    k = 1e7
    wk = base.c * k
    errs = []
    for ratio in (0.0, 0.3):
        p = PhysicalParams(**{**base.__dict__, "omega0": ratio * wk})
        for model in (White(), *(ExponentialOU(x / wk) for x in (0.1, 1.0, 10.0))):
            t = 40.0 * getattr(model, "tau", 1.0 / wk)
            res = rates.rate_from_photon_number(p, model, k, t, kernels.Order.LowestOrder,
                                                beta_scale=0.0)
            errs.append(_rel(res.rate, rates.resummed_rate(p, model, k)))
    return max(errs)


def iab_draws(n=20, seed=20240611):
    """Reproducible (model, a, b, t) draws with ``Re a, Re b <= 0``."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n):
        tau = float(rng.uniform(0.2, 2.0))
        model = ExponentialOU(tau) if i % 2 == 0 else GaussianCorr(tau)
        a = complex(-rng.uniform(0.0, 0.5), rng.uniform(-3.0, 3.0))
        b = complex(-rng.uniform(0.0, 0.5), rng.uniform(-3.0, 3.0))
        t = float(rng.uniform(0.5, 5.0))
        out.append((model, a, b, t))
    return out


def iab_quad(model, a, b, t, target_rel_err=1e-10):
    return oracles.quad2d(
        lambda t1, t2: model.correlation(t1 - t2) * np.exp(a * t1 + b * t2),
        t, target_rel_err)


def check_iab_oracle(n=20):
    errs = []
    for model, a, b, t in iab_draws(n):
        q = iab_quad(model, a, b, t)
        errs.append(_rel(kernels.i_ab(model, a, b, t), q.value))
    return max(errs)


def check_window(tau=1.0):
    model = ExponentialOU(tau)
    return max(_rel(kernels.window_rate(model, x / tau, 40.0 * tau),
                    0.5 * float(model.spectrum(x / tau)))
               for x in (0.1, 1.0, 10.0))


def check_gaussian_moments(r_C=1e-7):
    errs = []
    for ax in (0.0, 0.5, 1.0):
        for ay in (0.0, 0.5, 1.0):
            for az in (0.0, 0.5, 1.0):
                errs.append(oracles.gaussian_moment_check(
                    np.array([ax, ay, az]) * r_C, r_C).max_rel_err)
    return max(errs)


def check_iij(r_C=1e-7):
    limit = 1.0 / (16.0 * math.pi**1.5 * r_C)
    vals = oracles.iij_limit_check(r_C, 0.01)
    return float(np.max(np.abs(np.diag(vals) - limit)) / limit)


def check_commutator():
    return oracles.commutator_identity_check(64, 0.05j, 1.0, 1.0)


#: name -> (tolerance, check)
CHECKS: dict[str, tuple[float, Callable[[], float]]] = {
    "factor_two": (1e-12, check_factor_two),
    "resummation": (1e-6, check_resummation),
    "iab_vs_quad2d": (1e-7, check_iab_oracle),
    "window_asymptotics": (1e-4, check_window),
    "gaussian_moments": (1e-8, check_gaussian_moments),
    "iij_limit": (1e-2, check_iij),
    "fock_commutator": (1e-6, check_commutator),
}


def run_checks(tolerance_scale: float = 1.0, names=None) -> list[CheckResult]:
    out = []
    for name, (tol, fn) in CHECKS.items():
        if names is not None and name not in names:
            continue
        err = float(fn())
        scaled = tol * tolerance_scale
        out.append(CheckResult(name, scaled, err, bool(err <= scaled)))
    return out


def format_table(results) -> str:
    lines = [f"{'check':<20} {'tolerance':>10} {'error':>10}  verdict"]
    for r in results:
        lines.append(f"{r.name:<20} {r.tolerance:>10.1e} {r.error:>10.2e}  "
                     f"{'PASS' if r.passed else 'FAIL'}")
    return "\n".join(lines)

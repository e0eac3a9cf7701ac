import cmath

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from csl_emission.greens import (
    RunawayOverflowError,
    RunawayPolicy,
    asymptotic_G0,
    asymptotic_G0_limit,
    bracket,
    char_roots,
    eval_propagators,
    f1_terms,
    roots,
)
from csl_emission.params import PhysicalParams, derive

KEEP, DROP = RunawayPolicy.KeepAll, RunawayPolicy.DropRunaway


def _expanded(r, w, t, keep_runaway=True):
    """Hand-written term-by-term propagator forms, independent of the term lists."""
    z1, z2, z3, b = r.z1, r.z2, r.z3, r.beta
    e1 = cmath.exp(z1 * t) if keep_runaway else 0.0
    e2, e3 = cmath.exp(z2 * t), cmath.exp(z3 * t)
    d1 = b * (z1 - z2) * (z1 - z3)
    d2 = b * (z1 - z2) * (z2 - z3)
    d3 = b * (z1 - z3) * (z2 - z3)
    F0 = -e1 / d1 + e2 / d2 - e3 / d3
    F1 = -e1 / (z1 * d1) + e2 / (z2 * d2) - e3 / (z3 * d3) + 1 / (b * z1 * z2 * z3)
    out = {"F0": F0, "F1": F1}
    for name, sg in (("plus", 1), ("minus", -1)):
        s = sg * 1j * w
        osc = cmath.exp(-s * t) / (b * (z1 + s) * (z2 + s) * (z3 + s))
        out["G0_" + name] = (-e1 / (d1 * (z1 + s)) + e2 / (d2 * (z2 + s)) - e3 / (d3 * (z3 + s))
                             + osc)
        out["G1_" + name] = (-z1 * e1 / (d1 * (z1 + s)) + z2 * e2 / (d2 * (z2 + s))
                             - z3 * e3 / (d3 * (z3 + s)) - s * osc)
    return out


R = char_roots(1.0, 0.05, 0.8)


def test_root_invariants():
    assert R.z1 == 20.0
    assert R.z3 == R.z2.conjugate()
    assert R.z2.real == pytest.approx(-0.8**2 * 0.05 / 2)
    assert R.z2.imag == 0.8
    assert (R.z2 + R.z3).real == pytest.approx(-0.8**2 * 0.05)
    prod = R.beta * R.z1 * R.z2 * R.z3
    assert abs(prod - (0.8**4 * 0.05**2 / 4 + 0.8**2)) <= 1e-12 * abs(prod)


@settings(max_examples=60)
@given(m=st.floats(0.1, 10), beta=st.floats(1e-6, 1.0), w0=st.floats(0.0, 5.0))
def test_root_product_identity(m, beta, w0):
    r = char_roots(m, beta, w0)
    prod = r.beta * r.z1 * r.z2 * r.z3
    expect = m * (w0**4 * beta**2 / (4 * m**2) + w0**2)
    assert abs(prod - expect) <= 1e-12 * max(abs(expect), 1e-300)
    assert r.z1.imag == 0 and r.z1.real > 0
    assert r.z2.real <= 0


def test_no_trap_roots_coincide():
    r = char_roots(1.0, 0.1, 0.0)
    assert r.z2 == r.z3 == 0


def test_zero_damping_rejected():
    with pytest.raises(ValueError, match="limiting forms"):
        char_roots(1.0, 0.0, 1.0)


def test_roots_from_physical_params():
    p = PhysicalParams(omega0=1e12)
    r = roots(p, derive(p))
    assert r.z1.real == pytest.approx(p.m / derive(p).beta)
    assert r.decay_rate == pytest.approx(p.omega0**2 * derive(p).beta / (2 * p.m))


@pytest.mark.parametrize("t", [0.0, 0.3, 2.0, 7.5])
@pytest.mark.parametrize("w", [0.5, 1.7])
def test_matches_expanded_forms(t, w):
    ps = eval_propagators(R, w, t, KEEP)
    ref = _expanded(R, w, t)
    for name in ("F0", "F1", "G0_plus", "G0_minus", "G1_plus", "G1_minus"):
        got = getattr(ps, name)
        # absolute floor for the cancellation at t = 0
        assert abs(got - ref[name]) <= 1e-12 * abs(ref[name]) + 1e-14, name


def test_drop_runaway_removes_only_runaway_terms():
    for t in (0.0, 1.0, 40.0):
        ps = eval_propagators(R, 1.3, t, DROP)
        ref = _expanded(R, 1.3, t, keep_runaway=False)
        for name in ("F0", "F1", "G0_plus", "G0_minus", "G1_plus", "G1_minus"):
            assert abs(getattr(ps, name) - ref[name]) <= 1e-12 * max(abs(ref[name]), 1e-14)


def test_all_terms_cancel_at_start():
    ps = eval_propagators(R, 1.1, 0.0, KEEP)
    for name in ("F0", "G0_plus", "G0_minus"):
        assert abs(getattr(ps, name)) < 1e-13


def test_late_time_limits():
    w = 1.4
    t = 2000.0  # many decay times
    ps = eval_propagators(R, w, t, DROP)
    r = R
    assert ps.F1 == pytest.approx(1 / (r.beta * r.z1 * r.z2 * r.z3), rel=1e-9)
    assert ps.G1_plus == pytest.approx(-1j * w * ps.G0_plus, rel=1e-9)
    assert ps.G1_minus == pytest.approx(1j * w * ps.G0_minus, rel=1e-9)
    assert ps.G0_plus == pytest.approx(asymptotic_G0(r, w, t, +1), rel=1e-9)


@settings(max_examples=50)
@given(t=st.floats(0, 50), w=st.floats(0.1, 5))
def test_conjugation_symmetry(t, w):
    ps = eval_propagators(R, w, t, DROP)
    for a, b in ((ps.G0_plus, ps.G0_minus), (ps.G1_plus, ps.G1_minus)):
        assert abs(a - b.conjugate()) <= 1e-12 * max(abs(a), 1e-14)


def test_runaway_guard():
    with pytest.raises(RunawayOverflowError, match="DropRunaway"):
        eval_propagators(R, 1.0, 31.0, KEEP)
    eval_propagators(R, 1.0, 1e6, DROP)


def test_negative_time_rejected():
    with pytest.raises(ValueError):
        eval_propagators(R, 1.0, -1.0)


def test_asymptotic_magnitude_is_constant():
    vals = [abs(asymptotic_G0(R, 1.2, t, -1)) for t in (0.0, 3.0, 99.0)]
    assert max(vals) - min(vals) <= 1e-15 * vals[0]


def test_free_undamped_magnitude():
    assert abs(asymptotic_G0_limit(2.0, 0.0, 0.0, 3.0, 1.0, +1)) == pytest.approx(1 / (2.0 * 9.0))


def test_undamped_limit_is_order_damping():
    w0, w = 0.7, 1.9
    limit = 1.0 / (w0**2 - w**2)
    errs = []
    betas = [1e-3, 1e-4, 1e-5]
    for b in betas:
        val = asymptotic_G0(char_roots(1.0, b, w0), w, 0.37, +1) * cmath.exp(1j * w * 0.37)
        errs.append(abs(val - limit))
    slope = np.polyfit(np.log(betas), np.log(errs), 1)[0]
    assert slope == pytest.approx(1.0, abs=0.05)


def test_transient_decays_at_damping_rate():
    r = char_roots(1.0, 0.01, 1.0)
    period = 2 * np.pi / r.omega0
    n = np.arange(1, int(3 / r.decay_rate / period) + 1)
    ts = n * period
    rem = [abs(eval_propagators(r, 2.0, t, DROP).G0_plus - asymptotic_G0(r, 2.0, t, +1))
           for t in ts]
    rate = -np.polyfit(ts, np.log(rem), 1)[0]
    assert rate == pytest.approx(r.decay_rate, rel=1e-3)


def test_bracket_values():
    assert bracket(1.0, 0.0, 2.0) == 0.0
    assert bracket(1.0, 0.5, 0.0) == 0.0
    m, b, w0 = 1.3, 0.2, 0.9
    r = char_roots(m, b, w0)
    direct = 1 - m * w0**2 / (b * r.z1 * r.z2 * r.z3)
    assert bracket(m, b, w0) == pytest.approx(direct.real, rel=1e-12)


def test_constant_term_of_integrated_propagator():
    const = [t for t in f1_terms(R) if t.tag == "const"][0]
    assert const.coef == pytest.approx(1 / (R.beta * R.z1 * R.z2 * R.z3))


def test_flipped_oscillatory_sign_breaks_start_condition():
    # the alternative sign on the persistent term of the plus branch cannot
    # vanish at t = 0, which is why the residue-consistent sign is used
    ref = _expanded(R, 1.1, 0.0)
    s = 1j * 1.1
    osc = 1 / (R.beta * (R.z1 + s) * (R.z2 + s) * (R.z3 + s))
    assert abs(ref["G0_plus"]) < 1e-13
    assert abs(ref["G0_plus"] - 2 * osc) > 0.1 * abs(osc)

import math

import numpy as np
import pytest
from pydantic import ValidationError

from model.chemistry import (
    IonInvariants,
    _bisect_log,
    base_fraction_for_ph,
    charge_balance_residual,
    charge_balance_root,
    default_constants,
    hydrogen_ion,
    ph_of,
    quartic_coeffs,
    reachable_ph,
    sign_changes,
    speciation,
    titration_curve,
)
from utility.errors import NoRoot


def test_pure_water_is_neutral(k):
    assert ph_of(IonInvariants(alpha=0.0, beta=0.0), k) == pytest.approx(7.0, abs=1e-6)


def test_quartic_root_matches_charge_balance_on_grid(k):
    for alpha in np.linspace(0.0, 0.1, 21):
        for beta in np.linspace(0.0, 0.1, 21):
            inv = IonInvariants(alpha=float(alpha), beta=float(beta))
            h = hydrogen_ion(inv, k)
            assert h == pytest.approx(charge_balance_root(inv, k), rel=1e-9)


def test_root_zeroes_charge_balance(k):
    inv = IonInvariants(alpha=0.02, beta=0.03)
    h = hydrogen_ion(inv, k)
    assert abs(charge_balance_residual(inv, k, h)) < 1e-12
    assert quartic_coeffs(inv, k).evaluate(h) == pytest.approx(0.0, abs=1e-12)


def test_single_positive_root(k):
    for alpha, beta in [(0.0, 0.0), (0.05, 0.01), (0.01, 0.05), (0.026, 0.052)]:
        assert sign_changes(IonInvariants(alpha=alpha, beta=beta), k) == 1


def test_single_positive_root_on_grid(k):
    grid = np.linspace(0.0, 0.1, 21)
    for alpha in grid:
        for beta in grid:
            inv = IonInvariants(alpha=float(alpha), beta=float(beta))
            assert sign_changes(inv, k, n=2_000) == 1, (alpha, beta)


@pytest.mark.parametrize("beta", [0.0, 0.01, 0.05, 0.1])
def test_ph_falls_with_more_acid(k, beta):
    phs = [ph_of(IonInvariants(alpha=float(a), beta=beta), k) for a in np.linspace(0.0, 0.1, 21)]
    assert all(b < a for a, b in zip(phs, phs[1:]))


def test_acid_side_starts_near_three(k):
    assert ph_of(IonInvariants(alpha=5e-4, beta=0.0), k) == pytest.approx(3.0, abs=0.5)


def test_strong_base_side(k):
    # NaOH 0.01 M
    assert ph_of(IonInvariants(alpha=0.0, beta=0.01), k) == pytest.approx(12.0, abs=1e-3)


def test_titration_is_s_shaped_around_equivalence(k):
    alpha = 0.026
    betas = np.linspace(0.0, 0.1, 2001)
    curve = titration_curve(alpha, list(betas), k)
    ph = np.array([p for _, p in curve])
    assert np.all(np.diff(ph) > 0)
    slope = np.diff(ph) / np.diff(betas)
    beta_steepest = betas[int(np.argmax(slope))]
    assert 1.9 * alpha <= beta_steepest <= 2.1 * alpha


def test_titration_rejects_bad_sweeps(k):
    with pytest.raises(ValueError):
        titration_curve(0.01, [], k)
    with pytest.raises(ValueError):
        titration_curve(0.01, [0.0, -0.01], k)
    with pytest.raises(ValueError):
        titration_curve(0.01, [0.02, 0.01], k)


def test_speciation_conserves_sulfate(k):
    inv = IonInvariants(alpha=0.03, beta=0.02)
    s = speciation(inv, k, hydrogen_ion(inv, k))
    assert s.h2so4 + s.hso4 + s.so4 == pytest.approx(0.03, rel=1e-12)
    assert s.na == 0.02
    assert s.h * s.oh == pytest.approx(k.kw, rel=1e-12)


def test_speciation_needs_positive_h(k):
    with pytest.raises(ValueError):
        speciation(IonInvariants(alpha=0.0, beta=0.0), k, 0.0)


def test_bisection_without_sign_change_raises():
    with pytest.raises(NoRoot):
        _bisect_log(lambda h: 1.0)


def test_invariants_reject_negative_values():
    with pytest.raises(ValidationError):
        IonInvariants(alpha=-1e-3, beta=0.0)


@pytest.mark.parametrize("ph", [3.0, 5.5, 7.0, 8.5, 10.0, 11.5])
def test_base_fraction_inverts_steady_titration(k, ph):
    c1, c2 = 0.052, 0.052
    r = base_fraction_for_ph(ph, c1, c2, k)
    inv = IonInvariants(alpha=c1 * (1.0 - r), beta=c2 * r)
    assert ph_of(inv, k) == pytest.approx(ph, abs=1e-6)


def test_base_fraction_clamps_outside_reachable_range(k):
    lo, hi = reachable_ph(0.052, 0.052, k)
    assert lo < 2.0 and hi > 12.0
    assert base_fraction_for_ph(lo - 0.5, 0.052, 0.052, k) == 0.0
    assert base_fraction_for_ph(hi + 0.5, 0.052, 0.052, k) == 1.0


def test_base_fraction_grows_with_ph(k):
    fractions = [base_fraction_for_ph(ph, 0.051, 0.0489, k) for ph in np.linspace(2.0, 12.0, 41)]
    assert all(b > a for a, b in zip(fractions, fractions[1:]))


def test_constants_overridden_from_environment(monkeypatch, fresh_settings):
    monkeypatch.setenv("PHSIM_K2", "0.01")
    k = default_constants()
    assert k.k2 == 0.01
    assert k.k1 == 1.0e3
    assert math.isclose(k.kw, 1.0e-14)

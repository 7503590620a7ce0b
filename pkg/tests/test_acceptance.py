"""
End-to-end checks of the chemistry, tuning, fuzzy map, integrator and the three preset runs
"""
import math

import numpy as np
import pytest

from controller.fuzzy_controller import FuzzyController
from controller.pid_controller import ZnUltimate, zn_tune
from harness.acceptance import check_comparison, check_step_timing, check_tracking
from harness.experiments import experiment_1, experiment_2, experiment_3
from harness.metrics import SETTLING_BAND, compute_metrics
from harness.runner import run_experiment
from model.chemistry import IonInvariants, charge_balance_root, hydrogen_ion, ph_of, titration_curve
from model.plant import PlantParams, PlantState, ValveModel, plant_step


def test_neutral_water(k):
    assert ph_of(IonInvariants(alpha=0.0, beta=0.0), k) == pytest.approx(7.0, abs=1e-6)


def test_charge_balance_agrees_with_quartic_root(k):
    grid = np.linspace(0.0, 0.1, 21)
    worst = max(
        abs(hydrogen_ion(inv, k) / charge_balance_root(inv, k) - 1.0)
        for inv in (IonInvariants(alpha=float(a), beta=float(b)) for a in grid for b in grid)
    )
    assert worst <= 1e-9


def test_titration_shape(k):
    alpha = 0.026
    betas = np.linspace(0.0, 0.1, 1001)
    ph = np.array([p for _, p in titration_curve(alpha, list(betas), k)])
    assert np.all(np.diff(ph) > 0)
    steepest = betas[int(np.argmax(np.diff(ph)))]
    assert 1.9 * alpha <= steepest <= 2.1 * alpha


def test_ziegler_nichols_numbers():
    gains = zn_tune(ZnUltimate(g=18.0, p=33.0), "PID")
    assert (gains.kp, gains.ki, gains.kd) == pytest.approx((10.8, 0.6545454545, 44.55))


def test_fuzzy_crisp_map():
    fc = FuzzyController()
    assert abs(fc.controller_output(0.0)) <= 0.05
    assert fc.controller_output(2.0) == pytest.approx(40.0, abs=0.5)
    assert fc.controller_output(-2.0) == pytest.approx(-40.0, abs=0.5)


def test_integrator_order_and_steady_state():
    params = PlantParams(volume=1.0)
    ideal = (ValveModel(hysteresis_eps=0.0),) * 2
    f1, f2 = 0.05, 0.05
    start = PlantState(inv=IonInvariants(alpha=0.0, beta=0.0), f1_actual=f1, f2_actual=f2)

    def alpha_after(dt, horizon):
        state = start
        for _ in range(int(round(horizon / dt))):
            state = plant_step(state, f1, f2, params, ideal, dt)
        return state.inv.alpha

    alpha_inf = params.c1 * f1 / (f1 + f2)
    exact = alpha_inf * (1.0 - math.exp(-(f1 + f2) * 20.0 / params.volume))
    ratio = abs(alpha_after(2.0, 20.0) - exact) / abs(alpha_after(1.0, 20.0) - exact)
    assert 8.0 <= ratio <= 32.0
    residence = params.volume / (f1 + f2)
    assert alpha_after(0.5, 20 * residence) == pytest.approx(alpha_inf, rel=1e-6)


@pytest.fixture(scope="module")
def exp1_run():
    cfg = experiment_1()
    return cfg, run_experiment(cfg, name="exp1")


@pytest.mark.acceptance
def test_experiment_1_step_timing(exp1_run):
    cfg, trace = exp1_run
    checks = {c.name: c for c in check_step_timing(trace, cfg.schedule)}
    assert checks["step_up_entry"].passed, checks["step_up_entry"].detail
    assert checks["down_faster_than_up"].passed, checks["down_faster_than_up"].detail
    down = compute_metrics(trace, cfg.schedule).segments[2]
    assert down.overshoot_ph < SETTLING_BAND


@pytest.mark.acceptance
def test_experiment_1_metrics_sane(exp1_run):
    cfg, trace = exp1_run
    metrics = compute_metrics(trace, cfg.schedule)
    assert len(metrics.segments) == 3
    assert metrics.rmse_ph <= 3.0
    for seg in metrics.segments:
        if seg.rise_time_s is not None and seg.settling_time_s is not None:
            assert seg.settling_time_s >= seg.rise_time_s


@pytest.mark.acceptance
def test_experiment_2_tracking():
    cfg = experiment_2()
    trace = run_experiment(cfg, name="exp2")
    failed = [c for c in check_tracking(trace, cfg.schedule) if not c.passed]
    assert not failed, "; ".join(f"{c.name}: {c.detail}" for c in failed)


@pytest.mark.acceptance
def test_experiment_3_hybrid_tracks_better():
    hybrid, fuzzy_only = experiment_3()
    m_hybrid = compute_metrics(run_experiment(hybrid, name="hybrid"), hybrid.schedule)
    m_fuzzy = compute_metrics(run_experiment(fuzzy_only, name="fuzzy_only"), fuzzy_only.schedule)
    (check,) = check_comparison(m_hybrid, m_fuzzy)
    assert check.passed, check.detail

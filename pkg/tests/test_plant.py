import math

import numpy as np
import pytest
from pydantic import ValidationError

from model.chemistry import IonInvariants, ph_of
from model.plant import (
    PlantParams,
    PlantState,
    ValveModel,
    invariant_derivatives,
    measure,
    plant_step,
    steady_state,
    valve_step,
)
from utility.errors import StateDiverged

IDEAL = ValveModel(hysteresis_eps=0.0)


def _run(state, params, f1, f2, dt, horizon):
    for _ in range(int(round(horizon / dt))):
        state = plant_step(state, f1, f2, params, (IDEAL, IDEAL), dt)
    return state


def test_derivatives_of_fresh_feed():
    params = PlantParams(volume=1.0, c1=0.052, c2=0.052)
    state = PlantState(inv=IonInvariants(alpha=0.0, beta=0.0), f1_actual=0.004, f2_actual=0.006)
    d_alpha, d_beta = invariant_derivatives(state, params)
    assert d_alpha == pytest.approx(2.08e-4)
    assert d_beta == pytest.approx(3.12e-4)


def test_valve_first_order_response():
    valve = ValveModel(tau_open=8.0, tau_close=5.0, hysteresis_eps=0.0)
    assert valve_step(0.0, 0.05, valve, 8.0) == pytest.approx(0.05 * (1.0 - math.exp(-1.0)))
    assert valve_step(0.05, 0.0, valve, 5.0) == pytest.approx(0.05 * math.exp(-1.0))


def test_valve_holds_when_command_equals_flow():
    assert valve_step(0.03, 0.03, ValveModel(), 0.1) == 0.03


def test_valve_hysteresis_depends_on_direction():
    valve = ValveModel(hysteresis_eps=0.04)
    opening = 0.0
    closing = 0.05
    for _ in range(2000):
        opening = valve_step(opening, 0.04, valve, 0.1)
        closing = valve_step(closing, 0.04, valve, 0.1)
    assert opening == pytest.approx(0.04 * 0.96, rel=1e-6)
    assert closing == pytest.approx(0.04 * 1.04, rel=1e-6)


def test_valve_rejects_large_hysteresis():
    with pytest.raises(ValidationError):
        ValveModel(hysteresis_eps=0.1)


def test_rk4_error_shrinks_sixteenfold_when_step_halves():
    params = PlantParams(volume=1.0, c1=0.052, c2=0.052)
    f1 = f2 = 0.05
    start = PlantState(inv=IonInvariants(alpha=0.0, beta=0.0), f1_actual=f1, f2_actual=f2)
    horizon = 20.0
    alpha_inf = params.c1 * f1 / (f1 + f2)
    exact = alpha_inf * (1.0 - math.exp(-(f1 + f2) * horizon / params.volume))

    err_coarse = abs(_run(start, params, f1, f2, 2.0, horizon).inv.alpha - exact)
    err_fine = abs(_run(start, params, f1, f2, 1.0, horizon).inv.alpha - exact)
    assert 8.0 <= err_coarse / err_fine <= 32.0


def test_converges_to_analytic_steady_state():
    params = PlantParams(volume=1.0, c1=0.052, c2=0.04, f_max=0.1)
    f1, f2 = 0.03, 0.07
    start = PlantState(inv=IonInvariants(alpha=0.01, beta=0.0), f1_actual=f1, f2_actual=f2)
    residence = params.volume / (f1 + f2)
    final = _run(start, params, f1, f2, 0.5, 20 * residence)
    target = steady_state(f1, f2, params)
    assert final.inv.alpha == pytest.approx(params.c1 * f1 / (f1 + f2), rel=1e-6)
    assert final.inv.alpha == pytest.approx(target.alpha, rel=1e-6)
    assert final.inv.beta == pytest.approx(target.beta, rel=1e-6)


def test_steady_state_needs_flow():
    with pytest.raises(ValueError):
        steady_state(0.0, 0.0, PlantParams())


def test_step_advances_time_and_keeps_flows_in_range():
    params = PlantParams()
    state = PlantState(inv=IonInvariants(alpha=0.01, beta=0.01), f1_actual=0.02, f2_actual=0.02)
    nxt = plant_step(state, 1.0, 0.0, params, (ValveModel(), ValveModel()), 0.1)
    assert nxt.t == pytest.approx(0.1)
    assert 0.0 <= nxt.f1_actual <= params.f_max
    assert nxt.f2_actual < state.f2_actual


def test_unstable_step_raises_state_diverged():
    params = PlantParams(volume=1.0)
    state = PlantState(inv=IonInvariants(alpha=0.0, beta=0.0), f1_actual=0.05, f2_actual=0.05)
    with pytest.raises(StateDiverged):
        plant_step(state, 0.05, 0.05, params, (IDEAL, IDEAL), 100.0)


def test_step_rejects_non_positive_dt():
    state = PlantState(inv=IonInvariants(alpha=0.0, beta=0.0), f1_actual=0.0, f2_actual=0.0)
    with pytest.raises(ValueError):
        plant_step(state, 0.0, 0.0, PlantParams(), (IDEAL, IDEAL), 0.0)


def test_measure_reports_equilibrium_ph(k):
    params = PlantParams()
    inv = IonInvariants(alpha=0.02, beta=0.03)
    state = PlantState(inv=inv, f1_actual=0.01, f2_actual=0.02, t=3.0)
    readings = measure(state, params)
    assert readings.ph == pytest.approx(ph_of(inv, k))
    assert (readings.f1, readings.f2, readings.t) == (0.01, 0.02, 3.0)
    assert (readings.c1_meas, readings.c2_meas) == (params.c1, params.c2)


def test_measure_noise_is_seeded():
    params = PlantParams(ph_noise_sigma=0.05)
    state = PlantState(inv=IonInvariants(alpha=0.02, beta=0.04), f1_actual=0.01, f2_actual=0.02)
    a = measure(state, params, np.random.default_rng(7)).ph
    b = measure(state, params, np.random.default_rng(7)).ph
    clean = measure(state, params).ph
    assert a == b
    assert a != clean


def test_params_reject_unknown_fields():
    with pytest.raises(ValidationError):
        PlantParams(volum=2.0)


def test_opening_valve_never_exceeds_f_max():
    valve = ValveModel(hysteresis_eps=0.0)
    flow = 0.04
    for _ in range(500):
        flow = valve_step(flow, 0.08, valve, 0.1, f_max=0.05)
        assert flow <= 0.05
    assert flow == pytest.approx(0.05, rel=1e-6)


def test_over_range_command_integrates_at_recorded_flow():
    params = PlantParams(volume=1.0)
    start = PlantState(inv=IonInvariants(alpha=0.0, beta=0.0), f1_actual=0.02, f2_actual=params.f_max)
    over, at_max = start, start
    for _ in range(100):
        over = plant_step(over, 0.02, 0.07, params, (IDEAL, IDEAL), 0.1)
        at_max = plant_step(at_max, 0.02, params.f_max, params, (IDEAL, IDEAL), 0.1)
    assert over.f2_actual == params.f_max
    assert over.inv == at_max.inv


@pytest.mark.parametrize("current,commanded", [(0.0, 0.05), (0.05, 0.0), (0.01, 0.03), (0.04, 0.02)])
def test_valve_output_stays_between_current_and_target(current, commanded):
    valve = ValveModel(tau_open=8.0, tau_close=5.0, hysteresis_eps=0.04)
    target = commanded * (0.96 if commanded > current else 1.04)
    lo, hi = sorted((current, target))
    flow = current
    for _ in range(1000):
        flow = valve_step(flow, commanded, valve, 0.1, f_max=0.05)
        assert lo - 1e-15 <= flow <= hi + 1e-15


def test_noise_mean_is_unbiased():
    params = PlantParams(ph_noise_sigma=0.01)
    state = PlantState(inv=IonInvariants(alpha=0.02, beta=0.03), f1_actual=0.01, f2_actual=0.02)
    true_ph = measure(state, params).ph
    rng = np.random.default_rng(2024)
    readings = np.array([measure(state, params, rng).ph for _ in range(10_000)])
    assert abs(readings.mean() - true_ph) <= 3 * 0.01 / 100

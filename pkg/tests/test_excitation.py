"""Windowed excitation integrals and the sliding persistence check."""

import math

import numpy as np
import pytest

from gpebo import (
    DelayRateError,
    DelaySpec,
    NamedScenario,
    SystemSpec,
    TrajectoryHistory,
    builtin_scenario,
    pe_check,
    pe_integral,
    delayed_pe_integral,
    simulate,
)


def _const_phi_history(tmax=10.0, step=0.01):
    times = np.arange(0.0, tmax + step / 2, step)
    return TrajectoryHistory.from_grid(times, np.ones((len(times), 1, 1)))


def _decay_phi_history(tmax=30.0, step=1e-3):
    times = np.arange(0.0, tmax + step / 2, step)
    return TrajectoryHistory.from_grid(times, np.exp(-times)[:, None, None])


def _unit_C(t):
    return np.array([[1.0]])


def test_constant_scalar_integral_equals_window():
    hist = _const_phi_history()
    Gq, Gn = pe_integral(hist, _unit_C, 0.0, 2.0)
    assert Gq.shape == (1, 1) and Gn.shape == (1, 1)
    assert abs(Gq[0, 0] - 2.0) <= 1e-12
    assert abs(Gn[0, 0] - 2.0) <= 1e-12


def test_decaying_scalar_matches_closed_form():
    hist = _decay_phi_history()
    for t in (0.0, 5.0, 20.0):
        Gq, _ = pe_integral(hist, _unit_C, t, 2.0)
        exact = math.exp(-2.0 * t) * (1.0 - math.exp(-4.0)) / 2.0
        assert abs(Gq[0, 0] - exact) <= 1e-6


def test_window_must_fit_trajectory():
    hist = _const_phi_history(tmax=1.0)
    with pytest.raises(ValueError):
        pe_integral(hist, _unit_C, 0.5, 2.0)
    with pytest.raises(ValueError):
        pe_integral(hist, _unit_C, -1.0, 1.0)
    with pytest.raises(ValueError):
        pe_integral(hist, _unit_C, 0.0, -1.0)


def _benchmark_run(horizon=12.0):
    return simulate(builtin_scenario("c1", 0.0, horizon=horizon))


def test_additivity_over_adjacent_windows():
    res = _benchmark_run()
    hist = res.phi_history()
    C = res.scenario.system.C
    t0 = float(res.t[0])
    mid = float(res.t[5000])
    end = float(res.t[10000])
    full_q, full_n = pe_integral(hist, C, t0, end - t0)
    a_q, a_n = pe_integral(hist, C, t0, mid - t0)
    b_q, b_n = pe_integral(hist, C, mid, end - mid)
    assert np.abs(full_q - (a_q + b_q)).max() <= 1e-10
    assert np.abs(full_n - (a_n + b_n)).max() <= 1e-10


def test_integrals_symmetric_and_psd():
    res = _benchmark_run()
    hist = res.phi_history()
    C = res.scenario.system.C
    for t in (0.0, 2.5, 6.0):
        Gq, Gn = pe_integral(hist, C, t, 5.0)
        assert np.abs(Gq - Gq.T).max() <= 1e-12
        assert np.abs(Gn - Gn.T).max() <= 1e-12
        assert np.linalg.eigvalsh(Gn).min() >= -1e-10


def test_scalar_output_form_equals_trace_of_regressor_form():
    res = _benchmark_run()
    hist = res.phi_history()
    C = res.scenario.system.C
    Gq, Gn = pe_integral(hist, C, 1.0, 5.0)
    assert abs(Gq[0, 0] - np.trace(Gn)) <= 1e-10


def test_delayed_pe_identity_delay_equals_plain_integral():
    res = _benchmark_run()
    hist = res.phi_history()
    C = res.scenario.system.C
    _, Gn = pe_integral(hist, C, 1.0, 5.0)
    G4 = delayed_pe_integral(hist, C, 1.0, 5.0, DelaySpec.identity())
    assert np.abs(G4 - Gn).max() <= 1e-8


def test_delayed_pe_constant_delay_shifts_window():
    res = _benchmark_run()
    hist = res.phi_history()
    C = res.scenario.system.C
    G4 = delayed_pe_integral(hist, C, 3.0, 4.0, DelaySpec.constant(1.0))
    _, Gn = pe_integral(hist, C, 2.0, 4.0)
    assert np.abs(G4 - Gn).max() <= 1e-10


def test_delayed_pe_sinusoidal_delay_is_finite_spd():
    res = _benchmark_run()
    hist = res.phi_history()
    C = res.scenario.system.C
    d = DelaySpec.sinusoidal(1.0, 0.9, 1.0)  # rate 1 - 0.9 cos(s) in [0.1, 1.9]
    G = delayed_pe_integral(hist, C, 4.0, 5.0, d)
    assert np.all(np.isfinite(G))
    assert np.abs(G - G.T).max() <= 1e-12
    assert np.linalg.eigvalsh(G).min() > 0.0


def test_delayed_pe_rejects_vanishing_rate():
    res = _benchmark_run()
    hist = res.phi_history()
    C = res.scenario.system.C
    # nondecreasing map with a plateau on [1, 2]; its image covers the
    # plateau, where differenced rates vanish
    plateau = DelaySpec.custom(lambda t: min(t, max(1.0, t - 1.0)))
    with pytest.raises(DelayRateError):
        delayed_pe_integral(hist, C, 0.5, 2.5, plateau)


def test_delayed_pe_degenerate_window_is_zero():
    res = _benchmark_run()
    hist = res.phi_history()
    C = res.scenario.system.C
    frozen = DelaySpec.custom(lambda t: 0.0, rate=lambda t: 1.0)
    G = delayed_pe_integral(hist, C, 1.0, 2.0, frozen)
    assert np.array_equal(G, np.zeros((2, 2)))


def test_pe_check_constant_scalar():
    hist = _const_phi_history()
    rep = pe_check(hist, _unit_C, T=2.0, delta_floor=1.0)
    assert rep.pe_output and rep.pe_regressor
    assert rep.delta_output == pytest.approx(2.0, abs=1e-9)
    assert len(rep.starts) == 41  # stride T/10 over [0, 8]


def test_pe_check_decaying_scalar_fails():
    hist = _decay_phi_history()
    rep = pe_check(hist, _unit_C, T=2.0, delta_floor=1e-3)
    assert not rep.pe_regressor and not rep.pe_output
    assert rep.min_eig_regressor[-1] < rep.min_eig_regressor[0]


def test_pe_check_benchmark_regressor_form_holds():
    res = _benchmark_run()
    rep = pe_check(res.phi_history(), res.scenario.system.C, T=5.0, delta_floor=1e-4)
    assert rep.pe_regressor
    assert rep.delta_regressor > 1e-4
    assert np.all(rep.min_eig_output >= -1e-10)
    assert np.all(rep.min_eig_regressor >= -1e-10)


def test_pe_check_validation():
    hist = _const_phi_history(tmax=1.0)
    with pytest.raises(ValueError):
        pe_check(hist, _unit_C, T=2.0, delta_floor=1e-3)
    with pytest.raises(ValueError):
        pe_check(hist, _unit_C, T=0.5, delta_floor=0.0)
    with pytest.raises(ValueError):
        pe_check(hist, _unit_C, T=0.5, delta_floor=1e-3, stride=-1.0)

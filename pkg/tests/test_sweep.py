import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tpablockade import (
    AllPointsFailed,
    SolverConfig,
    SweepAxis,
    SweepResult,
    SweepSpec,
    SystemParams,
    WrongArity,
    default_axis,
    effective_area,
    gn_zero,
    liouvillian,
    mean_photon,
    optimum_overlay,
    run_sweep,
    steady_state,
)
from tpablockade import sweep as sweep_mod

BASE = SystemParams.optimal()


@pytest.fixture(scope="module")
def g_delta_sweep():
    spec = SweepSpec(BASE, (default_axis("g", BASE), default_axis("delta_a", BASE)))
    return run_sweep(spec)


def synthetic_result(value, steps=(41, 41), spans=((0.0, 1.0), (0.0, 1.0))):
    axes = tuple(SweepAxis(name, a, b, n) for name, (a, b), n in zip(("g", "delta_a"), spans, steps))
    spec = SweepSpec(BASE, axes, orders=(2,))
    npts = int(np.prod(steps))
    vals = np.broadcast_to(np.asarray(value, float), steps).ravel().copy()
    return SweepResult(spec, spec.points(), {2: vals}, np.zeros(npts), np.zeros(npts))


def test_axis_validation():
    with pytest.raises(ValueError):
        SweepAxis("chi", 0, 1, 3)
    with pytest.raises(ValueError):
        SweepAxis("g", 1, 1, 3)
    with pytest.raises(ValueError):
        SweepAxis("g", 0, 1, 1)
    with pytest.raises(ValueError):
        SweepAxis("omega", 0, 1, 3, "log")
    with pytest.raises(ValueError):
        SweepSpec(BASE, (SweepAxis("g", 0, 1, 2), SweepAxis("g", 0, 1, 2)))
    with pytest.raises(ValueError):
        SweepSpec(BASE, (SweepAxis("g", 0, 1, 2),), threshold=1.0)


def test_log_axis_cells_in_decades():
    ax = SweepAxis("omega", 1e-3, 1e-1, 3, "log")
    np.testing.assert_allclose(ax.values(), [1e-3, 1e-2, 1e-1])
    assert ax.cell_width == pytest.approx(1.0)


def test_default_axes():
    assert default_axis("kappa2", BASE).values()[1] == pytest.approx(0.5)
    assert default_axis("kappa2", BASE).steps == 21
    g_axis = default_axis("g", BASE)
    assert (g_axis.start, g_axis.stop) == (0.0, pytest.approx(3e-4))
    assert default_axis("theta0", BASE).stop == math.pi


def test_points_are_row_major():
    spec = SweepSpec(BASE, (SweepAxis("g", 0, 1, 2), SweepAxis("delta_a", 0, 2, 3)))
    np.testing.assert_array_equal(spec.points(), [[0, 0], [0, 1], [0, 2], [1, 0], [1, 1], [1, 2]])


def test_two_point_sweep_matches_direct_solves():
    eps = 1e-3
    spec = SweepSpec(BASE, (SweepAxis("delta_a", 1.0, 1.0 + eps, 2),))
    result = run_sweep(spec)
    assert len(result) == 2
    for i, delta in enumerate([1.0, 1.0 + eps]):
        rho = steady_state(liouvillian(BASE.replace(delta_a=delta), 16))
        for n in (2, 3, 4):
            assert result.values[n][i] == gn_zero(rho, n)
        assert result.mean_photon[i] == mean_photon(rho)


def test_detuning_sweep_minimum_at_design_point():
    spec = SweepSpec(BASE, (SweepAxis("delta_a", 0.5, 1.5, 101),), orders=(2,))
    result = run_sweep(spec)
    best = result.points[np.argmin(result.values[2]), 0]
    assert abs(best - 1.0) <= 0.01 + 1e-12


def test_crescent_region(g_delta_sweep):
    below = g_delta_sweep.grid(2) < 0.1
    rows = [i for i in range(below.shape[0]) if below[i].any()]
    centers = np.array([np.flatnonzero(below[i]).mean() for i in rows])
    assert len(rows) >= 10
    # band drifts monotonically towards small detuning as the gain grows
    assert np.all(np.diff(centers) <= 0.5)
    assert centers[0] - centers[-1] > 10
    # and bows away from the straight chord joining its ends
    chord = np.linspace(centers[0], centers[-1], len(centers))
    assert np.max(np.abs(centers - chord)) > 2


def test_effective_area_examples():
    assert effective_area(synthetic_result(0.5), 2) == 0.0
    assert effective_area(synthetic_result(0.05), 2) == pytest.approx(1.0, rel=1e-12)
    r = synthetic_result(0.05, steps=(11, 21), spans=((0.0, 2.0), (-1.0, 2.0)))
    assert effective_area(r, 2) == pytest.approx(6.0, rel=1e-12)


def test_effective_area_counts_failed_points_above_threshold():
    r = synthetic_result(0.05, steps=(3, 3))
    r.values[2][4] = np.nan
    # the centre cell is 0.5 x 0.5 of the unit square
    assert effective_area(r, 2) == pytest.approx(0.75)


def test_effective_area_wrong_arity():
    spec = SweepSpec(BASE, (SweepAxis("g", 0, 1, 2),), orders=(2,))
    r = SweepResult(spec, spec.points(), {2: np.zeros(2)}, np.zeros(2), np.zeros(2))
    with pytest.raises(WrongArity):
        effective_area(r, 2)


@settings(max_examples=50, deadline=None)
@given(t1=st.floats(0.001, 0.999), t2=st.floats(0.001, 0.999), seed=st.integers(0, 1000))
def test_effective_area_monotone_in_threshold(t1, t2, seed):
    vals = np.random.default_rng(seed).uniform(0, 1, size=(9, 7))
    r = synthetic_result(vals, steps=(9, 7))
    lo, hi = sorted((t1, t2))
    assert effective_area(r, 2, lo) <= effective_area(r, 2, hi)


def test_optimum_overlay():
    spec = SweepSpec(BASE, (SweepAxis("delta_a", 0.0, 1.0, 2),))
    (d0, g0, th0), (d1, g1, th1) = optimum_overlay(spec)
    assert (d0, th0) == (0.0, 0.0)
    assert g0 == pytest.approx(2 * BASE.omega**2 / BASE.kappa)
    assert g1 == pytest.approx(8.944e-5, abs=1e-8)
    assert th1 == pytest.approx(-1.10715, abs=1e-5)


def test_optimum_overlay_gain_decreases_with_detuning():
    spec = SweepSpec(BASE, (SweepAxis("delta_a", -2.0, 2.0, 41),))
    overlay = optimum_overlay(spec)
    g_of_abs = sorted((abs(d), g) for d, g, _ in overlay)
    gs = [g for _, g in g_of_abs]
    assert all(b < a for (da, a), (db, b) in zip(g_of_abs, g_of_abs[1:]) if db > da)
    assert max(gs) == pytest.approx(2e-4)


def test_optimum_overlay_needs_detuning_axis():
    with pytest.raises(ValueError):
        optimum_overlay(SweepSpec(BASE, (SweepAxis("g", 0, 1, 2),)))


def test_parallel_matches_sequential():
    spec = SweepSpec(
        BASE.replace(kappa2=2.0),
        (SweepAxis("theta0", -3.0, 3.0, 7), SweepAxis("delta_a", 0.0, 2.0, 5)),
    )
    seq = run_sweep(spec, workers=1)
    par = run_sweep(spec, workers=4)
    again = run_sweep(spec, workers=1)
    for n in spec.orders:
        assert np.array_equal(seq.values[n], par.values[n])
        assert np.array_equal(seq.values[n], again.values[n])
    assert np.array_equal(seq.residual, par.residual)


def test_workers_from_environment(monkeypatch):
    monkeypatch.setenv(sweep_mod.WORKERS_ENV, "3")
    spec = SweepSpec(BASE, (SweepAxis("delta_a", 0.5, 1.5, 3),), orders=(2,))
    assert run_sweep(spec).metadata["workers"] == 3


def test_single_failure_is_marked(monkeypatch):
    real = sweep_mod.solve_point

    def flaky(params, dim, orders, cfg):
        if params.delta_a == 1.0:
            raise sweep_mod.BlockadeError("boom")
        return real(params, dim, orders, cfg)

    monkeypatch.setattr(sweep_mod, "solve_point", flaky)
    spec = SweepSpec(BASE, (SweepAxis("delta_a", 0.5, 1.5, 3),))
    result = run_sweep(spec, workers=2)
    assert list(result.errors) == [1]
    assert np.isnan(result.values[2][1]) and np.isnan(result.residual[1])
    assert np.all(np.isfinite(result.values[2][[0, 2]]))
    assert result.metadata["failed_points"] == 1


def test_all_points_failed():
    spec = SweepSpec(BASE, (SweepAxis("delta_a", 0.5, 1.5, 3),))
    with pytest.raises(AllPointsFailed):
        run_sweep(spec, SolverConfig(residual_tol=1e-40))


def test_records_layout():
    spec = SweepSpec(BASE, (SweepAxis("delta_a", 0.5, 1.5, 2),), orders=(2, 4))
    recs = list(run_sweep(spec).records())
    assert list(recs[0]) == ["delta_a", "g2", "g4", "n_mean", "residual"]

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from dslab.errors import DivergenceError, InvalidParameterError
from dslab.flow import (
    H_KINDS,
    DeformationState,
    DiagnosticsRecord,
    conservation_report,
    diagnostics,
    functional_J,
    run,
    step,
    willmore,
)
from dslab.grid import GridSpec
from dslab.spinor import SpinorField, catalog_solution


def catalog_state(kind, spec, **params):
    p, psi, phi = catalog_solution(kind, spec, **params)
    return DeformationState(0.0, p.p, psi, phi)


def constant_state(spec, u):
    one, zero = spec.field(np.ones(spec.shape)), spec.zeros()
    return DeformationState(0.0, u * one, SpinorField(one, zero), SpinorField(one, zero))


def max_diff(a: DeformationState, b: DeformationState) -> float:
    return max((x - y).max_abs() for x, y in zip(a.fields(), b.fields()))


def test_zero_dt_is_identity():
    s = catalog_state("wave", GridSpec(64, 64), c=np.sqrt(2), k=1 + 1j, m=1 - 1j)
    assert step(s, 0.0) is s
    with pytest.raises(InvalidParameterError):
        step(s, -1e-3)
    with pytest.raises(InvalidParameterError):
        step(s, 1e-3, n=4)


@given(st.floats(-2.0, 2.0))
def test_constant_potential_is_fixed_point(u):
    s = constant_state(GridSpec(16, 16), u)
    res = run(s, 1e-3, 3, n=2, validate_tol=None)
    assert (res.final.u - s.u).max_abs() < 1e-12
    assert res.final.t == pytest.approx(3e-3)


def test_zero_steps_gives_single_record(g32):
    s = catalog_state("plane", g32)
    res = run(s, 1e-3, 0)
    assert len(res.records) == 1
    assert res.final is s


def test_rk4_fourth_order(g32):
    # self-convergence on the ridge data: halving dt shrinks the error about 16x
    s = catalog_state("ridge", g32)
    T = 0.08
    ref = run(s, T / 64, 64, validate_tol=None).final
    e1 = max_diff(run(s, T / 4, 4, validate_tol=None).final, ref)
    e2 = max_diff(run(s, T / 8, 8, validate_tol=None).final, ref)
    assert 10 < e1 / e2 < 20


def test_level1_transports(g32):
    u0 = g32.from_function(lambda x, y: np.exp(1j * x))
    s = DeformationState(0.0, u0, SpinorField.constant(g32, 1.0, 0.0), SpinorField.constant(g32, 1.0, 0.0))
    res = run(s, 1e-2, 10, n=1, validate_tol=None)
    # u_t = u_z + u_zbar = u_x translates u along -x
    exact = g32.from_function(lambda x, y: np.exp(1j * (x + 0.1)))
    assert (res.final.u - exact).max_abs() < 1e-8


@pytest.mark.parametrize("kind", ["wave", "gauged_wave", "ridge"])
def test_flow_stays_on_solutions(g32, kind):
    s = catalog_state(kind, g32)
    res = run(s, 1e-3, 20, n=2)
    rep = conservation_report(res.records)["drift"]
    assert rep["dirac_residual_max"] < 1e-6
    assert rep["closedness_max"] < 1e-6
    assert rep["W"] < 1e-5


def test_wave_conserves_everything():
    spec = GridSpec(64, 64, 8 * np.pi, 8 * np.pi)
    s = catalog_state("wave", spec, c=0.625, k=0.375 + 0.5j)
    res = run(s, 1e-3, 20, n=2)
    rep = conservation_report(res.records)["drift"]
    assert rep["W"] < 1e-12
    assert max(rep[f"J_{k}"] for k in H_KINDS) < 1e-10


def test_level3_small_step(g32):
    s = catalog_state("ridge", g32)
    res = run(s, 1e-4, 10, n=3)
    assert res.records[-1].dirac_residual_max < 1e-6


def test_J_and_W_examples(g32):
    one = SpinorField.constant(g32, 1.0, 0.0)
    assert functional_J("psi1bar_phi1bar", one, one) == pytest.approx(-8j * np.pi**2)
    assert functional_J("psi2_phi2", one, one) == 0
    assert willmore(g32.field(np.ones(g32.shape))) == pytest.approx(4 * np.pi**2)
    u = g32.from_function(lambda x, y: np.exp(1j * (x + y)))
    assert willmore(u) == pytest.approx(4 * np.pi**2)
    with pytest.raises(InvalidParameterError):
        functional_J("psi3", one, one)


def test_conservation_report(g32):
    rec = diagnostics(catalog_state("plane", g32))
    rep = conservation_report([rec, rec], [rec, rec])
    assert rep["drift"]["W"] == 0
    assert all(v == 0 for k, v in rep["drift"].items() if k.startswith("J_"))
    assert rep["reduction"]["W"] == float("inf")
    with pytest.raises(InvalidParameterError):
        conservation_report([])


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_divergence_carries_step(g32):
    s = constant_state(g32, 1.0)
    u = g32.from_function(lambda x, y: 1e9 * np.cos(x))
    s = DeformationState(0.0, u, s.psi, s.phi)
    with pytest.raises(DivergenceError) as err:
        run(s, 1e-3, 5, validate_tol=None)
    assert err.value.step == 1


def test_invalid_initial_data_rejected(g32):
    s = catalog_state("wave", g32)
    bad = DeformationState(0.0, s.u * 2, s.psi, s.phi)
    with pytest.raises(InvalidParameterError):
        run(bad, 1e-3, 1)


def test_snapshots(g32):
    res = run(catalog_state("plane", g32), 1e-3, 6, snapshot_every=3)
    assert [round(s.t, 6) for s in res.snapshots] == [0.0, 0.003, 0.006]


def test_record_json_round_trip(g32):
    rec = diagnostics(catalog_state("wave", g32), step=4)
    back = DiagnosticsRecord.from_json(json.loads(json.dumps(rec.to_json())))
    assert back == rec

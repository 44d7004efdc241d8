"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

The lines are also collected and shown in the terminal summary (see
conftest.py), so they appear even when output capture is on.
"""

import json

import numpy as np
import pytest

from dslab import gaussmap as gm
from dslab.analytic import Jet
from dslab.cli import main
from dslab.cli.commands import cmd_verify
from dslab.cli.config import ScenarioConfig
from dslab.flow import H_KINDS, DeformationState, conservation_report, run
from dslab.grid import GridSpec, apply_d, apply_dbar, invert_dbar, random_smooth
from dslab.hierarchy import (
    nv_rhs,
    operator_identity_residual,
    random_state,
    reduced_aux,
    reduction_compatibility,
    resolve_a3_variant,
    rhs_u,
)
from dslab.spinor import (
    apply_gauge,
    catalog_solution,
    conservation_residual,
    dirac_residual,
    dirac_residual_jets,
    gauge_jets,
    gauge_potential,
)
from dslab.weierstrass import (
    closedness_residual,
    conformal_factor_mismatch,
    integrate_surface,
    one_form_coefficients,
    path_independence,
    r3_reduction_check,
    surface_geometry,
)

RESULTS: list[str] = []

WAVE_SPEC = GridSpec(64, 64, 8 * np.pi, 8 * np.pi)
WAVE = {"c": 0.625, "k": 0.375 + 0.5j}
DT, T = 1e-3, 0.1


def report(number: int, title: str, values: dict[str, tuple[float, float, str]]):
    """values: name -> (value, bound, "max" | "min").  Asserts after printing."""
    ok = {k: (v <= b if kind == "max" else v >= b) and np.isfinite(v) for k, (v, b, kind) in values.items()}
    detail = ", ".join(
        f"{k}={v:.2e}{'<=' if kind == 'max' else '>='}{b:.0e}" for k, (v, b, kind) in values.items()
    )
    line = f"[{'PASS' if all(ok.values()) else 'FAIL'}] criterion {number:2d} {title}: {detail}"
    RESULTS.append(line)
    print(line)
    failed = [k for k, good in ok.items() if not good]
    assert not failed, line


def lt(value, bound):
    return (float(value), bound, "max")


def ge(value, bound):
    return (float(value), bound, "min")


def catalog(spec):
    k = complex(np.pi / spec.lx, np.pi / spec.ly)
    return [
        catalog_solution("wave", spec, c=abs(k), k=k),
        catalog_solution("gauged_wave", spec, c=abs(k), k=k, f=0.2 - 0.3j),
        catalog_solution("ridge", spec),
    ]


@pytest.fixture(scope="module")
def wave_runs():
    p, psi, phi = catalog_solution("wave", WAVE_SPEC, **WAVE)
    s = DeformationState(0.0, p.p, psi, phi)
    steps = int(round(T / DT))
    return run(s, DT, steps, 2), run(s, DT / 2, 2 * steps, 2)


@pytest.fixture(scope="module")
def ridge_runs():
    spec = GridSpec(64, 64)
    p, psi, phi = catalog_solution("ridge", spec, mode=2, amplitude=2.0)
    s = DeformationState(0.0, p.p, psi, phi)
    steps = int(round(T / DT))
    return run(s, DT, steps, 2), run(s, DT / 2, 2 * steps, 2)


def test_criterion_01_spectral_calculus():
    spec = GridSpec(32, 48, 2 * np.pi, 3.0)
    x, y = spec.xy
    rng = np.random.default_rng(7)
    f = np.zeros(spec.shape, complex)
    fx = np.zeros(spec.shape, complex)
    fy = np.zeros(spec.shape, complex)
    for mx in range(-5, 6):
        for my in range(-5, 6):
            c = rng.standard_normal() + 1j * rng.standard_normal()
            kx, ky = 2 * np.pi * mx / spec.lx, 2 * np.pi * my / spec.ly
            e = c * np.exp(1j * (kx * x + ky * y))
            f, fx, fy = f + e, fx + 1j * kx * e, fy + 1j * ky * e
    F = spec.field(f)
    err_d = (apply_d(F) - spec.field(0.5 * (fx - 1j * fy))).max_abs()
    err_db = (apply_dbar(F) - spec.field(0.5 * (fx + 1j * fy))).max_abs()
    err_inv = (invert_dbar(apply_dbar(F)) - (F - F.mean())).max_abs()
    report(1, "spectral calculus", {"d": lt(err_d, 1e-12), "dbar": lt(err_db, 1e-12), "inverse": lt(err_inv, 1e-12)})


def test_criterion_02_dirac_exactness():
    p, psi, phi = catalog_solution("plane", GridSpec(64, 64))
    plane = max(dirac_residual(p, psi, "D").max_abs(), dirac_residual(p, phi, "Dtilde").max_abs())
    p, psi, phi = catalog_solution("wave", GridSpec(64, 64), c=np.sqrt(2), k=1 + 1j, m=1 - 1j)
    report(2, "Dirac exactness", {
        "plane": lt(plane, 0.0),
        "wave_D": lt(dirac_residual(p, psi, "D").max_abs(), 1e-10),
        "wave_Dtilde": lt(dirac_residual(p, phi, "Dtilde").max_abs(), 1e-10),
    })


def test_criterion_03_conservation_and_closedness():
    cons = closed = path = 0.0
    for p, psi, phi in catalog(GridSpec(64, 64)):
        cons = max(cons, *(r.max_abs() for r in conservation_residual(psi, phi)))
        forms = one_form_coefficients(psi, phi)
        closed = max(closed, *(r.max_abs() for r in closedness_residual(forms)))
        path = max(path, path_independence(forms))
    report(3, "conservation and closed forms", {
        "conservation": lt(cons, 1e-10), "closedness": lt(closed, 1e-10), "path": lt(path, 1e-8)})


def test_criterion_04_geometry():
    conf = factor = curv = 0.0
    for p, psi, phi in catalog(GridSpec(64, 64)):
        geom = surface_geometry(psi, phi, integrate_surface(one_form_coefficients(psi, phi)), p)
        conf = max(conf, geom.conformality_residual.max_abs())
        factor = max(factor, conformal_factor_mismatch(geom))
        curv = max(curv, geom.curvature_residual)
    report(4, "surface geometry", {
        "conformality": lt(conf, 1e-8), "conformal_factor": lt(factor, 1e-8), "mean_curvature": lt(curv, 1e-6)})


def test_criterion_05_operator_identities():
    coarse, fine = GridSpec(32, 32), GridSpec(64, 64)
    values = {}
    worst_ratio = np.inf
    for seed in (0, 1, 2):
        for n, tol in ((1, 1e-8), (2, 1e-7), (3, 1e-7)):
            rc = operator_identity_residual(n, *random_state(coarse, seed)).max_abs()
            rf = operator_identity_residual(n, *random_state(fine, seed)).max_abs()
            key = f"n{n}"
            values[key] = lt(max(rc, values.get(key, (0.0,))[0]), tol)
            worst_ratio = min(worst_ratio, rc / max(rf, 1e-300))
    values["refinement"] = ge(worst_ratio, 10.0)
    finding = resolve_a3_variant(coarse, 0)
    values["a3_passing_variants"] = lt(abs(len(finding["passing"]) - 1), 0.0)
    report(5, f"Lax identities (A3 resolves to {finding['resolved']})", values)


def test_criterion_06_reductions():
    spec = GridSpec(32, 32)
    u = random_smooth(spec, 3, amplitude=0.5)
    pair = max(reduction_compatibility(n, u)["conjugate_pair"] for n in (1, 2))
    ur = spec.field(u.real.astype(complex))
    aux = reduced_aux(ur)
    v = aux["v"]
    w = (aux["w"] - 0.5 * apply_d(v)).max_abs()
    wp = (aux["w_prime"] - 0.5 * apply_dbar(v.conj())).max_abs()
    nv = (rhs_u(3, ur) - nv_rhs(ur)).max_abs()
    report(6, "reductions", {"conjugate_pair": lt(pair, 1e-12), "w": lt(w, 1e-10), "w_prime": lt(wp, 1e-10),
                             "nv": lt(nv, 1e-9)})


def test_criterion_07_gauge():
    spec = GridSpec(64, 64)
    sol = catalog(spec)[0]
    p, psi, phi = sol
    f = spec.field(np.full(spec.shape, 0.3 + 0.2j))
    P = gauge_potential(p, f)
    gpsi, gphi = apply_gauge(psi, phi, f)
    dirac = max(dirac_residual(P, gpsi, "D").max_abs(), dirac_residual(P, gphi, "Dtilde").max_abs())
    forms = max((a - b).max_abs() for a, b in zip(one_form_coefficients(psi, phi), one_form_coefficients(gpsi, gphi)))
    s0 = integrate_surface(one_form_coefficients(psi, phi))
    s1 = integrate_surface(one_form_coefficients(gpsi, gphi))
    surf = max((a - b).max_abs() for a, b in zip(s0.coords, s1.coords))
    z = spec.z
    j = sol.jets(z)
    fj = (0.2 - 0.1j) * Jet.z(z)
    (k1, k2), (t1, t2) = gauge_jets((j["psi1"], j["psi2"]), (j["phi1"], j["phi2"]), fj)
    Pj = j["p"] * (fj.conj() - fj).exp()
    jets = max(np.abs(r).max() for r in dirac_residual_jets(Pj, k1, k2, "D") + dirac_residual_jets(Pj, t1, t2, "Dtilde"))
    report(7, "gauge invariance", {"dirac": lt(dirac, 1e-10), "forms": lt(forms, 1e-12), "surface": lt(surf, 1e-12),
                                   "pointwise": lt(jets, 1e-10)})


def test_criterion_08_flow_coherence(wave_runs):
    rep = conservation_report(wave_runs[0].records)["drift"]
    report(8, "flow coherence (wave, n=2, T=0.1)", {
        "dirac": lt(rep["dirac_residual_max"], 1e-6), "closedness": lt(rep["closedness_max"], 1e-6)})


def test_criterion_09_conserved_functionals(wave_runs, ridge_runs):
    wave = conservation_report(wave_runs[0].records, wave_runs[1].records)
    values = {"W_drift": lt(wave["drift"]["W"], 1e-5)}
    for k in H_KINDS:
        values[f"J_{k}"] = lt(wave["drift"][f"J_{k}"], 1e-6)
    # on wave data u is constant and the drifts sit at roundoff, so the
    # dt-halving factor is measured on the ridge, where the drifts are resolved
    ridge = conservation_report(ridge_runs[0].records, ridge_runs[1].records)
    for k, v in ridge["drift"].items():
        if k == "W" or k.startswith("J_"):
            values[f"ridge_{k}_drift"] = lt(v, 1e-5 if k == "W" else 1e-6)
    values["reduction"] = ge(min(ridge["reduction"].values()), 8.0)
    report(9, "Willmore and J drift", values)


def test_criterion_10_gauss_map():
    rng = np.random.default_rng(11)
    w = gm.ProductPoint(rng.standard_normal(500) + 1j * rng.standard_normal(500),
                        rng.standard_normal(500) + 1j * rng.standard_normal(500))
    z = gm.sigma(w).z
    unit = z / np.sqrt(np.sum(np.abs(z) ** 2, axis=0))
    quad = np.abs(gm.quadric_residual(unit)).max()
    trip = np.max(gm.projective_distance(gm.sigma(gm.sigma_inverse(gm.QuadricPoint(z))).z, z))
    y = rng.standard_normal((4, 500)) + 1j * rng.standard_normal((4, 500))
    y[3] = y[0] * y[1] / y[2]
    zy = gm.coordinate_change_y_to_z(y)
    cc = (np.abs(gm.quadric_residual(zy)) / np.sum(np.abs(zy) ** 2, axis=0)).max()
    cons = 0.0
    for p, psi, phi in catalog(GridSpec(64, 64)):
        rep = gm.surface_gauss_report(integrate_surface(one_form_coefficients(psi, phi)), psi, phi)
        cons = max(cons, rep["sigma_consistency"])
    report(10, "Gauss map", {"quadric": lt(quad, 1e-13), "round_trip": lt(trip, 1e-12),
                             "coordinate_change": lt(cc, 1e-13), "consistency": lt(cons, 1e-8)})


def test_criterion_11_r3_reduction():
    x4 = match = 0.0
    for spec in (GridSpec(64, 64), WAVE_SPEC):
        k = complex(np.pi / spec.lx, np.pi / spec.ly)
        p, psi, _ = catalog_solution("wave", spec, c=abs(k), k=k)
        rep = r3_reduction_check(p, psi)
        x4, match = max(x4, rep["x4_variation"]), max(match, rep["r3_discrepancy"])
    report(11, "R^3 reduction", {"x4_constant": lt(x4, 1e-10), "r3_match": lt(match, 1e-8)})


def test_criterion_12_cli_determinism(tmp_path, capsys):
    cfg_a = ScenarioConfig(seed=3, out=str(tmp_path / "a"))
    cfg_b = ScenarioConfig(seed=3, out=str(tmp_path / "b"))
    code_a, code_b = cmd_verify(cfg_a), cmd_verify(cfg_b)
    same = (tmp_path / "a" / "verify.json").read_bytes() == (tmp_path / "b" / "verify.json").read_bytes()
    strict = tmp_path / "strict.ini"
    strict.write_text("[tolerances]\nall = 0\n")
    code_fail = main(["verify", "--config", str(strict), "--grid", "16,16", "--out", str(tmp_path / "c")])
    code_usage = main(["verify", "--config", str(tmp_path / "missing.ini")])
    code_bad_flag = main(["verify", "--level", "9"])
    report_ok = json.loads((tmp_path / "a" / "verify.json").read_text())["passed"]
    capsys.readouterr()
    exits_ok = (code_a, code_b, code_fail, code_usage, code_bad_flag) == (0, 0, 1, 2, 2) and report_ok
    report(12, "CLI determinism and exit codes", {
        "byte_mismatch": lt(0.0 if same else 1.0, 0.0),
        "exit_contract_violations": lt(0.0 if exits_ok else 1.0, 0.0),
    })

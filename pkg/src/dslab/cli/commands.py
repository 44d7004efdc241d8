"""The four subcommands.  Each returns a process exit status."""

from __future__ import annotations

import logging
from pathlib import Path

from ..errors import (
    ConfigError,
    DegenerateImmersionError,
    DegeneratePointError,
    DivergenceError,
    DSLabError,
)
from ..flow import conservation_report, run
from ..gaussmap import surface_gauss_report
from ..grid import fields_to_csv
from ..weierstrass import (
    conformal_factor_mismatch,
    grid_to_obj,
    integrate_surface,
    max_closedness,
    monodromy,
    one_form_coefficients,
    path_independence,
    surface_from_csv,
    surface_geometry,
    surface_to_csv,
    surface_to_obj,
)
from .checks import run_suite
from .config import ScenarioConfig
from .output import CONVENTIONS, drift_svg, dumps, records_from_jsonl, records_to_csv, records_to_jsonl, write_text
from .scenarios import build_initial

log = logging.getLogger(__name__)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _manifest(cfg: ScenarioConfig, command: str) -> dict:
    return {
        "command": command,
        "config": cfg.to_json(),
        "grid": {"nx": cfg.grid.nx, "ny": cfg.grid.ny, "lx": cfg.grid.lx, "ly": cfg.grid.ly},
        "tolerances": dict(sorted(cfg.tolerances.items())),
        "conventions": CONVENTIONS,
        "a3_variant_switch": cfg.a3_variant,
    }


def _a3_finding(cfg: ScenarioConfig) -> dict:
    from ..hierarchy import resolve_a3_variant

    f = resolve_a3_variant(cfg.grid.spec(), cfg.seed)
    return {
        "resolved": f["resolved"],
        "passing": f["passing"],
        "residuals": {k: float(v) for k, v in sorted(f["residuals"].items())},
        "q3_form": f["q3_form"],
    }


def cmd_verify(cfg: ScenarioConfig) -> int:
    suite = run_suite(cfg)
    manifest = _manifest(cfg, "verify")
    manifest["a3_variant_finding"] = suite.findings["a3_variant"]
    manifest["findings"] = {k: v for k, v in sorted(suite.findings.items()) if k != "a3_variant"}
    manifest["checks"] = [c.to_json() for c in suite.checks]
    failed = [c.name for c in suite.checks if not c.passed]
    manifest["failed"] = failed
    manifest["passed"] = not failed
    out = Path(cfg.out)
    write_text(out / "verify.json", dumps(manifest))
    for c in suite.checks:
        bound = "<=" if c.kind == "max" else ">="
        print(f"{'PASS' if c.passed else 'FAIL'}  {c.name:28s} {c.value:.3e} {bound} {c.tolerance:.1e}")
    print(f"{len(suite.checks) - len(failed)}/{len(suite.checks)} checks passed; report in {out / 'verify.json'}")
    return EXIT_OK if not failed else EXIT_FAIL


def cmd_surface(cfg: ScenarioConfig) -> int:
    spec = cfg.grid.spec()
    init = build_initial(cfg.initial, spec)
    out = Path(cfg.out)
    forms = one_form_coefficients(init.psi, init.phi)
    try:
        surface = integrate_surface(forms)
        geom = surface_geometry(init.psi, init.phi, surface, init.u)
    except DegenerateImmersionError as exc:
        print(f"degenerate immersion at sample {exc.index}: {exc}")
        return EXIT_FAIL
    e2a = geom.conformal_factor.real
    manifest = _manifest(cfg, "surface")
    manifest["a3_variant_finding"] = _a3_finding(cfg)
    manifest["initial"] = init.description
    manifest["geometry"] = {
        "conformal_factor_min": float(e2a.min()),
        "conformal_factor_max": float(e2a.max()),
        "conformality_residual": geom.conformality_residual.max_abs(),
        "conformal_factor_mismatch": conformal_factor_mismatch(geom),
        "mean_curvature_residual": geom.curvature_residual,
        "closedness_residual": max_closedness(forms),
        "path_independence": path_independence(forms),
        "monodromy": monodromy(forms).tolist(),
    }
    try:
        manifest["gauss_map"] = surface_gauss_report(surface, init.psi, init.phi)
        from ..gaussmap import gauss_map_of_surface

        w1, w2 = gauss_map_of_surface(surface)
        write_text(out / "gauss_map.csv", fields_to_csv([w1, w2]))
    except DegeneratePointError as exc:
        manifest["gauss_map"] = {"error": str(exc), "index": list(exc.index) if exc.index else None}
    write_text(out / "surface.csv", surface_to_csv(surface))
    write_text(out / "surface.obj", surface_to_obj(surface, cfg.projection))
    write_text(out / "geometry.json", dumps(manifest))
    print(f"surface written to {out}")
    return EXIT_OK


def cmd_evolve(cfg: ScenarioConfig) -> int:
    spec = cfg.grid.spec()
    init = build_initial(cfg.initial, spec)
    out = Path(cfg.out)
    fl = cfg.flow
    try:
        result = run(
            init.state(),
            fl.dt,
            fl.steps,
            fl.level,
            cfg.a3_variant,
            snapshot_every=fl.snapshot_every or None,
            validate_tol=1e-8 if fl.validate else None,
        )
    except DivergenceError as exc:
        print(f"divergence at step {exc.step}: {exc}")
        return EXIT_FAIL
    except DSLabError as exc:
        raise ConfigError(str(exc)) from exc
    records = result.records
    write_text(out / "diagnostics.jsonl", records_to_jsonl(records))
    write_text(out / "diagnostics.csv", records_to_csv(records))
    write_text(out / "drift.svg", drift_svg(records))
    write_text(out / "final_state.csv", fields_to_csv(list(result.final.fields())))
    for snap in result.snapshots:
        step = int(round(snap.t / fl.dt))
        surf = integrate_surface(one_form_coefficients(snap.psi, snap.phi), tol=1e-6)
        write_text(out / "snapshots" / f"surface_{step:06d}.csv", surface_to_csv(surf))
    manifest = _manifest(cfg, "evolve")
    manifest["a3_variant_finding"] = _a3_finding(cfg)
    manifest["initial"] = init.description
    manifest["conservation"] = conservation_report(records)
    manifest["steps_completed"] = len(records) - 1
    write_text(out / "manifest.json", dumps(manifest))
    drift = manifest["conservation"]["drift"]
    print(f"evolved {fl.steps} steps to t = {result.final.t:.6g}; W drift {drift['W']:.3e}; "
          f"max Dirac residual {drift['dirac_residual_max']:.3e}")
    return EXIT_OK


def _infer_ny(points) -> int:
    x0 = points[0, 0]
    ny = 0
    while ny < len(points) and points[ny, 0] == x0:
        ny += 1
    return ny


def cmd_export(run_dir: str | Path, dest: str | Path | None, projection=(1, 2, 3)) -> int:
    """Re-render plots and meshes from a finished run directory."""
    run_dir = Path(run_dir)
    if not run_dir.is_dir():
        raise ConfigError(f"run directory not found: {run_dir}")
    dest = Path(dest) if dest is not None else run_dir / "export"
    made = []
    diag = run_dir / "diagnostics.jsonl"
    surf = run_dir / "surface.csv"
    if not diag.is_file() and not surf.is_file():
        raise ConfigError(f"{run_dir} has neither diagnostics.jsonl nor surface.csv")
    try:
        if diag.is_file():
            records = records_from_jsonl(diag.read_text(encoding="utf-8"))
            if not records:
                raise ConfigError(f"{diag} holds no records")
            write_text(dest / "drift.svg", drift_svg(records))
            write_text(dest / "diagnostics.csv", records_to_csv(records))
            made += ["drift.svg", "diagnostics.csv"]
        if surf.is_file():
            pts = surface_from_csv(surf.read_text(encoding="utf-8"))
            ny = _infer_ny(pts)
            if ny == 0 or len(pts) % ny:
                raise ConfigError(f"{surf} is not a full row-major grid")
            write_text(dest / "surface.obj", grid_to_obj(pts[:, 2:], len(pts) // ny, ny, projection))
            made.append("surface.obj")
    except (ValueError, KeyError, TypeError) as exc:
        raise ConfigError(f"corrupt run directory {run_dir}: {exc}") from exc
    print(f"exported {', '.join(made)} to {dest}")
    return EXIT_OK

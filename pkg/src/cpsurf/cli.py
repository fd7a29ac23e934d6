"""Command-line driver: grid sweeps, mesh export, reports.

Usage:
    cpsurf --config run.json --command geometry --out results/

Commands: check, geometry, immerse, frame (needs --point), willmore.
Exit codes: 0 success, 2 configuration/IO problem, 3 domain problem
(degenerate or singular points), 4 tolerance failure.
"""

import argparse
import sys
from pathlib import Path

import numpy as np

from . import frame as frame_mod
from . import immersion, model, report
from .config import load_config
from .errors import (ConfigError, CpsurfError, DegeneratePoint,
                     EvaluationDomainError, OddPanelCount,
                     QuadratureNonConvergence, SingularGridPoint,
                     SingularPathPoint, VanishingCommutator, ZeroField)
from .solution import eval_field

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_TOLERANCE = 4

_DOMAIN_ERRORS = (DegeneratePoint, SingularPathPoint, SingularGridPoint,
                  EvaluationDomainError, ZeroField, VanishingCommutator)


def _axes(cfg):
    l0, l1, r0, r1 = cfg.domain
    return (np.linspace(l0, l1, cfg.grid[0]),
            np.linspace(r0, r1, cfg.grid[1]))


def _mesh_field(cfg):
    xi_l, xi_r = _axes(cfg)
    pl, pr = np.meshgrid(xi_l, xi_r, indexing="ij")
    f = eval_field(cfg.spec, (pl.ravel(), pr.ravel()))
    return xi_l, xi_r, pl, pr, f


def _out_path(out_dir, cfg, name):
    return str(Path(out_dir) / (cfg.prefix + name))


def cmd_check(cfg, out_dir):
    """Solution certification sweep: EL, conservation, closedness."""
    xi_l, xi_r, pl, pr, f = _mesh_field(cfg)
    el = model.el_residual_norm(f)
    j_l, j_r = model.currents(f)
    cons = np.maximum(np.abs(j_l.derivative(0, 1)),
                      np.abs(j_r.derivative(1, 0)))
    closed = immersion.closedness_residual(f)
    rows = [(plv, prv, e, c, cl)
            for plv, prv, e, c, cl in zip(pl.ravel(), pr.ravel(), el.ravel(),
                                          cons.ravel(), closed.ravel())]
    report.write_csv(
        _out_path(out_dir, cfg, "check.csv"),
        ("xi_l", "xi_r", "el_residual", "conservation_residual",
         "closedness_residual"), rows)
    shape = pl.shape
    report.check_figure(_out_path(out_dir, cfg, "check.png"), xi_l, xi_r,
                        el.reshape(shape), cons.reshape(shape),
                        closed.reshape(shape))
    worst = max(el.max(), cons.max(), closed.max())
    passed = bool(worst <= cfg.residual_tol)
    summary = {
        "command": "check",
        "residual_tol": cfg.residual_tol,
        "max": {"el": float(el.max()), "conservation": float(cons.max()),
                "closedness": float(closed.max())},
        "mean": {"el": float(el.mean()), "conservation": float(cons.mean()),
                 "closedness": float(closed.mean())},
        "pass": passed,
    }
    report.write_json(_out_path(out_dir, cfg, "check_summary.json"), summary)
    print(f"check: max residual {worst:.3e} "
          f"({'PASS' if passed else 'FAIL'} at {cfg.residual_tol:.1e})")
    return EXIT_OK if passed else EXIT_TOLERANCE


def _geometry_arrays(cfg, f):
    j_l, g_lr, j_r, det_g, _ = immersion.metric_values(f)
    k, mask = immersion.curvature_grid(f, det_g_tol=cfg.det_g_tol)
    h, _ = frame_mod.mean_curvature_values(f, det_g_tol=cfg.det_g_tol)
    with np.errstate(invalid="ignore"):
        h_sq = -0.5 * np.einsum("...ij,...ji->...", h, h).real
        abs_h = np.sqrt(np.maximum(h_sq, 0.0))
    abs_h = np.where(mask, abs_h, np.nan)
    return j_l, g_lr, j_r, det_g, mask, k, abs_h


def cmd_geometry(cfg, out_dir):
    """First-form sweep: metric, regularity, curvatures, CSV + figure."""
    xi_l, xi_r, pl, pr, f = _mesh_field(cfg)
    j_l, g_lr, j_r, det_g, mask, k, abs_h = _geometry_arrays(cfg, f)
    rows = []
    for i in range(pl.size):
        regular = bool(mask.ravel()[i])
        rows.append((
            pl.ravel()[i], pr.ravel()[i], j_l.ravel()[i], g_lr.ravel()[i],
            j_r.ravel()[i], det_g.ravel()[i], regular,
            k.ravel()[i] if regular else None,
            abs_h.ravel()[i] if regular else None))
    report.write_csv(
        _out_path(out_dir, cfg, "geometry.csv"),
        ("xi_l", "xi_r", "j_l", "g_lr", "j_r", "det_g", "regular", "k",
         "abs_h"), rows)
    shape = pl.shape
    report.geometry_figure(_out_path(out_dir, cfg, "geometry.png"),
                           xi_l, xi_r, k.reshape(shape),
                           det_g.reshape(shape), abs_h.reshape(shape))
    n_reg = int(mask.sum())
    print(f"geometry: {n_reg}/{mask.size} regular points"
          + (f", K in [{np.nanmin(k):.6f}, {np.nanmax(k):.6f}]"
             if n_reg else ""))
    return EXIT_OK


def cmd_immerse(cfg, out_dir):
    """Weierstrass integration over the grid; OBJ (N = 2), JSON, figure."""
    xi_l, xi_r = _axes(cfg)
    base_index = (int(np.argmin(np.abs(xi_l - cfg.base_point[0]))),
                  int(np.argmin(np.abs(xi_r - cfg.base_point[1]))))
    try:
        grid = immersion.integrate_grid(
            cfg.spec, xi_l, xi_r, base_index=base_index,
            tol=cfg.quadrature_tol, require_regular=True)
    except SingularPathPoint as exc:
        raise SingularPathPoint(
            f"{exc} (grid {cfg.grid[0]}x{cfg.grid[1]}, "
            f"base index {base_index})") from exc
    basis = frame_mod.su_basis(cfg.n)
    coords = frame_mod.su_coordinates(grid.x, basis)
    pl, pr = np.meshgrid(xi_l, xi_r, indexing="ij")
    f = eval_field(cfg.spec, (pl.ravel(), pr.ravel()))
    _, _, _, det_g, mask, k, abs_h = _geometry_arrays(cfg, f)
    faces = report.grid_faces(*cfg.grid)
    flat_coords = coords.reshape(-1, coords.shape[-1])
    vertices = []
    for i in range(pl.size):
        regular = bool(mask.ravel()[i])
        vertices.append({
            "xi": [float(pl.ravel()[i]), float(pr.ravel()[i])],
            "coords": [float(c) for c in flat_coords[i]],
            "det_g": float(det_g.ravel()[i]),
            "k": float(k.ravel()[i]) if regular else None,
            "abs_h": float(abs_h.ravel()[i]) if regular else None,
        })
    sidecar = {
        "command": "immerse",
        "n": cfg.n,
        "grid": [cfg.grid[0], cfg.grid[1]],
        "base_index": [base_index[0], base_index[1]],
        "basis_order": [lab for lab, _ in basis],
        "quadrature": {"panels_per_cell": grid.panels,
                       "error_estimate": float(grid.error_estimate)},
        "vertices": vertices,
        "faces": [list(face) for face in faces],
    }
    report.write_json(_out_path(out_dir, cfg, "surface.json"), sidecar)
    if cfg.n == 2:
        report.write_obj(_out_path(out_dir, cfg, "surface.obj"),
                         flat_coords, faces)
        report.mesh_figure(_out_path(out_dir, cfg, "surface.png"),
                           coords.reshape(cfg.grid + (3,)))
    elif cfg.projection is not None:
        # Lossy 3D view of the higher-dimensional surface, labeled as such.
        labels = [lab for lab, _ in basis]
        try:
            axes3 = [labels.index(lab) for lab in cfg.projection]
        except ValueError as exc:
            raise ConfigError(
                f"projection labels must be among {labels}") from exc
        proj = coords[..., axes3]
        report.write_obj(_out_path(out_dir, cfg, "surface_projection.obj"),
                         proj.reshape(-1, 3), faces)
        report.mesh_figure(
            _out_path(out_dir, cfg, "surface_projection.png"), proj,
            title="projection onto (" + ", ".join(cfg.projection) + ")")
    print(f"immerse: {pl.size} vertices, {len(faces)} faces, "
          f"{grid.panels} Simpson panels per cell")
    return EXIT_OK


def cmd_frame(cfg, out_dir, point):
    """Full frame report at one point."""
    if point is None:
        raise ConfigError("--point xiL,xiR is required for the frame command")
    f = eval_field(cfg.spec, point)
    fr = frame_mod.build_frame(f, det_g_tol=cfg.det_g_tol)
    gw = frame_mod.gw_coefficients(f, fr)
    table = frame_mod.normalization_table(f, fr)
    res_l, res_r = frame_mod.gw_reconstruction_residual(f, fr, gw)
    gc = frame_mod.gauss_codazzi_residual(cfg.spec, point, h=1e-3,
                                          det_g_tol=cfg.det_g_tol)
    mc = frame_mod.mean_curvature(f, fr)
    j_l, g_lr, j_r, det_g, _ = immersion.metric_values(f)
    doc = {
        "command": "frame",
        "point": [float(point[0]), float(point[1])],
        "n": cfg.n,
        "metric": {"j_l": float(j_l), "g_lr": float(g_lr),
                   "j_r": float(j_r), "det_g": float(det_g)},
        "labels": list(fr.labels),
        "tangent_l": report.complex_matrix_json(fr.x_l),
        "tangent_r": report.complex_matrix_json(fr.x_r),
        "normals": [report.complex_matrix_json(m) for m in fr.normals],
        "phi": report.complex_matrix_json(fr.phi),
        "u": report.real_matrix_json(gw.u),
        "v": report.real_matrix_json(gw.v),
        "normalization_table": report.real_matrix_json(table),
        "normalization_max_deviation": float(np.abs(table).max()),
        "gw_reconstruction_residual": {
            "l": [float(v) for v in res_l], "r": [float(v) for v in res_r]},
        "gauss_codazzi": {"h": 1e-3, "residual": float(gc)},
        "mean_curvature": {
            "matrix": report.complex_matrix_json(mc.matrix),
            "scalar": None if mc.scalar is None else float(mc.scalar)},
    }
    report.write_json(_out_path(out_dir, cfg, "frame.json"), doc)
    print(f"frame: normalization max dev {np.abs(table).max():.3e}, "
          f"Gauss-Codazzi residual {gc:.3e}")
    return EXIT_OK


def cmd_willmore(cfg, out_dir):
    """Willmore functional over the domain with a refinement log."""
    res = frame_mod.willmore(cfg.spec, cfg.domain,
                             (cfg.grid[0], cfg.grid[1]),
                             tol=max(cfg.quadrature_tol, 1e-12),
                             det_g_tol=cfg.det_g_tol)
    doc = {
        "command": "willmore",
        "domain": [float(v) for v in cfg.domain],
        "value": float(res.value),
        "converged": bool(res.converged),
        "refinements": [
            {"panels_l": r[0], "panels_r": r[1], "value": float(r[2])}
            for r in res.refinements],
    }
    report.write_json(_out_path(out_dir, cfg, "willmore.json"), doc)
    report.willmore_figure(_out_path(out_dir, cfg, "willmore.png"),
                           res.refinements)
    print(f"willmore: value {res.value:.9e} "
          f"({'converged' if res.converged else 'NOT converged'})")
    return EXIT_OK if res.converged else EXIT_TOLERANCE


def _parse_point(text):
    try:
        l, r = text.split(",")
        return float(l), float(r)
    except (ValueError, AttributeError):
        raise ConfigError(f"--point must be 'xiL,xiR', got {text!r}") from None


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cpsurf",
        description="Surfaces in su(N) from sigma-model fields: residual "
                    "checks, induced geometry, mesh export, moving frames.")
    parser.add_argument("--config", required=True, help="JSON run config")
    parser.add_argument("--command", required=True,
                        choices=("check", "geometry", "immerse", "frame",
                                 "willmore"))
    parser.add_argument("--point", default=None,
                        help="evaluation point 'xiL,xiR' (frame command)")
    parser.add_argument("--out", default=".", help="output directory")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        point = _parse_point(args.point) if args.point is not None else None
        if args.command == "check":
            return cmd_check(cfg, out_dir)
        if args.command == "geometry":
            return cmd_geometry(cfg, out_dir)
        if args.command == "immerse":
            return cmd_immerse(cfg, out_dir)
        if args.command == "frame":
            return cmd_frame(cfg, out_dir, point)
        return cmd_willmore(cfg, out_dir)
    except (ConfigError, OddPanelCount, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _DOMAIN_ERRORS as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except QuadratureNonConvergence as exc:
        print(f"tolerance failure: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except CpsurfError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())

"""Batch command-line front door.

Subcommands: check-symbols, solve, verify, convergence. Exit codes: 0 on
success, 1 on a failed numerical check or tolerance breach (the report is
still written), 2 on configuration / parse / missing-artifact errors.
All floating output uses 17 significant digits so reruns diff exactly.
"""

import argparse
import json
import os
import sys

FMT = "%.17g"


def _fmt(x):
    return FMT % float(x)


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _write_json(path, obj):
    def default(o):
        raise TypeError(f"not JSON serializable: {o!r}")

    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, default=default)
        fh.write("\n")


def _interior_points(domain, n_points, seed, margin_factor=0.01):
    """Quasi-random interior points, radial margin 1% of the scale."""
    import numpy as np
    from scipy.stats import qmc

    margin = margin_factor * domain.length_scale
    reach = domain.rho_max
    sampler = qmc.Halton(d=3, scramble=True, seed=seed)
    pts = []
    while len(pts) < n_points:
        block = sampler.random(4 * n_points)
        cand = domain.center + reach * (2.0 * block - 1.0)
        keep = domain.contains(cand, margin=margin)
        pts.extend(cand[keep])
    return np.asarray(pts[:n_points])


def _build_problem(cfg):
    from .fields import source_from_json_dict
    from .geometry import domain_from_json_dict
    from .kernels import KernelParams

    kernel = KernelParams.from_json_dict(cfg["problem"]["kernel"])
    domain = domain_from_json_dict(cfg["problem"]["domain"])
    field = source_from_json_dict(cfg["problem"]["f"], kernel.a)
    return kernel, domain, field


def _solve_pipeline(cfg, kernel, domain, field, quad_order):
    """check -> exterior solve -> assemble; returns (surf, sol, filter)."""
    from . import assembly, exterior
    from .geometry import surface_quadrature

    solver = cfg["solver"]
    bvp = assembly.reduce_to_bvp(kernel, field, domain)
    if not bvp.solver_available:
        raise ValueError("no exterior solver for this operator pair")
    surf = surface_quadrature(domain, quad_order)
    if solver["method"] == "spectral":
        if domain.kind != "ball":
            raise ValueError("spectral requires ball")
        data = exterior.project_boundary_data(field, domain,
                                              solver.get("Lmax", 16))
        sol = exterior.solve_ball_spectral(kernel.a, domain, data)
    elif solver["method"] == "mfs":
        coll = exterior.collocation_surface(domain, solver["n_sources"],
                                            solver.get("collocation_order"))
        data = exterior.BoundaryData.from_nodes(field.value(coll.nodes))
        sol = exterior.solve_mfs(
            domain, kernel.a, data, solver["n_sources"], solver["beta"],
            tol=solver.get("tol"), field=field,
            collocation_order=coll.order)
    else:
        raise ValueError(f"unknown solver method {solver['method']!r}")
    filt = assembly.assemble_filter(field, sol, surf, kernel)
    return surf, sol, filt


def cmd_check_symbols(args):
    from .exceptions import OptFilterError
    from .symbols import BoundarySymbol, SymbolPoly, full_report

    try:
        sym_cfg = _load_json(args.symbols)
        bnd_cfg = _load_json(args.boundary)
        q = SymbolPoly.from_json_dict(sym_cfg)
        ops = [BoundarySymbol.from_json_dict(d) for d in bnd_cfg["ops"]]
    except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    result = {"order": q.order, "dimension": q.dimension}
    failed = []
    try:
        report = full_report(q, ops)
        result.update(report.to_json_dict())
        if not report.md_elliptic:
            failed.append("md-ellipticity")
        counts = set(report.upper_root_counts.values())
        if counts != {q.order // 2}:
            failed.append("proper-ellipticity")
        if report.sl_min_det < args.det_floor:
            failed.append("shapiro-lopatinskii")
    except OptFilterError as exc:
        result["error"] = str(exc)
        failed.append(type(exc).__name__)
    result["failed"] = failed
    _write_json(args.out, result)
    for name in ("md-ellipticity", "proper-ellipticity",
                 "shapiro-lopatinskii"):
        status = "FAIL" if name in failed else "ok"
        print(f"{name}: {status}")
    if result.get("error"):
        print(f"audit error: {result['error']}")
    return 1 if failed else 0


def cmd_solve(args):
    import numpy as np

    from .exceptions import OptFilterError

    try:
        cfg = _load_json(args.config)
        kernel, domain, field = _build_problem(cfg)
    except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    out_dir = args.out or cfg.get("output", "out")
    os.makedirs(out_dir, exist_ok=True)
    quad_order = int(cfg.get("verify", {}).get("quad_order", 32))
    try:
        surf, sol, filt = _solve_pipeline(cfg, kernel, domain, field,
                                          quad_order)
    except (OptFilterError, ValueError) as exc:
        print(f"solve failed: {exc}", file=sys.stderr)
        return 1

    csv_path = os.path.join(out_dir, "surface_density.csv")
    with open(csv_path, "w") as fh:
        fh.write("node_id,x,y,z,sigma\n")
        for i, (node, s) in enumerate(zip(surf.nodes, filt.surface_density)):
            fh.write(",".join([str(i)] + [_fmt(v) for v in node]
                              + [_fmt(s)]) + "\n")

    manifest = {
        "kernel": kernel.to_json_dict(),
        "domain": domain.to_json_dict(),
        "f": cfg["problem"]["f"],
        "solver": cfg["solver"],
        "quad_order": quad_order,
        "surface_nodes": surf.n_nodes,
        "surface_density_min": float(np.min(filt.surface_density)),
        "surface_density_max": float(np.max(filt.surface_density)),
        "layer_mass": filt.layer_mass(),
        "volume_density_family": cfg["problem"]["f"]["family"],
        "warnings": [],
    }
    if hasattr(sol, "conditioning"):
        manifest["conditioning"] = sol.conditioning
        manifest["boundary_residual"] = sol.boundary_residual
        if sol.ill_conditioned:
            manifest["warnings"].append("ill-conditioned collocation system")
    if hasattr(sol, "coeffs"):
        manifest["spectral_lmax"] = sol.coeffs.lmax
    _write_json(os.path.join(out_dir, "manifest.json"), manifest)

    if not args.no_figures:
        from .figures import render_surface_density
        render_surface_density(surf, filt.surface_density,
                               os.path.join(out_dir, "surface_density.png"))
    print(f"artifacts written to {out_dir}")
    for w in manifest["warnings"]:
        print(f"warning: {w}")
    return 0


def _load_sigma(artifacts_dir, surf):
    import numpy as np

    path = os.path.join(artifacts_dir, "surface_density.csv")
    rows = np.loadtxt(path, delimiter=",", skiprows=1)
    if rows.ndim == 1:
        rows = rows[None, :]
    if rows.shape[0] != surf.n_nodes:
        raise ValueError(
            f"artifact has {rows.shape[0]} nodes, quadrature has "
            f"{surf.n_nodes}; rebuild with the same quad_order")
    node_gap = np.max(np.abs(rows[:, 1:4] - surf.nodes))
    if node_gap > 1e-9 * surf.domain.length_scale:
        raise ValueError(f"artifact nodes differ from quadrature nodes "
                         f"by {node_gap:.3e}")
    return rows[:, 4]


def cmd_verify(args):
    from .assembly import DistributionalFilter
    from .forward import residual_report
    from .geometry import surface_quadrature

    try:
        cfg = _load_json(args.config)
        kernel, domain, field = _build_problem(cfg)
        vcfg = cfg.get("verify", {})
        quad_order = int(vcfg.get("quad_order", 32))
        surf = surface_quadrature(domain, quad_order)
        sigma = _load_sigma(args.artifacts, surf)
    except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    filt = DistributionalFilter(
        volume_density=lambda pts: field.qf(pts, kernel.a),
        surface_density=sigma, params=kernel, domain=domain, surf=surf,
        source=field)
    points = _interior_points(domain, int(vcfg.get("n_points", 50)),
                              int(vcfg.get("seed", 0)))
    report = residual_report(kernel, filt, field, points, quad_order)

    with open(args.out, "w") as fh:
        fh.write("point_id,x,y,z,Rh,f,abs_err\n")
        for i, p, v, t, err in report.rows():
            fh.write(",".join([str(i)] + [_fmt(c) for c in p]
                              + [_fmt(v), _fmt(t), _fmt(err)]) + "\n")
    _write_json(os.path.splitext(args.out)[0] + "_summary.json",
                report.summary_dict())
    if not args.no_figures:
        from .figures import render_residuals
        render_residuals(report,
                         os.path.splitext(args.out)[0] + ".png")

    tol = float(vcfg.get("tol", 1e-6))
    print(f"sup_error = {report.sup_error:.6e} (tol {tol:.1e}), "
          f"l2_error = {report.l2_error:.6e}")
    return 0 if report.sup_error <= tol else 1


def cmd_convergence(args):
    from .forward import residual_report

    try:
        cfg = _load_json(args.config)
        kernel, domain, field = _build_problem(cfg)
        levels = [int(v) for v in args.levels.split(",")]
    except (OSError, KeyError, ValueError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    vcfg = cfg.get("verify", {})
    sweep_sources = args.sweep == "sources"
    rows = []
    for level, value in enumerate(levels):
        run_cfg = json.loads(json.dumps(cfg))
        if sweep_sources:
            run_cfg["solver"]["n_sources"] = value
            quad_order = int(vcfg.get("quad_order", 32))
        else:
            quad_order = value
        surf, sol, filt = _solve_pipeline(run_cfg, kernel, domain, field,
                                          quad_order)
        if sweep_sources:
            sup = sol.boundary_residual
            l2 = sup  # boundary sweep reports the sup residual only
        else:
            points = _interior_points(domain, int(vcfg.get("n_points", 50)),
                                      int(vcfg.get("seed", 0)))
            rep = residual_report(kernel, filt, field, points, quad_order)
            sup, l2 = rep.sup_error, rep.l2_error
        rows.append((level, value, sup, l2))

    with open(args.out, "w") as fh:
        fh.write("level,param,sup_residual,l2_residual\n")
        for level, value, sup, l2 in rows:
            fh.write(f"{level},{value},{_fmt(sup)},{_fmt(l2)}\n")
    sups = [r[2] for r in rows]
    summary = {"levels": levels,
               "monotone_decreasing": bool(
                   len(sups) > 1
                   and all(b < a for a, b in zip(sups, sups[1:])))}
    _write_json(os.path.splitext(args.out)[0] + "_summary.json", summary)
    if not args.no_figures:
        from .figures import render_convergence
        render_convergence(
            [r[1] for r in rows], sups, [r[3] for r in rows],
            os.path.splitext(args.out)[0] + ".png",
            xlabel="sources" if sweep_sources else "quadrature order")
    if len(sups) > 1:
        flag = "yes" if summary["monotone_decreasing"] else "NO"
        print(f"monotone decrease: {flag}")
    return 0


def _apply_threads(k):
    for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS",
                "MKL_NUM_THREADS"):
        os.environ[var] = str(k)


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="optfilter",
        description="Covariance integral equation solver and verifier")
    parser.add_argument("--threads", type=int, default=None,
                        help="cap BLAS/OpenMP thread pools")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-symbols", help="ellipticity audits")
    p.add_argument("--symbols", required=True)
    p.add_argument("--boundary", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--det-floor", type=float, default=1e-6)
    p.set_defaults(func=cmd_check_symbols)

    p = sub.add_parser("solve", help="assemble the filter densities")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="apply the operator to the filter")
    p.add_argument("--config", required=True)
    p.add_argument("--artifacts", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("convergence", help="residual sweep over levels")
    p.add_argument("--config", required=True)
    p.add_argument("--levels", required=True)
    p.add_argument("--sweep", choices=("orders", "sources"),
                   default="orders")
    p.add_argument("--out", required=True)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_convergence)

    args = parser.parse_args(argv)
    if args.threads is not None:
        _apply_threads(args.threads)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

One JSON config document describes one job; flags only pick the config path,
the output directory, and dotted-key overrides, so every run is reproducible
from the config artifact alone.  Identical configs produce byte-identical
CSV/JSON/OBJ outputs.

    bcvhelix <command> --config job.json [--out DIR] [--override key=value ...]

Commands: classify, chart, cmc, minimal, deform, verify, export.
Exit status: 0 iff every requested check passed; 1 on a failed check;
2 on configuration or I/O errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .bour import BourSeed, NaturalChart, build_chart
from .cmc import cmc_U, cmc_residual, minimal_U
from .errors import BcvHelixError, ConfigError
from .numerics import SmoothFunction, Tolerances
from .oracle import (
    MeshGrid,
    SurfaceChart,
    first_form_numeric,
    isometry_deviation,
    mean_curvature_extrinsic,
    sample_mesh,
)
from .spaces import BcvSpace, classify

COMMANDS = ("classify", "chart", "cmc", "minimal", "deform", "verify", "export")
FORMATS = ("csv", "obj", "json")

# names available to "explicit" profile expressions
_EXPR_NS = {
    name: getattr(math, name)
    for name in (
        "sin", "cos", "tan", "asin", "acos", "atan", "atan2", "sinh", "cosh",
        "tanh", "asinh", "acosh", "atanh", "sqrt", "exp", "log", "pi", "e",
    )
}
_EXPR_NS["abs"] = abs


@dataclass
class JobConfig:
    space: BcvSpace
    mode: str
    seed_family: str
    m: float
    a: float
    H: float
    c: float
    u_range: tuple[float, float]
    u_expr: Optional[str]
    du_expr: Optional[str]
    sweep_values: list[float]
    nu: int
    nt: int
    t_range: tuple[float, float]
    tol: Tolerances
    check_tol: dict
    basename: str
    formats: list[str]
    raw_theta: bool
    raw: dict = field(repr=False, default_factory=dict)


def _get(cfg: dict, path: str, default=None, required: bool = False):
    node = cfg
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            if required:
                raise ConfigError(f"missing required config field '{path}'")
            return default
        node = node[part]
    return node


def _as_float(value, path: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{path}: expected a number, got {value!r}")


def parse_config(cfg: dict, mode: str) -> JobConfig:
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    cfg_mode = _get(cfg, "mode")
    if cfg_mode is not None and cfg_mode != mode:
        raise ConfigError(f"mode: config says {cfg_mode!r} but command is {mode!r}")
    kappa = _as_float(_get(cfg, "space.kappa", required=True), "space.kappa")
    tau = _as_float(_get(cfg, "space.tau", required=True), "space.tau")
    space = BcvSpace(kappa, tau)

    family = _get(cfg, "seed.family", "explicit")
    if family not in ("cmc-case", "minimal-case", "explicit"):
        raise ConfigError(f"seed.family: unknown family {family!r}")
    m = _as_float(_get(cfg, "seed.m", 1.0), "seed.m")
    if m == 0:
        raise ConfigError("seed.m: must be nonzero")
    a = _as_float(_get(cfg, "seed.a", 0.0), "seed.a")
    H = _as_float(_get(cfg, "seed.H", 0.0), "seed.H")
    c = _as_float(_get(cfg, "seed.c", 0.0), "seed.c")
    u_range = _get(cfg, "seed.u_range", [-2.0, 2.0])
    if (
        not isinstance(u_range, (list, tuple))
        or len(u_range) != 2
        or not u_range[0] < u_range[1]
    ):
        raise ConfigError(f"seed.u_range: need [lo, hi] with lo < hi, got {u_range!r}")
    u_range = (float(u_range[0]), float(u_range[1]))
    u_expr = _get(cfg, "seed.U")
    du_expr = _get(cfg, "seed.dU")
    if family == "explicit" and mode != "classify" and not u_expr:
        raise ConfigError("seed.U: explicit seeds need a U(u) expression")

    sweep_values = _get(cfg, "sweep.values", [])
    sweep_param = _get(cfg, "sweep.parameter", "a")
    if sweep_param != "a":
        raise ConfigError(f"sweep.parameter: only 'a' is supported, got {sweep_param!r}")
    sweep_values = [_as_float(v, "sweep.values") for v in sweep_values]

    nu = int(_get(cfg, "grid.nu", 41))
    nt = int(_get(cfg, "grid.nt", 41))
    if nu < 2 or nt < 2:
        raise ConfigError("grid.nu and grid.nt must be >= 2")
    t_range = _get(cfg, "grid.t_range", [-math.pi, math.pi])
    if not (isinstance(t_range, (list, tuple)) and len(t_range) == 2 and t_range[0] < t_range[1]):
        raise ConfigError(f"grid.t_range: need [lo, hi] with lo < hi, got {t_range!r}")
    t_range = (float(t_range[0]), float(t_range[1]))

    tol_over = _get(cfg, "tolerances", {}) or {}
    if not isinstance(tol_over, dict):
        raise ConfigError("tolerances: must be an object")
    tol_fields = {f for f in Tolerances.__dataclass_fields__}
    tol_kwargs = {}
    check_tol = {
        "cmc_residual": 1e-8,
        "h_ext": 1e-4,
        "first_form": 1e-6,
        "isometry": 1e-6,
    }
    for key, value in tol_over.items():
        if key in tol_fields:
            tol_kwargs[key] = _as_float(value, f"tolerances.{key}")
        elif key in check_tol:
            check_tol[key] = _as_float(value, f"tolerances.{key}")
        else:
            raise ConfigError(f"tolerances.{key}: unknown tolerance")
    tol = Tolerances(**tol_kwargs)

    basename = _get(cfg, "output.basename", "surface")
    formats = _get(cfg, "output.formats", ["json"])
    if not isinstance(formats, list) or not set(formats) <= set(FORMATS):
        raise ConfigError(f"output.formats: must be a subset of {FORMATS}, got {formats!r}")
    raw_theta = bool(_get(cfg, "output.raw_theta", False))

    return JobConfig(
        space=space,
        mode=mode,
        seed_family=family,
        m=m,
        a=a,
        H=H,
        c=c,
        u_range=u_range,
        u_expr=u_expr,
        du_expr=du_expr,
        sweep_values=sweep_values,
        nu=nu,
        nt=nt,
        t_range=t_range,
        tol=tol,
        check_tol=check_tol,
        basename=basename,
        formats=formats,
        raw_theta=raw_theta,
        raw=cfg,
    )


def _compile_expr(expr: str, path: str):
    try:
        code = compile(expr, f"<{path}>", "eval")
    except SyntaxError as exc:
        raise ConfigError(f"{path}: bad expression {expr!r}: {exc}")

    def fn(u: float) -> float:
        try:
            return float(eval(code, {"__builtins__": {}}, {**_EXPR_NS, "u": u}))
        except Exception as exc:
            raise BcvHelixError(f"{path}: evaluation failed at u={u}: {exc}")

    return fn


def resolve_profile(job: JobConfig):
    """U(u) plus metadata for the configured seed family."""
    meta = {"family": job.seed_family, "m": job.m, "a": job.a, "H": job.H, "c": job.c}
    if job.seed_family == "cmc-case":
        U, case = cmc_U(job.space, job.m, job.a, job.H, job.c, u_window=job.u_range, tol=job.tol)
        meta["case"] = case.value
        meta["domain"] = list(U.domain)
    elif job.seed_family == "minimal-case":
        U, cls = minimal_U(job.space, job.m, job.a, job.c, u_window=job.u_range, tol=job.tol)
        meta["case"] = cls.value
        meta["domain"] = list(U.domain)
        meta["H"] = 0.0
    else:
        f = _compile_expr(job.u_expr, "seed.U")
        df = _compile_expr(job.du_expr, "seed.dU") if job.du_expr else None
        U = SmoothFunction(f, df)
        meta["domain"] = list(job.u_range)
    return U, meta


def make_chart(job: JobConfig, a: Optional[float] = None) -> tuple[NaturalChart, dict]:
    """Natural chart of the configured family member.

    ``a`` overrides only the chart pitch (deform sweeps): the metric profile
    U stays the one resolved at the configured base pitch, so sweep frames
    are members of one isometry family, not different surfaces.
    """
    U, meta = resolve_profile(job)
    pitch = job.a if a is None else a
    meta["a"] = pitch
    lo, hi = meta["domain"]
    seed = BourSeed(U, job.m, pitch, (lo, hi))
    chart = build_chart(job.space, seed, job.tol)
    meta["validity"] = list(chart.u_valid)
    return chart, meta


def _fmt(v: float) -> str:
    return f"{v:.16e}"


def _write_atomic(path: str, data: str):
    tmp = path + ".tmp"
    try:
        with open(tmp, "w", newline="") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str, obj) -> None:
    _write_atomic(path, json.dumps(obj, sort_keys=True, indent=2) + "\n")


def write_profile_csv(path: str, chart: NaturalChart, nu: int, margin: float = 1e-9):
    lo, hi = chart.u_valid
    lo, hi = lo + margin, hi - margin
    lines = ["u,xi1,xi2,theta0,U"]
    for u in np.linspace(lo, hi, nu):
        lines.append(
            ",".join(
                _fmt(v)
                for v in (u, chart.xi1(u), chart.xi2(u), chart.theta0(u), chart.U(u))
            )
        )
    _write_atomic(path, "\n".join(lines) + "\n")


def write_mesh_csv(path: str, mesh: MeshGrid, resid_per_u):
    lines = ["u,t,x,y,z,H_ext,K,cmc_residual"]
    for i, u in enumerate(mesh.us):
        ru = resid_per_u[i]
        for j, t in enumerate(mesh.ts):
            idx = i * mesh.nt + j
            x, y, z = mesh.vertices[idx]
            lines.append(
                ",".join(
                    _fmt(v)
                    for v in (u, t, x, y, z, mesh.h_ext[idx], mesh.gauss[idx], ru)
                )
            )
    _write_atomic(path, "\n".join(lines) + "\n")


def write_obj(path: str, mesh: MeshGrid):
    """Wavefront OBJ with quads split into triangles; ASCII, LF endings."""
    lines = []
    index = {}
    for idx, v in enumerate(mesh.vertices):
        if not np.any(np.isnan(v)):
            index[idx] = len(index) + 1  # OBJ indices are 1-based
            lines.append(f"v {_fmt(v[0])} {_fmt(v[1])} {_fmt(v[2])}")
    for i in range(mesh.nu - 1):
        for j in range(mesh.nt - 1):
            q = (
                i * mesh.nt + j,
                (i + 1) * mesh.nt + j,
                (i + 1) * mesh.nt + j + 1,
                i * mesh.nt + j + 1,
            )
            if all(k in index for k in q):
                lines.append(f"f {index[q[0]]} {index[q[1]]} {index[q[2]]}")
                lines.append(f"f {index[q[0]]} {index[q[2]]} {index[q[3]]}")
    _write_atomic(path, "\n".join(lines) + "\n")


def _surface(job: JobConfig, chart: NaturalChart) -> SurfaceChart:
    sc = SurfaceChart.from_natural(chart, t_range=job.t_range)
    if job.raw_theta:
        # raw (u, theta) parametrization of the same surface
        sc = SurfaceChart(
            chart.space, chart.xi1, chart.xi2, lambda u, t: t, chart.a,
            chart.u_valid, job.t_range, U=chart.U, source=chart,
        )
    return sc


def _interior_grid(chart: NaturalChart, job: JobConfig, margin_frac: float = 0.02):
    lo, hi = chart.u_valid
    pad = (hi - lo) * margin_frac
    return np.linspace(lo + pad, hi - pad, job.nu)


def _residual_per_u(job: JobConfig, chart: NaturalChart, us) -> list:
    out = []
    for u in us:
        try:
            out.append(cmc_residual(job.space, chart.seed, job.H, u, job.tol))
        except BcvHelixError:
            out.append(float("nan"))
    return out


def cmd_classify(job: JobConfig, out_dir: str) -> int:
    label = classify(job.space).value
    report = {"kappa": job.space.kappa, "tau": job.space.tau, "class": label}
    print(json.dumps(report, sort_keys=True))
    if "json" in job.formats:
        write_json(os.path.join(out_dir, f"{job.basename}.classify.json"), report)
    return 0


def _cmd_profile(job: JobConfig, out_dir: str) -> int:
    chart, meta = make_chart(job)
    files = []
    if "csv" in job.formats or job.mode == "chart":
        path = os.path.join(out_dir, f"{job.basename}.profile.csv")
        write_profile_csv(path, chart, job.nu)
        files.append(path)
    report = {"seed": meta, "files": [os.path.basename(f) for f in files]}
    if "json" in job.formats:
        path = os.path.join(out_dir, f"{job.basename}.{job.mode}.json")
        write_json(path, report)
    print(json.dumps(report, sort_keys=True))
    return 0


def cmd_verify(job: JobConfig, out_dir: str) -> int:
    chart, meta = make_chart(job)
    sc = SurfaceChart.from_natural(chart, t_range=job.t_range)
    us = _interior_grid(chart, job)
    ts = np.linspace(job.t_range[0], job.t_range[1], min(job.nt, 7))
    resid = _residual_per_u(job, chart, us)
    max_resid = float(np.nanmax(np.abs(resid)))
    max_h_dev = 0.0
    max_form_dev = 0.0
    H_target = abs(meta.get("H", job.H))
    for u in us[:: max(1, len(us) // 12)]:
        for t in ts:
            h = mean_curvature_extrinsic(job.space, sc, u, t, job.tol)
            max_h_dev = max(max_h_dev, abs(abs(h) - H_target))
            E, F, G = first_form_numeric(job.space, sc, u, t, job.tol)
            Uv = chart.U(u)
            max_form_dev = max(
                max_form_dev, abs(E - 1.0), abs(F), abs(G - Uv * Uv)
            )
    checks = {
        "cmc_residual": {"value": max_resid, "tol": job.check_tol["cmc_residual"]},
        "h_ext_vs_H": {"value": max_h_dev, "tol": job.check_tol["h_ext"]},
        "first_form": {"value": max_form_dev, "tol": job.check_tol["first_form"]},
    }
    for chk in checks.values():
        chk["pass"] = bool(chk["value"] < chk["tol"])
    ok = all(chk["pass"] for chk in checks.values())
    report = {
        "seed": meta,
        "domain": list(chart.u_valid),
        "checks": checks,
        "pass": ok,
    }
    write_json(os.path.join(out_dir, f"{job.basename}.verify.json"), report)
    print(json.dumps(report, sort_keys=True))
    return 0 if ok else 1


def _export_mesh(job: JobConfig, chart: NaturalChart, out_dir: str, suffix: str = ""):
    sc = _surface(job, chart)
    mesh = sample_mesh(job.space, sc, job.nu, job.nt, job.tol)
    resid = _residual_per_u(job, chart, mesh.us)
    files = []
    if "obj" in job.formats:
        path = os.path.join(out_dir, f"{job.basename}{suffix}.obj")
        write_obj(path, mesh)
        files.append(path)
    if "csv" in job.formats:
        path = os.path.join(out_dir, f"{job.basename}{suffix}.csv")
        write_mesh_csv(path, mesh, resid)
        files.append(path)
    return mesh, files


def cmd_export(job: JobConfig, out_dir: str) -> int:
    chart, meta = make_chart(job)
    mesh, files = _export_mesh(job, chart, out_dir)
    h_known = mesh.h_ext[~np.isnan(mesh.h_ext)]
    report = {
        "seed": meta,
        "vertices": int(mesh.vertex_count),
        "dropped_rows": list(mesh.dropped_rows),
        "max_abs_h_ext": float(np.max(np.abs(h_known))) if h_known.size else None,
        "files": [os.path.basename(f) for f in files],
    }
    if "json" in job.formats:
        write_json(os.path.join(out_dir, f"{job.basename}.export.json"), report)
    print(json.dumps(report, sort_keys=True))
    return 0


def cmd_deform(job: JobConfig, out_dir: str) -> int:
    values = job.sweep_values or [job.a]
    charts, frames, errors = {}, [], {}
    for value in values:
        tag = f"_a={value:g}"
        try:
            chart, meta = make_chart(job, a=value)
            mesh, files = _export_mesh(job, chart, out_dir, suffix=tag)
            charts[value] = chart
            frames.append(
                {"a": value, "files": [os.path.basename(f) for f in files],
                 "validity": list(chart.u_valid)}
            )
        except BcvHelixError as exc:
            errors[f"{value:g}"] = str(exc)
    n = len(values)
    matrix = [[None] * n for _ in range(n)]
    worst = 0.0
    for i, vi in enumerate(values):
        for j, vj in enumerate(values):
            if vi in charts and vj in charts:
                if j < i:
                    matrix[i][j] = matrix[j][i]
                    continue
                dev = 0.0
                if i != j:
                    dev = isometry_deviation(
                        job.space,
                        SurfaceChart.from_natural(charts[vi], t_range=job.t_range),
                        SurfaceChart.from_natural(charts[vj], t_range=job.t_range),
                        tol=job.tol,
                    )
                matrix[i][j] = dev
                worst = max(worst, dev)
    ok = not errors and worst < job.check_tol["isometry"]
    report = {
        "sweep": values,
        "frames": frames,
        "frame_errors": errors,
        "isometry_deviation": matrix,
        "max_isometry_deviation": worst,
        "pass": bool(ok),
    }
    write_json(os.path.join(out_dir, f"{job.basename}.deform.json"), report)
    print(json.dumps(report, sort_keys=True))
    return 0 if ok else 1


def apply_overrides(cfg: dict, overrides: list[str]) -> dict:
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--override needs key=value, got {item!r}")
        key, _, raw = item.partition("=")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = cfg
        parts = key.split(".")
        for part in parts[:-1]:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"--override {key}: {part} is not an object")
        node[parts[-1]] = value
    return cfg


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="bcvhelix",
        description="helicoidal CMC surfaces in BCV spaces: build, deform, verify, export",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the JSON job config")
        p.add_argument("--out", default=".", help="output directory")
        p.add_argument(
            "--override",
            action="append",
            default=[],
            metavar="KEY=VALUE",
            help="dotted-path config override (value parsed as JSON)",
        )
    args = parser.parse_args(argv)
    try:
        with open(args.config) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    try:
        cfg = apply_overrides(cfg, args.override)
        job = parse_config(cfg, args.command)
        os.makedirs(args.out, exist_ok=True)
        handler = {
            "classify": cmd_classify,
            "chart": _cmd_profile,
            "cmc": _cmd_profile,
            "minimal": _cmd_profile,
            "deform": cmd_deform,
            "verify": cmd_verify,
            "export": cmd_export,
        }[args.command]
        return handler(job, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except BcvHelixError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

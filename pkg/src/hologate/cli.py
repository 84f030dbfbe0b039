"""Command-line front end for verification suites, holonomy and synthesis.

Commands
--------
verify-connection   closed-form vs exact-derivative connection at sampled points
verify-curvature    closed-form vs finite-difference curvature, span residuals
holonomy            holonomy of a loop-spec file
algebra             holonomy-algebra dimension estimate
synth               loop synthesis for a target gate file
disentangle-check   product-form vs direct exponentials across cutoffs

Exit codes: 0 pass, 1 tolerance/fidelity failure, 2 input/config error,
3 reachability rejection.

Loop-spec files are JSON:

    {
      "base": {"xi": [0.0, 0.0], "zeta": [0.0, 0.0]},
      "steps": 512,
      "segments": [
        {"type": "line",
         "from": {"xi": [0.0, 0.0], "zeta": [0.0, 0.0]},
         "to":   {"xi": [0.1, 0.0], "zeta": [0.0, 0.0]}},
        {"type": "arc", "center": {"xi": [0.0, 0.0], "zeta": [0.0, 0.0]},
         "plane": ["re_zeta", "im_zeta"], "radius": 0.1,
         "start_angle": 0.0, "sweep": 6.283185307179586}
      ]
    }

Target files are JSON with a 4x4 row-major matrix of [re, im] pairs:

    {"matrix": [[[1,0],[0,0],[0,0],[0,0]], ...]}
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import connection as conn
from . import synth as syn
from .holonomy import (
    ERROR_BUDGET,
    Arc,
    Line,
    LoopPath,
    default_algebra_grid,
    holonomy as compute_holonomy,
    holonomy_algebra_spectrum,
)
from .coherent import u_disentangled, u_op, v_disentangled, v_op
from .errors import (
    BudgetError,
    LoopClosureError,
    ParameterDomainError,
    ReachabilityError,
)
from .fock import FockSpace, basis_state

EXIT_OK = 0
EXIT_TOLERANCE = 1
EXIT_INPUT = 2
EXIT_REACHABILITY = 3

ANTIHERM_TOL = 1e-10
SPAN_TOL = 1e-8
CUTOFF_AGREEMENT_TOL = 1e-10
FIDELITY_THRESHOLD = 0.999


@dataclass
class RunConfig:
    """Run parameters echoed verbatim into every report."""

    cutoff: int = 24
    xi_max: float = 1.0
    zeta_max: float = 0.5
    steps: int = 512
    tol_connection: float = 1e-8
    tol_curvature: float = 1e-6
    tol_unitarity: float = 1e-9
    seed: int = 0
    format: str = "json"
    out: str | None = None


class ConfigError(ValueError):
    pass


def load_config(args) -> RunConfig:
    cfg = RunConfig()
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config file must hold a JSON object")
        known = {f.name for f in fields(RunConfig)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        for key, value in data.items():
            setattr(cfg, key, value)
    for f in fields(RunConfig):
        val = getattr(args, f.name, None)
        if val is not None:
            setattr(cfg, f.name, val)
    if cfg.format not in ("json", "csv"):
        raise ConfigError(f"unknown output format {cfg.format!r}")
    if cfg.cutoff < 1 or cfg.steps < 8:
        raise ConfigError("cutoff must be >= 1 and steps >= 8")
    return cfg


def _matrix_to_json(m: np.ndarray):
    """Row-major nested lists of [re, im] pairs."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def _matrix_from_json(data) -> np.ndarray:
    arr = np.asarray(data, dtype=float)
    if arr.shape != (4, 4, 2):
        raise ValueError(f"expected a 4x4 matrix of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def _point_from_json(data) -> conn.ParamPoint:
    try:
        xi = complex(data["xi"][0], data["xi"][1])
        zeta = complex(data["zeta"][0], data["zeta"][1])
    except (KeyError, TypeError, IndexError) as exc:
        raise ValueError(f"malformed point {data!r}") from exc
    return conn.ParamPoint(xi, zeta)


def load_loop(path: str) -> tuple[LoopPath, int | None]:
    with open(path) as fh:
        data = json.load(fh)
    segments = []
    for seg in data.get("segments", []):
        kind = seg.get("type")
        if kind == "line":
            segments.append(Line(_point_from_json(seg["from"]), _point_from_json(seg["to"])))
        elif kind == "arc":
            plane = tuple(seg["plane"])
            segments.append(
                Arc(
                    center=_point_from_json(seg["center"]),
                    plane=plane,
                    radius=float(seg["radius"]),
                    start_angle=float(seg["start_angle"]),
                    sweep=float(seg["sweep"]),
                )
            )
        else:
            raise ValueError(f"unknown segment type {kind!r}")
    base = _point_from_json(data["base"]) if "base" in data else None
    steps = int(data["steps"]) if "steps" in data else None
    return LoopPath(tuple(segments), base=base), steps


def sample_points(cfg: RunConfig, count: int) -> list[conn.ParamPoint]:
    """Deterministic pseudo-random points inside the budget box."""
    rng = np.random.default_rng(cfg.seed)
    pts = []
    for _ in range(count):
        rx = cfg.xi_max * np.sqrt(rng.uniform(0.05, 0.95))
        rz = cfg.zeta_max * np.sqrt(rng.uniform(0.05, 0.95))
        ax, az = rng.uniform(0, 2 * np.pi, size=2)
        pts.append(conn.ParamPoint(rx * np.exp(1j * ax), rz * np.exp(1j * az)))
    return pts


def emit(report: dict, rows: list[tuple], cfg: RunConfig) -> None:
    """Write the report as JSON, or the per-point rows as CSV.

    CSV rows carry (re_xi, im_xi, re_zeta, im_zeta, metric, value); config
    echo lines are prefixed with '#'.
    """
    if cfg.format == "json":
        text = json.dumps(report, indent=2)
    else:
        buf = io.StringIO()
        for key, value in report["config"].items():
            buf.write(f"# {key} = {value}\n")
        writer = csv.writer(buf)
        writer.writerow(["re_xi", "im_xi", "re_zeta", "im_zeta", "metric", "value"])
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
        text = buf.getvalue().rstrip("\n")
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _point_row(p: conn.ParamPoint, metric: str, value: float):
    return (p.xi.real, p.xi.imag, p.zeta.real, p.zeta.imag, metric, float(value))


# ---------------------------------------------------------------------------
# Commands


def cmd_verify_connection(args) -> int:
    cfg = load_config(args)
    space = FockSpace(cfg.cutoff)
    points = sample_points(cfg, args.points)
    rng = np.random.default_rng(cfg.seed + 1)

    adequacy = conn.cutoff_agreement(cfg.cutoff, points[:3])
    rows = []
    entries = []
    worst = 0.0
    worst_ah = 0.0
    for p in points:
        numeric = conn.connection_numeric(space, p)
        analytic = conn.connection_analytic(p)
        err = max(
            np.abs(numeric.a_xi - analytic.a_xi).max(),
            np.abs(numeric.a_zeta - analytic.a_zeta).max(),
        )
        ah = 0.0
        for _ in range(4):
            tangent = rng.normal(size=4)
            value = numeric.one_form(
                complex(tangent[0], tangent[1]), complex(tangent[2], tangent[3])
            )
            ah = max(ah, np.abs(value + value.conj().T).max())
        worst = max(worst, err)
        worst_ah = max(worst_ah, ah)
        entries.append(
            {
                "xi": [p.xi.real, p.xi.imag],
                "zeta": [p.zeta.real, p.zeta.imag],
                "max_error": float(err),
                "one_form_antihermiticity": float(ah),
            }
        )
        rows.append(_point_row(p, "connection_max_error", err))
        rows.append(_point_row(p, "one_form_antihermiticity", ah))

    adequacy_ok = adequacy <= CUTOFF_AGREEMENT_TOL
    passed = bool(worst < cfg.tol_connection and worst_ah < ANTIHERM_TOL and adequacy_ok)
    report = {
        "command": "verify-connection",
        "config": asdict(cfg),
        "points": entries,
        "max_error": float(worst),
        "max_one_form_antihermiticity": float(worst_ah),
        "cutoff_adequacy": {
            "compared_cutoffs": [cfg.cutoff, cfg.cutoff + 6],
            "max_difference": float(adequacy),
            "tolerance": CUTOFF_AGREEMENT_TOL,
            "passed": adequacy_ok,
        },
        "passed": passed,
    }
    rows.append(("", "", "", "", "cutoff_adequacy_max_difference", float(adequacy)))
    emit(report, rows, cfg)
    return EXIT_OK if passed else EXIT_TOLERANCE


def cmd_verify_curvature(args) -> int:
    cfg = load_config(args)
    points = sample_points(cfg, args.points)
    h = args.step
    rows = []
    entries = []
    worst = 0.0
    worst_span = 0.0
    for p in points:
        analytic = conn.curvature_analytic(p)
        numeric = conn.curvature_numeric(p, conn.connection_analytic, h)
        per_wedge = {}
        for name, a, b in zip(
            conn.WEDGE_NAMES, analytic.coefficients(), numeric.coefficients()
        ):
            err = float(np.abs(a - b).max())
            per_wedge[name] = err
            rows.append(_point_row(p, f"curvature_error_{name}", err))
        span = conn.curvature_span_residual(analytic)
        rows.append(_point_row(p, "span_residual", span))
        worst = max(worst, max(per_wedge.values()))
        worst_span = max(worst_span, span)
        entry = {
            "xi": [p.xi.real, p.xi.imag],
            "zeta": [p.zeta.real, p.zeta.imag],
            "wedge_errors": per_wedge,
            "span_residual": float(span),
        }
        if args.convergence:
            finer = conn.curvature_numeric(p, conn.connection_analytic, h / 2)
            ratios = {}
            for name, a, b, c in zip(
                conn.WEDGE_NAMES,
                analytic.coefficients(),
                numeric.coefficients(),
                finer.coefficients(),
            ):
                coarse = np.abs(a - b).max()
                fine = np.abs(a - c).max()
                ratios[name] = float(coarse / fine) if fine > 0 else float("inf")
                rows.append(_point_row(p, f"halving_ratio_{name}", ratios[name]))
            entry["halving_ratios"] = ratios
        entries.append(entry)
    passed = bool(worst < cfg.tol_curvature and worst_span < SPAN_TOL)
    report = {
        "command": "verify-curvature",
        "config": asdict(cfg),
        "step": h,
        "points": entries,
        "max_error": float(worst),
        "max_span_residual": float(worst_span),
        "passed": passed,
    }
    emit(report, rows, cfg)
    return EXIT_OK if passed else EXIT_TOLERANCE


def cmd_holonomy(args) -> int:
    cfg = load_config(args)
    try:
        loop, file_steps = load_loop(args.loop_file)
    except (OSError, json.JSONDecodeError, ValueError, KeyError, LoopClosureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    steps = file_steps if file_steps is not None else cfg.steps
    try:
        result = compute_holonomy(
            loop, steps=steps, xi_max=cfg.xi_max, zeta_max=cfg.zeta_max
        )
    except (BudgetError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    defect = result.unitarity_defect()
    flagged = result.error_estimate > ERROR_BUDGET
    report = {
        "command": "holonomy",
        "config": asdict(cfg),
        "steps": steps,
        "gamma": _matrix_to_json(result.gamma),
        "unitarity_defect": float(defect),
        "error_estimate": float(result.error_estimate),
        "flagged": bool(flagged),
        "passed": bool(not flagged and defect < cfg.tol_unitarity),
    }
    rows = [
        ("", "", "", "", "unitarity_defect", float(defect)),
        ("", "", "", "", "error_estimate", float(result.error_estimate)),
    ]
    emit(report, rows, cfg)
    return EXIT_OK if report["passed"] else EXIT_TOLERANCE


def cmd_algebra(args) -> int:
    cfg = load_config(args)
    if args.restricted:
        points = [conn.ParamPoint(x, 0.0) for x in np.linspace(0.1, 0.9 * cfg.xi_max, 8)]
        note = "restricted sampling: zeta = 0 grid probes a proper subalgebra"
    else:
        points = default_algebra_grid(
            count=12, seed=cfg.seed, xi_max=cfg.xi_max, zeta_max=cfg.zeta_max
        )
        note = None
    dim, svals = holonomy_algebra_spectrum(sample_points=points, tol=args.tol)
    svals = np.asarray(svals)
    gap = float(svals[dim - 1] / svals[dim]) if 0 < dim < len(svals) and svals[dim] > 0 else float("inf")
    passed = True if args.restricted else dim == 4
    report = {
        "command": "algebra",
        "config": asdict(cfg),
        "rank_tolerance": args.tol,
        "dimension": int(dim),
        "singular_values": [float(s) for s in svals[: min(12, len(svals))]],
        "gap_ratio": gap,
        "passed": bool(passed),
    }
    if note:
        report["note"] = note
    rows = [("", "", "", "", "algebra_dimension", float(dim)),
            ("", "", "", "", "gap_ratio", gap)]
    for k, s in enumerate(svals[:12]):
        rows.append(("", "", "", "", f"singular_value_{k}", float(s)))
    emit(report, rows, cfg)
    return EXIT_OK if passed else EXIT_TOLERANCE


_FAMILIES = {
    "rect_xi": syn.rect_xi_family,
    "rect_zeta": syn.rect_zeta_family,
    "rect_xi_at_zeta": syn.rect_xi_at_zeta_family,
    "double_rect": syn.double_rect_family,
}


def cmd_synth(args) -> int:
    cfg = load_config(args)
    try:
        with open(args.target_file) as fh:
            target = _matrix_from_json(json.load(fh)["matrix"])
    except (OSError, json.JSONDecodeError, ValueError, KeyError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    defect = np.abs(target.conj().T @ target - np.eye(4)).max()
    if defect > 1e-8:
        print(f"error: target is not unitary (defect {defect:.2e})", file=sys.stderr)
        return EXIT_INPUT
    family = _FAMILIES[args.family]()
    try:
        result = syn.synthesize(
            target,
            family,
            budget=args.budget,
            seed=cfg.seed,
            steps=cfg.steps,
            xi_max=cfg.xi_max,
            zeta_max=cfg.zeta_max,
        )
    except ReachabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REACHABILITY
    passed = result.fidelity >= FIDELITY_THRESHOLD
    report = {
        "command": "synth",
        "config": asdict(cfg),
        "family": args.family,
        "budget": args.budget,
        "theta": [float(t) for t in result.theta],
        "fidelity": float(result.fidelity),
        "evaluations": int(result.evaluations),
        "gamma": _matrix_to_json(result.gamma),
        "passed": bool(passed),
    }
    rows = [
        ("", "", "", "", "fidelity", float(result.fidelity)),
        ("", "", "", "", "evaluations", float(result.evaluations)),
    ]
    emit(report, rows, cfg)
    return EXIT_OK if passed else EXIT_TOLERANCE


def cmd_disentangle_check(args) -> int:
    cfg = load_config(args)
    try:
        cutoffs = [int(c) for c in args.cutoffs.split(",")]
    except ValueError:
        print(f"error: bad cutoff list {args.cutoffs!r}", file=sys.stderr)
        return EXIT_INPUT
    rng = np.random.default_rng(cfg.seed)
    xi_samples = [
        cfg.xi_max * np.sqrt(rng.uniform(0.05, 1.0)) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        for _ in range(args.samples)
    ]
    zeta_samples = [
        cfg.zeta_max * np.sqrt(rng.uniform(0.05, 1.0)) * np.exp(1j * rng.uniform(0, 2 * np.pi))
        for _ in range(args.samples)
    ]
    table = []
    rows = []
    for cutoff in cutoffs:
        space = FockSpace(cutoff)
        u_err = 0.0
        for xi in xi_samples:
            diff = u_disentangled(space, xi).matrix - u_op(space, xi).matrix
            u_err = max(u_err, float(np.abs(diff).max()))
        low_states = [
            basis_state(space, n1, n2).entries
            for n1 in range(min(5, cutoff + 1))
            for n2 in range(min(5, cutoff + 1))
            if n1 + n2 <= 4
        ]
        v_err = 0.0
        for zeta in zeta_samples:
            diff = v_disentangled(space, zeta).matrix - v_op(space, zeta).matrix
            for state in low_states:
                v_err = max(v_err, float(np.linalg.norm(diff @ state)))
        table.append({"cutoff": cutoff, "u_max_error": u_err, "v_low_state_error": v_err})
        rows.append(("", "", "", "", f"u_max_error_cutoff_{cutoff}", u_err))
        rows.append(("", "", "", "", f"v_low_state_error_cutoff_{cutoff}", v_err))
    final = table[-1]
    passed = final["u_max_error"] < 1e-9 and final["v_low_state_error"] < 1e-8
    report = {
        "command": "disentangle-check",
        "config": asdict(cfg),
        "samples": args.samples,
        "table": table,
        "passed": bool(passed),
    }
    emit(report, rows, cfg)
    return EXIT_OK if passed else EXIT_TOLERANCE


# ---------------------------------------------------------------------------
# Parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hologate",
        description="Verification and gate synthesis for holonomic two-mode boson loops.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON file with RunConfig fields")
        p.add_argument("--cutoff", type=int, help="Fock cutoff per mode (default 24)")
        p.add_argument("--xi-max", dest="xi_max", type=float, help="|xi| budget (default 1.0)")
        p.add_argument("--zeta-max", dest="zeta_max", type=float, help="|zeta| budget (default 0.5)")
        p.add_argument("--steps", type=int, help="integrator steps (default 512)")
        p.add_argument("--tol-connection", dest="tol_connection", type=float)
        p.add_argument("--tol-curvature", dest="tol_curvature", type=float)
        p.add_argument("--tol-unitarity", dest="tol_unitarity", type=float)
        p.add_argument("--seed", type=int)
        p.add_argument("--format", choices=["json", "csv"])
        p.add_argument("--out", help="write the report to this path instead of stdout")

    p = sub.add_parser("verify-connection", help="closed form vs exact derivative")
    add_common(p)
    p.add_argument("--points", type=int, default=20)
    p.set_defaults(func=cmd_verify_connection)

    p = sub.add_parser("verify-curvature", help="closed form vs finite differences")
    add_common(p)
    p.add_argument("--points", type=int, default=10)
    p.add_argument("--step", type=float, default=1e-4, help="finite-difference step")
    p.add_argument("--convergence", action="store_true", help="add step-halving ratios")
    p.set_defaults(func=cmd_verify_curvature)

    p = sub.add_parser("holonomy", help="holonomy of a loop-spec file")
    add_common(p)
    p.add_argument("loop_file")
    p.set_defaults(func=cmd_holonomy)

    p = sub.add_parser("algebra", help="holonomy-algebra dimension estimate")
    add_common(p)
    p.add_argument("--tol", type=float, default=1e-8, help="rank tolerance")
    p.add_argument("--restricted", action="store_true", help="sample only zeta = 0")
    p.set_defaults(func=cmd_algebra)

    p = sub.add_parser("synth", help="synthesize a target gate")
    add_common(p)
    p.add_argument("target_file")
    p.add_argument("--family", choices=sorted(_FAMILIES), default="rect_xi_at_zeta")
    p.add_argument("--budget", type=int, default=2000)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("disentangle-check", help="product form vs direct exponentials")
    add_common(p)
    p.add_argument("--cutoffs", default="12,18,24", help="comma-separated cutoff sweep")
    p.add_argument("--samples", type=int, default=12)
    p.set_defaults(func=cmd_disentangle_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ParameterDomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

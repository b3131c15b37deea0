"""Command line front end: scenario files in, CSV or JSON reports out.

Scenario files are flat ``key = value`` text with dotted keys, for example::

    schemes      = direct,satellite,swap
    r.min        = 0.1
    r.max        = 2.0
    r.steps      = 15
    sigma_b.min  = 0.1
    sigma_b.max  = 1.5
    sigma_b.steps = 15
    beta_over_w  = 1.0
    k1           = 0.5
    k2           = 0.64

Subcommands: ``sweep`` (entanglement surface as CSV), ``postselect``
(threshold trade-off curves as CSV), ``effective`` (per-scheme effective
channel report as JSON), ``validate`` (self-consistency audit as JSON) and
``rate`` (pair rate from a success probability and a source rate).

Exit codes: 0 success, 2 configuration or domain problem, 3 numerical
failure, 4 validation failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .effective import ordering_check, try_effective
from .errors import ConfigError, DomainError, NumericalError
from .fading import LinkGeometry, expand_links, loss_db, sample
from .gaussian import Squeezing, log_negativity
from .numerics import McSpec, QuadratureSpec, mc_expectation
from .postselect import (
    ClassicalPsConfig,
    QuantumPsConfig,
    classical_postselect,
    quantum_postselect,
)
from .schemes import KINDS, SchemeConfig, ensemble_cm

CSV_COLUMNS = (
    "scheme", "sigma_b", "r", "chi", "e_ln", "p_success",
    "eff_r", "eff_eta_a", "eff_eta_b", "mean_loss_up_db", "mean_loss_down_db",
)

# Absolute tolerance of the subdivision-doubling convergence gate.
CONVERGENCE_TOL = 1e-7


@dataclass(frozen=True)
class PsSpec:
    kind: str
    thresholds: tuple[float, ...]
    tap_t: float | None


@dataclass(frozen=True)
class Scenario:
    schemes: tuple[str, ...]
    r_grid: tuple[float, ...]
    sigma_b_grid: tuple[float, ...]
    beta: float
    w: float
    k1: float
    k2: float
    chi: float
    quad: QuadratureSpec
    mc: McSpec | None
    postselect: PsSpec | None
    output: str | None


_REQUIRED = object()


def _pop(data: dict, key: str, conv, default):
    if key not in data:
        if default is _REQUIRED:
            raise ConfigError(f"scenario is missing required key {key!r}")
        return default
    raw = data.pop(key)
    try:
        return conv(raw)
    except ValueError as exc:
        raise ConfigError(f"scenario key {key!r}: {exc}") from None


def _pop_float(data, key, default=_REQUIRED):
    return _pop(data, key, float, default)


def _pop_int(data, key, default=_REQUIRED):
    return _pop(data, key, int, default)


def _grid(data: dict, prefix: str, sep: str = ".") -> tuple[float, ...]:
    lo = _pop_float(data, f"{prefix}{sep}min")
    steps = _pop_int(data, f"{prefix}{sep}steps", 1)
    hi = _pop_float(data, f"{prefix}{sep}max", lo)
    if steps < 1:
        raise ConfigError(f"scenario key {prefix}{sep}steps must be >= 1, got {steps}")
    if hi < lo:
        raise ConfigError(f"scenario key {prefix}{sep}max must be >= {prefix}{sep}min")
    if steps == 1:
        return (lo,)
    if hi == lo:
        raise ConfigError(f"scenario key {prefix}{sep}max must exceed {prefix}{sep}min when steps > 1")
    return tuple(np.linspace(lo, hi, steps))


def parse_scenario(path: str | Path) -> Scenario:
    """Read and type-check a scenario file; raises ConfigError naming the bad key."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from None
    data: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in data:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        data[key] = value

    schemes = tuple(s.strip() for s in _pop(data, "schemes", str, _REQUIRED).split(","))
    for s in schemes:
        if s not in KINDS:
            raise ConfigError(f"scenario key 'schemes': unknown scheme {s!r}")
    if len(set(schemes)) != len(schemes):
        raise ConfigError("scenario key 'schemes' lists a scheme twice")

    r_grid = _grid(data, "r")
    sigma_grid = _grid(data, "sigma_b")
    beta = _pop_float(data, "beta", 1.0)
    w = _pop_float(data, "w", None)
    beta_over_w = _pop_float(data, "beta_over_w", None)
    if (w is None) == (beta_over_w is None):
        raise ConfigError("scenario must set exactly one of 'w' or 'beta_over_w'")
    if w is None:
        if beta_over_w <= 0.0:
            raise ConfigError("scenario key 'beta_over_w' must be positive")
        w = beta / beta_over_w
    k1 = _pop_float(data, "k1")
    k2 = _pop_float(data, "k2")
    chi = _pop_float(data, "chi", 0.0)
    for key, value, ok in (
        ("beta", beta, beta > 0.0),
        ("w", w, w > 0.0),
        ("k1", k1, 0.0 <= k1 <= 1.0),
        ("k2", k2, k2 >= 0.0),
        ("chi", chi, chi >= 0.0),
        ("sigma_b.min", sigma_grid[0], sigma_grid[0] >= 0.0),
        ("r.min", r_grid[0], r_grid[0] >= 0.0),
    ):
        if not ok:
            raise ConfigError(f"scenario key {key!r} is out of range: {value}")
    quad = QuadratureSpec(
        nodes_1d=_pop_int(data, "quad.nodes", 64),
        subdivisions=_pop_int(data, "quad.subdiv", 8),
    )

    mc = None
    if "mc.samples" in data:
        mc = McSpec(samples=_pop_int(data, "mc.samples"), seed=_pop_int(data, "mc.seed", 1))
    elif "mc.seed" in data:
        raise ConfigError("scenario sets 'mc.seed' without 'mc.samples'")

    ps = None
    if any(key.startswith("postselect.") for key in data):
        kind = _pop(data, "postselect.type", str, _REQUIRED)
        if kind not in ("classical", "quantum"):
            raise ConfigError(
                f"scenario key 'postselect.type' must be classical or quantum, got {kind!r}"
            )
        thresholds = _grid(data, "postselect.threshold", sep="_")
        tap_t = _pop_float(data, "postselect.tap_t", None)
        if kind == "quantum" and tap_t is None:
            raise ConfigError("quantum post-selection requires 'postselect.tap_t'")
        if kind == "classical" and tap_t is not None:
            raise ConfigError("'postselect.tap_t' only applies to quantum post-selection")
        ps = PsSpec(kind=kind, thresholds=thresholds, tap_t=tap_t)

    output = _pop(data, "output", str, None)
    if data:
        raise ConfigError(f"unknown scenario key(s): {', '.join(sorted(data))}")
    return Scenario(
        schemes=schemes, r_grid=r_grid, sigma_b_grid=sigma_grid, beta=beta, w=w,
        k1=k1, k2=k2, chi=chi, quad=quad, mc=mc, postselect=ps, output=output,
    )


def format_value(value) -> str:
    """Fixed CSV number format: 12 significant digits, scientific below 1e-4."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    v = float(value)
    if math.isnan(v):
        return "nan"
    if v != 0.0 and abs(v) < 1e-4:
        return f"{v:.11e}"
    return f"{v:.12g}"


def write_csv(rows: list[dict], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in rows:
        writer.writerow([format_value(row[col]) for col in CSV_COLUMNS])


def _effective_cells(cm) -> dict:
    eff = try_effective(cm)
    return {
        "eff_r": eff.r_e if eff is not None else None,
        "eff_eta_a": eff.eta_a if eff is not None else None,
        "eff_eta_b": eff.eta_b if eff is not None else None,
    }


def _sweep_point(task: tuple) -> dict:
    kind, sigma_b, r, k1, k2, beta, w, chi, nodes, subdiv = task
    quad = QuadratureSpec(nodes_1d=nodes, subdivisions=subdiv)
    cfg = SchemeConfig(
        kind=kind, squeezing=Squeezing(r), geometry=LinkGeometry(sigma_b=sigma_b, k1=k1, k2=k2),
        beta=beta, w=w, chi=chi, quad=quad,
    )
    cm = ensemble_cm(cfg)
    up, down = cfg.links()
    row = {
        "scheme": kind, "sigma_b": sigma_b, "r": r, "chi": chi,
        "e_ln": log_negativity(cm), "p_success": 1.0,
        "mean_loss_up_db": loss_db(up, quad), "mean_loss_down_db": loss_db(down, quad),
    }
    row.update(_effective_cells(cm))
    return row


def _postselect_point(task: tuple) -> dict:
    sigma_b, r, threshold, k1, k2, beta, w, chi, nodes, subdiv, ps_kind, tap_t = task
    quad = QuadratureSpec(nodes_1d=nodes, subdivisions=subdiv)
    links = expand_links(LinkGeometry(sigma_b=sigma_b, k1=k1, k2=k2), beta, w)
    ch_up, ch_down = links.a_s, links.s_b
    sq = Squeezing(r)
    if ps_kind == "classical":
        res = classical_postselect(sq, ch_up, ch_down, ClassicalPsConfig(threshold), quad, chi)
    else:
        res = quantum_postselect(
            sq, ch_up, ch_down, QuantumPsConfig(tap_t=tap_t, q_th=threshold), quad, chi
        )
    row = {
        "scheme": "direct", "sigma_b": sigma_b, "r": r, "chi": chi,
        "e_ln": res.e_ln, "p_success": res.p_success,
        "mean_loss_up_db": loss_db(ch_up, quad), "mean_loss_down_db": loss_db(ch_down, quad),
    }
    row.update(_effective_cells(res.cm))
    return row


def _map_tasks(fn, tasks: list[tuple], workers: int) -> list[dict]:
    if workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=1))


def run_sweep(scenario: Scenario, workers: int = 1) -> list[dict]:
    """One CSV row per (scheme, sigma_b, r[, threshold]), in deterministic sorted order.

    Scenarios with a postselect.* block sweep the threshold axis as well; the
    threshold of each row is implicit in its success probability.
    """
    if scenario.postselect is not None:
        return run_postselect(scenario, workers=workers)
    tasks = [
        (kind, sigma_b, r, scenario.k1, scenario.k2, scenario.beta, scenario.w,
         scenario.chi, scenario.quad.nodes_1d, scenario.quad.subdivisions)
        for kind in sorted(scenario.schemes)
        for sigma_b in scenario.sigma_b_grid
        for r in scenario.r_grid
    ]
    return _map_tasks(_sweep_point, tasks, workers)


def run_postselect(scenario: Scenario, workers: int = 1) -> list[dict]:
    """One CSV row per (sigma_b, r, threshold); thresholds ascend within a point."""
    ps = scenario.postselect
    if ps is None:
        raise ConfigError("scenario has no postselect.* section")
    if scenario.schemes != ("direct",):
        raise ConfigError("post-selection applies to the direct scheme only; set schemes = direct")
    tasks = [
        (sigma_b, r, threshold, scenario.k1, scenario.k2, scenario.beta, scenario.w,
         scenario.chi, scenario.quad.nodes_1d, scenario.quad.subdivisions, ps.kind, ps.tap_t)
        for sigma_b in scenario.sigma_b_grid
        for r in scenario.r_grid
        for threshold in ps.thresholds
    ]
    return _map_tasks(_postselect_point, tasks, workers)


def rate_estimate(p_success: float, tx_rate_hz: float) -> float:
    """Delivered pair rate when a source emitting at tx_rate_hz is gated by p_success."""
    if not (0.0 <= p_success <= 1.0) or not math.isfinite(p_success):
        raise DomainError(f"p_success must lie in [0, 1], got {p_success}")
    if not (tx_rate_hz > 0.0) or not math.isfinite(tx_rate_hz):
        raise DomainError(f"tx_rate_hz must be positive and finite, got {tx_rate_hz}")
    return p_success * tx_rate_hz


def _jsonable(obj):
    if isinstance(obj, dict):
        return {key: _jsonable(val) for key, val in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(val) for val in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return None if math.isnan(v) else v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def run_effective(scenario: Scenario) -> dict:
    """Effective-channel report: per-point scheme summaries plus ordering flags."""
    points = []
    for sigma_b in scenario.sigma_b_grid:
        for r in scenario.r_grid:
            report = ordering_check(
                LinkGeometry(sigma_b=sigma_b, k1=scenario.k1, k2=scenario.k2),
                Squeezing(r), scenario.beta, scenario.w, scenario.quad,
            )
            points.append({"sigma_b": sigma_b, "r": r, **report})
    return _jsonable({
        "beta": scenario.beta, "w": scenario.w,
        "k1": scenario.k1, "k2": scenario.k2, "chi": scenario.chi,
        "points": points,
    })


def _grid_probes(grid: tuple[float, ...]) -> list[float]:
    probes = {grid[0], grid[-1], grid[len(grid) // 2]}
    return sorted(probes)


def run_validate(scenario: Scenario) -> dict:
    """Self-consistency audit: quadrature convergence, physicality, MC agreement."""
    checks: list[dict] = []

    def record(name: str, passed: bool, detail: str) -> None:
        checks.append({"name": name, "passed": bool(passed), "detail": detail})

    fine = QuadratureSpec(
        nodes_1d=scenario.quad.nodes_1d, subdivisions=2 * scenario.quad.subdivisions
    )
    for kind in sorted(scenario.schemes):
        for sigma_b in _grid_probes(scenario.sigma_b_grid):
            for r in _grid_probes(scenario.r_grid):
                name = f"convergence/{kind}/sigma_b={sigma_b:g}/r={r:g}"
                geom = LinkGeometry(sigma_b=sigma_b, k1=scenario.k1, k2=scenario.k2)
                try:
                    base = dict(kind=kind, squeezing=Squeezing(r), geometry=geom,
                                beta=scenario.beta, w=scenario.w, chi=scenario.chi)
                    e_coarse = log_negativity(ensemble_cm(SchemeConfig(quad=scenario.quad, **base)))
                    e_fine = log_negativity(ensemble_cm(SchemeConfig(quad=fine, **base)))
                except (DomainError, NumericalError) as exc:
                    record(name, False, f"evaluation failed: {exc}")
                    continue
                diff = abs(e_coarse - e_fine)
                record(name, diff < CONVERGENCE_TOL,
                       f"|E_LN({scenario.quad.subdivisions} subdiv) - E_LN({fine.subdivisions})| = {diff:.3e}")

    if scenario.mc is not None:
        geom = LinkGeometry(sigma_b=scenario.sigma_b_grid[-1], k1=scenario.k1, k2=scenario.k2)
        links = expand_links(geom, scenario.beta, scenario.w)
        for label, ch in (("uplink", links.a_s), ("downlink", links.s_b)):
            if ch.point_mass:
                continue
            from .fading import mean_transmittance

            quad_mean = mean_transmittance(ch, scenario.quad)
            mc_mean, se = mc_expectation(
                lambda rng, n, _ch=ch: sample(_ch, rng, n), lambda e: e, scenario.mc
            )
            err = abs(quad_mean - mc_mean)
            record(f"mc/{label}-mean-transmittance", err <= 4.0 * se + 1e-12,
                   f"quadrature {quad_mean:.9g} vs MC {mc_mean:.9g} (stderr {se:.2e})")
        v = Squeezing(scenario.r_grid[-1]).v
        cfg = SchemeConfig(kind="direct", squeezing=Squeezing(scenario.r_grid[-1]),
                           geometry=geom, beta=scenario.beta, w=scenario.w,
                           chi=scenario.chi, quad=scenario.quad)
        b_quad = float(ensemble_cm(cfg).m[2, 2])
        b_mc, se = mc_expectation(
            lambda rng, n: (sample(links.a_s, rng, n), sample(links.s_b, rng, n)),
            lambda e, ep: 1.0 + e * ep * (v - 1.0) + scenario.chi,
            scenario.mc,
        )
        record("mc/direct-b-entry", abs(b_quad - b_mc) <= 4.0 * se + 1e-12,
               f"quadrature {b_quad:.9g} vs MC {b_mc:.9g} (stderr {se:.2e})")

    if scenario.postselect is not None:
        ps = scenario.postselect
        threshold = ps.thresholds[len(ps.thresholds) // 2]
        name = f"postselect/{ps.kind}/threshold={threshold:g}"
        try:
            task = (scenario.sigma_b_grid[-1], scenario.r_grid[-1], threshold,
                    scenario.k1, scenario.k2, scenario.beta, scenario.w, scenario.chi,
                    scenario.quad.nodes_1d, scenario.quad.subdivisions, ps.kind, ps.tap_t)
            row = _postselect_point(task)
        except (DomainError, NumericalError) as exc:
            record(name, False, f"evaluation failed: {exc}")
        else:
            ok = 0.0 < row["p_success"] <= 1.0 + 1e-9 and row["e_ln"] >= 0.0
            record(name, ok,
                   f"P_s = {row['p_success']:.6g}, E_LN = {row['e_ln']:.6g}")

    return {"passed": all(c["passed"] for c in checks), "checks": checks}


def _apply_overrides(scenario: Scenario, args) -> Scenario:
    quad = scenario.quad
    if args.quad_nodes is not None or args.quad_subdiv is not None:
        quad = QuadratureSpec(
            nodes_1d=args.quad_nodes if args.quad_nodes is not None else quad.nodes_1d,
            subdivisions=args.quad_subdiv if args.quad_subdiv is not None else quad.subdivisions,
        )
    mc = scenario.mc
    if args.seed is not None and mc is not None:
        mc = McSpec(samples=mc.samples, seed=args.seed)
    return dataclasses.replace(scenario, quad=quad, mc=mc)


def _open_out(args, scenario: Scenario):
    target = args.out or scenario.output
    if target is None or target == "-":
        return sys.stdout, False
    return open(target, "w", newline=""), True


def _emit(args, scenario: Scenario, text: str) -> None:
    stream, close = _open_out(args, scenario)
    try:
        stream.write(text)
    finally:
        if close:
            stream.close()


def _rows_to_csv(rows: list[dict]) -> str:
    import io

    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def _cmd_sweep(args) -> int:
    scenario = _apply_overrides(parse_scenario(args.scenario), args)
    rows = run_sweep(scenario, workers=args.workers)
    _emit(args, scenario, _rows_to_csv(rows))
    return 0


def _cmd_postselect(args) -> int:
    scenario = _apply_overrides(parse_scenario(args.scenario), args)
    rows = run_postselect(scenario, workers=args.workers)
    _emit(args, scenario, _rows_to_csv(rows))
    return 0


def _cmd_effective(args) -> int:
    scenario = _apply_overrides(parse_scenario(args.scenario), args)
    report = run_effective(scenario)
    _emit(args, scenario, json.dumps(report, indent=2) + "\n")
    return 0


def _cmd_validate(args) -> int:
    scenario = _apply_overrides(parse_scenario(args.scenario), args)
    report = run_validate(scenario)
    _emit(args, scenario, json.dumps(report, indent=2) + "\n")
    return 0 if report["passed"] else 4


def _cmd_rate(args) -> int:
    rate = rate_estimate(args.p, args.tx_hz)
    sys.stdout.write(format_value(rate) + "\n")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvsat",
        description="Entanglement delivery over satellite beam-wander fading links.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def scenario_command(name: str, help_text: str):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("scenario", help="path to a scenario file")
        cmd.add_argument("--out", default=None, help="output file (default: scenario output or stdout)")
        cmd.add_argument("--workers", type=int, default=1, help="parallel worker processes")
        cmd.add_argument("--seed", type=int, default=None, help="override the Monte Carlo seed")
        cmd.add_argument("--quad-nodes", type=int, default=None, help="override quadrature nodes per panel")
        cmd.add_argument("--quad-subdiv", type=int, default=None, help="override quadrature subdivisions")
        return cmd

    scenario_command("sweep", "entanglement of every scheme over the scenario grid (CSV)") \
        .set_defaults(func=_cmd_sweep)
    scenario_command("postselect", "post-selected entanglement vs success probability (CSV)") \
        .set_defaults(func=_cmd_postselect)
    scenario_command("effective", "effective-channel summary and scheme ordering (JSON)") \
        .set_defaults(func=_cmd_effective)
    scenario_command("validate", "numerical self-consistency audit (JSON)") \
        .set_defaults(func=_cmd_validate)

    rate = sub.add_parser("rate", help="delivered pair rate from success probability")
    rate.add_argument("--p", type=float, required=True, help="post-selection success probability")
    rate.add_argument("--tx-hz", type=float, required=True, help="source emission rate in Hz")
    rate.set_defaults(func=_cmd_rate)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: config ingestion, sweeps, persistence, verification.

Subcommands
-----------
couplings   derived interaction rates, thermal occupation, regime warnings
curve       fidelity-vs-time sweep -> curve.csv + summary.json
verify      self-verification gates (oracles and invariants) -> verify.txt
readout     readout times, weights, quality ratio, decoherence windows

Exit codes: 0 success, 1 config error, 2 verification-gate failure, 3 I/O
error.  All data files are deterministic: identical configs produce
byte-identical outputs (no timestamps anywhere).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from . import dynamics, protocol, readout
from .errors import ConfigError, DomainError, IntegrationError
from .gaussian_core import physicality_defect, symplectic_defect
from .optomech import (
    Couplings,
    PhysicalParams,
    compute_couplings,
    oscillation_consistency,
    sideband_frequencies,
    thermal_occupation,
    validate_regime,
)

_TWO_PI = 2.0 * math.pi

#: Default self-verification tolerances, overridable via the config's
#: "tolerances" table.  "scaled" defects are relative to max(1, |value|).
DEFAULT_TOLERANCES = {
    "couplings_consistency_rel": 1e-12,
    "ode_vs_analytic_scaled": 1e-8,
    "propagator_metric": 1e-10,
    "propagator_group": 1e-10,
    "conditional_physicality": 1e-10,
    "fidelity_identity": 1e-12,
    "moment_route_scaled": 1e-10,
    "teleport_noise_scaled": 1e-12,
}


@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration."""

    params: PhysicalParams
    nbar_values: tuple[float, ...]
    nbar_from_temperatures: bool
    grid_points: int
    periods: float
    readout_count: int
    tolerances: dict
    couplings_override: Couplings | None


def _get(raw: dict, field: str, kind=float, required: bool = True, default=None):
    if field not in raw:
        if required:
            raise ConfigError(f"missing required config field: {field!r}")
        return default
    value = raw[field]
    try:
        return kind(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"config field {field!r} has invalid value {value!r}") from exc


def load_config(path) -> RunConfig:
    """Parse and validate a JSON run configuration."""
    try:
        raw = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")

    angular = bool(raw.get("angular_frequencies", True))
    if angular:
        laser = _get(raw, "laser_freq_rad_per_s")
        mirror = _get(raw, "mirror_freq_rad_per_s")
    else:
        laser = _TWO_PI * _get(raw, "laser_freq_hz")
        mirror = _TWO_PI * _get(raw, "mirror_freq_hz")
    try:
        params = PhysicalParams(
            power=_get(raw, "power_watts"),
            laser_freq=laser,
            mirror_freq=mirror,
            det_bandwidth=_get(raw, "det_bandwidth_hz"),
            mode_bandwidth=_get(raw, "mode_bandwidth_hz"),
            mass=_get(raw, "mass_kg"),
            incidence_angle=_get(raw, "incidence_angle_rad", required=False, default=0.0),
            temperature=_get(raw, "temperature_k", required=False, default=0.0),
            damping=_get(raw, "damping_hz", required=False, default=0.0),
        )
    except DomainError as exc:
        raise ConfigError(f"invalid physical parameters: {exc}") from exc

    from_temps = False
    if "nbar_values" in raw:
        values = raw["nbar_values"]
    elif "temperatures_k" in raw:
        values = [thermal_occupation(float(t), params.mirror_freq) for t in raw["temperatures_k"]]
        from_temps = True
    else:
        raise ConfigError("config must provide nbar_values or temperatures_k")
    if not isinstance(values, list) or not values:
        raise ConfigError("nbar list must be a non-empty JSON array")
    nbar_values = tuple(float(v) for v in values)
    if any(v < 0 for v in nbar_values):
        raise ConfigError("nbar values must be >= 0")

    grid_points = _get(raw, "grid_points", kind=int, required=False, default=2000)
    if grid_points < 2:
        raise ConfigError(f"grid_points must be >= 2, got {grid_points}")
    periods = _get(raw, "periods", required=False, default=1.0)
    if not periods > 0:
        raise ConfigError(f"periods must be > 0, got {periods}")
    readout_count = _get(raw, "readout_times_count", kind=int, required=False, default=3)

    tolerances = dict(DEFAULT_TOLERANCES)
    overrides = raw.get("tolerances", {})
    if not isinstance(overrides, dict):
        raise ConfigError("tolerances must be a JSON object")
    unknown = set(overrides) - set(tolerances)
    if unknown:
        raise ConfigError(f"unknown tolerance keys: {sorted(unknown)}")
    tolerances.update({k: float(v) for k, v in overrides.items()})

    override = None
    if "couplings_override" in raw:
        c = raw["couplings_override"]
        if not isinstance(c, dict):
            raise ConfigError("couplings_override must be a JSON object")
        try:
            override = Couplings(
                parametric=_get(c, "parametric_rad_per_s"),
                beam_splitter=_get(c, "beam_splitter_rad_per_s"),
                oscillation=_get(c, "oscillation_rad_per_s"),
            )
        except DomainError as exc:
            # keep the raw numbers so cmd_verify can report the inconsistency
            override = _UncheckedCouplings(
                _get(c, "parametric_rad_per_s"),
                _get(c, "beam_splitter_rad_per_s"),
                _get(c, "oscillation_rad_per_s"),
                reason=str(exc),
            )

    return RunConfig(
        params=params,
        nbar_values=nbar_values,
        nbar_from_temperatures=from_temps,
        grid_points=grid_points,
        periods=periods,
        readout_count=readout_count,
        tolerances=tolerances,
        couplings_override=override,
    )


@dataclass(frozen=True)
class _UncheckedCouplings:
    """Raw override rates that failed Couplings validation (verify only)."""

    parametric: float
    beam_splitter: float
    oscillation: float
    reason: str


def bundled_config_path(name: str = "fig2.json") -> Path:
    """Path of a configuration bundled with the package."""
    return Path(resources.files("mirror_teleport") / "data" / name)


def _dense_grid_points(couplings: Couplings, requested: int) -> int:
    """Grid density that resolves the ~1/parametric-wide fidelity peak."""
    ratio = couplings.parametric / couplings.oscillation
    return max(requested, min(2_000_000, 64 * math.ceil(max(1.0, ratio))))


def _summary(config: RunConfig, couplings: Couplings) -> dict:
    t_period = dynamics.period(couplings)
    dense = _dense_grid_points(couplings, config.grid_points)
    per_nbar = {}
    for nbar in config.nbar_values:
        t_star, f_max = protocol.optimal_time(couplings, nbar, dense)
        _, f_nh = protocol.optimal_time_no_heterodyne(couplings, nbar, dense)
        per_nbar[f"{nbar:.12g}"] = {
            "F_max": f_max,
            "t_star_s": t_star,
            "scaled_t_star": couplings.oscillation * t_star,
            "neff_min": 1.0 / f_max - 1.0,
            "F_max_no_heterodyne": f_nh,
        }
    return {
        "couplings": {
            "parametric_rad_per_s": couplings.parametric,
            "beam_splitter_rad_per_s": couplings.beam_splitter,
            "oscillation_rad_per_s": couplings.oscillation,
        },
        "period_s": t_period,
        "per_nbar": per_nbar,
    }


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def cmd_couplings(config: RunConfig, out_dir: Path | None, stream=None) -> int:
    couplings = compute_couplings(config.params)
    stokes, anti = sideband_frequencies(config.params)
    nbar = thermal_occupation(config.params.temperature, config.params.mirror_freq)
    warnings = validate_regime(config.params)
    report = {
        "parametric_rad_per_s": couplings.parametric,
        "beam_splitter_rad_per_s": couplings.beam_splitter,
        "oscillation_rad_per_s": couplings.oscillation,
        "period_s": dynamics.period(couplings),
        "stokes_freq_rad_per_s": stokes,
        "anti_stokes_freq_rad_per_s": anti,
        "thermal_occupation": nbar,
        "regime_warnings": warnings,
    }
    for key, value in report.items():
        if key == "regime_warnings":
            continue
        print(f"{key} = {value:.12g}", file=stream)
    if warnings:
        for w in warnings:
            print(f"warning: {w}", file=stream)
    else:
        print("regime: all assumptions hold", file=stream)
    if out_dir is not None:
        _write_json(out_dir / "couplings.json", report)
    return 0


def cmd_curve(
    config: RunConfig,
    out_dir: Path,
    no_heterodyne: bool = False,
    stream=None,
) -> int:
    couplings = compute_couplings(config.params)
    t_period = dynamics.period(couplings)
    times = np.linspace(0.0, config.periods * t_period, config.grid_points + 1)
    theta_t = couplings.oscillation * times

    columns = []
    for nbar in config.nbar_values:
        g = dynamics.coeffs_analytic(couplings, nbar, times)
        fv = (
            protocol.fidelity_no_heterodyne(g)
            if no_heterodyne
            else protocol.fidelity_coherent(g)
        )
        columns.append(np.asarray(fv))

    header = "theta_t," + ",".join(f"F_nbar_{v:.12g}" for v in config.nbar_values)
    lines = [header]
    for i in range(len(times)):
        row = [f"{theta_t[i]:.12g}"] + [f"{col[i]:.12g}" for col in columns]
        lines.append(",".join(row))
    (out_dir / "curve.csv").write_text("\n".join(lines) + "\n")

    summary = _summary(config, couplings)
    summary["curve"] = {
        "variant": "no_heterodyne" if no_heterodyne else "heterodyne",
        "grid_points": config.grid_points,
        "periods": config.periods,
        "nbar_from_temperatures": config.nbar_from_temperatures,
    }
    _write_json(out_dir / "summary.json", summary)
    print(f"wrote {out_dir / 'curve.csv'} and {out_dir / 'summary.json'}", file=stream)
    return 0


def _run_gates(config: RunConfig):
    """Yield (gate_name, measured_defect, tolerance, passed)."""
    tol = config.tolerances
    couplings = compute_couplings(config.params)
    rng = np.random.default_rng(20260826)
    t_period = dynamics.period(couplings)
    nbar_values = config.nbar_values

    # 1. couplings internal consistency (honors a corrupted override)
    c_check = config.couplings_override or couplings
    rel, floor = oscillation_consistency(
        c_check.parametric, c_check.beam_splitter, c_check.oscillation
    )
    gate_tol = tol["couplings_consistency_rel"] + floor
    yield ("couplings-consistency", rel, gate_tol, rel <= gate_tol)

    # 2. RK4 oracle vs closed form over the certifiable window
    t_max = min(t_period, 30.0 / couplings.parametric)
    ts = np.linspace(0.0, t_max, 201)[1:]
    dt = 2e-3 / couplings.parametric
    worst = 0.0
    ok = True
    for nbar in nbar_values[:2]:
        try:
            ode = dynamics.coeffs_ode(couplings, nbar, ts, dt, doubling_tol=1e-9)
        except IntegrationError:
            ok = False
            worst = math.inf
            break
        ana = dynamics.coeffs_analytic(couplings, nbar, ts)
        for field in (
            "stokes_n", "mirror_n", "stokes_mirror",
            "mirror_anti", "anti_n", "stokes_anti",
        ):
            a = np.asarray(getattr(ana, field))
            o = np.asarray(getattr(ode, field))
            worst = max(worst, float(np.max(np.abs(a - o) / np.maximum(1.0, np.abs(a)))))
    ok = ok and worst <= tol["ode_vs_analytic_scaled"]
    yield ("ode-vs-analytic", worst, tol["ode_vs_analytic_scaled"], ok)

    # 3. propagator structure
    times = rng.uniform(0.0, t_period, size=100)
    metric = max(symplectic_defect(dynamics.propagator(couplings, t)) for t in times)
    yield (
        "propagator-metric",
        metric,
        tol["propagator_metric"],
        metric <= tol["propagator_metric"],
    )
    group = 0.0
    for t1, t2 in zip(times[:50], times[50:]):
        m1 = dynamics.propagator(couplings, t1).matrix
        m2 = dynamics.propagator(couplings, t2).matrix
        m12 = dynamics.propagator(couplings, t1 + t2).matrix
        scale = max(1.0, float(np.abs(m12).max())) ** 2
        group = max(group, float(np.abs(m12 - m1 @ m2).max()) / scale)
    yield (
        "propagator-group",
        group,
        tol["propagator_group"],
        group <= tol["propagator_group"],
    )

    # 4. conditioned-state physicality
    grid = np.linspace(0.0, t_period, 101)
    worst_phys = 0.0
    for nbar in nbar_values:
        for t in grid:
            g = dynamics.coeffs_analytic(couplings, nbar, float(t))
            worst_phys = max(
                worst_phys, physicality_defect(protocol.conditional_correlation(g))
            )
    yield (
        "conditional-physicality",
        worst_phys,
        tol["conditional_physicality"],
        worst_phys <= tol["conditional_physicality"],
    )

    # 5. fidelity identity F = 1/(1 + n_eff)
    worst_fid = 0.0
    for nbar in nbar_values:
        g = dynamics.coeffs_analytic(couplings, nbar, grid)
        f = np.asarray(protocol.fidelity_coherent(g))
        n_eff = np.asarray(protocol.effective_occupation(g))
        worst_fid = max(worst_fid, float(np.max(np.abs(f * (1.0 + n_eff) - 1.0))))
    yield (
        "fidelity-identity",
        worst_fid,
        tol["fidelity_identity"],
        worst_fid <= tol["fidelity_identity"],
    )

    # 6. moment route vs closed form
    worst_mom = 0.0
    for nbar in nbar_values[:2]:
        for t in grid:
            ana = dynamics.coeffs_analytic(couplings, nbar, float(t))
            mom = dynamics.coeffs_from_propagator(
                dynamics.propagator(couplings, float(t)), nbar
            )
            for field in (
                "stokes_n", "mirror_n", "stokes_mirror",
                "mirror_anti", "anti_n", "stokes_anti",
            ):
                a = getattr(ana, field)
                m = getattr(mom, field)
                worst_mom = max(worst_mom, abs(a - m) / max(1.0, abs(a)))
    yield (
        "moment-route",
        worst_mom,
        tol["moment_route_scaled"],
        worst_mom <= tol["moment_route_scaled"],
    )

    # 7. teleportation added noise equals n_eff
    worst_tn = 0.0
    gin = protocol.CovMatrix2.vacuum()
    for nbar in nbar_values:
        for t in grid[:: 10]:
            g = dynamics.coeffs_analytic(couplings, nbar, float(t))
            chan = protocol.conditional_correlation(g)
            gout = protocol.teleport_covariance(chan, gin)
            n_eff = protocol.effective_occupation(g)
            added = gout.matrix[0, 0] - gin.matrix[0, 0]
            worst_tn = max(worst_tn, abs(added - n_eff) / max(1.0, n_eff))
            added_p = gout.matrix[1, 1] - gin.matrix[1, 1]
            worst_tn = max(worst_tn, abs(added_p - n_eff) / max(1.0, n_eff))
    yield (
        "teleport-noise",
        worst_tn,
        tol["teleport_noise_scaled"],
        worst_tn <= tol["teleport_noise_scaled"],
    )


def cmd_verify(config: RunConfig, out_dir: Path | None, stream=None) -> int:
    lines = []
    all_ok = True
    for name, defect, tolerance, ok in _run_gates(config):
        all_ok = all_ok and ok
        status = "PASS" if ok else "FAIL"
        lines.append(f"{status} {name}: defect {defect:.3e} (tolerance {tolerance:.1e})")
    lines.append("verification " + ("PASSED" if all_ok else "FAILED"))
    text = "\n".join(lines) + "\n"
    print(text, end="", file=stream)
    if out_dir is not None:
        (out_dir / "verify.txt").write_text(text)
    return 0 if all_ok else 2


def cmd_readout(config: RunConfig, stream=None) -> int:
    couplings = compute_couplings(config.params)
    quality = readout.readout_quality(couplings)
    verdict = "PASS" if quality >= readout.QUALITY_THRESHOLD else "FAIL"
    print(f"readout quality ratio = {quality:.6g} "
          f"({verdict}: threshold {readout.QUALITY_THRESHOLD:g}x)", file=stream)
    for t in readout.readout_times(couplings, config.readout_count):
        w = readout.readout_weights(couplings, t)
        print(
            f"readout time {t:.12g} s: mirror weight {w.mirror_weight:.6g}, "
            f"stokes weight {w.stokes_weight:.6g}, "
            f"anti-stokes weight {w.anti_weight:.6g}",
            file=stream,
        )
    if config.params.damping > 0:
        for nbar in config.nbar_values:
            window = readout.decoherence_window(config.params.damping, nbar)
            text = "unconstrained" if math.isinf(window) else f"{window:.6g} s"
            print(f"nbar {nbar:.12g}: feed-forward window {text}", file=stream)
    else:
        print("damping is 0: feed-forward windows unconstrained", file=stream)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mirror-teleport",
        description="Radiation-pressure teleportation onto a vibrating mirror: "
        "couplings, fidelity curves, self-verification and readout analysis.",
    )
    parser.add_argument(
        "--config",
        default=None,
        help="path to a JSON run config (default: bundled fig2.json)",
    )
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--grid", type=int, default=None, help="override grid_points")
    parser.add_argument(
        "--periods", type=float, default=None, help="override sweep length in periods"
    )
    parser.add_argument(
        "--no-heterodyne",
        action="store_true",
        help="curve: use the variant without the anti-Stokes heterodyne",
    )
    parser.add_argument(
        "command", choices=["couplings", "curve", "verify", "readout"]
    )
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config_path = args.config or bundled_config_path()
        config = load_config(config_path)
        if args.grid is not None or args.periods is not None:
            config = RunConfig(
                params=config.params,
                nbar_values=config.nbar_values,
                nbar_from_temperatures=config.nbar_from_temperatures,
                grid_points=args.grid if args.grid is not None else config.grid_points,
                periods=args.periods if args.periods is not None else config.periods,
                readout_count=config.readout_count,
                tolerances=config.tolerances,
                couplings_override=config.couplings_override,
            )
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    out_dir = None
    if args.out is not None:
        out_dir = Path(args.out)
        try:
            out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            print(f"i/o error: cannot create {out_dir}: {exc}", file=sys.stderr)
            return 3

    try:
        if args.command == "couplings":
            return cmd_couplings(config, out_dir)
        if args.command == "curve":
            if out_dir is None:
                print("i/o error: curve requires --out", file=sys.stderr)
                return 3
            return cmd_curve(config, out_dir, no_heterodyne=args.no_heterodyne)
        if args.command == "verify":
            return cmd_verify(config, out_dir)
        return cmd_readout(config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())

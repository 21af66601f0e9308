"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 runtime/numerical error.
All file outputs are written atomically (temp file + rename) and carry a
provenance header with the code version and the full normalized config, so
rerunning an identical config produces byte-identical files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

# Thread budget for the BLAS layer; read before the numerics import chain
# wherever possible and recorded in every output's provenance either way.
LEVKIT_THREADS = os.environ.get("LEVKIT_THREADS", "1")
for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_var, LEVKIT_THREADS)

import numpy as np

from . import __version__
from .quantities import DomainError, DimensionError, Quantity, Dimension
from .sensor import acceleration_asd_ng
from .dynamics import (
    IntegrationError,
    ThresholdEstimateError,
    estimate_psd,
    matched_filter_outputs,
    matched_filter_threshold,
    impulse_response_template,
    simulate,
)
from .newforces import GeometryError, QuadratureError
from .limits import (
    axion_gw_line,
    coulomb_projection,
    dm_projection,
    isl_projection,
    log_grid,
    millicharge_sensitivity,
    neutrality_sensitivity,
)
from .config import ConfigError, load_config, normalize_config

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

_CONFIG_ERRORS = (ConfigError, DomainError, DimensionError, GeometryError)
_RUNTIME_ERRORS = (IntegrationError, ThresholdEstimateError, QuadratureError)


def _atomic_write_text(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _provenance_header(command: str, cfg_doc: dict) -> str:
    echo = json.dumps(normalize_config(cfg_doc), sort_keys=True)
    return (
        f"# levkit_version = {__version__}\n"
        f"# command = {command}\n"
        f"# levkit_threads = {LEVKIT_THREADS}\n"
        f"# config = {echo}\n"
    )


def _out_dir(cfg, override=None) -> Path:
    if override is not None:
        return Path(override)
    if cfg.output_section is not None:
        return Path(cfg.output_section["directory"])
    return Path(".")


def _frequency_grid(cfg) -> np.ndarray:
    sec = cfg.output_section or {}
    f_min = sec.get("frequency_min", 1.0)
    f_max = sec.get("frequency_max", 1e4)
    points = sec.get("frequency_points", 200)
    if f_min <= 0.0 or f_max <= f_min or points < 2:
        raise ConfigError("output: need 0 < frequency_min < frequency_max and >= 2 points")
    return np.logspace(np.log10(f_min), np.log10(f_max), points)


def cmd_noise_budget(args) -> int:
    cfg = load_config(args.config)
    cfg.require("sphere", "trap", "noise")
    freqs = _frequency_grid(cfg)
    labels = [label for label, _ in cfg.noise.contributions]

    lines = [_provenance_header("noise-budget", cfg.raw)]
    cols = (["frequency_hz"] + [f"{lb}_force_asd_n_rthz" for lb in labels]
            + ["total_force_asd_n_rthz", "total_acceleration_ng_rthz"])
    lines.append("# columns = " + ",".join(cols) + "\n")
    for f in freqs:
        per = cfg.noise.contribution_asds(float(f))
        total = cfg.noise.total_asd(float(f))
        accel_ng = acceleration_asd_ng(
            Quantity(total, Dimension.FORCE_ASD), cfg.sphere)
        row = [repr(float(f))] + [repr(per[lb]) for lb in labels]
        row += [repr(total), repr(accel_ng)]
        lines.append(",".join(row) + "\n")

    out = _out_dir(cfg, args.outdir) / "noise_budget.csv"
    _atomic_write_text(out, "".join(lines))

    f0 = cfg.trap.resonant_frequency
    total0 = cfg.noise.total_asd(f0)
    accel0 = acceleration_asd_ng(Quantity(total0, Dimension.FORCE_ASD), cfg.sphere)
    print(f"wrote {out}")
    print(f"at resonance ({f0!r} Hz): force ASD {total0!r} N/Hz^0.5, "
          f"acceleration ASD {accel0!r} ng/Hz^0.5")
    return EXIT_OK


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    cfg.require("sphere", "trap", "simulation")
    series = simulate(cfg.sphere, cfg.trap, cfg.simulation, injected=cfg.impulses)
    out_dir = _out_dir(cfg, args.outdir)

    header = _provenance_header("simulate", cfg.raw)
    traj_lines = [header, "# columns = time_s,displacement_m\n"]
    for t, x in zip(series.times, series.samples):
        traj_lines.append(f"{float(t)!r},{float(x)!r}\n")
    traj_path = out_dir / "trajectory.csv"
    _atomic_write_text(traj_path, "".join(traj_lines))
    print(f"wrote {traj_path}")

    mass = cfg.sphere.mass
    omega0 = cfg.trap.omega0
    # Drop the first 5 relaxation times before measuring the variance.
    gamma_tot = cfg.trap.damping_rate + cfg.simulation.feedback_gain
    skip = min(series.samples.size // 2,
               int(5.0 / (gamma_tot * series.sample_interval)))
    var = float(np.var(series.samples[skip:]))
    from .quantities import K_B
    t_eff = mass * omega0**2 * var / K_B
    print(f"measured displacement variance {var!r} m^2 "
          f"(equipartition temperature {t_eff!r} K)")

    if cfg.psd_segment_length is not None:
        psd = estimate_psd(series, cfg.psd_segment_length)
        psd_lines = [header, "# columns = frequency_hz,displacement_psd_m2_per_hz\n"]
        for f, s in zip(psd.frequency, psd.psd):
            psd_lines.append(f"{float(f)!r},{float(s)!r}\n")
        psd_path = out_dir / "psd.csv"
        _atomic_write_text(psd_path, "".join(psd_lines))
        print(f"wrote {psd_path} ({psd.n_segments} segments)")

    if cfg.impulses and cfg.false_alarm_rate is not None:
        q_min = matched_filter_threshold(
            cfg.sphere, cfg.trap, cfg.simulation, cfg.false_alarm_rate)
        template = impulse_response_template(cfg.sphere, cfg.trap, cfg.simulation)
        outputs = matched_filter_outputs(series, template)
        detections = []
        for ev in cfg.impulses:
            idx = int(round(ev.time / series.sample_interval))
            if 0 <= idx < outputs.size:
                lo = max(0, idx - 2)
                amp = float(np.max(np.abs(outputs[lo: idx + 3])))
                detections.append({
                    "time_s": ev.time,
                    "injected_momentum_kg_m_s": ev.momentum_transfer * ev.direction,
                    "filter_amplitude_kg_m_s": amp,
                    "detected": bool(amp > q_min.value),
                })
        doc = {
            "levkit_version": __version__,
            "command": "simulate",
            "levkit_threads": LEVKIT_THREADS,
            "config": normalize_config(cfg.raw),
            "threshold_kg_m_s": q_min.value,
            "events": detections,
        }
        det_path = out_dir / "detections.json"
        _atomic_write_text(det_path, json.dumps(doc, indent=2, sort_keys=True) + "\n")
        n_hit = sum(1 for d in detections if d["detected"])
        print(f"wrote {det_path}: threshold {q_min.value!r} kg m/s, "
              f"{n_hit}/{len(detections)} injected impulses detected")
    return EXIT_OK


def _write_curve(curve, out_dir: Path, stem: str, command: str, cfg_doc: dict):
    csv_path = out_dir / f"{stem}.csv"
    json_path = out_dir / f"{stem}.json"
    # Prepend the CLI provenance header to the curve's own CSV emission.
    out_dir.mkdir(parents=True, exist_ok=True)
    tmp = out_dir / f".{stem}.body"
    curve.to_csv(tmp)
    body = tmp.read_text(encoding="utf-8")
    os.unlink(tmp)
    _atomic_write_text(csv_path, _provenance_header(command, cfg_doc) + body)
    doc = curve.to_json_dict()
    doc["command"] = command
    doc["levkit_threads"] = LEVKIT_THREADS
    _atomic_write_text(json_path, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")


def _lambda_grid(plan_sec: dict) -> np.ndarray:
    if "lambda_min" not in plan_sec or "lambda_max" not in plan_sec:
        raise ConfigError("plan: lambda_min and lambda_max are required for this case")
    return log_grid(plan_sec["lambda_min"], plan_sec["lambda_max"],
                    plan_sec.get("points_per_decade", 60))


def cmd_exclusion(args) -> int:
    cfg = load_config(args.config)
    plan = cfg.build_plan()
    out_dir = _out_dir(cfg, args.outdir)
    case = args.case
    p = cfg.plan_section

    if case == "isl":
        if cfg.geometry is None:
            raise ConfigError("exclusion isl: config needs a geometry section")
        curve = isl_projection(plan, _lambda_grid(p))
        _write_curve(curve, out_dir, "exclusion_isl", "exclusion isl", cfg.raw)
    elif case == "coulomb":
        if cfg.capacitor is None:
            raise ConfigError("exclusion coulomb: config needs a capacitor section")
        curve = coulomb_projection(
            plan, _lambda_grid(p), cfg.capacitor,
            polarizing_field=p.get("polarizing_field", 0.0))
        _write_curve(curve, out_dir, "exclusion_coulomb", "exclusion coulomb", cfg.raw)
    elif case in ("millicharge", "neutrality"):
        if "drive_field" not in p:
            raise ConfigError(f"exclusion {case}: plan.drive_field is required")
        eps = millicharge_sensitivity(plan, p["drive_field"]).value
        bound = neutrality_sensitivity(plan, p["drive_field"]).value
        doc = {
            "levkit_version": __version__,
            "command": f"exclusion {case}",
            "levkit_threads": LEVKIT_THREADS,
            "config": normalize_config(cfg.raw),
            "millicharge_sensitivity_e": eps,
            "neutrality_bound_per_nucleon_e": bound,
            "nucleon_count": plan.sphere.nucleon_count,
        }
        path = out_dir / f"exclusion_{case}.json"
        _atomic_write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")
        print(f"millicharge_sensitivity_e = {eps!r}")
        print(f"neutrality_bound_per_nucleon_e = {bound!r}")
        print(f"wrote {path}")
    elif case == "dm":
        for key in ("q_min", "dm_mass_min", "dm_mass_max"):
            if key not in p:
                raise ConfigError(f"exclusion dm: plan.{key} is required")
        # Energy-dimension config values are already in eV.
        masses = log_grid(p["dm_mass_min"], p["dm_mass_max"],
                          p.get("points_per_decade", 60))
        curve = dm_projection(
            plan, masses, Quantity(p["q_min"], Dimension.MOMENTUM),
            mediator_mass_ev=p.get("mediator_mass", 0.0))
        _write_curve(curve, out_dir, "exclusion_dm", "exclusion dm", cfg.raw)
    return EXIT_OK


def cmd_axion(args) -> int:
    rows = []
    for fa in args.fa_gev:
        if fa <= 0.0:
            raise ConfigError(f"axion decay constant must be positive, got {fa!r}")
        m_a_ev, f_gw_hz = axion_gw_line(fa)
        rows.append((fa, m_a_ev, f_gw_hz))
        print(f"f_a = {fa!r} GeV: m_a = {m_a_ev!r} eV, f_gw = {f_gw_hz!r} Hz")
    if args.output is not None:
        lines = [
            f"# levkit_version = {__version__}\n",
            "# command = axion\n",
            f"# levkit_threads = {LEVKIT_THREADS}\n",
            "# columns = f_a_gev,m_a_ev,f_gw_hz\n",
        ]
        for fa, m_a, f_gw in rows:
            lines.append(f"{fa!r},{m_a!r},{f_gw!r}\n")
        _atomic_write_text(Path(args.output), "".join(lines))
        print(f"wrote {args.output}")
    return EXIT_OK


def cmd_normalize_config(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
    text = json.dumps(normalize_config(doc), indent=2, sort_keys=True) + "\n"
    if args.output is not None:
        _atomic_write_text(Path(args.output), text)
        print(f"wrote {args.output}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# Shipped benchmark configs and the subcommand each one feeds.
BENCHMARK_RUNS = (
    ("noise_budget_10um.json", "noise-budget"),
    ("isl_finger_20um.json", "exclusion-isl"),
    ("coulomb_charged_20um.json", "exclusion-coulomb"),
    ("millicharge_10um.json", "exclusion-millicharge"),
    ("dm_recoil_10um.json", "exclusion-dm"),
)


def _config_dir() -> Path:
    return Path(__file__).parent / "configs"


def cmd_regen_figures(args) -> int:
    out_root = Path(args.outdir)
    for name, command in BENCHMARK_RUNS:
        path = _config_dir() / name
        sub_out = out_root / path.stem
        print(f"== {command} {name} -> {sub_out}")
        ns = argparse.Namespace(config=str(path), outdir=str(sub_out))
        if command == "noise-budget":
            cmd_noise_budget(ns)
        else:
            ns.case = command.split("-", 1)[1]
            cmd_exclusion(ns)
    # The axion line benchmark is a pure function of f_a; emit a small grid.
    ns = argparse.Namespace(fa_gev=[1e9, 1e12, 1e16, 1.9010398190798424e16],
                            output=str(out_root / "axion_lines.csv"))
    cmd_axion(ns)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="levkit",
        description="Levitated-sphere sensitivity projections and simulations.",
    )
    parser.add_argument("--version", action="version", version=f"levkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("noise-budget", help="tabulate the force-noise budget")
    p.add_argument("config")
    p.add_argument("-o", "--outdir", default=None)
    p.set_defaults(func=cmd_noise_budget)

    p = sub.add_parser("simulate", help="run the Langevin trajectory model")
    p.add_argument("config")
    p.add_argument("-o", "--outdir", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("exclusion", help="projected exclusion / sensitivity curves")
    p.add_argument("case", choices=["isl", "coulomb", "millicharge", "neutrality", "dm"])
    p.add_argument("config")
    p.add_argument("-o", "--outdir", default=None)
    p.set_defaults(func=cmd_exclusion)

    p = sub.add_parser("axion", help="axion-annihilation GW line frequencies")
    p.add_argument("fa_gev", nargs="+", type=float, help="decay constants in GeV")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_axion)

    p = sub.add_parser("normalize-config", help="re-emit a config in canonical SI units")
    p.add_argument("config")
    p.add_argument("--output", default=None)
    p.set_defaults(func=cmd_normalize_config)

    p = sub.add_parser("regen-figures", help="rerun all shipped benchmark configs")
    p.add_argument("-o", "--outdir", default="figures")
    p.set_defaults(func=cmd_regen_figures)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _CONFIG_ERRORS as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except _RUNTIME_ERRORS as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())

"""Strict run-configuration parsing for the command-line front end.

A run config is a UTF-8 JSON document, schema "levkit-config/1".  Every
physical value is a string with an explicit unit suffix ("radius": "5 um");
bare numbers are allowed only for dimensionless fields.  Unknown keys are
rejected and missing required keys are reported with their full path, so a
config never silently does something other than what it says.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Any, Optional

from .quantities import Dimension
from .sensor import NoiseModel, Sphere, TrapState, sql_force_asd, thermal_force_asd
from .dynamics import ImpulseEvent, SimulationConfig
from .newforces import FingerArray, FluidCapillary, PlaneSlab
from .limits import Capacitor, HaloModel, SearchPlan

CONFIG_SCHEMA = "levkit-config/1"


class ConfigError(ValueError):
    """Config parse/validation failure; message carries the full key path."""


# unit token -> (dimension, factor to SI)
_UNITS = {
    "m": (Dimension.LENGTH, 1.0),
    "cm": (Dimension.LENGTH, 1e-2),
    "mm": (Dimension.LENGTH, 1e-3),
    "um": (Dimension.LENGTH, 1e-6),
    "nm": (Dimension.LENGTH, 1e-9),
    "s": (Dimension.TIME, 1.0),
    "ms": (Dimension.TIME, 1e-3),
    "us": (Dimension.TIME, 1e-6),
    "day": (Dimension.TIME, 86400.0),
    "days": (Dimension.TIME, 86400.0),
    "yr": (Dimension.TIME, 365.0 * 86400.0),
    "Hz": (Dimension.FREQUENCY, 1.0),
    "kHz": (Dimension.FREQUENCY, 1e3),
    "MHz": (Dimension.FREQUENCY, 1e6),
    "1/s": (Dimension.FREQUENCY, 1.0),   # rates (damping, false-alarm)
    "K": (Dimension.TEMPERATURE, 1.0),
    "mK": (Dimension.TEMPERATURE, 1e-3),
    "uK": (Dimension.TEMPERATURE, 1e-6),
    "kg": (Dimension.MASS, 1.0),
    "g": (Dimension.MASS, 1e-3),
    "ng": (Dimension.MASS, 1e-12),
    "kg/m^3": (Dimension.DENSITY, 1.0),
    "g/cm^3": (Dimension.DENSITY, 1e3),
    "V": (Dimension.VOLTAGE, 1.0),
    "kV": (Dimension.VOLTAGE, 1e3),
    "V/m": (Dimension.ELECTRIC_FIELD, 1.0),
    "kV/m": (Dimension.ELECTRIC_FIELD, 1e3),
    "kV/mm": (Dimension.ELECTRIC_FIELD, 1e6),
    "V/mm": (Dimension.ELECTRIC_FIELD, 1e3),
    "N": (Dimension.FORCE, 1.0),
    "aN": (Dimension.FORCE, 1e-18),
    "N/Hz^0.5": (Dimension.FORCE_ASD, 1.0),
    "aN/Hz^0.5": (Dimension.FORCE_ASD, 1e-18),
    "eV": (Dimension.ENERGY, 1.0),       # particle-physics energies stay in eV
    "meV": (Dimension.ENERGY, 1e-3),
    "keV": (Dimension.ENERGY, 1e3),
    "MeV": (Dimension.ENERGY, 1e6),
    "GeV": (Dimension.ENERGY, 1e9),
    "TeV": (Dimension.ENERGY, 1e12),
    "kg*m/s": (Dimension.MOMENTUM, 1.0),
    "e": (Dimension.CHARGE, 1.0),        # charges counted in units of e
}

# canonical output unit per dimension, for normalize-config
_CANONICAL = {
    Dimension.LENGTH: "m",
    Dimension.TIME: "s",
    Dimension.FREQUENCY: "Hz",
    Dimension.TEMPERATURE: "K",
    Dimension.MASS: "kg",
    Dimension.DENSITY: "kg/m^3",
    Dimension.VOLTAGE: "V",
    Dimension.ELECTRIC_FIELD: "V/m",
    Dimension.FORCE: "N",
    Dimension.FORCE_ASD: "N/Hz^0.5",
    Dimension.ENERGY: "eV",
    Dimension.MOMENTUM: "kg*m/s",
    Dimension.CHARGE: "e",
}


def parse_unit_string(raw: Any, dimension: Dimension, path: str) -> float:
    """Parse '<number> <unit>' into an SI value of the expected dimension."""
    if not isinstance(raw, str):
        raise ConfigError(
            f"{path}: expected a unit-suffixed string like '5 um', got {raw!r}"
        )
    parts = raw.split()
    if len(parts) != 2:
        raise ConfigError(f"{path}: expected '<value> <unit>', got {raw!r}")
    try:
        value = float(parts[0])
    except ValueError:
        raise ConfigError(f"{path}: {parts[0]!r} is not a number") from None
    if not math.isfinite(value):
        raise ConfigError(f"{path}: non-finite value {parts[0]!r}")
    unit = parts[1]
    if unit not in _UNITS:
        raise ConfigError(f"{path}: unknown unit {unit!r}")
    dim, factor = _UNITS[unit]
    if dim is not dimension:
        raise ConfigError(
            f"{path}: unit {unit!r} has dimension {dim.value}, expected {dimension.value}"
        )
    return value * factor


def format_unit_string(si_value: float, dimension: Dimension) -> str:
    unit = _CANONICAL[dimension]
    return f"{si_value!r} {unit}"


def _get(section: dict, key: str, path: str, required: bool = True, default=None):
    if key not in section:
        if required:
            raise ConfigError(f"missing required key: {path}.{key}")
        return default
    return section[key]


def _check_keys(section: dict, allowed: set, path: str):
    if not isinstance(section, dict):
        raise ConfigError(f"{path}: expected an object")
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")


def _number(raw: Any, path: str) -> float:
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigError(f"{path}: expected a bare number (dimensionless), got {raw!r}")
    if not math.isfinite(float(raw)):
        raise ConfigError(f"{path}: non-finite number")
    return float(raw)


def _integer(raw: Any, path: str) -> int:
    if isinstance(raw, bool) or not isinstance(raw, int):
        raise ConfigError(f"{path}: expected an integer, got {raw!r}")
    return raw


@dataclass
class RunConfig:
    """Parsed, validated run configuration."""

    raw: dict
    sphere: Optional[Sphere] = None
    trap: Optional[TrapState] = None
    noise: Optional[NoiseModel] = None
    simulation: Optional[SimulationConfig] = None
    impulses: tuple = ()
    psd_segment_length: Optional[int] = None
    false_alarm_rate: Optional[float] = None
    geometry: object = None
    capacitor: Optional[Capacitor] = None
    halo: Optional[HaloModel] = None
    plan_section: Optional[dict] = None
    output_section: Optional[dict] = None

    def require(self, *names: str):
        for name in names:
            if getattr(self, name) is None:
                raise ConfigError(f"this command needs the '{name}' config section")

    def build_plan(self) -> SearchPlan:
        self.require("sphere", "trap", "noise", "plan_section")
        p = self.plan_section
        return SearchPlan(
            sphere=self.sphere,
            trap=self.trap,
            noise=self.noise,
            integration_time=p["integration_time"],
            geometry=self.geometry,
            significance=p["significance"],
            array_size=p["array_size"],
            exposure_sphere_days=p["exposure_sphere_days"],
            measurement_frequency=p.get("measurement_frequency"),
            halo=self.halo if self.halo is not None else HaloModel(),
        )


_TOP_KEYS = {"schema", "sphere", "trap", "noise", "simulation", "geometry",
             "capacitor", "plan", "halo", "output"}


def parse_config(doc: dict) -> RunConfig:
    _check_keys(doc, _TOP_KEYS, "config")
    if doc.get("schema") != CONFIG_SCHEMA:
        raise ConfigError(
            f"config.schema: expected {CONFIG_SCHEMA!r}, got {doc.get('schema')!r}"
        )
    cfg = RunConfig(raw=doc)

    if "sphere" in doc:
        sec = doc["sphere"]
        _check_keys(sec, {"radius", "density", "relative_permittivity",
                          "net_charge", "material_label"}, "sphere")
        kwargs = {"radius": parse_unit_string(_get(sec, "radius", "sphere"),
                                              Dimension.LENGTH, "sphere.radius")}
        if "density" in sec:
            kwargs["density"] = parse_unit_string(sec["density"], Dimension.DENSITY,
                                                  "sphere.density")
        if "relative_permittivity" in sec:
            kwargs["relative_permittivity"] = _number(sec["relative_permittivity"],
                                                      "sphere.relative_permittivity")
        if "net_charge" in sec:
            kwargs["net_charge"] = _integer(sec["net_charge"], "sphere.net_charge")
        if "material_label" in sec:
            if not isinstance(sec["material_label"], str):
                raise ConfigError("sphere.material_label: expected a string")
            kwargs["material_label"] = sec["material_label"]
        cfg.sphere = Sphere(**kwargs)

    if "trap" in doc:
        sec = doc["trap"]
        _check_keys(sec, {"resonant_frequency", "damping_rate", "temperature",
                          "feedback_gain"}, "trap")
        cfg.trap = TrapState(
            resonant_frequency=parse_unit_string(
                _get(sec, "resonant_frequency", "trap"), Dimension.FREQUENCY,
                "trap.resonant_frequency"),
            damping_rate=parse_unit_string(
                _get(sec, "damping_rate", "trap"), Dimension.FREQUENCY,
                "trap.damping_rate"),
            temperature=parse_unit_string(
                _get(sec, "temperature", "trap"), Dimension.TEMPERATURE,
                "trap.temperature"),
            feedback_gain=(
                parse_unit_string(sec["feedback_gain"], Dimension.FREQUENCY,
                                  "trap.feedback_gain")
                if "feedback_gain" in sec else 0.0),
        )

    if "noise" in doc:
        sec = doc["noise"]
        _check_keys(sec, {"technical_force_asd", "include_thermal", "include_sql"},
                    "noise")
        if cfg.sphere is None or cfg.trap is None:
            raise ConfigError("noise: requires sphere and trap sections")
        model = NoiseModel()
        if sec.get("include_thermal", False):
            level = thermal_force_asd(cfg.sphere, cfg.trap).value
            model = model.with_contribution("thermal", lambda f, _l=level: _l)
        if sec.get("include_sql", False):
            level = sql_force_asd(cfg.sphere, cfg.trap).value
            model = model.with_contribution("sql", lambda f, _l=level: _l)
        if "technical_force_asd" in sec:
            level = parse_unit_string(sec["technical_force_asd"], Dimension.FORCE_ASD,
                                      "noise.technical_force_asd")
            model = model.with_contribution("technical", lambda f, _l=level: _l)
        if not model.contributions:
            raise ConfigError("noise: at least one contribution must be enabled")
        cfg.noise = model

    if "simulation" in doc:
        sec = doc["simulation"]
        _check_keys(sec, {"time_step", "duration", "rng_seed", "bath_temperature",
                          "feedback_gain", "record_decimation", "allow_short_run",
                          "impulses", "psd_segment_length", "false_alarm_rate"},
                    "simulation")
        cfg.simulation = SimulationConfig(
            time_step=parse_unit_string(_get(sec, "time_step", "simulation"),
                                        Dimension.TIME, "simulation.time_step"),
            duration=parse_unit_string(_get(sec, "duration", "simulation"),
                                       Dimension.TIME, "simulation.duration"),
            rng_seed=_integer(_get(sec, "rng_seed", "simulation"),
                              "simulation.rng_seed"),
            bath_temperature=parse_unit_string(
                _get(sec, "bath_temperature", "simulation"), Dimension.TEMPERATURE,
                "simulation.bath_temperature"),
            feedback_gain=(
                parse_unit_string(sec["feedback_gain"], Dimension.FREQUENCY,
                                  "simulation.feedback_gain")
                if "feedback_gain" in sec else 0.0),
            record_decimation=(
                _integer(sec["record_decimation"], "simulation.record_decimation")
                if "record_decimation" in sec else 1),
            allow_short_run=bool(sec.get("allow_short_run", False)),
        )
        impulses = []
        for i, item in enumerate(sec.get("impulses", [])):
            path = f"simulation.impulses[{i}]"
            _check_keys(item, {"time", "momentum_transfer", "direction"}, path)
            impulses.append(ImpulseEvent(
                time=parse_unit_string(_get(item, "time", path), Dimension.TIME,
                                       f"{path}.time"),
                momentum_transfer=parse_unit_string(
                    _get(item, "momentum_transfer", path), Dimension.MOMENTUM,
                    f"{path}.momentum_transfer"),
                direction=_integer(item.get("direction", 1), f"{path}.direction"),
            ))
        cfg.impulses = tuple(impulses)
        if "psd_segment_length" in sec:
            cfg.psd_segment_length = _integer(sec["psd_segment_length"],
                                              "simulation.psd_segment_length")
        if "false_alarm_rate" in sec:
            cfg.false_alarm_rate = parse_unit_string(
                sec["false_alarm_rate"], Dimension.FREQUENCY,
                "simulation.false_alarm_rate")

    if "geometry" in doc:
        sec = doc["geometry"]
        kind = _get(sec, "type", "geometry")
        if kind == "plane_slab":
            _check_keys(sec, {"type", "thickness", "density_contrast", "distance"},
                        "geometry")
            cfg.geometry = PlaneSlab(
                thickness=parse_unit_string(_get(sec, "thickness", "geometry"),
                                            Dimension.LENGTH, "geometry.thickness"),
                density_contrast=parse_unit_string(
                    _get(sec, "density_contrast", "geometry"), Dimension.DENSITY,
                    "geometry.density_contrast"),
                distance=parse_unit_string(_get(sec, "distance", "geometry"),
                                           Dimension.LENGTH, "geometry.distance"),
            )
        elif kind == "finger_array":
            _check_keys(sec, {"type", "finger_width", "finger_depth", "density_a",
                              "density_b", "distance", "drive_amplitude",
                              "drive_frequency", "n_finger_pairs"}, "geometry")
            cfg.geometry = FingerArray(
                finger_width=parse_unit_string(_get(sec, "finger_width", "geometry"),
                                               Dimension.LENGTH, "geometry.finger_width"),
                finger_depth=parse_unit_string(_get(sec, "finger_depth", "geometry"),
                                               Dimension.LENGTH, "geometry.finger_depth"),
                density_a=parse_unit_string(_get(sec, "density_a", "geometry"),
                                            Dimension.DENSITY, "geometry.density_a"),
                density_b=parse_unit_string(_get(sec, "density_b", "geometry"),
                                            Dimension.DENSITY, "geometry.density_b"),
                distance=parse_unit_string(_get(sec, "distance", "geometry"),
                                           Dimension.LENGTH, "geometry.distance"),
                drive_amplitude=parse_unit_string(
                    _get(sec, "drive_amplitude", "geometry"), Dimension.LENGTH,
                    "geometry.drive_amplitude"),
                drive_frequency=parse_unit_string(
                    _get(sec, "drive_frequency", "geometry"), Dimension.FREQUENCY,
                    "geometry.drive_frequency"),
                n_finger_pairs=_integer(sec.get("n_finger_pairs", 40),
                                        "geometry.n_finger_pairs"),
            )
        elif kind == "fluid_capillary":
            _check_keys(sec, {"type", "inner_diameter", "droplet_length", "density_a",
                              "density_b", "distance", "modulation_frequency",
                              "n_droplet_pairs"}, "geometry")
            cfg.geometry = FluidCapillary(
                inner_diameter=parse_unit_string(
                    _get(sec, "inner_diameter", "geometry"), Dimension.LENGTH,
                    "geometry.inner_diameter"),
                droplet_length=parse_unit_string(
                    _get(sec, "droplet_length", "geometry"), Dimension.LENGTH,
                    "geometry.droplet_length"),
                density_a=parse_unit_string(_get(sec, "density_a", "geometry"),
                                            Dimension.DENSITY, "geometry.density_a"),
                density_b=parse_unit_string(_get(sec, "density_b", "geometry"),
                                            Dimension.DENSITY, "geometry.density_b"),
                distance=parse_unit_string(_get(sec, "distance", "geometry"),
                                           Dimension.LENGTH, "geometry.distance"),
                modulation_frequency=parse_unit_string(
                    _get(sec, "modulation_frequency", "geometry"), Dimension.FREQUENCY,
                    "geometry.modulation_frequency"),
                n_droplet_pairs=_integer(sec.get("n_droplet_pairs", 40),
                                         "geometry.n_droplet_pairs"),
            )
        else:
            raise ConfigError(f"geometry.type: unknown geometry {kind!r}")

    if "capacitor" in doc:
        sec = doc["capacitor"]
        _check_keys(sec, {"voltage", "plate_spacing", "standoff"}, "capacitor")
        cfg.capacitor = Capacitor(
            voltage=parse_unit_string(_get(sec, "voltage", "capacitor"),
                                      Dimension.VOLTAGE, "capacitor.voltage"),
            plate_spacing=parse_unit_string(_get(sec, "plate_spacing", "capacitor"),
                                            Dimension.LENGTH, "capacitor.plate_spacing"),
            standoff=parse_unit_string(_get(sec, "standoff", "capacitor"),
                                       Dimension.LENGTH, "capacitor.standoff"),
        )

    if "halo" in doc:
        sec = doc["halo"]
        _check_keys(sec, {"density_gev_cm3", "v0", "v_escape", "v_earth"}, "halo")
        defaults = HaloModel()
        cfg.halo = HaloModel(
            density_gev_cm3=(_number(sec["density_gev_cm3"], "halo.density_gev_cm3")
                             if "density_gev_cm3" in sec else defaults.density_gev_cm3),
            v0=_speed(sec, "v0", defaults.v0),
            v_escape=_speed(sec, "v_escape", defaults.v_escape),
            v_earth=_speed(sec, "v_earth", defaults.v_earth),
        )

    if "plan" in doc:
        sec = doc["plan"]
        _check_keys(sec, {"integration_time", "significance", "array_size",
                          "exposure_sphere_days", "measurement_frequency",
                          "drive_field", "polarizing_field",
                          "lambda_min", "lambda_max", "points_per_decade",
                          "q_min", "dm_mass_min", "dm_mass_max", "mediator_mass"},
                    "plan")
        plan = {
            "integration_time": parse_unit_string(
                _get(sec, "integration_time", "plan"), Dimension.TIME,
                "plan.integration_time"),
            "significance": (_number(sec["significance"], "plan.significance")
                             if "significance" in sec else 1.0),
            "array_size": (_integer(sec["array_size"], "plan.array_size")
                           if "array_size" in sec else 1),
            "exposure_sphere_days": (
                parse_unit_string(sec["exposure_sphere_days"], Dimension.TIME,
                                  "plan.exposure_sphere_days") / 86400.0
                if "exposure_sphere_days" in sec else 0.0),
        }
        if "measurement_frequency" in sec:
            plan["measurement_frequency"] = parse_unit_string(
                sec["measurement_frequency"], Dimension.FREQUENCY,
                "plan.measurement_frequency")
        for key, dim in [("drive_field", Dimension.ELECTRIC_FIELD),
                         ("polarizing_field", Dimension.ELECTRIC_FIELD),
                         ("lambda_min", Dimension.LENGTH),
                         ("lambda_max", Dimension.LENGTH),
                         ("q_min", Dimension.MOMENTUM),
                         ("dm_mass_min", Dimension.ENERGY),
                         ("dm_mass_max", Dimension.ENERGY),
                         ("mediator_mass", Dimension.ENERGY)]:
            if key in sec:
                plan[key] = parse_unit_string(sec[key], dim, f"plan.{key}")
        if "points_per_decade" in sec:
            plan["points_per_decade"] = _integer(sec["points_per_decade"],
                                                 "plan.points_per_decade")
        cfg.plan_section = plan

    if "output" in doc:
        sec = doc["output"]
        _check_keys(sec, {"directory", "frequency_min", "frequency_max",
                          "frequency_points"}, "output")
        out = {"directory": _get(sec, "directory", "output")}
        if not isinstance(out["directory"], str):
            raise ConfigError("output.directory: expected a string")
        for key in ("frequency_min", "frequency_max"):
            if key in sec:
                out[key] = parse_unit_string(sec[key], Dimension.FREQUENCY,
                                             f"output.{key}")
        if "frequency_points" in sec:
            out["frequency_points"] = _integer(sec["frequency_points"],
                                               "output.frequency_points")
        cfg.output_section = out

    return cfg


def _speed(sec: dict, key: str, default: float) -> float:
    """Halo speeds are given as 'x km/s' strings."""
    if key not in sec:
        return default
    raw = sec[key]
    if not isinstance(raw, str) or not raw.endswith("km/s"):
        raise ConfigError(f"halo.{key}: expected a string like '220 km/s'")
    try:
        return float(raw[:-4].strip()) * 1e3
    except ValueError:
        raise ConfigError(f"halo.{key}: bad number in {raw!r}") from None


def load_config(path) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    return parse_config(doc)


def normalize_config(doc: dict) -> dict:
    """Parse and re-emit the config with canonical SI unit strings.

    Normalizing twice is a fixed point: parse(normalize(x)) == parse(x).
    """
    cfg = parse_config(doc)
    out: dict = {"schema": CONFIG_SCHEMA}

    def put(section, key, value, dim=None):
        out.setdefault(section, {})
        if dim is None:
            out[section][key] = value
        else:
            out[section][key] = format_unit_string(value, dim)

    if cfg.sphere is not None:
        s = cfg.sphere
        put("sphere", "radius", s.radius, Dimension.LENGTH)
        put("sphere", "density", s.density, Dimension.DENSITY)
        put("sphere", "relative_permittivity", s.relative_permittivity)
        put("sphere", "net_charge", s.net_charge)
        put("sphere", "material_label", s.material_label)
    if cfg.trap is not None:
        t = cfg.trap
        put("trap", "resonant_frequency", t.resonant_frequency, Dimension.FREQUENCY)
        put("trap", "damping_rate", t.damping_rate, Dimension.FREQUENCY)
        put("trap", "temperature", t.temperature, Dimension.TEMPERATURE)
        put("trap", "feedback_gain", t.feedback_gain, Dimension.FREQUENCY)
    if "noise" in cfg.raw:
        sec = cfg.raw["noise"]
        out["noise"] = {
            "include_thermal": bool(sec.get("include_thermal", False)),
            "include_sql": bool(sec.get("include_sql", False)),
        }
        if "technical_force_asd" in sec:
            level = parse_unit_string(sec["technical_force_asd"], Dimension.FORCE_ASD,
                                      "noise.technical_force_asd")
            out["noise"]["technical_force_asd"] = format_unit_string(
                level, Dimension.FORCE_ASD)
    if cfg.simulation is not None:
        c = cfg.simulation
        put("simulation", "time_step", c.time_step, Dimension.TIME)
        put("simulation", "duration", c.duration, Dimension.TIME)
        put("simulation", "rng_seed", c.rng_seed)
        put("simulation", "bath_temperature", c.bath_temperature, Dimension.TEMPERATURE)
        put("simulation", "feedback_gain", c.feedback_gain, Dimension.FREQUENCY)
        put("simulation", "record_decimation", c.record_decimation)
        put("simulation", "allow_short_run", c.allow_short_run)
        if cfg.impulses:
            out["simulation"]["impulses"] = [
                {
                    "time": format_unit_string(ev.time, Dimension.TIME),
                    "momentum_transfer": format_unit_string(
                        ev.momentum_transfer, Dimension.MOMENTUM),
                    "direction": ev.direction,
                }
                for ev in cfg.impulses
            ]
        if cfg.psd_segment_length is not None:
            put("simulation", "psd_segment_length", cfg.psd_segment_length)
        if cfg.false_alarm_rate is not None:
            put("simulation", "false_alarm_rate", cfg.false_alarm_rate,
                Dimension.FREQUENCY)
    if cfg.geometry is not None:
        g = cfg.geometry
        if isinstance(g, PlaneSlab):
            out["geometry"] = {
                "type": "plane_slab",
                "thickness": format_unit_string(g.thickness, Dimension.LENGTH),
                "density_contrast": format_unit_string(g.density_contrast,
                                                       Dimension.DENSITY),
                "distance": format_unit_string(g.distance, Dimension.LENGTH),
            }
        elif isinstance(g, FingerArray):
            out["geometry"] = {
                "type": "finger_array",
                "finger_width": format_unit_string(g.finger_width, Dimension.LENGTH),
                "finger_depth": format_unit_string(g.finger_depth, Dimension.LENGTH),
                "density_a": format_unit_string(g.density_a, Dimension.DENSITY),
                "density_b": format_unit_string(g.density_b, Dimension.DENSITY),
                "distance": format_unit_string(g.distance, Dimension.LENGTH),
                "drive_amplitude": format_unit_string(g.drive_amplitude,
                                                      Dimension.LENGTH),
                "drive_frequency": format_unit_string(g.drive_frequency,
                                                      Dimension.FREQUENCY),
                "n_finger_pairs": g.n_finger_pairs,
            }
        else:
            out["geometry"] = {
                "type": "fluid_capillary",
                "inner_diameter": format_unit_string(g.inner_diameter, Dimension.LENGTH),
                "droplet_length": format_unit_string(g.droplet_length, Dimension.LENGTH),
                "density_a": format_unit_string(g.density_a, Dimension.DENSITY),
                "density_b": format_unit_string(g.density_b, Dimension.DENSITY),
                "distance": format_unit_string(g.distance, Dimension.LENGTH),
                "modulation_frequency": format_unit_string(g.modulation_frequency,
                                                           Dimension.FREQUENCY),
                "n_droplet_pairs": g.n_droplet_pairs,
            }
    if cfg.capacitor is not None:
        c = cfg.capacitor
        out["capacitor"] = {
            "voltage": format_unit_string(c.voltage, Dimension.VOLTAGE),
            "plate_spacing": format_unit_string(c.plate_spacing, Dimension.LENGTH),
            "standoff": format_unit_string(c.standoff, Dimension.LENGTH),
        }
    if cfg.halo is not None:
        h = cfg.halo
        out["halo"] = {
            "density_gev_cm3": h.density_gev_cm3,
            "v0": f"{h.v0 / 1e3!r} km/s",
            "v_escape": f"{h.v_escape / 1e3!r} km/s",
            "v_earth": f"{h.v_earth / 1e3!r} km/s",
        }
    if cfg.plan_section is not None:
        p = cfg.plan_section
        sec = {"integration_time": format_unit_string(p["integration_time"],
                                                      Dimension.TIME),
               "significance": p["significance"],
               "array_size": p["array_size"],
               "exposure_sphere_days": format_unit_string(
                   p["exposure_sphere_days"] * 86400.0, Dimension.TIME)}
        for key, dim in [("measurement_frequency", Dimension.FREQUENCY),
                         ("drive_field", Dimension.ELECTRIC_FIELD),
                         ("polarizing_field", Dimension.ELECTRIC_FIELD),
                         ("lambda_min", Dimension.LENGTH),
                         ("lambda_max", Dimension.LENGTH),
                         ("q_min", Dimension.MOMENTUM),
                         ("dm_mass_min", Dimension.ENERGY),
                         ("dm_mass_max", Dimension.ENERGY),
                         ("mediator_mass", Dimension.ENERGY)]:
            if key in p:
                sec[key] = format_unit_string(p[key], dim)
        if "points_per_decade" in p:
            sec["points_per_decade"] = p["points_per_decade"]
        out["plan"] = sec
    if cfg.output_section is not None:
        o = cfg.output_section
        out["output"] = {"directory": o["directory"]}
        for key in ("frequency_min", "frequency_max"):
            if key in o:
                out["output"][key] = format_unit_string(o[key], Dimension.FREQUENCY)
        if "frequency_points" in o:
            out["output"]["frequency_points"] = o["frequency_points"]
    return out

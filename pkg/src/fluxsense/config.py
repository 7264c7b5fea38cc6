"""Flat ``key = value`` configuration for the whole toolkit.

Format rules: one ``key = value`` assignment per line, ``#`` starts a
comment, blank lines are ignored, keys are case-sensitive.  Unknown
keys are rejected with their line number.  Keys left out fall back to
the reference-sensor defaults, so an empty file is a complete, valid
configuration.

Most physical quantities accept two spellings: the canonical field
name in SI units, and a unit-suffixed convenience form.

    sensor design    f_q_max (Hz)           f_q_max_ghz
                     e_c_over_h (Hz)        e_c_over_h_ghz
                     kappa (rad/s)          kappa_mhz (linewidth)
                     delta (rad/s)          delta_ghz (detuning)
                     z0 (Ohm)               z0_ohm
                     beta
                     c_c (F)                c_c_ff
                     c_qg (F)               c_qg_ff
                     m_ind (H)              m_ind_ph
                     m_parasitic (H)        m_parasitic_ph
                     alpha_flux
                     gamma_ic
                     temperature (K)        temperature_mk
    operating point  bias_phi (Phi_0 units)
    estimation       n_qubits, sigma0, sigma1, epsilon, n_steps,
                     n_flux_targets, n_repetitions, master_seed,
                     decoherence_enabled, measurement_cap, grid_size,
                     tau_min (s) / tau_min_ns
    bias-line layout x_a (m) / x_a_um, feed_width / feed_width_um,
                     arm_width / arm_width_um,
                     squid_rect<i> / squid_rect<i>_um,
                     gap_rect<i> / gap_rect<i>_um

Setting both spellings of one field is an error.  ``kappa_mhz`` and
``delta_ghz`` take plain linewidth/detuning frequencies and are
converted to angular rates.  Rectangle values are comma-separated
``x1, x2, y1, y2`` with an optional fifth entry ``orientation``
(+1 or -1); providing any ``squid_rect<i>`` (or ``gap_rect<i>``)
replaces the entire default rectangle set of that group.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .magnetostatics import BiasLineGeometry, FluxPatch
from .pea import PeaConfig
from .qubit import SensorDesign

DEFAULT_BIAS_PHI = 0.442  # operating point of the reference sensor

_MAX_RECTANGLES = 8


class ConfigError(ValueError):
    """Malformed, unknown, or out-of-range configuration input."""


@dataclass(frozen=True)
class ToolConfig:
    """Fully resolved configuration: sensor, campaign, and layout."""

    design: SensorDesign
    pea: PeaConfig
    geometry: BiasLineGeometry
    bias_phi: float = DEFAULT_BIAS_PHI


def _parse_float(text: str) -> float:
    value = float(text)
    if not math.isfinite(value):
        raise ValueError("value must be finite")
    return value


def _parse_int(text: str) -> int:
    try:
        return int(text, 10)
    except ValueError:
        raise ValueError(f"expected an integer, got {text!r}") from None


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "1", "yes", "on"):
        return True
    if lowered in ("false", "0", "no", "off"):
        return False
    raise ValueError(f"expected a boolean (true/false), got {text!r}")


def _parse_rect(text: str) -> tuple[float, ...]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) not in (4, 5):
        raise ValueError("expected 'x1, x2, y1, y2[, orientation]'")
    return tuple(float(p) for p in parts)


def _positive(value, key: str) -> None:
    if value <= 0:
        raise ConfigError(f"{key} must be positive, got {value}")


def _non_negative(value, key: str) -> None:
    if value < 0:
        raise ConfigError(f"{key} must be non-negative, got {value}")


def _check_f_q_max(value, key: str) -> None:
    if not 1e9 <= value <= 25e9:
        raise ConfigError(f"{key} must lie between 1 and 25 GHz, got {value} Hz")


def _check_bias_phi(value, key: str) -> None:
    if not 0.0 <= value < 0.5:
        raise ConfigError(f"{key} must lie in [0, 0.5), got {value}")


def _check_epsilon(value, key: str) -> None:
    if not 0.0 < value < 0.5:
        raise ConfigError(f"{key} must lie in (0, 0.5), got {value}")


def _check_n_qubits(value, key: str) -> None:
    if value not in (1, 2, 3):
        raise ConfigError(f"{key} must be 1, 2, or 3, got {value}")


def _at_least(minimum: int):
    def check(value, key: str) -> None:
        if value < minimum:
            raise ConfigError(f"{key} must be at least {minimum}, got {value}")
    return check


def _no_check(value, key: str) -> None:
    return None


# Registry rows: key -> (group, field, parser, scale, check).
# Scale multiplies numeric values into SI after parsing.
_ANGULAR_MHZ = 2 * math.pi * 1e6
_ANGULAR_GHZ = 2 * math.pi * 1e9

_KEYS: dict[str, tuple[str, str, object, float, object]] = {}


def _register(key, group, field, parser, scale, check) -> None:
    _KEYS[key] = (group, field, parser, scale, check)


def _register_float_pair(canonical, group, field, alias, scale, check) -> None:
    _register(canonical, group, field, _parse_float, 1.0, check)
    if alias is not None:
        _register(alias, group, field, _parse_float, scale, check)


_register_float_pair("f_q_max", "design", "f_q_max", "f_q_max_ghz", 1e9, _check_f_q_max)
_register_float_pair("e_c_over_h", "design", "e_c_over_h", "e_c_over_h_ghz", 1e9, _positive)
_register_float_pair("kappa", "design", "kappa", "kappa_mhz", _ANGULAR_MHZ, _positive)
_register_float_pair("delta", "design", "delta", "delta_ghz", _ANGULAR_GHZ, _positive)
_register_float_pair("z0", "design", "z0", "z0_ohm", 1.0, _positive)
_register_float_pair("beta", "design", "beta", None, 1.0, _non_negative)
_register_float_pair("c_c", "design", "c_c", "c_c_ff", 1e-15, _positive)
_register_float_pair("c_qg", "design", "c_qg", "c_qg_ff", 1e-15, _positive)
_register_float_pair("m_ind", "design", "m_ind", "m_ind_ph", 1e-12, _non_negative)
_register_float_pair("m_parasitic", "design", "m_parasitic", "m_parasitic_ph", 1e-12, _non_negative)
_register_float_pair("alpha_flux", "design", "alpha_flux", None, 1.0, _non_negative)
_register_float_pair("gamma_ic", "design", "gamma_ic", None, 1.0, _non_negative)
_register_float_pair("temperature", "design", "temperature", "temperature_mk", 1e-3, _non_negative)

_register_float_pair("bias_phi", "bias", "bias_phi", None, 1.0, _check_bias_phi)

_register("n_qubits", "pea", "n_qubits", _parse_int, 1.0, _check_n_qubits)
_register_float_pair("tau_min", "pea", "tau_min", "tau_min_ns", 1e-9, _positive)
_register_float_pair("sigma0", "pea", "sigma0", None, 1.0, _positive)
_register_float_pair("sigma1", "pea", "sigma1", None, 1.0, _positive)
_register_float_pair("epsilon", "pea", "epsilon", None, 1.0, _check_epsilon)
_register("n_steps", "pea", "n_steps", _parse_int, 1.0, _at_least(1))
_register("n_flux_targets", "pea", "n_flux_targets", _parse_int, 1.0, _at_least(1))
_register("n_repetitions", "pea", "n_repetitions", _parse_int, 1.0, _at_least(2))
_register("master_seed", "pea", "master_seed", _parse_int, 1.0, _non_negative)
_register("decoherence_enabled", "pea", "decoherence_enabled", _parse_bool, 1.0, _no_check)
_register("measurement_cap", "pea", "measurement_cap", _parse_int, 1.0, _at_least(1))
_register("grid_size", "pea", "grid_size", _parse_int, 1.0, _at_least(2))

_register_float_pair("x_a", "geometry", "x_a", "x_a_um", 1e-6, _positive)
_register_float_pair("feed_width", "geometry", "feed_width", "feed_width_um", 1e-6, _positive)
_register_float_pair("arm_width", "geometry", "arm_width", "arm_width_um", 1e-6, _positive)
for _i in range(1, _MAX_RECTANGLES + 1):
    for _grp, _fld in (("geometry", f"squid_rect{_i}"), ("geometry", f"gap_rect{_i}")):
        _register(_fld, _grp, _fld, _parse_rect, 1.0, _no_check)
        _register(f"{_fld}_um", _grp, _fld, _parse_rect, 1e-6, _no_check)


def _scan_lines(text: str) -> dict[str, tuple[int, str]]:
    """key -> (line number, raw value), rejecting malformed lines."""
    assignments: dict[str, tuple[int, str]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        if key not in _KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in assignments:
            raise ConfigError(
                f"line {lineno}: duplicate key {key!r} (first set on line {assignments[key][0]})"
            )
        assignments[key] = (lineno, value)
    return assignments


def _patch_from_rect(values: tuple[float, ...], scale: float, key: str, lineno: int) -> FluxPatch:
    coords = tuple(v * scale for v in values[:4])
    orientation = values[4] if len(values) == 5 else 1.0
    try:
        return FluxPatch(*coords, orientation=orientation)
    except ValueError as exc:
        raise ConfigError(f"line {lineno}: {key}: {exc}") from exc


def parse_config(text: str) -> ToolConfig:
    """Parse configuration text into a fully resolved ToolConfig."""
    assignments = _scan_lines(text)

    # Reject the same field set through two spellings.
    field_sources: dict[tuple[str, str], str] = {}
    for key in assignments:
        group, field = _KEYS[key][:2]
        other = field_sources.setdefault((group, field), key)
        if other != key:
            raise ConfigError(f"keys {other!r} and {key!r} both set the same parameter")

    values: dict[str, dict[str, object]] = {"design": {}, "pea": {}, "bias": {}, "geometry": {}}
    rects: dict[str, tuple[tuple[float, ...], float, str, int]] = {}
    for key, (lineno, raw) in assignments.items():
        group, field, parser, scale, check = _KEYS[key]
        try:
            parsed = parser(raw)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {key}: {exc}") from exc
        if parser is _parse_rect:
            rects[field] = (parsed, scale, key, lineno)
            continue
        if parser is _parse_float:
            parsed = parsed * scale
        check(parsed, key)
        values[group][field] = parsed

    geometry_kwargs = values["geometry"]
    for prefix, target in (("squid_rect", "squid_patches"), ("gap_rect", "gap_patches")):
        provided = sorted(f for f in rects if f.startswith(prefix))
        if provided:
            geometry_kwargs[target] = tuple(
                _patch_from_rect(*rects[field]) for field in provided
            )

    try:
        design = SensorDesign(**values["design"])
        pea = PeaConfig(**values["pea"])
        geometry = BiasLineGeometry(**geometry_kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    bias_phi = values["bias"].get("bias_phi", DEFAULT_BIAS_PHI)
    return ToolConfig(design=design, pea=pea, geometry=geometry, bias_phi=float(bias_phi))


def load_config(path) -> ToolConfig:
    """Read and parse a configuration file."""
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read())


def config_to_dict(config: ToolConfig) -> dict:
    """Plain-data view of a resolved configuration (JSON-friendly)."""

    def patch_fields(patch: FluxPatch) -> dict:
        return {
            "x1": patch.x1, "x2": patch.x2, "y1": patch.y1, "y2": patch.y2,
            "orientation": patch.orientation,
        }

    design, pea, geom = config.design, config.pea, config.geometry
    return {
        "design": {
            "f_q_max": design.f_q_max,
            "e_c_over_h": design.e_c_over_h,
            "kappa": design.kappa,
            "delta": design.delta,
            "z0": design.z0,
            "beta": design.beta,
            "c_c": design.c_c,
            "c_qg": design.c_qg,
            "m_ind": design.m_ind,
            "m_parasitic": design.m_parasitic,
            "alpha_flux": design.alpha_flux,
            "gamma_ic": design.gamma_ic,
            "temperature": design.temperature,
        },
        "pea": {
            "n_qubits": pea.n_qubits,
            "tau_min": pea.tau_min,
            "sigma0": pea.sigma0,
            "sigma1": pea.sigma1,
            "epsilon": pea.epsilon,
            "n_steps": pea.n_steps,
            "n_flux_targets": pea.n_flux_targets,
            "n_repetitions": pea.n_repetitions,
            "master_seed": pea.master_seed,
            "decoherence_enabled": pea.decoherence_enabled,
            "measurement_cap": pea.measurement_cap,
            "grid_size": pea.grid_size,
        },
        "geometry": {
            "x_a": geom.x_a,
            "feed_width": geom.feed_width,
            "arm_width": geom.arm_width,
            "squid_patches": [patch_fields(p) for p in geom.squid_patches],
            "gap_patches": [patch_fields(p) for p in geom.gap_patches],
        },
        "bias_phi": config.bias_phi,
    }


def config_from_dict(data: dict) -> ToolConfig:
    """Inverse of config_to_dict."""

    def patch(entry: dict) -> FluxPatch:
        return FluxPatch(entry["x1"], entry["x2"], entry["y1"], entry["y2"],
                         orientation=entry["orientation"])

    geometry = data["geometry"]
    return ToolConfig(
        design=SensorDesign(**data["design"]),
        pea=PeaConfig(**data["pea"]),
        geometry=BiasLineGeometry(
            x_a=geometry["x_a"],
            feed_width=geometry["feed_width"],
            arm_width=geometry["arm_width"],
            squid_patches=tuple(patch(p) for p in geometry["squid_patches"]),
            gap_patches=tuple(patch(p) for p in geometry["gap_patches"]),
        ),
        bias_phi=data["bias_phi"],
    )

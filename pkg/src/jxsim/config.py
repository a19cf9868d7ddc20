"""Experiment files: TOML configuration with bundled presets.

A configuration mirrors the physical layout: the network section, the two
pair sources with their spectral calibration, the channel wiring, loss and
detection factors, and the distinguishability scenario.  Widths and offsets
are wavelength FWHM values in nm; pair probabilities are dimensionless.
"""
from __future__ import annotations

import math
from importlib import resources
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

import numpy as np

from .errors import ConfigError
from .interference import SCENARIOS, ExperimentConfig
from .serialization import read_moduli_csv
from .source import ChannelWiring, SourceParams
from .spectral import build_gaussian_jsa, fwhm_nm_to_angular, grid_for_filters
from .unitary import LossConfig, jx_unitary, merge_amplitude_phase

PRESET_NAMES = ("paper-reference", "ideal")


def load_experiment_file(spec: str | Path) -> dict:
    """Parse a configuration from a path or a bundled preset name."""
    name = str(spec)
    if name in PRESET_NAMES:
        resource = resources.files("jxsim.presets").joinpath(name.replace("-", "_") + ".toml")
        text = resource.read_text()
        base = None
    else:
        path = Path(spec)
        if not path.exists():
            raise ConfigError(f"no such configuration file or preset: {spec}")
        text = path.read_text()
        base = path.parent
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed TOML in {spec}: {exc}") from exc
    raw["_base_dir"] = base
    return raw


def _section(raw: dict, name: str) -> dict:
    try:
        section = raw[name]
    except KeyError:
        raise ConfigError(f"configuration is missing the [{name}] section") from None
    if not isinstance(section, dict):
        raise ConfigError(f"[{name}] must be a table")
    return section


def _get(section: dict, key: str, kind, where: str):
    try:
        value = section[key]
    except KeyError:
        raise ConfigError(f"missing key {key!r} in [{where}]") from None
    if kind is float and isinstance(value, int):
        value = float(value)
    if not isinstance(value, kind):
        raise ConfigError(f"key {key!r} in [{where}] must be of type {kind.__name__}")
    return value


def build_config(raw: dict, scenario: str | None = None) -> ExperimentConfig:
    """Turn a parsed experiment file into a runnable configuration."""
    jsa_sec = _section(raw, "jsa")
    pump = _get(jsa_sec, "pump_fwhm_nm", float, "jsa")
    filt = _get(jsa_sec, "filter_fwhm_nm", float, "jsa")
    off_ab = _get(jsa_sec, "offset_ab_nm", float, "jsa")
    off_cd = _get(jsa_sec, "offset_cd_nm", float, "jsa")
    center = _get(jsa_sec, "center_wavelength_nm", float, "jsa")
    grid_size = int(jsa_sec.get("grid_size", 17))
    span = float(jsa_sec.get("grid_span_fwhm", 4.0))
    grid = grid_for_filters(
        filt,
        (off_ab / 2.0, -off_ab / 2.0, off_cd / 2.0, -off_cd / 2.0),
        center,
        size=grid_size,
        span_fwhm=span,
    )
    jsa_ab = build_gaussian_jsa(pump, filt, off_ab / 2.0, -off_ab / 2.0, center, grid)
    jsa_cd = build_gaussian_jsa(pump, filt, off_cd / 2.0, -off_cd / 2.0, center, grid)

    src_sec = _section(raw, "source")
    source = SourceParams(
        p_ab=_get(src_sec, "pair_probability_ab", float, "source"),
        p_cd=_get(src_sec, "pair_probability_cd", float, "source"),
        jsa_ab=jsa_ab,
        jsa_cd=jsa_cd,
        max_photons=int(src_sec.get("max_photons", 6)),
    )

    wiring_sec = raw.get("wiring", {})
    wiring = ChannelWiring(
        a=int(wiring_sec.get("a", 1)),
        b=int(wiring_sec.get("b", 7)),
        c=int(wiring_sec.get("c", 3)),
        d=int(wiring_sec.get("d", 5)),
    )

    unitary = _build_unitary(raw)
    n = unitary.shape[0]

    loss_sec = _section(raw, "loss")
    eta = loss_sec.get("eta")
    if eta is None:
        eta = [1.0] * n
    detection = loss_sec.get("detection")
    if detection is None:
        detection = [1.0] * n
    if len(eta) != n or len(detection) != n:
        raise ConfigError("loss.eta and loss.detection must list one value per mode")

    scen_sec = raw.get("scenario", {})
    scenario_name = scenario or scen_sec.get("name", "mutually-indistinguishable")
    if scenario_name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario_name!r}; expected one of {SCENARIOS}")
    tau = scen_sec.get("delay_ps")
    if tau is None:
        tau = 20.0 / fwhm_nm_to_angular(filt, center)

    caps = raw.get("caps", {})
    return ExperimentConfig(
        unitary=unitary,
        loss=LossConfig(tuple(float(e) for e in eta)),
        source=source,
        wiring=wiring,
        scenario=scenario_name,
        detection=tuple(float(k) for k in detection),
        distinguishing_delay=float(tau),
        max_transversal=int(caps.get("max_transversal", 1000)),
    )


def _build_unitary(raw: dict) -> np.ndarray:
    sec = _section(raw, "unitary")
    kind = _get(sec, "kind", str, "unitary")
    modes = int(sec.get("modes", 7))
    time = float(sec.get("evolution_time", math.pi / 2.0))
    ideal = jx_unitary(modes, time)
    if kind == "ideal":
        return ideal
    if kind == "merged":
        csv_path = _get(sec, "amplitude_csv", str, "unitary")
        if not sec.get("ideal_phases", True):
            raise ConfigError("only ideal phases are supported for merged unitaries")
        base = raw.get("_base_dir")
        path = Path(csv_path)
        if not path.is_absolute() and base is not None:
            path = Path(base) / path
        if not path.exists():
            raise ConfigError(f"amplitude CSV not found: {path}")
        moduli = read_moduli_csv(path.read_text())
        if moduli.shape != (modes, modes):
            raise ConfigError(f"amplitude CSV must be {modes}x{modes}")
        return merge_amplitude_phase(moduli, ideal)
    raise ConfigError(f"unknown unitary kind {kind!r}; expected 'ideal' or 'merged'")


def load_config(spec: str | Path, scenario: str | None = None) -> ExperimentConfig:
    return build_config(load_experiment_file(spec), scenario=scenario)

"""File formats: complex matrices and JSAs as JSON or CSV planes, count
matrices, and the CSV/JSON emitters behind the CLI.

All indices in these files are 1-based (mode 1 is the first waveguide), and
floats are written with shortest round-trip precision so identical runs
produce byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .errors import ConfigError
from .interference import (
    OutputDistribution,
    background_fraction,
    degree_of_violation,
    pattern_is_suppressed,
)
from .source import InputStateRecord
from .spectral import FrequencyGrid, SpectralAmplitude


def _fmt(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# complex matrices
# ---------------------------------------------------------------------------


def matrix_to_json(matrix: np.ndarray) -> str:
    """Nested arrays of [re, im] pairs, rows = output modes."""
    payload = [[[z.real, z.imag] for z in row] for row in np.asarray(matrix, complex)]
    return json.dumps({"rows": payload}, indent=2) + "\n"


def matrix_from_json(text: str) -> np.ndarray:
    data = json.loads(text)
    rows = data["rows"] if isinstance(data, dict) else data
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def matrix_planes_to_csv(matrix: np.ndarray) -> tuple[str, str]:
    """(amplitude plane, phase plane) as CSV text."""
    matrix = np.asarray(matrix, complex)
    amp = io.StringIO()
    phase = io.StringIO()
    for row in matrix:
        amp.write(",".join(_fmt(abs(z)) for z in row) + "\n")
        phase.write(",".join(_fmt(float(np.angle(z))) for z in row) + "\n")
    return amp.getvalue(), phase.getvalue()


def matrix_from_csv_planes(amplitude_text: str, phase_text: str) -> np.ndarray:
    amp = _read_float_rows(amplitude_text)
    phase = _read_float_rows(phase_text)
    if amp.shape != phase.shape:
        raise ConfigError("amplitude and phase planes differ in shape")
    return amp * np.exp(1j * phase)


def _read_float_rows(text: str) -> np.ndarray:
    rows = []
    for line in text.strip().splitlines():
        if not line.strip():
            continue
        rows.append([float(cell) for cell in line.split(",")])
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise ConfigError("malformed numeric CSV block")
    return np.array(rows)


def read_counts_csv(text: str) -> np.ndarray:
    """Count matrix with a header row naming the input modes."""
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    if len(lines) < 2:
        raise ConfigError("count CSV needs a header row plus data rows")
    header = lines[0].split(",")
    data = _read_float_rows("\n".join(lines[1:]))
    if data.shape[1] != len(header):
        raise ConfigError("count CSV rows do not match the header width")
    return data


def read_moduli_csv(text: str) -> np.ndarray:
    """Plain nonnegative amplitude plane (no header)."""
    data = _read_float_rows(text)
    if np.any(data < 0):
        raise ConfigError("amplitude moduli must be nonnegative")
    return data


# ---------------------------------------------------------------------------
# JSAs
# ---------------------------------------------------------------------------


def jsa_to_json(jsa: SpectralAmplitude) -> str:
    return json.dumps(
        {
            "frequencies_rad_per_ps": list(jsa.grid.points),
            "real": [[float(z.real) for z in row] for row in jsa.amps],
            "imag": [[float(z.imag) for z in row] for row in jsa.amps],
        },
        indent=2,
    ) + "\n"


def jsa_from_json(text: str) -> SpectralAmplitude:
    data = json.loads(text)
    grid = FrequencyGrid(tuple(data["frequencies_rad_per_ps"]))
    amps = np.array(data["real"]) + 1j * np.array(data["imag"])
    return SpectralAmplitude.from_amplitudes(grid, amps)


def jsa_planes_to_csv(jsa: SpectralAmplitude) -> tuple[str, str]:
    """(real plane, imaginary plane) as CSV text; first row is the grid."""
    header = ",".join(_fmt(p) for p in jsa.grid.points)
    real = [header] + [",".join(_fmt(z.real) for z in row) for row in jsa.amps]
    imag = [header] + [",".join(_fmt(z.imag) for z in row) for row in jsa.amps]
    return "\n".join(real) + "\n", "\n".join(imag) + "\n"


def jsa_from_csv_planes(real_text: str, imag_text: str) -> SpectralAmplitude:
    real_lines = real_text.strip().splitlines()
    imag_lines = imag_text.strip().splitlines()
    grid = FrequencyGrid(tuple(float(x) for x in real_lines[0].split(",")))
    real = _read_float_rows("\n".join(real_lines[1:]))
    imag = _read_float_rows("\n".join(imag_lines[1:]))
    return SpectralAmplitude.from_amplitudes(grid, real + 1j * imag)


# ---------------------------------------------------------------------------
# CLI payloads
# ---------------------------------------------------------------------------


def _pattern_str(pattern: tuple[int, ...]) -> str:
    return ",".join(str(m) for m in pattern)


def distribution_to_csv(dist: OutputDistribution) -> str:
    """One row per pattern: pattern, p_total, one column per foreground
    input state, then the aggregated background column."""
    foreground = [lab for lab in dist.labels if lab not in dist.background_labels]
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["pattern", "suppressed", "p_total"]
                    + [f"p_{lab}" for lab in foreground] + ["p_background"])
    for pattern in sorted(dist.probabilities):
        contrib = dist.contributions.get(pattern, {})
        bg = sum(contrib.get(lab, 0.0) for lab in dist.background_labels)
        writer.writerow(
            [_pattern_str(pattern), int(pattern_is_suppressed(pattern)), _fmt(dist.probabilities[pattern])]
            + [_fmt(contrib.get(lab, 0.0)) for lab in foreground]
            + [_fmt(bg)]
        )
    return out.getvalue()


def distribution_to_json(dist: OutputDistribution, scenario: str | None = None) -> str:
    foreground = [lab for lab in dist.labels if lab not in dist.background_labels]
    rows = []
    for pattern in sorted(dist.probabilities):
        contrib = dist.contributions.get(pattern, {})
        rows.append(
            {
                "pattern": list(pattern),
                "suppressed": pattern_is_suppressed(pattern),
                "p_total": dist.probabilities[pattern],
                "contributions": {lab: contrib.get(lab, 0.0) for lab in foreground},
                "p_background": sum(contrib.get(lab, 0.0) for lab in dist.background_labels),
            }
        )
    payload = {
        "fold": dist.fold,
        "modes": dist.mode_count,
        "scenario": scenario,
        "degree_of_violation": degree_of_violation(dist),
        "background_fraction": background_fraction(dist),
        "patterns": rows,
    }
    return json.dumps(payload, indent=2) + "\n"


def suppression_table_csv(patterns_with_flags) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["pattern", "suppressed"])
    for pattern, flag in patterns_with_flags:
        writer.writerow([_pattern_str(pattern), int(flag)])
    return out.getvalue()


def suppression_table_json(patterns_with_flags) -> str:
    rows = [{"pattern": list(p), "suppressed": bool(f)} for p, f in patterns_with_flags]
    return json.dumps({"patterns": rows}, indent=2) + "\n"


def table2_csv(records: list[InputStateRecord]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["channels_abcd", "N", "modes", "p_gen", "p_gen_norm"])
    for r in records:
        writer.writerow(
            [
                _pattern_str(r.channel_occupation),
                r.photon_count,
                _pattern_str(r.mode_occupation.counts),
                _fmt(r.p_gen),
                _fmt(r.p_gen_norm),
            ]
        )
    return out.getvalue()


def table2_json(records: list[InputStateRecord]) -> str:
    rows = [
        {
            "label": r.label,
            "channels_abcd": list(r.channel_occupation),
            "photons": r.photon_count,
            "modes": list(r.mode_occupation.counts),
            "p_gen": r.p_gen,
            "p_gen_norm": r.p_gen_norm,
        }
        for r in records
    ]
    return json.dumps({"states": rows}, indent=2) + "\n"


def scan_csv(points: list[tuple[float, float]]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["tau_ps", "probability"])
    for tau, p in points:
        writer.writerow([_fmt(tau), _fmt(p)])
    return out.getvalue()


def scan_json(points: list[tuple[float, float]]) -> str:
    rows = [{"tau_ps": tau, "probability": p} for tau, p in points]
    return json.dumps({"scan": rows}, indent=2) + "\n"

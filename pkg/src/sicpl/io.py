"""File ingestion: two-column decimal text with '#' comments, plus a
sidecar key-value metadata format.

Delimiters (comma, tab, whitespace) are auto-detected per line; lab CSVs
are rarely consistent.
"""

from __future__ import annotations

import os

import numpy as np

from .datatypes import DecayTrace, Spectrum
from .errors import ParseError, ValidationError

SIDECAR_KEYS = {
    "temperature_K",
    "power_mW",
    "band_center_nm",
    "band_width_nm",
    "pulse_time_ns",
    "polarization_deg",
    "label",
}


def _parse_two_column(path) -> list[tuple[float, float]]:
    if not os.path.exists(path):
        raise ParseError(f"file not found: {path}")
    rows = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.replace(",", " ").split()
            if len(parts) != 2:
                raise ParseError(f"{path}:{lineno}: expected 2 columns, got {len(parts)}")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-numeric value in {line!r}") from None
    if not rows:
        raise ParseError(f"{path}: no data rows")
    return rows


def load_sidecar(path) -> dict:
    """Read a `key = value` metadata file (documented schema keys only)."""
    if not os.path.exists(path):
        raise ParseError(f"file not found: {path}")
    meta = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParseError(f"{path}:{lineno}: expected key = value")
            key, val = (s.strip() for s in line.split("=", 1))
            if key not in SIDECAR_KEYS:
                raise ParseError(f"{path}:{lineno}: unknown metadata key {key!r}")
            meta[key] = val if key == "label" else float(val)
    return meta


def load_spectrum(path, metadata: dict | None = None) -> Spectrum:
    """Load a (wavelength_nm, counts) file into a validated Spectrum.

    Rows are sorted by wavelength if needed; exact duplicate wavelengths
    are rejected.
    """
    meta = dict(metadata or {})
    rows = sorted(_parse_two_column(path))
    wl = np.array([r[0] for r in rows])
    it = np.array([r[1] for r in rows])
    if np.any(np.diff(wl) == 0):
        raise ValidationError(f"{path}: duplicate wavelength values")
    return Spectrum(
        wavelengths=wl,
        intensities=it,
        temperature=float(meta.get("temperature_K", 4.0)),
        excitation_power=_opt(meta, "power_mW"),
        polarization_angle=_opt(meta, "polarization_deg"),
        label=str(meta.get("label", os.path.basename(str(path)))),
    )


def load_trace(path, metadata: dict | None = None) -> DecayTrace:
    """Load a (time_ns, counts) file into a validated DecayTrace.

    pulse_time_ns is required metadata (CLI flag or sidecar file).
    """
    meta = dict(metadata or {})
    if "pulse_time_ns" not in meta:
        raise ValidationError(f"{path}: pulse_time_ns metadata is required for traces")
    rows = _parse_two_column(path)
    t = np.array([r[0] for r in rows])
    c = np.array([r[1] for r in rows])
    return DecayTrace(
        times=t,
        counts=c,
        pulse_time=float(meta["pulse_time_ns"]),
        band_center=_opt(meta, "band_center_nm"),
        band_width=_opt(meta, "band_width_nm"),
        temperature=_opt(meta, "temperature_K"),
    )


def save_two_column(path, x, y, header: str = "") -> None:
    """Write two-column text, 9 significant digits (round-trip safe)."""
    with open(path, "w") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        for xi, yi in zip(np.asarray(x), np.asarray(y)):
            fh.write(f"{xi:.9g} {yi:.9g}\n")


def _opt(meta, key):
    return float(meta[key]) if key in meta else None

"""Core immutable data types shared by all analysis modules.

Conventions: vacuum wavelengths in nm, times in ns, temperatures in K,
intensities in (unitless) detector counts.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .constants import EV_NM
from .errors import DomainError, ValidationError


class Site(Enum):
    """Inequivalent silicon lattice sites in 4H SiC."""

    K_CUBIC = "k_cubic"
    H_HEXAGONAL = "h_hexagonal"


@dataclass(frozen=True)
class EnergyValue:
    """An energy with an explicit unit tag ('eV' or 'meV')."""

    value: float
    unit: str = "eV"

    def __post_init__(self):
        if self.unit not in ("eV", "meV"):
            raise ValidationError(f"unknown energy unit {self.unit!r}")
        if not np.isfinite(self.value):
            raise ValidationError("energy must be finite")

    def as_ev(self) -> float:
        return self.value if self.unit == "eV" else self.value * 1e-3

    def as_mev(self) -> float:
        return self.value if self.unit == "meV" else self.value * 1e3


def wavelength_to_energy(wavelength_nm: float) -> EnergyValue:
    """Convert a vacuum wavelength in nm to photon energy in eV."""
    if wavelength_nm <= 0:
        raise DomainError(f"wavelength must be positive, got {wavelength_nm}")
    return EnergyValue(EV_NM / wavelength_nm, "eV")


def energy_to_wavelength(energy: EnergyValue) -> float:
    """Inverse of :func:`wavelength_to_energy`; returns nm (vacuum)."""
    ev = energy.as_ev()
    if ev <= 0:
        raise DomainError(f"energy must be positive, got {ev} eV")
    return EV_NM / ev


@dataclass(frozen=True)
class Spectrum:
    """A wavelength-indexed intensity record with measurement metadata.

    wavelengths are strictly increasing vacuum values in nm; intensities
    are finite, non-negative counts.
    """

    wavelengths: np.ndarray
    intensities: np.ndarray
    temperature: float
    excitation_power: float | None = None
    polarization_angle: float | None = None
    label: str = ""

    def __post_init__(self):
        wl = np.asarray(self.wavelengths, dtype=float)
        it = np.asarray(self.intensities, dtype=float)
        if wl.ndim != 1 or it.shape != wl.shape:
            raise ValidationError("wavelengths and intensities must be 1-D and equal length")
        if wl.size < 2:
            raise ValidationError("spectrum needs at least 2 points")
        if not np.all(np.isfinite(wl)):
            raise ValidationError("non-finite wavelength")
        if np.any(np.diff(wl) <= 0):
            raise ValidationError("wavelengths must be strictly increasing")
        if not np.all(np.isfinite(it)):
            raise ValidationError("non-finite intensity")
        if np.any(it < 0):
            raise ValidationError("negative intensity")
        if not (self.temperature > 0):
            raise ValidationError(f"temperature must be > 0 K, got {self.temperature}")
        wl.setflags(write=False)
        it.setflags(write=False)
        object.__setattr__(self, "wavelengths", wl)
        object.__setattr__(self, "intensities", it)


@dataclass(frozen=True)
class DecayTrace:
    """Time-binned photon counts around an excitation pulse.

    times are strictly increasing with uniform bin width (1e-6 relative
    tolerance); counts are non-negative integers. At least 10 bins must
    precede pulse_time to serve as the background window.
    """

    times: np.ndarray
    counts: np.ndarray
    pulse_time: float
    band_center: float | None = None
    band_width: float | None = None
    temperature: float | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        c = np.asarray(self.counts, dtype=float)
        if t.ndim != 1 or c.shape != t.shape:
            raise ValidationError("times and counts must be 1-D and equal length")
        if t.size < 2:
            raise ValidationError("trace needs at least 2 bins")
        if not np.all(np.isfinite(t)):
            raise ValidationError("non-finite time")
        dt = np.diff(t)
        if np.any(dt <= 0):
            raise ValidationError("times must be strictly increasing")
        width = dt[0]
        if np.any(np.abs(dt - width) > 1e-6 * width):
            raise ValidationError("non-uniform bin width")
        if not np.all(np.isfinite(c)):
            raise ValidationError("non-finite counts")
        if np.any(c < 0):
            raise ValidationError("negative counts")
        if np.any(np.abs(c - np.round(c)) > 1e-9 * np.maximum(c, 1)):
            raise ValidationError("counts must be integer-valued")
        if np.count_nonzero(t < self.pulse_time) < 10:
            raise ValidationError("need at least 10 bins before pulse_time")
        t.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "counts", c)

    @property
    def bin_width(self) -> float:
        return float(self.times[1] - self.times[0])


@dataclass(frozen=True)
class SiteAssignment:
    """Crystalline-site assignment of a set of ZPLs, stored as data."""

    site: Site
    zpl_lines: tuple = field(default_factory=tuple)  # (label, wavelength_nm) pairs
    notes: str = ""

    def __post_init__(self):
        labels = [lab for lab, _ in self.zpl_lines]
        if len(set(labels)) != len(labels):
            raise ValidationError("duplicate ZPL labels")
        for lab, wl in self.zpl_lines:
            if not (1200.0 <= wl <= 1400.0):
                raise ValidationError(f"ZPL {lab!r} at {wl} nm outside 1200-1400 nm")
        object.__setattr__(self, "zpl_lines", tuple(self.zpl_lines))

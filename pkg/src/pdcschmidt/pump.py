"""Gaussian pump envelope, its spectrum, and validity margins of the broad-pump factorization."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dispersion import DispersionScales
from .phasematch import components

FS = 1e-15
# Margin below which the broad-pump factorization is flagged as marginal.
NPWPA_MARGIN = 4.0


@dataclass(frozen=True)
class PumpConfig:
    """Waist ``sigma_um`` at the exit face, duration ``tau_fs`` and gain ``gain``."""

    sigma_um: float
    tau_fs: float
    gain: float = 1e-3

    def __post_init__(self):
        if not (self.sigma_um > 0 and self.tau_fs > 0):
            raise ValueError("pump waist and duration must be positive")
        if not self.gain > 0:
            raise ValueError("gain must be positive")
        if self.gain > 0.1:
            warnings.warn(f"gain {self.gain} is outside the low-gain regime", stacklevel=2)

    @property
    def tau_s(self) -> float:
        return self.tau_fs * FS

    @property
    def delta_q(self) -> float:
        """Spectral half-width ``2/sigma`` (rad/um)."""
        return 2.0 / self.sigma_um

    @property
    def delta_omega(self) -> float:
        """Spectral half-width ``2/tau`` (rad/s)."""
        return 2.0 / self.tau_s

    def widths(self, dim: int) -> np.ndarray:
        """Envelope widths per spectral coordinate (um for q axes, s for the frequency axis)."""
        return np.array({3: [self.sigma_um, self.sigma_um, self.tau_s],
                         2: [self.sigma_um, self.sigma_um],
                         1: [self.tau_s]}[dim])


def envelope(xi, pump: PumpConfig, dim: int = 3):
    """``exp(-|x|^2/sigma^2) exp(-t^2/tau^2)`` with ``xi = (x, y, t)`` in um and fs."""
    x, y, t = components(xi, dim)
    return np.exp(-(x * x + y * y) / pump.sigma_um**2) * np.exp(-(t / pump.tau_fs) ** 2)


def spectrum(w, pump: PumpConfig, dim: int = 3):
    """Fourier transform of :func:`envelope` with the ``(2 pi)^{-D/2}`` convention.

    Each axis contributes ``(s/sqrt 2) exp(-k^2 s^2/4)``; in 3D the prefactor is
    ``sigma^2 tau / 2^{3/2}``.
    """
    s = pump.widths(dim)
    w = np.asarray(w, dtype=float)
    return np.prod(s / math.sqrt(2)) * np.exp(-np.sum((w * s) ** 2, axis=-1) / 4)


def pump_factor(pump: PumpConfig, dim: int) -> float:
    """``[int |A_p|^2]^2 / int |A_p|^4`` over D-dimensional direct space.

    Equal to ``pi^{D/2}`` times the product of the envelope widths, i.e.
    ``pi^{3/2} sigma^2 tau`` in 3D.
    """
    return math.pi ** (dim / 2) * float(np.prod(pump.widths(dim)))


def intensity_integral(pump: PumpConfig, dim: int, power: int = 2) -> float:
    """``int |A_p|^power d xi`` for the Gaussian envelope (SI-ish units: um, s)."""
    s = pump.widths(dim)
    return float(np.prod(s * math.sqrt(math.pi / power)))


def beta(pump: PumpConfig, scales: DispersionScales) -> float:
    """Pump focusing parameter ``dq_p^2 dOmega_p / (q0^2 Omega0)``."""
    return pump.delta_q**2 * pump.delta_omega / (scales.q0**2 * scales.omega0)


def pump_for_beta(b: float, scales: DispersionScales, split: float = 1.0,
                  gain: float = 1e-3) -> PumpConfig:
    """Pump whose focusing parameter equals ``b``.

    ``dq_p^2 = sqrt(b) q0^2 split`` and ``dOmega_p = sqrt(b) Omega0 / split``.
    """
    if not b > 0:
        raise ValueError("beta must be positive")
    dq = math.sqrt(math.sqrt(b) * split) * scales.q0
    dom = math.sqrt(b) * scales.omega0 / split
    return PumpConfig(sigma_um=2.0 / dq, tau_fs=2.0 / dom / FS, gain=gain)


@dataclass(frozen=True)
class NpwpaReport:
    satisfied: bool
    status: str
    time_margin: float
    space_margin: float
    beta: float


def npwpa_check(pump: PumpConfig, scales: DispersionScales,
                threshold: float = NPWPA_MARGIN) -> NpwpaReport:
    """Margins ``tau_p/tau_GVM`` and ``sigma_p/l_walkoff``.

    ``status`` is ``"ok"`` when both margins reach ``threshold``, ``"marginal"``
    when both exceed 1, otherwise ``"violated"``.  ``satisfied`` is False only
    for ``"violated"``.  Used for warnings; never gates a computation.
    """
    tm = pump.tau_fs / scales.tau_gvm_fs if scales.tau_gvm_fs > 0 else math.inf
    sm = pump.sigma_um / scales.l_walkoff_um if scales.l_walkoff_um > 0 else math.inf
    worst = min(tm, sm)
    status = "ok" if worst >= threshold else ("marginal" if worst > 1.0 else "violated")
    return NpwpaReport(status != "violated", status, tm, sm, beta(pump, scales))

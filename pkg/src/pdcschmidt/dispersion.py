"""
Sellmeier dispersion of a negative uniaxial crystal and the phase-matching
scales derived from it.

Conventions
-----------
Wavelengths are vacuum wavelengths in micrometers, transverse wavevectors in
rad/um, frequency offsets in rad/s, lengths in um unless a field name says
otherwise (``length_mm``, ``pump_wavelength_nm``).  Wavenumbers are returned in
rad/um, their first frequency derivatives in s/um and second derivatives in
s^2/um.

The signal is an ordinary wave at ``omega_p/2 + Omega``; the pump is an
extraordinary wave at ``omega_p + Omega_p`` propagating at ``theta_p`` from the
optic axis.  The pump longitudinal wavevector keeps the first-order walk-off
term and the paraxial diffraction term only; the signal longitudinal wavevector
is evaluated without the paraxial approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

C_UM_PER_S = 2.99792458e14

# Central-difference steps.
OMEGA_STEP = 1e12  # rad/s
THETA_STEP = 1e-4  # rad

WINDOW_UM = (0.4, 1.6)
# Frequency offsets are capped at this fraction of the degenerate frequency.
OMEGA_CAP = 0.9


class DispersionDomainError(ValueError):
    """Wavelength outside the transparency window of the Sellmeier set."""


class TuningError(RuntimeError):
    """The pump angle for the requested collinear mismatch could not be bracketed."""


@dataclass(frozen=True)
class SellmeierSet:
    """Coefficients of ``n^2 = A + B/(lambda^2 - C) - D*lambda^2`` (lambda in um)."""

    name: str
    ordinary: tuple[float, float, float, float]
    extraordinary: tuple[float, float, float, float]
    window: tuple[float, float] = WINDOW_UM


# K. Kato, IEEE J. Quantum Electron. 22, 1013 (1986).  With these coefficients
# collinear degenerate type-I matching at 527 nm falls at theta_p = 22.934 deg.
BBO_KATO = SellmeierSet(
    name="bbo_kato1986",
    ordinary=(2.7359, 0.01878, 0.01822, 0.01354),
    extraordinary=(2.3753, 0.01224, 0.01667, 0.01516),
)

# D. Eimerl et al., J. Appl. Phys. 62, 1968 (1987).
BBO_EIMERL = SellmeierSet(
    name="bbo_eimerl1987",
    ordinary=(2.7405, 0.0184, 0.0179, 0.0155),
    extraordinary=(2.3730, 0.0128, 0.0156, 0.0044),
)

SELLMEIER_SETS = {s.name: s for s in (BBO_KATO, BBO_EIMERL)}


def _check_window(lam, window):
    lam = np.asarray(lam, dtype=float)
    lo, hi = window
    bad = (lam < lo) | (lam > hi) | ~np.isfinite(lam)
    if np.any(bad):
        first = lam[bad].flat[0] if lam.ndim else float(lam)
        raise DispersionDomainError(
            f"wavelength {first:.6g} um outside transparency window [{lo}, {hi}] um"
        )
    return lam


def _n_squared(lam, coeffs):
    a, b, c, d = coeffs
    lam2 = lam * lam
    return a + b / (lam2 - c) - d * lam2


def n_ordinary(lam_um, sellmeier: SellmeierSet = BBO_KATO, check: bool = True):
    """Ordinary index at vacuum wavelength ``lam_um``."""
    lam = _check_window(lam_um, sellmeier.window) if check else np.asarray(lam_um, float)
    return np.sqrt(_n_squared(lam, sellmeier.ordinary))


def n_extraordinary_principal(lam_um, sellmeier: SellmeierSet = BBO_KATO, check: bool = True):
    lam = _check_window(lam_um, sellmeier.window) if check else np.asarray(lam_um, float)
    return np.sqrt(_n_squared(lam, sellmeier.extraordinary))


def n_extraordinary(lam_um, theta, sellmeier: SellmeierSet = BBO_KATO, check: bool = True):
    """Index of the extraordinary wave whose wavevector makes angle ``theta`` (rad)
    with the optic axis (index ellipse)."""
    no = n_ordinary(lam_um, sellmeier, check)
    ne = n_extraordinary_principal(lam_um, sellmeier, check)
    ct, st = np.cos(theta), np.sin(theta)
    return 1.0 / np.sqrt(ct * ct / (no * no) + st * st / (ne * ne))


@dataclass(frozen=True)
class CrystalConfig:
    """Crystal and pump-carrier description.

    Exactly one of ``theta_deg`` and ``delta0_lc`` is given; the other is
    derived by :class:`Crystal`.
    """

    length_mm: float = 4.0
    pump_wavelength_nm: float = 527.0
    theta_deg: float | None = None
    delta0_lc: float | None = 0.0
    sellmeier: SellmeierSet = BBO_KATO

    def __post_init__(self):
        if not self.length_mm > 0:
            raise ValueError(f"crystal length must be positive, got {self.length_mm}")
        lo, hi = self.sellmeier.window
        lam = self.pump_wavelength_nm * 1e-3
        if not lo <= lam <= hi:
            raise DispersionDomainError(f"pump wavelength {lam} um outside [{lo}, {hi}] um")
        if (self.theta_deg is None) == (self.delta0_lc is None):
            raise ValueError("set exactly one of theta_deg and delta0_lc")

    @classmethod
    def collinear(cls, **kw) -> "CrystalConfig":
        return cls(theta_deg=None, delta0_lc=0.0, **kw)

    @property
    def length_um(self) -> float:
        return self.length_mm * 1e3


@dataclass(frozen=True)
class DispersionScales:
    """Phase-matching scales at degeneracy.

    ``k_s1``/``k_p1`` are group delays per length (s/um), ``k_s2``/``k_p2`` the
    group-velocity dispersion (s^2/um).  ``rho`` is the pump walk-off angle
    (rad), positive when the pump Poynting vector leans towards +x.
    """

    length_um: float
    theta_p: float
    omega_p: float
    k_s: float
    k_s1: float
    k_s2: float
    k_p: float
    k_p1: float
    k_p2: float
    rho: float
    delta0_lc: float

    @property
    def q0(self) -> float:
        return math.sqrt(self.k_s / self.length_um)

    @property
    def omega0(self) -> float:
        return math.sqrt(1.0 / (self.k_s2 * self.length_um))

    @property
    def gvm_s(self) -> float:
        """Signed signal/pump group delay difference accumulated over the crystal (s)."""
        return (self.k_s1 - self.k_p1) * self.length_um

    @property
    def tau_gvm_fs(self) -> float:
        return abs(self.gvm_s) * 1e15

    @property
    def l_walkoff_um(self) -> float:
        return abs(self.rho) * self.length_um

    @property
    def gvd_fs2_per_um(self) -> float:
        return self.k_s2 * 1e30


class Crystal:
    """Dispersion evaluator bound to one :class:`CrystalConfig`.

    The pump angle is solved on construction when the config gives the
    collinear mismatch instead of the angle.
    """

    def __init__(self, config: CrystalConfig, omega_step: float = OMEGA_STEP,
                 theta_step: float = THETA_STEP):
        self.config = config
        self.sellmeier = config.sellmeier
        self.length_um = config.length_um
        self.omega_p = 2 * math.pi * C_UM_PER_S / (config.pump_wavelength_nm * 1e-3)
        self.omega_step = omega_step
        self.theta_step = theta_step
        if config.theta_deg is not None:
            self.theta_p = math.radians(config.theta_deg)
        else:
            self.theta_p = self._solve_theta(config.delta0_lc)

    # wavenumbers -----------------------------------------------------------

    def k_signal(self, omega, check: bool = True):
        """Ordinary signal wavenumber at ``omega_p/2 + omega``."""
        w = self.omega_p / 2 + np.asarray(omega, dtype=float)
        if check:
            self._check_cap(omega)
        return n_ordinary(2 * math.pi * C_UM_PER_S / w, self.sellmeier, check) * w / C_UM_PER_S

    def k_pump(self, omega_p, theta=None, check: bool = True):
        """Extraordinary pump wavenumber at ``omega_p + omega_p_offset``."""
        theta = self.theta_p if theta is None else theta
        w = self.omega_p + np.asarray(omega_p, dtype=float)
        lam = 2 * math.pi * C_UM_PER_S / w
        return n_extraordinary(lam, theta, self.sellmeier, check) * w / C_UM_PER_S

    def _check_cap(self, omega):
        if np.any(np.abs(omega) >= OMEGA_CAP * self.omega_p / 2):
            raise DispersionDomainError(
                f"|Omega| must stay below {OMEGA_CAP} * omega_p/2 = {OMEGA_CAP * self.omega_p / 2:.4g} rad/s"
            )

    def in_domain(self, omega):
        """Mask of signal offsets whose wavelength lies in the Sellmeier window."""
        omega = np.asarray(omega, dtype=float)
        w = self.omega_p / 2 + omega
        with np.errstate(divide="ignore"):
            lam = 2 * math.pi * C_UM_PER_S / w
        lo, hi = self.sellmeier.window
        return (np.abs(omega) < OMEGA_CAP * self.omega_p / 2) & (lam >= lo) & (lam <= hi)

    def pump_in_domain(self, omega_p):
        omega_p = np.asarray(omega_p, dtype=float)
        w = self.omega_p + omega_p
        with np.errstate(divide="ignore"):
            lam = 2 * math.pi * C_UM_PER_S / w
        lo, hi = self.sellmeier.window
        return (w > 0) & (lam >= lo) & (lam <= hi)

    # longitudinal components -----------------------------------------------

    def kz_signal(self, qx, qy, omega, check: bool = True):
        """Longitudinal signal wavevector; NaN flags evanescent modes."""
        k = self.k_signal(omega, check)
        arg = k * k - np.asarray(qx) ** 2 - np.asarray(qy) ** 2
        with np.errstate(invalid="ignore"):
            return np.where(arg >= 0, np.sqrt(np.maximum(arg, 0.0)), np.nan)

    def kz_pump(self, qx, qy, omega_p, check: bool = True):
        """Longitudinal pump wavevector with first-order walk-off and paraxial diffraction."""
        k = self.k_pump(omega_p, check=check)
        q2 = np.asarray(qx) ** 2 + np.asarray(qy) ** 2
        kz = k - self.rho * np.asarray(qx) - q2 / (2 * k)
        with np.errstate(invalid="ignore"):
            return np.where(q2 <= k * k, kz, np.nan)

    # derived quantities ----------------------------------------------------

    @cached_property
    def rho(self) -> float:
        h = self.theta_step
        dk = (self.k_pump(0.0, self.theta_p + h) - self.k_pump(0.0, self.theta_p - h)) / (2 * h)
        return float(-dk / self.k_pump(0.0))

    def _derivs(self, fn, h):
        f0, fp, fm = fn(0.0), fn(h), fn(-h)
        return float(f0), float((fp - fm) / (2 * h)), float((fp - 2 * f0 + fm) / (h * h))

    def scales(self, omega_step: float | None = None) -> DispersionScales:
        h = self.omega_step if omega_step is None else omega_step
        ks, ks1, ks2 = self._derivs(self.k_signal, h)
        kp, kp1, kp2 = self._derivs(self.k_pump, h)
        return DispersionScales(
            length_um=self.length_um,
            theta_p=self.theta_p,
            omega_p=self.omega_p,
            k_s=ks, k_s1=ks1, k_s2=ks2,
            k_p=kp, k_p1=kp1, k_p2=kp2,
            rho=self.rho,
            delta0_lc=(2 * ks - kp) * self.length_um,
        )

    def _solve_theta(self, delta0_lc: float) -> float:
        ks = float(self.k_signal(0.0))

        def mismatch(theta):
            return (2 * ks - float(self.k_pump(0.0, theta))) * self.length_um - delta0_lc

        lo, hi = 1e-6, math.pi / 2
        flo, fhi = mismatch(lo), mismatch(hi)
        if flo * fhi > 0:
            raise TuningError(
                f"no pump angle in [{lo:.2g}, {hi:.4g}] rad gives delta0_lc = {delta0_lc}: "
                f"mismatch spans [{min(flo, fhi):.4g}, {max(flo, fhi):.4g}]"
            )
        return brentq(mismatch, lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)


def derive_scales(crystal: CrystalConfig | Crystal) -> DispersionScales:
    if isinstance(crystal, CrystalConfig):
        crystal = Crystal(crystal)
    return crystal.scales()


def kz_signal(q, omega, crystal: Crystal):
    """``q`` is a pair (qx, qy); see :meth:`Crystal.kz_signal`."""
    return crystal.kz_signal(q[0], q[1], omega)


def kz_pump(q_p, omega_p, crystal: Crystal):
    return crystal.kz_pump(q_p[0], q_p[1], omega_p)


def with_theta(config: CrystalConfig, theta_deg: float) -> CrystalConfig:
    return replace(config, theta_deg=theta_deg, delta0_lc=None)

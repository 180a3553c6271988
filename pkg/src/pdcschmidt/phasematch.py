"""
Phase mismatch, the phase-matching amplitude V and integrals of |V|^n over a
collected spectral region.

Spectral points are arrays whose last axis holds the coordinates present in the
model: ``(qx, qy, Omega)`` in 3D, ``(qx, qy)`` in 2D and ``(Omega,)`` in 1D.

Sign convention: the quadratic mismatch is ``d0 - q^2/q0^2 + Omega^2/Omega0^2``
in every dimension.  The reduced 1D/2D forms with the opposite overall sign give
the same ``|V|^2`` because only ``Delta^2`` enters it.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import IntegrationWarning, quad
from scipy.special import sici

from .dispersion import Crystal, DispersionScales

ALPHA_DEFAULT = 1.5 * math.pi


class NonPropagatingError(ValueError):
    """A spectral point corresponds to an evanescent or out-of-window mode."""


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class SpectralPoint:
    """A single point ``w = (q, Omega)``; unused components are ``None``."""

    q: tuple[float, float] | None = None
    omega: float | None = None

    def __post_init__(self):
        if self.q is None and self.omega is None:
            raise ValueError("a spectral point needs q, omega or both")

    @property
    def dim(self) -> int:
        return (2 if self.q is not None else 0) + (1 if self.omega is not None else 0)

    def array(self) -> np.ndarray:
        parts = []
        if self.q is not None:
            parts.extend(self.q)
        if self.omega is not None:
            parts.append(self.omega)
        return np.asarray(parts, dtype=float)


def components(w, dim: int):
    """Split ``w[..., dim]`` into ``(qx, qy, omega)``; absent parts are zeros."""
    w = np.asarray(w, dtype=float)
    if w.shape[-1] != dim:
        raise ValueError(f"expected last axis of length {dim}, got {w.shape}")
    zero = np.zeros(w.shape[:-1])
    if dim == 3:
        return w[..., 0], w[..., 1], w[..., 2]
    if dim == 2:
        return w[..., 0], w[..., 1], zero
    if dim == 1:
        return zero, zero, w[..., 0]
    raise ValueError(f"dimension must be 1, 2 or 3, got {dim}")


def sinc(x):
    """``sin(x)/x`` with a series branch near 0."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 1e-4
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 - x * x / 6.0, np.sin(safe) / safe)


def amplitude_from_delta(delta):
    """``sinc(Delta/2) exp(i Delta/2)``; NaN (non-propagating) maps to 0."""
    delta = np.asarray(delta, dtype=float)
    bad = ~np.isfinite(delta)
    d = np.where(bad, 0.0, delta) / 2
    v = sinc(d) * np.exp(1j * d)
    return np.where(bad, 0.0, v)


def chi_box(x, alpha: float = ALPHA_DEFAULT):
    """Top hat of height ``pi/alpha`` on ``(-alpha/2, alpha/2)``; same integral as sinc^2."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) < alpha / 2, math.pi / alpha, 0.0)


# ---------------------------------------------------------------------------
# phase-matching models


@dataclass(frozen=True)
class QuadraticPhaseMatch:
    """Second-order expansion of the mismatch about degeneracy.

    With ``w_minus = (w1 - w2)/2`` and ``w_p = w1 + w2``::

        Delta = d0 - |q_minus|^2/q0^2 + Omega_minus^2/Omega0^2
                + gvm_s*Omega_p + walkoff_um*q_px
                + curv_omega*Omega_p^2 + curv_q*|q_p|^2

    The pump-coordinate terms default to zero; :meth:`from_scales` fills them
    from the dispersion so the expansion is the full Taylor polynomial.  On the
    diagonal ``w2 = -w1`` only the first line survives.
    """

    q0: float
    omega0: float
    delta0_lc: float = 0.0
    gvm_s: float = 0.0
    walkoff_um: float = 0.0
    curv_omega: float = 0.0
    curv_q: float = 0.0

    def __post_init__(self):
        if not (self.q0 > 0 and self.omega0 > 0):
            raise ValueError("q0 and omega0 must be positive")

    @classmethod
    def from_scales(cls, scales: DispersionScales, pump_coupling: bool = True,
                    delta0_lc: float | None = None):
        d0 = scales.delta0_lc if delta0_lc is None else delta0_lc
        if not pump_coupling:
            return cls(scales.q0, scales.omega0, d0)
        L = scales.length_um
        return cls(
            q0=scales.q0,
            omega0=scales.omega0,
            delta0_lc=d0,
            gvm_s=scales.gvm_s,
            walkoff_um=scales.rho * L,
            curv_omega=(scales.k_s2 / 4 - scales.k_p2 / 2) * L,
            curv_q=(1 / (2 * scales.k_p) - 1 / (4 * scales.k_s)) * L,
        )

    @property
    def coupled(self) -> bool:
        return any((self.gvm_s, self.walkoff_um, self.curv_omega, self.curv_q))

    def delta_diag(self, w, dim: int):
        qx, qy, om = components(w, dim)
        return self.delta0_lc - (qx * qx + qy * qy) / self.q0**2 + (om / self.omega0) ** 2

    def delta(self, w1, w2, dim: int, strict: bool = True):
        qx1, qy1, om1 = components(w1, dim)
        qx2, qy2, om2 = components(w2, dim)
        mx, my, mo = (qx1 - qx2) / 2, (qy1 - qy2) / 2, (om1 - om2) / 2
        d = self.delta0_lc - (mx * mx + my * my) / self.q0**2 + (mo / self.omega0) ** 2
        if self.coupled:
            px, py, po = qx1 + qx2, qy1 + qy2, om1 + om2
            d = d + self.gvm_s * po + self.walkoff_um * px
            d = d + self.curv_omega * po * po + self.curv_q * (px * px + py * py)
        return d

    def v(self, w1, w2, dim: int):
        return amplitude_from_delta(self.delta(w1, w2, dim))

    def v_diag(self, w, dim: int):
        return amplitude_from_delta(self.delta_diag(w, dim))


class ExactPhaseMatch:
    """Mismatch from the Sellmeier wavevectors.  Missing coordinates of the
    reduced models are set to zero (``Omega = 0`` in 2D, ``q = 0`` in 1D)."""

    def __init__(self, crystal: Crystal):
        self.crystal = crystal
        self.scales = crystal.scales()

    @property
    def q0(self):
        return self.scales.q0

    @property
    def omega0(self):
        return self.scales.omega0

    @property
    def delta0_lc(self):
        return self.scales.delta0_lc

    def delta(self, w1, w2, dim: int, strict: bool = True):
        cr = self.crystal
        qx1, qy1, om1 = components(w1, dim)
        qx2, qy2, om2 = components(w2, dim)
        qxp, qyp, omp = qx1 + qx2, qy1 + qy2, om1 + om2
        if strict:
            d = (cr.kz_signal(qx1, qy1, om1) + cr.kz_signal(qx2, qy2, om2)
                 - cr.kz_pump(qxp, qyp, omp)) * cr.length_um
            if np.any(np.isnan(d)):
                raise NonPropagatingError("evanescent signal or pump component")
            return d
        ok = cr.in_domain(om1) & cr.in_domain(om2) & cr.pump_in_domain(omp)
        o1, o2, op = (np.where(ok, o, 0.0) for o in (om1, om2, omp))
        with np.errstate(invalid="ignore"):
            d = (cr.kz_signal(qx1, qy1, o1, check=False) + cr.kz_signal(qx2, qy2, o2, check=False)
                 - cr.kz_pump(qxp, qyp, op, check=False)) * cr.length_um
        return np.where(ok, d, np.nan)

    def delta_diag(self, w, dim: int, strict: bool = False):
        w = np.asarray(w, dtype=float)
        return self.delta(w, -w, dim, strict=strict)

    def v(self, w1, w2, dim: int):
        return amplitude_from_delta(self.delta(w1, w2, dim, strict=False))

    def v_diag(self, w, dim: int):
        return amplitude_from_delta(self.delta_diag(w, dim))


class ConstantAmplitude:
    """``V == 1``; test hook for which the factorized formula is exact."""

    def v(self, w1, w2, dim: int):
        return np.ones(np.shape(w1)[:-1], dtype=complex)

    def v_diag(self, w, dim: int):
        return np.ones(np.shape(w)[:-1], dtype=complex)


@dataclass(frozen=True)
class GaussianAmplitude:
    """``V = exp(-sum((w1 - w2)_i / width_i)^2)``; test hook with smooth, resolvable shape."""

    width: tuple[float, ...]

    def v(self, w1, w2, dim: int):
        b = np.broadcast_to(np.asarray(self.width, float), (dim,))
        d = (np.asarray(w1) - np.asarray(w2)) / b
        return np.exp(-np.sum(d * d, axis=-1)).astype(complex)

    def v_diag(self, w, dim: int):
        w = np.asarray(w, dtype=float)
        return self.v(w, -w, dim)


def make_quadratic(scales: DispersionScales, **kw) -> QuadraticPhaseMatch:
    return QuadraticPhaseMatch.from_scales(scales, **kw)


# ---------------------------------------------------------------------------
# collected region


@dataclass(frozen=True)
class BandwidthLimits:
    """Disk ``|q| <= q_max`` crossed with ``|Omega| <= omega_max``."""

    q_max: float = math.inf
    omega_max: float = math.inf

    def __post_init__(self):
        if self.q_max < 0 or self.omega_max < 0:
            raise ValueError("bandwidth limits must be non-negative")

    @classmethod
    def normalized(cls, qbar: float = math.inf, omegabar: float = math.inf, *,
                   q0: float, omega0: float) -> "BandwidthLimits":
        return cls(qbar * q0, omegabar * omega0)

    def volume(self, dim: int) -> float:
        if dim == 3:
            return math.pi * self.q_max**2 * 2 * self.omega_max
        if dim == 2:
            return math.pi * self.q_max**2
        return 2 * self.omega_max

    def contains(self, w, dim: int):
        qx, qy, om = components(w, dim)
        inside = np.ones(np.shape(qx), dtype=bool)
        if dim >= 2:
            inside &= qx * qx + qy * qy <= self.q_max**2
        if dim != 2:
            inside &= np.abs(om) <= self.omega_max
        return inside

    def bounding_box(self, dim: int):
        """Per-coordinate (lo, hi) of the smallest box holding the region."""
        q, o = self.q_max, self.omega_max
        return {3: [(-q, q), (-q, q), (-o, o)], 2: [(-q, q), (-q, q)], 1: [(-o, o)]}[dim]


# ---------------------------------------------------------------------------
# integrals of |V|^n over the region


def _si(x):
    return sici(x)[0]


def _sinc2_antideriv(x):
    """Integral of sinc^2 from 0 to x."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    inf = np.isinf(x)
    small = (np.abs(x) < 1e-2) & ~inf
    big = ~small & ~inf
    xs = x[small]
    out[small] = xs - xs**3 / 9 + 2 * xs**5 / 225 - xs**7 / 2205
    xb = x[big]
    out[big] = _si(2 * xb) - np.sin(xb) ** 2 / xb
    out[inf] = np.sign(x[inf]) * math.pi / 2
    return out


def _sinc4_antideriv(x):
    """Integral of sinc^4 from 0 to x."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    inf = np.isinf(x)
    small = (np.abs(x) < 5e-2) & ~inf
    big = ~small & ~inf
    xs = x[small]
    out[small] = xs - 2 * xs**3 / 9 + xs**5 / 25 - 34 * xs**7 / 6615 + 62 * xs**9 / 127575
    xb = x[big]
    s, c = np.sin(xb), np.cos(xb)
    out[big] = (-2 * _si(2 * xb) / 3 + 4 * _si(4 * xb) / 3 + 8 * s**4 / (3 * xb)
                - 2 * s**2 / xb - 2 * s**3 * c / (3 * xb**2) - s**4 / (3 * xb**3))
    out[inf] = np.sign(x[inf]) * math.pi / 3
    return out


def _profile(kind: str, alpha: float):
    """Return (g, G) where g(x) is the profile as a function of x = Delta/2 and
    G is an antiderivative of g."""
    if kind == "sinc2":
        return (lambda x: sinc(x) ** 2), _sinc2_antideriv
    if kind == "sinc4":
        return (lambda x: sinc(x) ** 4), _sinc4_antideriv
    if kind in ("box", "box2"):
        h = math.pi / alpha if kind == "box" else (math.pi / alpha) ** 2

        def G(x):
            return h * np.clip(np.asarray(x, dtype=float), -alpha / 2, alpha / 2)

        return (lambda x: np.where(np.abs(x) < alpha / 2, h, 0.0)), G
    raise ValueError(f"unknown profile {kind!r}")


def _check_quad(result, err, tol, what):
    if not np.isfinite(result) or err > tol * max(abs(result), 1e-300):
        raise QuadratureError(f"{what}: quadrature reached only relative error {err / max(abs(result), 1e-300):.3g}")
    return result


def _quad(f, a, b, what, points=None, epsrel=1e-10, tol=1e-6, limit=2000):
    kw = dict(epsabs=0.0, epsrel=epsrel, limit=limit)
    if points is not None and np.isfinite(a) and np.isfinite(b):
        pts = [p for p in points if a < p < b]
        if pts:
            kw["points"] = sorted(set(pts))
    # The explicit error check below is what decides success.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(f, a, b, **kw)
    return _check_quad(val, err, tol, what)


def _quadratic_integral(model: QuadraticPhaseMatch, limits: BandwidthLimits, dim: int,
                        kind: str, alpha: float) -> float:
    g, G = _profile(kind, alpha)
    d0 = model.delta0_lc
    q0, om0 = model.q0, model.omega0
    qbar2 = (limits.q_max / q0) ** 2
    obar = limits.omega_max / om0

    def radial(c):
        # integral over u = qbar^2 in [0, qbar2] of g((c - u)/2)
        return 2.0 * (G(np.asarray(c) / 2) - G((np.asarray(c) - qbar2) / 2))

    if dim == 2:
        return float(math.pi * q0**2 * radial(d0))

    if dim == 1:
        kinks = [math.sqrt(max(0.0, v)) for v in (alpha - d0, -alpha - d0) if v > 0] if kind.startswith("box") else None
        if math.isinf(obar):
            val = _quad(lambda x: g((d0 + x * x) / 2), 0.0, math.inf, "1D |V|^n integral")
        else:
            val = _quad(lambda x: g((d0 + x * x) / 2), 0.0, obar, "1D |V|^n integral", points=kinks)
        return 2.0 * om0 * val

    if math.isinf(obar):
        raise QuadratureError("3D integral over an unbounded frequency range diverges")
    pts = []
    for edge in (alpha, -alpha):
        for shift in (0.0, qbar2):
            v = edge - d0 + shift
            if v > 0:
                pts.append(math.sqrt(v))
    val = _quad(lambda x: float(radial(d0 + x * x)), 0.0, obar, "3D |V|^n integral", points=pts)
    return float(2.0 * math.pi * q0**2 * om0 * val)


def _gl_panels(fun, a, b, panels, order=16):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return float(np.sum(fun(nodes) * weights))


def _panel_quad(fun, a, b, panels, what, tol=1e-7):
    coarse = _gl_panels(fun, a, b, panels)
    fine = _gl_panels(fun, a, b, 2 * panels)
    if abs(fine - coarse) > tol * max(abs(fine), 1e-300):
        raise QuadratureError(f"{what}: panel quadrature change {abs(fine - coarse) / abs(fine):.3g}")
    return fine


def _exact_integral(model: ExactPhaseMatch, limits: BandwidthLimits, dim: int,
                    kind: str, alpha: float) -> float:
    g, _ = _profile(kind, alpha)
    q0, om0 = model.q0, model.omega0
    if dim >= 2 and math.isinf(limits.q_max):
        raise QuadratureError("the exact model needs a finite q_max")
    if dim != 2 and math.isinf(limits.omega_max):
        raise QuadratureError("the exact model needs a finite omega_max")

    def f_of(qr, om):
        qr, om = np.broadcast_arrays(np.asarray(qr, float), np.asarray(om, float))
        if dim == 3:
            w = np.stack([qr, np.zeros_like(qr), om], axis=-1)
        elif dim == 2:
            w = np.stack([qr, np.zeros_like(qr)], axis=-1)
        else:
            w = om[..., None]
        d = model.delta_diag(w, dim)
        return np.where(np.isfinite(d), g(np.where(np.isfinite(d), d, 0.0) / 2), 0.0)

    if dim == 1:
        obar = limits.omega_max / om0
        panels = max(64, int(8 * obar**2))
        return 2.0 * _panel_quad(lambda o: f_of(0.0, o), 0.0, limits.omega_max, panels, "exact 1D")

    umax = limits.q_max**2
    panels = max(64, int(8 * umax / q0**2))

    def radial(om):
        return math.pi * _panel_quad(lambda u: f_of(np.sqrt(u), om), 0.0, umax, panels, "exact radial")

    if dim == 2:
        return radial(0.0)
    val = _quad(lambda o: radial(o), 0.0, limits.omega_max, "exact 3D outer", epsrel=1e-8)
    return 2.0 * val


def v_integral(model, limits: BandwidthLimits, dim: int, kind: str = "sinc2",
               alpha: float = ALPHA_DEFAULT) -> float:
    """Integral over the collected region of ``g(Delta(w, -w)/2)``.

    ``kind`` is ``"sinc2"`` (|V|^2), ``"sinc4"`` (|V|^4), ``"box"`` (chi_alpha)
    or ``"box2"`` (chi_alpha^2).  The box kinds need the quadratic model.
    """
    if isinstance(model, QuadraticPhaseMatch):
        if model.coupled:
            model = QuadraticPhaseMatch(model.q0, model.omega0, model.delta0_lc)
        return _quadratic_integral(model, limits, dim, kind, alpha)
    if kind.startswith("box"):
        raise ValueError("the box surrogate is defined for the quadratic model only")
    if isinstance(model, ExactPhaseMatch):
        return _exact_integral(model, limits, dim, kind, alpha)
    if isinstance(model, ConstantAmplitude):
        return limits.volume(dim)
    raise TypeError(f"no deterministic integral for {type(model).__name__}")


def pm_volume(model, limits: BandwidthLimits, dim: int, surrogate: str = "sinc2",
              alpha: float = ALPHA_DEFAULT) -> float:
    """Volume of the phase-matching region: integral of sinc^2(Delta/2) or chi_alpha(Delta/2)."""
    if surrogate not in ("sinc2", "box"):
        raise ValueError("surrogate must be 'sinc2' or 'box'")
    return v_integral(model, limits, dim, surrogate, alpha)


def integrate_profile(fun: Callable, lo: float, hi: float) -> float:
    """Adaptive 1D quadrature used by the numeric constant checks."""
    return _quad(fun, lo, hi, "profile integral", limit=5000)

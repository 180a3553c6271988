"""
Schmidt number K = N^2/B of the low-gain PDC biphoton.

Three routes:

* ``schmidt_mc`` integrates N (2D-fold) and B (4D-fold) by importance sampling.
* ``schmidt_npwpa_integral`` uses the broad-pump factorization
  ``K = F_pump * [int |V|^2]^2 / ((2 pi)^D int |V|^4)``.
* ``schmidt_analytic`` evaluates the box-function closed forms.

The amplitude used throughout is ``psi(w1, w2) = A_p(w1 + w2) V(w1, w2)`` with
the constant ``g (2 pi)^{-3/2}`` dropped; it cancels in K.

Collected region: the detection limits restrict the signal coordinate ``w1``
that is sampled uniformly; partner coordinates are integrated over their full
support.  With this convention the factorized formula is exact for constant V.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, replace
from typing import Any, Sequence

import numpy as np

from . import mc
from .dispersion import Crystal, CrystalConfig, DispersionScales
from .phasematch import (
    ALPHA_DEFAULT,
    BandwidthLimits,
    ConstantAmplitude,
    ExactPhaseMatch,
    QuadraticPhaseMatch,
    v_integral,
)
from .pump import NpwpaReport, PumpConfig, npwpa_check, pump_factor, pump_for_beta, spectrum

METHODS = ("mc_exact", "npwpa_integral", "analytic_box")
# q limit standing in for "no spatial cutoff", in units of sqrt(max(alpha, omegabar^2)) q0.
Q_SURROGATE = 3.0


class SchmidtError(RuntimeError):
    pass


@dataclass(frozen=True)
class McParams:
    samples_n: int = 2_000_000
    samples_b: int = 10_000_000
    seed: int = 1
    shards: int = 8
    workers: int = 1


@dataclass
class ModelSpec:
    """Everything needed to evaluate one Schmidt number.

    ``phasematch`` is ``"quadratic"`` or ``"exact"``, or any object exposing
    ``v(w1, w2, dim)`` and ``v_diag(w, dim)`` (test hooks).
    """

    dimension: int
    crystal: CrystalConfig
    pump: PumpConfig
    limits: BandwidthLimits
    phasematch: Any = "quadratic"
    method: str = "mc_exact"
    alpha: float = ALPHA_DEFAULT
    pump_coupling: bool = True

    def __post_init__(self):
        if self.dimension not in (1, 2, 3):
            raise ValueError(f"dimension must be 1, 2 or 3, got {self.dimension}")
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if self.method == "analytic_box" and self.phasematch != "quadratic":
            raise ValueError("analytic_box requires the quadratic phase-matching model; "
                             "use npwpa_integral for the exact model")

    def crystal_model(self) -> Crystal:
        return _crystal(self.crystal)

    def scales(self) -> DispersionScales:
        return _scales(self.crystal)

    def phase_model(self):
        if self.phasematch == "quadratic":
            return QuadraticPhaseMatch.from_scales(self.scales(), pump_coupling=self.pump_coupling)
        if self.phasematch == "exact":
            return ExactPhaseMatch(self.crystal_model())
        if isinstance(self.phasematch, str):
            raise ValueError(f"unknown phase-matching model {self.phasematch!r}")
        return self.phasematch

    def effective_limits(self) -> BandwidthLimits:
        """Limits with the 1D/2D irrelevant cutoff dropped and an infinite 3D
        ``q_max`` replaced by the finite surrogate."""
        lim = self.limits
        if self.dimension == 1:
            return BandwidthLimits(math.inf, lim.omega_max)
        if self.dimension == 2:
            return BandwidthLimits(lim.q_max, math.inf)
        if math.isinf(lim.q_max):
            sc = self.scales()
            obar = lim.omega_max / sc.omega0
            return BandwidthLimits(q_surrogate(obar, self.alpha) * sc.q0, lim.omega_max)
        return lim


def q_surrogate(omegabar: float, alpha: float = ALPHA_DEFAULT) -> float:
    """Normalized q cutoff used when no spatial limit is requested."""
    return Q_SURROGATE * math.sqrt(max(alpha, omegabar**2))


_CRYSTALS: dict[CrystalConfig, Crystal] = {}


def _crystal(config: CrystalConfig) -> Crystal:
    if config not in _CRYSTALS:
        _CRYSTALS[config] = Crystal(config)
    return _CRYSTALS[config]


def _scales(config: CrystalConfig) -> DispersionScales:
    return _crystal(config).scales()


@dataclass
class SchmidtResult:
    K: float
    K_err: float
    N_rel: float
    B_rel: float
    method: str
    dimension: int
    npwpa: NpwpaReport | None = None
    meta: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# amplitude


def biphoton_amplitude(w1, w2, model: ModelSpec, phase=None):
    """``A_p(w1 + w2) V(w1, w2)``; non-propagating modes give 0."""
    phase = model.phase_model() if phase is None else phase
    w1 = np.asarray(w1, dtype=float)
    w2 = np.asarray(w2, dtype=float)
    return spectrum(w1 + w2, model.pump, model.dimension) * phase.v(w1, w2, model.dimension)


def _pump_amp(w, s):
    """Per-axis pump spectrum product without the constant prefactor."""
    return np.exp(-np.sum((w * s) ** 2, axis=-1) / 4)


def _require_finite(limits: BandwidthLimits, dim: int):
    box = limits.bounding_box(dim)
    if not all(math.isfinite(lo) and math.isfinite(hi) and hi > lo for lo, hi in box):
        raise ValueError("Monte Carlo needs finite, non-zero limits in every sampled coordinate")
    return box


def _n_integrand(model: ModelSpec, phase, limits: BandwidthLimits):
    D = model.dimension
    s = model.pump.widths(D)
    pref = float(np.prod(s / math.sqrt(2))) ** 2
    box = _require_finite(limits, D)
    spec = mc.SamplerSpec(tuple(mc.Uniform(lo, hi) for lo, hi in box)
                          + tuple(mc.Gaussian(1.0 / si) for si in s))

    def f(u):
        w1, wp = u[:, :D], u[:, D:]
        inside = limits.contains(w1, D)
        a2 = pref * _pump_amp(wp, s) ** 2
        v = phase.v(w1, wp - w1, D)
        return np.where(inside, a2 * np.abs(v) ** 2, 0.0)

    return f, spec


def _b_integrand(model: ModelSpec, phase, limits: BandwidthLimits):
    """Four-fold product of psi in the variables (w1, a, b, delta) with
    ``w_p = a + delta/2`` and ``w_p' = b - delta/2`` (unit Jacobian).  The pump
    product is then the separable Gaussian ``exp(-s^2 (2a^2 + 2b^2 + delta^2)/4)``."""
    D = model.dimension
    s = model.pump.widths(D)
    pref = float(np.prod(s / math.sqrt(2))) ** 4
    box = _require_finite(limits, D)
    spec = mc.SamplerSpec(tuple(mc.Uniform(lo, hi) for lo, hi in box)
                          + tuple(mc.Gaussian(1.0 / si) for si in s)
                          + tuple(mc.Gaussian(1.0 / si) for si in s)
                          + tuple(mc.Gaussian(math.sqrt(2) / si) for si in s))

    def f(u):
        w1 = u[:, :D]
        a, b, d = u[:, D:2 * D], u[:, 2 * D:3 * D], u[:, 3 * D:]
        wp, wq = a + d / 2, b - d / 2
        inside = limits.contains(w1, D)
        pump = pref * np.exp(-np.sum((s * s) * (2 * a * a + 2 * b * b + d * d), axis=-1) / 4)
        w1d = w1 - d
        v1 = phase.v(w1, wp - w1, D)
        v2 = phase.v(w1d, wq - w1d, D)
        v3 = phase.v(w1d, wp - w1, D)
        v4 = phase.v(w1, wq - w1d, D)
        prod = v1 * v2 * np.conj(v3) * np.conj(v4)
        return np.where(inside, pump * prod, 0.0)

    return f, spec


def estimate_N(model: ModelSpec, params: McParams = McParams()) -> mc.McEstimate:
    """MC estimate of ``int dw1 dw2 |psi|^2`` over ``w1`` in the collected region."""
    phase = model.phase_model()
    f, spec = _n_integrand(model, phase, model.effective_limits())
    return mc.estimate(f, spec, params.samples_n, seed=params.seed, shards=params.shards,
                       workers=params.workers)


def estimate_B(model: ModelSpec, params: McParams = McParams()) -> mc.McEstimate:
    """MC estimate of ``int |G(w1, w1')|^2``; the value is complex and its
    imaginary part is pure noise."""
    phase = model.phase_model()
    f, spec = _b_integrand(model, phase, model.effective_limits())
    # B uses a stream independent of the N stream.
    return mc.estimate(f, spec, params.samples_b, seed=_b_seed(params.seed), shards=params.shards,
                       workers=params.workers)


def _b_seed(seed: int) -> int:
    return (seed * 0x9E3779B97F4A7C15 + 1) % (1 << 63)


def _npwpa_report(model: ModelSpec):
    if isinstance(model.phasematch, str):
        return npwpa_check(model.pump, model.scales())
    return None


def schmidt_mc(model: ModelSpec, params: McParams = McParams()) -> SchmidtResult:
    t0 = time.perf_counter()
    n_est = estimate_N(model, params)
    b_est = estimate_B(model, params)
    N, dN = n_est.real, n_est.real_stderr
    B, dB = b_est.real, b_est.real_stderr
    if not B > 3 * dB:
        raise SchmidtError(f"B = {B:.4g} +- {dB:.2g} is consistent with zero; increase samples")
    K = N * N / B
    K_err = K * math.hypot(2 * dN / N, dB / B)
    lim = model.effective_limits()
    meta = {
        "B_imag": float(np.imag(b_est.value)),
        "B_imag_err": float(np.imag(b_est.stderr)),
        "N_err": dN,
        "B_err": dB,
        "samples_n": params.samples_n,
        "samples_b": params.samples_b,
        "seed": params.seed,
        "shards": params.shards,
        "q_max": lim.q_max,
        "omega_max": lim.omega_max,
        "wall_s": time.perf_counter() - t0,
    }
    meta.update(_model_meta(model))
    return SchmidtResult(K, K_err, N, B, "mc_exact", model.dimension, _npwpa_report(model), meta)


def _model_meta(model: ModelSpec) -> dict:
    out = {"alpha": model.alpha}
    if isinstance(model.phasematch, str):
        out["phasematch"] = model.phasematch
        if model.phasematch == "quadratic":
            out["pump_coupling"] = model.pump_coupling
        out["approximations"] = _approximations(model)
        out["pair_number_scale"] = model.pump.gain**2 / (2 * math.pi) ** model.dimension
    else:
        out["phasematch"] = type(model.phasematch).__name__
    return out


def _approximations(model: ModelSpec) -> list[str]:
    flags = ["first-order pump walk-off with paraxial pump diffraction",
             "quadratic mismatch sign: d0 - q^2/q0^2 + Omega^2/Omega0^2"]
    if model.phasematch == "quadratic":
        flags.append("second-order expansion of the mismatch"
                     + (" incl. pump-coordinate terms" if model.pump_coupling else " in w_minus only"))
    if model.dimension == 3 and math.isinf(model.limits.q_max):
        flags.append(f"no spatial cutoff approximated by q_max = {Q_SURROGATE} sqrt(max(alpha, omegabar^2)) q0")
    if model.method == "analytic_box":
        flags.append("box-function surrogate for sinc^2")
    if model.method in ("analytic_box", "npwpa_integral"):
        flags.append("nearly-plane-wave pump factorization")
    return flags


def schmidt_npwpa_integral(model: ModelSpec) -> SchmidtResult:
    """Factorized formula with deterministic quadrature of ``int |V|^2`` and ``int |V|^4``."""
    D = model.dimension
    phase = model.phase_model()
    lim = model.effective_limits()
    if isinstance(phase, ConstantAmplitude):
        i2 = i4 = lim.volume(D)
    else:
        i2 = v_integral(phase, lim, D, "sinc2", model.alpha)
        i4 = v_integral(phase, lim, D, "sinc4", model.alpha)
    fp = pump_factor(model.pump, D)
    K = fp * i2 * i2 / ((2 * math.pi) ** D * i4)
    meta = {"I2": i2, "I4": i4, "ratio": i2 / i4, "pump_factor": fp,
            "q_max": lim.q_max, "omega_max": lim.omega_max}
    meta.update(_model_meta(model))
    s = model.pump.widths(D)
    # N and B of the factorized formula, on the same scale as the MC estimates
    n_rel = float(np.prod(s * math.sqrt(math.pi / 2))) * i2
    b_rel = (2 * math.pi) ** D * float(np.prod(s * math.sqrt(math.pi) / 2)) * i4
    return SchmidtResult(K, 0.0, n_rel, b_rel, "npwpa_integral", D, _npwpa_report(model), meta)


# ---------------------------------------------------------------------------
# closed forms


def k3d_analytic(omegabar: float, q0: float, omega0: float, pump: PumpConfig,
                 alpha: float = ALPHA_DEFAULT) -> float:
    """Box-function result with no spatial cutoff (collinear)."""
    P = q0**2 * omega0 * pump.sigma_um**2 * pump.tau_s
    x = omegabar / math.sqrt(alpha)
    c = alpha * math.sqrt(alpha / math.pi) * P
    if omegabar < math.sqrt(alpha):
        return c / 4 * (x + x**3 / 3)
    return c / 2 * (x - 1 / 3)


def k2d_analytic(qbar: float, q0: float, pump: PumpConfig, alpha: float = ALPHA_DEFAULT) -> float:
    """Spatial model; ``(alpha/4) sigma^2 q0^2 min(qbar^2/alpha, 1)``, which is
    ``(3/8) pi sigma^2 q0^2`` at saturation for ``alpha = 3 pi/2``."""
    return alpha / 4 * pump.sigma_um**2 * q0**2 * min(qbar**2 / alpha, 1.0)


def k1d_analytic(omegabar: float, omega0: float, pump: PumpConfig, alpha: float = ALPHA_DEFAULT) -> float:
    """Temporal model; saturates at ``sqrt(alpha/pi) tau Omega0``."""
    return math.sqrt(alpha / math.pi) * pump.tau_s * omega0 * min(omegabar / math.sqrt(alpha), 1.0)


def _box_k(model: ModelSpec, limits: BandwidthLimits) -> tuple[float, float]:
    """Semi-analytic box path: ``F_pump (alpha/pi) Vol_box / (2 pi)^D``."""
    D = model.dimension
    sc = model.scales()
    phase = QuadraticPhaseMatch(sc.q0, sc.omega0, sc.delta0_lc)
    vol = v_integral(phase, limits, D, "box", model.alpha)
    if not vol > 0:
        raise ValueError("the collected region contains no phase-matched volume; "
                         "the box surrogate is undefined there (use mc_exact or npwpa_integral)")
    return pump_factor(model.pump, D) * (model.alpha / math.pi) * vol / (2 * math.pi) ** D, vol


def schmidt_analytic(model: ModelSpec) -> SchmidtResult:
    if model.phasematch != "quadratic":
        raise ValueError("closed forms need the quadratic model; use schmidt_npwpa_integral")
    D = model.dimension
    sc = model.scales()
    lim = model.limits
    collinear = abs(sc.delta0_lc) < 1e-6
    q0, om0, a = sc.q0, sc.omega0, model.alpha
    branch = "box_volume"
    if collinear and D == 1 and math.isfinite(lim.omega_max):
        K, branch = k1d_analytic(lim.omega_max / om0, om0, model.pump, a), "k1d"
    elif collinear and D == 2 and math.isfinite(lim.q_max):
        K, branch = k2d_analytic(lim.q_max / q0, q0, model.pump, a), "k2d"
    elif collinear and D == 3 and math.isinf(lim.q_max) and math.isfinite(lim.omega_max):
        K, branch = k3d_analytic(lim.omega_max / om0, q0, om0, model.pump, a), "k3d"
    else:
        K, _ = _box_k(model, lim if D != 3 or math.isfinite(lim.q_max) else model.effective_limits())
    meta = {"branch": branch}
    meta.update(_model_meta(model))
    return SchmidtResult(K, 0.0, math.nan, math.nan, "analytic_box", D, _npwpa_report(model), meta)


def schmidt(model: ModelSpec, params: McParams = McParams()) -> SchmidtResult:
    if model.method == "mc_exact":
        return schmidt_mc(model, params)
    if model.method == "npwpa_integral":
        return schmidt_npwpa_integral(model)
    return schmidt_analytic(model)


# ---------------------------------------------------------------------------
# sweeps


@dataclass(frozen=True)
class FactorRow:
    bar: float
    K3: float
    K1: float
    K2: float

    @property
    def product(self) -> float:
        return self.K1 * self.K2

    @property
    def ratio(self) -> float:
        return self.K3 / self.product


def factorizability_gap(crystal: CrystalConfig, pump: PumpConfig, bars: Sequence[float],
                        alpha: float = ALPHA_DEFAULT) -> list[FactorRow]:
    """3D Schmidt number with joint cutoffs ``qbar = omegabar`` against the
    product of the 1D (``omegabar``) and 2D (``qbar``) results, box path."""
    sc = _scales(crystal)
    rows = []
    for x in bars:
        lim = BandwidthLimits.normalized(x, x, q0=sc.q0, omega0=sc.omega0)
        ks = [schmidt_analytic(ModelSpec(D, crystal, pump, lim, method="analytic_box", alpha=alpha)).K
              for D in (3, 1, 2)]
        rows.append(FactorRow(float(x), *ks))
    return rows


@dataclass(frozen=True)
class BetaRow:
    beta: float
    sigma_um: float
    tau_fs: float
    omegabar: float
    K: float
    K_err: float
    K_analytic: float


def point_seed(seed: int, index: int) -> int:
    """Deterministic per-point seed for sweeps."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1, np.uint64)[0] >> 1)


def beta_sweep(crystal: CrystalConfig, omegabar: float, betas: Sequence[float],
               params: McParams = McParams(), phasematch: str = "exact",
               qbar: float = math.inf, split: float = 1.0,
               alpha: float = ALPHA_DEFAULT, track_pump: float | None = None,
               pump_coupling: bool = True) -> list[BetaRow]:
    """Schmidt number against the focusing parameter.

    With ``track_pump = c`` the collected bandwidth at each point is widened to
    ``max(omegabar, c * dOmega_p/Omega0)`` so that it keeps covering the
    emission broadened by a tightly focused pump.
    """
    sc = _scales(crystal)
    rows = []
    for i, b in enumerate(betas):
        pump = pump_for_beta(b, sc, split)
        ob = omegabar if track_pump is None else max(omegabar, track_pump * pump.delta_omega / sc.omega0)
        lim = BandwidthLimits.normalized(qbar, ob, q0=sc.q0, omega0=sc.omega0)
        spec = ModelSpec(3, crystal, pump, lim, phasematch=phasematch, alpha=alpha,
                         pump_coupling=pump_coupling)
        res = schmidt_mc(spec, replace(params, seed=point_seed(params.seed, i)))
        ka = schmidt_analytic(replace(spec, phasematch="quadratic", method="analytic_box")).K
        rows.append(BetaRow(b, pump.sigma_um, pump.tau_fs, ob, res.K, res.K_err, ka))
    return rows

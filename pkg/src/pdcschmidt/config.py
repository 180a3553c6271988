"""
Run configuration: a line-oriented ``section.key = value`` text format.

Blank lines and ``#`` comments are ignored.  Keys carry their unit as a suffix
(``pump.sigma_um``, ``crystal.length_mm``).  Unknown keys and bad values are
collected and reported together.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import get_type_hints

import numpy as np

from .dispersion import SELLMEIER_SETS


class ConfigError(ValueError):
    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("invalid configuration:\n" + "\n".join(f"  {p}" for p in self.problems))


SWEEP_AXES = ("none", "omegabar", "qbar", "beta", "factorizability")


@dataclass(frozen=True)
class ModelSection:
    dimension: int = 3
    phasematch: str = "quadratic"
    method: str = "mc_exact"
    alpha: float = 1.5 * math.pi
    pump_coupling: bool = True


@dataclass(frozen=True)
class CrystalSection:
    length_mm: float = 4.0
    pump_wavelength_nm: float = 527.0
    theta_deg: float | None = None
    delta0_lc: float = 0.0
    sellmeier: str = "bbo_kato1986"


@dataclass(frozen=True)
class PumpSection:
    sigma_um: float = 600.0
    tau_fs: float = 1000.0
    gain: float = 1e-3


@dataclass(frozen=True)
class LimitsSection:
    """Collected bandwidth in units of ``q0`` and ``Omega0``."""

    qbar: float = math.inf
    omegabar: float = 4.0


@dataclass(frozen=True)
class McSection:
    samples_n: int = 2_000_000
    samples_b: int = 10_000_000
    seed: int = 1
    shards: int = 8
    workers: int = 1


@dataclass(frozen=True)
class SweepSection:
    axis: str = "none"
    values: tuple[float, ...] = ()
    split: float = 1.0
    track_pump: float | None = None
    workers: int = 1


@dataclass(frozen=True)
class OutputSection:
    csv: str = "out.csv"
    record_timing: bool = False


@dataclass(frozen=True)
class RunConfig:
    model: ModelSection = field(default_factory=ModelSection)
    crystal: CrystalSection = field(default_factory=CrystalSection)
    pump: PumpSection = field(default_factory=PumpSection)
    limits: LimitsSection = field(default_factory=LimitsSection)
    mc: McSection = field(default_factory=McSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    output: OutputSection = field(default_factory=OutputSection)

    def replace(self, **dotted) -> "RunConfig":
        """``cfg.replace(**{"pump.sigma_um": 300})``."""
        sections = {}
        for key, value in dotted.items():
            sec, name = key.split(".", 1)
            sections.setdefault(sec, {})[name] = value
        return dataclasses.replace(self, **{
            sec: dataclasses.replace(getattr(self, sec), **kv) for sec, kv in sections.items()})


def _schema():
    out = {}
    for sec in dataclasses.fields(RunConfig):
        cls = sec.default_factory
        hints = get_type_hints(cls)
        for f in dataclasses.fields(cls):
            out[f"{sec.name}.{f.name}"] = hints[f.name]
    return out


SCHEMA = _schema()


def _fmt_float(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return repr(float(x))


def _format(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return _fmt_float(value)
    if isinstance(value, tuple):
        return ", ".join(_fmt_float(v) for v in value)
    return str(value)


def _parse_value(raw: str, typ):
    raw = raw.strip()
    if typ is bool:
        low = raw.lower()
        if low in ("true", "yes", "1"):
            return True
        if low in ("false", "no", "0"):
            return False
        raise ValueError(f"expected true/false, got {raw!r}")
    if typ is int:
        return int(raw.replace("_", ""))
    if typ is float:
        return float(raw)
    if typ == (float | None):
        return None if raw.lower() in ("none", "") else float(raw)
    if typ == tuple[float, ...]:
        return tuple(float(v) for v in raw.split(",") if v.strip())
    return raw


def _validate(cfg: RunConfig) -> list[str]:
    bad = []
    m, c, p, lim, mc, sw = cfg.model, cfg.crystal, cfg.pump, cfg.limits, cfg.mc, cfg.sweep
    if m.dimension not in (1, 2, 3):
        bad.append(f"model.dimension: must be 1, 2 or 3, got {m.dimension}")
    if m.phasematch not in ("quadratic", "exact"):
        bad.append(f"model.phasematch: must be quadratic or exact, got {m.phasematch!r}")
    if m.method not in ("mc_exact", "npwpa_integral", "analytic_box"):
        bad.append(f"model.method: unknown method {m.method!r}")
    elif m.method == "analytic_box" and m.phasematch != "quadratic":
        bad.append("model.method: analytic_box requires model.phasematch = quadratic")
    if not m.alpha > 0:
        bad.append("model.alpha: must be positive")
    for key, val in (("crystal.length_mm", c.length_mm), ("crystal.pump_wavelength_nm", c.pump_wavelength_nm),
                     ("pump.sigma_um", p.sigma_um), ("pump.tau_fs", p.tau_fs), ("pump.gain", p.gain),
                     ("sweep.split", sw.split)):
        if not (val > 0 and math.isfinite(val)):
            bad.append(f"{key}: must be positive and finite, got {val}")
    if c.sellmeier not in SELLMEIER_SETS:
        bad.append(f"crystal.sellmeier: unknown set {c.sellmeier!r}; known: {', '.join(SELLMEIER_SETS)}")
    if c.theta_deg is not None and c.delta0_lc != 0.0:
        bad.append("crystal.theta_deg: give either theta_deg or delta0_lc, not both")
    if not (lim.qbar > 0 and lim.omegabar > 0):
        bad.append("limits: qbar and omegabar must be positive")
    if mc.samples_n < 10_000 or mc.samples_b < 10_000:
        bad.append("mc.samples_n/mc.samples_b: need at least 10000 samples")
    if mc.seed < 0:
        bad.append("mc.seed: must be non-negative")
    if mc.shards < 1 or mc.workers < 1 or sw.workers < 1:
        bad.append("mc.shards, mc.workers, sweep.workers: must be >= 1")
    if sw.axis not in SWEEP_AXES:
        bad.append(f"sweep.axis: must be one of {', '.join(SWEEP_AXES)}, got {sw.axis!r}")
    elif sw.axis != "none" and not sw.values:
        bad.append("sweep.values: required when sweep.axis is set")
    elif sw.axis == "factorizability" and m.method != "analytic_box":
        bad.append("sweep.axis: factorizability runs on model.method = analytic_box")
    if any(not v > 0 for v in sw.values):
        bad.append("sweep.values: must all be positive")
    if sw.track_pump is not None and not sw.track_pump > 0:
        bad.append("sweep.track_pump: must be positive")
    return bad


def parse(text: str) -> RunConfig:
    problems = []
    sections: dict[str, dict] = {}
    seen = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            problems.append(f"line {lineno}: expected 'section.key = value', got {line!r}")
            continue
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in SCHEMA:
            problems.append(f"{key}: unknown key (line {lineno})")
            continue
        if key in seen:
            problems.append(f"{key}: given more than once (line {lineno})")
            continue
        seen.add(key)
        try:
            value = _parse_value(raw, SCHEMA[key])
        except ValueError as exc:
            problems.append(f"{key}: {exc}")
            continue
        sec, name = key.split(".", 1)
        sections.setdefault(sec, {})[name] = value
    if problems:
        raise ConfigError(problems)
    cfg = RunConfig(**{sec.name: sec.default_factory(**sections.get(sec.name, {}))
                       for sec in dataclasses.fields(RunConfig)})
    bad = _validate(cfg)
    if bad:
        raise ConfigError(bad)
    return cfg


def dumps(cfg: RunConfig) -> str:
    lines = []
    for sec in dataclasses.fields(RunConfig):
        part = getattr(cfg, sec.name)
        for f in dataclasses.fields(part):
            lines.append(f"{sec.name}.{f.name} = {_format(getattr(part, f.name))}")
        lines.append("")
    return "\n".join(lines)


def load(path) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError([f"cannot read {path}: {exc.strerror}"]) from exc
    return parse(text)


def _log_grid(lo, hi, n):
    return tuple(float(v) for v in 10 ** np.linspace(math.log10(lo), math.log10(hi), n))


def preset(name: str) -> RunConfig:
    """Named configurations for the standard sweeps (4 mm BBO at 527 nm)."""
    base = RunConfig()
    presets = {
        "fig3a": base.replace(**{
            "model.dimension": 3, "model.phasematch": "quadratic",
            "limits.qbar": math.inf,
            "sweep.axis": "omegabar", "sweep.values": (0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0),
            "output.csv": "fig3a.csv"}),
        "fig4": base.replace(**{
            "model.dimension": 3, "model.phasematch": "exact",
            "limits.qbar": math.inf, "limits.omegabar": 4.0,
            "sweep.axis": "beta", "sweep.values": _log_grid(0.01, 10.0, 10), "sweep.track_pump": 3.0,
            "output.csv": "fig4.csv"}),
        "fig5": base.replace(**{
            "model.dimension": 2, "model.phasematch": "exact",
            "sweep.axis": "qbar", "sweep.values": (0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0),
            "output.csv": "fig5.csv"}),
        "fig5_temporal": base.replace(**{
            "model.dimension": 1, "model.phasematch": "exact",
            "sweep.axis": "omegabar", "sweep.values": (0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0),
            "output.csv": "fig5_temporal.csv"}),
        "fig6": base.replace(**{
            "model.dimension": 3, "model.phasematch": "exact", "crystal.delta0_lc": 23.38,
            "limits.omegabar": 1.0,
            "sweep.axis": "qbar", "sweep.values": (0.5, 1.0, 2.0, 3.0, 4.0, 4.5, 23.38 ** 0.5, 5.5, 6.0, 7.0),
            "output.csv": "fig6.csv"}),
        "fig7": base.replace(**{
            "model.dimension": 3, "model.method": "analytic_box",
            "sweep.axis": "factorizability",
            "sweep.values": (0.1, 0.3, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0),
            "output.csv": "fig7.csv"}),
        "fig8": base.replace(**{
            "model.dimension": 3, "model.phasematch": "exact", "crystal.delta0_lc": 23.38,
            "pump.gain": 0.001, "limits.omegabar": 1.0,
            "sweep.axis": "qbar", "sweep.values": (0.5, 1.0, 2.0, 3.0, 4.0, 4.5, 23.38 ** 0.5, 5.5, 6.0, 7.0),
            "output.csv": "fig8.csv"}),
    }
    if name not in presets:
        raise ConfigError([f"unknown preset {name!r}; known: {', '.join(presets)}"])
    return presets[name]


PRESETS = ("fig3a", "fig4", "fig5", "fig5_temporal", "fig6", "fig7", "fig8")

"""
Command-line front end.

    pdcschmidt run CONFIG            evaluate a configuration, write CSV + metadata
    pdcschmidt preset NAME [--emit]  print or write a published-sweep configuration
    pdcschmidt check                 dispersion and pump regression anchors

Exit codes: 0 success, 1 validation error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from importlib import metadata as importlib_metadata
from pathlib import Path

from . import config as cfgmod
from .config import ConfigError, RunConfig
from .dispersion import SELLMEIER_SETS, Crystal, CrystalConfig, DispersionDomainError, TuningError
from .mc import NonFiniteIntegrandError
from .phasematch import BandwidthLimits, NonPropagatingError, QuadratureError
from .pump import PumpConfig, beta, npwpa_check, pump_for_beta
from .schmidt import (
    McParams,
    ModelSpec,
    SchmidtError,
    factorizability_gap,
    point_seed,
    schmidt,
)

COLUMNS = ("sweep_value", "K", "K_err", "N_rel", "B_rel", "method", "dimension",
           "beta", "npwpa_ok", "seed", "wall_ms")
FACTOR_COLUMNS = ("K_1D", "K_2D", "product", "ratio")
NUMERICAL_ERRORS = (SchmidtError, QuadratureError, NonFiniteIntegrandError,
                    DispersionDomainError, TuningError, NonPropagatingError, FloatingPointError)


def crystal_config(cfg: RunConfig) -> CrystalConfig:
    c = cfg.crystal
    kw = dict(length_mm=c.length_mm, pump_wavelength_nm=c.pump_wavelength_nm,
              sellmeier=SELLMEIER_SETS[c.sellmeier])
    if c.theta_deg is not None:
        return CrystalConfig(theta_deg=c.theta_deg, delta0_lc=None, **kw)
    return CrystalConfig(theta_deg=None, delta0_lc=c.delta0_lc, **kw)


@dataclass(frozen=True)
class Point:
    """Inputs of one CSV row."""

    index: int
    sweep_value: float
    seed: int
    sigma_um: float
    tau_fs: float
    qbar: float
    omegabar: float


def points(cfg: RunConfig) -> list[Point]:
    sw = cfg.sweep
    values = sw.values if sw.axis != "none" else (math.nan,)
    scales = Crystal(crystal_config(cfg)).scales() if sw.axis == "beta" else None
    out = []
    for i, v in enumerate(values):
        sigma, tau = cfg.pump.sigma_um, cfg.pump.tau_fs
        qbar, obar = cfg.limits.qbar, cfg.limits.omegabar
        if sw.axis == "omegabar":
            obar = v
        elif sw.axis == "qbar":
            qbar = v
        elif sw.axis == "factorizability":
            qbar = obar = v
        elif sw.axis == "beta":
            p = pump_for_beta(v, scales, sw.split, cfg.pump.gain)
            sigma, tau = p.sigma_um, p.tau_fs
            if sw.track_pump is not None:
                obar = max(obar, sw.track_pump * p.delta_omega / scales.omega0)
        out.append(Point(i, v, point_seed(cfg.mc.seed, i), sigma, tau, qbar, obar))
    return out


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return "nan" if math.isnan(x) else cfgmod._fmt_float(x)
    return str(x)


def evaluate(cfg: RunConfig, pt: Point) -> tuple[dict, float]:
    """One CSV row as a dict of formatted strings, and the wall time in ms."""
    t0 = time.perf_counter()
    crystal = crystal_config(cfg)
    scales = Crystal(crystal).scales()
    pump = PumpConfig(pt.sigma_um, pt.tau_fs, cfg.pump.gain)
    m = cfg.model
    row = {"sweep_value": pt.sweep_value, "method": m.method, "dimension": m.dimension,
           "seed": pt.seed, "beta": beta(pump, scales),
           "npwpa_ok": npwpa_check(pump, scales).satisfied}
    if cfg.sweep.axis == "factorizability":
        fr = factorizability_gap(crystal, pump, [pt.sweep_value], m.alpha)[0]
        row.update(K=fr.K3, K_err=0.0, N_rel=math.nan, B_rel=math.nan,
                   K_1D=fr.K1, K_2D=fr.K2, product=fr.product, ratio=fr.ratio)
    else:
        lim = BandwidthLimits.normalized(pt.qbar, pt.omegabar, q0=scales.q0, omega0=scales.omega0)
        spec = ModelSpec(m.dimension, crystal, pump, lim, phasematch=m.phasematch, method=m.method,
                         alpha=m.alpha, pump_coupling=m.pump_coupling)
        params = McParams(cfg.mc.samples_n, cfg.mc.samples_b, pt.seed, cfg.mc.shards, cfg.mc.workers)
        res = schmidt(spec, params)
        row.update(K=res.K, K_err=res.K_err, N_rel=res.N_rel, B_rel=res.B_rel)
    wall = (time.perf_counter() - t0) * 1e3
    row["wall_ms"] = round(wall, 3) if cfg.output.record_timing else ""
    return {k: _fmt(v) if v != "" else "" for k, v in row.items()}, wall


def _columns(cfg: RunConfig):
    return COLUMNS + (FACTOR_COLUMNS if cfg.sweep.axis == "factorizability" else ())


def _csv_line(cols, row) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow([row[c] for c in cols])
    return buf.getvalue()


def meta_path(csv_path: Path) -> Path:
    return csv_path.with_name(csv_path.name + ".meta.json")


def _version() -> str:
    try:
        return importlib_metadata.version("artifact")
    except importlib_metadata.PackageNotFoundError:
        return "unknown"


def _approximation_flags(cfg: RunConfig) -> list[str]:
    flags = ["constant g (2 pi)^(-3/2) dropped from the amplitude; N_rel omits the g^2 scale",
             "collected region restricts the sampled signal coordinate only"]
    if cfg.model.phasematch == "quadratic":
        flags.append("second-order phase mismatch"
                     + (" including pump-coordinate terms" if cfg.model.pump_coupling else ""))
    else:
        flags.append("Sellmeier phase mismatch; modes outside the transparency window carry zero weight")
    if cfg.model.dimension == 3 and math.isinf(cfg.limits.qbar) and cfg.sweep.axis not in ("qbar", "factorizability"):
        flags.append("unlimited q replaced by q_max = 3 sqrt(max(alpha, omegabar^2)) q0")
    if cfg.model.method == "analytic_box":
        flags.append("box-function surrogate for sinc^2 and broad-pump factorization")
    if cfg.model.method == "npwpa_integral":
        flags.append("broad-pump factorization")
    if cfg.sweep.axis == "beta":
        flags.append(f"pump from beta with split {cfg.sweep.split!r}"
                     + ("" if cfg.sweep.track_pump is None else
                        f"; omegabar widened to {cfg.sweep.track_pump!r} pump bandwidths"))
    return flags


def _metadata(cfg: RunConfig, pts, walls, started) -> dict:
    return {
        "code": {"package": "pdcschmidt", "distribution": "artifact", "version": _version(),
                 "python": sys.version.split()[0]},
        "config_text": cfgmod.dumps(cfg),
        "config": asdict(cfg),
        "columns": list(_columns(cfg)),
        "approximations": _approximation_flags(cfg),
        "pair_number_scale": cfg.pump.gain**2 / (2 * math.pi) ** cfg.model.dimension,
        "points": [asdict(p) for p in pts],
        "wall_ms": walls,
        "started": started,
    }


def _json_safe(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def _completed_rows(csv_path: Path, cfg: RunConfig, header: str) -> int:
    """Rows already present from an earlier run of the same configuration."""
    if not csv_path.exists():
        return 0
    mp = meta_path(csv_path)
    if not mp.exists():
        raise ConfigError([f"output.csv: {csv_path} exists without metadata; remove it or choose another path"])
    old = json.loads(mp.read_text(encoding="utf-8"))
    if old.get("config_text") != cfgmod.dumps(cfg):
        raise ConfigError([f"output.csv: {csv_path} was written by a different configuration"])
    text = csv_path.read_text(encoding="utf-8")
    if not text.startswith(header):
        raise ConfigError([f"output.csv: {csv_path} has an unexpected header"])
    body = text[len(header):]
    if body and not body.endswith("\n"):
        # drop a row cut off mid-write
        body = body[: body.rfind("\n") + 1]
        csv_path.write_text(header + body, encoding="utf-8")
    return body.count("\n")


def _eval_job(args):
    cfg, pt = args
    return evaluate(cfg, pt)


def run(cfg: RunConfig, out: Path | None = None, log=print) -> Path:
    csv_path = Path(out or cfg.output.csv)
    cols = _columns(cfg)
    header = ",".join(cols) + "\n"
    pts = points(cfg)
    done = _completed_rows(csv_path, cfg, header)
    if done == 0:
        csv_path.parent.mkdir(parents=True, exist_ok=True)
        csv_path.write_text(header, encoding="utf-8")
    elif done:
        log(f"resuming after {done} completed row(s)")
    todo = pts[done:]
    walls = []
    started = time.strftime("%Y-%m-%dT%H:%M:%S")
    meta = meta_path(csv_path)
    meta.write_text(json.dumps(_json_safe(_metadata(cfg, pts, walls, started)), indent=2), encoding="utf-8")
    jobs = [(cfg, p) for p in todo]
    if cfg.sweep.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.sweep.workers) as pool:
            results = pool.map(_eval_job, jobs)
            _write_rows(csv_path, cols, results, walls, log)
    else:
        _write_rows(csv_path, cols, map(_eval_job, jobs), walls, log)
    meta.write_text(json.dumps(_json_safe(_metadata(cfg, pts, walls, started)), indent=2), encoding="utf-8")
    return csv_path


def _write_rows(csv_path, cols, results, walls, log):
    # pool.map yields in submission order, so rows land in sweep order
    for row, wall in results:
        with csv_path.open("a", encoding="utf-8") as fh:
            fh.write(_csv_line(cols, row))
        walls.append(round(wall, 3))
        log(f"{row['sweep_value']}: K = {row['K']} +- {row['K_err']}")


# ---------------------------------------------------------------------------
# check


@dataclass(frozen=True)
class Anchor:
    name: str
    value: float
    target: float
    rel_tol: float

    @property
    def ok(self) -> bool:
        return abs(self.value - self.target) <= self.rel_tol * abs(self.target)


def anchors() -> list[Anchor]:
    """Reference values for 4 mm BBO pumped at 527 nm, collinear."""
    sc = Crystal(CrystalConfig.collinear()).scales()
    pump = PumpConfig(600.0, 1000.0)
    return [
        Anchor("theta_p [deg]", math.degrees(sc.theta_p), 22.934, 1e-3),
        Anchor("q0 [1/um]", sc.q0, 5e-2, 0.10),
        Anchor("Omega0 [rad/s]", sc.omega0, 0.76e14, 0.10),
        Anchor("tau_GVM [fs]", sc.tau_gvm_fs, 500.0, 0.15),
        Anchor("l_walkoff [um]", sc.l_walkoff_um, 250.0, 0.15),
        Anchor("pump dq_p [1/um]", pump.delta_q, 2 / 600.0, 1e-12),
        Anchor("pump dOmega_p [rad/s]", pump.delta_omega, 2e12, 1e-12),
    ]


def check(log=print) -> bool:
    ok = True
    for a in anchors():
        status = "PASS" if a.ok else "FAIL"
        ok &= a.ok
        log(f"{status}  {a.name:24s} {a.value:.6g}  (reference {a.target:.6g} +- {a.rel_tol:.0%})")
    return ok


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pdcschmidt", description="Schmidt number of low-gain PDC.")
    sub = p.add_subparsers(dest="verb", required=True)
    r = sub.add_parser("run", help="evaluate a configuration file")
    r.add_argument("config")
    r.add_argument("--output", help="override output.csv")
    pr = sub.add_parser("preset", help="print or write a preset configuration")
    pr.add_argument("name", help=", ".join(cfgmod.PRESETS))
    pr.add_argument("--emit", metavar="PATH", help="write the configuration to PATH")
    sub.add_parser("check", help="dispersion and pump regression anchors")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.verb == "run":
            run(cfgmod.load(args.config), Path(args.output) if args.output else None)
            return 0
        if args.verb == "preset":
            text = cfgmod.dumps(cfgmod.preset(args.name))
            if args.emit:
                Path(args.emit).write_text(text, encoding="utf-8")
            else:
                sys.stdout.write(text)
            return 0
        return 0 if check() else 2
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1

if __name__ == "__main__":
    sys.exit(main())

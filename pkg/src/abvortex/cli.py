"""Command-line interface: ``xsec``, ``sweep``, ``mc`` and ``validate``.

Options come from built-in defaults, then an optional flat ``key = value``
file (``--config``), then command-line flags, later sources winning. Angles
are radians. Every output carries the full effective configuration in its
``# key=value`` header, so re-running with it reproduces the files byte for
byte.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from . import __version__
from .classical import classical_density, classical_total, mc_xsec
from .core import ScatterConfig, Spin
from .errors import ScatteringError
from .kernels import BACKEND
from .partialwave import exact_xsec
from .quasiclassical import qclass_flags, quasiclassical_xsec, total_xsec
from .validate import (ValidationReport, convergence_order, optical_theorem_conical,
                       optical_theorem_euclidean, tier_equivalence)

__all__ = ["RunConfig", "UsageError", "parse_config", "run", "main"]

COMMANDS = ("xsec", "sweep", "mc", "validate")
TIERS = ("exact", "quasiclassical", "classical")
SWEEP_AXES = ("alpha", "eta", "rc", "xic", "k", "krc")
DIGITS = 17


class UsageError(ScatteringError):
    """Invalid command line or config file; the message names the key."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    alpha: float = 0.0
    eta: float = 0.0
    rc: float = 1.0
    xic: float | None = None
    spin: str = "none"
    k: float | None = None
    krc: float | None = None
    grid: int = 721
    phi_min: float = -math.pi
    phi_max: float = math.pi
    phi: float | None = None
    tier: str | None = None
    axis: str | None = None
    values: tuple = ()
    ladder: tuple = ()
    samples: int = 1_000_000
    bins: int = 180
    seed: int = 0
    threads: int | None = None
    out: str = "."

    @property
    def scatter(self) -> ScatterConfig:
        return ScatterConfig(self.alpha, self.eta, self.rc, self.xic, Spin(self.spin))

    @property
    def wavenumber(self) -> float | None:
        return self.k if self.k is not None else (None if self.krc is None else self.krc / self.rc)

    @property
    def tiers(self) -> tuple:
        default = "exact" if self.command == "sweep" else "all"
        t = self.tier or default
        return TIERS if t == "all" else (t,)

    def echo(self) -> dict:
        """Effective configuration with ``k`` and ``kr_c`` both resolved."""
        d = asdict(self)
        k = self.wavenumber
        if k is not None:
            d["k"], d["krc"] = k, k * self.rc
        d["values"], d["ladder"] = list(self.values), list(self.ladder)
        return d


def _real(key, text):
    t = text.strip()
    if key.startswith("phi") and any(s in t.lower() for s in ("deg", "°")):
        raise UsageError(f"{key}: angles are radians; degrees are not accepted ({text!r})")
    try:
        return float(t)
    except ValueError:
        raise UsageError(f"{key}: malformed number {text!r}") from None


def _integer(key, text):
    try:
        return int(text.strip())
    except ValueError:
        raise UsageError(f"{key}: malformed integer {text!r}") from None


def _choice(options):
    def convert(key, text):
        t = text.strip()
        if t not in options:
            raise UsageError(f"{key}: {t!r} is not one of {', '.join(options)}")
        return t
    return convert


def _real_list(key, text):
    return tuple(_real(key, v) for v in text.split(",") if v.strip())


def _sweep_values(key, text):
    """``lo:hi:step`` with a whole number of steps, or a comma list."""
    if ":" not in text:
        return _real_list(key, text)
    parts = text.split(":")
    if len(parts) != 3:
        raise UsageError(f"{key}: expected lo:hi:step, got {text!r}")
    lo, hi, step = (_real(key, p) for p in parts)
    if step <= 0 or hi < lo:
        raise UsageError(f"{key}: need step > 0 and hi >= lo in {text!r}")
    n = (hi - lo) / step
    if abs(n - round(n)) > 1e-9 * max(1.0, n):
        raise UsageError(f"{key}: step does not divide the range in {text!r}")
    return tuple(np.linspace(lo, hi, int(round(n)) + 1).tolist())


OPTIONS = {
    "alpha": (_real, "magnetic flux in units of the flux quantum"),
    "eta": (_real, "cone deficit parameter"),
    "rc": (_real, "vortex core radius"),
    "xic": (_real, "interior proper radius (default: rc)"),
    "spin": (_choice(tuple(s.value for s in Spin)), "spin mode"),
    "k": (_real, "transverse wavenumber"),
    "krc": (_real, "hardness k*rc"),
    "grid": (_integer, "number of angles"),
    "phi_min": (_real, "lowest angle, radians"),
    "phi_max": (_real, "highest angle, radians"),
    "phi": (_real, "single angle for sweep, radians"),
    "tier": (_choice(TIERS + ("all",)), "tier selector"),
    "axis": (_choice(SWEEP_AXES), "sweep axis"),
    "values": (_sweep_values, "sweep values, lo:hi:step or a comma list"),
    "ladder": (_real_list, "comma list of k*rc values for the convergence check"),
    "samples": (_integer, "Monte Carlo sample count"),
    "bins": (_integer, "Monte Carlo histogram bins"),
    "seed": (_integer, "Monte Carlo seed"),
    "threads": (_integer, "worker thread cap"),
    "out": (lambda key, text: text.strip(), "output directory"),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    for key, (_, text) in OPTIONS.items():
        common.add_argument("--" + key.replace("_", "-"), dest=key, default=None, help=text)
    common.add_argument("--config", default=None, help="flat key = value file")
    parser = _Parser(prog="abvortex", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def read_config_file(path) -> dict:
    """Raw string values of a flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"config: cannot read {path}: {exc.strerror}") from None
    for number, line in enumerate(lines, 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise UsageError(f"config line {number}: expected key = value")
        key, value = (s.strip() for s in body.split("=", 1))
        key = key.replace("-", "_")
        if key not in OPTIONS:
            raise UsageError(f"{key}: unknown configuration key")
        out[key] = value
    return out


def _pick_wavenumber(source: dict, target: dict):
    if "k" in source and "krc" in source:
        raise UsageError("k: give either k or krc, not both")
    if "k" in source or "krc" in source:
        target.pop("k", None)
        target.pop("krc", None)


def parse_config(argv) -> RunConfig:
    """Merge defaults, ``--config`` file and flags into a :class:`RunConfig`."""
    ns = vars(_build_parser().parse_args(argv))
    command = ns.pop("command")
    path = ns.pop("config")
    flags = {k: v for k, v in ns.items() if v is not None}
    raw = read_config_file(path) if path else {}
    _pick_wavenumber(raw, {})
    _pick_wavenumber(flags, raw)
    raw.update(flags)
    values = {key: OPTIONS[key][0](key, text) for key, text in raw.items()}
    cfg = RunConfig(command, **values)
    _check(cfg)
    return cfg


def _check(cfg: RunConfig):
    if cfg.grid < 2:
        raise UsageError("grid: need at least 2 angles")
    if not -math.pi <= cfg.phi_min < cfg.phi_max <= math.pi:
        raise UsageError("phi_min: need -pi <= phi_min < phi_max <= pi")
    if cfg.phi is not None and abs(cfg.phi) > math.pi:
        raise UsageError("phi: must lie in [-pi, pi]")
    if cfg.threads is not None and cfg.threads < 1:
        raise UsageError("threads: must be positive")
    needs_k = cfg.command in ("xsec", "validate") or (cfg.command == "sweep" and cfg.axis not in ("k", "krc"))
    if needs_k and cfg.wavenumber is None:
        raise UsageError("k: one of k or krc is required")
    if cfg.command == "sweep" and (cfg.axis is None or not cfg.values):
        raise UsageError("axis: sweep needs axis and values")
    if cfg.command == "validate" and cfg.ladder and cfg.tier is not None:
        raise UsageError("tier: not used by validate")
    try:
        cfg.scatter
    except ScatteringError as exc:
        raise UsageError(f"config: {exc}") from None


def _fmt(v) -> str:
    return format(float(v), f".{DIGITS}g")


def _header(cfg: RunConfig, extra: dict | None = None) -> list[str]:
    meta = {"program": "abvortex", "version": __version__, "backend": BACKEND}
    meta.update({k: _plain(v) for k, v in cfg.echo().items()})
    meta.update(extra or {})
    return [f"# {k}={v if isinstance(v, str) else json.dumps(v)}" for k, v in meta.items()]


def _plain(v):
    if isinstance(v, float):
        return float(_fmt(v))
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    return v


def _write_csv(path: Path, header: list[str], columns: list[str], rows):
    lines = header + [",".join(columns)]
    lines += [",".join(r) for r in rows]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _tier_values(cfg: RunConfig, scatter: ScatterConfig, k, phi, tier):
    """Cross section and per-row flags; numeric failures become flagged NaN rows."""
    try:
        if tier == "exact":
            v, flags = exact_xsec(scatter, k, phi, regulated=True, threads=cfg.threads)
            return v, [str(f) for f in flags]
        if tier == "quasiclassical":
            return quasiclassical_xsec(scatter, k, phi), [str(f) for f in qclass_flags(scatter, phi)]
        return classical_density(scatter, phi), [""] * len(phi)
    except ScatteringError as exc:
        flag = f"error:{type(exc).__name__}"
        return np.full(len(phi), math.nan), [flag] * len(phi)


def _rows(phi, values, tier, flags, lead=()):
    for p, v, fl in zip(phi, values, flags):
        yield [*lead, _fmt(p), _fmt(v), tier, fl]


def _totals(scatter: ScatterConfig) -> dict:
    out = {}
    for name, fn in (("sigma_tot", total_xsec), ("sigma_classical", classical_total)):
        try:
            out[name] = fn(scatter)
        except ScatteringError:
            out[name] = None
    return out


def _write_summary(out: Path, cfg: RunConfig, report: ValidationReport, extra: dict | None = None):
    doc = {"config": cfg.echo(), "totals": _totals(cfg.scatter), "checks": report.to_list(),
           "pass": report.passed}
    doc["config"].update({"program": "abvortex", "version": __version__, "backend": BACKEND})
    doc.update(extra or {})
    with open(out / "summary.json", "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(doc, indent=2, sort_keys=True, allow_nan=False, default=_json_default) + "\n")


def _json_default(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    raise TypeError(type(v).__name__)


def _grid(cfg: RunConfig) -> np.ndarray:
    return np.linspace(cfg.phi_min, cfg.phi_max, cfg.grid)


def _run_xsec(cfg: RunConfig, out: Path) -> ValidationReport:
    phi = _grid(cfg)
    scatter, k = cfg.scatter, cfg.wavenumber
    for tier in cfg.tiers:
        values, flags = _tier_values(cfg, scatter, k, phi, tier)
        _write_csv(out / f"xsec_{tier}.csv", _header(cfg, {"file_tier": tier}),
                   ["phi", "dsigma_dphi", "tier", "flag"], _rows(phi, values, tier, flags))
    return ValidationReport()


def _run_sweep(cfg: RunConfig, out: Path) -> ValidationReport:
    phi = _grid(cfg) if cfg.phi is None else np.array([cfg.phi])
    rows = []
    for value in cfg.values:
        point = replace(cfg, **{cfg.axis: value})
        if cfg.axis == "k":
            point = replace(point, krc=None)
        elif cfg.axis == "krc":
            point = replace(point, k=None)
        try:
            scatter = point.scatter
        except ScatteringError as exc:
            bad = [f"error:{type(exc).__name__}"] * phi.size
            for tier in cfg.tiers:
                rows.extend(_rows(phi, np.full(phi.size, math.nan), tier, bad, (_fmt(value),)))
            continue
        for tier in cfg.tiers:
            values, flags = _tier_values(point, scatter, point.wavenumber, phi, tier)
            rows.extend(_rows(phi, values, tier, flags, (_fmt(value),)))
    _write_csv(out / f"sweep_{cfg.axis}.csv", _header(cfg),
               [cfg.axis, "phi", "dsigma_dphi", "tier", "flag"], rows)
    return ValidationReport()


def _run_mc(cfg: RunConfig, out: Path) -> ValidationReport:
    hist = mc_xsec(cfg.scatter, cfg.samples, cfg.bins, cfg.seed, threads=cfg.threads)
    flags = ["" if c else "empty" for c in hist.counts]
    _write_csv(out / "mc_classical.csv", _header(cfg, {"rng": hist.metadata["rng"]}),
               ["phi", "dsigma_dphi", "tier", "flag"], _rows(hist.centers, hist.density, "classical_mc", flags))
    return ValidationReport()


def _run_validate(cfg: RunConfig, out: Path) -> tuple[ValidationReport, dict]:
    scatter, k = cfg.scatter, cfg.wavenumber
    report, skipped = ValidationReport(), {}
    if scatter.eta == 0.0:
        report += optical_theorem_euclidean(scatter, k)
    elif 0.0 < scatter.eta < 0.5:
        report += optical_theorem_conical(scatter, k)
    else:
        skipped["optical_theorem"] = "needs 0 <= eta < 1/2"
    if k * scatter.r_c >= 50 and scatter.eta < 0.5:
        report += tier_equivalence(scatter, k, mc_samples=cfg.samples, seed=cfg.seed, threads=cfg.threads)
    else:
        skipped["tier_equivalence"] = "needs k*rc >= 50 and eta < 1/2"
    if cfg.ladder:
        report += convergence_order(scatter, cfg.ladder, threads=cfg.threads)
    return report, {"skipped": skipped}


def run(cfg: RunConfig) -> int:
    """Execute one command; 0 iff every requested validation passed."""
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    extra = None
    if cfg.command == "validate":
        report, extra = _run_validate(cfg, out)
    else:
        report = {"xsec": _run_xsec, "sweep": _run_sweep, "mc": _run_mc}[cfg.command](cfg, out)
    _write_summary(out, cfg, report, extra)
    return 0 if report.passed else 1


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"abvortex: usage error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(cfg)
    except OSError as exc:
        print(f"abvortex: I/O error: {exc}", file=sys.stderr)
        return 1
    except ScatteringError as exc:
        print(f"abvortex: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1

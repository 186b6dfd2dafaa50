"""Cross-tier consistency checks.

Every check is a :class:`Check` whose pass rule is
``|value - reference| <= tolerance * max(1, |reference|)``. Inequalities are
recorded as the amount by which the bound is exceeded (reference 0,
tolerance 0), with the measured quantity kept in ``metadata``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .classical import classical_density, classical_total, mc_xsec
from .core import ScatterConfig, classify_region, effective_flux, opening_angle, wrap_angle
from .errors import ConfigurationError, UnsupportedRegimeError, WrongBranchError
from .partialwave import (SummationParams, build_phase_shifts, core_amplitude_array,
                          exact_xsec, forward_amplitude, singular_guard)
from .quasiclassical import (optical_terms, qclass_xsec, quasiclassical_xsec, total_xsec)

__all__ = [
    "Check",
    "ValidationReport",
    "bound_check",
    "core_unitarity",
    "optical_theorem_euclidean",
    "optical_theorem_conical",
    "off_peak_grid",
    "convergence_order",
    "tier_equivalence",
]

CLOSURE_TOL = 1e-12
CONSERVATION_TOL = 1e-3
SLOPE_LIMIT = -0.10
PEAK_EXCLUSION_ZEROS = 5


def _plain(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return [_plain(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, dict):
        return {str(a): _plain(b) for a, b in v.items()}
    return v


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    reference: float
    tolerance: float
    metadata: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        if not (math.isfinite(self.value) and math.isfinite(self.reference)):
            return False
        return abs(self.value - self.reference) <= self.tolerance * max(1.0, abs(self.reference))

    def to_dict(self) -> dict:
        return {"name": self.name, "value": float(self.value), "reference": float(self.reference),
                "tolerance": float(self.tolerance), "pass": self.passed,
                "metadata": _plain(self.metadata)}


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple = ()

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def __add__(self, other: "ValidationReport") -> "ValidationReport":
        return ValidationReport(self.checks + other.checks)

    def __getitem__(self, name: str) -> Check:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def names(self) -> list[str]:
        return [c.name for c in self.checks]

    def to_list(self) -> list[dict]:
        return [c.to_dict() for c in self.checks]


def bound_check(name: str, measured: float, limit: float, **metadata) -> Check:
    """Check for ``measured <= limit``; the value is the excess over the bound."""
    excess = max(0.0, float(measured) - float(limit)) if math.isfinite(measured) else math.inf
    meta = {"measured": float(measured), "limit": float(limit), "relation": "<="}
    meta.update(metadata)
    return Check(name, excess, 0.0, 0.0, meta)


def core_unitarity(config: ScatterConfig, k: float, alpha_eff: float,
                   params: SummationParams | None = None) -> Check:
    """``int |f_c|^2 dphi = (4/k) sum Re t_n`` for the finite-core amplitude.

    Follows from ``Re t_n = |t_n|^2``. The quadrature is exact for the
    trigonometric polynomial once the grid has more points than twice its
    degree, so the residual measures Bessel accuracy and unitarity.
    """
    table = build_phase_shifts(config, k, params, alpha_eff)
    nz = np.nonzero(table.core_factor)[0]
    span = int(nz[-1] - nz[0]) if nz.size else 0
    m = 2 * span + 64
    phi = -math.pi + 2 * math.pi * np.arange(m) / m
    f = core_amplitude_array(config, k, phi, alpha_eff, params, table)
    integral = float(np.sum(np.abs(f) ** 2) * 2 * math.pi / m)
    ref = float(4.0 / k * np.sum(table.core_factor.real))
    return Check(f"core_unitarity[alpha={alpha_eff:g}]", integral, ref, CONSERVATION_TOL,
                 {"k_rc": k * config.r_c, "quadrature_points": m})


def _exact_optical(config, k, a, params):
    """Full optical theorem; defined for integer flux where ``f_0`` is a pure delta."""
    table = build_phase_shifts(config, k, params, a)
    nz = np.nonzero(table.core_factor)[0]
    m = 2 * int(nz[-1] - nz[0]) + 64 if nz.size else 64
    phi = -math.pi + 2 * math.pi * np.arange(m) / m
    f = core_amplitude_array(config, k, phi, a, params, table)
    sigma = float(np.sum(np.abs(f) ** 2) * 2 * math.pi / m)
    lhs = 2 * math.cos(math.pi * a) * math.sqrt(2 * math.pi / k) * forward_amplitude(config, k, a, params).imag
    return Check(f"optical_theorem_exact[alpha={a:g}]", lhs, sigma, CONSERVATION_TOL,
                 {"k_rc": k * config.r_c})


def optical_theorem_euclidean(config: ScatterConfig, k: float, exact: bool = True,
                              params: SummationParams | None = None) -> ValidationReport:
    """Short-wavelength optical theorem with the reconstructed peak amplitude.

    With ``exact`` the finite-core conservation identity is closed as well,
    plus the full optical theorem when the flux is integer.
    """
    if config.eta != 0.0:
        raise WrongBranchError("optical_theorem_euclidean needs eta = 0")
    checks = []
    ref = total_xsec(config)
    for a in sorted({a for a, _ in effective_flux(config)}):
        first, second = optical_terms(config, k, a)
        checks.append(Check(f"peak_optical_closure[alpha={a:g}]", first + second, ref, CLOSURE_TOL,
                            {"width_term": first, "peak_term": second}))
        if exact:
            checks.append(core_unitarity(config, k, a, params))
            if a == round(a):
                checks.append(_exact_optical(config, k, a, params))
    return ValidationReport(tuple(checks))


def optical_theorem_conical(config: ScatterConfig, k: float, exact: bool = True,
                            params: SummationParams | None = None) -> ValidationReport:
    """Two-peak optical theorem; the width term alone equals ``2 r_c (1 - eta)``."""
    if config.eta == 0.0:
        raise WrongBranchError("optical_theorem_conical needs eta != 0")
    if not 0.0 < config.eta < 0.5:
        raise UnsupportedRegimeError(f"conical optical theorem checked for 0 < eta < 1/2, got {config.eta}")
    checks = []
    ref = total_xsec(config)
    half = classical_total(config)
    for a in sorted({a for a, _ in effective_flux(config)}):
        cos_term, sin_term, width = optical_terms(config, k, a)
        checks.append(Check(f"peak_optical_closure[alpha={a:g}]", cos_term + sin_term + width, ref,
                            CLOSURE_TOL, {"cos_term": cos_term, "sin_term": sin_term}))
        checks.append(Check(f"peak_width_term[alpha={a:g}]", width, half, CLOSURE_TOL))
        if exact:
            checks.append(core_unitarity(config, k, a, params))
    return ValidationReport(tuple(checks))


def _peak_directions(eta):
    return (0.0,) if eta == 0.0 else (opening_angle(eta), -opening_angle(eta))


def off_peak_grid(config: ScatterConfig, krc_min: float, count: int = 800) -> np.ndarray:
    """Uniform angles with the peak (and region-boundary) neighbourhoods removed.

    The exclusion radius is five kernel zero spacings at the smallest
    hardness, so it covers every larger ``k r_c`` as well.
    """
    phi = -math.pi + 2 * math.pi * np.arange(1, count + 1) / count
    radius = PEAK_EXCLUSION_ZEROS * 2 * math.pi / (krc_min * (1 - config.eta))
    keep = np.ones(phi.size, dtype=bool)
    for s in _peak_directions(config.eta):
        keep &= np.abs(wrap_angle(phi - s)) > radius
    return phi[keep]


def _check_grid(config, krc, phi):
    radius = PEAK_EXCLUSION_ZEROS * 2 * math.pi / (krc * (1 - config.eta))
    for s in _peak_directions(config.eta):
        if np.any(np.abs(wrap_angle(phi - s)) <= radius):
            raise ConfigurationError(f"grid enters a peak neighbourhood at k r_c={krc}")


def convergence_order(config: ScatterConfig, krc_list, grid=None,
                      params: SummationParams | None = None,
                      threads: int | None = None) -> ValidationReport:
    """Fit the decay of ``sup | |f_exact| - |f_qclass| | / sqrt(r_c)`` with hardness."""
    krc = [float(v) for v in krc_list]
    if len(krc) < 3 or any(v < 20 for v in krc) or any(b <= a for a, b in zip(krc, krc[1:])):
        raise ConfigurationError("need at least three increasing k r_c values, each >= 20")
    phi = off_peak_grid(config, krc[0]) if grid is None else np.asarray(grid, dtype=float)
    for v in krc:
        _check_grid(config, v, phi)
    errors = []
    for v in krc:
        k = v / config.r_c
        ex, _ = exact_xsec(config, k, phi, params, threads=threads)
        qc = quasiclassical_xsec(config, k, phi)
        errors.append(float(np.max(np.abs(np.sqrt(ex) - np.sqrt(qc))) / math.sqrt(config.r_c)))
    slope = float(np.polyfit(np.log(krc), np.log(errors), 1)[0])
    meta = {"k_rc": krc, "sup_errors": errors, "grid_points": int(phi.size)}
    return ValidationReport((
        bound_check("convergence_slope", slope, SLOPE_LIMIT, **meta),
        bound_check("convergence_monotone", errors[-1] / errors[0], 1.0 - 1e-12, **meta),
    ))


def _fresnel_phase(phi, values, wavenumber):
    window = np.hanning(phi.size)
    centred = (values - np.mean(values)) * window
    return complex(np.sum(centred * np.exp(-1j * wavenumber * phi)))


def tier_equivalence(config: ScatterConfig, k: float, grid=None, mc_samples: int = 200_000,
                     bins: int = 90, seed: int = 0, params: SummationParams | None = None,
                     threads: int | None = None) -> ValidationReport:
    """Compare exact, quasiclassical and Monte Carlo tiers at one hardness.

    Records the off-peak deviations between the exact and quasiclassical
    cross sections, the Monte Carlo chi-square against the analytic
    classical density, the backscattering value, the shadow intensity for
    ``eta < 0`` and the phase of the forward Fresnel oscillation for
    ``0 < eta < 1/2``.
    """
    krc = k * config.r_c
    if krc < 50:
        raise ConfigurationError("tier_equivalence needs k r_c >= 50")
    phi = off_peak_grid(config, krc) if grid is None else np.asarray(grid, dtype=float)
    ex, _ = exact_xsec(config, k, phi, params, threads=threads)
    qc = quasiclassical_xsec(config, k, phi)
    lit = np.array([classify_region(config.eta, float(p)).name != "SHADOW" for p in phi])
    rel = np.abs(ex - qc)[lit] / np.maximum(qc[lit], 1e-300)
    meta = {"k_rc": krc, "sup_abs": float(np.max(np.abs(ex - qc))),
            "sup_rel": float(rel.max()), "mean_rel": float(rel.mean())}
    checks = [bound_check("exact_vs_quasiclassical_mean_rel", float(rel.mean()), 0.1, **meta)]

    back, _ = exact_xsec(config, k, [math.pi], params)
    back_ref = qclass_xsec(config, k, math.pi)
    checks.append(Check("backscatter_exact_vs_classical", float(back[0]), back_ref,
                        0.1 * back_ref / max(1.0, back_ref),
                        {"relative_deviation": float(abs(back[0] / back_ref - 1))}))

    hist = mc_xsec(config, mc_samples, bins, seed, threads=threads)
    x, w = np.polynomial.legendre.leggauss(16)
    lo, hi = hist.edges[:-1, None], hist.edges[1:, None]
    ref = (classical_density(config, 0.5 * (hi - lo) * x + 0.5 * (hi + lo)) * w).sum(axis=1) / 2
    mask = hist.counts > 0
    chi2 = float(np.sum(((hist.density - ref)[mask] / hist.sigma[mask]) ** 2) / max(mask.sum(), 1))
    empty_where_dark = bool(np.all(hist.counts[ref == 0] == 0))
    checks.append(bound_check("mc_vs_classical_chi2", chi2, 1.5, bins=int(mask.sum()),
                              rng=hist.metadata["rng"], seed=seed))
    checks.append(Check("mc_empty_where_classically_dark", float(not empty_where_dark), 0.0, 0.0))

    if config.eta < 0:
        w_ = abs(opening_angle(config.eta))
        guard = singular_guard(config, k, params)
        dark = np.linspace(-(w_ - 2 * guard), w_ - 2 * guard, 101)
        lit_phi = np.linspace(w_ + 2 * guard, math.pi, 200)
        d, _ = exact_xsec(config, k, dark, params)
        l_, _ = exact_xsec(config, k, lit_phi, params)
        ratio = float(np.mean(d) / np.mean(l_))
        checks.append(bound_check("shadow_to_illuminated_ratio", ratio, 0.1))
    elif config.eta > 0:
        e = config.eta
        wavenumber = 2 * krc * (1 - e) * math.cos(0.5 * e * math.pi)
        half = min(0.3, 0.9 * (opening_angle(e) - singular_guard(config, k, params)))
        fwd = np.linspace(-half, half, 1201)
        d, _ = exact_xsec(config, k, fwd, params)
        pe = _fresnel_phase(fwd, d, wavenumber)
        pq = _fresnel_phase(fwd, qclass_xsec(config, k, fwd), wavenumber)
        diff = abs(math.remainder(np.angle(pe) - np.angle(pq), 2 * math.pi))
        checks.append(bound_check("fresnel_phase_offset", diff, math.pi / 2,
                                  exact_phase=float(np.angle(pe)), qclass_phase=float(np.angle(pq))))
    return ValidationReport(tuple(checks))

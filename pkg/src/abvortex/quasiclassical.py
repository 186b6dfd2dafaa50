"""Closed-form short-wavelength cross sections.

In Euclidean space the amplitude splits into a classical part with
``d sigma/d phi = (r_c/2) sin(phi/2)`` and a forward Fraunhofer peak. In
conical space the peak splits into two flux-independent peaks at
``phi = +-omega``. For ``0 < eta < 1/2`` the wedge between them is reached
by rays from both sides of the core and the two images interfere with a
flux-dependent phase; for ``eta < 0`` it is a classical shadow.

The smoothed delta function is the Fejer kernel
``Delta_x(phi) = sin(x phi)**2 / (pi x phi**2)``, which is the exact
Fraunhofer pattern of a strip of width ``2x/k``.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .core import (RegionKind, ScatterConfig, Spin, classify_region, effective_flux,
                   opening_angle, require_closed_form_regime, wrap_angle)
from .errors import DomainError, RegionError, UnsupportedRegimeError, WrongBranchError

__all__ = [
    "SmoothedDeltaKernel",
    "PeakBranch",
    "PeakSpec",
    "Parity",
    "FresnelValidityWarning",
    "SHADOW_NOTE",
    "smoothed_delta",
    "classical_like_xsec",
    "peak_xsec_euclidean",
    "peak_xsec_conical",
    "qclass_amplitude",
    "qclass_xsec",
    "qclass_flags",
    "fresnel_forward_xsec",
    "fresnel_validity_ratio",
    "quasiclassical_xsec",
    "total_xsec",
    "gate_factor",
    "semifluxon_gate_identity",
    "forward_peak_amplitudes",
    "optical_terms",
    "optical_closure",
]

SHADOW_NOTE = "shadow: suppressed as sqrt(r_c) (k r_c)**(-1/6), set to 0"
FRESNEL_RATIO_LIMIT = 0.1


class FresnelValidityWarning(UserWarning):
    """The forward Fresnel formula is used outside its asymptotic regime."""


class PeakBranch(enum.Enum):
    FORWARD = "forward"
    PLUS = "plus"
    MINUS = "minus"


class Parity(enum.Enum):
    """Parity of ``n`` for a flux of ``n`` semifluxons."""

    EVEN = "even"
    ODD = "odd"

    @property
    def sign(self) -> int:
        return 1 if self is Parity.EVEN else -1


@dataclass(frozen=True)
class SmoothedDeltaKernel:
    """Fejer kernel of sharpness ``x``; tends to ``delta(phi)`` as ``x -> inf``."""

    x: float

    def __post_init__(self):
        if not (self.x > 0) or not math.isfinite(self.x):
            raise DomainError(f"kernel sharpness x={self.x} must be positive")

    def __call__(self, phi):
        return smoothed_delta(self.x, phi)

    @property
    def peak(self) -> float:
        return self.x / math.pi


@dataclass(frozen=True)
class PeakSpec:
    center: float
    branch: PeakBranch
    amplitude_at_center: complex


def smoothed_delta(x: float, phi):
    """``sin(x phi)**2 / (pi x phi**2)``, equal to ``x/pi`` at ``phi = 0``."""
    if not (x > 0):
        raise DomainError(f"kernel sharpness x={x} must be positive")
    p = np.asarray(phi, dtype=float)
    if np.any(np.abs(p) >= math.pi):
        raise DomainError("smoothed delta is defined on (-pi, pi)")
    out = _fejer(x, p)
    return out if out.ndim else float(out)


def _fejer(x, p):
    # sin(u)/u written through sinc to keep phi = 0 exact; no domain check
    return x / math.pi * np.sinc(x * np.asarray(p) / math.pi) ** 2


def _scalar_or_array(values, like):
    return values if np.ndim(like) else float(values)


def _branches(config):
    return effective_flux(config)


def classical_like_xsec(config: ScatterConfig, phi):
    """Flux-independent single-image cross section.

    ``(1/2) r_c (1 - eta)**2 sin((1 - eta)|phi|/2 + eta pi/2)``; mirror
    symmetric in ``phi``. At ``eta = 0`` this is the hard-disk result.
    """
    p = np.asarray(phi, dtype=float)
    e = config.eta
    for v in np.atleast_1d(p):
        if abs(v) > math.pi:
            raise DomainError(f"angle {v} outside [-pi, pi]")
        region = classify_region(e, float(v))
        if region is not RegionKind.SINGLE_IMAGE:
            raise RegionError(f"phi={v} lies in the {region.name.lower()} region")
    a = np.abs(p)
    out = 0.5 * config.r_c * (1 - e) ** 2 * np.sin(0.5 * (1 - e) * a + 0.5 * e * math.pi)
    return _scalar_or_array(out, phi)


def peak_xsec_euclidean(config: ScatterConfig, k: float, phi):
    """Forward Fraunhofer peak of the Euclidean vortex.

    ``2 r_c {cos(2 pi a) D_x(phi) + [1 - cos(2 pi a) - sin(2 pi a) sin(x phi)] D_{x/2}(phi)}``
    with ``x = k r_c``.
    """
    if config.eta != 0.0:
        raise WrongBranchError("the single forward peak exists only for eta = 0")
    if np.any(np.abs(np.asarray(phi, dtype=float)) >= math.pi):
        raise DomainError("the forward peak is defined on (-pi, pi)")
    return _euclidean_peak(config, k, phi)


def _euclidean_peak(config, k, phi):
    x = k * config.r_c
    total = 0.0
    for a, weight in _branches(config):
        c, s = math.cos(2 * math.pi * a), math.sin(2 * math.pi * a)
        p = np.asarray(phi, dtype=float)
        total = total + weight * 2 * config.r_c * (
            c * _fejer(x, p) + (1 - c - s * np.sin(x * p)) * _fejer(x / 2, p))
    return _scalar_or_array(total, phi)


def peak_xsec_conical(config: ScatterConfig, k: float, phi, branch: PeakBranch):
    """One of the two flux-independent Fraunhofer peaks at ``phi = +-omega``."""
    if config.eta == 0.0:
        raise WrongBranchError("use peak_xsec_euclidean for eta = 0")
    require_closed_form_regime(config.eta)
    if branch is PeakBranch.FORWARD:
        raise DomainError("conical peaks are PLUS or MINUS")
    shift = opening_angle(config.eta) * (1 if branch is PeakBranch.PLUS else -1)
    x = 0.5 * k * config.r_c * (1 - config.eta)
    p = np.asarray(phi, dtype=float) - shift
    return config.r_c * (1 - config.eta) * smoothed_delta(x, p)


def _require_double_image(config, phi):
    if not 0.0 < config.eta < 0.5:
        if config.eta >= 0.5:
            raise UnsupportedRegimeError(f"eta={config.eta} >= 1/2 has no closed form here")
        raise RegionError(f"eta={config.eta} has no double-image region")
    w = opening_angle(config.eta)
    if np.any(np.abs(np.asarray(phi)) >= w):
        raise RegionError(f"angles must lie inside the double-image wedge |phi| < {w:.6g}")


def qclass_amplitude(config: ScatterConfig, k: float, phi, alpha_eff: float | None = None):
    """Two-image quasiclassical amplitude inside the double-image wedge."""
    _require_double_image(config, phi)
    if alpha_eff is None:
        branches = _branches(config)
        if len(branches) != 1:
            raise DomainError("unpolarized beam: pass alpha_eff for one spin branch")
        alpha_eff = branches[0][0]
    e, x = config.eta, k * config.r_c
    p = np.asarray(phi, dtype=float)
    pref = -config.interior_phase(k) * np.sqrt(config.r_c / 2j) * (1 - e)
    total = 0
    for sgn in (1, -1):
        c = np.cos(0.5 * (1 - e) * (p - sgn * math.pi))
        total = total + np.sqrt(c) * np.exp(1j * alpha_eff * (p - sgn * math.pi) - 2j * x * c)
    out = pref * total
    return out if np.ndim(out) else complex(out)


def _double_image_xsec(config, k, p, a):
    e, x = config.eta, k * config.r_c
    h = 0.5 * e * math.pi
    th = 0.5 * (1 - e) * p
    root = np.sqrt(np.clip(math.sin(h) ** 2 - np.sin(th) ** 2, 0.0, None))
    osc = np.cos(2 * math.pi * a + 4 * x * np.sin(th) * math.cos(h))
    return config.r_c * (1 - e) ** 2 * (np.cos(th) * math.sin(h) + root * osc)


def qclass_xsec(config: ScatterConfig, k: float, phi):
    """Region-dispatched quasiclassical cross section without the peaks.

    Double image: two-image interference. Single image: the flux-independent
    classical-like value. Shadow: 0 (see :func:`qclass_flags`).
    """
    require_closed_form_regime(config.eta)
    p = np.atleast_1d(np.asarray(phi, dtype=float))
    if np.any(np.abs(p) > math.pi):
        raise DomainError("angles must lie in [-pi, pi]")
    out = np.zeros(p.shape)
    kinds = [classify_region(config.eta, float(v)) for v in p]
    single = np.array([kd is RegionKind.SINGLE_IMAGE for kd in kinds])
    double = np.array([kd is RegionKind.DOUBLE_IMAGE for kd in kinds])
    if single.any():
        out[single] = classical_like_xsec(config, p[single])
    if double.any():
        for a, weight in _branches(config):
            out[double] += weight * _double_image_xsec(config, k, p[double], a)
    return out if np.ndim(phi) else float(out[0])


def qclass_flags(config: ScatterConfig, phi):
    """``"shadow"`` where :func:`qclass_xsec` returns the suppressed value 0."""
    p = np.atleast_1d(np.asarray(phi, dtype=float))
    return np.array(["shadow" if classify_region(config.eta, float(v)) is RegionKind.SHADOW
                     else "" for v in p])


def fresnel_validity_ratio(config: ScatterConfig, k: float) -> float:
    """``sin(1/(2 k r_c)) / sin(eta pi / 2)``; the forward formula needs it small."""
    return math.sin(1.0 / (2 * k * config.r_c)) / math.sin(0.5 * config.eta * math.pi)


def _check_forward_window(config, k, phi):
    if not 0.0 < config.eta < 0.5:
        raise UnsupportedRegimeError(f"forward double-image formulas need 0 < eta < 1/2, got {config.eta}")
    if np.any((1 - config.eta) * np.abs(np.asarray(phi, dtype=float)) >= 1.0 / (k * config.r_c)):
        raise DomainError("angle outside the forward window (1 - eta)|phi| < 1/(k r_c)")


def fresnel_forward_xsec(config: ScatterConfig, k: float, phi):
    """Forward Fresnel cross section ``2 r_c (1-eta)^2 sin(eta pi/2) cos^2(pi a + X)``.

    ``X = k r_c (1 - eta) phi cos(eta pi / 2)``. Warns with
    :class:`FresnelValidityWarning` when :func:`fresnel_validity_ratio`
    exceeds 0.1.
    """
    _check_forward_window(config, k, phi)
    ratio = fresnel_validity_ratio(config, k)
    if ratio > FRESNEL_RATIO_LIMIT:
        warnings.warn(f"forward Fresnel formula outside its regime (ratio {ratio:.3g} > "
                      f"{FRESNEL_RATIO_LIMIT})", FresnelValidityWarning, stacklevel=2)
    e, x = config.eta, k * config.r_c
    h = 0.5 * e * math.pi
    p = np.asarray(phi, dtype=float)
    total = 0.0
    for a, weight in _branches(config):
        total = total + weight * 2 * config.r_c * (1 - e) ** 2 * math.sin(h) * \
            np.cos(math.pi * a + x * (1 - e) * p * math.cos(h)) ** 2
    return _scalar_or_array(total, phi)


def quasiclassical_xsec(config: ScatterConfig, k: float, phi):
    """Full short-wavelength ``d sigma/d phi``: quasiclassical part plus peaks.

    The two conical peaks are added incoherently; their offsets from the
    peak centres are wrapped into ``(-pi, pi]``.
    """
    p = np.asarray(phi, dtype=float)
    base = qclass_xsec(config, k, p)
    if config.eta == 0.0:
        return _scalar_or_array(base + _euclidean_peak(config, k, p), phi)
    w = opening_angle(config.eta)
    x = 0.5 * k * config.r_c * (1 - config.eta)
    peaks = 0.0
    for shift in (w, -w):
        off = np.asarray(wrap_angle(p - shift))
        # a wrapped offset may equal pi, so the unchecked kernel is used
        peaks = peaks + config.r_c * (1 - config.eta) * _fejer(x, off)
    return _scalar_or_array(base + peaks, phi)


def total_xsec(config: ScatterConfig) -> float:
    """``4 r_c (1 - eta)``: twice the classical geometric cross section."""
    if config.eta >= 1.0:
        raise DomainError("eta must be below 1")
    return 4.0 * config.r_c * (1.0 - config.eta)


def gate_factor(config: ScatterConfig, k: float, phi, parity: Parity):
    """Forward gate ``F`` for a flux of ``n`` semifluxons.

    ``Spin.SPINLESS``: ``1 +- cos(2X)``; unpolarized: ``1 +- cos(2X) cos(eta pi)``;
    polarized ``sigma``: ``1 +- cos(2X - sigma eta pi)``; the sign is ``+`` for
    even ``n``.
    """
    _check_forward_window(config, k, phi)
    e = config.eta
    two_x = 2 * k * config.r_c * (1 - e) * np.asarray(phi, dtype=float) * math.cos(0.5 * e * math.pi)
    s = parity.sign
    if config.spin is Spin.SPINLESS:
        out = 1 + s * np.cos(two_x)
    elif config.spin is Spin.UNPOLARIZED:
        out = 1 + s * np.cos(two_x) * math.cos(e * math.pi)
    else:
        out = 1 + s * np.cos(two_x - config.spin.sigma * e * math.pi)
    return _scalar_or_array(out, phi)


def semifluxon_gate_identity(config: ScatterConfig, k: float, phi):
    """Both sides of the semifluxon sum rule.

    ``lhs`` adds the quasiclassical cross sections at ``n`` and ``n + 1/2``
    flux quanta, ``n = floor(alpha)``; ``rhs`` is twice the flux-independent
    double-image term ``r_c (1-eta)^2 sin(eta pi/2) cos((1-eta) phi/2)``.
    """
    _check_forward_window(config, k, phi)
    if config.spin is not Spin.SPINLESS:
        raise DomainError("the semifluxon identity is stated for spinless particles")
    n = math.floor(config.alpha)
    lhs = qclass_xsec(config.with_alpha(n), k, phi) + qclass_xsec(config.with_alpha(n + 0.5), k, phi)
    e = config.eta
    p = np.asarray(phi, dtype=float)
    rhs = 2 * config.r_c * (1 - e) ** 2 * math.sin(0.5 * e * math.pi) * np.cos(0.5 * (1 - e) * p)
    return lhs, _scalar_or_array(rhs, phi)


def forward_peak_amplitudes(config: ScatterConfig, k: float,
                            alpha_eff: float | None = None) -> list[PeakSpec]:
    """Peak amplitudes at their centres, phases fixed by optical-theorem closure."""
    if alpha_eff is None:
        branches = _branches(config)
        if len({a for a, _ in branches}) != 1:
            raise DomainError("unpolarized beam: pass alpha_eff for one spin branch")
        alpha_eff = branches[0][0]
    root = math.sqrt(k / (2 * math.pi))
    if config.eta == 0.0:
        amp = 2j * config.r_c * math.cos(math.pi * alpha_eff) * root
        return [PeakSpec(0.0, PeakBranch.FORWARD, complex(amp))]
    w = opening_angle(config.eta)
    beta = alpha_eff * (math.pi + w)
    base = 1j * root * config.r_c * (1 - config.eta) * config.interior_phase(k)
    return [PeakSpec(w, PeakBranch.PLUS, complex(base * np.exp(1j * beta))),
            PeakSpec(-w, PeakBranch.MINUS, complex(base * np.exp(-1j * beta)))]


def optical_terms(config: ScatterConfig, k: float, alpha_eff: float | None = None) -> tuple:
    """Terms of the short-wavelength optical theorem for one spin branch.

    Euclidean: ``(sin^2(pi a) (2 pi/k) D_{2x}(0), 2 cos(pi a) sqrt(2 pi/k) Im f_peak(0))``.
    Conical: the ``cos``, ``sin`` and peak-width terms, with the interior phase removed.
    """
    specs = forward_peak_amplitudes(config, k, alpha_eff)
    if alpha_eff is None:
        alpha_eff = _branches(config)[0][0]
    root = math.sqrt(2 * math.pi / k)
    x = k * config.r_c
    if config.eta == 0.0:
        a = alpha_eff
        return (math.sin(math.pi * a) ** 2 * 2 * math.pi / k * smoothed_delta(2 * x, 0.0),
                2 * math.cos(math.pi * a) * root * specs[0].amplitude_at_center.imag)
    e = config.eta
    beta = alpha_eff * (math.pi + opening_angle(e))
    undo = np.conj(config.interior_phase(k))
    fp, fm = specs[0].amplitude_at_center * undo, specs[1].amplitude_at_center * undo
    return (float(math.cos(beta) * root * (fp + fm).imag),
            float(-math.sin(beta) * root * (fp - fm).real),
            math.pi / k * smoothed_delta(2 * x * (1 - e), 0.0))


def optical_closure(config: ScatterConfig, k: float, alpha_eff: float | None = None) -> float:
    """Left side of the short-wavelength optical theorem built from the peak amplitudes.

    Equals :func:`total_xsec` when the peak phases are consistent.
    """
    return float(sum(optical_terms(config, k, alpha_eff)))

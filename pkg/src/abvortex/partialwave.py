"""Exact scattering amplitude from the partial-wave expansion.

Mode ``n`` of the hamiltonian has radial order ``nu_n = |n - alpha|/(1 - eta)``.
Matching the incoming part of the expansion to the incident wave makes the
outgoing coefficient of mode ``n``

    s_n = exp(i pi (|n| - nu_n)) * (1 - 2 t_n),   t_n = J_nu(k r_c) / H1_nu(k r_c),

and the far-field amplitude (outgoing wave ``f exp(ikr) sqrt(i/r)``) is

    f(phi) = 1/(i sqrt(2 pi k)) * sum_n (s_n - 1) exp(i n phi)
           = f_0(phi) + f_c(phi)

with the idealized-vortex part ``f_0`` (the ``t_n``-free terms) and the
finite-core part ``f_c = 2i/sqrt(2 pi k) sum_n exp(i pi(|n| - nu_n)) t_n exp(i n phi)``.

``f_c`` converges absolutely. The ``f_0`` summand does not decay; it is
summed with a regulator. Beyond a finite head the summand is exactly
geometric in ``exp(i(phi -/+ omega))``, so the Abel limit is evaluated in
closed form; Gaussian and Cesaro windows are numeric cross-check families.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .core import (AngleGrid, ScatterConfig, Spin, classify_region, effective_flux,
                   opening_angle, require_closed_form_regime, wrap_angle)
from .errors import ConfigurationError, DomainError, NumericError, RegionError
from .specfun import hankel1_ratio

__all__ = [
    "SummationParams",
    "PhaseShiftTable",
    "DistortedIdentity",
    "AmplitudeSample",
    "mode_order",
    "required_n_max",
    "build_phase_shifts",
    "exact_amplitude",
    "exact_amplitude_array",
    "exact_xsec",
    "core_amplitude_array",
    "forward_amplitude",
    "idealized_series",
    "singular_directions",
    "singular_guard",
    "identity_kernel",
    "incident_wave",
]

TAIL_CUTOFF = 1e-14
REGULATORS = ("abel", "gaussian", "cesaro")
_DEFAULT_STRENGTH = {"abel": 2e-3, "gaussian": 2000.0, "cesaro": 40000.0}


@dataclass(frozen=True)
class SummationParams:
    """Truncation and regularization settings.

    Parameters
    ----------
    n_max : int, optional
        Largest ``|n|`` kept. Chosen automatically when ``None``.
    regulator : {"abel", "gaussian", "cesaro"}
        Summation family for the non-decaying idealized-vortex series.
    strength : float, optional
        Abel damping ``lambda``, Gaussian width ``w`` (in modes) or the length
        ``L`` of the third-order Cesaro window ``(1 - |n - alpha|/L)**3``. ``None`` with ``"abel"`` gives the exact ``lambda -> 0`` limit;
        the numeric families then use their default strength.
    margin : float
        Constant ``C`` multiplying ``(k r_c)**(1/3)`` in the truncation bound.
    guard : float, optional
        Half-width of the excluded neighbourhood of each singular direction.
    rtol : float
        Agreement demanded between two regulator strengths.
    """

    n_max: int | None = None
    regulator: str = "abel"
    strength: float | None = None
    margin: float = 6.0
    guard: float | None = None
    rtol: float = 1e-6

    def __post_init__(self):
        if self.regulator not in REGULATORS:
            raise ConfigurationError(f"unknown regulator {self.regulator!r}")
        if self.margin < 6.0:
            raise ConfigurationError("margin constant C must be >= 6")
        if self.strength is not None and not self.strength > 0:
            raise ConfigurationError("regulator strength must be positive")


@dataclass(frozen=True)
class PhaseShiftTable:
    n: np.ndarray
    nu: np.ndarray
    core_factor: np.ndarray
    k: float
    alpha_eff: float
    config: ScatterConfig

    @property
    def n_max(self) -> int:
        return int(self.n[-1])

    def entry(self, n: int) -> tuple[float, complex]:
        i = n - int(self.n[0])
        return float(self.nu[i]), complex(self.core_factor[i])

    def reflection(self) -> np.ndarray:
        """Dirichlet reflection ``1 - 2 t_n = -H2/H1``; unimodular."""
        return 1.0 - 2.0 * self.core_factor


@dataclass(frozen=True)
class DistortedIdentity:
    """Angular delta structure of the unity part of the S-matrix.

    ``entries`` holds ``(shift, phase, weight)``: the kernel is
    ``overall_phase * sum weight * phase * Delta(phi - shift)``.
    """

    entries: tuple
    overall_phase: complex = 1.0 + 0.0j


@dataclass(frozen=True)
class AmplitudeSample:
    phi: float
    value: complex
    tier: str
    weight: float = 1.0
    alpha_eff: float = 0.0
    flag: str = ""


def mode_order(n: int, eta: float, alpha_eff: float) -> float:
    if eta >= 1.0:
        raise DomainError(f"eta={eta} closes the cone")
    return abs(n - alpha_eff) / (1.0 - eta)


def required_n_max(krc: float, eta: float, alpha_eff: float = 0.0, margin: float = 6.0) -> int:
    """Smallest admissible truncation.

    Covers the Airy band ``nu ~ k r_c`` on both sides. For ``eta < 0`` the
    order grows slower than ``|n|``, so the mode count is scaled by
    ``1 - eta`` as well.
    """
    band = krc + margin * krc ** (1.0 / 3.0) + 20.0
    plain = math.ceil(krc / (1.0 - eta)) + math.ceil(margin * krc ** (1.0 / 3.0)) + 20
    cover = math.ceil(abs(alpha_eff) + (1.0 - eta) * band)
    return int(max(plain, cover))


def _branch_alpha(config: ScatterConfig, alpha_eff):
    if alpha_eff is not None:
        return float(alpha_eff)
    branches = effective_flux(config)
    if len(branches) != 1:
        raise ConfigurationError("unpolarized beam: pass alpha_eff for one spin branch")
    return branches[0][0]


def build_phase_shifts(config: ScatterConfig, k: float, params: SummationParams | None = None,
                       alpha_eff: float | None = None) -> PhaseShiftTable:
    """Dirichlet core factors ``J_nu(k r_c)/H1_nu(k r_c)`` for ``|n| <= n_max``."""
    params = params or SummationParams()
    if not k > 0:
        raise DomainError(f"k={k} must be positive")
    a = _branch_alpha(config, alpha_eff)
    x = k * config.r_c
    need = required_n_max(x, config.eta, a, params.margin)
    n_max = need if params.n_max is None else params.n_max
    if n_max < need:
        raise ConfigurationError(f"n_max={n_max} is below the required {need} for k r_c={x}")
    n = np.arange(-n_max, n_max + 1)
    nu = np.abs(n - a) / (1.0 - config.eta)
    t = np.zeros(n.size, dtype=complex)
    # walk outwards from the smallest order; the tail beyond k r_c decays monotonically
    order = np.argsort(nu, kind="stable")
    small_run = 0
    for idx in order:
        if small_run >= 4 and nu[idx] > x:
            break
        v = hankel1_ratio(float(nu[idx]), x)
        if abs(v) < TAIL_CUTOFF and nu[idx] > x:
            small_run += 1
            continue
        small_run = 0
        t[idx] = v
    for arr in (n, nu, t):
        arr.setflags(write=False)
    return PhaseShiftTable(n, nu, t, float(k), a, config)


def singular_directions(eta: float) -> tuple[float, ...]:
    if eta == 0.0:
        return (0.0,)
    w = opening_angle(eta)
    return (wrap_angle(w), wrap_angle(-w))


def singular_guard(config: ScatterConfig, k: float, params: SummationParams | None = None) -> float:
    """Half-width of the excluded neighbourhood around each singular direction."""
    if params is not None and params.guard is not None:
        return params.guard
    return min(10.0 / (k * config.r_c * (1.0 - config.eta)), 0.05)


def _distance_to_singular(phi, eta):
    phi = np.asarray(phi, dtype=float)
    d = np.full(phi.shape, np.inf)
    for s in singular_directions(eta):
        d = np.minimum(d, np.abs(wrap_angle(phi - s)))
    return d


def _mode_phase(n, nu):
    """``exp(i pi (|n| - nu_n))`` with the integer part reduced first."""
    return np.exp(1j * math.pi * (np.mod(np.abs(n), 2) - nu)) if np.ndim(n) else \
        complex(np.exp(1j * math.pi * ((abs(n) % 2) - nu)))


def _f0_abel_limit(phi, alpha, eta):
    """``sum_n (u_n - 1) exp(i n phi)`` in the Abel limit, closed form.

    At an exactly singular direction the Hadamard finite part (the pole of the
    regulated sum removed) is returned; the pole belongs to the identity
    kernel, not to the amplitude.
    """
    phi = np.asarray(phi, dtype=float)
    w = opening_angle(eta)
    top = max(0, math.ceil(alpha))
    bot = min(0, math.floor(alpha), top - 1)
    head = np.arange(bot + 1, top)
    total = np.zeros(phi.shape, dtype=complex)
    if head.size:
        u = _mode_phase(head, np.abs(head - alpha) / (1.0 - eta))
        total += np.exp(1j * np.multiply.outer(phi, head)) @ u
    cp = np.exp(1j * alpha * (math.pi + w))
    cm = np.conj(cp)
    # exponents reduced mod 2*pi before exponentiation
    zp = np.exp(1j * wrap_angle(phi - w))
    zm = np.exp(1j * wrap_angle(phi + w))
    sing_p = np.abs(wrap_angle(phi - w)) == 0.0
    sing_m = np.abs(wrap_angle(phi + w)) == 0.0
    with np.errstate(divide="ignore", invalid="ignore"):
        tp = np.where(sing_p, 0.5 - (top - alpha), zp ** top / (1.0 - zp))
        tm = np.where(sing_m, 0.5 - (alpha - bot), zm ** (bot + 1) / (zm - 1.0))
    total += cp * tp + cm * tm
    # the "-1" series sums to zero off-axis and has zero finite part on-axis
    return total


def _window(regulator, strength, dist):
    if regulator == "abel":
        return np.exp(-strength * dist)
    if regulator == "gaussian":
        return np.exp(-(dist / strength) ** 2)
    # third-order Cesaro (Riesz) mean: the boundary term drops to O(L**-3)
    return np.clip(1.0 - dist / strength, 0.0, None) ** 3


def _window_span(regulator, strength):
    if regulator == "abel":
        return 40.0 / strength
    if regulator == "gaussian":
        return 6.5 * strength
    return strength


def _f0_windowed(phi, alpha, eta, regulator, strength):
    """Numerically regulated ``sum_n (u_n - 1) g(|n - alpha|) exp(i n phi)``."""
    span = _window_span(regulator, strength)
    lo, hi = math.floor(alpha - span), math.ceil(alpha + span)
    n = np.arange(lo, hi + 1)
    dist = np.abs(n - alpha)
    coef = (_mode_phase(n, dist / (1.0 - eta)) - 1.0) * _window(regulator, strength, dist)
    return kernels.fourier_sum(phi, lo, coef)


def _f0_extrapolated(phi, alpha, eta, regulator, strength):
    if regulator == "abel":
        # two Richardson steps remove the O(lambda) and O(lambda^2) terms
        s1 = _f0_windowed(phi, alpha, eta, regulator, strength)
        s2 = _f0_windowed(phi, alpha, eta, regulator, strength / 2)
        s4 = _f0_windowed(phi, alpha, eta, regulator, strength / 4)
        return (8.0 * s4 - 6.0 * s2 + s1) / 3.0
    if regulator == "gaussian":
        s1 = _f0_windowed(phi, alpha, eta, regulator, strength)
        s2 = _f0_windowed(phi, alpha, eta, regulator, 2 * strength)
        return (4.0 * s2 - s1) / 3.0
    s1 = _f0_windowed(phi, alpha, eta, regulator, strength)
    s2 = _f0_windowed(phi, alpha, eta, regulator, 2 * strength)
    return 2.0 * s2 - s1


def idealized_series(phi, alpha: float, eta: float, params: SummationParams | None = None):
    """Regulated ``sum_n (exp(i pi(|n| - nu_n)) - 1) exp(i n phi)`` (no prefactor)."""
    params = params or SummationParams()
    if params.regulator == "abel" and params.strength is None:
        return _f0_abel_limit(phi, alpha, eta)
    strength = params.strength or _DEFAULT_STRENGTH[params.regulator]
    best = _f0_extrapolated(phi, alpha, eta, params.regulator, strength)
    weaker = strength * 2 if params.regulator == "abel" else strength / 2
    check = _f0_extrapolated(phi, alpha, eta, params.regulator, weaker)
    scale = np.maximum(np.abs(best), 1.0)
    err = np.abs(best - check) / scale
    if np.any(err > params.rtol):
        raise NumericError(f"{params.regulator} regulator not converged",
                           max_rel_change=float(err.max()), strength=strength)
    return best


def _core_series(phi, table: PhaseShiftTable):
    keep = np.nonzero(table.core_factor)[0]
    if keep.size == 0:
        return np.zeros(np.shape(phi), dtype=complex)
    lo, hi = keep[0], keep[-1] + 1
    n = table.n[lo:hi]
    coef = _mode_phase(n, table.nu[lo:hi]) * table.core_factor[lo:hi]
    return kernels.fourier_sum(phi, int(n[0]), coef)


def _chunked(fn, phi, threads):
    if threads is None or threads <= 1 or phi.size < 64:
        return fn(phi)
    parts = np.array_split(phi, threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return np.concatenate(list(pool.map(fn, parts)))


def exact_amplitude_array(config: ScatterConfig, k: float, phi, alpha_eff=None,
                          params: SummationParams | None = None, regulated: bool = False,
                          threads: int | None = None, table: PhaseShiftTable | None = None):
    """Exact amplitude of one spin branch on an array of angles.

    Returns
    -------
    f : ndarray of complex
    flags : ndarray of str
        ``"distributional"`` inside the singular-direction guard, else ``""``.
    """
    params = params or SummationParams()
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    if np.any(np.abs(phi) > math.pi):
        raise DomainError("angles must lie in [-pi, pi]")
    a = _branch_alpha(config, alpha_eff)
    near = _distance_to_singular(phi, config.eta) < singular_guard(config, k, params)
    if np.any(near) and not regulated:
        raise DomainError("angle inside the singular-direction guard; pass regulated=True")
    if table is None:
        table = build_phase_shifts(config, k, params, a)
    pref = 1.0 / (1j * math.sqrt(2.0 * math.pi * k))

    def work(p):
        f0 = idealized_series(p, a, config.eta, params)
        fc = -2.0 * _core_series(p, table)
        return pref * (f0 + fc)

    f = _chunked(work, phi, threads)
    if config.eta != 0.0:
        f = f * config.interior_phase(k)
    flags = np.where(near, "distributional", "")
    return f, flags


def core_amplitude_array(config: ScatterConfig, k: float, phi, alpha_eff=None,
                         params: SummationParams | None = None,
                         table: PhaseShiftTable | None = None):
    """Finite-core part ``f_c`` alone; smooth everywhere, no guard needed."""
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    a = _branch_alpha(config, alpha_eff)
    if table is None:
        table = build_phase_shifts(config, k, params, a)
    f = 2j / math.sqrt(2.0 * math.pi * k) * _core_series(phi, table)
    return f * config.interior_phase(k) if config.eta != 0.0 else f


def exact_amplitude(config: ScatterConfig, k: float, grid: AngleGrid,
                    params: SummationParams | None = None, regulated: bool = False,
                    threads: int | None = None) -> list[AmplitudeSample]:
    """Exact amplitude on a grid, one sample per angle and spin branch."""
    out = []
    for a, weight in effective_flux(config):
        f, flags = exact_amplitude_array(config, k, grid.phi, a, params, regulated, threads)
        out.extend(AmplitudeSample(float(p), complex(v), "exact", weight, a, str(fl))
                   for p, v, fl in zip(grid.phi, f, flags))
    return out


def exact_xsec(config: ScatterConfig, k: float, phi, params: SummationParams | None = None,
               regulated: bool = False, threads: int | None = None):
    """``d sigma / d phi`` of the exact tier, spin branches added incoherently."""
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    total = np.zeros(phi.shape)
    flags = None
    for a, weight in effective_flux(config):
        f, flags = exact_amplitude_array(config, k, phi, a, params, regulated, threads)
        total += weight * np.abs(f) ** 2
    return total, flags


def forward_amplitude(config: ScatterConfig, k: float, alpha_eff=None,
                      params: SummationParams | None = None) -> complex:
    """Regulated amplitude at ``phi = 0`` (finite part at singular directions)."""
    f, _ = exact_amplitude_array(config, k, [0.0], alpha_eff, params, regulated=True)
    return complex(f[0])


def identity_kernel(config: ScatterConfig, k: float, alpha_eff=None) -> DistortedIdentity:
    a = _branch_alpha(config, alpha_eff)
    if config.eta == 0.0:
        return DistortedIdentity(((0.0, 1.0 + 0.0j, math.cos(math.pi * a)),), 1.0 + 0.0j)
    w = opening_angle(config.eta)
    beta = a * (math.pi + w)
    return DistortedIdentity(
        ((w, complex(np.exp(1j * beta)), 0.5), (-w, complex(np.exp(-1j * beta)), 0.5)),
        config.interior_phase(k))


def incident_wave(config: ScatterConfig, k: float, r: float, phi: float, alpha_eff=None) -> complex:
    """Asymptotic incident field at ``(r, phi)`` outside the core.

    In conical space the double-image wedge receives the two-term sum;
    elsewhere only the branch whose classical ray reaches ``phi`` survives.
    """
    require_closed_form_regime(config.eta)
    if not r > config.r_c:
        raise DomainError(f"r={r} must exceed the core radius")
    a = _branch_alpha(config, alpha_eff)
    phi = float(wrap_angle(phi))
    if config.eta == 0.0:
        p = phi % (2 * math.pi)
        return complex(np.exp(1j * k * r * math.cos(p)) * np.exp(1j * a * (p - math.pi)))
    e = config.eta

    def term(sign):
        s = phi - sign * math.pi
        return np.exp(-1j * k * r * math.cos((1 - e) * s)) * np.exp(1j * a * s)

    region = classify_region(e, phi)
    if region.name == "SHADOW":
        raise RegionError("no incident ray reaches the shadow region")
    if region.name == "DOUBLE_IMAGE":
        return complex((1 - e) * (term(1) + term(-1)))
    sign = 1 if phi >= 0 else -1
    return complex((1 - e) * term(sign))

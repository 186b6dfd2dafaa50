"""Domain types, cone geometry and flux/spin arithmetic shared by all tiers.

Angles are radians throughout; the scattering angle ``phi`` is measured from
the incident direction, so ``phi = 0`` is strictly forward and ``phi = pi``
is backward.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, DomainError, UnsupportedRegimeError

__all__ = [
    "Spin",
    "RegionKind",
    "ScatterConfig",
    "Kinematics",
    "AngleGrid",
    "opening_angle",
    "effective_flux",
    "classify_region",
    "reduce_flux",
    "require_closed_form_regime",
]


class Spin(enum.Enum):
    """Spin mode of the scattered particle.

    ``UP`` and ``DOWN`` are the two polarized spin-1/2 states with projection
    sigma = +1 and sigma = -1 on the vortex axis.
    """

    SPINLESS = "none"
    UP = "up"
    DOWN = "down"
    UNPOLARIZED = "unpolarized"

    @property
    def sigma(self) -> int:
        return {Spin.UP: 1, Spin.DOWN: -1}.get(self, 0)


class RegionKind(enum.Enum):
    SHADOW = "shadow"
    DOUBLE_IMAGE = "double_image"
    SINGLE_IMAGE = "single_image"


@dataclass(frozen=True)
class ScatterConfig:
    """Physical scenario: flux, cone deficit, core size and spin.

    Parameters
    ----------
    alpha : float
        Enclosed flux in units of the London flux quantum.
    eta : float
        Deficit parameter of the cone, ``eta < 1``; negative values describe
        a proficit angle.
    r_c : float
        Radius of the impenetrable core.
    xi_c : float, optional
        Geodesic radius of the core. Defaults to ``r_c``, which makes the
        interior phase ``exp(2ik(r_c - xi_c))`` trivial.
    spin : Spin
    """

    alpha: float
    eta: float = 0.0
    r_c: float = 1.0
    xi_c: float | None = None
    spin: Spin = Spin.SPINLESS

    def __post_init__(self):
        for name in ("alpha", "eta", "r_c"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.eta >= 1.0:
            raise DomainError(f"eta={self.eta} closes the cone (need eta < 1)")
        if self.r_c <= 0.0:
            raise DomainError(f"r_c={self.r_c} must be positive")
        if self.xi_c is None:
            object.__setattr__(self, "xi_c", float(self.r_c))
        elif not self.xi_c > 0.0:
            raise DomainError(f"xi_c={self.xi_c} must be positive")
        if not isinstance(self.spin, Spin):
            object.__setattr__(self, "spin", Spin(self.spin))

    @property
    def omega(self) -> float:
        return opening_angle(self.eta)

    @property
    def is_euclidean(self) -> bool:
        return self.eta == 0.0

    def interior_phase(self, k: float) -> complex:
        """``exp(2ik(r_c - xi_c))``; exactly 1 when ``xi_c == r_c``."""
        d = self.r_c - self.xi_c
        if d == 0.0:
            return 1.0 + 0.0j
        return complex(np.exp(2j * k * d))

    def with_alpha(self, alpha: float) -> "ScatterConfig":
        return ScatterConfig(alpha, self.eta, self.r_c, self.xi_c, self.spin)


@dataclass(frozen=True)
class Kinematics:
    """Transverse wavenumber; ``m``, ``E`` and ``k_z`` enter only through it."""

    k: float

    def __post_init__(self):
        if not (self.k > 0.0 and math.isfinite(self.k)):
            raise DomainError(f"k={self.k} must be positive and finite")

    @classmethod
    def from_krc(cls, krc: float, r_c: float) -> "Kinematics":
        return cls(krc / r_c)

    def hardness(self, r_c: float) -> float:
        return self.k * r_c


@dataclass(frozen=True)
class AngleGrid:
    """Strictly increasing angles inside a declared closed interval."""

    phi: np.ndarray
    lo: float = -math.pi
    hi: float = math.pi
    uniform: bool = field(default=False, compare=False)

    def __post_init__(self):
        phi = np.asarray(self.phi, dtype=float).ravel()
        if phi.size == 0:
            raise ConfigurationError("angle grid is empty")
        if phi.size > 1 and not np.all(np.diff(phi) > 0):
            raise ConfigurationError("angle grid must be strictly increasing")
        if phi[0] < self.lo or phi[-1] > self.hi:
            raise DomainError(
                f"grid [{phi[0]}, {phi[-1]}] leaves the domain [{self.lo}, {self.hi}]")
        phi.setflags(write=False)
        object.__setattr__(self, "phi", phi)

    @classmethod
    def linspace(cls, lo: float, hi: float, count: int) -> "AngleGrid":
        if count < 2:
            raise ConfigurationError("grid count must be at least 2")
        return cls(np.linspace(lo, hi, count), lo, hi, uniform=True)

    @classmethod
    def explicit(cls, values, lo=-math.pi, hi=math.pi) -> "AngleGrid":
        return cls(np.asarray(values, dtype=float), lo, hi)

    def __len__(self):
        return self.phi.size

    def __iter__(self):
        return iter(self.phi.tolist())


def opening_angle(eta: float) -> float:
    """Half-angle ``eta*pi/(1-eta)`` of the wedge behind the vortex."""
    if eta >= 1.0:
        raise DomainError(f"eta={eta} closes the cone (need eta < 1)")
    return eta * math.pi / (1.0 - eta)


def effective_flux(config: ScatterConfig) -> list[tuple[float, float]]:
    """Flux values seen by each spin branch, with their statistical weights.

    A spin-1/2 particle in conical space feels the flux shifted by
    ``-sigma*eta/2``; the unpolarized beam is the equal-weight incoherent
    mixture of both projections.
    """
    a, h = config.alpha, 0.5 * config.eta
    if config.spin is Spin.SPINLESS:
        return [(a, 1.0)]
    if config.spin is Spin.UNPOLARIZED:
        return [(a - h, 0.5), (a + h, 0.5)]
    return [(a - config.spin.sigma * h, 1.0)]


def require_closed_form_regime(eta: float) -> None:
    if eta >= 0.5:
        raise UnsupportedRegimeError(
            f"eta={eta}: closed forms cover eta < 1/2 only")


def classify_region(eta: float, phi: float) -> RegionKind:
    """Classical region containing the scattering angle ``phi``."""
    require_closed_form_regime(eta)
    if abs(phi) > math.pi:
        raise DomainError(f"|phi|={abs(phi)} exceeds pi")
    if eta == 0.0:
        return RegionKind.SINGLE_IMAGE
    w = abs(opening_angle(eta))
    if abs(phi) < w:
        return RegionKind.SHADOW if eta < 0 else RegionKind.DOUBLE_IMAGE
    return RegionKind.SINGLE_IMAGE


def reduce_flux(alpha: float) -> float:
    """Map ``alpha`` to its period-1 representative in ``[-1/2, 1/2)``."""
    r = math.fmod(alpha + 0.5, 1.0)
    if r < 0.0:
        r += 1.0
    return r - 0.5


def wrap_angle(phi):
    """Wrap angles into ``(-pi, pi]``."""
    w = np.mod(np.asarray(phi, dtype=float) + math.pi, 2.0 * math.pi) - math.pi
    w = np.where(w == -math.pi, math.pi, w)
    return w if w.ndim else float(w)

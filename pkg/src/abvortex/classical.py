"""Classical hard-core scattering in cone geometry.

In the chart ``(r, phi_t)`` with ``phi_t = (1 - eta) phi`` the cone is a flat
wedge of opening ``2 pi (1 - eta)`` whose edges are identified, so rays are
straight lines. Impact parameters are measured in the units of
``r_t = (1 - eta) r``, in which the capture strip has width
``2 r_c (1 - eta)``; a ray with ``b > 0`` passes on the upper side.

Rays missing the core leave along the wedge directions ``-sign(b) omega``.
A ray hitting the core reflects specularly; with ``sin(theta) = -b/(r_c (1 - eta))``
it leaves at ``phi = pi + 2 theta / (1 - eta)``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .core import ScatterConfig, opening_angle, require_closed_form_regime, wrap_angle
from .errors import ConfigurationError, DomainError

__all__ = [
    "Trajectory",
    "Histogram",
    "RNG_ALGORITHM",
    "CHUNK_SIZE",
    "capture_half_width",
    "deflect",
    "deflect_many",
    "classical_density",
    "mc_xsec",
    "classical_total",
]

CHUNK_SIZE = 1 << 16
RNG_ALGORITHM = f"numpy PCG64, SeedSequence.spawn per chunk of {CHUNK_SIZE} samples"
MIN_SAMPLES = 10_000


@dataclass(frozen=True)
class Trajectory:
    impact_parameter: float
    hit: bool
    exit_angle: float | None


@dataclass(frozen=True)
class Histogram:
    """Reflected-ray histogram normalized to ``d sigma/d phi``.

    Attributes
    ----------
    edges : ndarray
        ``bins + 1`` edges spanning ``[-pi, pi]``.
    counts : ndarray of int
    weight : float
        Cross section carried by one sample.
    """

    edges: np.ndarray
    counts: np.ndarray
    weight: float
    n_samples: int
    metadata: dict = field(default_factory=dict)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def density(self) -> np.ndarray:
        return self.counts * self.weight / self.widths

    @property
    def sigma(self) -> np.ndarray:
        """Poisson standard error of :attr:`density`."""
        return np.sqrt(self.counts) * self.weight / self.widths

    @property
    def total(self) -> float:
        return float(self.counts.sum() * self.weight)


def capture_half_width(config: ScatterConfig) -> float:
    return config.r_c * (1.0 - config.eta)


def deflect_many(b, config: ScatterConfig):
    """Vectorized :func:`deflect`; returns ``(hit, exit_angle)`` arrays."""
    require_closed_form_regime(config.eta)
    b = np.asarray(b, dtype=float)
    half = capture_half_width(config)
    hit = np.abs(b) <= half
    theta = np.arcsin(np.clip(-b / half, -1.0, 1.0))
    reflected = wrap_angle(math.pi + 2.0 * theta / (1.0 - config.eta))
    missed = -np.sign(b) * opening_angle(config.eta)
    return hit, np.where(hit, reflected, missed)


def deflect(b: float, config: ScatterConfig) -> Trajectory:
    hit, angle = deflect_many(b, config)
    return Trajectory(float(b), bool(hit), float(angle))


def classical_density(config: ScatterConfig, phi):
    """Analytic reflected-ray ``d sigma/d phi``, all images summed.

    Each covering angle ``psi = (1 - eta)(phi - pi + 2 pi m)`` with
    ``|psi| < pi`` is one image and contributes ``r_c (1 - eta)^2 cos(psi/2) / 2``.
    """
    require_closed_form_regime(config.eta)
    p = np.asarray(phi, dtype=float)
    e = config.eta
    total = np.zeros(p.shape)
    m_max = int(math.ceil(1.0 / (1.0 - e))) + 1
    for m in range(-m_max, m_max + 1):
        psi = (1 - e) * (p - math.pi + 2 * math.pi * m)
        inside = np.abs(psi) < math.pi
        total += np.where(inside, 0.5 * config.r_c * (1 - e) ** 2 * np.cos(psi / 2), 0.0)
    return total if total.ndim else float(total)


def _chunk_counts(config, seed_seq, size, edges):
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    half = capture_half_width(config)
    b = rng.uniform(-half, half, size)
    hit, angle = deflect_many(b, config)
    counts, _ = np.histogram(angle[hit], bins=edges)
    return counts


def mc_xsec(config: ScatterConfig, n_samples: int, bins: int, seed: int,
            threads: int | None = None) -> Histogram:
    """Monte Carlo reflected-ray cross section over the capture strip.

    Samples are drawn in fixed-size chunks, each from its own spawned
    substream, so the histogram does not depend on ``threads``.
    """
    require_closed_form_regime(config.eta)
    if int(n_samples) != n_samples or n_samples < MIN_SAMPLES:
        raise ConfigurationError(f"n_samples must be an integer >= {MIN_SAMPLES}")
    if int(bins) != bins or bins < 1:
        raise ConfigurationError("bins must be a positive integer")
    n_samples, bins = int(n_samples), int(bins)
    edges = np.linspace(-math.pi, math.pi, bins + 1)
    sizes = [CHUNK_SIZE] * (n_samples // CHUNK_SIZE)
    if n_samples % CHUNK_SIZE:
        sizes.append(n_samples % CHUNK_SIZE)
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = list(zip(seeds, sizes))

    def run(job):
        return _chunk_counts(config, job[0], job[1], edges)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, jobs))
    else:
        parts = [run(j) for j in jobs]
    counts = np.sum(parts, axis=0)
    weight = 2.0 * capture_half_width(config) / n_samples
    meta = {"rng": RNG_ALGORITHM, "seed": seed, "chunks": len(sizes)}
    return Histogram(edges, counts, weight, n_samples, meta)


def classical_total(config: ScatterConfig) -> float:
    """Geometric cross section ``2 r_c (1 - eta)``."""
    if config.eta >= 1.0:
        raise DomainError("eta must be below 1")
    return 2.0 * config.r_c * (1.0 - config.eta)

"""Periodic lattice geometry, finite differences and the spectral Poisson solver.

Conventions used throughout the package (unit spacing, periodic wraparound):

* forward difference   (d+_mu s)(z) = s(z + mu) - s(z)
* backward difference  (d-_mu s)(z) = s(z) - s(z - mu)
* div+ v = sum_mu d+_mu v_mu,  div- v = sum_mu d-_mu v_mu
* Laplacian = div+ grad-, the symmetric (2D+1)-point stencil

With this pairing ``sum v . grad+ s == -sum (div- v) s`` holds identically,
which is what makes dressed phases exactly gauge invariant on the lattice.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from itertools import product
from typing import Iterator, Sequence

import numpy as np
import scipy.fft

from .errors import (
    CapacityError,
    DimensionError,
    DirectionError,
    LatticeMismatchError,
    NonNeutralSourceError,
    SiteError,
)

DEFAULT_MAX_SITES = 2**24
MAX_DIM = 4
NEUTRALITY_TOL = 1e-12


def fft_workers() -> int:
    """Worker count for FFTs, capped by ``DRESSAGE_THREADS`` when set."""
    value = os.environ.get("DRESSAGE_THREADS")
    if not value:
        return 1
    try:
        return max(1, int(value))
    except ValueError:
        return 1


@dataclass(frozen=True)
class Lattice:
    """Periodic hypercubic lattice with unit spacing and row-major site order."""

    dims: tuple[int, ...]

    @property
    def ndim(self) -> int:
        return len(self.dims)

    @property
    def volume(self) -> int:
        return math.prod(self.dims)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.dims

    def normalize_site(self, site) -> tuple[int, ...]:
        """Reduce a site (tuple of ints, or a flat index) onto the torus."""
        if isinstance(site, (int, np.integer)):
            if not 0 <= site < self.volume:
                raise SiteError(f"site index {site} outside [0, {self.volume})")
            return self.site(int(site))
        site = tuple(site)
        if len(site) != self.ndim or not all(isinstance(c, (int, np.integer)) for c in site):
            raise SiteError(f"site {site!r} is not a {self.ndim}-tuple of integers")
        return tuple(int(c) % n for c, n in zip(site, self.dims))

    def index(self, site) -> int:
        return int(np.ravel_multi_index(self.normalize_site(site), self.dims))

    def site(self, index: int) -> tuple[int, ...]:
        return tuple(int(c) for c in np.unravel_index(index, self.dims))

    def sites(self) -> Iterator[tuple[int, ...]]:
        return product(*(range(n) for n in self.dims))

    def unit(self, mu: int, step: int = 1) -> tuple[int, ...]:
        check_direction(self, mu)
        return tuple(step if d == mu else 0 for d in range(self.ndim))

    def reflect(self, site) -> tuple[int, ...]:
        return tuple((-c) % n for c, n in zip(self.normalize_site(site), self.dims))

    def displacements(self, origin=None) -> np.ndarray:
        """Minimal-image displacement of every site from ``origin``; shape (D, *dims)."""
        origin = self.normalize_site(origin or (0,) * self.ndim)
        grids = np.indices(self.dims)
        out = np.empty(grids.shape, dtype=float)
        for mu, n in enumerate(self.dims):
            d = (grids[mu] - origin[mu]) % n
            out[mu] = np.where(d > n / 2, d - n, d)
        return out


def new_lattice(dims: Sequence[int], max_sites: int = DEFAULT_MAX_SITES) -> Lattice:
    dims = tuple(int(n) for n in dims)
    if not 1 <= len(dims) <= MAX_DIM:
        raise DimensionError(f"lattice dimension must be in 1..{MAX_DIM}, got {len(dims)}")
    if any(n < 2 for n in dims):
        raise DimensionError(f"every extent must be >= 2, got {list(dims)}")
    volume = math.prod(dims)
    if volume > max_sites:
        raise CapacityError(f"volume {volume} exceeds cap of {max_sites} sites")
    return Lattice(dims)


def check_direction(lat: Lattice, mu: int) -> int:
    if not isinstance(mu, (int, np.integer)) or not 0 <= mu < lat.ndim:
        raise DirectionError(f"direction {mu!r} invalid for a {lat.ndim}-dimensional lattice")
    return int(mu)


def _frozen(values: np.ndarray) -> np.ndarray:
    values = np.array(values, dtype=float, copy=True)
    values.flags.writeable = False
    return values


@dataclass(frozen=True, eq=False)
class ScalarField:
    """One real number per site, stored as a read-only array of shape ``lattice.dims``."""

    lattice: Lattice
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.size != self.lattice.volume:
            raise LatticeMismatchError(
                f"expected {self.lattice.volume} values, got {values.size}")
        values = values.reshape(self.lattice.dims)
        if not np.all(np.isfinite(values)):
            raise ValueError("scalar field contains non-finite values")
        object.__setattr__(self, "values", _frozen(values))

    @classmethod
    def zeros(cls, lat: Lattice) -> ScalarField:
        return cls(lat, np.zeros(lat.dims))

    @classmethod
    def delta(cls, lat: Lattice, site=None) -> ScalarField:
        out = np.zeros(lat.dims)
        out[lat.normalize_site(site or (0,) * lat.ndim)] = 1.0
        return cls(lat, out)

    def at(self, site) -> float:
        return float(self.values[self.lattice.normalize_site(site)])

    def mean(self) -> float:
        return math.fsum(self.values.ravel()) / self.lattice.volume

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def translate(self, offset) -> ScalarField:
        """Field t with t(z) = s(z - offset)."""
        offset = self.lattice.normalize_site(offset)
        return ScalarField(self.lattice, np.roll(self.values, offset, axis=tuple(range(self.lattice.ndim))))

    def reflect(self) -> ScalarField:
        """Field t with t(z) = s(-z)."""
        return ScalarField(self.lattice, _reflect_array(self.values))

    def __add__(self, other):
        same_lattice(self, other)
        return ScalarField(self.lattice, self.values + other.values)

    def __sub__(self, other):
        same_lattice(self, other)
        return ScalarField(self.lattice, self.values - other.values)

    def __neg__(self):
        return ScalarField(self.lattice, -self.values)

    def __mul__(self, c: float):
        return ScalarField(self.lattice, self.values * c)

    __rmul__ = __mul__


@dataclass(frozen=True, eq=False)
class VectorField:
    """D real components per site; ``values`` has shape ``(D, *lattice.dims)``."""

    lattice: Lattice
    values: np.ndarray

    def __post_init__(self):
        lat = self.lattice
        values = np.asarray(self.values, dtype=float)
        if values.size != lat.ndim * lat.volume:
            raise LatticeMismatchError(
                f"expected {lat.ndim * lat.volume} values, got {values.size}")
        values = values.reshape((lat.ndim,) + lat.dims)
        if not np.all(np.isfinite(values)):
            raise ValueError("vector field contains non-finite values")
        object.__setattr__(self, "values", _frozen(values))

    @classmethod
    def zeros(cls, lat: Lattice) -> VectorField:
        return cls(lat, np.zeros((lat.ndim,) + lat.dims))

    @classmethod
    def constant(cls, lat: Lattice, components: Sequence[float]) -> VectorField:
        comps = np.asarray(components, dtype=float).reshape((lat.ndim,) + (1,) * lat.ndim)
        return cls(lat, np.broadcast_to(comps, (lat.ndim,) + lat.dims))

    def component(self, mu: int) -> ScalarField:
        return ScalarField(self.lattice, self.values[check_direction(self.lattice, mu)])

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def translate(self, offset) -> VectorField:
        offset = self.lattice.normalize_site(offset)
        axes = tuple(range(1, self.lattice.ndim + 1))
        return VectorField(self.lattice, np.roll(self.values, offset, axis=axes))

    def __add__(self, other):
        same_lattice(self, other)
        return VectorField(self.lattice, self.values + other.values)

    def __sub__(self, other):
        same_lattice(self, other)
        return VectorField(self.lattice, self.values - other.values)

    def __neg__(self):
        return VectorField(self.lattice, -self.values)

    def __mul__(self, c: float):
        return VectorField(self.lattice, self.values * c)

    __rmul__ = __mul__


def _reflect_array(a: np.ndarray) -> np.ndarray:
    # a[(-i) % N] along every axis
    out = a
    for axis in range(a.ndim):
        out = np.roll(np.flip(out, axis=axis), 1, axis=axis)
    return out


def same_lattice(*fields) -> Lattice:
    lat = fields[0].lattice
    for f in fields[1:]:
        if f.lattice != lat:
            raise LatticeMismatchError(f"lattice {f.lattice.dims} != {lat.dims}")
    return lat


def forward_diff(s: ScalarField, mu: int) -> ScalarField:
    mu = check_direction(s.lattice, mu)
    return ScalarField(s.lattice, np.roll(s.values, -1, axis=mu) - s.values)


def backward_diff(s: ScalarField, mu: int) -> ScalarField:
    mu = check_direction(s.lattice, mu)
    return ScalarField(s.lattice, s.values - np.roll(s.values, 1, axis=mu))


def grad_fwd(s: ScalarField) -> VectorField:
    v = s.values
    return VectorField(s.lattice, np.stack([np.roll(v, -1, axis=mu) - v for mu in range(v.ndim)]))


def grad_bwd(s: ScalarField) -> VectorField:
    v = s.values
    return VectorField(s.lattice, np.stack([v - np.roll(v, 1, axis=mu) for mu in range(v.ndim)]))


def divergence_fwd(v: VectorField) -> ScalarField:
    comps = v.values
    out = np.zeros(v.lattice.dims)
    for mu in range(v.lattice.ndim):
        out += np.roll(comps[mu], -1, axis=mu) - comps[mu]
    return ScalarField(v.lattice, out)


def divergence_bwd(v: VectorField) -> ScalarField:
    comps = v.values
    out = np.zeros(v.lattice.dims)
    for mu in range(v.lattice.ndim):
        out += comps[mu] - np.roll(comps[mu], 1, axis=mu)
    return ScalarField(v.lattice, out)


def laplacian(s: ScalarField) -> ScalarField:
    """div+ grad- s: sum over mu of s(z+mu) + s(z-mu) - 2 s(z)."""
    return divergence_fwd(grad_bwd(s))


def sum_by_parts_residual(v: VectorField, s: ScalarField) -> float:
    """|sum v . grad+ s + sum (div- v) s|, each sum accumulated exactly rounded."""
    same_lattice(v, s)
    lhs = math.fsum((v.values * grad_fwd(s).values).ravel())
    rhs = math.fsum((divergence_bwd(v).values * s.values).ravel())
    return abs(lhs + rhs)


def laplacian_eigenvalues(lat: Lattice) -> np.ndarray:
    """Fourier symbol of the stencil Laplacian, -sum_mu 4 sin^2(pi k_mu / N_mu)."""
    out = np.zeros(lat.dims)
    for mu, n in enumerate(lat.dims):
        shape = [1] * lat.ndim
        shape[mu] = n
        out = out - (4.0 * np.sin(np.pi * np.arange(n) / n) ** 2).reshape(shape)
    return out


def solve_poisson(src: ScalarField) -> ScalarField:
    """Zero-mean G with div+ grad- G = src, by diagonalizing the stencil with a DFT."""
    lat = src.lattice
    scale = max(1.0, float(np.max(np.abs(src.values))))
    mean = src.mean()
    if abs(mean) > NEUTRALITY_TOL * scale:
        raise NonNeutralSourceError(f"source mean {mean:.3e} is not zero; torus has no solution")
    eig = laplacian_eigenvalues(lat)
    origin = (0,) * lat.ndim
    eig[origin] = 1.0
    workers = fft_workers()
    coeffs = scipy.fft.fftn(src.values, workers=workers) / eig
    coeffs[origin] = 0.0
    return ScalarField(lat, scipy.fft.ifftn(coeffs, workers=workers).real)


def green_function(lat: Lattice) -> ScalarField:
    """Lattice Green's function sourced by a unit charge at the origin on a neutralizing background."""
    src = np.full(lat.dims, -1.0 / lat.volume)
    src[(0,) * lat.ndim] += 1.0
    return solve_poisson(ScalarField(lat, src))

"""U(1) gauge transformations of classical backgrounds.

A gauge transform with function alpha and coupling e acts as

    A_mu  ->  A_mu - (1/e) d+_mu alpha
    sigma ->  sigma - alpha / e

The compensator sigma defines Omega = exp(i e sigma). The combination

    (i / 2e) [Omega^* D_mu Omega - (D_mu Omega)^* Omega],   D_mu = d_mu - i e A_mu

collapses for an abelian group to ``A_mu - d_mu sigma``: the two terms give
``2ie (d sigma - A)``, and the prefactor turns that into ``A - d sigma``.
:func:`invariant_potential` therefore never builds Omega.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.fft

from .errors import ConfigError, CouplingMismatchError, DimensionError
from .lattice import (
    Lattice,
    ScalarField,
    VectorField,
    fft_workers,
    grad_fwd,
    laplacian_eigenvalues,
    same_lattice,
)


def _check_coupling(e: float) -> float:
    e = float(e)
    if e == 0.0 or not math.isfinite(e):
        raise ValueError(f"coupling must be finite and nonzero, got {e}")
    return e


@dataclass(frozen=True, eq=False)
class GaugeTransform:
    alpha: ScalarField
    coupling: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "coupling", _check_coupling(self.coupling))

    @property
    def lattice(self) -> Lattice:
        return self.alpha.lattice

    def inverse(self) -> GaugeTransform:
        return GaugeTransform(-self.alpha, self.coupling)

    def then(self, other: GaugeTransform) -> GaugeTransform:
        if other.coupling != self.coupling:
            raise CouplingMismatchError(f"couplings {self.coupling} and {other.coupling} differ")
        return GaugeTransform(self.alpha + other.alpha, self.coupling)


@dataclass(frozen=True, eq=False)
class StueckelbergField:
    sigma: ScalarField
    coupling: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "coupling", _check_coupling(self.coupling))


@dataclass(frozen=True, eq=False)
class FieldStrength:
    """Antisymmetric F_{mu nu}; ``values`` has shape (D, D, *dims)."""

    lattice: Lattice
    values: np.ndarray

    def component(self, mu: int, nu: int) -> ScalarField:
        return ScalarField(self.lattice, self.values[mu, nu])


def apply_gauge_transform(A: VectorField, g: GaugeTransform) -> VectorField:
    same_lattice(A, g.alpha)
    return VectorField(A.lattice, A.values - grad_fwd(g.alpha).values / g.coupling)


def transform_sigma(sf: StueckelbergField, g: GaugeTransform) -> StueckelbergField:
    same_lattice(sf.sigma, g.alpha)
    if sf.coupling != g.coupling:
        raise CouplingMismatchError(f"compensator coupling {sf.coupling} != transform coupling {g.coupling}")
    return StueckelbergField(sf.sigma - g.alpha * (1.0 / g.coupling), sf.coupling)


def field_strength(A: VectorField) -> FieldStrength:
    lat = A.lattice
    if lat.ndim < 2:
        raise DimensionError("field strength needs at least two dimensions")
    a = A.values
    out = np.zeros((lat.ndim, lat.ndim) + lat.dims)
    for mu in range(lat.ndim):
        for nu in range(mu + 1, lat.ndim):
            f = (np.roll(a[nu], -1, axis=mu) - a[nu]) - (np.roll(a[mu], -1, axis=nu) - a[mu])
            out[mu, nu] = f
            out[nu, mu] = -f
    out.flags.writeable = False
    return FieldStrength(lat, out)


def invariant_potential(A: VectorField, sf: StueckelbergField) -> VectorField:
    same_lattice(A, sf.sigma)
    return A - grad_fwd(sf.sigma)


def _stream_rng(seed: int, stream: int) -> np.random.Generator:
    # Philox is counter-based; (seed, stream) pins an independent substream
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream)])))


def _smoothed_noise(lat: Lattice, seed: int, smoothness: float, stream: int) -> np.ndarray:
    if smoothness < 0:
        raise ValueError(f"smoothness must be nonnegative, got {smoothness}")
    noise = _stream_rng(seed, stream).standard_normal(lat.dims)
    if smoothness > 0:
        weight = np.exp(smoothness * laplacian_eigenvalues(lat))
        workers = fft_workers()
        noise = scipy.fft.ifftn(scipy.fft.fftn(noise, workers=workers) * weight, workers=workers).real
    return noise - math.fsum(noise.ravel()) / lat.volume


def random_scalar(lat: Lattice, seed: int, smoothness: float = 0.0) -> ScalarField:
    """Zero-mean Gaussian noise, low-passed by exp(-smoothness * |lattice momentum|^2)."""
    return ScalarField(lat, _smoothed_noise(lat, seed, smoothness, stream=0))


def random_vector(lat: Lattice, seed: int, smoothness: float = 0.0) -> VectorField:
    comps = [_smoothed_noise(lat, seed, smoothness, stream=1 + mu) for mu in range(lat.ndim)]
    return VectorField(lat, np.stack(comps))


def random_gauge_transform(lat: Lattice, seed: int, smoothness: float = 0.0,
                           constant_offset: float = 0.0, coupling: float = 1.0) -> GaugeTransform:
    # alpha is mean-free unless an offset is asked for, so the global phase is opt-in
    alpha = _smoothed_noise(lat, seed, smoothness, stream=1000) + constant_offset
    return GaugeTransform(ScalarField(lat, alpha), coupling)


def gauge_transform_from_json(lat: Lattice, doc: dict) -> GaugeTransform:
    """Build a transform from ``{"seed", "smoothness", "constant_offset", "coupling"}``."""
    unknown = set(doc) - {"seed", "smoothness", "constant_offset", "coupling"}
    if unknown:
        raise ConfigError(f"unknown gauge-transform keys: {sorted(unknown)}")
    if "seed" not in doc:
        raise ConfigError("gauge-transform document needs a seed")
    return random_gauge_transform(
        lat,
        seed=int(doc["seed"]),
        smoothness=float(doc.get("smoothness", 0.0)),
        constant_offset=float(doc.get("constant_offset", 0.0)),
        coupling=float(doc.get("coupling", 1.0)),
    )


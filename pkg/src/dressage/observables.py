"""Electric field of a dressed charge, Gauss-law residuals and radial profiles.

``E_mu(z)`` lives on the link from z to z + mu. The kernel is stored over r = x - z,
and reflecting r swaps forward and backward stencils, so the field of a charge
at x obeys Gauss's law with the backward divergence:

    div- E (z) = e * (div+ f)(x - z) = e * ([z = x] - background)
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .dressing import DressingKernel
from .errors import BinError, DimensionError
from .fieldio import format_float
from .lattice import ScalarField, VectorField, divergence_bwd


@dataclass(frozen=True)
class RadialProfile:
    radii: tuple[float, ...]
    mean_field: tuple[float, ...]
    counts: tuple[int, ...]

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.radii, self.radii[1:])):
            raise ValueError("profile radii must be strictly increasing")
        if any(c <= 0 for c in self.counts):
            raise ValueError("profile shells must be nonempty")

    def __len__(self):
        return len(self.radii)

    def rows(self):
        return list(zip(self.radii, self.mean_field, self.counts))


def electric_field(k: DressingKernel, x, e: float) -> VectorField:
    """E_mu(z) = -e f_mu(x - z)."""
    lat = k.lattice
    x = lat.normalize_site(x)
    comps = [ScalarField(lat, k.f.values[mu]).reflect().translate(x).values for mu in range(lat.ndim)]
    return VectorField(lat, -e * np.stack(comps))


def gauss_residual(E: VectorField, x, e: float, background: float) -> float:
    lat = E.lattice
    source = np.full(lat.dims, -background)
    source[lat.normalize_site(x)] += 1.0
    return float(np.max(np.abs(divergence_bwd(E).values - e * source)))


def site_magnitude(E: VectorField) -> np.ndarray:
    """|E| per site, after averaging each component over the two links meeting at the site."""
    comps = E.values
    centred = [(comps[mu] + np.roll(comps[mu], 1, axis=mu)) / 2 for mu in range(E.lattice.ndim)]
    return np.sqrt(sum(c * c for c in centred))


def radial_profile(E: VectorField, x, bins: int, width: float = 1.0) -> RadialProfile:
    """Shell means of |E| around x, minimal-image distances.

    Shell i (i = 1..bins) holds sites with (i - 1/2) w <= r < (i + 1/2) w; the
    anchor itself is left out. Each shell reports the mean distance of its
    sites as its radius. Empty shells are dropped.
    """
    if not isinstance(bins, (int, np.integer)) or bins < 2:
        raise BinError(f"need at least 2 bins, got {bins!r}")
    if width <= 0:
        raise BinError(f"shell width must be positive, got {width}")
    lat = E.lattice
    d = lat.displacements(lat.normalize_site(x))
    r = np.sqrt((d * d).sum(axis=0)).ravel()
    mag = site_magnitude(E).ravel()
    shell = np.floor(r / width + 0.5).astype(int)
    radii, means, counts = [], [], []
    for i in range(1, bins + 1):
        members = np.flatnonzero(shell == i)
        if members.size == 0:
            continue
        radii.append(math.fsum(r[members]) / members.size)
        means.append(math.fsum(mag[members]) / members.size)
        counts.append(int(members.size))
    return RadialProfile(tuple(radii), tuple(means), tuple(counts))


def continuum_field(r: float, e: float) -> float:
    return e / (4.0 * math.pi * r * r)


def coulomb_compare(p: RadialProfile, e: float, ndim: int = 3) -> list[tuple[float, float]]:
    """Relative deviation of every shell mean from e / (4 pi r^2)."""
    if ndim != 3:
        raise DimensionError(f"the Coulomb comparison is three-dimensional, got D={ndim}")
    out = []
    for r, mean, _ in p.rows():
        ref = continuum_field(r, abs(e))
        out.append((r, (mean - ref) / ref))
    return out


def profile_csv(p: RadialProfile, e: float, ndim: int = 3) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["r", "mean_E", "count", "continuum_E", "rel_dev"])
    devs = coulomb_compare(p, e, ndim) if ndim == 3 else [(r, float("nan")) for r in p.radii]
    for (r, mean, count), (_, dev) in zip(p.rows(), devs):
        ref = continuum_field(r, abs(e)) if ndim == 3 else float("nan")
        writer.writerow([format_float(r), format_float(mean), count, format_float(ref), format_float(dev)])
    return buf.getvalue()


def source_residual(E: VectorField, k: DressingKernel, x, e: float) -> float:
    """max |div- E(z) - e rho(x - z)|, with rho the kernel's own required divergence."""
    lat = E.lattice
    rho = k.source().reflect().translate(lat.normalize_site(x))
    return float(np.max(np.abs(divergence_bwd(E).values - e * rho.values)))

"""Dressing kernels and the dressing phase functional.

A kernel ``f`` is a vector field over the relative coordinate r = x - z. A charge
at x dressed with ``f`` carries the phase exp(-i Phi(x)) with

    Phi(x) = e * sum_z sum_mu f_mu(x - z) A_mu(z).

Under A -> A - (1/e) d+ alpha, summation by parts turns the change of the phase
angle into ``sum_z rho(x - z) alpha(z)`` where rho = div+ f. That is why every
kernel is characterised by its divergence:

* coulomb / custom: rho = [r = 0] - 1/V (a lone charge needs a neutralizing
  background on the torus)
* path: rho = [r = 0] - [r = sink_offset] (a compensating anticharge at
  z = x - sink_offset)
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy.fft

from . import fieldio
from .errors import ConstraintViolationError, EmptyPathError
from .gauge import GaugeTransform, apply_gauge_transform
from .lattice import (
    Lattice,
    ScalarField,
    VectorField,
    divergence_fwd,
    fft_workers,
    grad_bwd,
    green_function,
    same_lattice,
)

KINDS = ("coulomb", "path", "custom")
COULOMB_TOL = 1e-10
PATH_TOL = 1e-12
AXIS_NAMES = "xyzt"


@dataclass(frozen=True, eq=False)
class DressingKernel:
    f: VectorField
    kind: str
    divergence_residual: float
    background_charge_density: float
    sink_offset: tuple[int, ...] | None = None

    @property
    def lattice(self) -> Lattice:
        return self.f.lattice

    def divergence(self) -> ScalarField:
        return divergence_fwd(self.f)

    def source(self) -> ScalarField:
        """The divergence the kernel is required to have."""
        return expected_divergence(self.lattice, self.kind, self.sink_offset)


@dataclass(frozen=True)
class DressingPhase:
    value: complex
    exponent: float

    def __post_init__(self):
        if abs(abs(self.value) - 1.0) > 1e-12:
            raise ValueError(f"dressing phase {self.value} is not unit modulus")


def expected_divergence(lat: Lattice, kind: str, sink_offset=None) -> ScalarField:
    if kind not in KINDS:
        raise ValueError(f"unknown kernel kind {kind!r}; expected one of {KINDS}")
    rho = np.zeros(lat.dims)
    origin = (0,) * lat.ndim
    if kind == "path":
        if sink_offset is None:
            raise ValueError("path kernels need a sink offset")
        rho[origin] += 1.0
        rho[lat.normalize_site(sink_offset)] -= 1.0
    else:
        rho -= 1.0 / lat.volume
        rho[origin] += 1.0
    return ScalarField(lat, rho)


def _residual(f: VectorField, rho: ScalarField) -> float:
    return float(np.max(np.abs(divergence_fwd(f).values - rho.values)))


def coulomb_kernel(lat: Lattice) -> DressingKernel:
    """f = grad- G, so div+ f is the stencil Laplacian of G, i.e. delta - 1/V."""
    f = grad_bwd(green_function(lat))
    rho = expected_divergence(lat, "coulomb")
    return DressingKernel(f, "coulomb", _residual(f, rho), 1.0 / lat.volume)


def parse_path(text: str, ndim: int | None = None) -> list[tuple[int, int]]:
    """Parse ``"+x,+x,-y"`` (or numeric axes ``"+0,-1"``) into (direction, sign) steps."""
    steps = []
    for token in filter(None, (t.strip() for t in text.split(","))):
        if len(token) < 2 or token[0] not in "+-":
            raise ValueError(f"bad path step {token!r}; expected e.g. +x or -1")
        sign = 1 if token[0] == "+" else -1
        axis = token[1:].lower()
        mu = AXIS_NAMES.index(axis) if axis in AXIS_NAMES else int(axis)
        if ndim is not None and not 0 <= mu < ndim:
            raise ValueError(f"path step {token!r} leaves a {ndim}-dimensional lattice")
        steps.append((mu, sign))
    return steps


def path_kernel(lat: Lattice, path: Sequence[tuple[int, int]]) -> DressingKernel:
    """String kernel along ``path``, a list of (direction, +1/-1) steps in physical space.

    The string runs from the charge at x to its sink at x + sum(steps). In the
    relative coordinate r = x - z that is r = -sum(steps), which becomes
    ``sink_offset``.
    """
    path = list(path)
    if not path:
        raise EmptyPathError("a path kernel needs at least one step")
    f = np.zeros((lat.ndim,) + lat.dims)
    r = [0] * lat.ndim
    for mu, sign in path:
        if not 0 <= mu < lat.ndim or sign not in (1, -1):
            raise ValueError(f"bad step ({mu}, {sign}) for a {lat.ndim}-dimensional lattice")
        # div+ f picks up +f_mu(r) at r - mu and -f_mu(r) at r
        if sign > 0:
            f[(mu,) + lat.normalize_site(r)] -= 1.0
            r[mu] -= 1
        else:
            r[mu] += 1
            f[(mu,) + lat.normalize_site(r)] += 1.0
    sink = lat.normalize_site(r)
    field = VectorField(lat, f)
    rho = expected_divergence(lat, "path", sink)
    return DressingKernel(field, "path", _residual(field, rho), 0.0, sink)


def load_kernel(data: VectorField, expected_kind: str, sink_offset=None,
                tol: float | None = None) -> DressingKernel:
    """Wrap an externally supplied field as a kernel after checking its divergence."""
    lat = data.lattice
    if expected_kind == "path" and sink_offset is not None:
        sink_offset = lat.normalize_site(sink_offset)
    rho = expected_divergence(lat, expected_kind, sink_offset)
    residual = _residual(data, rho)
    if tol is None:
        tol = PATH_TOL if expected_kind == "path" else COULOMB_TOL
    if residual > tol:
        raise ConstraintViolationError(
            f"{expected_kind} kernel divergence residual {residual:.3e} exceeds {tol:.1e}", residual)
    background = 0.0 if expected_kind == "path" else 1.0 / lat.volume
    return DressingKernel(data, expected_kind, residual, background,
                          sink_offset if expected_kind == "path" else None)


def _anchored(k: DressingKernel, x) -> np.ndarray:
    """f(x - z) as an array over z; shape (D, *dims)."""
    lat = k.lattice
    x = lat.normalize_site(x)
    out = np.empty_like(k.f.values)
    for mu in range(lat.ndim):
        out[mu] = ScalarField(lat, k.f.values[mu]).reflect().translate(x).values
    return out


def dressing_exponent(k: DressingKernel, A: VectorField, x, e: float) -> float:
    """Phi(x) by direct summation over the lattice (exactly rounded accumulation)."""
    same_lattice(k.f, A)
    return e * math.fsum((_anchored(k, x) * A.values).ravel())


def dressing_exponents(k: DressingKernel, A: VectorField, e: float) -> ScalarField:
    """Phi(x) at every anchor x at once, as a circular convolution done with FFTs."""
    same_lattice(k.f, A)
    lat = k.lattice
    axes = tuple(range(1, lat.ndim + 1))
    workers = fft_workers()
    fk = scipy.fft.fftn(k.f.values, axes=axes, workers=workers)
    fa = scipy.fft.fftn(A.values, axes=axes, workers=workers)
    conv = scipy.fft.ifftn((fk * fa).sum(axis=0), workers=workers).real
    return ScalarField(lat, e * conv)


def dressing_phase(k: DressingKernel, A: VectorField, x, e: float,
                   method: str = "direct") -> DressingPhase:
    if method == "direct":
        phi = dressing_exponent(k, A, x, e)
    elif method == "spectral":
        phi = dressing_exponents(k, A, e).at(k.lattice.normalize_site(x))
    else:
        raise ValueError(f"unknown method {method!r}")
    return DressingPhase(complex(math.cos(phi), -math.sin(phi)), phi)


def phase_shift_under_gauge(k: DressingKernel, g: GaugeTransform, x,
                            A: VectorField | None = None) -> float:
    """Change of the dressing phase angle, arg(phase after) - arg(phase before).

    Evaluated from the two exponents, so no 2*pi unwrapping is involved.
    """
    if A is None:
        A = VectorField.zeros(k.lattice)
    before = dressing_exponent(k, A, x, g.coupling)
    after = dressing_exponent(k, apply_gauge_transform(A, g), x, g.coupling)
    return -(after - before)


def phase_shifts_under_gauge(k: DressingKernel, g: GaugeTransform,
                             A: VectorField | None = None) -> ScalarField:
    """:func:`phase_shift_under_gauge` for every anchor site, via FFT convolution."""
    if A is None:
        A = VectorField.zeros(k.lattice)
    before = dressing_exponents(k, A, g.coupling)
    after = dressing_exponents(k, apply_gauge_transform(A, g), g.coupling)
    return before - after


def predicted_phase_shift(k: DressingKernel, alpha: ScalarField, x) -> float:
    """sum_z rho(x - z) alpha(z), with rho the kernel's required divergence."""
    lat = k.lattice
    rho = k.source().reflect().translate(lat.normalize_site(x))
    return math.fsum((rho.values * alpha.values).ravel())


def kernel_sidecar(k: DressingKernel) -> dict:
    return {
        "kind": k.kind,
        "divergence_residual": k.divergence_residual,
        "sink_offset": list(k.sink_offset) if k.sink_offset is not None else None,
    }


def write_kernel(k: DressingKernel, path) -> tuple[Path, Path]:
    path = Path(path)
    sidecar = path.with_name(path.name + ".json")
    fieldio.write_field(path, k.f)
    sidecar.write_text(json.dumps(kernel_sidecar(k), indent=2, sort_keys=True) + "\n")
    return path, sidecar


def read_kernel(path) -> DressingKernel:
    path = Path(path)
    meta = json.loads(path.with_name(path.name + ".json").read_text())
    field = fieldio.read_field(path, vector=True)
    return load_kernel(field, meta["kind"], meta.get("sink_offset"))


def combine(kernels: Iterable[DressingKernel], kind: str = "custom", sink_offset=None) -> DressingKernel:
    """Sum of kernel fields, revalidated as ``kind``."""
    kernels = list(kernels)
    total = kernels[0].f
    for k in kernels[1:]:
        total = total + k.f
    return load_kernel(total, kind, sink_offset)

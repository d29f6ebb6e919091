"""Dressed qubits ("QFTbits"), entangled dressed pairs and their gauge action.

A state is a set of complex amplitudes times, for every constituent, a matter
phase and a dressing phase functional of the classical background A. Under a
gauge transform alpha a constituent of charge q at x picks up

    exp(-i q alpha(x))                      from the matter field
    exp(+i q sum_z rho(x - z) alpha(z))     from its dressing

so a Coulomb-dressed charge is left with exp(-i q mean(alpha)), a site
independent global phase, and a bare one keeps the full local exp(-i q alpha(x)).
Amplitudes are never touched by a gauge transform.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .dressing import DressingKernel, dressing_exponent, dressing_exponents
from .errors import (
    ArityError,
    DivergenceMismatchError,
    LatticeMismatchError,
    NormalizationError,
    SiteCollisionError,
)
from .gauge import GaugeTransform, apply_gauge_transform
from .lattice import Lattice, VectorField, same_lattice

NORM_TOL = 1e-9


@dataclass(frozen=True)
class Constituent:
    """One dressed (or bare, when ``kernel`` is None) charge at a lattice site."""

    lattice: Lattice
    site: tuple[int, ...]
    charge_sign: int
    kernel: DressingKernel | None = None

    def undressed(self) -> Constituent:
        return Constituent(self.lattice, self.site, self.charge_sign, None)


@dataclass(frozen=True)
class QFTbit:
    constituent: Constituent
    a: complex
    b: complex

    @property
    def site(self):
        return self.constituent.site

    @property
    def charge_sign(self):
        return self.constituent.charge_sign

    @property
    def kernel(self):
        return self.constituent.kernel

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([self.a, self.b], dtype=complex)


@dataclass(frozen=True, eq=False)
class MultiQubitState:
    qubits: tuple[Constituent, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        n = len(self.qubits)
        if n < 1:
            raise ArityError("a state needs at least one qubit")
        amps = np.array(self.amplitudes, dtype=complex).reshape((2,) * n)
        _check_norm(amps)
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n(self) -> int:
        return len(self.qubits)

    @property
    def total_charge(self) -> int:
        return sum(q.charge_sign for q in self.qubits)


@dataclass(frozen=True, eq=False)
class GaugeActionReport:
    anchors: tuple[tuple[int, ...], ...]
    multipliers: np.ndarray
    global_phase: complex
    predicted_global_phase: complex
    max_local_deviation: float
    phase_spread: float

    def __post_init__(self):
        if np.any(np.abs(np.abs(self.multipliers) - 1.0) > 1e-12):
            raise ValueError("gauge multipliers must be unit modulus")

    @property
    def global_phase_error(self) -> float:
        return abs(self.global_phase - self.predicted_global_phase)


def _check_norm(amps: np.ndarray) -> None:
    total = math.fsum(np.abs(amps.ravel()) ** 2)
    if abs(total - 1.0) > NORM_TOL:
        raise NormalizationError(f"sum of |amplitude|^2 is {total:.12g}, off by {total - 1.0:+.3e}",
                                 total - 1.0)


def _check_charge(charge_sign: int) -> int:
    if charge_sign not in (1, -1):
        raise ValueError(f"charge_sign must be +1 or -1, got {charge_sign!r}")
    return int(charge_sign)


def make_qftbit(x, a: complex, b: complex, charge_sign: int = 1,
                kernel: DressingKernel | None = None, lattice: Lattice | None = None) -> QFTbit:
    """a|0_f(x)> + b|1_f(x)>; ``kernel=None`` gives the bare, undressed qubit."""
    lat = kernel.lattice if kernel is not None else lattice
    if lat is None:
        raise ValueError("a bare qubit needs an explicit lattice")
    if lattice is not None and lattice != lat:
        raise LatticeMismatchError("kernel and lattice disagree")
    _check_norm(np.array([a, b], dtype=complex))
    c = Constituent(lat, lat.normalize_site(x), _check_charge(charge_sign), kernel)
    return QFTbit(c, complex(a), complex(b))


def entangle(q1: QFTbit, q2: QFTbit, amplitudes) -> MultiQubitState:
    """Two-particle dressed state sum_ij c_ij |i_f(x) j_f(y)>.

    Only site, charge and kernel of ``q1``/``q2`` are used; the joint amplitudes
    come from the 2x2 tensor ``amplitudes``.
    """
    if q1.constituent.lattice != q2.constituent.lattice:
        raise LatticeMismatchError("qubits live on different lattices")
    if q1.site == q2.site:
        raise SiteCollisionError(f"both qubits sit at {q1.site}")
    amps = np.asarray(amplitudes, dtype=complex)
    if amps.size != 4:
        raise ArityError(f"a two-qubit tensor has 4 entries, got {amps.size}")
    return MultiQubitState((q1.constituent, q2.constituent), amps.reshape(2, 2))


def product_state(q1: QFTbit, q2: QFTbit) -> MultiQubitState:
    return entangle(q1, q2, np.outer(q1.amplitudes, q2.amplitudes))


def as_state(s: QFTbit | MultiQubitState) -> MultiQubitState:
    if isinstance(s, QFTbit):
        return MultiQubitState((s.constituent,), s.amplitudes)
    return s


def undressed(s: QFTbit | MultiQubitState) -> MultiQubitState:
    s = as_state(s)
    return MultiQubitState(tuple(q.undressed() for q in s.qubits), s.amplitudes)


def constituent_multipliers(c: Constituent, A: VectorField, g: GaugeTransform) -> np.ndarray:
    """Multiplier of a charge q placed at every site of the lattice, shape ``dims``."""
    same_lattice(A, g.alpha)
    if c.lattice != A.lattice:
        raise LatticeMismatchError("state and background live on different lattices")
    q = c.charge_sign
    angle = -q * g.alpha.values
    if c.kernel is not None:
        e = q * g.coupling
        before = dressing_exponents(c.kernel, A, e)
        after = dressing_exponents(c.kernel, apply_gauge_transform(A, g), e)
        angle = angle - (after.values - before.values)
    return np.exp(1j * angle)


def gauge_action(s: QFTbit | MultiQubitState, A: VectorField, g: GaugeTransform,
                 anchors: Iterable | None = None) -> GaugeActionReport:
    """Gauge multiplier of the state translated by each anchor offset.

    With ``anchors=None`` the state is swept over every translation of the
    lattice. For a single qubit at the origin the anchors are simply its sites.
    """
    s = as_state(s)
    lat = A.lattice
    if anchors is None:
        anchors = list(lat.sites())
    anchors = tuple(lat.normalize_site(t) for t in anchors)
    if not anchors:
        raise ValueError("need at least one anchor")
    lam = np.ones(len(anchors), dtype=complex)
    for c in s.qubits:
        table = constituent_multipliers(c, A, g)
        lam *= np.array([table[tuple((si + ti) % n for si, ti, n in zip(c.site, t, lat.dims))]
                         for t in anchors])
    total = lam.sum()
    if abs(total) > 1e-9 * len(lam):
        glob = complex(total / abs(total))
    else:
        glob = complex(lam[0])
    predicted = complex(np.exp(-1j * s.total_charge * g.alpha.mean()))
    deviation = float(np.max(np.abs(lam - glob)))
    spread = float(np.max(np.abs(np.angle(lam * np.conj(glob)))))
    return GaugeActionReport(anchors, lam, glob, predicted, deviation, spread)


def overlap_phase(k1: DressingKernel, k2: DressingKernel, A: VectorField, x, e: float,
                  tol: float = 1e-10) -> complex:
    """exp(i (Phi_1 - Phi_2)): relative phase of two dressings of one charge."""
    same_lattice(k1.f, k2.f, A)
    mismatch = float(np.max(np.abs(k1.divergence().values - k2.divergence().values)))
    if mismatch > tol:
        raise DivergenceMismatchError(
            f"kernel divergences differ by {mismatch:.3e}; the overlap would not be gauge invariant")
    d = dressing_exponent(k1, A, x, e) - dressing_exponent(k2, A, x, e)
    return complex(math.cos(d), math.sin(d))


def entanglement_entropy(s: MultiQubitState, cut: int = 0) -> float:
    """Von Neumann entropy (natural log) of qubit ``cut`` of a pure two-qubit state."""
    if s.n != 2:
        raise ArityError(f"entropy is implemented for two qubits, state has {s.n}")
    if cut not in (0, 1):
        raise ValueError(f"cut must be 0 or 1, got {cut!r}")
    m = s.amplitudes if cut == 0 else s.amplitudes.T
    p = np.linalg.svd(m, compute_uv=False) ** 2
    p = p[p > 1e-300]
    return float(max(0.0, -math.fsum(p * np.log(p))))


def state_to_json(s: QFTbit | MultiQubitState, kernel_ids: Sequence[str | None] | None = None) -> dict:
    s = as_state(s)
    if kernel_ids is None:
        kernel_ids = [None if q.kernel is None else q.kernel.kind for q in s.qubits]
    amps = s.amplitudes.ravel()
    return {
        "sites": [list(q.site) for q in s.qubits],
        "charges": [q.charge_sign for q in s.qubits],
        "kernel_ids": list(kernel_ids),
        "amplitudes_re": [float(a.real) for a in amps],
        "amplitudes_im": [float(a.imag) for a in amps],
    }


def state_from_json(doc: dict, lattice: Lattice,
                    kernels: dict[str, DressingKernel] | None = None) -> MultiQubitState:
    kernels = kernels or {}
    sites, charges, ids = doc["sites"], doc["charges"], doc["kernel_ids"]
    if not len(sites) == len(charges) == len(ids):
        raise ValueError("sites, charges and kernel_ids must have equal length")
    qubits = []
    for site, q, kid in zip(sites, charges, ids):
        kernel = None if kid is None else kernels[kid]
        if kernel is not None and kernel.lattice != lattice:
            raise LatticeMismatchError(f"kernel {kid!r} is on another lattice")
        qubits.append(Constituent(lattice, lattice.normalize_site(site), _check_charge(q), kernel))
    amps = np.array(doc["amplitudes_re"], dtype=float) + 1j * np.array(doc["amplitudes_im"], dtype=float)
    if amps.size != 2 ** len(qubits):
        raise ArityError(f"{len(qubits)} qubits need {2 ** len(qubits)} amplitudes, got {amps.size}")
    return MultiQubitState(tuple(qubits), amps)

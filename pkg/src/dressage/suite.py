"""Named numerical checks and the versioned JSON report that carries them."""

from __future__ import annotations

import datetime as _dt
import json
import math
from dataclasses import dataclass, field
from itertools import product
from typing import Callable

import numpy as np

from . import dressing, gauge, lattice, observables, qstates
from .lattice import Lattice, ScalarField, new_lattice

SCHEMA = "dressage-report-1"
TIMESTAMP_KEY = "timestamp"


@dataclass(frozen=True)
class Check:
    name: str
    measured: float
    tolerance: float
    comparison: str = "<="

    @property
    def passed(self) -> bool:
        if not math.isfinite(self.measured):
            return False
        if self.comparison == "<=":
            return self.measured <= self.tolerance
        return self.measured >= self.tolerance

    def as_dict(self) -> dict:
        return {"name": self.name, "measured": self.measured, "tolerance": self.tolerance,
                "comparison": self.comparison, "passed": self.passed}

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status}  {self.name}: {self.measured:.3e} {self.comparison} {self.tolerance:.1e}"


@dataclass
class Report:
    command: str
    config: dict
    checks: list[Check] = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self, timestamp: bool = True) -> dict:
        doc = {
            "schema": SCHEMA,
            "command": self.command,
            "config": self.config,
            "checks": [c.as_dict() for c in self.checks],
            "results": self.extra,
            "pass": self.passed,
        }
        if timestamp:
            doc[TIMESTAMP_KEY] = _dt.datetime.now(_dt.timezone.utc).isoformat()
        return doc

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n"


def dense_laplacian(lat: Lattice) -> np.ndarray:
    """Stencil matrix of sum_mu s(z+mu) + s(z-mu) - 2 s(z), built site by site."""
    V = lat.volume
    L = np.zeros((V, V))
    for i, site in enumerate(lat.sites()):
        for mu in range(lat.ndim):
            for step in (1, -1):
                nb = list(site)
                nb[mu] = (nb[mu] + step) % lat.dims[mu]
                L[i, int(np.ravel_multi_index(nb, lat.dims))] += 1.0
                L[i, i] -= 1.0
    return L


def dense_poisson(src: ScalarField) -> ScalarField:
    """Zero-mean solution of the stencil system by a bordered dense solve."""
    lat = src.lattice
    V = lat.volume
    M = np.zeros((V + 1, V + 1))
    M[:V, :V] = dense_laplacian(lat)
    M[:V, V] = 1.0
    M[V, :V] = 1.0
    rhs = np.append(src.values.ravel(), 0.0)
    return ScalarField(lat, np.linalg.solve(M, rhs)[:V])


def small_lattices(max_volume: int = 64) -> list[Lattice]:
    """Every lattice shape with D in 1..4, extents >= 2 and V <= max_volume."""
    out = []
    for ndim in range(1, lattice.MAX_DIM + 1):
        for dims in product(range(2, max_volume // 2 ** (ndim - 1) + 1), repeat=ndim):
            if math.prod(dims) <= max_volume:
                out.append(new_lattice(dims))
    return out


def _entropy_oracle(amps: np.ndarray) -> float:
    m = np.asarray(amps, dtype=complex).reshape(2, 2)
    w = np.linalg.eigvalsh(m @ m.conj().T)
    w = w[w > 1e-300]
    return float(-np.sum(w * np.log(w)))


# individual check families; each returns a list of Check


def constraint_checks(tol: float = 1e-10) -> list[Check]:
    worst = 0.0
    for dims in ([2], [4], [8], [8, 8], [8, 8, 8], [16, 16, 16], [32, 32, 32]):
        worst = max(worst, dressing.coulomb_kernel(new_lattice(dims)).divergence_residual)
    f = dressing.coulomb_kernel(new_lattice([2])).f.values[0]
    hand = float(np.max(np.abs(f - np.array([-0.25, 0.25]))))
    return [Check("coulomb_constraint_residual", worst, tol),
            Check("coulomb_1d_n2_hand_value", hand, tol)]


def invariance_checks(seed: int, n_transforms: int = 100, dims=(8, 8, 8), tol: float = 1e-10,
                      min_spread: float = 0.1, smoothness: float = 0.0) -> list[Check]:
    lat = new_lattice(dims)
    k = dressing.coulomb_kernel(lat)
    bit = qstates.make_qftbit((0,) * lat.ndim, 1, 0, 1, k)
    bare = qstates.undressed(bit)
    dev = phase_err = 0.0
    min_bare = math.inf
    for i in range(n_transforms):
        A = gauge.random_vector(lat, seed + i)
        g = gauge.random_gauge_transform(lat, seed + 7919 * (i + 1), smoothness)
        rep = qstates.gauge_action(bit, A, g)
        dev = max(dev, rep.max_local_deviation)
        phase_err = max(phase_err, abs(rep.global_phase - 1.0))
        min_bare = min(min_bare, qstates.gauge_action(bare, A, g).phase_spread)
    return [Check("dressed_local_deviation", dev, tol),
            Check("bare_phase_spread_min", min_bare, min_spread, ">="),
            Check("zero_mean_global_phase_error", phase_err, tol)]


def global_phase_checks(seed: int, n_seeds: int = 20, dims=(8, 8, 8), tol: float = 1e-10) -> list[Check]:
    lat = new_lattice(dims)
    origin = (0,) * lat.ndim
    k = dressing.coulomb_kernel(lat)
    far = tuple(n // 2 for n in lat.dims)
    pk = dressing.path_kernel(lat, [(0, 1)] * (lat.dims[0] // 2) + [(1, 1)] * (lat.dims[1] // 2))
    sink = tuple(-c % n for c, n in zip(pk.sink_offset, lat.dims))
    states = {
        "q+1": qstates.make_qftbit(origin, 1, 0, 1, k),
        "q-1": qstates.make_qftbit(origin, 0, 1, -1, k),
        "q+2_pair": qstates.entangle(qstates.make_qftbit(origin, 1, 0, 1, k),
                                     qstates.make_qftbit(far, 1, 0, 1, k),
                                     np.array([[1, 0], [0, 1]]) / math.sqrt(2)),
    }
    neutral = qstates.entangle(qstates.make_qftbit(origin, 1, 0, 1, pk),
                               qstates.make_qftbit(sink, 1, 0, -1, None, lat),
                               np.array([[1, 0], [0, 1]]) / math.sqrt(2))
    errs = dict.fromkeys(states, 0.0)
    neutral_err = neutral_dev = 0.0
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, 17])))
    for i in range(n_seeds):
        A = gauge.random_vector(lat, seed + i)
        g = gauge.random_gauge_transform(lat, seed + 104729 + i, 0.0, float(rng.uniform(-math.pi, math.pi)))
        for name, s in states.items():
            rep = qstates.gauge_action(s, A, g)
            errs[name] = max(errs[name], rep.global_phase_error, rep.max_local_deviation)
        rep = qstates.gauge_action(neutral, A, g)
        neutral_err = max(neutral_err, abs(rep.global_phase - 1.0))
        neutral_dev = max(neutral_dev, rep.max_local_deviation)
    checks = [Check(f"global_phase_law_{name}", err, tol) for name, err in errs.items()]
    checks.append(Check("neutral_pair_phase_error", max(neutral_err, neutral_dev), tol))
    return checks


def sbp_checks(seed: int, n_pairs: int = 100, dims=(8, 8, 8), tol: float = 1e-12) -> list[Check]:
    lat = new_lattice(dims)
    worst = 0.0
    for i in range(n_pairs):
        v = gauge.random_vector(lat, seed + 2 * i)
        s = gauge.random_scalar(lat, seed + 2 * i + 1)
        worst = max(worst, lattice.sum_by_parts_residual(v, s) / (v.norm() * s.norm()))
    return [Check("summation_by_parts_relative_residual", worst, tol)]


def poisson_checks(seed: int, max_volume: int = 64, tol: float = 1e-10) -> list[Check]:
    worst = 0.0
    for i, lat in enumerate(small_lattices(max_volume)):
        src = gauge.random_scalar(lat, seed + i)
        diff = lattice.solve_poisson(src).values - dense_poisson(src).values
        worst = max(worst, float(np.max(np.abs(diff))))
    return [Check("poisson_spectral_vs_dense", worst, tol)]


def gauss_checks(dims=(16, 16, 16), e: float = 1.0, tol: float = 1e-10) -> list[Check]:
    lat = new_lattice(dims)
    k = dressing.coulomb_kernel(lat)
    x = tuple(n // 3 for n in dims)
    E = observables.electric_field(k, x, e)
    return [Check("gauss_law_residual", observables.gauss_residual(E, x, e, 1.0 / lat.volume), tol)]


def coulomb_profile_checks(dims=(32, 32, 32), e: float = 1.0, r_min: float = 3.0, r_max: float = 8.0,
                           tol: float = 0.10) -> tuple[list[Check], observables.RadialProfile]:
    lat = new_lattice(dims)
    k = dressing.coulomb_kernel(lat)
    origin = (0,) * lat.ndim
    prof = observables.radial_profile(observables.electric_field(k, origin, e), origin, bins=int(r_max) + 1)
    devs = [abs(d) for r, d in observables.coulomb_compare(prof, e) if r_min - 0.5 <= r < r_max + 0.5]
    return [Check("coulomb_profile_rel_dev", max(devs), tol)], prof


def potential_checks(seed: int, n_seeds: int = 50, dims=(8, 8, 8), tol: float = 1e-12) -> list[Check]:
    lat = new_lattice(dims)
    worst_a = worst_f = 0.0
    for i in range(n_seeds):
        A = gauge.random_vector(lat, seed + i)
        sf = gauge.StueckelbergField(gauge.random_scalar(lat, seed + 5000 + i))
        g = gauge.random_gauge_transform(lat, seed + 9000 + i)
        A2 = gauge.apply_gauge_transform(A, g)
        sf2 = gauge.transform_sigma(sf, g)
        da = gauge.invariant_potential(A2, sf2).values - gauge.invariant_potential(A, sf).values
        df = gauge.field_strength(A2).values - gauge.field_strength(A).values
        worst_a = max(worst_a, float(np.max(np.abs(da))))
        worst_f = max(worst_f, float(np.max(np.abs(df))))
    return [Check("invariant_potential_gauge_deviation", worst_a, tol),
            Check("field_strength_gauge_deviation", worst_f, tol)]


def entanglement_checks(tol: float = 1e-10) -> list[Check]:
    lat = new_lattice([4, 4])
    k = dressing.coulomb_kernel(lat)
    q1 = qstates.make_qftbit((0, 0), 1, 0, 1, k)
    q2 = qstates.make_qftbit((2, 2), 1, 0, 1, k)
    bell = qstates.entangle(q1, q2, np.array([[1, 0], [0, 1]]) / math.sqrt(2))
    prod = qstates.entangle(q1, q2, np.array([[1, 0], [0, 0]]))
    asym_amps = np.array([[math.sqrt(0.25), 0], [0, math.sqrt(0.75)]])
    asym = qstates.entangle(q1, q2, asym_amps)
    return [
        Check("bell_entropy_error", abs(qstates.entanglement_entropy(bell) - math.log(2)), tol),
        Check("product_entropy", qstates.entanglement_entropy(prod), tol),
        Check("asymmetric_entropy_error",
              abs(qstates.entanglement_entropy(asym) - _entropy_oracle(asym_amps)), tol),
    ]


def full_suite(seed: int = 0) -> Report:
    families: list[tuple[str, Callable[[], list[Check]]]] = [
        ("constraint", constraint_checks),
        ("invariance", lambda: invariance_checks(seed)),
        ("global_phase", lambda: global_phase_checks(seed)),
        ("summation_by_parts", lambda: sbp_checks(seed)),
        ("poisson", lambda: poisson_checks(seed)),
        ("gauss", gauss_checks),
        ("coulomb_profile", lambda: coulomb_profile_checks()[0]),
        ("potential", lambda: potential_checks(seed)),
        ("entanglement", entanglement_checks),
    ]
    report = Report("report", {"seed": seed, "suite": [name for name, _ in families]})
    for _, run in families:
        report.checks.extend(run())
    return report

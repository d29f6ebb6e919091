import itertools

import numpy as np
import pytest

from dressage.lattice import new_lattice


def shifted(site, mu, step, dims):
    out = list(site)
    out[mu] = (out[mu] + step) % dims[mu]
    return tuple(out)


def loop_forward_diff(a, mu):
    """Site-by-site d+_mu, independent of the vectorised implementation."""
    out = np.zeros_like(a)
    for site in itertools.product(*map(range, a.shape)):
        out[site] = a[shifted(site, mu, 1, a.shape)] - a[site]
    return out


def loop_laplacian(a):
    out = np.zeros_like(a)
    for site in itertools.product(*map(range, a.shape)):
        for mu in range(a.ndim):
            out[site] += a[shifted(site, mu, 1, a.shape)] + a[shifted(site, mu, -1, a.shape)] - 2 * a[site]
    return out


def loop_convolution_at(f, A, x):
    """sum_z sum_mu f_mu(x - z) A_mu(z) by explicit loops."""
    dims = A.shape[1:]
    total = 0.0
    for z in itertools.product(*map(range, dims)):
        r = tuple((xi - zi) % n for xi, zi, n in zip(x, z, dims))
        for mu in range(len(dims)):
            total += f[(mu,) + r] * A[(mu,) + z]
    return total


@pytest.fixture
def cube8():
    return new_lattice([8, 8, 8])


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES = []


def record(number, name, measured, tolerance, passed, comparison="<="):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2} {name}: {measured:.3e} {comparison} {tolerance:.1e}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

import numpy as np
import pytest

from dressage.errors import ConfigError, CouplingMismatchError, DimensionError, LatticeMismatchError
from dressage.gauge import (
    GaugeTransform,
    StueckelbergField,
    apply_gauge_transform,
    field_strength,
    gauge_transform_from_json,
    invariant_potential,
    random_gauge_transform,
    random_scalar,
    random_vector,
    transform_sigma,
)
from dressage.lattice import ScalarField, VectorField, grad_fwd, new_lattice


def test_constant_alpha_leaves_potential(cube8):
    A = random_vector(cube8, 1)
    g = GaugeTransform(ScalarField(cube8, np.full(cube8.dims, 0.7)), 1.3)
    np.testing.assert_array_equal(apply_gauge_transform(A, g).values, A.values)


def test_pure_gauge(cube8):
    alpha = random_scalar(cube8, 2)
    g = GaugeTransform(alpha, 2.0)
    out = apply_gauge_transform(VectorField.zeros(cube8), g)
    np.testing.assert_allclose(out.values, -0.5 * grad_fwd(alpha).values, atol=0)


def test_round_trip_with_negated_alpha(cube8):
    for seed in range(5):
        A = random_vector(cube8, seed)
        g = random_gauge_transform(cube8, 100 + seed, coupling=0.8)
        back = apply_gauge_transform(apply_gauge_transform(A, g), g.inverse())
        np.testing.assert_allclose(back.values, A.values, atol=1e-13, rtol=0)


def test_gauge_transform_is_affine(cube8):
    A = random_vector(cube8, 3)
    g1 = random_gauge_transform(cube8, 10)
    g2 = random_gauge_transform(cube8, 11, smoothness=0.5)
    two_step = apply_gauge_transform(apply_gauge_transform(A, g1), g2)
    one_step = apply_gauge_transform(A, g1.then(g2))
    assert np.max(np.abs(two_step.values - one_step.values)) <= 1e-12


def test_input_untouched(cube8):
    A = random_vector(cube8, 4)
    before = A.values.copy()
    apply_gauge_transform(A, random_gauge_transform(cube8, 5))
    np.testing.assert_array_equal(A.values, before)


def test_mismatched_lattices():
    A = VectorField.zeros(new_lattice([4, 4]))
    g = random_gauge_transform(new_lattice([4, 5]), 0)
    with pytest.raises(LatticeMismatchError):
        apply_gauge_transform(A, g)


def test_zero_coupling_rejected(cube8):
    with pytest.raises(ValueError):
        GaugeTransform(ScalarField.zeros(cube8), 0.0)


def test_transform_sigma(cube8):
    sigma = random_scalar(cube8, 6)
    sf = StueckelbergField(sigma, 2.0)
    zero = GaugeTransform(ScalarField.zeros(cube8), 2.0)
    np.testing.assert_array_equal(transform_sigma(sf, zero).sigma.values, sigma.values)

    s = random_scalar(cube8, 7)
    g = GaugeTransform(s * 2.0, 2.0)
    out = transform_sigma(StueckelbergField(ScalarField.zeros(cube8), 2.0), g)
    np.testing.assert_allclose(out.sigma.values, -s.values, atol=1e-15)

    back = transform_sigma(transform_sigma(sf, g), g.inverse())
    np.testing.assert_allclose(back.sigma.values, sigma.values, atol=1e-14)


def test_transform_sigma_coupling_mismatch(cube8):
    sf = StueckelbergField(ScalarField.zeros(cube8), 1.0)
    with pytest.raises(CouplingMismatchError):
        transform_sigma(sf, GaugeTransform(ScalarField.zeros(cube8), 2.0))


def test_field_strength_antisymmetric(cube8):
    F = field_strength(random_vector(cube8, 8)).values
    for mu in range(3):
        assert not F[mu, mu].any()
        for nu in range(3):
            np.testing.assert_array_equal(F[mu, nu], -F[nu, mu])


def test_field_strength_pure_gauge_and_constant(cube8):
    F = field_strength(grad_fwd(random_scalar(cube8, 9))).values
    assert np.max(np.abs(F)) <= 1e-12
    assert not field_strength(VectorField.constant(cube8, [1.0, -2.0, 0.5])).values.any()


def test_field_strength_needs_two_dims():
    with pytest.raises(DimensionError):
        field_strength(VectorField.zeros(new_lattice([6])))


def test_field_strength_known_plaquette():
    lat = new_lattice([3, 3])
    a = np.zeros((2, 3, 3))
    a[0, 0, 0] = 1.0  # single x-link at the origin
    F = field_strength(VectorField(lat, a)).values
    # F_01(z) = d+_0 A_1 - d+_1 A_0; only A_0(0,0) is nonzero
    expected = np.zeros((3, 3))
    expected[0, 0] = 1.0
    expected[0, 2] = -1.0
    np.testing.assert_array_equal(F[0, 1], expected)


def test_field_strength_gauge_invariant(cube8):
    A = random_vector(cube8, 12)
    F = field_strength(A).values
    for seed in range(20):
        g = random_gauge_transform(cube8, 300 + seed, constant_offset=0.4)
        assert np.max(np.abs(field_strength(apply_gauge_transform(A, g)).values - F)) <= 1e-12


def test_invariant_potential(cube8):
    A = random_vector(cube8, 13)
    sf0 = StueckelbergField(ScalarField.zeros(cube8))
    np.testing.assert_array_equal(invariant_potential(A, sf0).values, A.values)
    sigma = random_scalar(cube8, 14)
    assert not invariant_potential(grad_fwd(sigma), StueckelbergField(sigma)).values.any()


def test_invariant_potential_gauge_invariant(cube8):
    A = random_vector(cube8, 15)
    sf = StueckelbergField(random_scalar(cube8, 16, 0.3), 1.5)
    ref = invariant_potential(A, sf).values
    for seed in range(50):
        g = random_gauge_transform(cube8, 500 + seed, coupling=1.5)
        moved = invariant_potential(apply_gauge_transform(A, g), transform_sigma(sf, g)).values
        assert np.max(np.abs(moved - ref)) <= 1e-12


def test_random_scalar_deterministic_and_mean_free(cube8):
    a = random_scalar(cube8, 42)
    b = random_scalar(cube8, 42)
    assert a.values.tobytes() == b.values.tobytes()
    assert abs(a.mean()) <= 1e-12
    assert not np.array_equal(a.values, random_scalar(cube8, 43).values)


def test_random_scalar_smoothing_shrinks_amplitude(cube8):
    for seed in range(5):
        amps = [np.max(np.abs(random_scalar(cube8, seed, s).values)) for s in (0.0, 0.5, 2.0, 10.0)]
        assert all(b < a for a, b in zip(amps, amps[1:]))


def test_random_vector_substreams(cube8):
    v = random_vector(cube8, 7)
    assert v.values.tobytes() == random_vector(cube8, 7).values.tobytes()
    assert not np.array_equal(v.values[0], v.values[1])
    for mu in range(3):
        assert abs(v.component(mu).mean()) <= 1e-12


def test_offset_gauge_function_mean(cube8):
    g = random_gauge_transform(cube8, 1, constant_offset=0.25)
    assert g.alpha.mean() == pytest.approx(0.25, abs=1e-12)


def test_transform_from_json(cube8):
    doc = {"seed": 3, "smoothness": 0.5, "constant_offset": 0.1, "coupling": 2.0}
    g = gauge_transform_from_json(cube8, doc)
    ref = random_gauge_transform(cube8, 3, 0.5, 0.1, 2.0)
    assert g.coupling == 2.0
    np.testing.assert_array_equal(g.alpha.values, ref.alpha.values)
    with pytest.raises(ConfigError):
        gauge_transform_from_json(cube8, {"seed": 1, "colour": "red"})
    with pytest.raises(ConfigError):
        gauge_transform_from_json(cube8, {"smoothness": 1})

import math

import numpy as np
import pytest

from fuchstools.exceptions import EmptyOrbit, FuchsError
from fuchstools.freegroup import random_schottky
from fuchstools.hyperbolic import POINT_I, Isometry, displacement
from fuchstools.inequality import mass_chain_bound
from fuchstools.measure_lab import (
    BoundaryMeasure,
    bin_index,
    decompose_by_first_letter,
    decomposition_identity_residual,
    measured_masses,
    poincare_approx,
    ps_approximation,
    uniformity_trend,
)

from .conftest import LOG_3_2SQRT2


def test_bins_are_centred():
    width = 2.0 * math.pi / 64
    assert bin_index(0.0, 64) == 0
    assert bin_index(-1e-9, 64) == 0
    assert bin_index(0.5 * width + 1e-9, 64) == 1
    assert bin_index(2.0 * math.pi - 0.4 * width, 64) == 0
    assert bin_index(math.pi, 64) == 32


def test_boundary_measure_basics():
    m = BoundaryMeasure(np.arange(16, dtype=float))
    assert m.N == 16
    assert m.rotate(3).bins[3] == 0.0
    assert (m + m).total == pytest.approx(2.0 * m.total)
    frame = m.to_frame()
    assert list(frame.columns) == ["bin_index", "angle_center", "mass"]
    with pytest.raises(FuchsError):
        BoundaryMeasure(np.array([1.0, -1.0]))
    with pytest.raises(FuchsError):
        m + BoundaryMeasure(np.ones(32))


def test_first_level_of_symmetric_group(schottky2):
    approx = poincare_approx(schottky2, POINT_I, max_len=1)
    assert approx.n_points == 4
    m = approx.measure(64)
    assert m.total == pytest.approx(1.0, abs=1e-12)
    nonzero = np.nonzero(m.bins)[0]
    assert list(nonzero) == [0, 16, 32, 48]
    assert m.bins[nonzero] == pytest.approx(np.full(4, 0.25), abs=1e-12)


def test_empty_orbit_is_rejected(g2):
    with pytest.raises(EmptyOrbit):
        poincare_approx(g2, POINT_I, max_len=0)


def test_gamma2_measure_is_normalized_and_symmetric(g2):
    m = ps_approximation(g2, POINT_I, max_len=10, s=1.05, N=64)
    assert m.total == pytest.approx(1.0, abs=1e-12)
    # z -> -conj(z) sends theta to -theta, a reflection across the horizontal axis
    left, right = m.bins[1:32].sum(), m.bins[33:].sum()
    assert abs(left - right) < 0.02


def test_decomposition_partitions_the_measure(g2):
    approx = poincare_approx(g2, POINT_I, max_len=8)
    parts = decompose_by_first_letter(approx, 64)
    assert sum(p.total for p in parts.values()) == pytest.approx(1.0, abs=1e-12)
    summed = sum(parts.values(), BoundaryMeasure(np.zeros(64)))
    np.testing.assert_allclose(summed.bins, approx.measure(64).bins, atol=1e-12)


def test_symmetric_letter_masses_are_equal(schottky2):
    masses = measured_masses(poincare_approx(schottky2, POINT_I, max_len=6))
    values = np.array(list(masses.values()))
    assert np.ptp(values) < 1e-12


def test_letter_measures_concentrate_in_disks(schottky2):
    approx = poincare_approx(schottky2, POINT_I, max_len=8)
    for letter in range(1, 5):
        assert approx.letter_mass_in_disk(letter) >= 0.95


def test_rotation_transports_bins():
    spec = random_schottky(2, 0.4, seed=3)
    rot = Isometry.rotation(math.pi / 2.0)
    base = ps_approximation(spec, POINT_I, max_len=5, N=64)
    turned = ps_approximation(spec.conjugate(rot), POINT_I, max_len=5, N=64)
    np.testing.assert_allclose(turned.bins, base.rotate(16).bins, atol=1e-12)


def test_symmetric_residuals_match(schottky2):
    approx = poincare_approx(schottky2, POINT_I, max_len=6)
    r1 = decomposition_identity_residual(approx, 1, 64)
    r2 = decomposition_identity_residual(approx, 2, 64)
    assert r1 == pytest.approx(r2, abs=1e-10)


def test_bins_below_minimum_rejected(g2):
    with pytest.raises(FuchsError):
        ps_approximation(g2, POINT_I, max_len=2, N=8)


@pytest.mark.slow
def test_gamma2_acceptance_run(g2):
    approx = poincare_approx(g2, POINT_I, max_len=12, s=1.05)
    assert approx.measure(64).total == pytest.approx(1.0, abs=1e-12)
    bounds = mass_chain_bound(measured_masses(approx))
    for i, g in enumerate(g2.generators):
        assert bounds[i] <= displacement(g, POINT_I) + 0.05
    assert displacement(g2.generators[0], POINT_I) == pytest.approx(LOG_3_2SQRT2)


@pytest.mark.slow
def test_gamma2_residual_shrinks_with_length(g2):
    short = poincare_approx(g2, POINT_I, max_len=8)
    long = poincare_approx(g2, POINT_I, max_len=12)
    assert decomposition_identity_residual(long, 1) < decomposition_identity_residual(short, 1)


@pytest.mark.slow
def test_gamma2_uniformity_trend(g2):
    df = uniformity_trend(g2, POINT_I, [6, 8, 10, 12])
    assert df.fuchs.is_nonincreasing("tv_distance", by="max_len")


def test_first_letter_weights_are_reproducible():
    spec = random_schottky(3, 0.3, seed=4)
    a = poincare_approx(spec, POINT_I, max_len=5)
    b = poincare_approx(spec, POINT_I, max_len=5)
    np.testing.assert_array_equal(a.weights, b.weights)
    np.testing.assert_array_equal(a.first_letters, b.first_letters)
    assert measured_masses(a) == measured_masses(b)

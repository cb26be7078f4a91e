import math

import numpy as np
import pytest

from fuchstools.exceptions import BudgetExceeded, FuchsError, NotConverged
from fuchstools.freegroup import build_schottky, random_schottky, symmetric_disks
from fuchstools.hyperbolic import POINT_I, Isometry, Point, distance, random_points
from fuchstools.inequality import HALF_PI, bound_Bk
from fuchstools.optimizer import (
    Objective,
    OptimizerConfig,
    grid_oracle,
    maximize_angular_sum,
    minimize_max_displacement,
    objective_value,
)

from .conftest import LOG_3_2SQRT2


def test_config_validation():
    assert OptimizerConfig().scipy_method == "Nelder-Mead"
    assert OptimizerConfig(method="coordinate-descent").scipy_method == "Powell"
    with pytest.raises(FuchsError):
        OptimizerConfig(method="newton")
    with pytest.raises(FuchsError):
        OptimizerConfig(tol=0.0)


def test_margulis_constant_is_attained_at_i(g2):
    opt = minimize_max_displacement(g2)
    assert opt.value == pytest.approx(LOG_3_2SQRT2, abs=1e-6)
    assert distance(opt.z_star, POINT_I) < 1e-4
    assert opt.value >= bound_Bk(2) - 1e-6
    assert opt.local_optima
    assert opt.history


def test_minimum_is_conjugation_equivariant(g2):
    m = Isometry.dilation(2.0) @ Isometry.translation(0.5)
    base = minimize_max_displacement(g2)
    moved = minimize_max_displacement(g2.conjugate(m), OptimizerConfig(start=m(POINT_I)))
    assert moved.value == pytest.approx(base.value, abs=1e-6)
    assert distance(moved.z_star, m(base.z_star)) < 1e-4


def test_theorem_floor_on_schottky_groups(schottky3):
    opt = minimize_max_displacement(schottky3)
    assert opt.value >= bound_Bk(3) - 1e-6
    for seed in range(3):
        spec = random_schottky(2, 0.7, seed=seed)
        assert minimize_max_displacement(spec).value >= bound_Bk(2) - 1e-6


def test_sharpness_at_gamma2(g2):
    opt = maximize_angular_sum(g2)
    assert opt.value == pytest.approx(HALF_PI, abs=1e-6)
    assert opt.value <= HALF_PI + 1e-9
    # the maximum is the whole imaginary axis, so only the real part is pinned
    assert abs(opt.z_star.x) < 1e-4 * opt.z_star.y


def test_sharpness_with_coordinate_descent(g2):
    opt = maximize_angular_sum(g2, OptimizerConfig(method="coordinate-descent"))
    assert opt.value == pytest.approx(HALF_PI, abs=1e-6)


def test_separated_disks_stay_far_below_ceiling():
    spec = build_schottky(2, symmetric_disks(2, math.pi / 64.0))
    opt = maximize_angular_sum(spec)
    assert opt.value < 0.5
    # the symmetric centre is where the angular sum peaks
    assert opt.value == pytest.approx(objective_value(spec, Objective.ANGULAR_SUM, POINT_I), abs=1e-8)


def test_sharpness_is_conjugation_equivariant(schottky2):
    m = Isometry.translation(-0.7) @ Isometry.dilation(0.5)
    base = maximize_angular_sum(schottky2)
    moved = maximize_angular_sum(schottky2.conjugate(m), OptimizerConfig(start=m(POINT_I)))
    assert moved.value == pytest.approx(base.value, abs=1e-6)


def test_not_converged_is_reported(g2):
    cfg = OptimizerConfig(max_iters=1, restarts=1)
    opt = minimize_max_displacement(g2, cfg)
    assert not opt.converged
    with pytest.raises(NotConverged):
        minimize_max_displacement(g2, OptimizerConfig(max_iters=1, restarts=1, raise_on_fail=True))


def test_grid_oracle_on_gamma2(g2):
    grid = grid_oracle(g2, Objective.MAX_DISPLACEMENT, (-1.0, 1.0, 0.25, 4.0), 0.005)
    assert abs(grid.value - LOG_3_2SQRT2) < 0.01
    assert grid.iterations == 401 * 751
    opt = minimize_max_displacement(g2)
    assert abs(grid.value - opt.value) < 0.005 * 2.0


def test_grid_oracle_single_cell(g2):
    grid = grid_oracle(g2, "angular-sum", (0.5, 0.5, 1.5, 1.5), 0.1)
    assert grid.z_star == Point(0.5, 1.5)
    assert grid.iterations == 1
    assert grid.value == pytest.approx(objective_value(g2, Objective.ANGULAR_SUM, Point(0.5, 1.5)))


def test_grid_oracle_budget(g2):
    with pytest.raises(BudgetExceeded):
        grid_oracle(g2, Objective.MAX_DISPLACEMENT, (0.0, 100.0, 1.0, 100.0), 0.01)
    with pytest.raises(FuchsError):
        grid_oracle(g2, Objective.MAX_DISPLACEMENT, (0.0, 1.0, -1.0, 1.0), 0.1)


@pytest.mark.parametrize("objective", list(Objective))
def test_objectives_are_lipschitz(g2, rng, objective):
    pts = random_points(rng, 400, radius=3.0)
    for z, w in zip(pts[::2], pts[1::2]):
        gap = abs(objective_value(g2, objective, z) - objective_value(g2, objective, w))
        assert gap <= 2.0 * distance(z, w) + 1e-12


def test_restarts_are_seeded(g2):
    a = minimize_max_displacement(g2, OptimizerConfig(seed=3))
    b = minimize_max_displacement(g2, OptimizerConfig(seed=3))
    assert a.z_star == b.z_star
    assert a.value == b.value
    assert np.array_equal(a.history_frame().to_numpy(), b.history_frame().to_numpy())

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuchstools.exceptions import DegenerateMass, PreconditionViolated, UncertifiedGroup
from fuchstools.freegroup import GroupSpec, random_schottky
from fuchstools.hyperbolic import POINT_I, Point, displacement, distance, random_points
from fuchstools.inequality import (
    HALF_PI,
    MARGULIS_CONSTANT,
    MassPair,
    accs_region_witness,
    accs_sum,
    angular_term,
    bound_Bk,
    bounds_table,
    buser_product,
    chain_bound,
    defect_frame,
    defect_report,
    displacement_from_angle,
    displacement_lower_bound,
    kernel_arc_integral,
    kernel_arc_quadrature,
    log2k_bound,
    loop_pair_check,
    margulis_check,
    mass_chain_bound,
    measure_comparison_check,
    sin_product_slack,
    trig_chain_check,
)

from .conftest import LOG_3_2SQRT2


## Angular terms and bounds
def test_angular_term_examples():
    assert angular_term(0.0) == pytest.approx(HALF_PI, abs=1e-15)
    assert angular_term(LOG_3_2SQRT2) == pytest.approx(math.pi / 4.0, abs=1e-15)
    assert math.isclose(math.cos(angular_term(1.3)), math.tanh(0.65), rel_tol=1e-12)


@settings(max_examples=100)
@given(st.floats(min_value=1e-3, max_value=HALF_PI))
def test_angular_term_inverts(y):
    assert angular_term(displacement_from_angle(y)) == pytest.approx(y, abs=1e-12)


def test_angular_term_is_strictly_decreasing():
    ys = angular_term(np.linspace(0.0, 20.0, 2001))
    assert np.all(np.diff(ys) < 0.0)
    assert np.all((ys > 0.0) & (ys <= HALF_PI))


def test_bound_examples():
    assert math.isclose(bound_Bk(2), LOG_3_2SQRT2, rel_tol=1e-12)
    assert bound_Bk(2) == pytest.approx(1.7627471740, abs=1e-10)
    assert math.isclose(bound_Bk(3), math.log(7.0 + 4.0 * math.sqrt(3.0)), rel_tol=1e-12)
    assert bound_Bk(3) == pytest.approx(2.6339157938, abs=1e-10)
    c = math.cos(math.pi / 20.0)
    assert math.isclose(bound_Bk(10), math.log((1.0 + c) / (1.0 - c)), rel_tol=1e-12)


def test_bound_beats_log_2k_minus_1():
    df = bounds_table(range(2, 65))
    assert len(df) == 63
    assert (df["B_k"] > df["log_2k_minus_1"]).all()
    assert np.all(np.diff(df["B_k"]) > 0.0)
    assert df.loc[0, "B_k"] - df.loc[0, "log_2k_minus_1"] == pytest.approx(0.664, abs=5e-4)
    assert math.isclose(df.loc[0, "B_k"] - math.log(3.0), LOG_3_2SQRT2 - math.log(3.0), abs_tol=1e-9)
    assert df.loc[1, "log_2k_minus_1"] == pytest.approx(math.log(5.0))
    assert log2k_bound(10) == pytest.approx(math.log(19.0))


def test_accs_region_is_strictly_larger():
    for k in (2, 3, 5, 10):
        ys, cos_sum, angle_sum = accs_region_witness(k)
        assert cos_sum <= 1.0 + 1e-12
        assert angle_sum > HALF_PI


## Defect reports
def test_gamma2_is_extremal_at_i(g2):
    r = defect_report(g2, POINT_I)
    assert r.displacements == pytest.approx((LOG_3_2SQRT2, LOG_3_2SQRT2), abs=1e-12)
    assert r.angular_sum == pytest.approx(HALF_PI, abs=1e-12)
    assert abs(r.defect) < 1e-12
    assert r.satisfies_main and r.satisfies_accs and not r.advisory
    assert r.max_displacement == pytest.approx(r.bound_Bk, abs=1e-12)


@pytest.mark.parametrize("y", [0.3, 1.0, 2.0, 7.0, 50.0])
def test_gamma2_is_extremal_along_imaginary_axis(g2, y):
    # sinh(d1/2) sinh(d2/2) = |z|^2 / y^2, which is 1 exactly on Re z = 0
    assert abs(defect_report(g2, Point(0.0, y)).defect) < 1e-12


@pytest.mark.parametrize("z", [Point(0.5, 1.0), Point(-0.3, 2.0), Point(0.9, 0.4)])
def test_gamma2_defect_positive_off_axis(g2, z):
    assert defect_report(g2, z).defect > 1e-6


def test_random_schottky_groups_satisfy_inequality(rng):
    for seed in range(10):
        k = 2 + seed % 3
        spec = random_schottky(k, 0.9 * math.pi / (2 * k), seed=seed)
        pts = random_points(rng, 100, radius=3.0)
        df = defect_frame(spec, [p.x for p in pts], [p.y for p in pts])
        assert (df["defect"] >= -1e-9).all()
        assert df["satisfies_main"].all()
        # the sharper inequality implies the weaker one
        assert df.loc[df["satisfies_main"], "satisfies_accs"].all()


def test_defect_frame_matches_reports(schottky3):
    z = Point(0.4, 0.7)
    row = defect_frame(schottky3, [z.x], [z.y]).iloc[0]
    rep = defect_report(schottky3, z).to_row()
    for key in ("d_1", "d_2", "d_3", "angular_sum", "defect"):
        assert row[key] == pytest.approx(rep[key], rel=1e-12)


def test_uncertified_group_is_advisory(g2):
    bare = GroupSpec(g2.generators)
    assert defect_report(bare, POINT_I).advisory
    with pytest.raises(UncertifiedGroup):
        defect_report(bare, POINT_I, strict=True)


## Lemma-level pieces
def test_displacement_lower_bound_examples():
    assert displacement_lower_bound(MassPair(0.3, 0.3)) == pytest.approx(0.0, abs=1e-15)
    assert displacement_lower_bound(MassPair(0.5, 0.5)) == pytest.approx(0.0, abs=1e-15)
    assert displacement_lower_bound(MassPair(0.25, 0.75)) == pytest.approx(LOG_3_2SQRT2, rel=1e-12)
    assert displacement_lower_bound(MassPair(0.4, 0.1)) < 0.0


def test_displacement_lower_bound_degenerate():
    for a, b in ((0.0, 0.5), (0.2, 0.0), (0.2, 1.0)):
        with pytest.raises(DegenerateMass):
            displacement_lower_bound(MassPair(a, b))
    with pytest.raises(PreconditionViolated) as err:
        MassPair(0.7, 0.5)
    assert err.value.hypothesis == "0 <= a <= 1/2"


def test_kernel_arc_examples():
    for a in (0.1, 0.5, 0.9):
        assert kernel_arc_integral(0.0, a) == pytest.approx(a, abs=1e-15)
    assert kernel_arc_integral(3.0, 1.0) == 1.0
    assert kernel_arc_integral(math.log(3.0), 0.5) == pytest.approx(0.7951672353, abs=1e-10)
    assert kernel_arc_integral(800.0, 0.3) == pytest.approx(1.0)


@pytest.mark.parametrize("h", [0.0, 0.5, 2.0, 5.0, 10.0])
@pytest.mark.parametrize("a", [0.01, 0.25, 0.5, 0.75, 0.99])
def test_kernel_arc_closed_form_matches_quadrature(h, a):
    assert kernel_arc_integral(h, a) == pytest.approx(kernel_arc_quadrature(h, a), abs=1e-9)


def _comparison_instance(rng):
    n = int(rng.integers(1, 21))
    f = rng.exponential(size=n)
    m = int(rng.integers(1, n + 1))
    C = np.argsort(-f)[:m]
    mu = rng.exponential(size=n) * (rng.random(n) < 0.8)
    mu0 = mu * rng.random(n)
    cap = mu[C].sum()
    if mu0.sum() > cap:
        mu0 = mu0 * (cap / mu0.sum())
    return f, mu, mu0, C


def test_measure_comparison_random_instances(rng):
    for _ in range(500):
        assert measure_comparison_check(*_comparison_instance(rng))


def test_measure_comparison_examples():
    f = np.array([3.0, 2.0, 1.0])
    mu = np.array([0.5, 1.0, 2.0])
    assert measure_comparison_check(f, mu, np.zeros(3), [0])
    assert measure_comparison_check(f, mu, mu, np.ones(3, dtype=bool))


@pytest.mark.parametrize(
    "f, mu0, C, hypothesis",
    [
        ([3.0, 2.0, 1.0], [-0.1, 0.0, 0.0], [0], "0 <= mu0"),
        ([3.0, 2.0, 1.0], [0.6, 0.0, 0.0], [0], "mu0 <= mu"),
        ([3.0, 2.0, 1.0], [0.5, 0.5, 0.0], [0], "mu(C) >= mu0(X)"),
        ([3.0, -2.0, 1.0], [0.1, 0.1, 0.0], [0, 1], "f >= 0"),
        ([1.0, 2.0, 3.0], [0.1, 0.0, 0.0], [0], "inf f(C) >= sup f(X - C)"),
    ],
)
def test_measure_comparison_rejects(f, mu0, C, hypothesis):
    mu = np.array([0.5, 1.0, 2.0])
    with pytest.raises(PreconditionViolated) as err:
        measure_comparison_check(f, mu, mu0, C)
    assert err.value.hypothesis == hypothesis


## The trigonometric chain
@pytest.mark.parametrize("k", range(2, 9))
def test_chain_symmetric_masses_give_sharp_bound(k):
    masses = np.full(k, 1.0 / (2 * k))
    assert chain_bound(masses, masses) == pytest.approx(np.full(k, bound_Bk(k)), rel=1e-12)
    df = trig_chain_check(masses, masses)
    assert (df["slack"] >= -1e-12).all()
    last = df[df["step"] == "log_bound"]
    assert last["rhs"].to_numpy() == pytest.approx(np.full(k, bound_Bk(k)), rel=1e-12)


def test_chain_random_masses(rng):
    for _ in range(1000):
        k = int(rng.integers(2, 7))
        w = rng.dirichlet(np.ones(2 * k)).reshape(k, 2)
        w.sort(axis=1)
        df = trig_chain_check(w[:, 0], w[:, 1])
        assert df["slack"].min() >= -1e-12
        assert set(df["step"]) == {
            "cot_over_tan", "cosine_split", "sin_product", "half_angle", "log_bound", "angle"
        }


def test_chain_rejects_bad_masses():
    with pytest.raises(PreconditionViolated) as err:
        trig_chain_check([0.3, 0.2], [0.2, 0.3])
    assert err.value.hypothesis == "alpha <= beta"
    with pytest.raises(PreconditionViolated):
        trig_chain_check([0.2, 0.2], [0.4, 0.4])


def test_sin_product():
    x = np.linspace(0.01, 3.1, 50)
    assert np.abs(sin_product_slack(x, x)).max() < 1e-14
    rng = np.random.default_rng(5)
    xs, ys = rng.uniform(0.0, math.pi, size=(2, 10_000))
    assert sin_product_slack(xs, ys).min() >= -1e-14


def test_mass_chain_bound():
    quarter = {v: 0.25 for v in range(1, 5)}
    assert mass_chain_bound(quarter) == pytest.approx([LOG_3_2SQRT2, LOG_3_2SQRT2], rel=1e-12)
    bounds = mass_chain_bound({1: 0.0, 2: 0.5, 3: 0.25, 4: 0.25})
    assert bounds[0] == math.inf
    assert math.isfinite(bounds[1])
    with pytest.raises(PreconditionViolated):
        mass_chain_bound({1: 0.5, 2: 0.5, 3: 0.5, 4: 0.5})
    with pytest.raises(PreconditionViolated):
        mass_chain_bound({1: 0.5, 2: 0.5})


## Corollaries
def test_loop_pair_examples():
    assert buser_product(LOG_3_2SQRT2, LOG_3_2SQRT2) == pytest.approx(1.0, abs=1e-12)
    assert buser_product(2.0 * math.asinh(1.0), 2.0 * math.asinh(1.0)) == pytest.approx(1.0, abs=1e-15)
    r = loop_pair_check(3.0, 2.5)
    assert r.premise and r.holds and r.product > 1.0


def test_loop_pair_follows_from_inequality(g2, rng):
    pts = random_points(rng, 500, radius=3.0)
    df = defect_frame(g2, [p.x for p in pts], [p.y for p in pts])
    for d1, d2, defect in zip(df["d_1"], df["d_2"], df["defect"]):
        if defect >= 0.0:
            r = loop_pair_check(d1, d2)
            assert r.holds
            assert r.product >= 1.0 - 1e-9


def test_margulis(g2, rng):
    a, b = g2.generators
    assert margulis_check(a, b, POINT_I)
    for z in random_points(rng, 100, radius=3.0):
        assert margulis_check(a, b, z, g2.certificate)
    for seed in range(5):
        spec = random_schottky(2, 0.6, seed=seed)
        z = random_points(np.random.default_rng(seed), 1)[0]
        assert margulis_check(*spec.generators, z, spec.certificate)
    assert MARGULIS_CONSTANT == pytest.approx(LOG_3_2SQRT2)


## Full-size runs
def _points(rng, n):
    pts = random_points(rng, n, radius=3.0)
    return [p.x for p in pts], [p.y for p in pts]


@pytest.mark.slow
def test_schottky_sweep_ten_thousand_trials(rng):
    frames = []
    for seed in range(150):
        k = 2 + seed % 3
        spec = random_schottky(k, 0.9 * math.pi / (2 * k), seed=seed)
        frames.append(defect_frame(spec, *_points(rng, 67)))
    assert sum(len(df) for df in frames) >= 10_000
    for df in frames:
        ds = df.filter(regex=r"^d_\d+$").to_numpy()
        sums = np.array([accs_sum(row) for row in ds])
        assert (df["defect"] >= -1e-9).all()
        assert (sums <= 0.5 + 1e-9).all()
        assert df["satisfies_accs"].all()


@pytest.mark.slow
def test_kernel_arc_closed_form_on_fine_grid():
    worst = 0.0
    for h in np.linspace(0.0, 10.0, 50):
        for a in np.linspace(0.01, 0.99, 50):
            worst = max(worst, abs(kernel_arc_integral(h, a) - kernel_arc_quadrature(h, a)))
    assert worst < 1e-9


@pytest.mark.slow
def test_loop_pair_on_random_rank_two_groups():
    for seed in range(1000):
        spec = random_schottky(2, 0.9 * math.pi / 4.0, seed=seed)
        z = random_points(np.random.default_rng(seed), 1, radius=3.0)[0]
        r = defect_report(spec, z, certified=True)
        assert r.defect >= -1e-9
        if r.defect >= 0.0:
            assert loop_pair_check(*r.displacements).product >= 1.0 - 1e-9


@pytest.mark.slow
def test_gamma2_margulis_is_strict_away_from_i(g2, rng):
    a, b = g2.generators
    for z in random_points(rng, 100, radius=3.0):
        if distance(z, POINT_I) < 1e-6:
            continue
        assert max(displacement(a, z), displacement(b, z)) > MARGULIS_CONSTANT
        assert margulis_check(a, b, z, g2.certificate)

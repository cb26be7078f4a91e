"""Searches over basepoints z for the smallest maximal displacement and the
largest angular sum of a group's generators.

Both objectives are optimised with scipy's derivative-free methods in the
coordinates (x, log y), which cover the whole half-plane. Each run does
`restarts` seeded starts (the first at `cfg.start`, default i) followed by a
polish run from the best point.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy import optimize

from .exceptions import BudgetExceeded, FuchsError, NotConverged
from .freegroup import GroupSpec
from .hyperbolic import POINT_I, Point, distance, displacements_many, random_points
from .inequality import check_certified
from .util.general import get_logger

log = get_logger(__name__)

GRID_CAP = 10**7
DISTINCT_OPTIMA = 1e-3

METHODS = {
    "simplex": "Nelder-Mead",
    "simplex-search": "Nelder-Mead",
    "coordinate-descent": "Powell",
    "coordinate-descent-on-half-plane": "Powell",
}


class Objective(str, Enum):
    MAX_DISPLACEMENT = "max-displacement"
    ANGULAR_SUM = "angular-sum"

    @property
    def maximize(self) -> bool:
        return self is Objective.ANGULAR_SUM


@dataclass(frozen=True)
class OptimizerConfig:
    method: str = "simplex"
    max_iters: int = 4000
    tol: float = 1e-10
    seed: int = 0
    restarts: int = 5
    start: Optional[Point] = None
    step: float = 0.25
    raise_on_fail: bool = False

    def __post_init__(self):
        if self.method not in METHODS:
            raise FuchsError(f"Unknown method {self.method!r}; choose from {sorted(METHODS)}")
        if not self.tol > 0.0:
            raise FuchsError(f"tol must be positive, got {self.tol}")
        if self.max_iters < 1:
            raise FuchsError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.restarts < 1:
            raise FuchsError(f"restarts must be >= 1, got {self.restarts}")

    @property
    def scipy_method(self) -> str:
        return METHODS[self.method]


@dataclass
class Optimum:
    z_star: Point
    value: float
    iterations: int
    converged: bool
    history: List[Tuple[Point, float]] = field(default_factory=list)
    local_optima: List[Tuple[Point, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "z_star": self.z_star.to_dict(),
            "value": self.value,
            "iterations": self.iterations,
            "converged": self.converged,
        }

    def history_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [{"x": p.x, "y": p.y, "value": v} for p, v in self.history],
            columns=["x", "y", "value"],
        )


## Objectives
def objective_values(spec: GroupSpec, objective: Objective, xs, ys) -> np.ndarray:
    """Objective at many basepoints (arrays of equal shape)."""
    objective = Objective(objective)
    ds = np.stack([displacements_many(g, xs, ys) for g in spec.generators])
    if objective is Objective.MAX_DISPLACEMENT:
        return ds.max(axis=0)
    return (2.0 * np.arctan(np.exp(-0.5 * ds))).sum(axis=0)


def objective_value(spec: GroupSpec, objective: Objective, z: Point) -> float:
    return float(objective_values(spec, objective, np.array([z.x]), np.array([z.y]))[0])


def _to_point(u) -> Point:
    return Point(u[0], math.exp(u[1]))


def _to_params(z: Point) -> np.ndarray:
    return np.array([z.x, math.log(z.y)])


## Iterative search
def _run_once(spec, objective, cfg, u0, step, history):
    sign = -1.0 if objective.maximize else 1.0

    def fun(u):
        if not np.all(np.isfinite(u)) or abs(u[1]) > 700.0:
            return math.inf
        return sign * objective_values(spec, objective, u[:1], np.exp(u[1:]))[0]

    def callback(uk):
        history.append((_to_point(uk), sign * fun(uk)))

    if cfg.scipy_method == "Nelder-Mead":
        simplex = np.array([u0, u0 + [step, 0.0], u0 + [0.0, step]])
        res = optimize.minimize(
            fun,
            u0,
            method="Nelder-Mead",
            callback=callback,
            options={
                "initial_simplex": simplex,
                "xatol": cfg.tol / 4.0,
                "fatol": 1e-15,
                "maxiter": cfg.max_iters,
                "maxfev": 4 * cfg.max_iters,
                "adaptive": True,
            },
        )
        sim = res.final_simplex[0]
        diameter = float(np.max(np.linalg.norm(sim[:, None, :] - sim[None, :, :], axis=-1)))
        converged = diameter < cfg.tol
    else:
        res = optimize.minimize(
            fun,
            u0,
            method="Powell",
            callback=callback,
            options={
                "direc": np.eye(2) * step,
                "xtol": cfg.tol,
                "ftol": 1e-15,
                "maxiter": cfg.max_iters,
            },
        )
        converged = bool(res.success)
    return res.x, sign * float(res.fun), int(res.nit), converged


def _starting_points(cfg: OptimizerConfig) -> List[Point]:
    first = cfg.start if cfg.start is not None else POINT_I
    rng = np.random.default_rng(cfg.seed)
    return [first] + random_points(rng, cfg.restarts - 1, radius=2.0, center=first)


def _distinct(optima: List[Tuple[Point, float]], maximize: bool) -> List[Tuple[Point, float]]:
    ordered = sorted(
        enumerate(optima), key=lambda t: ((-t[1][1] if maximize else t[1][1]), t[0])
    )
    kept: List[Tuple[Point, float]] = []
    for _, (p, v) in ordered:
        if all(distance(p, q) > DISTINCT_OPTIMA for q, _ in kept):
            kept.append((p, v))
    return kept


def _optimize(spec: GroupSpec, objective: Objective, cfg: OptimizerConfig) -> Optimum:
    """Runs the restarts one after another and polishes the best. Restarts are
    kept sequential so a seed always reproduces the same optimum."""
    check_certified(spec)
    history: List[Tuple[Point, float]] = []
    results = []
    total_iters = 0
    for i, z0 in enumerate(_starting_points(cfg)):
        u, val, nit, conv = _run_once(spec, objective, cfg, _to_params(z0), cfg.step, history)
        total_iters += nit
        results.append((u, val, conv))
        log.debug(f"Restart {i} from {z0}: value {val:.15g} converged={conv}")

    def better(r):
        return -r[1][1] if objective.maximize else r[1][1]

    _, (u, _, _) = min(enumerate(results), key=lambda r: (better(r), r[0]))
    # A simplex can stall on the kink set of the max; fresh, smaller simplices
    # restart the descent along the valley.
    for shrink in (10.0, 100.0, 1000.0):
        u, _, nit, converged = _run_once(spec, objective, cfg, u, cfg.step / shrink, history)
        total_iters += nit

    z_star = _to_point(u)
    value = objective_value(spec, objective, z_star)
    local = _distinct([(_to_point(r[0]), r[1]) for r in results], objective.maximize)

    opt = Optimum(
        z_star=z_star,
        value=value,
        iterations=total_iters,
        converged=converged,
        history=history,
        local_optima=local,
    )
    if not converged:
        msg = f"{objective.value} search did not converge to tol {cfg.tol}; best {value:.12g} at {z_star}"
        if cfg.raise_on_fail:
            raise NotConverged(msg)
        log.warning(msg)
    log.info(f"{objective.value}: {value:.15g} at {z_star} ({total_iters} iterations)")
    return opt


def minimize_max_displacement(spec: GroupSpec, cfg: Optional[OptimizerConfig] = None) -> Optimum:
    return _optimize(spec, Objective.MAX_DISPLACEMENT, cfg or OptimizerConfig())


def maximize_angular_sum(spec: GroupSpec, cfg: Optional[OptimizerConfig] = None) -> Optimum:
    return _optimize(spec, Objective.ANGULAR_SUM, cfg or OptimizerConfig())


## Brute force
def grid_oracle(
    spec: GroupSpec,
    objective: Objective,
    window: Tuple[float, float, float, float],
    resolution: float,
) -> Optimum:
    """Exhaustive evaluation on the grid x = xmin + i*res, y = ymin + j*res
    inside window = (xmin, xmax, ymin, ymax), endpoints included."""
    objective = Objective(objective)
    xmin, xmax, ymin, ymax = (float(v) for v in window)
    if not resolution > 0.0:
        raise FuchsError(f"resolution must be positive, got {resolution}")
    if xmax < xmin or ymax < ymin:
        raise FuchsError(f"Empty window {window}")
    if ymin <= 0.0:
        raise FuchsError(f"Window must lie in the upper half-plane, got ymin={ymin}")

    nx = int(math.floor((xmax - xmin) / resolution + 1e-9)) + 1
    ny = int(math.floor((ymax - ymin) / resolution + 1e-9)) + 1
    if nx * ny > GRID_CAP:
        raise BudgetExceeded(f"Grid of {nx} x {ny} cells exceeds cap {GRID_CAP}")

    xs = xmin + resolution * np.arange(nx)
    ys = ymin + resolution * np.arange(ny)
    gx, gy = np.meshgrid(xs, ys, indexing="ij")
    vals = objective_values(spec, objective, gx.ravel(), gy.ravel())
    idx = int(np.argmax(vals) if objective.maximize else np.argmin(vals))

    z_star = Point(gx.ravel()[idx], gy.ravel()[idx])
    log.debug(f"Grid oracle {nx}x{ny}: {vals[idx]:.12g} at {z_star}")
    return Optimum(z_star=z_star, value=float(vals[idx]), iterations=nx * ny, converged=True)

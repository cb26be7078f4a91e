"""The displacement inequality

    sum_i arccos(tanh(d_i / 2)) <= pi / 2,    d_i = d(z, g_i z),

for free Fuchsian groups, its sharp bound, and the ingredients of its proof:
the Poisson-kernel arc integral, the finite measure-comparison oracle, the
trigonometric chain, and the Margulis / loop-pair corollaries.

Every theorem-derived comparison allows SLACK of absolute error; reports
carry the raw signed values.
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy import integrate
from scipy.special import expit

from .exceptions import DegenerateMass, FuchsError, PreconditionViolated, UncertifiedGroup
from .freegroup import GroupSpec, PingPongCertificate, verify_certificate
from .hyperbolic import (
    Isometry,
    Point,
    displacement,
    displacements_many,
    poisson_kernel_from_angle,
)
from .util.general import get_logger

log = get_logger(__name__)

HALF_PI = 0.5 * math.pi
SLACK = 1e-9
MARGULIS_CONSTANT = math.log(3.0 + 2.0 * math.sqrt(2.0))


## Angular terms and bounds
def angular_term(d):
    """arccos(tanh(d/2)), evaluated as 2*arctan(exp(-d/2)) which keeps full
    relative precision for large d. Works on scalars and arrays."""
    d = np.asarray(d, dtype=float)
    if np.any(d < 0.0):
        raise FuchsError("Displacements must be nonnegative")
    y = 2.0 * np.arctan(np.exp(-0.5 * d))
    return float(y) if y.ndim == 0 else y


def displacement_from_angle(y):
    """Inverse of `angular_term`: log((1 + cos y) / (1 - cos y))."""
    y = np.asarray(y, dtype=float)
    if np.any((y <= 0.0) | (y > HALF_PI + 1e-15)):
        raise FuchsError("Angles must lie in (0, pi/2]")
    d = -2.0 * np.log(np.tan(0.5 * y))
    d = np.maximum(d, 0.0)
    return float(d) if d.ndim == 0 else d


def bound_Bk(k: int) -> float:
    """The sharp rank-k bound log((1 + cos(pi/2k)) / (1 - cos(pi/2k)))."""
    if k < 2:
        raise FuchsError(f"Need k >= 2, got {k}")
    return -2.0 * math.log(math.tan(math.pi / (4.0 * k)))


def log2k_bound(k: int) -> float:
    if k < 2:
        raise FuchsError(f"Need k >= 2, got {k}")
    return math.log(2.0 * k - 1.0)


def accs_sum(displacements) -> float:
    """sum_i 1 / (1 + e^{d_i}); the rank-k log(2k-1) inequality says <= 1/2."""
    return float(math.fsum(expit(-np.asarray(displacements, dtype=float))))


def bounds_table(k_values: Sequence[int]) -> pd.DataFrame:
    rows = []
    for k in k_values:
        b, l = bound_Bk(k), log2k_bound(k)
        rows.append({"k": int(k), "B_k": b, "log_2k_minus_1": l, "ratio": b / l})
    return pd.DataFrame(rows, columns=["k", "B_k", "log_2k_minus_1", "ratio"])


def accs_region_witness(k: int) -> Tuple[np.ndarray, float, float]:
    """Equal angles y_i = arccos(1 - 1/k): inside the region
    sum(1 - cos y_i) <= 1 yet with sum y_i > pi/2.

    Returns (ys, sum(1 - cos y), sum y)."""
    if k < 2:
        raise FuchsError(f"Need k >= 2, got {k}")
    ys = np.full(k, math.acos(1.0 - 1.0 / k))
    return ys, float(np.sum(1.0 - np.cos(ys))), float(np.sum(ys))


## Defect reports
@dataclass(frozen=True)
class DefectReport:
    k: int
    z: Point
    displacements: Tuple[float, ...]
    angular_terms: Tuple[float, ...]
    angular_sum: float
    defect: float
    max_displacement: float
    bound_Bk: float
    accs_sum: float
    satisfies_main: bool
    satisfies_accs: bool
    advisory: bool = False

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "z": self.z.to_dict(),
            "displacements": list(self.displacements),
            "angular_terms": list(self.angular_terms),
            "angular_sum": self.angular_sum,
            "defect": self.defect,
            "max_displacement": self.max_displacement,
            "bound_Bk": self.bound_Bk,
            "accs_sum": self.accs_sum,
            "satisfies_main": self.satisfies_main,
            "satisfies_accs": self.satisfies_accs,
            "advisory": self.advisory,
        }

    def to_row(self) -> dict:
        row = {"k": self.k, "z_x": self.z.x, "z_y": self.z.y}
        for i, d in enumerate(self.displacements, start=1):
            row[f"d_{i}"] = d
        row.update(
            angular_sum=self.angular_sum,
            defect=self.defect,
            satisfies_main=self.satisfies_main,
            satisfies_accs=self.satisfies_accs,
        )
        return row


def check_certified(
    spec: GroupSpec, certified: Optional[bool] = None, strict: bool = False
) -> bool:
    """True when the spec carries a certificate that verifies. Otherwise warn,
    or raise UncertifiedGroup when `strict`."""
    if certified is None:
        certified = spec.certified and verify_certificate(spec).valid
    if not certified:
        msg = "Group has no valid ping-pong certificate; results are advisory"
        if strict:
            raise UncertifiedGroup(msg)
        log.warning(msg)
    return certified


def defect_report(
    spec: GroupSpec, z: Point, strict: bool = False, certified: Optional[bool] = None
) -> DefectReport:
    """Evaluates the inequality for `spec` at `z`.

    `certified` skips the certificate check when the caller already did it.
    Uncertified groups still get a report, flagged advisory, unless `strict`.
    """
    certified = check_certified(spec, certified, strict)
    ds = tuple(displacement(g, z) for g in spec.generators)
    ys = tuple(angular_term(d) for d in ds)
    total = math.fsum(ys)
    defect = HALF_PI - total
    accs = accs_sum(ds)
    return DefectReport(
        k=spec.k,
        z=z,
        displacements=ds,
        angular_terms=ys,
        angular_sum=total,
        defect=defect,
        max_displacement=max(ds),
        bound_Bk=bound_Bk(spec.k),
        accs_sum=accs,
        satisfies_main=defect >= -SLACK,
        satisfies_accs=accs <= 0.5 + SLACK,
        advisory=not certified,
    )


def defect_frame(spec: GroupSpec, xs, ys) -> pd.DataFrame:
    """Vectorised defect rows (the sweep CSV schema) for many basepoints."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    ds = np.stack([displacements_many(g, xs, ys) for g in spec.generators], axis=1)
    terms = 2.0 * np.arctan(np.exp(-0.5 * ds))
    total = terms.sum(axis=1)
    defect = HALF_PI - total
    accs = expit(-ds).sum(axis=1)

    df = pd.DataFrame({"k": spec.k, "z_x": xs, "z_y": ys})
    for i in range(spec.k):
        df[f"d_{i + 1}"] = ds[:, i]
    df["angular_sum"] = total
    df["defect"] = defect
    df["satisfies_main"] = defect >= -SLACK
    df["satisfies_accs"] = accs <= 0.5 + SLACK
    return df


## Lemma-level pieces
@dataclass(frozen=True)
class MassPair:
    a: float
    b: float

    def __post_init__(self):
        if not 0.0 <= self.a <= 0.5:
            raise PreconditionViolated("0 <= a <= 1/2", f"a={self.a} outside [0, 1/2]")
        if not 0.0 <= self.b <= 1.0:
            raise PreconditionViolated("0 <= b <= 1", f"b={self.b} outside [0, 1]")


def displacement_lower_bound(m: MassPair) -> float:
    """log(tan(pi b / 2) / tan(pi a / 2)); negative values are vacuous."""
    if m.a == 0.0:
        raise DegenerateMass("a = 0 makes the bound infinite")
    if m.b in (0.0, 1.0):
        raise DegenerateMass(f"b = {m.b} is a degenerate mass")
    return math.log(math.tan(0.5 * math.pi * m.b) / math.tan(0.5 * math.pi * m.a))


def _check_arc_args(h: float, a: float) -> None:
    if h < 0.0:
        raise FuchsError(f"Need h >= 0, got {h}")
    if not 0.0 < a <= 1.0:
        raise FuchsError(f"Need 0 < a <= 1, got {a}")


def kernel_arc_integral(h: float, a: float) -> float:
    """Closed form (2/pi) arctan(e^h tan(pi a / 2)) of the Poisson-kernel mass
    of the arc of half-width pi*a facing the second point."""
    _check_arc_args(h, a)
    if a == 1.0:
        return 1.0
    with np.errstate(over="ignore"):
        scaled = np.exp(h) * math.tan(0.5 * math.pi * a)
    return float(2.0 / math.pi * np.arctan(scaled))


def kernel_arc_quadrature(h: float, a: float) -> float:
    """(1/pi) * integral_0^{pi a} dphi / (cosh h - sinh h cos phi) by adaptive
    quadrature. The integrand peaks at 0 with width ~ e^-h, so the peak
    scale is passed as a breakpoint."""
    _check_arc_args(h, a)
    upper = math.pi * a
    width = math.exp(-h)
    points = [p for p in (width, 10.0 * width, 100.0 * width) if 0.0 < p < upper]
    val, _ = integrate.quad(
        lambda phi: float(poisson_kernel_from_angle(h, phi)),
        0.0,
        upper,
        points=points or None,
        limit=200,
        epsabs=1e-13,
        epsrel=1e-12,
    )
    return val / math.pi


def measure_comparison_check(f, mu, mu0, C, tol: float = 1e-12) -> bool:
    """Finite ground-set oracle for: 0 <= mu0 <= mu, mu(C) >= mu0(X), f >= 0
    and inf f(C) >= sup f(X - C) imply int_X f dmu0 <= int_C f dmu.

    `C` is a boolean mask or an index collection. Raises PreconditionViolated
    naming the failed hypothesis."""
    f = np.asarray(f, dtype=float)
    mu = np.asarray(mu, dtype=float)
    mu0 = np.asarray(mu0, dtype=float)
    if not f.shape == mu.shape == mu0.shape:
        raise PreconditionViolated("shapes", "f, mu and mu0 need the same ground set")

    mask = np.asarray(C)
    if mask.dtype != bool:
        idx = mask.astype(int)
        mask = np.zeros(f.shape, dtype=bool)
        mask[idx] = True

    if np.any(mu0 < -tol):
        raise PreconditionViolated("0 <= mu0")
    if np.any(mu0 > mu + tol):
        raise PreconditionViolated("mu0 <= mu")
    if mu[mask].sum() < mu0.sum() - tol:
        raise PreconditionViolated("mu(C) >= mu0(X)")
    if np.any(f < -tol):
        raise PreconditionViolated("f >= 0")
    if mask.any() and (~mask).any() and f[mask].min() < f[~mask].max() - tol:
        raise PreconditionViolated("inf f(C) >= sup f(X - C)")

    lhs = float(np.dot(f, mu0))
    rhs = float(np.dot(f[mask], mu[mask]))
    return lhs <= rhs + tol * max(1.0, abs(rhs))


## The trigonometric chain
def sin_product_slack(x, y):
    """sin^2((x + y)/2) - sin x sin y, nonnegative on (0, pi)^2."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.sin(0.5 * (x + y)) ** 2 - np.sin(x) * np.sin(y)


def _check_masses(alphas: np.ndarray, betas: np.ndarray) -> None:
    if alphas.shape != betas.shape or alphas.ndim != 1:
        raise PreconditionViolated("shapes", "alphas and betas need equal length")
    if np.any((alphas <= 0.0) | (alphas >= 0.5)):
        raise PreconditionViolated("0 < alpha < 1/2")
    if np.any((betas <= 0.0) | (betas >= 1.0)):
        raise PreconditionViolated("0 < beta < 1")
    if np.any(alphas > betas):
        raise PreconditionViolated("alpha <= beta")
    if alphas.sum() + betas.sum() > 1.0 + 1e-12:
        raise PreconditionViolated("sum(alpha + beta) <= 1")


def _rel(lhs, rhs):
    return (lhs - rhs) / np.maximum(1.0, np.abs(rhs))


def trig_chain_check(alphas, betas) -> pd.DataFrame:
    """Evaluates each link of the chain taking the masses (alpha_i, beta_i)
    of a generator and its inverse to the angular bound pi * p_i.

    One row per (generator, step). Inequalities carry the relative slack
    lhs - rhs; identities carry -|lhs - rhs| so that every slack should be
    nonnegative up to rounding."""
    alphas = np.asarray(alphas, dtype=float)
    betas = np.asarray(betas, dtype=float)
    _check_masses(alphas, betas)

    ha, hb = 0.5 * math.pi * alphas, 0.5 * math.pi * betas
    p = 0.5 * (alphas + betas)
    sin_ab = np.sin(ha) * np.sin(hb)

    lemma = 1.0 / (np.tan(hb) * np.tan(ha))
    split = np.cos(hb) * np.cos(ha) / sin_ab
    shifted = np.cos(math.pi * p) / sin_ab + 1.0
    squared = np.cos(math.pi * p) / np.sin(0.5 * math.pi * p) ** 2 + 2.0
    # 2 / (1 - cos pi p), written without the cancellation at small p
    closed = 1.0 / np.sin(0.5 * math.pi * p) ** 2
    d_bound = np.log(closed - 1.0)
    angle = 2.0 * np.arctan(np.exp(-0.5 * d_bound))

    steps = [
        ("cot_over_tan", lemma, split, False),
        ("cosine_split", split, shifted, False),
        ("sin_product", shifted + 1.0, squared, True),
        ("half_angle", squared, closed, False),
        ("log_bound", np.log(lemma), d_bound, True),
        ("angle", np.pi * p, angle, False),
    ]
    rows = []
    for name, lhs, rhs, is_inequality in steps:
        slack = _rel(lhs, rhs) if is_inequality else -np.abs(_rel(lhs, rhs))
        for i in range(len(alphas)):
            rows.append(
                {
                    "generator": i + 1,
                    "step": name,
                    "lhs": float(lhs[i]),
                    "rhs": float(rhs[i]),
                    "slack": float(slack[i]),
                }
            )
    return pd.DataFrame(rows, columns=["generator", "step", "lhs", "rhs", "slack"])


def chain_bound(alphas, betas) -> np.ndarray:
    """Per-generator displacement bound log((1 + cos pi p) / (1 - cos pi p))
    at the end of the chain, p = (alpha + beta) / 2."""
    alphas = np.asarray(alphas, dtype=float)
    betas = np.asarray(betas, dtype=float)
    _check_masses(alphas, betas)
    return displacement_from_angle(0.5 * math.pi * (alphas + betas))


def mass_chain_bound(masses: Dict[int, float], tol: float = 1e-9) -> List[float]:
    """Lower bounds log(tan(pi (1 - beta_i) / 2) / tan(pi alpha_i / 2)) on
    d(z, g_i z) from the boundary masses of a first-letter decomposition.

    `masses` maps letters 1..2k to totals. Each pair is relabelled so that
    alpha_i <= beta_i. A zero alpha gives math.inf."""
    letters = sorted(masses)
    n = len(letters)
    if n < 4 or n % 2 or letters != list(range(1, n + 1)):
        raise PreconditionViolated("letters 1..2k", f"Need masses for letters 1..2k, got {letters}")
    values = np.array([masses[v] for v in letters], dtype=float)
    if np.any(values < 0.0):
        raise PreconditionViolated("masses >= 0")
    if abs(values.sum() - 1.0) > tol:
        raise PreconditionViolated("sum of masses = 1", f"Masses sum to {values.sum()}")

    bounds = []
    for i in range(n // 2):
        alpha, beta = sorted(values[2 * i : 2 * i + 2])
        if alpha == 0.0:
            bounds.append(math.inf)
            continue
        bounds.append(
            math.log(math.tan(0.5 * math.pi * (1.0 - beta)) / math.tan(0.5 * math.pi * alpha))
        )
    return bounds


## Corollaries
def buser_product(l1: float, l2: float) -> float:
    if l1 <= 0.0 or l2 <= 0.0:
        raise FuchsError(f"Loop lengths must be positive, got {l1}, {l2}")
    return math.sinh(0.5 * l1) * math.sinh(0.5 * l2)


@dataclass(frozen=True)
class LoopPairReport:
    angular_sum: float
    premise: bool
    product: float

    @property
    def holds(self) -> bool:
        return (not self.premise) or self.product >= 1.0 - SLACK


def loop_pair_check(l1: float, l2: float) -> LoopPairReport:
    """Angular sum of two loop lengths and the product sinh(l1/2) sinh(l2/2).
    An angular sum <= pi/2 is equivalent to a product >= 1."""
    total = angular_term(l1) + angular_term(l2)
    return LoopPairReport(total, total <= HALF_PI + SLACK, buser_product(l1, l2))


def margulis_check(
    g: Isometry,
    h: Isometry,
    z: Point,
    certificate: Optional[PingPongCertificate] = None,
    strict: bool = False,
) -> bool:
    """max(d(z, gz), d(z, hz)) >= log(3 + 2 sqrt 2), up to SLACK.

    Without a valid certificate for <g, h> the answer is advisory."""
    spec = GroupSpec((g, h), certificate)
    check_certified(spec, None, strict)
    value = max(displacement(g, z), displacement(h, z))
    log.debug(f"Margulis value at {z}: {value:.12g}")
    return value >= MARGULIS_CONSTANT - SLACK

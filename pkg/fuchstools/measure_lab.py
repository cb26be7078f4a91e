"""Finite-word approximations of the Patterson-Sullivan density seen from a
basepoint z0, and checks of the first-letter (paradoxical) decomposition.

Every nonidentity word w of length <= max_len puts weight exp(-s d(z0, w z0))
on the direction of w z0 from z0, read in the disk frame centred at z0. The
identity atom is left out and the weights are scaled to total 1.

Bins are centred: bin i covers [2pi (i - 1/2)/N, 2pi (i + 1/2)/N).
"""

import math
from dataclasses import dataclass
from typing import Dict, Iterable, Optional

import numpy as np
import pandas as pd

from .exceptions import EmptyOrbit, FuchsError
from .freegroup import DEFAULT_WORD_CAP, BoundaryDisk, GroupSpec, inverse_letter, word_table
from .hyperbolic import (
    TWO_PI,
    Point,
    angular_gap,
    directions_from,
    distance,
    distance_many,
    normalize_angle,
    poisson_kernel_from_angle,
    to_disk,
)
from .inequality import check_certified
from .util.errors import tv_from_uniform
from .util.general import get_logger

log = get_logger(__name__)

DEFAULT_S = 1.05
DEFAULT_BINS = 64
MIN_BINS = 16


@dataclass(frozen=True)
class BoundaryMeasure:
    bins: np.ndarray

    def __post_init__(self):
        bins = np.asarray(self.bins, dtype=float)
        if bins.ndim != 1 or bins.size == 0:
            raise FuchsError("Bins must be a nonempty 1-d array")
        if np.any(bins < 0.0):
            raise FuchsError("Bin masses must be nonnegative")
        object.__setattr__(self, "bins", bins)

    @classmethod
    def from_directions(cls, directions, weights, N: int) -> "BoundaryMeasure":
        return cls(np.bincount(bin_index(directions, N), weights=weights, minlength=N))

    @property
    def N(self) -> int:
        return len(self.bins)

    @property
    def total(self) -> float:
        return math.fsum(self.bins)

    def bin_centers(self) -> np.ndarray:
        return TWO_PI * np.arange(self.N) / self.N

    def arc_mass(self, center: float, radius: float) -> float:
        """Mass of the bins whose centres lie within the closed arc."""
        inside = angular_gap(self.bin_centers(), center) <= radius
        return math.fsum(self.bins[inside])

    def mass_in_disk(self, disk: BoundaryDisk) -> float:
        return self.arc_mass(disk.center, disk.radius)

    def tv_from_uniform(self) -> float:
        return tv_from_uniform(self.bins)

    def rotate(self, m: int) -> "BoundaryMeasure":
        """Shift by m bins counterclockwise."""
        return BoundaryMeasure(np.roll(self.bins, m))

    def __add__(self, other: "BoundaryMeasure") -> "BoundaryMeasure":
        if self.N != other.N:
            raise FuchsError(f"Bin counts differ: {self.N} vs {other.N}")
        return BoundaryMeasure(self.bins + other.bins)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            {"bin_index": np.arange(self.N), "angle_center": self.bin_centers(), "mass": self.bins}
        )

    def to_dict(self) -> dict:
        return {"N": self.N, "bins": self.bins.tolist(), "total": self.total}


def bin_index(theta, N: int) -> np.ndarray:
    width = TWO_PI / N
    idx = np.floor(normalize_angle(np.asarray(theta, dtype=float) + 0.5 * width) / width)
    return idx.astype(np.int64) % N


@dataclass(frozen=True)
class PoincareApprox:
    spec: GroupSpec
    basepoint: Point
    max_len: int
    exponent_s: float
    directions: np.ndarray
    weights: np.ndarray
    first_letters: np.ndarray
    distances: np.ndarray

    @property
    def n_points(self) -> int:
        return len(self.weights)

    def measure(self, N: int = DEFAULT_BINS) -> BoundaryMeasure:
        _check_bins(N)
        return BoundaryMeasure.from_directions(self.directions, self.weights, N)

    def letter_measure(self, letter: int, N: int = DEFAULT_BINS) -> BoundaryMeasure:
        _check_bins(N)
        sel = self.first_letters == letter
        return BoundaryMeasure.from_directions(self.directions[sel], self.weights[sel], N)

    def letter_total(self, letter: int) -> float:
        return math.fsum(self.weights[self.first_letters == letter])

    def letter_mass_in_disk(self, letter: int, disk: Optional[BoundaryDisk] = None) -> float:
        """Share of the first-letter mass of `letter` whose directions fall in
        `disk` (default: the certificate disk of the letter). Disks are given
        in the reference frame and moved to the basepoint frame here."""
        if disk is None:
            if self.spec.certificate is None:
                raise FuchsError("No certificate disk to compare against")
            disk = self.spec.certificate.disk_for(letter)
        local = disk.in_frame(self.basepoint)
        sel = self.first_letters == letter
        total = math.fsum(self.weights[sel])
        if total == 0.0:
            return 0.0
        inside = local.contains(self.directions[sel], tol=1e-12)
        return math.fsum(self.weights[sel][inside]) / total


def _check_bins(N: int) -> None:
    if N < MIN_BINS:
        raise FuchsError(f"Need at least {MIN_BINS} bins, got {N}")


def poincare_approx(
    spec: GroupSpec,
    z0: Point,
    max_len: int,
    s: float = DEFAULT_S,
    cap: int = DEFAULT_WORD_CAP,
) -> PoincareApprox:
    """Weighted orbit of `z0` over reduced words up to `max_len`, with weights
    e^{-s d} normalised to 1.

    Words and their first letters are generated and weighted in a single
    sequential pass, so equal inputs give identical measures.
    """
    if max_len < 1:
        raise EmptyOrbit("Truncation at length 0 leaves only the identity atom; no mass")
    if not s > 0.0:
        raise FuchsError(f"Exponent s must be positive, got {s}")
    check_certified(spec)

    table = word_table(spec, max_len, cap)
    xs, ys = table.orbit_points(z0)
    xs, ys = xs[1:], ys[1:]
    d = distance_many(z0.x, z0.y, xs, ys)
    w = np.exp(-s * d)
    w = w / math.fsum(w)

    approx = PoincareApprox(
        spec=spec,
        basepoint=z0,
        max_len=max_len,
        exponent_s=s,
        directions=directions_from(z0, xs, ys),
        weights=w,
        first_letters=table.first_letters[1:].astype(np.int64),
        distances=d,
    )
    log.debug(f"Poincare approximation k={spec.k} max_len={max_len} s={s}: {approx.n_points} points")
    return approx


def ps_approximation(
    spec: GroupSpec,
    z0: Point,
    max_len: int,
    s: float = DEFAULT_S,
    N: int = DEFAULT_BINS,
) -> BoundaryMeasure:
    _check_bins(N)
    return poincare_approx(spec, z0, max_len, s).measure(N)


def decompose_by_first_letter(approx: PoincareApprox, N: int = DEFAULT_BINS) -> Dict[int, BoundaryMeasure]:
    """Letter -> measure of the orbit points whose word starts with it."""
    return {v: approx.letter_measure(v, N) for v in range(1, 2 * approx.spec.k + 1)}


def measured_masses(approx: PoincareApprox) -> Dict[int, float]:
    return {v: approx.letter_total(v) for v in range(1, 2 * approx.spec.k + 1)}


def decomposition_identity_residual(approx: PoincareApprox, psi: int, N: int = DEFAULT_BINS) -> float:
    """|int P(z0, psi^-1 z0, .) d nu_{psi^-1} - (1 - nu_psi total)|, the
    kernel evaluated at bin centres."""
    spec, z0 = approx.spec, approx.basepoint
    inv = inverse_letter(psi)
    target = spec.letter_isometry(inv)(z0)

    h = distance(z0, target)
    nu_inv = approx.letter_measure(inv, N)
    if h == 0.0:
        lhs = nu_inv.total
    else:
        facing = to_disk(target, z0).angle
        kernel = poisson_kernel_from_angle(h, nu_inv.bin_centers() - facing)
        lhs = math.fsum(kernel * nu_inv.bins)
    rhs = 1.0 - approx.letter_total(psi)
    return abs(lhs - rhs)


def uniformity_trend(
    spec: GroupSpec,
    z0: Point,
    lengths: Iterable[int],
    s: float = DEFAULT_S,
    N: int = DEFAULT_BINS,
) -> pd.DataFrame:
    """Total-variation distance from the uniform bin measure per max_len."""
    rows = []
    for L in lengths:
        m = ps_approximation(spec, z0, L, s, N)
        rows.append({"max_len": int(L), "tv_distance": m.tv_from_uniform()})
    return pd.DataFrame(rows, columns=["max_len", "tv_distance"])

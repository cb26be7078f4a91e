"""Closed-form primitives of the hyperbolic plane.

Points live in the upper half-plane. The disk model is used through the
Cayley map re-centred at a basepoint c,

    w = (z - c) / (z - conj(c)),

so c goes to the origin and the upward vertical direction at c goes to angle
0. Boundary points are stored as angles in the reference frame centred at i
(angle 0 is the point at infinity, angle pi is 0) and can be read in the frame
of any other basepoint. Angles run counterclockwise.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Tuple, Union

import numpy as np
from scipy import integrate

from .exceptions import InvalidIsometry, InvalidPoint
from .util.general import get_logger

log = get_logger(__name__)

TWO_PI = 2.0 * math.pi
CONSTRUCTION_TOL = 1e-12
ZERO_DISTANCE = 1e-14
_SIGN_TOL = 1e-14


def normalize_angle(theta):
    """Reduce angle(s) into [0, 2pi). Works on scalars and arrays."""
    r = np.mod(theta, TWO_PI)
    if np.ndim(r) == 0:
        r = float(r)
        return 0.0 if r >= TWO_PI else r
    r[r >= TWO_PI] = 0.0
    return r


def angular_gap(a, b):
    """Unsigned angular distance between boundary angles, in [0, pi]."""
    diff = np.abs(normalize_angle(np.asarray(a) - np.asarray(b)))
    return np.minimum(diff, TWO_PI - diff)


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        x, y = float(self.x), float(self.y)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise InvalidPoint(f"Non-finite coordinates ({x}, {y})")
        if y <= 0.0:
            raise InvalidPoint(f"Point must lie in the upper half-plane, got y={y}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def from_complex(cls, z: complex) -> "Point":
        return cls(z.real, z.imag)

    @property
    def z(self) -> complex:
        return complex(self.x, self.y)

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y}

    def __str__(self):
        return f"{self.x:+.12g}{self.y:+.12g}i"


POINT_I = Point(0.0, 1.0)


def _set_entries(obj, a, b, c, d) -> None:
    for v in (a, b, c, d):
        if abs(v) > _SIGN_TOL:
            if v < 0.0:
                a, b, c, d = -a, -b, -c, -d
            break
    for name, v in zip("abcd", (a, b, c, d)):
        object.__setattr__(obj, name, float(v))


@dataclass(frozen=True)
class Isometry:
    """Orientation-preserving isometry z -> (az + b) / (cz + d).

    Entries are rescaled to determinant 1 and the sign is fixed so that the
    first nonzero entry is positive; both steps are idempotent. Products and
    inverses keep their entries and only get the sign fix.
    """

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        a, b, c, d = (float(v) for v in (self.a, self.b, self.c, self.d))
        if not all(math.isfinite(v) for v in (a, b, c, d)):
            raise InvalidIsometry(f"Non-finite matrix entries {[a, b, c, d]}")

        det = a * d - b * c
        if det <= CONSTRUCTION_TOL:
            raise InvalidIsometry(
                f"Matrix {[a, b, c, d]} has determinant {det}; need a positive determinant"
            )
        if abs(det - 1.0) > CONSTRUCTION_TOL:
            s = math.sqrt(det)
            a, b, c, d = a / s, b / s, c / s, d / s

        _set_entries(self, a, b, c, d)

    @classmethod
    def _product(cls, a: float, b: float, c: float, d: float) -> "Isometry":
        """Entries of a product of normalised matrices: determinant 1 up to
        rounding that grows with the entries, so only the sign is fixed."""
        obj = object.__new__(cls)
        _set_entries(obj, a, b, c, d)
        return obj

    # Builders
    @classmethod
    def identity(cls) -> "Isometry":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def from_list(cls, entries) -> "Isometry":
        entries = np.asarray(entries, dtype=float).ravel()
        if entries.size != 4:
            raise InvalidIsometry(f"Need 4 matrix entries, got {entries.size}")
        return cls(*entries)

    @classmethod
    def rotation(cls, alpha: float) -> "Isometry":
        """Rotation about i by `alpha`, counterclockwise in the disk frame."""
        ch, sh = math.cos(alpha / 2.0), math.sin(alpha / 2.0)
        return cls(ch, sh, -sh, ch)

    @classmethod
    def dilation(cls, lam: float) -> "Isometry":
        """z -> lam * z, translation by log(lam) along the imaginary axis."""
        if lam <= 0.0:
            raise InvalidIsometry(f"Dilation factor must be positive, got {lam}")
        r = math.sqrt(lam)
        return cls(r, 0.0, 0.0, 1.0 / r)

    @classmethod
    def translation(cls, t: float) -> "Isometry":
        return cls(1.0, t, 0.0, 1.0)

    # Algebra
    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]])

    def to_list(self) -> List[float]:
        return [self.a, self.b, self.c, self.d]

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return Isometry._product(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "Isometry":
        return Isometry._product(self.d, -self.b, -self.c, self.a)

    def conjugate_by(self, m: "Isometry") -> "Isometry":
        """m * self * m^-1"""
        return m @ self @ m.inverse()

    @property
    def trace(self) -> float:
        return self.a + self.d

    def projective_distance(self, other: "Isometry") -> float:
        """Operator-norm distance in PSL(2,R), i.e. minimised over the sign."""
        m1, m2 = self.matrix, other.matrix
        return float(min(np.linalg.norm(m1 - m2, 2), np.linalg.norm(m1 + m2, 2)))

    def is_identity(self, tol: float = 1e-9) -> bool:
        return self.projective_distance(Isometry.identity()) < tol

    def classify(self, tol: float = 1e-9) -> str:
        if self.is_identity(tol):
            return "identity"
        t = abs(self.trace)
        if t < 2.0 - tol:
            return "elliptic"
        if t <= 2.0 + tol:
            return "parabolic"
        return "hyperbolic"

    @property
    def translation_length(self) -> float:
        t = abs(self.trace)
        return 2.0 * math.acosh(t / 2.0) if t > 2.0 else 0.0

    # Actions
    def __call__(self, p: Point) -> Point:
        return apply(self, p)

    def disk_matrix(self) -> np.ndarray:
        """The same map in the reference disk frame (centred at i)."""
        cay = np.array([[1.0, -1.0j], [1.0, 1.0j]])
        cay_inv = np.array([[1.0j, 1.0j], [-1.0, 1.0]]) / 2.0j
        return cay @ self.matrix @ cay_inv

    def act_on_boundary(self, theta):
        """Images of reference-frame boundary angles (scalar or array)."""
        (p, q), (r, s) = self.disk_matrix()
        w = np.exp(1.0j * np.asarray(theta, dtype=float))
        return normalize_angle(np.angle((p * w + q) / (r * w + s)))


@dataclass(frozen=True)
class BoundaryPoint:
    theta: float

    def __post_init__(self):
        theta = float(self.theta)
        if not math.isfinite(theta):
            raise InvalidPoint(f"Non-finite boundary angle {theta}")
        object.__setattr__(self, "theta", normalize_angle(theta))

    @classmethod
    def from_angle(cls, phi: float, center: Point = POINT_I) -> "BoundaryPoint":
        """Boundary point seen at angle `phi` in the frame centred at `center`."""
        w = reframe(np.exp(1.0j * phi), center, POINT_I)
        return cls(float(np.angle(w)))

    @classmethod
    def from_real(cls, t: float) -> "BoundaryPoint":
        """Boundary point of the upper half-plane; t = inf is allowed."""
        if math.isinf(t):
            return cls(0.0)
        return cls(float(np.angle((t - 1.0j) / (t + 1.0j))))

    def angle_from(self, center: Point) -> float:
        """Angle of this boundary point in the frame centred at `center`."""
        w = reframe(np.exp(1.0j * self.theta), POINT_I, center)
        return normalize_angle(float(np.angle(w)))

    def to_real(self) -> float:
        if self.theta == 0.0:
            return math.inf
        w = complex(math.cos(self.theta), math.sin(self.theta))
        return (1.0j * (1.0 + w) / (1.0 - w)).real


@dataclass(frozen=True)
class DiskPoint:
    u: float
    v: float

    @property
    def w(self) -> complex:
        return complex(self.u, self.v)

    @property
    def radius(self) -> float:
        return math.hypot(self.u, self.v)

    @property
    def angle(self) -> float:
        return normalize_angle(math.atan2(self.v, self.u))


## Distances and actions
def distance(p: Point, q: Point) -> float:
    """Hyperbolic distance, using cosh d = 1 + |p-q|^2 / (2 Im p Im q) in the
    equivalent half-chord form sinh(d/2) = |p-q| / (2 sqrt(Im p Im q))."""
    chord = math.hypot(p.x - q.x, p.y - q.y)
    d = 2.0 * math.asinh(chord / (2.0 * math.sqrt(p.y * q.y)))
    return 0.0 if d < ZERO_DISTANCE else d


def distance_many(x1, y1, x2, y2) -> np.ndarray:
    """Vectorised `distance` over coordinate arrays (broadcasting)."""
    x1, y1, x2, y2 = (np.asarray(v, dtype=float) for v in (x1, y1, x2, y2))
    chord = np.hypot(x1 - x2, y1 - y2)
    d = 2.0 * np.arcsinh(chord / (2.0 * np.sqrt(y1 * y2)))
    return np.where(d < ZERO_DISTANCE, 0.0, d)


def apply(g: Isometry, p: Point) -> Point:
    z = p.z
    denom = g.c * z + g.d
    w = (g.a * z + g.b) / denom
    return Point(w.real, p.y / abs(denom) ** 2)


def apply_many(g: Isometry, xs, ys) -> Tuple[np.ndarray, np.ndarray]:
    z = np.asarray(xs, dtype=float) + 1.0j * np.asarray(ys, dtype=float)
    denom = g.c * z + g.d
    w = (g.a * z + g.b) / denom
    return w.real, np.asarray(ys, dtype=float) / np.abs(denom) ** 2


def displacement(g: Isometry, p: Point) -> float:
    return distance(p, apply(g, p))


def displacements_many(g: Isometry, xs, ys) -> np.ndarray:
    gx, gy = apply_many(g, xs, ys)
    return distance_many(xs, ys, gx, gy)


## Disk model
def _cayley(z, c: complex):
    return (z - c) / (z - np.conj(c))


def reframe(w, src: Point, dst: Point):
    """Moves disk coordinates from the frame centred at `src` to the frame
    centred at `dst`. Accepts arrays and boundary points (|w| = 1)."""
    s, c = src.z, dst.z
    w = np.asarray(w)
    return ((s - c) + (c - np.conj(s)) * w) / ((s - np.conj(c)) + (np.conj(c) - np.conj(s)) * w)


def to_disk(p: Point, center: Point = POINT_I, toward: Optional[Point] = None) -> DiskPoint:
    """Disk coordinates of `p` with `center` at the origin. When `toward` is
    given the frame is rotated so that `toward` lies on the positive vertical
    axis."""
    w = complex(_cayley(p.z, center.z))
    if toward is not None and distance(toward, center) > 0.0:
        wt = complex(_cayley(toward.z, center.z))
        w *= complex(np.exp(1.0j * (math.pi / 2.0 - math.atan2(wt.imag, wt.real))))
    return DiskPoint(w.real, w.imag)


def from_disk(w: Union[DiskPoint, complex], center: Point = POINT_I) -> Point:
    w = w.w if isinstance(w, DiskPoint) else complex(w)
    if abs(w) >= 1.0:
        raise InvalidPoint(f"Disk coordinate {w} is not inside the unit disk")
    c = center.z
    return Point.from_complex((c - np.conj(c) * w) / (1.0 - w))


def directions_from(center: Point, xs, ys) -> np.ndarray:
    """Angles of points, seen from `center` in its disk frame."""
    z = np.asarray(xs, dtype=float) + 1.0j * np.asarray(ys, dtype=float)
    return normalize_angle(np.angle(_cayley(z, center.z)))


## Poisson kernel
def poisson_kernel_from_angle(h, phi):
    """(cosh h - sinh h cos phi)^-1 written as (e^-h + 2 sinh h sin^2(phi/2))^-1,
    which stays accurate when phi is near 0 and h is large."""
    h = np.asarray(h, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return 1.0 / (np.exp(-h) + 2.0 * np.sinh(h) * np.sin(phi / 2.0) ** 2)


def poisson_kernel(z: Point, zp: Point, zeta: BoundaryPoint) -> float:
    h = distance(z, zp)
    if h == 0.0:
        return 1.0
    phi = zeta.angle_from(z) - to_disk(zp, z).angle
    return float(poisson_kernel_from_angle(h, phi))


def poisson_total_mass(z: Point, zp: Point) -> float:
    """Integral of P(z, zp, .) against the round measure centred at z.

    The kernel peaks at the direction of zp with width ~ e^-h, so the
    half-circle integral is split at multiples of that width before the
    adaptive quadrature."""
    h = distance(z, zp)
    width = math.exp(-h)
    points = [p for p in (width, 10.0 * width, 100.0 * width) if p < math.pi]
    val, _ = integrate.quad(
        lambda phi: float(poisson_kernel_from_angle(h, phi)),
        0.0,
        math.pi,
        points=points or None,
        limit=200,
        epsabs=1e-13,
        epsrel=1e-12,
    )
    return val / math.pi


## Sampling
def random_points(
    rng: np.random.Generator, n: int, radius: float = 2.0, center: Point = POINT_I
) -> List[Point]:
    """`n` points within hyperbolic distance `radius` of `center`: distance
    uniform in [0, radius], direction uniform."""
    r = rng.uniform(0.0, radius, size=n)
    phi = rng.uniform(0.0, TWO_PI, size=n)
    w = np.tanh(r / 2.0) * np.exp(1.0j * phi)
    return [from_disk(complex(wi), center) for wi in w]

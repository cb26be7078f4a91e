"""Free Fuchsian groups: Schottky (ping-pong) constructions, the level-2
congruence group, reduced words and orbits.

Letters of the symmetric alphabet are numbered 1..2k in the order
g1, g1^-1, g2, g2^-1, ..., so letter 2i-1 is g_i and letter 2i is its inverse.
Labels use a capital for the inverse: "g1.G2" is g1 * g2^-1.
"""

import json
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import (
    BudgetExceeded,
    FuchsError,
    InvalidGroup,
    InvalidIsometry,
    MalformedSpec,
    OverlappingDisks,
)
from .hyperbolic import (
    TWO_PI,
    BoundaryPoint,
    Isometry,
    Point,
    angular_gap,
    distance_many,
    normalize_angle,
)
from .util.general import get_logger, listify

log = get_logger(__name__)

DEFAULT_WORD_CAP = 10**7
DISJOINT_MARGIN = 1e-9
MAPPING_TOL = 1e-12
TANGENT_TOL = 1e-12
RANDOM_DISK_GAP = 1e-3


## Letters and words
def inverse_letter(letter: int) -> int:
    return letter + 1 if letter % 2 == 1 else letter - 1


def letter_label(letter: int) -> str:
    i = (letter + 1) // 2
    return f"g{i}" if letter % 2 == 1 else f"G{i}"


def _parse_letter(text: str) -> int:
    if len(text) < 2 or text[0] not in "gG" or not text[1:].isdigit():
        raise FuchsError(f"Bad letter label {text!r}")
    i = int(text[1:])
    return 2 * i - 1 if text[0] == "g" else 2 * i


@dataclass(frozen=True)
class ReducedWord:
    letters: Tuple[int, ...] = ()

    def __post_init__(self):
        letters = tuple(int(v) for v in self.letters)
        if any(v < 1 for v in letters):
            raise FuchsError(f"Letters must be positive, got {letters}")
        for a, b in zip(letters, letters[1:]):
            if b == inverse_letter(a):
                raise FuchsError(f"Word {letters} is not reduced")
        object.__setattr__(self, "letters", letters)

    @staticmethod
    def reduce(letters: Iterable[int]) -> "ReducedWord":
        stack: List[int] = []
        for v in letters:
            if stack and stack[-1] == inverse_letter(v):
                stack.pop()
            else:
                stack.append(v)
        return ReducedWord(tuple(stack))

    @classmethod
    def from_label(cls, text: str) -> "ReducedWord":
        text = text.strip()
        if text in ("", "e"):
            return cls(())
        return cls(tuple(_parse_letter(t) for t in text.split(".")))

    def __len__(self):
        return len(self.letters)

    @property
    def first(self) -> Optional[int]:
        return self.letters[0] if self.letters else None

    def inverse(self) -> "ReducedWord":
        return ReducedWord(tuple(inverse_letter(v) for v in reversed(self.letters)))

    def concat(self, other: "ReducedWord") -> "ReducedWord":
        return ReducedWord.reduce(self.letters + other.letters)

    def label(self) -> str:
        return ".".join(letter_label(v) for v in self.letters) if self.letters else "e"

    def __str__(self):
        return self.label()


## Boundary disks and certificates
@dataclass(frozen=True)
class BoundaryDisk:
    """Closed arc of the boundary circle (reference frame), i.e. the closed
    half-plane cut off by the geodesic joining its endpoints."""

    center: float
    radius: float

    def __post_init__(self):
        center, radius = float(self.center), float(self.radius)
        if not (0.0 < radius < math.pi):
            raise FuchsError(f"Angular radius must lie in (0, pi), got {radius}")
        object.__setattr__(self, "center", normalize_angle(center))
        object.__setattr__(self, "radius", radius)

    @classmethod
    def from_endpoints(cls, start: float, end: float) -> "BoundaryDisk":
        """Arc running counterclockwise from `start` to `end`."""
        length = normalize_angle(end - start)
        if length == 0.0:
            raise FuchsError("Degenerate arc with coincident endpoints")
        return cls(start + length / 2.0, length / 2.0)

    @classmethod
    def from_real_interval(cls, t1: float, t2: float) -> "BoundaryDisk":
        """Arc of real boundary points from t1 up to t2 (either may be inf)."""
        return cls.from_endpoints(BoundaryPoint.from_real(t1).theta, BoundaryPoint.from_real(t2).theta)

    @property
    def start(self) -> float:
        return normalize_angle(self.center - self.radius)

    @property
    def end(self) -> float:
        return normalize_angle(self.center + self.radius)

    def margin(self, theta):
        """Signed angular depth of theta inside the arc (negative outside)."""
        return self.radius - angular_gap(theta, self.center)

    def contains(self, theta, tol: float = 0.0):
        return self.margin(theta) >= -tol

    def gap_to(self, other: "BoundaryDisk") -> float:
        return float(angular_gap(self.center, other.center)) - self.radius - other.radius

    def transform(self, m: Isometry) -> "BoundaryDisk":
        """Image arc under an isometry (orientation preserving, so endpoint
        order is kept)."""
        start, end = m.act_on_boundary(np.array([self.start, self.end]))
        return BoundaryDisk.from_endpoints(start, end)

    def in_frame(self, center: Point) -> "BoundaryDisk":
        """The same arc with angles read in the frame centred at `center`."""
        start = BoundaryPoint(self.start).angle_from(center)
        end = BoundaryPoint(self.end).angle_from(center)
        return BoundaryDisk.from_endpoints(start, end)

    def to_list(self) -> List[float]:
        return [self.center, self.radius]


@dataclass(frozen=True)
class PingPongCertificate:
    disks: Tuple[BoundaryDisk, ...]
    tangent: bool = False

    def __post_init__(self):
        object.__setattr__(self, "disks", tuple(self.disks))

    def disk_for(self, letter: int) -> BoundaryDisk:
        return self.disks[letter - 1]

    def min_gap(self) -> float:
        gaps = [
            a.gap_to(b)
            for i, a in enumerate(self.disks)
            for b in self.disks[i + 1 :]
        ]
        return min(gaps) if gaps else math.inf

    def transform(self, m: Isometry) -> "PingPongCertificate":
        return PingPongCertificate(tuple(d.transform(m) for d in self.disks), self.tangent)

    def to_dict(self) -> dict:
        return {"disks": [d.to_list() for d in self.disks], "tangent": self.tangent}


@dataclass(frozen=True)
class CertificateReport:
    valid: bool
    disjoint_margin: float
    mapping_margin: float
    tangent: bool
    samples: int
    failures: Tuple[str, ...] = ()

    @property
    def margin(self) -> float:
        return min(self.disjoint_margin, self.mapping_margin)

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "disjoint_margin": self.disjoint_margin,
            "mapping_margin": self.mapping_margin,
            "tangent": self.tangent,
            "samples": self.samples,
            "failures": list(self.failures),
        }


## Group specs
@dataclass(frozen=True)
class GroupSpec:
    generators: Tuple[Isometry, ...]
    certificate: Optional[PingPongCertificate] = None

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, "generators", gens)
        if len(gens) < 2:
            raise InvalidGroup(f"Need at least 2 generators, got {len(gens)}")
        for i, g in enumerate(gens, start=1):
            kind = g.classify()
            if kind in ("identity", "elliptic"):
                raise InvalidGroup(f"Generator g{i} is {kind} (trace {g.trace:.6g})")
        if self.certificate is not None and len(self.certificate.disks) != 2 * len(gens):
            raise InvalidGroup(
                f"Certificate has {len(self.certificate.disks)} disks, need {2 * len(gens)}"
            )

    @property
    def k(self) -> int:
        return len(self.generators)

    @property
    def certified(self) -> bool:
        return self.certificate is not None

    def letter_isometry(self, letter: int) -> Isometry:
        if not 1 <= letter <= 2 * self.k:
            raise FuchsError(f"Letter {letter} outside alphabet 1..{2 * self.k}")
        g = self.generators[(letter - 1) // 2]
        return g if letter % 2 == 1 else g.inverse()

    def letter_isometries(self) -> List[Isometry]:
        return [self.letter_isometry(v) for v in range(1, 2 * self.k + 1)]

    def conjugate(self, m: Isometry) -> "GroupSpec":
        """The spec of m G m^-1, with the certificate carried along by m."""
        cert = None if self.certificate is None else self.certificate.transform(m)
        return GroupSpec(tuple(g.conjugate_by(m) for g in self.generators), cert)

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "generators": [g.to_list() for g in self.generators],
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: dict) -> "GroupSpec":
        if not isinstance(data, dict):
            raise MalformedSpec("<root>", "GroupSpec JSON must be an object")
        if "generators" not in data:
            raise MalformedSpec("generators", "Missing field: generators")
        raw = data["generators"]
        if not isinstance(raw, list):
            raise MalformedSpec("generators", "generators must be a list of [a,b,c,d]")

        gens = []
        for i, entry in enumerate(raw):
            fld = f"generators[{i}]"
            try:
                gens.append(Isometry.from_list(entry))
            except (InvalidIsometry, TypeError, ValueError) as e:
                raise MalformedSpec(fld, f"{fld}: {e}") from e

        k = data.get("k", len(gens))
        if not isinstance(k, int) or k != len(gens):
            raise MalformedSpec("k", f"k={k!r} does not match {len(gens)} generators")

        cert = None
        raw_cert = data.get("certificate")
        if raw_cert is not None:
            try:
                disks = tuple(BoundaryDisk(float(c), float(r)) for c, r in raw_cert["disks"])
                cert = PingPongCertificate(disks, bool(raw_cert.get("tangent", False)))
            except (KeyError, TypeError, ValueError) as e:
                raise MalformedSpec("certificate", f"certificate: {e}") from e

        try:
            spec = cls(tuple(gens), cert)
        except InvalidGroup as e:
            raise MalformedSpec("generators", str(e)) from e

        # tangent disks are only trusted for the gamma2 builtin
        if cert is not None and cert.tangent and not is_gamma2(spec):
            log.warning("Ignoring tangent flag: configuration is not the gamma2 builtin")
            spec = cls(spec.generators, PingPongCertificate(cert.disks, tangent=False))
        return spec

    @classmethod
    def from_json(cls, text: str) -> "GroupSpec":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise MalformedSpec("<json>", f"Invalid JSON: {e}") from e
        return cls.from_dict(data)


## Builders
def _pairing_isometry(disk_plus: BoundaryDisk, disk_minus: BoundaryDisk) -> Isometry:
    """The generator g with D(g) = disk_plus, D(g^-1) = disk_minus.

    Rotate disk_minus to be centred at pi (the half-disk |z| <= tan(r-/2)),
    dilate so its boundary lands on |z| = cot(r+/2), then rotate angle 0 to
    the centre of disk_plus. For antipodal disks this is the translation
    along the axis through both centres.
    """
    rho_minus = math.tan(disk_minus.radius / 2.0)
    r_plus = 1.0 / math.tan(disk_plus.radius / 2.0)
    return (
        Isometry.rotation(disk_plus.center)
        @ Isometry.dilation(r_plus / rho_minus)
        @ Isometry.rotation(math.pi - disk_minus.center)
    )


def _check_disjoint(disks: Sequence[BoundaryDisk], margin: float) -> None:
    for i, a in enumerate(disks):
        for j in range(i + 1, len(disks)):
            gap = a.gap_to(disks[j])
            if gap < margin:
                raise OverlappingDisks(
                    f"Disks {letter_label(i + 1)} and {letter_label(j + 1)} "
                    f"are not disjoint (gap {gap:.3g})"
                )


def build_schottky(
    k: int, disks: Sequence[BoundaryDisk], samples: int = 256
) -> GroupSpec:
    """Schottky group pairing disks[2i] (for g_i) with disks[2i+1] (for g_i^-1)."""
    disks = tuple(listify(disks))
    if k < 2:
        raise InvalidGroup(f"Need k >= 2, got {k}")
    if len(disks) != 2 * k:
        raise OverlappingDisks(f"Need {2 * k} disks for k={k}, got {len(disks)}")
    _check_disjoint(disks, DISJOINT_MARGIN)

    gens = tuple(_pairing_isometry(disks[2 * i], disks[2 * i + 1]) for i in range(k))
    spec = GroupSpec(gens, PingPongCertificate(disks, tangent=False))

    report = verify_certificate(spec, samples=samples)
    if not report.valid:
        raise OverlappingDisks(f"Configuration does not certify freeness: {report.failures}")
    return spec


def symmetric_disks(k: int, radius: float) -> List[BoundaryDisk]:
    """2k equally spaced disks, g_i at (i-1)*pi/k and g_i^-1 antipodal."""
    disks = []
    for i in range(k):
        theta = i * math.pi / k
        disks.append(BoundaryDisk(theta, radius))
        disks.append(BoundaryDisk(theta + math.pi, radius))
    return disks


def random_disks(k: int, radius: float, rng: np.random.Generator) -> List[BoundaryDisk]:
    """Random disjoint configuration: radii uniform in [radius/2, radius], free
    arc length split by a Dirichlet draw, slots shuffled among the letters."""
    n = 2 * k
    radii = rng.uniform(radius / 2.0, radius, size=n)
    free = TWO_PI - 2.0 * radii.sum() - n * RANDOM_DISK_GAP
    if free <= 0.0:
        raise OverlappingDisks(f"{n} disks of radius up to {radius} do not fit on the circle")

    gaps = RANDOM_DISK_GAP + free * rng.dirichlet(np.ones(n))
    order = rng.permutation(n)
    theta = rng.uniform(0.0, TWO_PI)
    disks: List[Optional[BoundaryDisk]] = [None] * n
    for slot in range(n):
        letter_idx = order[slot]
        r = radii[letter_idx]
        disks[letter_idx] = BoundaryDisk(theta + r, r)
        theta += 2.0 * r + gaps[slot]
    return disks


def random_schottky(k: int, radius: float, seed: int) -> GroupSpec:
    rng = np.random.default_rng(seed)
    return build_schottky(k, random_disks(k, radius, rng))


def gamma2() -> GroupSpec:
    """The level-2 principal congruence group with its tangent certificate:
    g1 pairs Re z <= -1 with Re z >= 1, g2 pairs |z + 1/2| <= 1/2 with
    |z - 1/2| <= 1/2."""
    g1 = Isometry(1.0, 2.0, 0.0, 1.0)
    g2 = Isometry(1.0, 0.0, 2.0, 1.0)
    disks = (
        BoundaryDisk.from_real_interval(1.0, math.inf),
        BoundaryDisk.from_real_interval(-math.inf, -1.0),
        BoundaryDisk.from_real_interval(0.0, 1.0),
        BoundaryDisk.from_real_interval(-1.0, 0.0),
    )
    return GroupSpec((g1, g2), PingPongCertificate(disks, tangent=True))


def is_gamma2(spec: GroupSpec, tol: float = 1e-12) -> bool:
    """True when `spec` has the generators and certificate disks of `gamma2()`."""
    ref = gamma2()
    if spec.k != ref.k or spec.certificate is None:
        return False
    if any(g.projective_distance(h) > tol for g, h in zip(spec.generators, ref.generators)):
        return False
    return all(
        angular_gap(d.center, e.center) <= tol and abs(d.radius - e.radius) <= tol
        for d, e in zip(spec.certificate.disks, ref.certificate.disks)
    )


def parse_builtin(name: str) -> GroupSpec:
    """"gamma2" or "schottky:k=3,r=0.2[,seed=5]". Without a seed the
    configuration is the symmetric one."""
    name = name.strip()
    if name == "gamma2":
        return gamma2()
    if name == "schottky" or name.startswith("schottky:"):
        params: Dict[str, str] = {}
        body = name.partition(":")[2]
        for item in filter(None, body.split(",")):
            key, sep, val = item.partition("=")
            if not sep:
                raise MalformedSpec("input", f"Bad builtin parameter {item!r}")
            params[key.strip()] = val.strip()
        unknown = set(params) - {"k", "r", "seed"}
        if unknown:
            raise MalformedSpec("input", f"Unknown builtin parameters {sorted(unknown)}")
        try:
            k = int(params.get("k", 2))
            r = float(params.get("r", 0.2))
            seed = int(params["seed"]) if "seed" in params else None
        except ValueError as e:
            raise MalformedSpec("input", f"Bad builtin value: {e}") from e
        if seed is None:
            return build_schottky(k, symmetric_disks(k, r))
        return random_schottky(k, r, seed)
    raise MalformedSpec("input", f"Unknown builtin spec {name!r}")


def load_spec(source: str) -> GroupSpec:
    """Builtin name or path to a GroupSpec JSON file."""
    if source in ("gamma2", "schottky") or source.startswith("schottky:"):
        return parse_builtin(source)
    try:
        with open(source) as fh:
            text = fh.read()
    except OSError as e:
        raise MalformedSpec("input", f"Cannot read {source}: {e}") from e
    return GroupSpec.from_json(text)


## Certificate verification
def verify_certificate(spec: GroupSpec, samples: int = 256) -> CertificateReport:
    cert = spec.certificate
    if cert is None:
        return CertificateReport(False, -math.inf, -math.inf, False, samples, ("no certificate",))

    failures = []
    disjoint = cert.min_gap()
    if cert.tangent:
        disjoint_ok = disjoint >= -TANGENT_TOL
    else:
        disjoint_ok = disjoint >= DISJOINT_MARGIN
    if not disjoint_ok:
        failures.append(f"disks overlap (margin {disjoint:.3g})")

    mapping = math.inf
    steps = (np.arange(samples) + 0.5) / samples
    for letter in range(1, 2 * spec.k + 1):
        psi = spec.letter_isometry(letter)
        target = cert.disk_for(letter)
        source = cert.disk_for(inverse_letter(letter))
        outside = source.center + source.radius + (TWO_PI - 2.0 * source.radius) * steps
        m = float(np.min(target.margin(psi.act_on_boundary(outside))))
        if m < -MAPPING_TOL:
            failures.append(
                f"{letter_label(letter)} maps outside its disk (margin {m:.3g})"
            )
        mapping = min(mapping, m)

    report = CertificateReport(
        valid=not failures,
        disjoint_margin=disjoint,
        mapping_margin=mapping,
        tangent=cert.tangent,
        samples=samples,
        failures=tuple(failures),
    )
    log.debug(f"Certificate check k={spec.k}: {report}")
    return report


## Words and orbits
def word_count(k: int, max_len: int) -> int:
    n = 2 * k
    return 1 + sum(n * (n - 1) ** (L - 1) for L in range(1, max_len + 1))


@dataclass
class WordTable:
    """All reduced words up to a length, in breadth-first order (letters
    within a level ordered g1, g1^-1, g2, ...). `letters` is zero padded."""

    letters: np.ndarray
    lengths: np.ndarray
    mats: np.ndarray

    def __len__(self):
        return len(self.lengths)

    @property
    def first_letters(self) -> np.ndarray:
        return self.letters[:, 0] if self.letters.shape[1] else np.zeros(len(self), dtype=int)

    def word(self, idx: int) -> ReducedWord:
        return ReducedWord(tuple(int(v) for v in self.letters[idx, : self.lengths[idx]]))

    def orbit_points(self, z: Point) -> Tuple[np.ndarray, np.ndarray]:
        a, b = self.mats[:, 0, 0], self.mats[:, 0, 1]
        c, d = self.mats[:, 1, 0], self.mats[:, 1, 1]
        denom = c * z.z + d
        w = (a * z.z + b) / denom
        return w.real, z.y / np.abs(denom) ** 2


def word_table(spec: GroupSpec, max_len: int, cap: int = DEFAULT_WORD_CAP) -> WordTable:
    if max_len < 0:
        raise FuchsError(f"max_len must be >= 0, got {max_len}")
    count = word_count(spec.k, max_len)
    if count > cap:
        raise BudgetExceeded(f"{count} words up to length {max_len} exceeds cap {cap}")

    n_letters = 2 * spec.k
    gens = np.stack([g.matrix for g in spec.letter_isometries()])
    inverses = np.array([inverse_letter(v) for v in range(1, n_letters + 1)])

    level_letters = np.zeros((1, max_len), dtype=np.int16)
    level_last = np.zeros(1, dtype=np.int64)
    level_mats = np.eye(2)[None, :, :]
    all_letters, all_lengths, all_mats = [level_letters], [np.zeros(1, dtype=np.int64)], [level_mats]

    for L in range(1, max_len + 1):
        children = np.einsum("nij,ljk->nlik", level_mats, gens)
        valid = level_last[:, None] != inverses[None, :]
        parent, pos = np.nonzero(valid)
        level_mats = children[parent, pos]
        level_letters = level_letters[parent].copy()
        level_letters[:, L - 1] = pos + 1
        level_last = pos + 1
        all_letters.append(level_letters)
        all_lengths.append(np.full(len(parent), L, dtype=np.int64))
        all_mats.append(level_mats)

    table = WordTable(
        letters=np.concatenate(all_letters),
        lengths=np.concatenate(all_lengths),
        mats=np.concatenate(all_mats),
    )
    log.debug(f"Word table k={spec.k} max_len={max_len}: {len(table)} words")
    return table


def enumerate_reduced_words(
    spec: GroupSpec, max_len: int, cap: int = DEFAULT_WORD_CAP
) -> List[ReducedWord]:
    table = word_table(spec, max_len, cap)
    return [table.word(i) for i in range(len(table))]


def orbit(
    spec: GroupSpec, z: Point, max_len: int, cap: int = DEFAULT_WORD_CAP
) -> List[Tuple[ReducedWord, Point]]:
    table = word_table(spec, max_len, cap)
    xs, ys = table.orbit_points(z)
    return [(table.word(i), Point(xs[i], ys[i])) for i in range(len(table))]


def word_isometry(spec: GroupSpec, word: ReducedWord) -> Isometry:
    result = Isometry.identity()
    for v in word.letters:
        result = result @ spec.letter_isometry(v)
    return result


def free_action_margin(spec: GroupSpec, z: Point, max_len: int, chunk: int = 512) -> float:
    """Smallest hyperbolic distance between orbit points of distinct words."""
    table = word_table(spec, max_len)
    xs, ys = table.orbit_points(z)
    best = math.inf
    n = len(xs)
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        d = distance_many(xs[lo:hi, None], ys[lo:hi, None], xs[None, :], ys[None, :])
        rows = np.arange(lo, hi)
        d[rows - lo, rows] = np.inf
        best = min(best, float(d.min()))
    return best


def identity_word_search(spec: GroupSpec, max_len: int, tol: float = 1e-6) -> List[ReducedWord]:
    """Nonempty reduced words whose matrix is within `tol` of +-identity."""
    table = word_table(spec, max_len)
    mats = table.mats[1:]
    eye = np.eye(2)[None, :, :]
    dist = np.minimum(
        np.linalg.norm(mats - eye, ord=2, axis=(1, 2)),
        np.linalg.norm(mats + eye, ord=2, axis=(1, 2)),
    )
    hits = np.nonzero(dist < tol)[0] + 1
    return [table.word(int(i)) for i in hits]

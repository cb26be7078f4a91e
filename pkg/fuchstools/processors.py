"""Batch front end.

    fuchstools verify    --input gamma2 --trials 1000 --seed 7
    fuchstools sweep     --k-range 2..4 --trials 10000
    fuchstools optimize  --input gamma2
    fuchstools sharpness --input schottky:k=3,r=0.3
    fuchstools measure   --input gamma2 --max-len 12
    fuchstools bounds    --k-range 2..64

Each command writes one artifact (CSV or JSON) and `<artifact>.manifest.json`.
Exit codes: 0 success, 1 input or module error, 2 a proven bound was
numerically violated.
"""

import math
import platform
import sys
from dataclasses import asdict, dataclass, fields
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
import scipy

from . import __version__
from . import fuchs_accessor  # noqa: F401  registers df.fuchs / series.fuchs
from .exceptions import FuchsError, MalformedSpec, TheoremViolation
from .freegroup import GroupSpec, build_schottky, letter_label, load_spec, random_disks
from .hyperbolic import POINT_I, Point, displacement, random_points
from .inequality import (
    HALF_PI,
    SLACK,
    bound_Bk,
    bounds_table,
    check_certified,
    defect_frame,
    defect_report,
    loop_pair_check,
    mass_chain_bound,
)
from .measure_lab import (
    decompose_by_first_letter,
    decomposition_identity_residual,
    measured_masses,
    poincare_approx,
)
from .optimizer import OptimizerConfig, maximize_angular_sum, minimize_max_displacement
from .util.data_processor import DataProcessor, track_exceptions
from .util.general import (
    check_not_none,
    derive_seeds,
    logwrap,
    parse_complex,
    parse_k_range,
    safe_filename,
    write_json,
    write_report_csv,
)
from .util.parser import CommandLineParser

EXIT_OK, EXIT_ERROR, EXIT_VIOLATION = 0, 1, 2
OPTIMUM_SLACK = 1e-6
CHAIN_SLACK = 0.05
TRIAL_RADIUS = 2.0


@dataclass(frozen=True)
class RunConfig:
    command: str
    input: Optional[str] = None
    seed: int = 0
    trials: int = 100
    output: Optional[str] = None
    format: str = "csv"
    z: Optional[str] = None
    max_len: int = 8
    s: float = 1.05
    bins: int = 64
    k_range: str = "2..64"
    tol: float = 1e-10
    max_iters: int = 4000
    method: str = "simplex"
    clobber: bool = False

    def __post_init__(self):
        if self.command not in PROCESSORS:
            raise FuchsError(f"Unknown command {self.command!r}")
        if self.trials < 1:
            raise FuchsError(f"trials must be >= 1, got {self.trials}")
        if self.format not in ("csv", "json"):
            raise FuchsError(f"format must be csv or json, got {self.format!r}")

    @classmethod
    def from_args(cls, command: str, args) -> "RunConfig":
        names = {f.name for f in fields(cls)}
        return cls(command=command, **{k: v for k, v in vars(args).items() if k in names})

    @property
    def output_file(self) -> str:
        return self.output if self.output is not None else f"{self.command}.{self.format}"

    def basepoint(self) -> Optional[Point]:
        if self.z is None:
            return None
        try:
            return Point(*parse_complex(self.z))
        except ValueError as e:
            raise MalformedSpec("z", f"Bad basepoint {self.z!r}: {e}") from e


def versions() -> dict:
    return {
        "fuchstools": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
    }


def trial_points(root_seed: int, n: int, radius: float = TRIAL_RADIUS) -> Tuple[np.ndarray, np.ndarray]:
    """One random basepoint around i per derived trial seed."""
    pts = [random_points(np.random.default_rng(s), 1, radius)[0] for s in derive_seeds(root_seed, n)]
    return np.array([p.x for p in pts]), np.array([p.y for p in pts])


def loop_pair_failures(df: pd.DataFrame) -> int:
    """Rank-2 rows whose displacements satisfy the angular premise but not
    sinh(d1/2) sinh(d2/2) >= 1."""
    rows = df[df["k"] == 2]
    return sum(not loop_pair_check(a, b).holds for a, b in zip(rows["d_1"], rows["d_2"]))


class FuchsProcessor(DataProcessor):
    COMMAND: str = ""
    DESCRIPTION: str = ""
    OPTS: List[str] = []
    DEFAULTS: dict = {}

    def __init__(self, argv=None):
        super().__init__(
            shortname=f"fuchstools.{self.COMMAND}", description=self.DESCRIPTION, argv=argv
        )
        self.cfg = RunConfig.from_args(self.COMMAND, self.args)

    def setup_command_line(self):
        p = CommandLineParser(self.DESCRIPTION, prog=f"fuchstools {self.COMMAND}")
        for opt in self.OPTS + ["o", "format", "config", "debug", "clobber"]:
            p.add_std_command_line_option(opt, default=self.DEFAULTS.get(opt))
        return p.parse_args(self._argv)

    def load_spec(self) -> GroupSpec:
        check_not_none(self.cfg.input, msg="--input is required")
        spec = load_spec(self.cfg.input)
        self.log.info(f"Loaded {self.cfg.input}: k={spec.k}, certified={spec.certified}")
        return spec

    def write_artifact(self, df: pd.DataFrame, payload=None) -> str:
        filename = safe_filename(self.cfg.output_file, clobber=self.cfg.clobber)
        if self.cfg.format == "csv":
            write_report_csv(df, filename)
        else:
            write_json(filename, payload if payload is not None else df.to_dict(orient="records"))
        self.write_manifest(filename)
        self.log.info(f"Wrote {filename}")
        return filename

    def write_manifest(self, filename: str) -> str:
        manifest = {
            "command": self.COMMAND,
            "args": asdict(self.cfg),
            "seed": self.cfg.seed,
            "output": filename,
            "versions": versions(),
            "started_utc": self._startup_dttm.dttmstr_utc,
            "wall_time_sec": self.timer.elapsed(),
        }
        return write_json(f"{filename}.manifest.json", manifest)

    def summarize(self, df: pd.DataFrame, title: str) -> None:
        self.log.info(f"{title}\n{df.fuchs.tabu(num=10, quiet=True, show=False)}")

    @track_exceptions({TheoremViolation: EXIT_VIOLATION}, default=EXIT_ERROR)
    def execute(self) -> int:
        self.timer.lap(f"Start {self.COMMAND}")
        self.run()
        self.shutdown()
        return EXIT_OK

    def shutdown(self):
        self.timer.lap(f"End {self.COMMAND}")


class VerifyProcessor(FuchsProcessor):
    COMMAND = "verify"
    DESCRIPTION = "Evaluate the displacement inequality for one group at sampled basepoints"
    OPTS = ["i", "z", "trials", "seed"]

    @logwrap
    def run(self):
        spec = self.load_spec()
        certified = check_certified(spec)
        z = self.cfg.basepoint()
        if z is not None:
            df = pd.DataFrame([defect_report(spec, z, certified=certified).to_row()])
        else:
            xs, ys = trial_points(self.cfg.seed, self.cfg.trials)
            df = defect_frame(spec, xs, ys)

        self.summarize(df.fuchs.worst("defect", n=5), "Smallest defects")
        self.write_artifact(df)
        if not certified and len(df.fuchs.violations()):
            self.log.warning("Uncertified group fails the inequality; the input may not be free")
        check_rows(df)


class SweepProcessor(FuchsProcessor):
    COMMAND = "sweep"
    DESCRIPTION = "Monte-Carlo sweep over random certified Schottky groups and basepoints"
    OPTS = ["k_range", "trials", "seed"]
    DEFAULTS = {"k_range": "2..4", "trials": 1000}

    @logwrap
    def run(self):
        ks = parse_k_range(self.cfg.k_range)
        rows = []
        for t, seed in enumerate(derive_seeds(self.cfg.seed, self.cfg.trials)):
            k = ks[t % len(ks)]
            rng = np.random.default_rng(seed)
            spec = build_schottky(k, random_disks(k, sweep_radius(k), rng))
            z = random_points(rng, 1, TRIAL_RADIUS)[0]
            rows.append(defect_report(spec, z, certified=True).to_row())
        df = order_columns(pd.DataFrame(rows))

        self.summarize(df.fuchs.worst("defect", n=5), "Smallest defects")
        self.write_artifact(df)
        check_rows(df)


def sweep_radius(k: int) -> float:
    """Largest disk radius used for random rank-k configurations."""
    return 0.9 * math.pi / (2 * k)


def order_columns(df: pd.DataFrame) -> pd.DataFrame:
    dcols = sorted(df.fuchs.displacement_cols, key=lambda c: int(c[2:]))
    rest = [c for c in df.columns if c not in dcols and c not in ("k", "z_x", "z_y")]
    return df[["k", "z_x", "z_y"] + dcols + rest]


def check_rows(df: pd.DataFrame) -> None:
    bad = df.fuchs.violations()
    loops = loop_pair_failures(df)
    if len(bad) or loops:
        raise TheoremViolation(
            f"{len(bad)} rows violate the displacement inequalities, "
            f"{loops} rows violate the loop-pair inequality"
        )


class OptimizeProcessor(FuchsProcessor):
    COMMAND = "optimize"
    DESCRIPTION = "Minimise the maximal generator displacement over basepoints"
    OPTS = ["i", "z", "seed", "tol", "max_iters", "method"]
    DEFAULTS = {"format": "json"}

    def optimizer_config(self) -> OptimizerConfig:
        return OptimizerConfig(
            method=self.cfg.method,
            max_iters=self.cfg.max_iters,
            tol=self.cfg.tol,
            seed=self.cfg.seed,
            start=self.cfg.basepoint(),
        )

    def payload(self, opt, bound: float) -> dict:
        return {
            **opt.to_dict(),
            "objective": self.COMMAND,
            "bound": bound,
            "local_optima": [{"z": p.to_dict(), "value": v} for p, v in opt.local_optima],
        }

    @logwrap
    def run(self):
        spec = self.load_spec()
        check_certified(spec)
        opt = minimize_max_displacement(spec, self.optimizer_config())
        bound = bound_Bk(spec.k)
        self.write_artifact(opt.history_frame(), self.payload(opt, bound))
        if opt.value < bound - OPTIMUM_SLACK:
            raise TheoremViolation(f"Minimal max displacement {opt.value} is below B({spec.k}) = {bound}")


class SharpnessProcessor(OptimizeProcessor):
    COMMAND = "sharpness"
    DESCRIPTION = "Maximise the angular sum over basepoints"

    @logwrap
    def run(self):
        spec = self.load_spec()
        check_certified(spec)
        opt = maximize_angular_sum(spec, self.optimizer_config())
        self.write_artifact(opt.history_frame(), self.payload(opt, HALF_PI))
        if opt.value > HALF_PI + SLACK:
            raise TheoremViolation(f"Maximal angular sum {opt.value} exceeds pi/2")


class MeasureProcessor(FuchsProcessor):
    COMMAND = "measure"
    DESCRIPTION = "Truncated Poincare-series boundary measure and its first-letter decomposition"
    OPTS = ["i", "z", "max_len", "s", "bins"]

    @logwrap
    def run(self):
        spec = self.load_spec()
        z0 = self.cfg.basepoint() or POINT_I
        approx = poincare_approx(spec, z0, self.cfg.max_len, self.cfg.s)
        parts = decompose_by_first_letter(approx, self.cfg.bins)
        bounds = mass_chain_bound(measured_masses(approx))

        rows = []
        for letter, part in parts.items():
            gen = (letter - 1) // 2
            d = displacement(spec.generators[gen], z0)
            rows.append(
                {
                    "letter": letter,
                    "label": letter_label(letter),
                    "total": part.total,
                    "mass_in_disk": approx.letter_mass_in_disk(letter) if spec.certified else math.nan,
                    "residual": decomposition_identity_residual(approx, letter, self.cfg.bins),
                    "chain_bound": bounds[gen],
                    "displacement": d,
                }
            )
            if bounds[gen] > d + CHAIN_SLACK:
                self.log.warning(
                    f"{letter_label(letter)}: mass bound {bounds[gen]:.6g} exceeds displacement {d:.6g}"
                )
        df = pd.DataFrame(rows)
        measure = approx.measure(self.cfg.bins)

        self.summarize(df, f"First-letter decomposition, max_len={self.cfg.max_len}")
        payload = {
            "measure": measure.to_dict(),
            "tv_from_uniform": measure.tv_from_uniform(),
            "letters": df.to_dict(orient="records"),
        }
        self.write_artifact(df, payload)


class BoundsProcessor(FuchsProcessor):
    COMMAND = "bounds"
    DESCRIPTION = "Table of the sharp bound B(k) against log(2k-1)"
    OPTS = ["k_range"]

    @logwrap
    def run(self):
        df = bounds_table(parse_k_range(self.cfg.k_range))
        self.summarize(df, "Bounds")
        self.write_artifact(df)
        weak = df[df["B_k"] <= df["log_2k_minus_1"]]
        if len(weak):
            raise TheoremViolation(f"B(k) <= log(2k-1) for k in {weak['k'].tolist()}")


PROCESSORS = {
    cls.COMMAND: cls
    for cls in (
        VerifyProcessor,
        SweepProcessor,
        OptimizeProcessor,
        SharpnessProcessor,
        MeasureProcessor,
        BoundsProcessor,
    )
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] in ("-h", "--help"):
        print(__doc__)
        return EXIT_OK if argv else EXIT_ERROR

    command, rest = argv[0], argv[1:]
    cls = PROCESSORS.get(command)
    if cls is None:
        print(f"fuchstools: unknown command {command!r}; choose from {sorted(PROCESSORS)}", file=sys.stderr)
        return EXIT_ERROR

    try:
        proc = cls(rest)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_ERROR
    except ValueError as e:
        print(f"fuchstools {command}: {e}", file=sys.stderr)
        return EXIT_ERROR
    return proc.execute()


if __name__ == "__main__":
    sys.exit(main())

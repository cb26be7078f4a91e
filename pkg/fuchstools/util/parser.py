import argparse
import sys

from typing import Any, List, Optional

import yaml

from .general import (
    listify,
    check_not_none,
    get_val_or_alt_or_raise,
    read_yaml,
)


class CommandLineParser(argparse.ArgumentParser):
    """argparse parser that knows the options every fuchstools command
    shares, keyed by short codes (see `add_std_command_line_option()`).

    With the `config` code, `--config run.yml` supplies defaults from a
    YAML mapping whose keys are option names (dashes or underscores); flags
    on the command line win over the file.

    Usage errors exit with status 1; status 2 is kept for theorem violations.
    """

    def __init__(self, description=None, opts=None, prog=None):
        super().__init__(description=description, prog=prog)

        self._std_opts = []
        if opts is not None:
            self.add_std_command_line_options(opts)

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")

    def add_std_command_line_options(self, opts: Optional[str | List[str]] = None) -> None:
        """Adds each code in `opts` with its stock help text and default."""
        for opt in listify(opts):
            self.add_std_command_line_option(opt)

    def add_std_command_line_option(
        self,
        opt: Optional[str] = None,
        help_text: Optional[str] = None,
        default: Any = None,
    ) -> None:
        """Adds one shared option. Known codes:

          `i`          : args.input : GroupSpec JSON file or builtin name
          `o`          : args.output : an output filename
          `z`          : args.z : a basepoint such as "0+1i"
          `trials`     : args.trials : number of Monte-Carlo trials
          `seed`       : args.seed : root random seed
          `max_len`    : args.max_len : maximal word length
          `s`          : args.s : Poincare series exponent
          `bins`       : args.bins : number of boundary bins
          `k_range`    : args.k_range : ranks such as "2..64"
          `format`     : args.format : "csv" or "json"
          `tol`        : args.tol : optimizer step tolerance
          `max_iters`  : args.max_iters : optimizer iteration cap
          `method`     : args.method : optimizer method
          `config`     : args.config : YAML file of defaults
          `debug`      : args.debug : boolean True if present
          `clobber`    : args.clobber : boolean True if present

        `help_text` and `default` replace the stock ones.

        Raises:
            ValueError: for an unknown code
        """
        check_not_none(opt)

        if opt == "i":
            help_text = get_val_or_alt_or_raise(
                help_text, "GroupSpec JSON file or builtin name (default: %(default)s)"
            )
            self.add_argument(
                "-i", "--input", type=str, default=default, help=help_text
            )
        elif opt == "o":
            help_text = get_val_or_alt_or_raise(
                help_text, "Output file (default: %(default)s)"
            )
            self.add_argument(
                "-o", "--output", type=str, default=default, help=help_text
            )
        elif opt == "z":
            help_text = get_val_or_alt_or_raise(
                help_text, 'Basepoint, e.g. "0+1i" or "0,1" (default: %(default)s)'
            )
            self.add_argument("--z", type=str, default=default, help=help_text)
        elif opt == "trials":
            help_text = get_val_or_alt_or_raise(
                help_text, "Number of Monte-Carlo trials (default: %(default)s)"
            )
            self.add_argument(
                "--trials", type=int, default=get_val_or_alt_or_raise(default, 100), help=help_text
            )
        elif opt == "seed":
            help_text = get_val_or_alt_or_raise(
                help_text, "Root random seed (default: %(default)s)"
            )
            self.add_argument(
                "--seed", type=int, default=get_val_or_alt_or_raise(default, 0), help=help_text
            )
        elif opt == "max_len":
            help_text = get_val_or_alt_or_raise(
                help_text, "Maximal reduced word length (default: %(default)s)"
            )
            self.add_argument(
                "--max-len",
                dest="max_len",
                type=int,
                default=get_val_or_alt_or_raise(default, 8),
                help=help_text,
            )
        elif opt == "s":
            help_text = get_val_or_alt_or_raise(
                help_text, "Poincare series exponent (default: %(default)s)"
            )
            self.add_argument(
                "--s", type=float, default=get_val_or_alt_or_raise(default, 1.05), help=help_text
            )
        elif opt == "bins":
            help_text = get_val_or_alt_or_raise(
                help_text, "Number of boundary bins (default: %(default)s)"
            )
            self.add_argument(
                "--bins", type=int, default=get_val_or_alt_or_raise(default, 64), help=help_text
            )
        elif opt == "k_range":
            help_text = get_val_or_alt_or_raise(
                help_text, 'Ranks, e.g. "2..64" or "2,3,4" (default: %(default)s)'
            )
            self.add_argument(
                "--k-range",
                dest="k_range",
                type=str,
                default=get_val_or_alt_or_raise(default, "2..64"),
                help=help_text,
            )
        elif opt == "format":
            help_text = get_val_or_alt_or_raise(
                help_text, "Output format (default: %(default)s)"
            )
            self.add_argument(
                "--format",
                type=str,
                choices=["csv", "json"],
                default=get_val_or_alt_or_raise(default, "csv"),
                help=help_text,
            )
        elif opt == "tol":
            help_text = get_val_or_alt_or_raise(
                help_text, "Optimizer stopping tolerance (default: %(default)s)"
            )
            self.add_argument(
                "--tol", type=float, default=get_val_or_alt_or_raise(default, 1e-10), help=help_text
            )
        elif opt == "max_iters":
            help_text = get_val_or_alt_or_raise(
                help_text, "Optimizer iteration cap per run (default: %(default)s)"
            )
            self.add_argument(
                "--max-iters",
                dest="max_iters",
                type=int,
                default=get_val_or_alt_or_raise(default, 4000),
                help=help_text,
            )
        elif opt == "method":
            help_text = get_val_or_alt_or_raise(
                help_text, "Optimizer method (default: %(default)s)"
            )
            self.add_argument(
                "--method",
                type=str,
                choices=["simplex", "coordinate-descent"],
                default=get_val_or_alt_or_raise(default, "simplex"),
                help=help_text,
            )
        elif opt == "config":
            help_text = get_val_or_alt_or_raise(
                help_text, "YAML configuration file (default: %(default)s)"
            )
            self.add_argument("--config", type=str, default=default, help=help_text)
        elif opt == "debug":
            help_text = get_val_or_alt_or_raise(help_text, "Turn on debug mode")
            self.add_argument("--debug", action="store_true", help=help_text)
        elif opt == "clobber":
            help_text = get_val_or_alt_or_raise(
                help_text, "Overwrite existing output files"
            )
            self.add_argument("--clobber", action="store_true", help=help_text)
        else:
            raise ValueError(f"Unknown standard option: {opt}")

        # _validate_std_args only checks codes that were added
        self._std_opts.append(opt)
        return

    def _apply_config_file(self, args=None) -> None:
        if "config" not in self._std_opts:
            return
        (known, _) = self.parse_known_args(args)
        if known.config is None:
            return

        try:
            conf = read_yaml(known.config)
        except (OSError, yaml.YAMLError) as e:
            self.error(f"Cannot read config file {known.config}: {e}")
        if not isinstance(conf, dict):
            self.error(f"Config file {known.config} must hold a mapping")

        dests = {a.dest for a in self._actions}
        defaults = {}
        for key, val in conf.items():
            dest = str(key).replace("-", "_")
            if dest not in dests or dest == "config":
                self.error(f"Unknown option in config file: {key}")
            defaults[dest] = val
        self.set_defaults(**defaults)

    def _validate_std_args(self, args: argparse.Namespace) -> argparse.Namespace:
        if "trials" in self._std_opts and args.trials < 1:
            self.error("--trials must be at least 1")
        if "max_len" in self._std_opts and args.max_len < 0:
            self.error("--max-len must be nonnegative")
        if "bins" in self._std_opts and args.bins < 16:
            self.error("--bins must be at least 16")
        if "s" in self._std_opts and not args.s > 0:
            self.error("--s must be positive")
        if "tol" in self._std_opts and not args.tol > 0:
            self.error("--tol must be positive")
        if "max_iters" in self._std_opts and args.max_iters < 1:
            self.error("--max-iters must be at least 1")
        return args

    def parse_args(self, args=None, namespace=None) -> argparse.Namespace:
        """Override of the parent method that layers the config file under
        the command line and validates the standard arguments.
        """
        self._apply_config_file(args)
        parsed = super().parse_args(args, namespace)
        return self._validate_std_args(parsed)

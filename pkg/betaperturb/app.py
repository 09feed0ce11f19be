import os
import sys
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
import argparse
import csv
import logging
from concurrent.futures import ProcessPoolExecutor
from collections import defaultdict
from contextlib import contextmanager
from enum import Enum
from typing import IO, Dict, Iterator, List, Optional, Sequence, Tuple

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError
from rich.console import Console
from rich.table import Table
from termcolor import colored

from .common.ensemble_kinds import EnsembleKind, get_kind_from_string
from .common.errors import (
    BetaPerturbError,
    ConfigurationError,
    ConsistencyError,
    DataError,
    DomainError,
    SingularityError,
    UsageError,
)
from .common.records import CSV_HEADER, SampleMeta, TrialRecord, format_float, read_csv, read_json, write_csv, write_json
from .common.settings import Settings, read_config_file
from .density_service.service import log_density_gauss_mult, log_density_laguerre_hard, log_density_laguerre_mult
from .ensemble_service.models import EnsembleSpec, RngStream
from .ensemble_service.scale_laws import ScaleLaw, get_scale_law
from .ensemble_service.service import sample_jacobi
from .events import EventEmitter
from .perturb_service.models import EigenConfiguration
from .perturb_service.service import chiral_spectrum, eigenvalues_multiplicative
from .plot_service.service import build_caption, render_scatter
from .verify_service.models import get_suite_from_string
from .verify_service.service import VerificationService
from logging_conf import configure_logging

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_DATA_ERROR = 2
EXIT_USAGE = 64

DEFAULT_LAW = "point(1)"
ERROR_MARKER = "error"
DENSITY_HEADER = CSV_HEADER + ["log_density", "normalized"]


class OutputFormat(str, Enum):
    CSV = "csv"
    JSON = "json"
    SVG = "svg"


class RunConfig(BaseModel):
    """Validated command line of one invocation."""
    command: str = Field(..., description="Subcommand")
    ensemble: EnsembleKind = Field(default=EnsembleKind.GAUSSIAN, description="Ensemble family")
    beta: float = Field(default=2.0, gt=0, description="Dyson index")
    n: int = Field(default=10, ge=1, description="Matrix size")
    m: Optional[int] = Field(None, ge=1, description="Rows of the Wishart factor")
    law: str = Field(default=DEFAULT_LAW, description="Scale law of l")
    trials: int = Field(default=1, ge=1, description="Number of trials")
    seed: int = Field(default=0, ge=0, description="Master seed")
    format: Optional[OutputFormat] = Field(None, description="Output format")
    output: Optional[str] = Field(None, description="Output path, stdout when omitted")
    input: Optional[str] = Field(None, description="Input path for density and plot")
    suite: Optional[str] = Field(None, description="Verification suite")
    jobs: int = Field(default=1, ge=1, description="Worker processes")

    @property
    def spec(self) -> EnsembleSpec:
        try:
            return EnsembleSpec(kind=self.ensemble, beta=self.beta, n=self.n, m=self.m)
        except ValidationError as e:
            raise ConfigurationError(f"Invalid ensemble: {e.errors()[0]['msg']}") from e

    @property
    def scale_law(self) -> ScaleLaw:
        return get_scale_law(self.law)

    def meta(self) -> SampleMeta:
        return SampleMeta(
            ensemble=self.ensemble.value,
            beta=self.beta,
            n=self.n,
            m=self.m,
            seed=self.seed,
            law=self.scale_law.describe(),
        )


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _ensemble(value: str) -> EnsembleKind:
    kind = get_kind_from_string(value)
    if kind is None:
        raise argparse.ArgumentTypeError(f"unknown ensemble '{value}'")
    return kind


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with the sample, density, verify and plot subcommands."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ensemble", type=_ensemble, default=EnsembleKind.GAUSSIAN, help="gauss, laguerre or chiral")
    common.add_argument("--beta", type=float, default=2.0, help="Dyson index")
    common.add_argument("--n", type=int, default=10, help="matrix size")
    common.add_argument("--m", type=int, default=None, help="rows of the Wishart factor (laguerre, chiral)")
    common.add_argument("--l", type=float, default=None, help="fixed perturbation scale, shorthand for --law point(L)")
    common.add_argument("--law", default=None, help="scale law: point(l0), exp(rate), uniform(a,b), halfnormal(sigma)")
    common.add_argument("--trials", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=[f.value for f in OutputFormat], default=None)
    common.add_argument("--output", default=None, help="output path (stdout when omitted)")
    common.add_argument("--jobs", type=int, default=None, help="worker processes")
    common.add_argument("--config", default=None, help="flat key=value file with defaults for these flags")
    common.add_argument("--verbose", action="store_true", help="debug logging")

    parser = _Parser(prog="betaperturb", description="Rank-one multiplicative perturbations of beta-ensembles")
    commands = parser.add_subparsers(dest="command", parser_class=_Parser)
    sample = commands.add_parser("sample", parents=[common], help="sample perturbed spectra")
    density = commands.add_parser("density", parents=[common], help="evaluate log-densities of sampled spectra")
    density.add_argument("--input", required=True)
    verify = commands.add_parser("verify", parents=[common], help="run a verification suite")
    verify.add_argument("--suite", default="all")
    plot = commands.add_parser("plot", parents=[common], help="scatter plot of sampled spectra")
    plot.add_argument("--input", required=True)
    parser.subcommands = {"sample": sample, "density": density, "verify": verify, "plot": plot}
    return parser


def _config_defaults(argv: Sequence[str]) -> dict:
    """Defaults from --config; keys are long flag names."""
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    if known.config is None:
        return {}
    values = read_config_file(known.config)
    values.pop("config", None)
    logger.debug(f"Read {len(values)} defaults from {known.config}")
    return values


def parse_run_config(argv: Sequence[str], settings: Settings) -> Tuple[RunConfig, bool]:
    """Parse argv into a RunConfig; explicit flags win over the --config file.

    Returns:
        (config, verbose)

    Raises:
        UsageError: On unknown subcommands or malformed flags
        ConfigurationError: On values that fail validation
    """
    parser = build_parser()
    defaults = _config_defaults(argv)
    if defaults:
        known = {name: {action.dest for action in sub._actions} for name, sub in parser.subcommands.items()}
        unknown = set(defaults) - set().union(*known.values())
        if unknown:
            raise ConfigurationError(f"Unknown keys in config file: {', '.join(sorted(unknown))}")
        for name, subparser in parser.subcommands.items():
            subparser.set_defaults(**{key: value for key, value in defaults.items() if key in known[name]})
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError(parser.format_usage())
    scale, law = args.l, args.law
    if scale is not None and law is not None:
        if "law" in defaults and law == defaults["law"]:
            law = None
        elif "l" in defaults:
            scale = None
        else:
            raise UsageError("Give either --l or --law, not both")
    if law is None:
        law = f"point({scale!r})" if scale is not None else DEFAULT_LAW
    verbose = args.verbose if isinstance(args.verbose, bool) else str(args.verbose).lower() in ("1", "true", "yes")
    try:
        config = RunConfig(
            command=args.command,
            ensemble=args.ensemble,
            beta=args.beta,
            n=args.n,
            m=args.m,
            law=law,
            trials=args.trials,
            seed=args.seed,
            format=args.format,
            output=args.output,
            input=getattr(args, "input", None),
            suite=getattr(args, "suite", None),
            jobs=args.jobs or settings.jobs,
        )
    except ValidationError as e:
        error = e.errors()[0]
        raise ConfigurationError(f"--{error['loc'][0]}: {error['msg']}") from e
    return config, verbose


@contextmanager
def _open_output(path: Optional[str]) -> Iterator[IO[str]]:
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as stream:
            yield stream


def _sample_trial(task: Tuple[EnsembleSpec, ScaleLaw, int, int, Settings]) -> TrialRecord:
    spec, law, seed, trial, settings = task
    g = RngStream(seed=seed, stream=trial).generator
    laguerre = spec
    if spec.kind == EnsembleKind.CHIRAL:
        laguerre = EnsembleSpec(kind=EnsembleKind.LAGUERRE, beta=spec.beta, n=spec.n, m=spec.m)
    J = sample_jacobi(laguerre, g)
    l = law.sample(g)
    config = eigenvalues_multiplicative(J, l, laguerre, tol=settings.root_tolerance, max_iter=settings.max_iterations)
    if spec.kind == EnsembleKind.CHIRAL:
        config = chiral_spectrum(config, spec.m, spec.n)
    logger.debug(f"Trial {trial}: l={l:.6g}, {config.size} eigenvalues, {config.zero_count} zeros")
    return TrialRecord(trial=trial, l=l, z=config.z, zero_count=config.zero_count)


def sample_records(config: RunConfig, settings: Settings) -> List[TrialRecord]:
    """Sample config.trials configurations; trial t uses the stream (seed, t)."""
    spec, law = config.spec, config.scale_law
    tasks = [(spec, law, config.seed, trial, settings) for trial in range(config.trials)]
    if config.jobs > 1 and config.trials > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            return list(pool.map(_sample_trial, tasks))
    return [_sample_trial(task) for task in tasks]


def cmd_sample(config: RunConfig, settings: Settings) -> int:
    records = sample_records(config, settings)
    output_format = config.format or OutputFormat.CSV
    with _open_output(config.output) as stream:
        if output_format == OutputFormat.JSON:
            write_json(config.meta(), records, stream)
        elif output_format == OutputFormat.SVG:
            render_scatter(records, build_caption(config.meta(), records), stream)
        else:
            write_csv(records, stream)
    logger.info(f"Sampled {len(records)} trials of {config.spec.label} n={config.n}")
    return EXIT_OK


def _read_records(config: RunConfig) -> Tuple[SampleMeta, List[TrialRecord]]:
    """Records from --input; JSON input carries its own ensemble description."""
    path = config.input
    if not os.path.isfile(path):
        raise DataError(f"Input file not found: {path}")
    with open(path, encoding="utf-8", newline="") as stream:
        if path.endswith(".json") or config.format == OutputFormat.JSON:
            return read_json(stream)
        return config.meta(), read_csv(stream)


def _spec_from_meta(meta: SampleMeta) -> EnsembleSpec:
    kind = get_kind_from_string(meta.ensemble)
    if kind is None:
        raise DataError(f"Unknown ensemble '{meta.ensemble}' in input")
    try:
        return EnsembleSpec(kind=kind, beta=meta.beta, n=meta.n, m=meta.m)
    except ValidationError as e:
        raise DataError(f"Invalid ensemble in input: {e.errors()[0]['msg']}") from e


def record_log_density(record: TrialRecord, spec: EnsembleSpec, law: ScaleLaw):
    """Closed-form log-density of one multiplicative configuration.

    Raises:
        UsageError: For chiral configurations, which have no closed form here
        DomainError: If the configuration does not fit its regime
    """
    config = EigenConfiguration(z=record.z, l=record.l, spec=spec, zero_count=record.zero_count)
    if spec.kind == EnsembleKind.GAUSSIAN:
        return log_density_gauss_mult(config, law, spec.beta)
    if spec.kind == EnsembleKind.CHIRAL:
        raise UsageError("Densities are available for gauss and laguerre configurations")
    if spec.is_hard:
        return log_density_laguerre_hard(config, spec.beta, spec.m, spec.n, record.l)
    return log_density_laguerre_mult(config, spec.beta, spec.m, spec.n, law)


def cmd_density(config: RunConfig, settings: Settings) -> int:
    meta, records = _read_records(config)
    spec = _spec_from_meta(meta)
    law = get_scale_law(meta.law)
    failures = 0
    rows = []
    for record in records:
        try:
            report = record_log_density(record, spec, law)
            columns = [format_float(report.log_value), "true" if report.normalized else "false"]
        except (DomainError, ConsistencyError, SingularityError) as e:
            failures += 1
            logger.warning(f"Trial {record.trial}: {e}")
            columns = [ERROR_MARKER, ""]
        rows.append((record, columns))

    with _open_output(config.output) as stream:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(DENSITY_HEADER)
        for record, columns in rows:
            values = list(record.z) + [0j] * record.zero_count
            for k, value in enumerate(values):
                writer.writerow([record.trial, format_float(record.l), k, format_float(value.real), format_float(value.imag)] + columns)
    logger.info(f"Evaluated {len(records)} configurations, {failures} rejected")
    return EXIT_DATA_ERROR if failures else EXIT_OK


class TrialProgress:
    """Logs verify progress from the suite_started and trial_finished events."""

    def __init__(self, steps: int = 10):
        self.steps = steps
        self.trials = 0
        self.done: Dict[str, int] = defaultdict(int)

    def attach(self, events: EventEmitter) -> EventEmitter:
        events.on("suite_started", self.started)
        events.on("trial_finished", self.trial_finished)
        return events

    def started(self, name: str, trials: int) -> None:
        self.trials = trials
        self.done.clear()

    def trial_finished(self, name: str, trial: int) -> None:
        self.done[name] += 1
        done = self.done[name]
        if done == self.trials or done % max(1, self.trials // self.steps) == 0:
            logger.info(f"{name}: {done}/{self.trials} trials")


def _report_table(report) -> Table:
    table = Table(title=f"{report.suite} on {report.ensemble} ({report.law}), {report.trials} trials, seed {report.seed}")
    table.add_column("check")
    table.add_column("result")
    table.add_column("worst error", justify="right")
    table.add_column("p-value", justify="right")
    for check in report.checks:
        table.add_row(
            check.name,
            "[green]PASS[/green]" if check.passed else "[red]FAIL[/red]",
            f"{check.worst_error:.3e}",
            "" if check.p_value is None else f"{check.p_value:.3f}",
        )
    return table


def cmd_verify(config: RunConfig, settings: Settings) -> int:
    suite = get_suite_from_string(config.suite or "all")
    events = TrialProgress().attach(EventEmitter())
    service = VerificationService(settings=settings, jobs=config.jobs, events=events)
    report = service.run_suite(suite, config.spec, config.scale_law, config.trials, config.seed)
    with _open_output(config.output) as stream:
        stream.write(report.to_json())
        stream.write("\n")
    if config.output not in (None, "-"):
        Console().print(_report_table(report))
    if not report.passed:
        logger.error(colored(f"Failing checks: {', '.join(report.failing_checks())}", "red"))
        return EXIT_VERIFICATION_FAILED
    return EXIT_OK


def cmd_plot(config: RunConfig, settings: Settings) -> int:
    meta, records = _read_records(config)
    with _open_output(config.output) as stream:
        render_scatter(records, build_caption(meta, records), stream)
    return EXIT_OK


COMMANDS = {
    "sample": cmd_sample,
    "density": cmd_density,
    "verify": cmd_verify,
    "plot": cmd_plot,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line and return the exit code."""
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        settings = Settings.from_env()
        configure_logging(settings.log_level)
        config, verbose = parse_run_config(argv, settings)
        if verbose:
            configure_logging("DEBUG")
        return COMMANDS[config.command](config, settings)
    except UsageError as e:
        sys.stderr.write(f"{e}\n")
        return EXIT_USAGE
    except DataError as e:
        logger.error(f"Data error: {e}")
        return EXIT_DATA_ERROR
    except BetaPerturbError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_DATA_ERROR
    except ValidationError as e:
        logger.error(f"Invalid input: {e.errors()[0]['msg']}")
        return EXIT_DATA_ERROR
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_DATA_ERROR


"""
Command-Line Interface
simulate / fit / test / mc / tables subcommands over the sAGARCH(1,1) toolkit

Exit codes: 0 success, 1 usage, 2 data or parameter error, 3 numeric failure.
Every failure prints a single line "error[<kind>]: <message>" on standard error.
Returns are read as given; no log-return transform is applied.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Literal, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from backend import hypothesis_tests, inference, mle, montecarlo
from backend.exceptions import DataError, ParameterError, SagarchError, UsageError
from backend.sagarch_model import ParamVector, ReturnSeries, simulate
from config.settings import get_settings
from data import report_writer
from data.csv_loader import ingest_csv, write_series_csv
from data.designs import get_registry
from data import validation
from frontend.tables import render_experiment_table, render_fit_table

logger = logging.getLogger(__name__)

COMMANDS = ("simulate", "fit", "test", "mc", "tables")
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3
TABLE1_SIZES = [200, 500, 1000]


def exit_code(error: Exception) -> int:
    if isinstance(error, UsageError):
        return EXIT_USAGE
    if isinstance(error, (DataError, ParameterError)):
        return EXIT_DATA
    return EXIT_NUMERIC


# ============================================
# RUN CONFIGURATION
# ============================================

class RunConfig(BaseModel):
    """Validated view of the parsed command line"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    command: Literal["simulate", "fit", "test", "mc", "tables"]
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    csv_path: Optional[str] = None
    seed: int = Field(ge=0)
    level: float = 0.05
    mode: Literal["stationary", "free"] = "stationary"
    which: str = "all"
    alpha_star: Optional[float] = None
    asd_kind: Literal["auto", "int", "res", "universal"] = "auto"
    theta: Optional[List[float]] = None
    n: Optional[int] = Field(default=None, ge=1)
    burn_in: int = Field(default=500, ge=0)
    unit: Literal["raw", "percent"] = "raw"
    multistart: int = Field(default=6, ge=1)
    workers: int = Field(default=1, ge=1)
    scale: int = Field(default=200, ge=1)
    explicit: Tuple[str, ...] = ()

    @model_validator(mode="after")
    def _required(self) -> "RunConfig":
        if self.command == "simulate" and (self.theta is None or self.n is None or not self.output_path):
            raise ValueError("simulate needs --theta, --n and --out")
        if self.command in ("fit", "test", "mc") and not self.input_path:
            raise ValueError(f"{self.command} needs an input file")
        return self

    def fit_config(self, mode: Optional[str] = None) -> mle.FitConfig:
        return mle.FitConfig(mode=mode or self.mode, multistart=self.multistart, workers=self.workers)


class McRequest(BaseModel):
    """mc input: an experiment plus, for size/power runs, the test and alternative grid"""

    model_config = ConfigDict(extra="forbid")

    experiment: montecarlo.ExperimentSpec
    test: Optional[str] = None
    axis: Optional[str] = None
    values: List[float] = Field(default_factory=list)


def _check_inputs(config: RunConfig) -> None:
    for ok, message in (validation.validate_level(config.level), validation.validate_alpha_star(config.alpha_star)):
        if not ok:
            raise UsageError(message)
    if config.input_path:
        check = validation.validate_spec_path if config.command == "mc" else validation.validate_input_path
        ok, message = check(config.input_path)
        if not ok:
            raise DataError(message)
    for path in (config.output_path, config.csv_path):
        if path:
            ok, message = validation.validate_output_path(path)
            if not ok:
                raise UsageError(message)


# ============================================
# ARGUMENT PARSING
# ============================================

class CliArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors raised as UsageError instead of exiting with status 2"""

    def error(self, message: str):
        raise UsageError(message)


def _theta(text: str) -> List[float]:
    ok, value = validation.parse_theta(text)
    if not ok:
        raise argparse.ArgumentTypeError(value)
    return value


def _add_run_options(parser: argparse.ArgumentParser, default) -> None:
    parser.add_argument("--seed", type=int, default=default, help="master seed (default: SAGARCH_SEED)")
    parser.add_argument("--workers", type=int, default=default, help="parallel workers (default: SAGARCH_WORKERS)")


def build_parser() -> CliArgumentParser:
    parser = CliArgumentParser(prog="sagarch", description="sAGARCH(1,1) with symmetric stable innovations")
    parser.add_argument("-v", "--verbose", action="store_true", help="log at INFO level")
    _add_run_options(parser, default=None)
    # accepted after the subcommand too; SUPPRESS keeps a value given before it
    common = CliArgumentParser(add_help=False)
    _add_run_options(common, default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CliArgumentParser)

    p = sub.add_parser("simulate", parents=[common], help="simulate a path and write it as CSV")
    p.add_argument("--theta", type=_theta, required=True, help="omega,phi_plus,phi_minus,psi,alpha")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--burn-in", type=int, default=500)
    p.add_argument("--unit", choices=("raw", "percent"), default="raw")
    p.add_argument("--out", required=True)

    p = sub.add_parser("fit", parents=[common], help="fit a return series and report estimates, ASDs and tests")
    p.add_argument("--in", dest="input_path", required=True)
    p.add_argument("--mode", choices=mle.MODES, default="stationary")
    p.add_argument("--asd-kind", choices=("auto", "int", "res", "universal"), default="auto")
    p.add_argument("--multistart", type=int, default=6)
    p.add_argument("--level", type=float, default=0.05)
    p.add_argument("--out")

    p = sub.add_parser("test", parents=[common], help="refit in free mode and run hypothesis tests")
    p.add_argument("--in", dest="input_path", required=True)
    p.add_argument("--which", choices=("stationarity", "symmetry", "diagnostic", "all"), default="all")
    p.add_argument("--alpha-star", type=float, default=None)
    p.add_argument("--level", type=float, default=0.05)
    p.add_argument("--multistart", type=int, default=6)
    p.add_argument("--out")

    p = sub.add_parser("mc", parents=[common], help="run a Monte Carlo experiment from a JSON spec")
    p.add_argument("--spec", dest="input_path", required=True)
    p.add_argument("--out")
    p.add_argument("--csv", dest="csv_path")

    p = sub.add_parser("tables", parents=[common], help="desk-scale MLE table over the stationary designs")
    p.add_argument("--which", choices=("table1",), default="table1")
    p.add_argument("--scale", type=int, default=200, help="replications per cell")
    p.add_argument("--out")
    return parser


def to_run_config(args: argparse.Namespace) -> RunConfig:
    settings = get_settings()
    values = {k: v for k, v in vars(args).items() if v is not None and k != "verbose"}
    values["output_path"] = values.pop("out", None)
    values["explicit"] = tuple(name for name in ("seed", "workers") if name in values)
    values.setdefault("seed", settings.seed)
    values.setdefault("workers", settings.workers)
    values = {k: v for k, v in values.items() if v is not None}
    try:
        return RunConfig(**values)
    except ValidationError as err:
        first = err.errors()[0]
        where = ".".join(str(p) for p in first["loc"])
        raise UsageError(f"{where}: {first['msg']}" if where else first["msg"]) from err


# ============================================
# COMMANDS
# ============================================

def _emit(text: str, config: RunConfig) -> None:
    if config.output_path:
        Path(config.output_path).write_text(text, encoding="utf-8")
        logger.info(f"Wrote {config.output_path}")


def run_simulate(config: RunConfig) -> int:
    theta = ParamVector.from_array(config.theta)
    path = simulate(theta, config.n, seed=config.seed, burn_in=config.burn_in)
    series = ReturnSeries(path.series.values, scale_hint=config.unit)
    out, count = write_series_csv(series, config.output_path)
    if path.truncated:
        print(f"warning: explosive path truncated to {count} observations", file=sys.stderr)
    print(f"wrote {count} observations to {out}")
    return 0


def _asd_for(config: RunConfig, fit: mle.FitResult, y) -> inference.AsdReport:
    kind = config.asd_kind
    if kind == "universal" or (kind == "auto" and not fit.omega_inferential):
        return inference.asd(inference.universal_variance(fit, y), y.n)
    return inference.asd(inference.sigma_hat(kind, fit, y), y.n)


def run_fit(config: RunConfig) -> int:
    y = ingest_csv(config.input_path)
    fit = mle.fit(y, config.fit_config())
    asd = _asd_for(config, fit, y)
    stationary, explosive = hypothesis_tests.stationarity_test(fit, y, config.level)
    symmetry = hypothesis_tests.symmetry_test(fit, y, config.level)
    text = report_writer.emit_report(fit, asd=asd, tests=[stationary, explosive, symmetry])
    _emit(text, config)
    print(render_fit_table(report_writer.parse_report(text)), end="")
    return 0


def run_test(config: RunConfig) -> int:
    y = ingest_csv(config.input_path)
    fit = mle.fit(y, config.fit_config(mode="free"))
    reports: List[hypothesis_tests.TestReport] = []
    if config.which in ("stationarity", "all"):
        reports.extend(hypothesis_tests.stationarity_test(fit, y, config.level))
    if config.which in ("symmetry", "all"):
        reports.append(hypothesis_tests.symmetry_test(fit, y, config.level))
    if config.which in ("diagnostic", "all"):
        alpha_star = config.alpha_star
        if alpha_star is None:
            alpha_star = hypothesis_tests.default_alpha_star(fit)
            logger.info(f"alpha_star defaults to the fitted alpha rounded: {alpha_star}")
        reports.append(hypothesis_tests.diagnostic_test(y, alpha_star, config.level, config.fit_config("free")))
    text = report_writer.emit_report(fit, asd=None, tests=reports)
    _emit(text, config)
    print(render_fit_table(report_writer.parse_report(text)), end="")
    return 0


def _load_request(path: str) -> McRequest:
    text = Path(path).read_text(encoding="utf-8")
    try:
        return McRequest.model_validate_json(text)
    except ValidationError:
        pass
    try:
        return McRequest(experiment=montecarlo.ExperimentSpec.model_validate_json(text))
    except ValidationError as err:
        first = err.errors()[0]
        raise DataError(f"invalid experiment spec {path}: {'.'.join(map(str, first['loc']))}: {first['msg']}") from err


def run_mc(config: RunConfig) -> int:
    request = _load_request(config.input_path)
    spec = request.experiment
    updates = {}
    if "seed" in config.explicit:
        updates["master_seed"] = config.seed
    if "workers" in config.explicit:
        updates["workers"] = config.workers
    if updates:
        spec = spec.model_copy(update=updates)
    if request.test is not None:
        if request.axis is None:
            raise DataError("a test experiment needs an axis and values")
        result = montecarlo.run_test_experiment(spec, request.test, request.axis, request.values)
    else:
        result = montecarlo.run_mle_experiment(spec)
    text = report_writer.emit_experiment(result, csv_path=config.csv_path)
    _emit(text, config)
    print(render_experiment_table(result), end="")
    return 0


def run_tables(config: RunConfig) -> int:
    results = []
    for design in get_registry().stationary():
        spec = montecarlo.ExperimentSpec(
            design_id=design.design_id,
            sample_sizes=TABLE1_SIZES,
            replications=config.scale,
            master_seed=config.seed,
            workers=config.workers,
        )
        result = montecarlo.run_mle_experiment(spec)
        results.append(result)
        print(render_experiment_table(result))
    if config.output_path:
        payload = {"table1": [r.to_dict() for r in results]}
        _emit(report_writer.dumps(payload), config)
    return 0


HANDLERS = {
    "simulate": run_simulate,
    "fit": run_fit,
    "test": run_test,
    "mc": run_mc,
    "tables": run_tables,
}


def configure_logging(verbose: bool) -> None:
    level = "INFO" if verbose else get_settings().log_level
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        configure_logging(args.verbose)
        config = to_run_config(args)
        _check_inputs(config)
        return HANDLERS[config.command](config)
    except SagarchError as err:
        print(f"error[{err.kind}]: {str(err).splitlines()[0] if str(err) else type(err).__name__}", file=sys.stderr)
        return exit_code(err)
    except ValidationError as err:
        print(f"error[usage]: {err.errors()[0]['msg']}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as err:
        print(f"error[data]: {err}", file=sys.stderr)
        return EXIT_DATA

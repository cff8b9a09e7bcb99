"""
Command-line front end.

```bash
sdilab simulate --in scenario.json --out report.json
sdilab certify --in statistics.json --d 2
sdilab rac --in statistics.json --spec 3:log6
sdilab attack --mode grid
sdilab reproduce --seed 0
```
"""
import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence, Union

import numpy as np

from sdi_lab.attacks import AttackScenario, EfficiencySearch, analytic_bound, attack_3tolog6
from sdi_lab.audit import Auditor, sample_event_log
from sdi_lab.core import ClickTable, ConditionalDistribution
from sdi_lab.enums import SearchMode, SuccessCriterion
from sdi_lab.errors import DomainError, ParseError, SDILabError
from sdi_lab.file_formats import ScenarioFile, StatisticsFile, read_input, write_report
from sdi_lab.lazy_logger import get_logger
from sdi_lab.quantum import quantum_statistics
from sdi_lab.rac import ClassicalOptimizer, RACSpec, nayak_upper_bound, success_report
from sdi_lab.reproduce import AcceptanceSuite
from sdi_lab.scenario import (
    click_table,
    message_click_table,
    simulate_dl,
    simulate_dl_full,
    simulate_ideal,
    without_detection_loss,
)

__all__ = (
    "RunConfig",
    "parse_args",
    "run",
    "cmd_simulate",
    "cmd_certify",
    "cmd_rac",
    "cmd_attack",
    "cmd_reproduce",
)

SUBCOMMANDS = ("simulate", "certify", "rac", "attack", "reproduce")
EXIT_OK = 0
EXIT_ACCEPTANCE_FAILED = 1

Report = Dict[str, Any]


@dataclass(frozen=True)
class RunConfig:
    """
    Validated command-line options.

    Arguments:
        subcommand -- One of `SUBCOMMANDS`.
        input_path -- Scenario, distribution or event log.
        output_path -- Report path, stdout if not set.
        d -- Message dimension for membership.
        tol -- Condition tolerance override.
        mode -- Efficiency search mode.
        seed -- Seed of the shared random generator.
        spec -- Random access code, `n:m` or `n:logK`.
        rounds -- Sample an event log of this size before certifying a scenario.
        verbose -- Log at DEBUG level.
    """

    subcommand: str
    input_path: Optional[Path] = None
    output_path: Optional[Path] = None
    d: int = 2
    tol: Optional[float] = None
    mode: SearchMode = SearchMode.VERTEX
    seed: int = 0
    spec: Optional[RACSpec] = None
    rounds: int = 0
    verbose: bool = False

    @classmethod
    def from_namespace(cls, namespace: argparse.Namespace) -> "RunConfig":
        """
        Raises:
            ParseError -- If the input file does not exist or `--spec` is malformed.
            DomainError -- If `--d`, `--tol` or `--rounds` is out of range.
        """
        input_path = Path(namespace.input) if namespace.input else None
        if input_path is not None and not input_path.is_file():
            raise ParseError(f"Input file {input_path} does not exist", field="--in")
        if namespace.d < 1:
            raise DomainError("Message dimension must be positive", {"d": namespace.d})
        if namespace.tol is not None and namespace.tol < 0:
            raise DomainError("Tolerance must be non-negative", {"tol": namespace.tol})
        if namespace.rounds < 0:
            raise DomainError("Rounds must be non-negative", {"rounds": namespace.rounds})
        return cls(
            subcommand=namespace.subcommand,
            input_path=input_path,
            output_path=Path(namespace.out) if namespace.out else None,
            d=namespace.d,
            tol=namespace.tol,
            mode=SearchMode(namespace.mode),
            seed=namespace.seed,
            spec=RACSpec.parse(namespace.spec) if namespace.spec else None,
            rounds=namespace.rounds,
            verbose=namespace.verbose,
        )

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


def get_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        "sdilab", description="Detection loophole toolkit for prepare-and-measure protocols."
    )
    parser.add_argument("subcommand", choices=SUBCOMMANDS)
    parser.add_argument("--in", dest="input", help="Scenario, distribution or event log.")
    parser.add_argument("--out", help="Report path, stdout by default.")
    parser.add_argument("--d", type=int, default=2, help="Message dimension, default 2.")
    parser.add_argument("--tol", type=float, help="Click condition tolerance.")
    parser.add_argument("--mode", choices=sorted(SearchMode.values()), default="vertex")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--spec", help="Random access code, for example 2:1 or 3:log6.")
    parser.add_argument("--rounds", type=int, default=0, help="Sample rounds before certify.")
    parser.add_argument("--verbose", action="store_true", help="Show debug messages.")
    return parser


def parse_args(args: Sequence[str]) -> RunConfig:
    return RunConfig.from_namespace(get_parser().parse_args(args))


def _spec(config: RunConfig, source: Union[ScenarioFile, StatisticsFile, None]) -> RACSpec:
    spec = config.spec or (source.spec if source is not None else None)
    if spec is None:
        raise ParseError("Code is not set, pass --spec", field="--spec")
    return spec


def _input(config: RunConfig) -> Union[ScenarioFile, StatisticsFile]:
    if config.input_path is None:
        raise ParseError(f"{config.subcommand} needs an input file", field="--in")
    return read_input(config.input_path)


def _observed(source: Union[ScenarioFile, StatisticsFile]) -> ConditionalDistribution:
    if isinstance(source, StatisticsFile):
        if source.distribution is None:
            raise ParseError("Event logs are only accepted by certify", field="--in")
        return source.distribution
    if source.scenario is not None:
        return simulate_dl(source.scenario)
    if source.quantum is not None:
        return quantum_statistics(source.quantum)
    raise ParseError("Input has no statistics", field="--in")


def cmd_simulate(config: RunConfig) -> Report:
    """
    Simulate a scenario with and without detection loss.

    Raises:
        ZeroClickProbability -- If some input pair never clicks.
    """
    source = _input(config)
    if not isinstance(source, ScenarioFile):
        raise ParseError("simulate needs a scenario file", field="--in")

    report: Report = {}
    statistics: Dict[str, ConditionalDistribution] = {}
    if source.scenario is not None:
        scenario = source.scenario
        statistics["ideal"] = simulate_ideal(scenario)
        statistics["dl"] = simulate_dl(scenario)
        statistics["dl_full"] = simulate_dl_full(scenario)
        report["dims"] = scenario.dims.as_dict()
        report["clicks"] = click_table(scenario).as_dict()
        report["message_clicks"] = message_click_table(scenario)
    if source.quantum is not None:
        statistics["quantum"] = quantum_statistics(source.quantum)
    report.update({key: value.as_dict() for key, value in statistics.items()})

    spec = config.spec or source.spec
    if spec is not None:
        report["success"] = {
            key: success_report(value, spec).as_dict() for key, value in statistics.items()
        }
    return report


def cmd_certify(config: RunConfig) -> Report:
    """
    Audit statistics, an event log or a scenario at dimension `--d`.

    With `--rounds` a scenario is sampled into an event log first. Logs get a
    click tolerance estimated from their round counts unless `--tol` is given.

    Raises:
        EmptyCell -- If an event log leaves some input pair without clicks.
    """
    source = _input(config)
    auditor = Auditor()
    if isinstance(source, StatisticsFile):
        if source.log is not None:
            return auditor.audit_log(source.log, config.d, tol=config.tol).as_dict()
        statistics = _observed(source)
        clicks = source.clicks or ClickTable.ones(statistics.dims)
        return auditor.audit(statistics, clicks, config.d, config.tol).as_dict()

    if source.scenario is None:
        statistics = _observed(source)
        return auditor.audit(
            statistics, ClickTable.ones(statistics.dims), config.d, config.tol
        ).as_dict()

    scenario = source.scenario
    if config.rounds:
        log = sample_event_log(scenario, config.rounds, config.rng())
        return auditor.audit_log(log, config.d, scenario.dims, config.tol).as_dict()
    return auditor.audit(
        simulate_dl(scenario), click_table(scenario), config.d, config.tol, scenario=scenario
    ).as_dict()


def cmd_rac(config: RunConfig) -> Report:
    """
    Evaluate a random access code on observed statistics.
    """
    source = _input(config)
    spec = _spec(config, source)
    report: Report = {
        "spec": spec.as_dict(),
        "success": success_report(_observed(source), spec).as_dict(),
        "nayak_bound": nayak_upper_bound(spec.n, spec.m),
    }
    if spec.message_dim == 2:
        optimizer = ClassicalOptimizer()
        report["classical"] = {
            criterion.value: optimizer.optimum(spec, 2, criterion).as_dict()
            for criterion in SuccessCriterion
        }
    return report


def cmd_attack(config: RunConfig) -> Report:
    """
    Evaluate a detection loophole attack, the 3->log6 attack by default.

    Raises:
        SearchSpaceTooLarge -- If the efficiency search exceeds its limits.
    """
    if config.input_path is None:
        attack = attack_3tolog6()
    else:
        source = _input(config)
        if not isinstance(source, ScenarioFile) or source.scenario is None:
            raise ParseError("attack needs a scenario file with boxes", field="--in")
        attack = AttackScenario(source.scenario, _spec(config, source))

    spec = attack.spec
    report: Report = {
        "attack": attack.as_dict(),
        "lossless": success_report(
            simulate_ideal(without_detection_loss(attack.base)), spec
        ).as_dict(),
        "dl": success_report(simulate_dl(attack.base), spec).as_dict(),
        "analytic_bound": analytic_bound(attack),
        "nayak_bound": nayak_upper_bound(spec.n, spec.m),
    }
    if spec.n == 2 and spec.message_dim == 2:
        report["search"] = EfficiencySearch().search(attack, config.mode).as_dict()
    return report


def cmd_reproduce(config: RunConfig) -> Report:
    report = AcceptanceSuite(seed=config.seed).run()
    for record in report.table.get_records():
        sys.stderr.write(f"{record['item']:>2}. {record['name']}: {record['status']}\n")
    return report.as_dict()


COMMANDS: Dict[str, Callable[[RunConfig], Report]] = {
    "simulate": cmd_simulate,
    "certify": cmd_certify,
    "rac": cmd_rac,
    "attack": cmd_attack,
    "reproduce": cmd_reproduce,
}


def run(args: Sequence[str]) -> int:
    """
    Run a subcommand and return its exit code.

    Library errors are reported on stderr and mapped to their `exit_code`.
    """
    logger = get_logger()
    try:
        config = parse_args(args)
    except SDILabError as e:
        sys.stderr.write(f"sdilab: {e}\n")
        return e.exit_code

    if config.verbose:
        get_logger(logging.DEBUG)

    try:
        report = COMMANDS[config.subcommand](config)
        write_report(report, config.output_path)
    except SDILabError as e:
        logger.error(f"{config.subcommand} failed: {e}")
        return e.exit_code

    if config.subcommand == "reproduce" and not report["passed"]:
        return EXIT_ACCEPTANCE_FAILED
    return EXIT_OK

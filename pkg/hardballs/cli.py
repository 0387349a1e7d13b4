"""
Command line front end.

Every command writes JSON lines (to ``--out`` or stdout), one object per record, each embedding the full run
specification under ``"run"``.  Exit codes: 0 ok, 1 bad input, 2 multiple collision, 3 cap reached, 4 condition
failed, 5 audit failed, 6 critical finding.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from collections.abc import Callable, Iterator, Sequence
from contextlib import contextmanager
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import wraps
from pathlib import Path
from typing import IO, Any

import numpy as np

from hardballs.analysis import (
    PinnedMasses,
    check_conditions,
    conforming_mass_sampler,
    cross_validate,
    generic_position_sampler,
    integer_velocity_sampler,
    log_uniform_mass_sampler,
    search_violations,
)
from hardballs.dynamics import SimConfig, conservation_residuals, simulate
from hardballs.enums import ExitCode, Mode, StrategyName, Termination
from hardballs.game import (
    GamePosition,
    WeightMatrix,
    find_long_play,
    inversion_number,
    is_certified,
    is_terminal,
    play_negative_game,
    potential,
    strategy_for,
    weights_from_masses,
)
from hardballs.model import (
    DEFAULT_TOLERANCE,
    EXACT,
    CollisionTrace,
    MassProfile,
    Numeric,
    Scalar,
    SystemState,
    total_collisions,
)
from hardballs.utils import (
    CriticalFindingException,
    InputException,
    MassException,
    MismatchException,
    MultipleCollisionException,
    NumericModeException,
    StateException,
    WeightException,
    bound,
)

log = logging.getLogger(__name__)

OUTPUT_DIR_VARIABLE = "HARDBALLS_OUTPUT_DIR"

_TERMINATION_CODES = {
    Termination.sorted: ExitCode.ok,
    Termination.event_cap_reached: ExitCode.cap_reached,
    Termination.multiple_collision: ExitCode.multiple_collision,
}


@dataclass(frozen=True)
class RunSpec:
    command: str
    mode: str = Mode.float.value
    tol: float | None = DEFAULT_TOLERANCE
    seed: int = 0
    input: str | None = None
    system: str | None = None
    out: str | None = None
    max_events: int | None = None
    trials: int | None = None
    strategy: str = StrategyName.leftmost.value
    n: int | None = None
    sampler: str = "conforming"
    masses: str | None = None
    weights: str | None = None
    start: str | None = None
    workers: int = 1
    verbose: bool = False

    @property
    def numeric(self) -> Numeric:
        if self.mode == Mode.exact.value:
            return EXACT
        tol = DEFAULT_TOLERANCE if self.tol is None else self.tol
        if not tol >= 0:
            raise InputException("field 'tol' must be nonnegative, got {tol}".format(tol=tol))
        return Numeric.floating(tol)

    def to_record(self) -> dict[str, Any]:
        record = asdict(self)
        if self.mode == Mode.exact.value:
            record["tol"] = None
        return record


class _Output:
    def __init__(self, spec: RunSpec, stream: IO[str]) -> None:
        self._run = spec.to_record()
        self._stream = stream

    def write(self, record: dict[str, Any]) -> None:
        self._stream.write(json.dumps(dict(record, run=self._run), sort_keys=True) + "\n")


@contextmanager
def _output(spec: RunSpec) -> Iterator[_Output]:
    if spec.out is None:
        yield _Output(spec, sys.stdout)
        return

    path = Path(spec.out)
    directory = os.environ.get(OUTPUT_DIR_VARIABLE)
    if directory and not path.is_absolute():
        path = Path(directory) / path
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as stream:
        yield _Output(spec, stream)


def _guarded(func: Callable[[RunSpec], int]) -> Callable[[RunSpec], int]:
    """Turns malformed-input exceptions into exit code 1 with a diagnostic."""

    @wraps(func)
    def _run(spec: RunSpec) -> int:
        try:
            return int(func(spec))
        except (InputException, MassException, StateException, WeightException, NumericModeException) as exc:
            log.error("%s: %s", spec.command, exc)
            return int(ExitCode.bad_input)

    return _run


def _fmt(values: Sequence[Scalar], numeric: Numeric) -> list[str]:
    return [numeric.format(value) for value in values]


def _load_document(spec: RunSpec) -> dict[str, Any]:
    try:
        if spec.system is not None:
            text = spec.system
        elif spec.input == "-":
            text = sys.stdin.read()
        elif spec.input:
            text = Path(spec.input).read_text(encoding="utf-8")
        else:
            return {}
        # decimals parse exactly
        document = json.loads(text, parse_float=Fraction)
    except OSError as exc:
        raise InputException("cannot read input: {exc}".format(exc=exc))
    except json.JSONDecodeError as exc:
        raise InputException("input is not valid JSON: {exc}".format(exc=exc))

    if not isinstance(document, dict):
        raise InputException("input must be a JSON object")
    return document


def _scalars(values: Any, name: str, numeric: Numeric) -> tuple[Scalar, ...]:
    if isinstance(values, str):
        values = [part for part in values.split(",") if part.strip()]
    if not isinstance(values, list) or not values:
        raise InputException("field '{name}' must be a non-empty list of numbers".format(name=name))
    try:
        return numeric.coerce_all(values)
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise InputException("field '{name}': {exc}".format(name=name, exc=exc))


def _field(spec_value: str | None, document: dict[str, Any], name: str, numeric: Numeric) -> tuple[Scalar, ...] | None:
    if spec_value is not None:
        return _scalars(spec_value, name, numeric)
    if name in document:
        return _scalars(document[name], name, numeric)
    return None


def _required(values: tuple[Scalar, ...] | None, name: str) -> tuple[Scalar, ...]:
    if values is None:
        raise InputException("missing field '{name}'".format(name=name))
    return values


def _load_system(spec: RunSpec, numeric: Numeric) -> tuple[MassProfile, SystemState]:
    document = _load_document(spec)
    masses = _required(_field(spec.masses, document, "masses", numeric), "masses")
    positions = _required(_field(None, document, "positions", numeric), "positions")
    velocities = _required(_field(None, document, "velocities", numeric), "velocities")
    time = _scalars([document.get("time", 0)], "time", numeric)[0]
    return MassProfile(masses), SystemState(positions, velocities, time)


def _trace_records(trace: CollisionTrace, masses: MassProfile, numeric: Numeric) -> Iterator[dict[str, Any]]:
    for index, event in enumerate(trace.events):
        yield {
            "event": index,
            "t": numeric.format(event.time),
            "pairs": list(event.pairs),
            "pre": [_fmt(pair, numeric) for pair in event.pre],
            "post": [_fmt(pair, numeric) for pair in event.post],
        }

    momentum_drift, energy_drift = conservation_residuals(trace, masses, numeric)
    yield {
        "summary": {
            "collisions": total_collisions(trace),
            "events": len(trace.events),
            "termination": trace.termination.value,
            "final_time": numeric.format(trace.final.time),
            "final_velocities": _fmt(trace.final.velocities, numeric),
            "momentum_residual": numeric.format(momentum_drift),
            "energy_residual": numeric.format(energy_drift),
        }
    }


@_guarded
def cmd_simulate(spec: RunSpec) -> int:
    numeric = spec.numeric
    masses, state = _load_system(spec, numeric)
    try:
        trace = simulate(state, masses, SimConfig(numeric, spec.max_events), verbose=spec.verbose)
    except MultipleCollisionException as exc:
        log.warning("%s", exc)
        trace = exc.trace

    with _output(spec) as out:
        for record in _trace_records(trace, masses.coerce(numeric), numeric):
            out.write(record)
    return _TERMINATION_CODES[trace.termination]


def _load_weights(spec: RunSpec, document: dict[str, Any], numeric: Numeric) -> WeightMatrix:
    raw = spec.weights if spec.weights is not None else document.get("weights")
    if raw is not None:
        if isinstance(raw, list) and raw and all(isinstance(row, list) for row in raw):
            try:
                return WeightMatrix.from_rows(raw, numeric)
            except (ValueError, TypeError, ZeroDivisionError) as exc:
                raise InputException("field 'weights': {exc}".format(exc=exc))
        return WeightMatrix.from_neighbors(_scalars(raw, "weights", numeric), numeric)

    masses = _field(spec.masses, document, "masses", numeric)
    if masses is None:
        raise InputException("provide 'masses' or 'weights'")
    if numeric.is_exact:
        log.info("Weights derived from masses involve square roots; the game runs in float mode")
    return weights_from_masses(MassProfile(masses), numeric.as_float())


@_guarded
def cmd_game(spec: RunSpec) -> int:
    document = _load_document(spec)
    k = _load_weights(spec, document, spec.numeric)
    limit = bound(k.n)
    start = _field(spec.start, document, "start", k.numeric)

    if start is None:
        found = find_long_play(k, limit)
        if found is None:
            with _output(spec) as out:
                out.write({"summary": {"found": False, "bound": limit, "certified": is_certified(k)}})
            return ExitCode.ok
        position, moves, strategy = found.start, list(found.moves), found.strategy.value
    else:
        if len(start) != k.n:
            raise InputException(
                "field 'start' has {count} components, the weights need {n}".format(count=len(start), n=k.n)
            )
        position, strategy = GamePosition(start, k.numeric), spec.strategy
        max_moves = spec.max_events or limit + 1
        moves = play_negative_game(
            position, k, strategy_for(strategy, spec.seed), max_moves=max_moves, verbose=spec.verbose
        )

    terminal = is_terminal(moves[-1].position if moves else position)
    with _output(spec) as out:
        out.write(
            {
                "start": _fmt(position.values, k.numeric),
                "inversions": inversion_number(potential(position)),
                "strategy": strategy,
                "weights": _fmt(k.neighbors(), k.numeric),
            }
        )
        for number, move in enumerate(moves, 1):
            out.write(
                {
                    "move": number,
                    "fired": move.index,
                    "position": _fmt(move.position.values, k.numeric),
                    "inversions": move.inversions,
                }
            )
        out.write(
            {
                "summary": {
                    "moves": len(moves),
                    "terminal": terminal,
                    "bound": limit,
                    "certified": is_certified(k),
                }
            }
        )
    if start is None:
        # a searched play stops one move past the bound
        return ExitCode.ok
    return ExitCode.ok if terminal and len(moves) <= limit else ExitCode.cap_reached


@_guarded
def cmd_check(spec: RunSpec) -> int:
    numeric = spec.numeric
    masses = _required(_field(spec.masses, _load_document(spec), "masses", numeric), "masses")
    report = check_conditions(masses, numeric)
    with _output(spec) as out:
        out.write(
            {
                "masses": _fmt(masses, numeric),
                "geometric_ok": report.geometric_ok,
                "arithmetic_ok": report.arithmetic_ok,
                "weights_ok": report.weights_ok,
                "geometric_margins": _fmt(report.geometric_margins, numeric),
                "arithmetic_margins": _fmt(report.arithmetic_margins, numeric),
                "weights": [repr(value) for value in report.weights],
            }
        )
    return ExitCode.ok if report.geometric_ok else ExitCode.condition_failed


def _certify(trace: CollisionTrace, masses: MassProfile, numeric: Numeric, verbose: bool) -> tuple[ExitCode, dict]:
    collisions = total_collisions(trace)
    try:
        report = cross_validate(trace, masses, numeric, verbose=verbose)
    except MismatchException as exc:
        log.error("%s", exc)
        return ExitCode.audit_failed, {"certified": False, "event": exc.event_index, "collisions": collisions}

    certified = report.valid and not (report.weights_ok and collisions > bound(masses.n))
    record = {
        "certified": certified,
        "collisions": collisions,
        "inversions": list(report.inversions),
        "weights_ok": report.weights_ok,
        "event": report.failed_event,
    }
    return (ExitCode.ok if certified else ExitCode.audit_failed), record


def _mass_sampler(spec: RunSpec) -> tuple[int, Callable]:
    if spec.masses is not None:
        masses = [part.strip() for part in spec.masses.split(",") if part.strip()]
        n = spec.n if spec.n is not None else len(masses) - 1
        return n, PinnedMasses(masses)
    if spec.n is None or spec.n < 1:
        raise InputException("--n must be at least 1 unless --masses pins the profile")
    if spec.sampler == "any":
        return spec.n, log_uniform_mass_sampler
    return spec.n, conforming_mass_sampler


def _certify_ensemble(spec: RunSpec) -> int:
    numeric = spec.numeric
    n, mass_sampler = _mass_sampler(spec)
    config = SimConfig(numeric, spec.max_events)
    failed = aborted = 0
    with _output(spec) as out:
        for trial, child in enumerate(np.random.SeedSequence(spec.seed).spawn(spec.trials)):
            rng = np.random.default_rng(child)
            masses = mass_sampler(rng, n, numeric)
            velocities = integer_velocity_sampler(rng, n, numeric)
            positions = generic_position_sampler(rng, n, numeric)
            try:
                trace = simulate(SystemState(positions, velocities, numeric.coerce(0)), masses, config)
            except MultipleCollisionException:
                aborted += 1
                continue
            code, record = _certify(trace, masses, numeric, spec.verbose)
            failed += code is not ExitCode.ok
            out.write(dict(record, trial=trial, masses=_fmt(masses, numeric)))
        out.write({"summary": {"trials": spec.trials, "failed": failed, "aborted": aborted}})
    return ExitCode.audit_failed if failed else ExitCode.ok


@_guarded
def cmd_certify(spec: RunSpec) -> int:
    if spec.trials:
        return _certify_ensemble(spec)

    numeric = spec.numeric
    masses, state = _load_system(spec, numeric)
    with _output(spec) as out:
        try:
            trace = simulate(state, masses, SimConfig(numeric, spec.max_events), verbose=spec.verbose)
        except MultipleCollisionException as exc:
            out.write({"summary": {"certified": False, "error": str(exc)}})
            return ExitCode.multiple_collision
        code, record = _certify(trace, masses, numeric, spec.verbose)
        out.write({"summary": record})
    return code


def _finding_record(finding: Any, numeric: Numeric) -> dict[str, Any]:
    return {
        "trial": finding.trial,
        "masses": _fmt(finding.masses, numeric),
        "positions": _fmt(finding.state.positions, numeric),
        "velocities": _fmt(finding.state.velocities, numeric),
        "count": finding.count_label,
        "geometric_ok": finding.geometric_ok,
    }


@_guarded
def cmd_search(spec: RunSpec) -> int:
    numeric = spec.numeric
    n, mass_sampler = _mass_sampler(spec)
    trials = spec.trials or 100
    with _output(spec) as out:
        try:
            result = search_violations(
                n,
                mass_sampler,
                trials=trials,
                seed=spec.seed,
                config=SimConfig(numeric, spec.max_events),
                workers=spec.workers,
                verbose=spec.verbose,
            )
        except CriticalFindingException as exc:
            out.write({"critical": _finding_record(exc.finding, numeric)})
            return ExitCode.critical_finding

        for finding in result:
            out.write({"finding": _finding_record(finding, numeric)})
        out.write(
            {
                "summary": {
                    "n": n,
                    "bound": bound(n),
                    "trials": result.trials,
                    "conforming": result.conforming,
                    "findings": len(result.findings),
                    "aborted": result.aborted,
                    "converse_gaps": result.converse_gaps,
                }
            }
        )
    return ExitCode.ok


COMMANDS = {
    "simulate": cmd_simulate,
    "game": cmd_game,
    "check": cmd_check,
    "certify": cmd_certify,
    "search": cmd_search,
}


def _count(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be at least 1, got {value}".format(value=value))
    return value


def _tolerance(text: str) -> float:
    value = float(text)
    if not value >= 0:
        raise argparse.ArgumentTypeError("must be nonnegative, got {value}".format(value=value))
    return value


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:
        # argparse would exit with 2, which means multiple collision here
        raise InputException(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    mode = common.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="mode", action="store_const", const=Mode.exact.value, help="exact rationals")
    mode.add_argument("--float", dest="mode", action="store_const", const=Mode.float.value, help="floats (default)")
    common.add_argument("--tol", type=_tolerance, default=DEFAULT_TOLERANCE, help="float comparison tolerance")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-events", type=_count, default=None, help="event cap (simulate) or move cap (game)")
    common.add_argument("--trials", type=_count, default=None)
    common.add_argument("--strategy", choices=[name.value for name in StrategyName], default="leftmost")
    common.add_argument("--out", default=None, help="output path; relative paths honour $" + OUTPUT_DIR_VARIABLE)
    common.add_argument("--system", default=None, help="inline JSON input document")
    common.add_argument("--masses", default=None, help="comma separated masses, e.g. 1,1/100,1")
    common.add_argument("--weights", default=None, help="comma separated k_{i,i+1}")
    common.add_argument("--start", default=None, help="comma separated starting position")
    common.add_argument("--n", type=_count, default=None, help="number of balls minus one")
    common.add_argument("--sampler", choices=["conforming", "any"], default="conforming")
    common.add_argument("--workers", type=_count, default=1)
    common.add_argument("--verbose", action="store_true")
    common.add_argument("input", nargs="?", default=None, help="JSON input document, '-' for stdin")

    parser = _Parser(prog="hardballs", description="Elastic point balls on a line and the n(n+1)/2 bound.")
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("simulate", parents=[common], help="simulate one system")
    commands.add_parser("game", parents=[common], help="play the numbers game")
    commands.add_parser("check", parents=[common], help="check the mass conditions")
    commands.add_parser("certify", parents=[common], help="simulate and audit against the numbers game")
    commands.add_parser("search", parents=[common], help="search random systems for violations")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)-8s %(name)s: %(message)s", stream=sys.stderr)
    try:
        args = build_parser().parse_args(argv)
    except InputException as exc:
        log.error("%s", exc)
        return int(ExitCode.bad_input)

    if args.verbose:
        logging.getLogger().setLevel(logging.DEBUG)

    spec = RunSpec(
        command=args.command,
        mode=args.mode or Mode.float.value,
        tol=args.tol,
        seed=args.seed,
        input=args.input,
        system=args.system,
        out=args.out,
        max_events=args.max_events,
        trials=args.trials,
        strategy=args.strategy,
        n=args.n,
        sampler=args.sampler,
        masses=args.masses,
        weights=args.weights,
        start=args.start,
        workers=args.workers,
        verbose=args.verbose,
    )
    return COMMANDS[spec.command](spec)

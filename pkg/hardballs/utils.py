from __future__ import annotations

import sys
from collections.abc import Callable
from functools import wraps
from typing import TYPE_CHECKING, Any, TypeVar, overload

if sys.version_info >= (3, 10):
    from typing import Concatenate, ParamSpec
else:
    from typing_extensions import Concatenate, ParamSpec

if TYPE_CHECKING:
    from hardballs.model import CollisionTrace


class InputException(Exception):
    pass


class MassException(Exception):
    pass


class StateException(Exception):
    pass


class CollisionException(Exception):
    pass


class NumericModeException(Exception):
    pass


class WeightException(Exception):
    pass


class StrategyException(Exception):
    pass


class GameException(Exception):
    pass


class MultipleCollisionException(Exception):
    """
    Raised when two adjacent pairs (three balls) meet at the same instant.  The dynamics is undefined there, so the
    simulator stops and attaches what it computed so far.
    """

    def __init__(self, time: Any, pairs: tuple[int, ...], trace: CollisionTrace | None = None) -> None:
        super().__init__("multiple collision at t={time} between pairs {pairs}".format(time=time, pairs=list(pairs)))
        self.time = time
        self.pairs = pairs
        self.trace = trace


class MismatchException(Exception):
    def __init__(self, event_index: int, game_position: Any, simulated_position: Any, reason: str = "") -> None:
        super().__init__(
            "mismatch at event {index}: {reason} game={game} simulated={sim}".format(
                index=event_index, reason=reason or "positions differ", game=game_position, sim=simulated_position
            )
        )
        self.event_index = event_index
        self.game_position = game_position
        self.simulated_position = simulated_position


class CriticalFindingException(Exception):
    """
    A mass profile satisfying the geometric-mean condition exceeded n(n+1)/2 collisions.  This points at a bug in the
    simulator, not at a counterexample.
    """

    def __init__(self, finding: Any) -> None:
        super().__init__("conforming profile exceeded the bound: {finding}".format(finding=finding))
        self.finding = finding


_Self = TypeVar("_Self")
P = ParamSpec("P")
R = TypeVar("R")


@overload
def builder(func: Callable[Concatenate[_Self, P], None]) -> Callable[Concatenate[_Self, P], _Self]: ...


@overload
def builder(func: Callable[Concatenate[_Self, P], R]) -> Callable[Concatenate[_Self, P], R]: ...


def builder(func: Callable[Concatenate[_Self, P], R | None]) -> Callable[Concatenate[_Self, P], _Self | R]:
    """
    Decorator for fluent configuration methods.  The method runs against a shallow copy of the instance, so the
    receiver is never changed.  The copy is returned when the inner function returns None.
    """
    import copy

    @wraps(func)
    def _copy(self: _Self, *args: P.args, **kwargs: P.kwargs) -> _Self | R:
        self_copy = copy.copy(self)
        result = func(self_copy, *args, **kwargs)

        if result is None:
            return self_copy

        return result

    return _copy


def validate(*args: Any, exc: Exception | None = None, type: type | None = None, check: Callable | None = None) -> None:
    """
    Raises ``exc`` for the first argument that is not an instance of ``type`` or for which ``check`` is falsy.
    """
    for arg in args:
        if type is not None and not isinstance(arg, type):
            raise exc
        if check is not None and not check(arg):
            raise exc


def bound(n: int) -> int:
    """Collision bound n(n+1)/2 for n+1 balls."""
    return n * (n + 1) // 2

from __future__ import annotations

from enum import Enum, IntEnum


class Mode(Enum):
    exact = "exact"
    float = "float"


class Simultaneity(Enum):
    # batch pairwise non-adjacent pairs, abort when two adjacent pairs share a ball
    error_on_adjacent = "error-on-adjacent"
    # abort on any event with more than one pair
    forbidden = "forbidden"


class Termination(Enum):
    sorted = "sorted"
    event_cap_reached = "event-cap-reached"
    multiple_collision = "multiple-collision"


class Provenance(Enum):
    from_masses = "from-masses"
    user_supplied = "user-supplied"


class StrategyName(Enum):
    leftmost = "leftmost"
    rightmost = "rightmost"
    random = "random"
    most_negative = "most-negative"


class ExitCode(IntEnum):
    ok = 0
    bad_input = 1
    multiple_collision = 2
    cap_reached = 3
    condition_failed = 4
    audit_failed = 5
    critical_finding = 6

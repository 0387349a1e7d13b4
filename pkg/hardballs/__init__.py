"""
HardBalls is divided into a handful of modules, the simulator in ``dynamics`` and the numbers game in ``game`` being
the two halves that ``analysis`` ties together.

hardballs.model
---------------

Value types shared by everything else: ``Numeric`` (exact or float comparison), ``MassProfile``, ``SystemState`` and
the ``CollisionTrace`` produced by a run.

hardballs.dynamics
------------------

The elastic two-ball ``collide`` rule and the event-driven ``simulate`` loop, configured through ``SimConfig``.

hardballs.embedding
-------------------

The mass-weighted embedding of velocities in which every collision is a reflection, and its Gram data.

hardballs.game
--------------

The numbers game on a weighted path: firing, the potential, its inversion number and negative plays.

hardballs.analysis
------------------

Mass conditions, cross-validation of traces against game plays, and randomised searches around the n(n+1)/2 bound.

hardballs.enums
---------------

Enumerated options and exit codes.

hardballs.cli
-------------

The ``hardballs`` command line.

hardballs.utils
---------------

Exceptions, the ``builder`` decorator and small helpers.
"""

# noinspection PyUnresolvedReferences
from hardballs.analysis import (
    CertificateReport,
    ConditionReport,
    Finding,
    SearchResult,
    check_conditions,
    cross_validate,
    max_collision_initial,
    search_violations,
)

# noinspection PyUnresolvedReferences
from hardballs.dynamics import (
    SimConfig,
    collide,
    simulate,
    step,
)

# noinspection PyUnresolvedReferences
from hardballs.embedding import (
    GramData,
    VelocityVector,
    build_embedding,
    embed_velocities,
    reflect,
)

# noinspection PyUnresolvedReferences
from hardballs.enums import (
    ExitCode,
    Mode,
    Simultaneity,
    StrategyName,
    Termination,
)

# noinspection PyUnresolvedReferences
from hardballs.game import (
    GamePosition,
    WeightMatrix,
    fire,
    inversion_number,
    play_negative_game,
    potential,
    weights_from_masses,
)

# noinspection PyUnresolvedReferences
from hardballs.model import (
    EXACT,
    FLOAT,
    CollisionEvent,
    CollisionTrace,
    MassProfile,
    Numeric,
    SystemState,
    total_collisions,
)

# noinspection PyUnresolvedReferences
from hardballs.utils import (
    CollisionException,
    CriticalFindingException,
    GameException,
    InputException,
    MassException,
    MismatchException,
    MultipleCollisionException,
    NumericModeException,
    StateException,
    StrategyException,
    WeightException,
    bound,
)

__version__ = "0.1.0"

__all__ = (
    'CertificateReport',
    'ConditionReport',
    'Finding',
    'SearchResult',
    'check_conditions',
    'cross_validate',
    'max_collision_initial',
    'search_violations',
    'SimConfig',
    'collide',
    'simulate',
    'step',
    'GramData',
    'VelocityVector',
    'build_embedding',
    'embed_velocities',
    'reflect',
    'ExitCode',
    'Mode',
    'Simultaneity',
    'StrategyName',
    'Termination',
    'GamePosition',
    'WeightMatrix',
    'fire',
    'inversion_number',
    'play_negative_game',
    'potential',
    'weights_from_masses',
    'EXACT',
    'FLOAT',
    'CollisionEvent',
    'CollisionTrace',
    'MassProfile',
    'Numeric',
    'SystemState',
    'total_collisions',
    'CollisionException',
    'CriticalFindingException',
    'GameException',
    'InputException',
    'MassException',
    'MismatchException',
    'MultipleCollisionException',
    'NumericModeException',
    'StateException',
    'StrategyException',
    'WeightException',
    'bound',
)

"""
Example: A light ball between two heavy ones

Masses (1, 1/100, 1) break the geometric-mean condition at the middle ball.  The light ball
rattles between its neighbours and the run has far more than the three collisions allowed
for three balls.  The wedge bound and a fixed-step oracle confirm the count.
"""

import logging

from hardballs import (
    EXACT,
    MassProfile,
    MultipleCollisionException,
    SimConfig,
    SystemState,
    check_conditions,
    simulate,
    total_collisions,
)
from hardballs.analysis import time_stepped_collision_count, wedge_collision_bound

logging.basicConfig(level=logging.DEBUG, format="%(levelname)-8s %(name)s: %(message)s")
log = logging.getLogger(__name__)

masses = MassProfile.of(("1", "1/100", "1"), EXACT)
state = SystemState.of((0, 1, 3), (1, 0, -1), numeric=EXACT)

report = check_conditions(masses, EXACT)
log.info("geometric_ok=%s arithmetic_ok=%s weights=%s", report.geometric_ok, report.arithmetic_ok, report.weights)

trace = simulate(state, masses, SimConfig().exact())
log.info("Exact simulation: %d collisions (%s)", total_collisions(trace), trace.termination.value)
log.info("Wedge bound: %d", wedge_collision_bound(masses))
log.info("Time-stepped oracle: %d collisions", time_stepped_collision_count(masses, state))

# Balls touching at the same instant abort the run
try:
    simulate(SystemState.of((0, 1, 2), (1, 0, -1)), masses, SimConfig().exact())
except MultipleCollisionException as exc:
    log.warning("Aborted: %s", exc)

"""
Example: Certifying random conforming systems

Each run is replayed as a numbers game.  The game position must track the simulated
velocities after every event and the potential's inversion number must fall by at least the
number of pairs in each event.
"""

import logging

import numpy as np

from hardballs import FLOAT, MultipleCollisionException, SimConfig, SystemState, cross_validate, simulate
from hardballs.analysis import conforming_mass_sampler, generic_position_sampler, integer_velocity_sampler

logging.basicConfig(level=logging.INFO, format="%(levelname)-8s %(name)s: %(message)s")
log = logging.getLogger(__name__)

rng = np.random.default_rng(2024)
passed = aborted = 0
for trial in range(200):
    n = int(rng.integers(1, 7))
    masses = conforming_mass_sampler(rng, n, FLOAT)
    state = SystemState(generic_position_sampler(rng, n, FLOAT), integer_velocity_sampler(rng, n, FLOAT))
    try:
        trace = simulate(state, masses, SimConfig())
    except MultipleCollisionException:
        aborted += 1
        continue

    report = cross_validate(trace, masses)
    if report.valid:
        passed += 1
    else:
        log.error("Trial %d failed at event %d: %s", trial, report.failed_event, list(report.inversions))

log.info("%d certified, %d aborted on multiple collisions", passed, aborted)

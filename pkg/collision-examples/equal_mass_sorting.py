"""
Example: Equal masses sort their velocities

Equal balls simply trade velocities on contact, so the run is a bubble sort of the velocity
sequence and the number of collisions is its inversion number.  Starting in full inversion
gives the largest count, n(n+1)/2.
"""

import logging

from hardballs import SimConfig, bound, max_collision_initial, simulate, total_collisions
from hardballs.model import velocity_inversions

logging.basicConfig(level=logging.DEBUG, format="%(levelname)-8s %(name)s: %(message)s")
log = logging.getLogger(__name__)

for n in (1, 2, 3, 5, 8):
    masses, state = max_collision_initial(n)
    trace = simulate(state, masses, SimConfig().exact())
    log.info(
        "n=%d: %d collision(s) in %d event(s), inversions %d, bound %d",
        n,
        total_collisions(trace),
        len(trace.events),
        velocity_inversions(state.velocities),
        bound(n),
    )

# Show the event log of the smallest interesting case
masses, state = max_collision_initial(2)
trace = simulate(state, masses, SimConfig().exact(), verbose=True)
for event in trace.events:
    log.info("t=%s pairs=%s velocities %s -> %s", event.time, list(event.pairs), event.pre, event.post)
log.info("Final velocities: %s", [str(v) for v in trace.final.velocities])

"""
Example: The numbers game behind the bound

Firing index i flips the sign of p_i and adds p_i * k to each neighbour.  With every
weight at most one, each negative firing removes an inversion from the potential (the
prefix sums of p), so a negative game ends within n(n+1)/2 moves.  With k = 1.5 the
search below finds a longer play.
"""

import logging

from hardballs import EXACT, GamePosition, WeightMatrix, bound, inversion_number, play_negative_game, potential
from hardballs.game import find_long_play, most_negative

logging.basicConfig(level=logging.DEBUG, format="%(levelname)-8s %(name)s: %(message)s")
log = logging.getLogger(__name__)

k = WeightMatrix.from_neighbors(["1", "1/2", "1"], EXACT)
start = GamePosition.of((-2, 1, -1, -3), EXACT)
log.info("Start %s, inversions %d, bound %d", list(start.values), inversion_number(potential(start)), bound(k.n))
for move in play_negative_game(start, k, most_negative, verbose=True):
    log.info("fire %d -> %s (inversions %d)", move.index, [str(v) for v in move.position.values], move.inversions)

heavy = WeightMatrix.from_neighbors(["3/2"], EXACT)
found = find_long_play(heavy)
if found is not None:
    log.info(
        "k=3/2: %d moves from %s with %s, past the bound %d",
        len(found.moves),
        [str(v) for v in found.start.values],
        found.strategy.value,
        bound(heavy.n),
    )

"""Optimal-play win counts on either side of a split.

The closed forms assume districting is unconstrained: the party drawing the
lines may spread its support however it likes.  A small exhaustive allocation
search over discretized support doubles as an independent check of the
closed forms on tiny sides.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterator

from .model import Party, SideRef, SplitProfile, ensure_valid, side_support


def optimal_wins(support: Fraction, districts: int) -> int:
    """Districts a party carries when it draws the lines itself.

    With a majority it wins everything; otherwise it packs districts with
    just over half support each, for floor(2 * support) wins.
    """
    return min(math.floor(2 * support), districts)


def opponent_wins(support: Fraction, opponent_support: Fraction) -> int:
    """Districts a party carries when its opponent draws the lines."""
    return max(math.ceil(support - opponent_support), 0)


def wins_when_districting(profile: SplitProfile, party: Party, side: SideRef) -> int:
    ensure_valid(profile)
    x = side_support(profile, party, side)
    return optimal_wins(x, side.district_count(profile.n))


def wins_when_opponent_districts(
    profile: SplitProfile, party: Party, side: SideRef
) -> int:
    ensure_valid(profile)
    mine = side_support(profile, party, side)
    theirs = side_support(profile, party.opponent, side)
    return opponent_wins(mine, theirs)


def total_wins(profile: SplitProfile, party: Party, side: SideRef) -> int:
    """Wins for ``party`` when it districts ``side`` and the opponent
    districts the rest of the state."""
    return wins_when_districting(profile, party, side) + wins_when_opponent_districts(
        profile, party, side.opposite()
    )


# --- exhaustive allocation oracle -----------------------------------------
#
# Supports are discretized into units of 1/granularity and every way of
# spreading the units over the side's districts is enumerated.  A district
# holding exactly half its units counts for the party drawing the lines:
# the side total is never an exact half-integer, so the districter always
# has surplus somewhere to break such a tie in its own favor.  Exponential
# cost keeps this to tiny sides; it exists to cross-check the closed forms,
# not for production use.

DEFAULT_GRANULARITY = 20
MAX_ORACLE_DISTRICTS = 4


def _allocations(units: int, parts: int, capacity: int) -> Iterator[tuple[int, ...]]:
    """Every split of ``units`` into ``parts`` ordered bins of at most
    ``capacity`` each."""
    if parts == 0:
        if units == 0:
            yield ()
        return
    lowest = max(0, units - (parts - 1) * capacity)
    for first in range(lowest, min(capacity, units) + 1):
        for rest in _allocations(units - first, parts - 1, capacity):
            yield (first,) + rest


def _support_units(support: Fraction, granularity: int) -> int:
    units = support * granularity
    if units.denominator != 1:
        raise ValueError(
            f"support {support} is not a multiple of 1/{granularity}"
        )
    return units.numerator


def _check_oracle_size(districts: int, max_districts: int) -> None:
    if districts > max_districts:
        raise ValueError(
            f"oracle limited to sides of {max_districts} districts, got {districts}"
        )


def bruteforce_districting_wins(
    support: Fraction,
    districts: int,
    granularity: int = DEFAULT_GRANULARITY,
    max_districts: int = MAX_ORACLE_DISTRICTS,
) -> int:
    """Best win count over every allocation of the districting party's units."""
    _check_oracle_size(districts, max_districts)
    units = _support_units(support, granularity)
    best = 0
    for allocation in _allocations(units, districts, granularity):
        held = sum(1 for u in allocation if 2 * u >= granularity)
        best = max(best, held)
    return best


def bruteforce_opponent_wins(
    support: Fraction,
    opponent_support: Fraction,
    granularity: int = DEFAULT_GRANULARITY,
    max_districts: int = MAX_ORACLE_DISTRICTS,
) -> int:
    """Worst-case win count when the opponent allocates its own units.

    The opponent keeps the party out of a district by holding at least half
    of it, so the party wins only districts where the opponent placed
    strictly less than half.
    """
    total = support + opponent_support
    if total.denominator != 1:
        raise ValueError("side supports must sum to a whole number of districts")
    districts = total.numerator
    _check_oracle_size(districts, max_districts)
    opp_units = _support_units(opponent_support, granularity)
    worst = districts
    for allocation in _allocations(opp_units, districts, granularity):
        held = sum(1 for u in allocation if 2 * u < granularity)
        worst = min(worst, held)
    return worst

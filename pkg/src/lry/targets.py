"""Geometric fairness targets.

The geometric target for a party is the average of its best case (it
districts the whole state) and worst case (the opponent does).  The k-split
variant restricts both cases to plans where every district stays on one side
of the k-split.  Both are exact half-integers, kept as Fractions so bound
checks stay exact.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .model import Party, SplitProfile, ensure_valid, left, right
from .strategy import total_wins


def geometric_target(profile: SplitProfile, party: Party) -> Fraction:
    ensure_valid(profile)
    doubled = 2 * (profile.total_a if party is Party.A else profile.total_b)
    if doubled == profile.n:
        # Unreachable on a valid profile; the convention bans exact ties.
        raise ValueError("geometric target undefined at an exact statewide tie")
    if doubled > profile.n:
        return Fraction(math.ceil(doubled), 2)
    return Fraction(math.floor(doubled), 2)


def k_split_target(profile: SplitProfile, party: Party, k: int) -> Fraction:
    return Fraction(
        total_wins(profile, party, left(k)) + total_wins(profile, party, right(k)), 2
    )

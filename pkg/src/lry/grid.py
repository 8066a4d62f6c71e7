"""Districting on a square grid under contiguity and compactness constraints.

Each cell is an indivisible unit of population; a district is a set of
exactly ``d`` cells that is 4-connected, has no holes, and fits inside a
z-by-z axis-aligned square with z = floor(2 * sqrt(d)).  A party wins a
district only with a strict majority of its cells' support; a district at
exactly half counts for nobody.

The banded construction built here drives the protocol toward a coin flip
whose losing candidates fall arbitrarily far below the geometric target as
the band count grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterator, Sequence

from .model import Party, Side, parse_ratio, ratio_str
from .protocol import (
    Assignment,
    CoinFlipCandidate,
    OutcomeKind,
    Preference,
    PreferenceTable,
    ProtocolRun,
    classify_outcome,
    run_to_dict,
)

Cell = tuple[int, int]  # (row, column), 1-indexed from the top-left
District = frozenset[Cell]
DistrictPlan = tuple[District, ...]


class GridError(ValueError):
    pass


def compactness_bound(d: int) -> int:
    """Side of the smallest bounding square allowed for a d-cell district:
    floor(2 * sqrt(d)), computed exactly as isqrt(4d)."""
    if d < 1:
        raise GridError(f"district size must be positive, got {d}")
    return math.isqrt(4 * d)


@dataclass(frozen=True)
class GridState:
    """An m-by-m grid of per-cell support for party A, districted in blocks
    of exactly ``d`` cells."""

    m: int
    d: int
    cells: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self):
        if self.m < 1:
            raise GridError(f"grid side must be positive, got {self.m}")
        if self.d < 1:
            raise GridError(f"district size must be positive, got {self.d}")
        if (self.m * self.m) % self.d != 0:
            raise GridError(f"district size {self.d} does not divide {self.m}^2 cells")
        if self.z * self.z < self.d:
            raise GridError(
                f"a {self.d}-cell district cannot fit in a {self.z}x{self.z} square"
            )
        if len(self.cells) != self.m or any(len(row) != self.m for row in self.cells):
            raise GridError(f"cell array is not {self.m}x{self.m}")
        for i, row in enumerate(self.cells, start=1):
            for j, value in enumerate(row, start=1):
                if not 0 <= value <= 1:
                    raise GridError(
                        f"cell ({i},{j}) support {ratio_str(value)} outside [0, 1]"
                    )

    @property
    def z(self) -> int:
        return compactness_bound(self.d)

    @property
    def district_count(self) -> int:
        return (self.m * self.m) // self.d

    def support(self, cell: Cell) -> Fraction:
        return self.cells[cell[0] - 1][cell[1] - 1]

    def all_cells(self) -> frozenset[Cell]:
        return frozenset(
            (i, j) for i in range(1, self.m + 1) for j in range(1, self.m + 1)
        )


def _neighbors(cell: Cell) -> tuple[Cell, ...]:
    i, j = cell
    return ((i - 1, j), (i + 1, j), (i, j - 1), (i, j + 1))


def _is_connected(cells: frozenset[Cell]) -> bool:
    if not cells:
        return True
    seen = set()
    stack = [next(iter(cells))]
    while stack:
        cur = stack.pop()
        if cur in seen:
            continue
        seen.add(cur)
        stack.extend(nb for nb in _neighbors(cur) if nb in cells and nb not in seen)
    return len(seen) == len(cells)


def _has_hole(cells: frozenset[Cell]) -> bool:
    """True when some complement component is trapped inside the district.

    Flood the complement of the district from just outside its bounding box;
    complement cells inside the box that stay unreached are enclosed.
    """
    if not cells:
        return False
    rows = [c[0] for c in cells]
    cols = [c[1] for c in cells]
    r0, r1 = min(rows) - 1, max(rows) + 1
    c0, c1 = min(cols) - 1, max(cols) + 1
    outside = set()
    stack = [(r0, c0)]
    while stack:
        cur = stack.pop()
        if cur in outside or cur in cells:
            continue
        i, j = cur
        if not (r0 <= i <= r1 and c0 <= j <= c1):
            continue
        outside.add(cur)
        stack.extend(_neighbors(cur))
    box_area = (r1 - r0 + 1) * (c1 - c0 + 1)
    return len(outside) + len(cells) < box_area


def _bounding_box(cells: frozenset[Cell]) -> tuple[int, int]:
    rows = [c[0] for c in cells]
    cols = [c[1] for c in cells]
    return max(rows) - min(rows) + 1, max(cols) - min(cols) + 1


@dataclass(frozen=True)
class PlanViolation:
    district: int | None  # index into the plan, or None for plan-level issues
    message: str


def _district_violations(
    grid: GridState, index: int, cells: frozenset[Cell]
) -> Iterator[PlanViolation]:
    if len(cells) != grid.d:
        yield PlanViolation(index, f"district {index} has {len(cells)} cells, not {grid.d}")
    bad = [c for c in cells if not (1 <= c[0] <= grid.m and 1 <= c[1] <= grid.m)]
    if bad:
        yield PlanViolation(index, f"district {index} leaves the grid at {sorted(bad)}")
        return
    if not _is_connected(cells):
        yield PlanViolation(index, f"district {index} is not connected")
        return
    if _has_hole(cells):
        yield PlanViolation(index, f"district {index} encloses a hole")
    height, width = _bounding_box(cells)
    if height > grid.z or width > grid.z:
        yield PlanViolation(
            index,
            f"district {index} spans {height}x{width}, exceeding {grid.z}x{grid.z}",
        )


def validate_plan(
    grid: GridState, plan: Sequence[frozenset[Cell]], region: frozenset[Cell] | None = None
) -> tuple[PlanViolation, ...]:
    """Check that ``plan`` partitions ``region`` (the whole grid by default)
    into valid districts.  Violations are data, not exceptions."""
    if region is None:
        region = grid.all_cells()
    violations: list[PlanViolation] = []
    claimed: dict[Cell, int] = {}
    for index, district in enumerate(plan):
        for cell in district:
            if cell in claimed:
                violations.append(
                    PlanViolation(
                        index,
                        f"cell {cell} appears in districts {claimed[cell]} and {index}",
                    )
                )
            claimed[cell] = index
        violations.extend(_district_violations(grid, index, frozenset(district)))
    missing = region - set(claimed)
    if missing:
        violations.append(
            PlanViolation(None, f"{len(missing)} cell(s) uncovered, e.g. {min(missing)}")
        )
    extra = set(claimed) - region
    if extra:
        violations.append(
            PlanViolation(None, f"{len(extra)} cell(s) outside the region, e.g. {min(extra)}")
        )
    return tuple(violations)


def ensure_valid_plan(
    grid: GridState, plan: Sequence[frozenset[Cell]], region: frozenset[Cell] | None = None
) -> None:
    violations = validate_plan(grid, plan, region)
    if violations:
        raise GridError("; ".join(v.message for v in violations))


def district_support(grid: GridState, district: frozenset[Cell], party: Party) -> Fraction:
    total = sum((grid.support(cell) for cell in district), Fraction(0))
    return total if party is Party.A else len(district) - total


def count_wins(
    grid: GridState,
    plan: Sequence[frozenset[Cell]],
    party: Party,
    region: frozenset[Cell] | None = None,
) -> int:
    """Districts where ``party`` holds strictly more than half the support."""
    ensure_valid_plan(grid, plan, region)
    return sum(
        1 for district in plan if 2 * district_support(grid, district, party) > len(district)
    )


# --- exhaustive plan search -------------------------------------------------

DEFAULT_BRUTEFORCE_CAP = 16


def _connected_districts_with(
    anchor: Cell, available: frozenset[Cell], d: int
) -> Iterator[frozenset[Cell]]:
    """Every d-cell connected subset of ``available`` containing ``anchor``."""
    if d == 1:
        yield frozenset((anchor,))
        return
    others = sorted(available - {anchor})
    for combo in combinations(others, d - 1):
        candidate = frozenset(combo) | {anchor}
        if _is_connected(candidate):
            yield candidate


def enumerate_region_plans(
    grid: GridState, region: frozenset[Cell]
) -> Iterator[DistrictPlan]:
    """Every partition of ``region`` into valid districts (order-normalized:
    each district is anchored at the smallest cell still unassigned)."""
    if len(region) % grid.d != 0:
        raise GridError(
            f"region of {len(region)} cells cannot split into {grid.d}-cell districts"
        )

    def recurse(remaining: frozenset[Cell]) -> Iterator[tuple[District, ...]]:
        if not remaining:
            yield ()
            return
        anchor = min(remaining)
        for district in _connected_districts_with(anchor, remaining, grid.d):
            if _has_hole(district):
                continue
            height, width = _bounding_box(district)
            if height > grid.z or width > grid.z:
                continue
            for rest in recurse(remaining - district):
                yield (district,) + rest

    yield from recurse(frozenset(region))


def max_wins_bruteforce(
    grid: GridState,
    region: frozenset[Cell],
    party: Party,
    cap: int = DEFAULT_BRUTEFORCE_CAP,
) -> int:
    """Best win count for ``party`` over every valid plan of ``region``.

    Exhaustive, so only for regions of at most ``cap`` cells.
    """
    if len(region) > cap:
        raise GridError(f"region of {len(region)} cells exceeds the cap of {cap}")
    if len(region) % grid.d != 0:
        raise GridError(
            f"region of {len(region)} cells cannot split into {grid.d}-cell districts"
        )
    best = 0
    for plan in enumerate_region_plans(grid, region):
        wins = sum(
            1
            for district in plan
            if 2 * district_support(grid, district, party) > len(district)
        )
        best = max(best, wins)
    return best


# --- banded construction ----------------------------------------------------
#
# For a band count D ("delta"): the grid is 20D x 20D with 100-cell districts
# (z = 20).  Band L covers rows 20(L-1)+1 .. 20L.  Party A holds support 1 in
# the first 10 columns of each band's first five rows plus column 1 of its
# sixth row: 51 cells per band, so any winning district must capture one
# band's cells entirely.  The split sequence severs every band group except
# the last, forcing a coin flip whose losing candidates give A nothing.

BAND = 20
GROUP_SUPPORT = 51


@dataclass(frozen=True)
class GridSplitSequence:
    """Nested splits, stored as the cells each split adds on the left."""

    increments: tuple[tuple[Cell, ...], ...]

    @property
    def split_count(self) -> int:
        return len(self.increments)

    def left_cells(self, k: int) -> frozenset[Cell]:
        if not 0 <= k <= self.split_count:
            raise ValueError(f"split index {k} out of range 0..{self.split_count}")
        cells: set[Cell] = set()
        for chunk in self.increments[:k]:
            cells.update(chunk)
        return frozenset(cells)

    def right_cells(self, k: int, universe: frozenset[Cell]) -> frozenset[Cell]:
        return universe - self.left_cells(k)


def _band_group(band: int) -> frozenset[Cell]:
    base = BAND * (band - 1)
    cells = {(base + i, j) for i in range(1, 6) for j in range(1, 11)}
    cells.add((base + 6, 1))
    return frozenset(cells)


def geodelta_groups(delta: int) -> tuple[frozenset[Cell], ...]:
    """The 51-cell support groups, one per band."""
    if delta < 1:
        raise GridError(f"delta must be at least 1, got {delta}")
    return tuple(_band_group(band) for band in range(1, delta + 1))


def make_geodelta(delta: int) -> tuple[GridState, GridSplitSequence]:
    """The banded grid together with its group-severing split sequence.

    Splits 1..delta-1 peel off 20-row strips of the first five columns (100
    cells each, cutting one group per strip); split ``delta`` adds the 10x10
    block holding the last group intact; later splits sweep the remaining
    cells row-major in 100-cell chunks.
    """
    if delta < 1:
        raise GridError(f"delta must be at least 1, got {delta}")
    m = BAND * delta
    one = Fraction(1)
    zero = Fraction(0)
    support = set()
    for group in geodelta_groups(delta):
        support.update(group)
    cells = tuple(
        tuple(one if (i, j) in support else zero for j in range(1, m + 1))
        for i in range(1, m + 1)
    )
    grid = GridState(m=m, d=100, cells=cells)

    increments: list[tuple[Cell, ...]] = []
    assigned: set[Cell] = set()
    for k in range(1, delta):
        base = BAND * (k - 1)
        strip = tuple(
            (base + i, j) for i in range(1, BAND + 1) for j in range(1, 6)
        )
        increments.append(strip)
        assigned.update(strip)
    base = BAND * (delta - 1)
    block = tuple((base + i, j) for i in range(1, 11) for j in range(1, 11))
    increments.append(block)
    assigned.update(block)
    remaining = [
        (i, j)
        for i in range(1, m + 1)
        for j in range(1, m + 1)
        if (i, j) not in assigned
    ]
    for start in range(0, len(remaining), grid.d):
        increments.append(tuple(remaining[start : start + grid.d]))
    return grid, GridSplitSequence(tuple(increments))


def side_group_counts(
    groups: Sequence[frozenset[Cell]], splits: GridSplitSequence
) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Per split index: how many groups lie wholly left, and wholly right.

    A group is wholly left once every one of its cells has been added, and
    wholly right until any of them has.
    """
    sizes = [len(g) for g in groups]
    membership: dict[Cell, int] = {}
    for idx, group in enumerate(groups):
        for cell in group:
            membership[cell] = idx
    seen = [0] * len(groups)
    wholly_left = [0]
    wholly_right = [len(groups)]
    untouched = len(groups)
    complete = 0
    for chunk in splits.increments:
        for cell in chunk:
            idx = membership.get(cell)
            if idx is None:
                continue
            if seen[idx] == 0:
                untouched -= 1
            seen[idx] += 1
            if seen[idx] == sizes[idx]:
                complete += 1
        wholly_left.append(complete)
        wholly_right.append(untouched)
    return tuple(wholly_left), tuple(wholly_right)


@lru_cache(maxsize=8)
def _geodelta_tables(delta: int):
    grid, splits = make_geodelta(delta)
    groups = geodelta_groups(delta)
    wholly_left, wholly_right = side_group_counts(groups, splits)
    return grid, splits, groups, wholly_left, wholly_right


def geodelta_side_wins(delta: int, k: int, side: Side, districter: Party) -> int:
    """Districts A can carry on one side of split ``k`` in the banded grid.

    Drawing the lines, A wins one district per support group lying wholly on
    its side; when B draws them it splits every group, leaving A nothing.
    B's wins are the side's district count minus this value.
    """
    _, splits, _, wholly_left, wholly_right = _geodelta_tables(delta)
    if not 0 <= k <= splits.split_count:
        raise ValueError(f"split index {k} out of range 0..{splits.split_count}")
    if districter is Party.B:
        return 0
    return wholly_left[k] if side is Side.LEFT else wholly_right[k]


def geodelta_total_wins(delta: int, k: int, party: Party, side: Side) -> int:
    """Total wins for ``party`` when it districts ``side`` of split ``k`` and
    the opponent districts the rest."""
    _, splits, _, wholly_left, wholly_right = _geodelta_tables(delta)
    if not 0 <= k <= splits.split_count:
        raise ValueError(f"split index {k} out of range 0..{splits.split_count}")
    a_total = (
        wholly_left[k]
        if side is Side.LEFT
        else wholly_right[k]
    )
    if party is Party.A:
        return a_total
    # Opposite side for A, complemented over all districts.
    a_other = wholly_right[k] if side is Side.LEFT else wholly_left[k]
    districts = splits.split_count
    return districts - a_other


def geodelta_winning_plan(delta: int) -> DistrictPlan:
    """A plan achieving one win per band for A: the aligned 10x10 block
    tiling.  Each block is trivially connected, hole-free, and inside the
    20x20 compactness square."""
    if delta < 1:
        raise GridError(f"delta must be at least 1, got {delta}")
    m = BAND * delta
    plan = []
    for bi in range(0, m, 10):
        for bj in range(0, m, 10):
            plan.append(
                frozenset(
                    (bi + i, bj + j) for i in range(1, 11) for j in range(1, 11)
                )
            )
    return tuple(plan)


@dataclass(frozen=True)
class GeodeltaReport:
    delta: int
    m: int
    d: int
    districts: int
    total_support_a: int
    target_a: Fraction       # best/worst average under the grid constraints
    run: ProtocolRun
    worst_wins_a: int
    worst_gap_a: Fraction
    unconstrained_bound: Fraction
    gap_exceeds_unconstrained_bound: bool


def geodelta_report(delta: int, seed: int) -> GeodeltaReport:
    """Run the protocol on the banded grid and measure the gap to the target.

    Preferences come from the constrained win counts; the crossing lands at
    (delta-1, delta) and the four candidates give A (0, 1, 1, 0) wins, so the
    worst candidate sits delta/2 below A's geometric target.  Past delta 4
    that gap breaks the bound that holds without geometric constraints.
    """
    grid, splits, groups, wholly_left, wholly_right = _geodelta_tables(delta)
    districts = splits.split_count
    pairs = []
    for k in range(districts + 1):
        a_left_total = wholly_left[k]
        a_right_total = wholly_right[k]
        pref_a = (
            Preference.OPTION1
            if a_left_total > a_right_total
            else Preference.OPTION2
            if a_left_total < a_right_total
            else Preference.INDIFFERENT
        )
        b_right_total = districts - a_left_total
        b_left_total = districts - a_right_total
        pref_b = (
            Preference.OPTION1
            if b_right_total > b_left_total
            else Preference.OPTION2
            if b_right_total < b_left_total
            else Preference.INDIFFERENT
        )
        pairs.append((pref_a, pref_b))
    prefs = PreferenceTable(tuple(pairs))
    kind, trigger = classify_outcome(prefs)
    if kind is not OutcomeKind.COIN_FLIP:
        raise GridError(f"expected a coin flip, protocol settled with {kind.value}")
    candidates = []
    for split in (trigger - 1, trigger):
        for option in (Preference.OPTION1, Preference.OPTION2):
            side = Side.LEFT if option is Preference.OPTION1 else Side.RIGHT
            wins_a = geodelta_total_wins(delta, split, Party.A, side)
            candidates.append(
                CoinFlipCandidate(Assignment(split, option), wins_a, districts - wins_a)
            )
    chosen = candidates[seed % 4]
    run = ProtocolRun(
        outcome=OutcomeKind.COIN_FLIP,
        trigger_k=trigger,
        assignment=chosen.assignment,
        wins_a=chosen.wins_a,
        wins_b=chosen.wins_b,
        candidates=tuple(candidates),
        seed=seed,
    )
    # Best case for A is one district per band; worst is none, so the target
    # is delta/2 under the constraints.
    target_a = Fraction(delta, 2)
    worst_wins = min(c.wins_a for c in candidates)
    worst_gap = target_a - worst_wins
    bound = Fraction(2)
    return GeodeltaReport(
        delta=delta,
        m=grid.m,
        d=grid.d,
        districts=districts,
        total_support_a=GROUP_SUPPORT * delta,
        target_a=target_a,
        run=run,
        worst_wins_a=worst_wins,
        worst_gap_a=worst_gap,
        unconstrained_bound=bound,
        gap_exceeds_unconstrained_bound=worst_gap > bound,
    )


# --- shrunk analogue --------------------------------------------------------


def make_shrunk_analogue() -> tuple[GridState, GridSplitSequence, tuple[frozenset[Cell], ...]]:
    """A 4x4, d=4 miniature of the banded construction, small enough to
    brute-force: two 2-row bands, each with a 3-cell group in its first row
    (columns 1..3), severed by a 2x2 strip and completed later.  Used to
    cross-check the analytic group counting against exhaustive search."""
    m, d = 4, 4
    groups = (
        frozenset({(1, 1), (1, 2), (1, 3)}),
        frozenset({(3, 1), (3, 2), (3, 3)}),
    )
    support = groups[0] | groups[1]
    cells = tuple(
        tuple(Fraction(1) if (i, j) in support else Fraction(0) for j in range(1, m + 1))
        for i in range(1, m + 1)
    )
    grid = GridState(m=m, d=d, cells=cells)
    increments = [
        ((1, 1), (1, 2), (2, 1), (2, 2)),  # strip: severs group 1
        ((3, 1), (3, 2), (3, 3), (3, 4)),  # block: contains group 2 whole
    ]
    assigned = {c for chunk in increments for c in chunk}
    remaining = [
        (i, j) for i in range(1, m + 1) for j in range(1, m + 1) if (i, j) not in assigned
    ]
    for start in range(0, len(remaining), d):
        increments.append(tuple(remaining[start : start + d]))
    return grid, GridSplitSequence(tuple(increments)), groups


# --- serialization ----------------------------------------------------------


def grid_to_dict(grid: GridState) -> dict:
    return {
        "m": grid.m,
        "d": grid.d,
        "cells": [[ratio_str(v) for v in row] for row in grid.cells],
    }


def grid_from_dict(doc: object) -> GridState:
    if not isinstance(doc, dict):
        raise GridError("grid document must be a JSON object")
    for field in ("m", "d", "cells"):
        if field not in doc:
            raise GridError(f"grid field '{field}' is missing")
    m, d, rows = doc["m"], doc["d"], doc["cells"]
    if not isinstance(m, int) or not isinstance(d, int):
        raise GridError("grid fields 'm' and 'd' must be integers")
    if not isinstance(rows, list):
        raise GridError("grid field 'cells' must be a list of rows")
    cells = tuple(tuple(parse_ratio(v) for v in row) for row in rows)
    return GridState(m=m, d=d, cells=cells)


def plan_to_list(plan: Sequence[frozenset[Cell]]) -> list:
    return [[list(cell) for cell in sorted(district)] for district in plan]


def plan_from_list(doc: object) -> DistrictPlan:
    if not isinstance(doc, list):
        raise GridError("plan document must be a list of districts")
    plan = []
    for district in doc:
        plan.append(frozenset((int(r), int(c)) for r, c in district))
    return tuple(plan)


def splits_to_list(splits: GridSplitSequence) -> list:
    return [[list(cell) for cell in chunk] for chunk in splits.increments]


def splits_from_list(doc: object) -> GridSplitSequence:
    if not isinstance(doc, list):
        raise GridError("split document must be a list of cell lists")
    return GridSplitSequence(
        tuple(tuple((int(r), int(c)) for r, c in chunk) for chunk in doc)
    )


def geodelta_report_to_dict(report: GeodeltaReport) -> dict:
    gap = report.worst_gap_a
    summary = (
        f"worst candidate {report.worst_wins_a} wins,"
        f" geo {ratio_str(report.target_a)}, gap {ratio_str(gap)}"
        f" {'>' if report.gap_exceeds_unconstrained_bound else '<='}"
        f" {ratio_str(report.unconstrained_bound)}"
    )
    return {
        "delta": report.delta,
        "m": report.m,
        "d": report.d,
        "districts": report.districts,
        "totalSupportA": str(report.total_support_a),
        "geoA": ratio_str(report.target_a),
        "run": run_to_dict(report.run),
        "worstWinsA": report.worst_wins_a,
        "worstGapA": ratio_str(gap),
        "unconstrainedBound": ratio_str(report.unconstrained_bound),
        "gapExceedsUnconstrainedBound": report.gap_exceeds_unconstrained_bound,
        "summary": summary,
    }

"""Domain types for two-party district splitting.

A state with ``n`` equal-population districts is described by the support
party A holds in each of the ``n`` population segments between consecutive
nested splits.  All supports are exact rationals; nothing in this package
ever rounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property


class Party(Enum):
    A = "A"
    B = "B"

    @property
    def opponent(self) -> "Party":
        return Party.B if self is Party.A else Party.A


class Side(Enum):
    LEFT = "L"
    RIGHT = "R"


class FormatError(ValueError):
    """Malformed ratio string or profile document."""


class ProfileError(ValueError):
    """An operation was handed a profile that fails validation."""

    def __init__(self, violations: tuple["Violation", ...]):
        self.violations = violations
        detail = "; ".join(v.message for v in violations)
        super().__init__(f"invalid profile: {detail}")


def parse_ratio(value: str | int) -> Fraction:
    """Parse a decimal string ("1.9"), a fraction string ("19/10"), or an int.

    Floats are rejected: binary floats are inexact and would silently break
    the exactness guarantee.
    """
    if isinstance(value, bool):
        raise FormatError(f"not a ratio: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise FormatError(
            f"floats are inexact; write {value!r} as a string like '0.38' or '19/50'"
        )
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"not a valid ratio: {value!r}") from exc
    raise FormatError(f"cannot parse a ratio from {type(value).__name__}")


def ratio_str(value: Fraction | int) -> str:
    """Render an exact value as "p" or "p/q" in lowest terms."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def is_half_integer(value: Fraction) -> bool:
    """True when ``value`` is an integer multiple of 1/2 (0 included)."""
    return (2 * value).denominator == 1


@dataclass(frozen=True)
class SideRef:
    """One side of the k-split: the left region holds k districts' worth of
    population, the right region the remaining n - k."""

    side: Side
    k: int

    def opposite(self) -> "SideRef":
        other = Side.RIGHT if self.side is Side.LEFT else Side.LEFT
        return SideRef(other, self.k)

    def district_count(self, n: int) -> int:
        return self.k if self.side is Side.LEFT else n - self.k


def left(k: int) -> SideRef:
    return SideRef(Side.LEFT, k)


def right(k: int) -> SideRef:
    return SideRef(Side.RIGHT, k)


@dataclass(frozen=True)
class Violation:
    """One failed profile invariant; ``side``/``k`` locate the offending sum."""

    side: Side | None
    k: int | None
    message: str


@dataclass(frozen=True)
class SplitProfile:
    """Per-segment supports for party A over a state of ``n`` districts.

    ``segments_a[k-1]`` is A's support between the (k-1)- and k-splits, a
    value in [0, 1].  B's support in the same segment is the complement.
    Storing segments rather than running sums makes the splits nested by
    construction.
    """

    n: int
    segments_a: tuple[Fraction, ...]

    @cached_property
    def prefix_a(self) -> tuple[Fraction, ...]:
        """A's support left of each split: prefix_a[k] covers segments 1..k."""
        sums = [Fraction(0)]
        for seg in self.segments_a:
            sums.append(sums[-1] + seg)
        return tuple(sums)

    @property
    def total_a(self) -> Fraction:
        return self.prefix_a[-1]

    @property
    def total_b(self) -> Fraction:
        return self.n - self.total_a

    @cached_property
    def violations(self) -> tuple[Violation, ...]:
        return tuple(_check(self))

    @property
    def is_valid(self) -> bool:
        return not self.violations


def _check(profile: SplitProfile):
    if profile.n < 1:
        yield Violation(None, None, f"n must be positive, got {profile.n}")
        return
    if len(profile.segments_a) != profile.n:
        yield Violation(
            None,
            None,
            f"expected {profile.n} segments, got {len(profile.segments_a)}",
        )
        return
    for k, seg in enumerate(profile.segments_a, start=1):
        if not 0 <= seg <= 1:
            yield Violation(
                None, k, f"segment {k} support {ratio_str(seg)} outside [0, 1]"
            )
    prefix = profile.prefix_a
    total = prefix[-1]
    # Cumulative sums may never be integer multiples of 1/2; only the empty
    # sides (left of split 0, right of split n) are exempt.
    for k in range(1, profile.n + 1):
        if is_half_integer(prefix[k]):
            yield Violation(
                Side.LEFT,
                k,
                f"support left of split {k} is {ratio_str(prefix[k])},"
                " an integer multiple of 1/2",
            )
    for k in range(profile.n):
        suffix = total - prefix[k]
        if is_half_integer(suffix):
            yield Violation(
                Side.RIGHT,
                k,
                f"support right of split {k} is {ratio_str(suffix)},"
                " an integer multiple of 1/2",
            )


def validate_profile(profile: SplitProfile) -> tuple[Violation, ...]:
    """Return every invariant violation; an empty tuple means the profile is ok."""
    return profile.violations


def ensure_valid(profile: SplitProfile) -> None:
    if profile.violations:
        raise ProfileError(profile.violations)


def _check_split_index(profile: SplitProfile, k: int) -> None:
    if not 0 <= k <= profile.n:
        raise ValueError(f"split index {k} out of range 0..{profile.n}")


def side_support(profile: SplitProfile, party: Party, side: SideRef) -> Fraction:
    """Total support for ``party`` on one side of the k-split."""
    _check_split_index(profile, side.k)
    a_left = profile.prefix_a[side.k]
    if side.side is Side.LEFT:
        return a_left if party is Party.A else side.k - a_left
    a_right = profile.total_a - a_left
    return a_right if party is Party.A else (profile.n - side.k) - a_right


def segment_support(profile: SplitProfile, party: Party, k: int) -> Fraction:
    """Support for ``party`` in the segment between the (k-1)- and k-splits."""
    if not 1 <= k <= profile.n:
        raise ValueError(f"segment index {k} out of range 1..{profile.n}")
    seg = profile.segments_a[k - 1]
    return seg if party is Party.A else 1 - seg


def profile_to_dict(profile: SplitProfile) -> dict:
    return {"n": profile.n, "segments_a": [ratio_str(s) for s in profile.segments_a]}


def profile_from_dict(doc: object) -> SplitProfile:
    """Build a profile from the ``{"n": ..., "segments_a": [...]}`` document."""
    if not isinstance(doc, dict):
        raise FormatError("profile document must be a JSON object")
    unknown = set(doc) - {"n", "segments_a"}
    if unknown:
        raise FormatError(f"unknown profile field(s): {', '.join(sorted(unknown))}")
    if "n" not in doc:
        raise FormatError("profile field 'n' is missing")
    if "segments_a" not in doc:
        raise FormatError("profile field 'segments_a' is missing")
    n = doc["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise FormatError(f"profile field 'n' must be a positive integer, got {n!r}")
    raw = doc["segments_a"]
    if not isinstance(raw, list):
        raise FormatError("profile field 'segments_a' must be a list")
    segments = []
    for idx, entry in enumerate(raw, start=1):
        try:
            segments.append(parse_ratio(entry))
        except FormatError as exc:
            raise FormatError(f"segments_a[{idx}]: {exc}") from exc
    return SplitProfile(n, tuple(segments))


def two_gap_profile() -> SplitProfile:
    """Built-in ten-district profile whose optimal play ends in a coin flip
    between the 5- and 6-splits, with a worst candidate two districts below
    the geometric target.

    A holds 1.9 left of split 5, 0.9 in segment 6, and 1.4 right of split 6;
    the tail segments are uneven so no cumulative sum lands on a half-integer.
    """
    segs = [Fraction("0.38")] * 5 + [
        Fraction("0.9"),
        Fraction("0.32"),
        Fraction("0.34"),
        Fraction("0.36"),
        Fraction("0.38"),
    ]
    return SplitProfile(10, tuple(segs))

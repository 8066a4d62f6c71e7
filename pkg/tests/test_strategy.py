import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lry import model, strategy
from lry.model import Party, SplitProfile, left, right
from lry.protocol import mix_seed, random_profile


@pytest.fixture
def two_gap():
    return model.two_gap_profile()


class TestDistrictingWins:
    def test_minority_packs_three_of_five(self, two_gap):
        # A holds 1.9 of the 5 left districts
        assert strategy.wins_when_districting(two_gap, Party.A, left(5)) == 3

    def test_larger_left_side(self, two_gap):
        assert strategy.wins_when_districting(two_gap, Party.A, left(6)) == 5

    def test_majority_sweeps_side(self):
        profile = SplitProfile(3, (Fraction("0.8"), Fraction("0.9"), Fraction("0.9")))
        assert model.validate_profile(profile) == ()
        # 2.6 of 3: a statewide majority wins every district it draws
        assert strategy.wins_when_districting(profile, Party.A, left(3)) == 3

    def test_matches_enumeration_on_small_side(self):
        # 1.3 of 3 districts at twentieth granularity
        support = Fraction("1.3")
        assert strategy.optimal_wins(support, 3) == 2
        assert strategy.bruteforce_districting_wins(support, 3) == 2

    def test_invalid_profile_refused(self):
        bad = SplitProfile(2, (Fraction(1, 4), Fraction(1, 4)))
        with pytest.raises(model.ProfileError):
            strategy.wins_when_districting(bad, Party.A, left(1))


class TestOpponentWins:
    def test_opponent_majority_erases(self, two_gap):
        # B outweighs A 2.6 to 1.4 on the right of split 6
        assert strategy.wins_when_opponent_districts(two_gap, Party.A, right(6)) == 0

    def test_leftover_seats_survive(self, two_gap):
        assert strategy.wins_when_opponent_districts(two_gap, Party.B, left(5)) == 2

    def test_minority_gets_nothing(self):
        assert strategy.opponent_wins(Fraction(1, 3), Fraction(2, 3)) == 0


class TestTotalWins:
    def test_example_totals(self, two_gap):
        assert strategy.total_wins(two_gap, Party.A, left(5)) == 3
        assert strategy.total_wins(two_gap, Party.A, right(5)) == 4
        assert strategy.total_wins(two_gap, Party.A, left(6)) == 5
        assert strategy.total_wins(two_gap, Party.A, right(6)) == 2

    def test_full_state_side(self, two_gap):
        n = two_gap.n
        expected = strategy.optimal_wins(two_gap.total_a, n)
        assert strategy.total_wins(two_gap, Party.A, left(n)) == expected

    def test_conservation(self, two_gap):
        n = two_gap.n
        for k in range(n + 1):
            assert (
                strategy.total_wins(two_gap, Party.A, left(k))
                + strategy.total_wins(two_gap, Party.B, right(k))
                == n
            )


@given(
    st.integers(1, 12),
    st.fractions(min_value=0, max_value=12, max_denominator=100),
)
def test_win_identity(size, x):
    """The districter's wins plus the shut-out opponent's wins fill the side."""
    x = min(x, Fraction(size))
    y = size - x
    assert strategy.optimal_wins(x, size) + strategy.opponent_wins(y, x) == size


@settings(deadline=None, max_examples=40)
@given(st.integers(0, 2**32))
def test_step_bounds_on_random_profiles(seed):
    """Adding one segment moves each win count by a bounded step whose range
    depends on which party carries the segment."""
    rng = random.Random(mix_seed(seed, 0))
    profile = random_profile(rng, 8)
    half = Fraction(1, 2)
    for party in Party:
        for k in range(1, profile.n + 1):
            seg = model.segment_support(profile, party, k)
            d_step = strategy.wins_when_districting(
                profile, party, left(k)
            ) - strategy.wins_when_districting(profile, party, left(k - 1))
            o_step = strategy.wins_when_opponent_districts(
                profile, party, right(k)
            ) - strategy.wins_when_opponent_districts(profile, party, right(k - 1))
            if seg < half:
                assert 0 <= d_step <= 1
                assert 0 <= o_step <= 1
            elif seg > half:
                assert 1 <= d_step <= 2
                assert -1 <= o_step <= 0
            lhs = strategy.total_wins(profile, party, left(k - 1))
            rhs = strategy.total_wins(profile, party, left(k))
            assert lhs <= rhs <= lhs + 2
            r_new = strategy.total_wins(profile, party, right(k))
            r_old = strategy.total_wins(profile, party, right(k - 1))
            assert r_new <= r_old <= r_new + 2


class TestBruteforceOracle:
    def test_rejects_large_sides(self):
        with pytest.raises(ValueError):
            strategy.bruteforce_districting_wins(Fraction(1), 5)

    def test_rejects_off_grid_support(self):
        with pytest.raises(ValueError):
            strategy.bruteforce_districting_wins(Fraction(1, 3), 2)

    def test_custom_granularity(self):
        assert strategy.bruteforce_districting_wins(Fraction(3, 4), 1, granularity=4) == 1

    def test_opponent_requires_integral_side(self):
        with pytest.raises(ValueError):
            strategy.bruteforce_opponent_wins(Fraction(1, 4), Fraction(1, 2))

    def test_exhaustive_agreement_sample(self):
        for size in (1, 2, 3):
            for units in range(0, 20 * size + 1, 3):
                if (2 * units) % 20 == 0:
                    continue
                x = Fraction(units, 20)
                assert strategy.bruteforce_districting_wins(x, size) == strategy.optimal_wins(
                    x, size
                )
                assert strategy.bruteforce_opponent_wins(
                    x, size - x
                ) == strategy.opponent_wins(x, size - x)

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from lry import model
from lry.model import Party, Side, SplitProfile, left, right


def frac(text):
    return Fraction(text)


class TestParseRatio:
    def test_decimal_and_fraction_forms_agree(self):
        assert model.parse_ratio("1.9") == model.parse_ratio("19/10") == Fraction(19, 10)

    def test_int_accepted(self):
        assert model.parse_ratio(3) == Fraction(3)

    @pytest.mark.parametrize("bad", ["", "abc", "1/0", "1.2.3"])
    def test_garbage_rejected(self, bad):
        with pytest.raises(model.FormatError):
            model.parse_ratio(bad)

    def test_float_rejected(self):
        with pytest.raises(model.FormatError):
            model.parse_ratio(0.38)

    @given(st.fractions())
    def test_roundtrip(self, value):
        assert model.parse_ratio(model.ratio_str(value)) == value

    @given(st.integers(0, 10**6), st.integers(1, 6))
    def test_decimal_strings_are_exact(self, digits, places):
        raw = str(digits).rjust(places + 1, "0")
        text = raw[:-places] + "." + raw[-places:]
        assert model.parse_ratio(text) == Fraction(digits, 10**places)


def test_is_half_integer():
    assert model.is_half_integer(Fraction(1, 2))
    assert model.is_half_integer(Fraction(3))
    assert model.is_half_integer(Fraction(0))
    assert not model.is_half_integer(Fraction(19, 10))


def test_party_opponent_involution():
    for party in Party:
        assert party.opponent.opponent is party


def test_side_ref_counts_and_opposite():
    ref = left(3)
    assert ref.district_count(10) == 3
    assert ref.opposite() == right(3)
    assert right(3).district_count(10) == 7
    assert ref.opposite().opposite() == ref


class TestValidation:
    def test_two_gap_profile_is_valid(self):
        profile = model.two_gap_profile()
        assert model.validate_profile(profile) == ()
        assert model.side_support(profile, Party.A, left(5)) == frac("1.9")
        assert model.segment_support(profile, Party.A, 6) == frac("0.9")
        assert model.side_support(profile, Party.A, right(6)) == frac("1.4")

    def test_half_integer_prefix_reported(self):
        profile = SplitProfile(2, (frac("0.25"), frac("0.25")))
        violations = model.validate_profile(profile)
        assert any(v.side is Side.LEFT and v.k == 2 for v in violations)

    def test_all_sums_clean(self):
        profile = SplitProfile(3, (frac("0.3"), frac("0.3"), frac("0.3")))
        # prefixes 0.3, 0.6, 0.9 and suffixes 0.6, 0.3: nothing half-integer
        assert model.validate_profile(profile) == ()

    def test_segment_outside_unit_interval(self):
        profile = SplitProfile(2, (frac("1.2"), frac("-0.1")))
        messages = [v.message for v in model.validate_profile(profile)]
        assert any("outside [0, 1]" in m for m in messages)

    def test_segment_count_mismatch(self):
        profile = SplitProfile(3, (frac("0.3"),))
        assert model.validate_profile(profile)

    def test_ensure_valid_raises(self):
        profile = SplitProfile(2, (frac("0.25"), frac("0.25")))
        with pytest.raises(model.ProfileError):
            model.ensure_valid(profile)


class TestSupports:
    def test_empty_side_is_zero(self):
        profile = model.two_gap_profile()
        assert model.side_support(profile, Party.A, left(0)) == 0
        assert model.side_support(profile, Party.B, right(profile.n)) == 0

    def test_b_side_support_from_example(self):
        profile = model.two_gap_profile()
        assert model.side_support(profile, Party.B, right(6)) == frac("2.6")
        assert model.side_support(profile, Party.B, left(5)) == frac("3.1")

    def test_segment_complement(self):
        profile = model.two_gap_profile()
        for k in range(1, profile.n + 1):
            a = model.segment_support(profile, Party.A, k)
            b = model.segment_support(profile, Party.B, k)
            assert a + b == 1

    def test_side_totals_are_exact(self):
        profile = model.two_gap_profile()
        for k in range(profile.n + 1):
            for party in Party:
                total = model.side_support(profile, party, left(k)) + model.side_support(
                    profile, party, right(k)
                )
                assert total == (profile.total_a if party is Party.A else profile.total_b)
            a = model.side_support(profile, Party.A, left(k))
            b = model.side_support(profile, Party.B, left(k))
            assert a + b == k

    def test_prefix_differences_recover_segments(self):
        profile = model.two_gap_profile()
        for k in range(1, profile.n + 1):
            diff = model.side_support(profile, Party.A, left(k)) - model.side_support(
                profile, Party.A, left(k - 1)
            )
            assert diff == model.segment_support(profile, Party.A, k)

    def test_out_of_range_indices(self):
        profile = model.two_gap_profile()
        with pytest.raises(ValueError):
            model.side_support(profile, Party.A, left(11))
        with pytest.raises(ValueError):
            model.segment_support(profile, Party.A, 0)


segments_strategy = st.lists(
    st.fractions(min_value=0, max_value=1, max_denominator=12), min_size=1, max_size=8
)


@given(segments_strategy)
def test_side_support_additivity_random(segs):
    profile = SplitProfile(len(segs), tuple(segs))
    for k in range(profile.n + 1):
        for party in Party:
            assert model.side_support(profile, party, left(k)) + model.side_support(
                profile, party, right(k)
            ) == (profile.total_a if party is Party.A else profile.total_b)


class TestProfileJson:
    def test_roundtrip(self):
        profile = model.two_gap_profile()
        doc = model.profile_to_dict(profile)
        assert model.profile_from_dict(doc) == profile

    def test_accepts_decimal_strings(self):
        doc = {"n": 2, "segments_a": ["0.3", "3/10"]}
        profile = model.profile_from_dict(doc)
        assert profile.segments_a == (frac("0.3"), frac("0.3"))

    @pytest.mark.parametrize(
        "doc, needle",
        [
            ({"segments_a": []}, "'n'"),
            ({"n": 2}, "'segments_a'"),
            ({"n": 0, "segments_a": []}, "'n'"),
            ({"n": 2, "segments_a": "0.3"}, "list"),
            ({"n": 2, "segments_a": ["0.3", "bogus"]}, "segments_a[2]"),
            ({"n": 2, "segments_a": ["0.3", "0.3"], "extra": 1}, "extra"),
            ([1, 2], "object"),
        ],
    )
    def test_schema_errors_name_the_field(self, doc, needle):
        with pytest.raises(model.FormatError, match=None) as err:
            model.profile_from_dict(doc)
        assert needle in str(err.value)

import pytest

from hockey_apm.shift_model import (
    PlayerNotFoundError,
    Position,
    Shift,
    linemate_summary,
)


class TestShift:
    def test_rosters_sorted_for_determinism(self):
        s = Shift("g", "s1", 30.0, 0, 0, ("c", "a", "b"), "gh", ("e", "d", "f"), "ga")
        assert s.home_skaters == ("a", "b", "c")
        assert s.onice == ("a", "b", "c", "gh", "d", "e", "f", "ga")

    def test_rejects_nonpositive_duration(self):
        with pytest.raises(ValueError, match="duration"):
            Shift("g", "s1", 0.0, 0, 0, ("a",), "gh", ("e",), "ga")

    def test_rejects_uneven_skater_counts(self):
        with pytest.raises(ValueError, match="uneven"):
            Shift("g", "s1", 30.0, 0, 0, ("a", "b"), "gh", ("e",), "ga")

    def test_rejects_missing_goalie(self):
        with pytest.raises(ValueError, match="goalie"):
            Shift("g", "s1", 30.0, 0, 0, ("a",), "", ("e",), "ga")

    def test_rejects_player_on_both_teams(self):
        with pytest.raises(ValueError, match="both teams"):
            Shift("g", "s1", 30.0, 0, 0, ("a", "b"), "gh", ("a", "c"), "ga")

    def test_rejects_duplicate_within_team(self):
        with pytest.raises(ValueError, match="duplicate"):
            Shift("g", "s1", 30.0, 0, 0, ("a", "a"), "gh", ("e", "f"), "ga")

    def test_rejects_negative_goals(self):
        with pytest.raises(ValueError, match="negative"):
            Shift("g", "s1", 30.0, -1, 0, ("a",), "gh", ("e",), "ga")


class TestPosition:
    def test_groups(self):
        assert Position.CENTER.group == "F"
        assert Position.LEFT_WING.group == "F"
        assert Position.RIGHT_WING.group == "F"
        assert Position.DEFENSE.group == "D"
        assert Position.GOALIE.group == "G"

    def test_skater_excludes_goalie(self):
        assert Position.DEFENSE.is_skater
        assert not Position.GOALIE.is_skater


class TestLinemateSummary:
    def test_three_shift_fixture_hand_enumerated(self, three_shifts):
        # Player a is on ice 200 s total. Shared seconds: b 40+60=100,
        # c 40+100=140, d 60+100=160, gh 200. Top three by fraction:
        # gh 1.0, d 0.8, c 0.7.
        top = linemate_summary("a", three_shifts, k=3)
        assert top == [("gh", 1.0), ("d", 0.8), ("c", 0.7)]

    def test_single_shift_fractions_are_one(self, three_shifts):
        # b appears only in shifts 1 and 2; g only in 1 and 3. Use a player
        # with exactly one shift: construct it.
        shift = three_shifts[0]
        top = linemate_summary("g", [shift], k=5)
        assert top == [("e", 1.0), ("f", 1.0), ("ga", 1.0)]

    def test_absent_player_raises(self, three_shifts):
        with pytest.raises(PlayerNotFoundError):
            linemate_summary("nobody", three_shifts)

    def test_fewer_than_k_is_not_an_error(self, three_shifts):
        top = linemate_summary("a", three_shifts, k=50)
        assert len(top) == 4  # b, c, d, gh and nobody else

    def test_tie_broken_by_player_id(self, three_shifts):
        # For b (shifts 1 and 2, 100 s) both a and gh share 100 s.
        top = linemate_summary("b", three_shifts, k=2)
        assert top == [("a", 1.0), ("gh", 1.0)]

    def test_fractions_within_unit_interval(self, three_shifts):
        for pid in ("a", "b", "c", "d", "e", "f", "g", "h", "gh", "ga"):
            for _, frac in linemate_summary(pid, three_shifts, k=10):
                assert 0.0 <= frac <= 1.0

    def test_total_shared_seconds_bounded_by_roster_size(self, three_shifts):
        # Sum of shared fractions can be at most (players per side - 1).
        for pid in ("a", "e", "gh"):
            fractions = [f for _, f in linemate_summary(pid, three_shifts, k=100)]
            assert sum(fractions) <= 3.0 + 1e-12

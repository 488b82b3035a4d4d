import pytest

from hockey_apm.ingest import (
    FilterReport,
    SchemaError,
    ShiftFileError,
    eligible_players,
    filter_shifts,
    parse_roster_file,
    parse_shift_file,
    write_roster_csv,
    write_shift_csv,
)
from hockey_apm.shift_model import Position, RawShiftRecord

HEADER = "game_id,season,duration_s,home_goals,away_goals,home_goalie,away_goalie,home_skaters,away_skaters"


def write(tmp_path, lines, name="shifts.csv"):
    path = tmp_path / name
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def raw(line_no=2, game_id="g1", season="s1", duration=40.0, hg=0, ag=0,
        home=("a", "b", "c", "d", "i"), hgoalie="gh",
        away=("e", "f", "g", "h", "j"), agoalie="ga"):
    return RawShiftRecord(line_no, game_id, season, duration, hg, ag,
                          tuple(home), hgoalie, tuple(away), agoalie)


class TestParseShiftFile:
    def test_two_line_fixture(self, tmp_path):
        path = write(tmp_path, [
            HEADER,
            "g1,s1,40,1,0,gh,ga,a|b|c|d|i,e|f|g|h|j",
            "g1,s1,62.5,0,0,gh,ga,a|b|c|d|i,e|f|g|h|j",
        ])
        records = parse_shift_file(path)
        assert len(records) == 2
        assert records[0].home_skaters == ("a", "b", "c", "d", "i")
        assert records[1].duration_s == 62.5
        assert records[0].line_no == 2

    def test_oversized_roster_parses_fine(self, tmp_path):
        # validation is the filter's job, not the parser's
        path = write(tmp_path, [HEADER, "g1,s1,40,0,0,gh,ga,a|b|c|d|i|k|l,e|f|g|h|j"])
        records = parse_shift_file(path)
        assert len(records) == 1
        assert len(records[0].home_skaters) == 7

    def test_header_only_gives_empty(self, tmp_path):
        assert parse_shift_file(write(tmp_path, [HEADER])) == []

    def test_missing_column_names_it(self, tmp_path):
        path = write(tmp_path, ["game_id,season,duration_s", "g1,s1,40"])
        with pytest.raises(SchemaError, match="home_goals"):
            parse_shift_file(path)

    def test_bad_number_carries_line_and_field(self, tmp_path):
        path = write(tmp_path, [
            HEADER,
            "g1,s1,40,0,0,gh,ga,a,e",
            "g1,s1,forever,0,0,gh,ga,a,e",
        ])
        with pytest.raises(ShiftFileError, match="duration_s") as err:
            parse_shift_file(path)
        assert err.value.line_no == 3

    def test_empty_goalie_field_means_missing(self, tmp_path):
        path = write(tmp_path, [HEADER, "g1,s1,40,0,0,,ga,a|b|c,e|f|g"])
        records = parse_shift_file(path)
        assert records[0].home_goalie == ""


class TestFilterShifts:
    def test_nominal_5v5_retained(self):
        shifts, report = filter_shifts([raw()])
        assert len(shifts) == 1
        assert report == FilterReport(1, 0, 0, 0, 0, 1)

    def test_three_total_home_players_removed_as_roster_size(self):
        rec = raw(home=("a", "b"), hgoalie="gh")  # 3 on ice including goalie
        _, report = filter_shifts([rec])
        assert report.removed_roster_size == 1

    def test_three_skaters_plus_goalie_is_legal_size_but_special_teams(self):
        # 4 total on ice passes the size rule; 3v5 skaters is a power play.
        rec = raw(home=("a", "b", "c"), hgoalie="gh")
        _, report = filter_shifts([rec])
        assert report.removed_special_teams == 1
        assert report.removed_roster_size == 0

    def test_missing_goalie_removed_as_empty_net(self):
        rec = raw(home=("a", "b", "c", "d", "i"), hgoalie="")
        _, report = filter_shifts([rec])
        assert report.removed_empty_net == 1

    def test_rule_order_malformed_first(self):
        # zero duration and oversized roster: tallied under malformed
        rec = raw(duration=0.0, home=("a", "b", "c", "d", "i", "k", "l"))
        _, report = filter_shifts([rec])
        assert report.removed_malformed == 1
        assert report.removed_roster_size == 0

    def test_rule_order_roster_size_before_empty_net(self):
        rec = raw(home=("a", "b", "c", "d", "i", "k", "l"), hgoalie="")
        _, report = filter_shifts([rec])
        assert report.removed_roster_size == 1
        assert report.removed_empty_net == 0

    def test_player_on_both_teams_is_malformed(self):
        rec = raw(away=("a", "f", "g", "h", "j"))
        _, report = filter_shifts([rec])
        assert report.removed_malformed == 1

    def test_ten_record_fixture_hand_enumerated(self):
        # 7 clean records plus one of each: oversized roster, no away
        # goalie, 4v5 special teams.
        records = [raw(game_id=f"g{i}") for i in range(7)]
        records.append(raw(game_id="bad1", home=("a", "b", "c", "d", "i", "k")))
        records.append(raw(game_id="bad2", agoalie=""))
        records.append(raw(game_id="bad3", home=("a", "b", "c", "d")))
        shifts, report = filter_shifts(records)
        assert len(shifts) == 7
        assert report.total_read == 10
        assert report.removed_roster_size == 1
        assert report.removed_empty_net == 1
        assert report.removed_special_teams == 1
        assert report.retained + report.removed_total == report.total_read

    def test_idempotent_on_retained(self):
        records = [raw(), raw(duration=-3), raw(home=("a", "b"))]
        shifts, _ = filter_shifts(records)
        again = [
            RawShiftRecord(0, s.game_id, s.season, s.duration_s, s.home_goals,
                           s.away_goals, s.home_skaters, s.home_goalie,
                           s.away_skaters, s.away_goalie)
            for s in shifts
        ]
        shifts2, report2 = filter_shifts(again)
        assert len(shifts2) == len(shifts)
        assert report2.removed_total == 0

    def test_retained_count_monotone_in_roster_bounds(self):
        records = []
        for n in (1, 2, 3, 4, 5):  # n skaters per side plus goalie
            ids_h = tuple(f"h{i}" for i in range(n))
            ids_a = tuple(f"a{i}" for i in range(n))
            records.append(raw(home=ids_h, away=ids_a))
        baseline = filter_shifts(records, min_onice=4, max_onice=6)[0]
        tighter = filter_shifts(records, min_onice=5, max_onice=6)[0]
        tightest = filter_shifts(records, min_onice=6, max_onice=6)[0]
        assert len(baseline) >= len(tighter) >= len(tightest)

    def test_preserves_input_order(self):
        records = [raw(game_id=f"g{i}") for i in range(5)]
        shifts, _ = filter_shifts(records)
        assert [s.game_id for s in shifts] == [f"g{i}" for i in range(5)]


class TestEligiblePlayers:
    def test_zero_threshold_includes_everyone(self, three_shifts):
        players = eligible_players(three_shifts, 0)
        assert players == {"a", "b", "c", "d", "e", "f", "g", "h", "gh", "ga"}

    def test_boundary_is_inclusive(self, three_shifts):
        # b is on ice for exactly 2 of the 3 shifts
        assert "b" in eligible_players(three_shifts, 2)
        assert "b" not in eligible_players(three_shifts, 3)

    def test_matches_brute_force_recount(self, small_league):
        _, shifts, _, _ = small_league
        counts = {}
        for s in shifts:
            for pid in s.home_skaters + (s.home_goalie,) + s.away_skaters + (s.away_goalie,):
                counts[pid] = counts.get(pid, 0) + 1
        threshold = 500
        expected = {p for p, n in counts.items() if n >= threshold}
        assert eligible_players(shifts, threshold) == expected

    def test_negative_threshold_rejected(self, three_shifts):
        with pytest.raises(ValueError):
            eligible_players(three_shifts, -1)


class TestRosterFile:
    def test_round_trip(self, tmp_path, roster):
        path = tmp_path / "roster.csv"
        write_roster_csv(roster, path)
        back = parse_roster_file(path)
        assert back == roster

    def test_unknown_position_rejected(self, tmp_path):
        path = write(tmp_path, ["player_id,name,position", "x,X,Q"], "roster.csv")
        with pytest.raises(ShiftFileError, match="position"):
            parse_roster_file(path)

    def test_duplicate_id_rejected(self, tmp_path):
        path = write(tmp_path, ["player_id,name,position", "x,X,C", "x,Y,D"], "roster.csv")
        with pytest.raises(ShiftFileError, match="duplicate"):
            parse_roster_file(path)


class TestShiftCsvRoundTrip:
    def test_write_then_parse_preserves_shifts(self, tmp_path, three_shifts):
        path = tmp_path / "out.csv"
        write_shift_csv(three_shifts, path)
        records = parse_shift_file(path)
        shifts, report = filter_shifts(records)
        assert report.removed_total == 0
        assert [s.home_skaters for s in shifts] == [s.home_skaters for s in three_shifts]
        assert [s.duration_s for s in shifts] == [s.duration_s for s in three_shifts]

    def test_position_enum_values(self):
        assert {p.value for p in Position} == {"C", "LW", "RW", "D", "G"}

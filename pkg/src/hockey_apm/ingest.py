"""Read shift and roster CSV files, validate records, and filter to the
regression-eligible shift set.

Shift CSV schema (header required, exact column names):

    game_id,season,duration_s,home_goals,away_goals,home_goalie,away_goalie,home_skaters,away_skaters

where the skater lists are ``|``-separated player ids and an empty goalie
field means no goalie was on the ice. Roster CSV: ``player_id,name,position``
with position in {C,LW,RW,D,G}.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .shift_model import Player, Position, RawShiftRecord, Shift

SHIFT_COLUMNS = (
    "game_id",
    "season",
    "duration_s",
    "home_goals",
    "away_goals",
    "home_goalie",
    "away_goalie",
    "home_skaters",
    "away_skaters",
)

ROSTER_COLUMNS = ("player_id", "name", "position")

# A team may have 4..6 players on the ice, goalie included.
MIN_ONICE = 4
MAX_ONICE = 6


class ShiftFileError(ValueError):
    """Malformed line in a shift or roster file; carries line and field."""

    def __init__(self, path, line_no: int, field: str, message: str):
        self.path = str(path)
        self.line_no = line_no
        self.field = field
        super().__init__(f"{path}:{line_no}: field '{field}': {message}")


class SchemaError(ValueError):
    """A required column is missing from the header."""

    def __init__(self, path, missing: list[str]):
        self.path = str(path)
        self.missing = tuple(missing)
        super().__init__(f"{path}: missing required column(s): {', '.join(missing)}")


@dataclass(frozen=True)
class FilterReport:
    """Tally of why records were removed; total_read == retained + removals."""

    total_read: int
    removed_malformed: int
    removed_roster_size: int
    removed_empty_net: int
    removed_special_teams: int
    retained: int

    @property
    def removed_total(self) -> int:
        return (
            self.removed_malformed
            + self.removed_roster_size
            + self.removed_empty_net
            + self.removed_special_teams
        )

    def as_dict(self) -> dict[str, int]:
        return {
            "total_read": self.total_read,
            "removed_malformed": self.removed_malformed,
            "removed_roster_size": self.removed_roster_size,
            "removed_empty_net": self.removed_empty_net,
            "removed_special_teams": self.removed_special_teams,
            "retained": self.retained,
        }


def _split_ids(field_value: str) -> tuple[str, ...]:
    if not field_value:
        return ()
    return tuple(part for part in field_value.split("|") if part)


def parse_shift_file(path) -> list[RawShiftRecord]:
    """Parse a shift CSV into raw records, one per line, without validation.

    Only syntax is checked here (numeric fields parse, header complete);
    roster sizes, goalie presence and strength are judged by filter_shifts.
    """
    path = Path(path)
    records: list[RawShiftRecord] = []
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            return records
        missing = [col for col in SHIFT_COLUMNS if col not in reader.fieldnames]
        if missing:
            raise SchemaError(path, missing)
        for row in reader:
            line_no = reader.line_num
            try:
                duration_s = float(row["duration_s"])
            except (TypeError, ValueError):
                raise ShiftFileError(path, line_no, "duration_s", f"not a number: {row['duration_s']!r}")
            goals = {}
            for field in ("home_goals", "away_goals"):
                try:
                    goals[field] = int(row[field])
                except (TypeError, ValueError):
                    raise ShiftFileError(path, line_no, field, f"not an integer: {row[field]!r}")
            records.append(
                RawShiftRecord(
                    line_no=line_no,
                    game_id=row["game_id"],
                    season=row["season"],
                    duration_s=duration_s,
                    home_goals=goals["home_goals"],
                    away_goals=goals["away_goals"],
                    home_skaters=_split_ids(row["home_skaters"]),
                    home_goalie=row["home_goalie"] or "",
                    away_skaters=_split_ids(row["away_skaters"]),
                    away_goalie=row["away_goalie"] or "",
                )
            )
    return records


def parse_roster_file(path) -> dict[str, Player]:
    """Parse a roster CSV into a player_id -> Player mapping."""
    path = Path(path)
    roster: dict[str, Player] = {}
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        if reader.fieldnames is None:
            return roster
        missing = [col for col in ROSTER_COLUMNS if col not in reader.fieldnames]
        if missing:
            raise SchemaError(path, missing)
        for row in reader:
            line_no = reader.line_num
            pid = row["player_id"]
            if not pid:
                raise ShiftFileError(path, line_no, "player_id", "empty id")
            if pid in roster:
                raise ShiftFileError(path, line_no, "player_id", f"duplicate id {pid!r}")
            try:
                position = Position(row["position"])
            except ValueError:
                raise ShiftFileError(path, line_no, "position", f"unknown position {row['position']!r}")
            roster[pid] = Player(player_id=pid, name=row["name"], position=position)
    return roster


def _first_violation(rec: RawShiftRecord, min_onice: int, max_onice: int) -> str | None:
    """Name of the first failing filter rule, or None if the record is clean.

    Rule order is fixed: malformed, roster_size, empty_net, special_teams.
    """
    home = list(rec.home_skaters) + ([rec.home_goalie] if rec.home_goalie else [])
    away = list(rec.away_skaters) + ([rec.away_goalie] if rec.away_goalie else [])
    if rec.duration_s <= 0:
        return "malformed"
    if rec.home_goals < 0 or rec.away_goals < 0:
        return "malformed"
    if len(set(home)) != len(home) or len(set(away)) != len(away):
        return "malformed"
    if set(home) & set(away):
        return "malformed"
    if not (min_onice <= len(home) <= max_onice) or not (min_onice <= len(away) <= max_onice):
        return "roster_size"
    if not rec.home_goalie or not rec.away_goalie:
        return "empty_net"
    if len(rec.home_skaters) != len(rec.away_skaters):
        return "special_teams"
    return None


def filter_shifts(
    records: list[RawShiftRecord] | tuple[RawShiftRecord, ...],
    min_onice: int = MIN_ONICE,
    max_onice: int = MAX_ONICE,
) -> tuple[list[Shift], FilterReport]:
    """Keep even-strength shifts with both goalies and sane roster sizes.

    Invalid records are tallied, not fatal; a record breaking several rules
    counts once, under the first failing rule. Output order equals input
    order.
    """
    kept: list[Shift] = []
    tallies = {"malformed": 0, "roster_size": 0, "empty_net": 0, "special_teams": 0}
    for rec in records:
        rule = _first_violation(rec, min_onice, max_onice)
        if rule is not None:
            tallies[rule] += 1
            continue
        kept.append(
            Shift(
                game_id=rec.game_id,
                season=rec.season,
                duration_s=rec.duration_s,
                home_goals=rec.home_goals,
                away_goals=rec.away_goals,
                home_skaters=rec.home_skaters,
                home_goalie=rec.home_goalie,
                away_skaters=rec.away_skaters,
                away_goalie=rec.away_goalie,
            )
        )
    report = FilterReport(
        total_read=len(records),
        removed_malformed=tallies["malformed"],
        removed_roster_size=tallies["roster_size"],
        removed_empty_net=tallies["empty_net"],
        removed_special_teams=tallies["special_teams"],
        retained=len(kept),
    )
    return kept, report


def eligible_players(shifts, min_shifts: int) -> set[str]:
    """Players whose on-ice shift count is at least ``min_shifts``.

    The count is shifts on the ice (any role, goalie included), not games
    or minutes.
    """
    if min_shifts < 0:
        raise ValueError("min_shifts must be >= 0")
    counts: dict[str, int] = {}
    for shift in shifts:
        for pid in shift.onice:
            counts[pid] = counts.get(pid, 0) + 1
    return {pid for pid, n in counts.items() if n >= min_shifts}


def write_shift_csv(shifts, path) -> None:
    """Write shifts back out in the input schema (deterministic bytes)."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(SHIFT_COLUMNS)
        for s in shifts:
            writer.writerow(
                [
                    s.game_id,
                    s.season,
                    f"{s.duration_s:.3f}",
                    s.home_goals,
                    s.away_goals,
                    s.home_goalie,
                    s.away_goalie,
                    "|".join(s.home_skaters),
                    "|".join(s.away_skaters),
                ]
            )


def write_roster_csv(roster: dict[str, Player], path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(ROSTER_COLUMNS)
        for pid in sorted(roster):
            player = roster[pid]
            writer.writerow([player.player_id, player.name, player.position.value])

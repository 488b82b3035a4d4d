"""Core domain vocabulary: players, shifts, and raw on-ice counting stats.

Everything here is immutable value data; instances can be shared freely
across workers. Seconds are the base time unit throughout the package;
minutes appear only at reporting boundaries.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Position(enum.Enum):
    CENTER = "C"
    LEFT_WING = "LW"
    RIGHT_WING = "RW"
    DEFENSE = "D"
    GOALIE = "G"

    @property
    def is_goalie(self) -> bool:
        return self is Position.GOALIE

    @property
    def is_forward(self) -> bool:
        return self in (Position.CENTER, Position.LEFT_WING, Position.RIGHT_WING)

    @property
    def is_skater(self) -> bool:
        # "skater" means forward or defenseman, never the goalie
        return self is not Position.GOALIE

    @property
    def group(self) -> str:
        """Coarse position group: 'F', 'D' or 'G'."""
        if self.is_forward:
            return "F"
        return "D" if self is Position.DEFENSE else "G"


@dataclass(frozen=True)
class Player:
    """Roster entry. Ids are unique within a dataset; position is fixed."""

    player_id: str
    name: str
    position: Position


@dataclass(frozen=True)
class Shift:
    """One substitution-free interval at even strength with both goalies on.

    Rosters are stored as sorted tuples of player ids so iteration order is
    deterministic. Construction enforces the invariants that the ingest
    filter guarantees; anything dirtier travels as RawShiftRecord.
    """

    game_id: str
    season: str
    duration_s: float
    home_goals: int
    away_goals: int
    home_skaters: tuple[str, ...]
    home_goalie: str
    away_skaters: tuple[str, ...]
    away_goalie: str

    def __post_init__(self):
        if self.duration_s <= 0:
            raise ValueError(f"shift {self.game_id}: duration must be positive")
        if self.home_goals < 0 or self.away_goals < 0:
            raise ValueError(f"shift {self.game_id}: negative goal count")
        if len(self.home_skaters) != len(self.away_skaters):
            raise ValueError(f"shift {self.game_id}: uneven skater counts")
        if not self.home_goalie or not self.away_goalie:
            raise ValueError(f"shift {self.game_id}: missing goalie")
        home = set(self.home_skaters) | {self.home_goalie}
        away = set(self.away_skaters) | {self.away_goalie}
        if len(home) != len(self.home_skaters) + 1 or len(away) != len(self.away_skaters) + 1:
            raise ValueError(f"shift {self.game_id}: duplicate player on one team")
        if home & away:
            raise ValueError(f"shift {self.game_id}: player on both teams")
        object.__setattr__(self, "home_skaters", tuple(sorted(self.home_skaters)))
        object.__setattr__(self, "away_skaters", tuple(sorted(self.away_skaters)))

    @property
    def home_onice(self) -> tuple[str, ...]:
        return self.home_skaters + (self.home_goalie,)

    @property
    def away_onice(self) -> tuple[str, ...]:
        return self.away_skaters + (self.away_goalie,)

    @property
    def onice(self) -> tuple[str, ...]:
        return self.home_onice + self.away_onice


@dataclass(frozen=True)
class RawShiftRecord:
    """Pre-validation container mirroring one input row.

    Rosters may have any size and goalie fields may be empty; the ingest
    filter decides what survives. ``line_no`` is kept for diagnostics.
    """

    line_no: int
    game_id: str
    season: str
    duration_s: float
    home_goals: int
    away_goals: int
    home_skaters: tuple[str, ...]
    home_goalie: str
    away_skaters: tuple[str, ...]
    away_goalie: str


@dataclass(frozen=True)
class PlayerSeasonStats:
    """Raw on-ice goal stats for one player, averaged per season.

    gf/ga/ng are per-season averages of on-ice goals for/against/net;
    the *60 fields are rates per 60 minutes of ice time.
    """

    player_id: str
    mins_total: float
    mins_per_season: float
    shifts: int
    gf: float
    ga: float
    ng: float
    gf60: float
    ga60: float
    ng60: float


class PlayerNotFoundError(KeyError):
    """Raised when a player id does not appear in the given shifts."""


def linemate_summary(
    player_id: str, shifts: list[Shift] | tuple[Shift, ...], k: int = 3
) -> list[tuple[str, float]]:
    """Top-k teammates of ``player_id`` by shared on-ice time.

    Returns (teammate_id, fraction) pairs where fraction is shared seconds
    divided by the player's total on-ice seconds, sorted by fraction
    descending with ties broken by teammate id. Goalies count as teammates.
    Raises PlayerNotFoundError if the player is never on the ice; fewer
    than k teammates is a normal result, not an error.
    """
    total_s = 0.0
    shared: dict[str, float] = {}
    for shift in shifts:
        if player_id in shift.home_onice:
            mates = shift.home_onice
        elif player_id in shift.away_onice:
            mates = shift.away_onice
        else:
            continue
        total_s += shift.duration_s
        for mate in mates:
            if mate != player_id:
                shared[mate] = shared.get(mate, 0.0) + shift.duration_s
    if total_s == 0.0:
        raise PlayerNotFoundError(player_id)
    ranked = sorted(shared.items(), key=lambda item: (-item[1], item[0]))
    return [(mate, seconds / total_s) for mate, seconds in ranked[:k]]

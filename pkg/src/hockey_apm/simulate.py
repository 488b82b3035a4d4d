"""Synthetic leagues with known per-player effects for pipeline validation.

Scoring follows the same linear model the regression assumes: while a line
is on the ice, each side's goals are Poisson with per-60 rate

    max(0.01, league_base + sum(attackers' offense) - sum(defenders' defense)
        - defending goalie's defense)

scaled by the shift duration. True effects are drawn from centered normals
and then centered exactly within each group (skater offense, skater
defense, goalie defense), so the league-wide scoring rate equals
``league_base`` and the fitted intercept estimates it directly.

Deployment rotates each team's skaters through a shuffled circular order
in blocks of five with per-slot swap noise, so linemate collinearity
exists but is far from total. ``twin_scenario`` additionally forces a
designated pair onto the ice together to reproduce the error inflation
that nearly-inseparable linemates cause.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .shift_model import Player, Position, Shift

RATE_FLOOR_PER60 = 0.01
MIN_SHIFT_S = 10.0
MAX_SHIFT_S = 120.0
LINE_SIZE = 5
SWAP_PROB = 0.55
# Even-strength mix: mostly 5v5 with some 4v4 and rare 3v3. The smaller
# lineups are what separate a goalie's effect from his skaters' collective
# defense; behind a constant five-man wall the two are indistinguishable.
STRENGTH_SIZES = (5, 4, 3)
STRENGTH_PROBS = (0.90, 0.07, 0.03)


class SimConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SimConfig:
    n_teams: int = 8
    skaters_per_team: int = 13
    goalies_per_team: int = 2
    n_seasons: int = 3
    games_per_season: int = 1000
    shifts_per_game: int = 40
    mean_shift_s: float = 55.0
    effect_spread: float = 0.55
    league_base: float = 5.0
    seed: int = 42

    def validate(self) -> None:
        counts = {
            "n_teams": self.n_teams,
            "skaters_per_team": self.skaters_per_team,
            "goalies_per_team": self.goalies_per_team,
            "n_seasons": self.n_seasons,
            "games_per_season": self.games_per_season,
            "shifts_per_game": self.shifts_per_game,
        }
        for name, value in counts.items():
            if value <= 0:
                raise SimConfigError(f"{name} must be positive, got {value}")
        if self.n_teams < 2:
            raise SimConfigError("need at least two teams")
        if self.skaters_per_team < LINE_SIZE:
            raise SimConfigError(f"need at least {LINE_SIZE} skaters per team")
        if self.mean_shift_s <= 0:
            raise SimConfigError("mean_shift_s must be positive")
        if self.effect_spread < 0:
            raise SimConfigError("effect_spread must be >= 0")
        if self.league_base <= 0:
            raise SimConfigError("league_base must be positive")
        n_shifts = self.n_seasons * self.games_per_season * self.shifts_per_game
        n_skaters = self.n_teams * self.skaters_per_team
        n_goalies = self.n_teams * self.goalies_per_team
        ib_params = 2 * n_skaters + n_goalies + 1
        net_params = n_skaters + n_goalies + 1
        if n_shifts <= net_params or 2 * n_shifts <= ib_params:
            raise SimConfigError(
                f"only {n_shifts} shifts for up to {max(net_params, ib_params)} "
                "parameters; raise games_per_season or shifts_per_game"
            )


@dataclass(frozen=True)
class GroundTruth:
    """True per-60 effects. Defense is prevention: positive = good."""

    true_off: dict[str, float]  # skaters only
    true_def: dict[str, float]  # skaters and goalies
    league_base: float


def scoring_rate_per60(truth: GroundTruth, attackers, defenders, goalie) -> float:
    """Per-60 scoring rate for one side of one shift, floor applied."""
    rate = truth.league_base
    for pid in attackers:
        rate += truth.true_off[pid]
    for pid in defenders:
        rate -= truth.true_def[pid]
    rate -= truth.true_def[goalie]
    return max(RATE_FLOOR_PER60, rate)


def _build_league(config: SimConfig, rng):
    roster: dict[str, Player] = {}
    team_skaters: list[list[str]] = []
    team_goalies: list[list[str]] = []
    n_forwards = max(1, round(config.skaters_per_team * 0.6))
    forward_cycle = (Position.CENTER, Position.LEFT_WING, Position.RIGHT_WING)
    for t in range(config.n_teams):
        skaters = []
        for i in range(config.skaters_per_team):
            pid = f"t{t:02d}s{i:02d}"
            pos = forward_cycle[i % 3] if i < n_forwards else Position.DEFENSE
            roster[pid] = Player(pid, f"Skater {t}-{i}", pos)
            skaters.append(pid)
        goalies = []
        for i in range(config.goalies_per_team):
            pid = f"t{t:02d}g{i}"
            roster[pid] = Player(pid, f"Goalie {t}-{i}", Position.GOALIE)
            goalies.append(pid)
        team_skaters.append(skaters)
        team_goalies.append(goalies)

    all_skaters = [p for team in team_skaters for p in team]
    all_goalies = [g for team in team_goalies for g in team]
    off = rng.normal(0.0, config.effect_spread, size=len(all_skaters))
    dfs = rng.normal(0.0, config.effect_spread, size=len(all_skaters))
    dfg = rng.normal(0.0, config.effect_spread, size=len(all_goalies))
    # Exact centering per group keeps the league average at league_base and
    # matches the sum-to-zero gauge the solver uses when every player is
    # above the eligibility cutoff.
    off -= off.mean()
    dfs -= dfs.mean()
    dfg -= dfg.mean()
    true_off = dict(zip(all_skaters, off.tolist()))
    true_def = dict(zip(all_skaters, dfs.tolist()))
    true_def.update(zip(all_goalies, dfg.tolist()))
    truth = GroundTruth(true_off=true_off, true_def=true_def, league_base=config.league_base)
    return roster, team_skaters, team_goalies, truth


class _LineRotation:
    """Cyclic skater blocks over a shuffled order with swap noise."""

    def __init__(self, skaters: list[str], rng):
        self.order = list(skaters)
        rng.shuffle(self.order)
        self.pointer = 0

    def next_line(self, rng, size: int = LINE_SIZE) -> list[str]:
        n = len(self.order)
        line = [self.order[(self.pointer + i) % n] for i in range(size)]
        self.pointer = (self.pointer + size) % n
        for slot in range(size):
            if rng.random() < SWAP_PROB:
                bench = [p for p in self.order if p not in line]
                line[slot] = bench[rng.integers(0, len(bench))]
        return line


def _force_pair(line: list[str], pair: tuple[str, str], fraction: float, rng) -> list[str]:
    """With probability ``fraction``, complete a half-present pair."""
    a, b = pair
    has_a, has_b = a in line, b in line
    if has_a == has_b:
        return line
    if rng.random() >= fraction:
        return line
    missing = b if has_a else a
    present = a if has_a else b
    others = [i for i, p in enumerate(line) if p != present]
    line = list(line)
    line[others[rng.integers(0, len(others))]] = missing
    return line


def twin_pair(config: SimConfig) -> tuple[str, str]:
    """The designated always-together pair used by twin_scenario."""
    return ("t00s00", "t00s01")


def _generate(config: SimConfig, pair_fraction: float | None):
    config.validate()
    if pair_fraction is not None and not (0.0 <= pair_fraction <= 1.0):
        raise SimConfigError(f"pair fraction must be in [0, 1], got {pair_fraction}")
    rng = np.random.default_rng(config.seed)
    roster, team_skaters, team_goalies, truth = _build_league(config, rng)
    pair = twin_pair(config)

    pairings = [
        (h, a)
        for h in range(config.n_teams)
        for a in range(config.n_teams)
        if h != a
    ]
    shifts: list[Shift] = []
    for season_idx in range(config.n_seasons):
        season = f"s{season_idx + 1}"
        rotations = [_LineRotation(team_skaters[t], rng) for t in range(config.n_teams)]
        # Starters stay put; backup goalies tour the league season by
        # season. A goalie seen behind two different defenses is what lets
        # the fit tell goalie skill from team skill.
        goalie_pools = [
            [team_goalies[t][0]]
            + [
                team_goalies[(t + season_idx) % config.n_teams][i]
                for i in range(1, config.goalies_per_team)
            ]
            for t in range(config.n_teams)
        ]
        for game_idx in range(config.games_per_season):
            home, away = pairings[(season_idx * config.games_per_season + game_idx) % len(pairings)]
            game_id = f"{season}g{game_idx:05d}"
            # Independent per-game goalie choice; a deterministic rotation
            # would synchronize backup nights across teams and tie their
            # indicator columns together exactly.
            home_goalie = goalie_pools[home][rng.integers(0, config.goalies_per_team)]
            away_goalie = goalie_pools[away][rng.integers(0, config.goalies_per_team)]
            durations = np.clip(
                rng.exponential(config.mean_shift_s, size=config.shifts_per_game),
                MIN_SHIFT_S,
                MAX_SHIFT_S,
            )
            sizes = rng.choice(STRENGTH_SIZES, size=config.shifts_per_game, p=STRENGTH_PROBS)
            for duration, size in zip(durations, sizes):
                home_line = rotations[home].next_line(rng, int(size))
                away_line = rotations[away].next_line(rng, int(size))
                if pair_fraction is not None and pair_fraction > 0.0:
                    if home == 0:
                        home_line = _force_pair(home_line, pair, pair_fraction, rng)
                    if away == 0:
                        away_line = _force_pair(away_line, pair, pair_fraction, rng)
                frac_hours = duration / 3600.0
                home_rate = scoring_rate_per60(truth, home_line, away_line, away_goalie)
                away_rate = scoring_rate_per60(truth, away_line, home_line, home_goalie)
                home_goals = int(rng.poisson(home_rate * frac_hours))
                away_goals = int(rng.poisson(away_rate * frac_hours))
                shifts.append(
                    Shift(
                        game_id=game_id,
                        season=season,
                        duration_s=float(duration),
                        home_goals=home_goals,
                        away_goals=away_goals,
                        home_skaters=tuple(home_line),
                        home_goalie=home_goalie,
                        away_skaters=tuple(away_line),
                        away_goalie=away_goalie,
                    )
                )
    return shifts, truth, roster


def generate(config: SimConfig):
    """Deterministic synthetic league: (shifts, ground truth, roster)."""
    return _generate(config, pair_fraction=None)


def twin_scenario(config: SimConfig, pair_fraction: float = 0.92):
    """Like generate, but whenever exactly one of the designated pair is
    deployed, the other joins with probability ``pair_fraction``.

    At 0.0 the output is identical to generate; at 1.0 the pair's columns
    are exactly collinear and the fit must report the degeneracy.
    """
    return _generate(config, pair_fraction=pair_fraction)


def write_ground_truth_csv(truth: GroundTruth, path) -> None:
    """Schema: player_id,true_off_per60,true_def_per60 (NA = no such effect)."""
    ids = sorted(set(truth.true_off) | set(truth.true_def))
    with open(path, "w", newline="", encoding="utf-8") as handle:
        handle.write("player_id,true_off_per60,true_def_per60\n")
        for pid in ids:
            off = truth.true_off.get(pid)
            off_s = "NA" if off is None else f"{off:.17g}"
            handle.write(f"{pid},{off_s},{truth.true_def[pid]:.17g}\n")


def read_ground_truth_csv(path) -> GroundTruth:
    import csv

    true_off: dict[str, float] = {}
    true_def: dict[str, float] = {}
    with open(path, newline="", encoding="utf-8") as handle:
        for row in csv.DictReader(handle):
            if row["true_off_per60"] != "NA":
                true_off[row["player_id"]] = float(row["true_off_per60"])
            true_def[row["player_id"]] = float(row["true_def_per60"])
    return GroundTruth(true_off=true_off, true_def=true_def, league_base=float("nan"))

"""Turn model fits into per-player offensive/defensive/total ratings.

Rates are goals per 60 minutes; counting stats are goals per season,
obtained by scaling a rate with the player's average even-strength minutes
per season. A defensive coefficient enters the split-shift model with the
opposite sign (a negative coefficient means fewer goals against), so
defensive ratings are sign-flipped here: a player who suppresses 0.8 goals
per 60 gets a defensive rating of +0.8.

Goalies never receive an offensive rating; their total rating equals their
defensive rating. The net/total-model route does produce an offensive
number for goalies as a side effect; it is kept only as a diagnostic and
excluded from every headline metric.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .shift_model import Player, PlayerSeasonStats
from .wls import FitResult


class RatingsError(ValueError):
    pass


@dataclass(frozen=True)
class ModelRating:
    """Per-60 ratings with standard errors from a single model."""

    player_id: str
    opm60: float | None  # None for goalies in the split-shift model
    dpm60: float
    oerr60: float | None
    derr60: float
    apm60: float


def _exact_complement(total: float, part: float) -> float:
    """Value d such that part + d reconstructs ``total`` bit-exactly.

    The plain difference is almost always enough; when the final rounding
    lands one ulp off, nudge d to the neighbouring float that restores the
    identity.
    """
    d = total - part
    if part + d == total:
        return d
    for direction in (total, -math.inf, math.inf):
        candidate = d
        for _ in range(4):
            candidate = np.nextafter(candidate, direction)
            if part + candidate == total:
                return float(candidate)
    return d


def ratings_ib(fit: FitResult, goalie_ids: set[str]) -> dict[str, ModelRating]:
    """Read per-player ratings out of a split-shift model fit.

    Offense is the player's offense coefficient; defense is the negated
    defense coefficient (negation leaves the standard error unchanged).
    """
    ratings: dict[str, ModelRating] = {}
    for pid in fit.column_map.player_ids("defense"):
        dpm60 = -fit.coef(f"def:{pid}")
        derr60 = fit.se(f"def:{pid}")
        if pid in goalie_ids:
            ratings[pid] = ModelRating(
                player_id=pid, opm60=None, dpm60=dpm60,
                oerr60=None, derr60=derr60, apm60=dpm60,
            )
        else:
            opm60 = fit.coef(f"off:{pid}")
            ratings[pid] = ModelRating(
                player_id=pid, opm60=opm60, dpm60=dpm60,
                oerr60=fit.se(f"off:{pid}"), derr60=derr60,
                apm60=opm60 + dpm60,
            )
    return ratings


def separate_r(net_fit: FitResult, tot_fit: FitResult) -> dict[str, ModelRating]:
    """Split net-goals and total-goals coefficients into offense and defense.

    A player's net coefficient is their total (offense plus defense)
    contribution; the total-goals coefficient is offense minus defense.
    Half their sum is offense, half their difference defense. The defensive
    half is adjusted by at most one ulp so offense + defense reproduces the
    net coefficient bit-exactly. Both error halves equal
    sqrt(var_net + var_total)/2, treating the two fits as independent.
    """
    if net_fit.column_map is not tot_fit.column_map and (
        [c.key for c in net_fit.column_map.columns]
        != [c.key for c in tot_fit.column_map.columns]
    ):
        raise RatingsError("net and total fits use different column maps")
    ratings: dict[str, ModelRating] = {}
    for pid in net_fit.column_map.player_ids("net"):
        apm60 = net_fit.coef(f"net:{pid}")
        tpm60 = tot_fit.coef(f"net:{pid}")
        opm60 = (apm60 + tpm60) / 2.0
        dpm60 = _exact_complement(apm60, opm60)
        err60 = math.hypot(net_fit.se(f"net:{pid}"), tot_fit.se(f"net:{pid}")) / 2.0
        ratings[pid] = ModelRating(
            player_id=pid, opm60=opm60, dpm60=dpm60,
            oerr60=err60, derr60=err60, apm60=apm60,
        )
    return ratings


def to_counting(rate60: float, mins: float) -> float:
    """Convert goals/60 to goals/season given minutes per season."""
    if mins < 0:
        raise ValueError("minutes must be >= 0")
    return rate60 * mins / 60.0


def combine_off_def_err(oerr: float, derr: float) -> float:
    """Total-rating error assuming offense and defense are uncorrelated."""
    if oerr < 0 or derr < 0:
        raise ValueError("errors must be >= 0")
    return math.hypot(oerr, derr)


def raw_onice_stats(shifts, n_seasons: int | None = None) -> dict[str, PlayerSeasonStats]:
    """Per-season-average on-ice GF/GA/NG and per-60 rates for every player.

    ``n_seasons`` defaults to the number of distinct seasons present in the
    shifts; per-season averages divide by that count even for players who
    appeared in fewer of them.
    """
    if n_seasons is None:
        n_seasons = len({s.season for s in shifts})
    if n_seasons <= 0:
        n_seasons = 1
    seconds: dict[str, float] = {}
    counts: dict[str, int] = {}
    gf_tot: dict[str, int] = {}
    ga_tot: dict[str, int] = {}
    for shift in shifts:
        for side, gf, ga in (
            (shift.home_onice, shift.home_goals, shift.away_goals),
            (shift.away_onice, shift.away_goals, shift.home_goals),
        ):
            for pid in side:
                seconds[pid] = seconds.get(pid, 0.0) + shift.duration_s
                counts[pid] = counts.get(pid, 0) + 1
                gf_tot[pid] = gf_tot.get(pid, 0) + gf
                ga_tot[pid] = ga_tot.get(pid, 0) + ga
    stats: dict[str, PlayerSeasonStats] = {}
    for pid, sec in seconds.items():
        gf = gf_tot[pid] / n_seasons
        ga = ga_tot[pid] / n_seasons
        stats[pid] = PlayerSeasonStats(
            player_id=pid,
            mins_total=sec / 60.0,
            mins_per_season=sec / 60.0 / n_seasons,
            shifts=counts[pid],
            gf=gf,
            ga=ga,
            ng=gf - ga,
            gf60=gf_tot[pid] * 3600.0 / sec,
            ga60=ga_tot[pid] * 3600.0 / sec,
            ng60=(gf_tot[pid] - ga_tot[pid]) * 3600.0 / sec,
        )
    return stats


@dataclass(frozen=True)
class PlayerRating:
    """Final per-player record: rates, counting stats, errors and raw stats.

    Offensive fields are None (absent, not zero) for goalies. The
    identities apm60 == opm60 + dpm60, apm == opm + dpm (skaters) and
    apm == dpm (goalies) hold exactly by construction.
    """

    player: Player
    opm60: float | None
    dpm60: float
    apm60: float
    opm: float | None
    dpm: float
    apm: float
    oerr60: float | None
    derr60: float
    err60: float
    oerr: float | None
    derr: float
    err: float
    mins: float
    stats: PlayerSeasonStats
    linemates: tuple[tuple[str, float], ...] = ()
    goalie_net_opm60: float | None = None


def _finalize(
    player: Player,
    opm60: float | None,
    dpm60: float,
    oerr60: float | None,
    derr60: float,
    stats: PlayerSeasonStats,
    linemates,
    goalie_net_opm60: float | None,
) -> PlayerRating:
    mins = stats.mins_per_season
    is_goalie = player.position.is_goalie
    if is_goalie:
        apm60 = dpm60
        err60 = derr60
        dpm = to_counting(dpm60, mins)
        return PlayerRating(
            player=player, opm60=None, dpm60=dpm60, apm60=apm60,
            opm=None, dpm=dpm, apm=dpm,
            oerr60=None, derr60=derr60, err60=err60,
            oerr=None, derr=to_counting(derr60, mins), err=to_counting(err60, mins),
            mins=mins, stats=stats, linemates=tuple(linemates),
            goalie_net_opm60=goalie_net_opm60,
        )
    apm60 = opm60 + dpm60
    opm = to_counting(opm60, mins)
    dpm = to_counting(dpm60, mins)
    err60 = combine_off_def_err(oerr60, derr60)
    return PlayerRating(
        player=player, opm60=opm60, dpm60=dpm60, apm60=apm60,
        opm=opm, dpm=dpm, apm=opm + dpm,
        oerr60=oerr60, derr60=derr60, err60=err60,
        oerr=to_counting(oerr60, mins), derr=to_counting(derr60, mins),
        err=to_counting(err60, mins),
        mins=mins, stats=stats, linemates=tuple(linemates),
    )


def average_models(
    ib: dict[str, ModelRating],
    r: dict[str, ModelRating],
    roster: dict[str, Player],
    stats: dict[str, PlayerSeasonStats],
    linemates: dict[str, list[tuple[str, float]]] | None = None,
) -> list[PlayerRating]:
    """Average the two models into the final ratings.

    Rates are the plain mean of the two models; errors combine as
    sqrt(e_ib^2 + e_r^2)/2, treating the models as uncorrelated, which
    leaves the averaged error below either input. For goalies the
    net/total-model offensive estimate is excluded (kept as a diagnostic)
    and only the defensive halves are averaged.
    """
    if set(ib) != set(r):
        only_ib = sorted(set(ib) - set(r))
        only_r = sorted(set(r) - set(ib))
        raise RatingsError(
            f"model player universes differ (only split-shift: {only_ib}, "
            f"only net/total: {only_r})"
        )
    linemates = linemates or {}
    out: list[PlayerRating] = []
    for pid in sorted(ib):
        a, b = ib[pid], r[pid]
        player = roster[pid]
        dpm60 = 0.5 * (a.dpm60 + b.dpm60)
        derr60 = 0.5 * math.hypot(a.derr60, b.derr60)
        if player.position.is_goalie:
            out.append(
                _finalize(player, None, dpm60, None, derr60, stats[pid],
                          linemates.get(pid, ()), goalie_net_opm60=b.opm60)
            )
        else:
            opm60 = 0.5 * (a.opm60 + b.opm60)
            oerr60 = 0.5 * math.hypot(a.oerr60, b.oerr60)
            out.append(
                _finalize(player, opm60, dpm60, oerr60, derr60, stats[pid],
                          linemates.get(pid, ()), goalie_net_opm60=None)
            )
    return out


def single_model_ratings(
    model: dict[str, ModelRating],
    roster: dict[str, Player],
    stats: dict[str, PlayerSeasonStats],
    linemates: dict[str, list[tuple[str, float]]] | None = None,
) -> list[PlayerRating]:
    """Final ratings from one model alone (no averaging)."""
    linemates = linemates or {}
    out: list[PlayerRating] = []
    for pid in sorted(model):
        m = model[pid]
        player = roster[pid]
        if player.position.is_goalie:
            out.append(
                _finalize(player, None, m.dpm60, None, m.derr60, stats[pid],
                          linemates.get(pid, ()),
                          goalie_net_opm60=m.opm60)
            )
        else:
            out.append(
                _finalize(player, m.opm60, m.dpm60, m.oerr60, m.derr60,
                          stats[pid], linemates.get(pid, ()), goalie_net_opm60=None)
            )
    return out

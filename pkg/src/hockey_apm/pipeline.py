"""One-call orchestration: shifts + roster in, player ratings out."""

from __future__ import annotations

from dataclasses import dataclass

from . import design, metrics, wls
from .ingest import eligible_players
from .metrics import ModelRating, PlayerRating
from .shift_model import Player, PlayerSeasonStats
from .wls import FitResult

DEFAULT_MIN_SHIFTS = 4000


def linemate_summaries(shifts, k: int = 3) -> dict[str, list[tuple[str, float]]]:
    """Top-k linemates for every player in one pass over the shifts."""
    total: dict[str, float] = {}
    shared: dict[str, dict[str, float]] = {}
    for shift in shifts:
        for side in (shift.home_onice, shift.away_onice):
            for pid in side:
                total[pid] = total.get(pid, 0.0) + shift.duration_s
                mates = shared.setdefault(pid, {})
                for mate in side:
                    if mate != pid:
                        mates[mate] = mates.get(mate, 0.0) + shift.duration_s
    out: dict[str, list[tuple[str, float]]] = {}
    for pid, mates in shared.items():
        ranked = sorted(mates.items(), key=lambda item: (-item[1], item[0]))
        out[pid] = [(mate, sec / total[pid]) for mate, sec in ranked[:k]]
    return out


@dataclass
class PipelineResult:
    ratings: list[PlayerRating]
    eligible: set[str]
    stats: dict[str, PlayerSeasonStats]
    ib_fit: FitResult | None = None
    net_fit: FitResult | None = None
    total_fit: FitResult | None = None
    ib_ratings: dict[str, ModelRating] | None = None
    r_ratings: dict[str, ModelRating] | None = None


def run_pipeline(
    shifts,
    roster: dict[str, Player],
    min_shifts: int = DEFAULT_MIN_SHIFTS,
    model: str = "both",
    collinearity: str = "error",
    subthreshold: str = "drop",
    compute_linemates: bool = True,
) -> PipelineResult:
    """Fit the selected model(s) on validated shifts and rate every
    eligible player.

    ``model`` is "ib" (split-shift), "r" (net/total) or "both"; only
    "both" produces the averaged ratings.
    """
    if model not in ("ib", "r", "both"):
        raise ValueError(f"unknown model selection {model!r}")
    eligible = eligible_players(shifts, min_shifts)
    stats = metrics.raw_onice_stats(shifts)
    linemates = linemate_summaries(shifts) if compute_linemates else {}
    goalie_ids = {pid for pid in eligible if roster[pid].position.is_goalie}

    result = PipelineResult(ratings=[], eligible=eligible, stats=stats)

    if model in ("ib", "both"):
        ib_design = design.build_ib_design(shifts, roster, eligible, subthreshold)
        result.ib_fit = wls.fit(ib_design, collinearity=collinearity)
        result.ib_ratings = metrics.ratings_ib(result.ib_fit, goalie_ids)
    if model in ("r", "both"):
        net_design = design.build_r_net_design(shifts, roster, eligible, subthreshold)
        total_design = design.build_r_total_design(shifts, roster, eligible, subthreshold)
        result.net_fit = wls.fit(net_design, collinearity=collinearity)
        result.total_fit = wls.fit(total_design, collinearity=collinearity)
        result.r_ratings = metrics.separate_r(result.net_fit, result.total_fit)

    if model == "both":
        result.ratings = metrics.average_models(
            result.ib_ratings, result.r_ratings, roster, stats, linemates
        )
    elif model == "ib":
        result.ratings = metrics.single_model_ratings(result.ib_ratings, roster, stats, linemates)
    else:
        result.ratings = metrics.single_model_ratings(result.r_ratings, roster, stats, linemates)
    return result

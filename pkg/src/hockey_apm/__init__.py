"""Teammate- and opponent-independent adjusted plus-minus ratings for
hockey players, estimated from shift-level data by two weighted
least-squares models whose results are averaged."""

from .design import (
    DesignMatrix,
    build_ib_design,
    build_r_net_design,
    build_r_total_design,
)
from .ingest import (
    FilterReport,
    eligible_players,
    filter_shifts,
    parse_roster_file,
    parse_shift_file,
)
from .metrics import (
    PlayerRating,
    average_models,
    combine_off_def_err,
    raw_onice_stats,
    ratings_ib,
    separate_r,
    to_counting,
)
from .pipeline import run_pipeline
from .report import kde, top_n, write_ratings_csv
from .shift_model import Player, PlayerSeasonStats, Position, Shift, linemate_summary
from .simulate import GroundTruth, SimConfig, generate, twin_scenario
from .wls import CollinearityError, FitResult, fit, weight_scale_check

__version__ = "0.1.0"

__all__ = [
    "CollinearityError",
    "DesignMatrix",
    "FilterReport",
    "FitResult",
    "GroundTruth",
    "Player",
    "PlayerRating",
    "PlayerSeasonStats",
    "Position",
    "Shift",
    "SimConfig",
    "average_models",
    "build_ib_design",
    "build_r_net_design",
    "build_r_total_design",
    "combine_off_def_err",
    "eligible_players",
    "filter_shifts",
    "fit",
    "generate",
    "kde",
    "linemate_summary",
    "parse_roster_file",
    "parse_shift_file",
    "raw_onice_stats",
    "ratings_ib",
    "run_pipeline",
    "separate_r",
    "to_counting",
    "top_n",
    "twin_scenario",
    "weight_scale_check",
    "write_ratings_csv",
]

"""Paper-shaped outputs: the full ratings CSV, top-N tables and kernel
density summaries of the rating distributions.

Numeric formatting is fixed (3 decimals for per-60 rates, 1 for per-season
counting stats and errors) so golden-file comparisons are byte-stable;
``precision="full"`` switches to repr-exact output. Figures are emitted as
x,density data rather than rendered images.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .metrics import PlayerRating

RATINGS_COLUMNS = (
    "rank", "player_id", "name", "pos",
    "opm60", "dpm60", "apm60",
    "opm", "dpm", "apm",
    "oerr", "derr", "err",
    "mins",
    "gf", "ga", "ng",
    "gf60", "ga60", "ng60",
    "teammate1", "min1", "teammate2", "min2", "teammate3", "min3",
)


class KdeError(ValueError):
    pass


@dataclass(frozen=True)
class KdeCurve:
    """Gaussian-kernel density estimate on an ascending grid."""

    grid: np.ndarray
    density: np.ndarray
    bandwidth: float

    def integral(self) -> float:
        return float(np.trapezoid(self.density, self.grid))

    def at(self, x: float) -> float:
        return float(np.interp(x, self.grid, self.density))


def silverman_bandwidth(values: np.ndarray) -> float:
    """0.9 * min(sd, IQR/1.34) * n^(-1/5)."""
    sd = float(np.std(values))
    q75, q25 = np.percentile(values, [75, 25])
    iqr = float(q75 - q25)
    scale = min(sd, iqr / 1.34) if iqr > 0 else sd
    return 0.9 * scale * len(values) ** (-0.2)


def kde(values, weights=None, bandwidth: float | None = None, grid_size: int = 512) -> KdeCurve:
    """Gaussian KDE with Silverman's rule by default.

    The grid spans [min - 3h, max + 3h] with 512 points. Identical values
    give a zero bandwidth, which needs an explicit one instead.
    """
    values = np.asarray(values, dtype=np.float64)
    if values.ndim != 1 or len(values) < 2:
        raise KdeError("need at least two values")
    if weights is None:
        weights = np.full(len(values), 1.0 / len(values))
    else:
        weights = np.asarray(weights, dtype=np.float64)
        if len(weights) != len(values) or np.any(weights < 0) or weights.sum() <= 0:
            raise KdeError("weights must be nonnegative and sum to > 0")
        weights = weights / weights.sum()
    if bandwidth is None:
        bandwidth = silverman_bandwidth(values)
        if bandwidth <= 0:
            raise KdeError(
                "all values are identical; pass an explicit bandwidth"
            )
    if bandwidth <= 0:
        raise KdeError("bandwidth must be positive")
    lo = values.min() - 3.0 * bandwidth
    hi = values.max() + 3.0 * bandwidth
    grid = np.linspace(lo, hi, grid_size)
    # (grid x values) kernel matrix, evaluated in chunks to bound memory
    density = np.zeros(grid_size)
    norm = 1.0 / (bandwidth * math.sqrt(2.0 * math.pi))
    chunk = 4096
    for start in range(0, len(values), chunk):
        v = values[start:start + chunk]
        wt = weights[start:start + chunk]
        z = (grid[:, None] - v[None, :]) / bandwidth
        density += norm * np.exp(-0.5 * z * z) @ wt
    return KdeCurve(grid=grid, density=density, bandwidth=float(bandwidth))


def write_kde_csv(curves: dict[str, KdeCurve], path) -> None:
    """One curve: ``x,density``. Several: ``label,x,density``."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        if len(curves) == 1:
            curve = next(iter(curves.values()))
            writer.writerow(["x", "density"])
            for x, d in zip(curve.grid, curve.density):
                writer.writerow([f"{x:.6g}", f"{d:.6g}"])
        else:
            writer.writerow(["label", "x", "density"])
            for label in sorted(curves):
                curve = curves[label]
                for x, d in zip(curve.grid, curve.density):
                    writer.writerow([label, f"{x:.6g}", f"{d:.6g}"])


# Metric selectors for ranking and density plots. None values (goalie
# offense) exclude the player from that metric's ordering.
METRIC_KEYS = {
    "opm60": lambda r: r.opm60,
    "dpm60": lambda r: r.dpm60,
    "apm60": lambda r: r.apm60,
    "opm": lambda r: r.opm,
    "dpm": lambda r: r.dpm,
    "apm": lambda r: r.apm,
    "err60": lambda r: r.err60,
    "err": lambda r: r.err,
    "gf60": lambda r: r.stats.gf60,
    "ga60": lambda r: r.stats.ga60,
    "ng60": lambda r: r.stats.ng60,
    "mins": lambda r: r.mins,
}


def _metric(key: str):
    try:
        return METRIC_KEYS[key]
    except KeyError:
        raise ValueError(
            f"unknown metric {key!r}; choose from {', '.join(sorted(METRIC_KEYS))}"
        )


def ranked(ratings: list[PlayerRating], key: str) -> list[tuple[int, PlayerRating]]:
    """Players ordered by a metric, descending, with 1-based global ranks.

    Players for whom the metric is absent (goalie offense) are left out of
    the ordering entirely. Ties break by player id.
    """
    getter = _metric(key)
    has_value = [r for r in ratings if getter(r) is not None]
    ordered = sorted(has_value, key=lambda r: (-getter(r), r.player.player_id))
    return [(i + 1, r) for i, r in enumerate(ordered)]


def top_n(
    ratings: list[PlayerRating],
    key: str,
    n: int,
    positions: set[str] | None = None,
    min_minutes: float | None = None,
) -> list[tuple[int, PlayerRating]]:
    """Top-n table rows after position / minutes filters.

    The rank column is the player's place in the unfiltered ordering, so a
    filtered table keeps the global ranks (a defenseman who is tenth
    overall stays rank 10 in the defensemen-only table).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    rows = ranked(ratings, key)
    if positions is not None:
        rows = [(rk, r) for rk, r in rows if r.player.position.group in positions]
    if min_minutes is not None:
        rows = [(rk, r) for rk, r in rows if r.mins >= min_minutes]
    return rows[:n]


def _fmt_rate(value: float | None, full: bool) -> str:
    if value is None:
        return "NA"
    return f"{value:.17g}" if full else f"{value:.3f}"


def _fmt_count(value: float | None, full: bool) -> str:
    if value is None:
        return "NA"
    return f"{value:.17g}" if full else f"{value:.1f}"


def _rating_row(rank: int, r: PlayerRating, full: bool) -> list[str]:
    mates = list(r.linemates[:3]) + [None] * (3 - len(r.linemates[:3]))
    mate_cells = []
    for mate in mates:
        if mate is None:
            mate_cells += ["NA", "NA"]
        else:
            mate_cells += [mate[0], _fmt_rate(mate[1], full)]
    return [
        str(rank),
        r.player.player_id,
        r.player.name,
        r.player.position.value,
        _fmt_rate(r.opm60, full),
        _fmt_rate(r.dpm60, full),
        _fmt_rate(r.apm60, full),
        _fmt_count(r.opm, full),
        _fmt_count(r.dpm, full),
        _fmt_count(r.apm, full),
        _fmt_count(r.oerr, full),
        _fmt_count(r.derr, full),
        _fmt_count(r.err, full),
        f"{r.mins:.17g}" if full else f"{r.mins:.0f}",
        _fmt_count(r.stats.gf, full),
        _fmt_count(r.stats.ga, full),
        _fmt_count(r.stats.ng, full),
        _fmt_rate(r.stats.gf60, full),
        _fmt_rate(r.stats.ga60, full),
        _fmt_rate(r.stats.ng60, full),
        *mate_cells,
    ]


def write_ratings_csv(ratings: list[PlayerRating], path, precision: str = "table") -> None:
    """Full ratings table, one row per player, ordered by total rating.

    Ordering is descending apm with player-id tie-breaks, so identical
    inputs always produce byte-identical files. Goalie offensive cells are
    written as NA.
    """
    if precision not in ("table", "full"):
        raise ValueError(f"unknown precision {precision!r}")
    full = precision == "full"
    ordered = sorted(ratings, key=lambda r: (-r.apm, r.player.player_id))
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(RATINGS_COLUMNS)
        for i, r in enumerate(ordered):
            writer.writerow(_rating_row(i + 1, r, full))


@dataclass(frozen=True)
class RatingsRow:
    """One parsed row of a ratings CSV (numbers only, no Player objects)."""

    player_id: str
    name: str
    pos: str
    values: dict[str, float | None]


def read_ratings_csv(path) -> list[RatingsRow]:
    rows: list[RatingsRow] = []
    numeric = [c for c in RATINGS_COLUMNS if c not in
               ("rank", "player_id", "name", "pos", "teammate1", "teammate2", "teammate3")]
    with open(path, newline="", encoding="utf-8") as handle:
        for row in csv.DictReader(handle):
            values: dict[str, float | None] = {}
            for col in numeric:
                raw = row[col]
                values[col] = None if raw == "NA" else float(raw)
            rows.append(
                RatingsRow(player_id=row["player_id"], name=row["name"],
                           pos=row["pos"], values=values)
            )
    return rows


_POS_GROUP = {"C": "F", "LW": "F", "RW": "F", "D": "D", "G": "G"}


def top_n_rows(
    rows: list[RatingsRow],
    key: str,
    n: int,
    positions: set[str] | None = None,
    min_minutes: float | None = None,
) -> list[tuple[int, RatingsRow]]:
    """top_n over parsed CSV rows, with the same global-rank semantics."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if rows and key not in rows[0].values:
        raise ValueError(f"unknown metric {key!r}")
    scored = [r for r in rows if r.values.get(key) is not None]
    ordered = sorted(scored, key=lambda r: (-r.values[key], r.player_id))
    table = [(i + 1, r) for i, r in enumerate(ordered)]
    if positions is not None:
        table = [(rk, r) for rk, r in table if _POS_GROUP[r.pos] in positions]
    if min_minutes is not None:
        table = [(rk, r) for rk, r in table if (r.values.get("mins") or 0.0) >= min_minutes]
    return table[:n]


def format_table(header: list[str], rows: list[list[str]]) -> str:
    """Plain-text aligned table for terminal output."""
    widths = [len(h) for h in header]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = [
        "  ".join(h.ljust(widths[i]) for i, h in enumerate(header)).rstrip(),
    ]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    return "\n".join(lines) + "\n"


def top_n_table(
    ratings: list[PlayerRating],
    key: str,
    n: int,
    positions: set[str] | None = None,
    min_minutes: float | None = None,
) -> tuple[list[str], list[list[str]]]:
    """Header and formatted rows for a top-n listing."""
    getter = _metric(key)
    header = ["Rk", "Player", "Pos", key, "Err", "Mins", "APM"]
    rows = []
    for rank, r in top_n(ratings, key, n, positions=positions, min_minutes=min_minutes):
        rows.append(
            [
                str(rank),
                r.player.name,
                r.player.position.value,
                _fmt_rate(getter(r), False) if key.endswith("60") else _fmt_count(getter(r), False),
                _fmt_count(r.err, False),
                f"{r.mins:.0f}",
                _fmt_count(r.apm, False),
            ]
        )
    return header, rows

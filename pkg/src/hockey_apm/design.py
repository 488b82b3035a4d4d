"""Construct weighted regression observations and sparse design matrices.

Three designs are built from validated shifts:

* split-shift model: each shift becomes two rows (home offense, away
  offense) with per-skater offense columns, per-skater defense columns and
  per-goalie defense columns, all +1 indicators;
* net-goals model: one row per shift, response net goals/60 for the home
  team, one column per player valued +1 (home) or -1 (away);
* total-goals model: one row per shift, response total goals/60, one
  column per on-ice player valued +1.

The net and total designs share one column map so their fits line up
player by player.

Players below the eligibility cutoff are dropped from the columns by
default and act as the implicit zero reference level; ``subthreshold="pool"``
instead maps them to shared per-position replacement columns. Dropping is
the default because pooled columns restore the exact indicator-sum
dependences that sub-threshold players would otherwise break.

When a dataset leaves an indicator group's row-sum constant across every
row (e.g. a fully-eligible league where each row always carries exactly one
goalie column), the design is rank-deficient no matter how much data there
is. Construction detects those dependences and records sum-to-zero
centering constraints for the participating groups; the solver enforces
them so effects are identified relative to the group average.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix

from .shift_model import Player, Shift

SECONDS_PER_HOUR = 3600.0


class DesignError(ValueError):
    pass


@dataclass(frozen=True)
class Column:
    """One design column: a (player, role) pair or a replacement pool."""

    key: str
    role: str  # "offense" | "defense" | "net"
    player_id: str | None = None
    pool: str | None = None  # position group "F" | "D" | "G" for pool columns

    @property
    def is_pool(self) -> bool:
        return self.pool is not None


class ColumnMap:
    """Bijection between columns and indices, with role-based lookups."""

    def __init__(self, columns: list[Column]):
        self.columns: tuple[Column, ...] = tuple(columns)
        self._index: dict[str, int] = {col.key: i for i, col in enumerate(self.columns)}
        if len(self._index) != len(self.columns):
            raise DesignError("duplicate column keys")

    def __len__(self) -> int:
        return len(self.columns)

    def index_of(self, key: str) -> int:
        return self._index[key]

    def get(self, key: str) -> int | None:
        return self._index.get(key)

    def player_index(self, role: str, player_id: str) -> int:
        key = f"{role}:{player_id}"
        if key not in self._index:
            raise KeyError(f"no {role} column for player {player_id!r}")
        return self._index[key]

    def player_ids(self, role: str) -> list[str]:
        return [c.player_id for c in self.columns if c.role == role and c.player_id is not None]


@dataclass(frozen=True)
class Observation:
    """One weighted regression row: response in goals/60, weight in seconds,
    and a sparse list of (column index, value) entries."""

    response: float
    weight: float
    columns: tuple[tuple[int, float], ...]


@dataclass
class DesignMatrix:
    """Sparse row-major design with column metadata and response/weights.

    ``constraints`` lists sum-to-zero column groups the solver must enforce
    (empty for fully identified designs). The intercept is implicit; the
    solver appends it.
    """

    column_map: ColumnMap
    row_ptr: np.ndarray  # CSR-style offsets into col_idx/values, len n_rows+1
    col_idx: np.ndarray
    values: np.ndarray
    response: np.ndarray
    weights: np.ndarray
    constraints: tuple[tuple[str, tuple[int, ...]], ...] = field(default_factory=tuple)

    @property
    def n_rows(self) -> int:
        return len(self.response)

    @property
    def n_cols(self) -> int:
        return len(self.column_map)

    def matrix(self) -> csr_matrix:
        return csr_matrix(
            (self.values, self.col_idx, self.row_ptr), shape=(self.n_rows, self.n_cols)
        )

    def observation(self, i: int) -> Observation:
        lo, hi = self.row_ptr[i], self.row_ptr[i + 1]
        cols = tuple(
            (int(c), float(v)) for c, v in zip(self.col_idx[lo:hi], self.values[lo:hi])
        )
        return Observation(float(self.response[i]), float(self.weights[i]), cols)

    @property
    def observations(self) -> list[Observation]:
        return [self.observation(i) for i in range(self.n_rows)]

    def to_dense(self) -> np.ndarray:
        return self.matrix().toarray()

    def scaled_weights(self, factor: float) -> "DesignMatrix":
        """Copy of this design with every weight multiplied by ``factor``."""
        if factor <= 0:
            raise ValueError("weight scale factor must be positive")
        return DesignMatrix(
            column_map=self.column_map,
            row_ptr=self.row_ptr,
            col_idx=self.col_idx,
            values=self.values,
            response=self.response,
            weights=self.weights * factor,
            constraints=self.constraints,
        )

    def dump(self, triplet_path, column_map_path) -> None:
        """Debug dump: 'row col value' triplets plus a column-map sidecar."""
        with open(triplet_path, "w", encoding="utf-8") as handle:
            for i in range(self.n_rows):
                lo, hi = self.row_ptr[i], self.row_ptr[i + 1]
                for c, v in zip(self.col_idx[lo:hi], self.values[lo:hi]):
                    handle.write(f"{i} {c} {v:g}\n")
        sidecar = {
            "columns": [
                {"index": i, "key": col.key, "role": col.role,
                 "player_id": col.player_id, "pool": col.pool}
                for i, col in enumerate(self.column_map.columns)
            ],
            "constraints": [
                {"name": name, "columns": list(cols)} for name, cols in self.constraints
            ],
        }
        with open(column_map_path, "w", encoding="utf-8") as handle:
            json.dump(sidecar, handle, indent=2)
            handle.write("\n")


def _position_group(roster: dict[str, Player], pid: str, game_id: str) -> str:
    try:
        return roster[pid].position.group
    except KeyError:
        raise DesignError(f"shift {game_id}: player {pid!r} missing from roster")


class _Builder:
    """Accumulates triplets row by row and tracks per-group row sums."""

    def __init__(self, column_map: ColumnMap, group_of_col: dict[int, int], n_groups: int):
        self.column_map = column_map
        self.group_of_col = group_of_col
        self.n_groups = n_groups
        self.row_ptr = [0]
        self.col_idx: list[int] = []
        self.values: list[float] = []
        self.response: list[float] = []
        self.weights: list[float] = []
        self.group_sums: list[tuple] = []

    def add_row(self, entries: list[tuple[int, float]], response: float, weight: float):
        sums = [0.0] * self.n_groups
        for col, val in entries:
            self.col_idx.append(col)
            self.values.append(val)
            sums[self.group_of_col[col]] += val
        self.row_ptr.append(len(self.col_idx))
        self.response.append(response)
        self.weights.append(weight)
        self.group_sums.append(tuple(sums))

    def finish(self, group_names: list[str]) -> DesignMatrix:
        constraints = _detect_constraints(
            self.group_sums, group_names, self.group_of_col, len(self.column_map)
        )
        return DesignMatrix(
            column_map=self.column_map,
            row_ptr=np.asarray(self.row_ptr, dtype=np.int64),
            col_idx=np.asarray(self.col_idx, dtype=np.int32),
            values=np.asarray(self.values, dtype=np.float64),
            response=np.asarray(self.response, dtype=np.float64),
            weights=np.asarray(self.weights, dtype=np.float64),
            constraints=constraints,
        )


def _detect_constraints(group_sums, group_names, group_of_col, n_cols):
    """Find exact linear dependences among group-indicator sums and the
    intercept, and emit a centering constraint per participating group.

    The per-row sums of each column group span a tiny subspace; any null
    combination of [group sums | 1] is an exact null vector of the full
    design. Centering every group that participates in some null vector
    removes the degeneracy without touching genuinely estimable directions
    in datasets (like full league histories with sub-threshold players)
    where the sums vary row to row.
    """
    if not group_sums:
        return ()
    distinct = sorted(set(group_sums))
    n_groups = len(group_names)
    matrix = np.array([list(row) + [1.0] for row in distinct], dtype=np.float64)
    # Null space via SVD; sums are small counts so the scale is benign.
    _, svals, vt = np.linalg.svd(matrix, full_matrices=True)
    tol = 1e-9 * max(1.0, svals[0] if len(svals) else 0.0)
    nullity = matrix.shape[1] - int((svals > tol).sum())
    participating: set[int] = set()
    for row in vt[matrix.shape[1] - nullity:]:
        for g in range(n_groups):
            if abs(row[g]) > 1e-9:
                participating.add(g)
    constraints = []
    for g in sorted(participating):
        cols = tuple(sorted(c for c, grp in group_of_col.items() if grp == g))
        if cols:
            constraints.append((f"center:{group_names[g]}", cols))
    return tuple(constraints)


def _split_eligibility(shifts, roster, eligible):
    onice: set[str] = set()
    for shift in shifts:
        onice.update(shift.onice)
    skaters = sorted(p for p in onice if p in eligible and roster[p].position.is_skater)
    goalies = sorted(p for p in onice if p in eligible and roster[p].position.is_goalie)
    ineligible = onice - set(skaters) - set(goalies)
    return skaters, goalies, ineligible


def _check_not_all_ineligible(shift: Shift, mapped_entries: int) -> None:
    if mapped_entries == 0:
        raise DesignError(
            f"shift {shift.game_id} ({shift.season}): every on-ice player is "
            "below the eligibility cutoff and pooling is disabled"
        )


def build_ib_design(
    shifts,
    roster: dict[str, Player],
    eligible: set[str],
    subthreshold: str = "drop",
) -> DesignMatrix:
    """Split-shift design: two rows per shift, offense/defense indicators.

    Home-offense row: response = home goals * 3600 / duration, +1 in the
    offense column of each eligible home skater and in the defense column
    of each eligible away skater and the away goalie. The away-offense row
    mirrors it. Both rows carry weight = duration_s. Goalies get no
    offense column.
    """
    if subthreshold not in ("drop", "pool"):
        raise ValueError(f"unknown subthreshold mode {subthreshold!r}")
    if not eligible:
        raise DesignError("eligible set is empty")
    skaters, goalies, ineligible = _split_eligibility(shifts, roster, eligible)

    columns = [Column(key=f"off:{p}", role="offense", player_id=p) for p in skaters]
    columns += [Column(key=f"def:{p}", role="defense", player_id=p) for p in skaters]
    columns += [Column(key=f"def:{p}", role="defense", player_id=p) for p in goalies]
    pool_mode = subthreshold == "pool"
    if pool_mode and ineligible:
        groups_present = sorted({_position_group(roster, p, "?") for p in ineligible})
        for grp in groups_present:
            if grp in ("F", "D"):
                columns.append(Column(key=f"off:pool:{grp}", role="offense", pool=grp))
        for grp in groups_present:
            columns.append(Column(key=f"def:pool:{grp}", role="defense", pool=grp))
    cmap = ColumnMap(columns)

    # groups for dependence detection: skater offense, skater defense, goalie defense
    group_names = ["offense", "defense_skater", "defense_goalie"]
    goalie_set = set(goalies)
    group_of_col: dict[int, int] = {}
    for i, col in enumerate(cmap.columns):
        if col.role == "offense":
            group_of_col[i] = 0
        elif col.pool == "G" or (col.player_id is not None and col.player_id in goalie_set):
            group_of_col[i] = 2
        else:
            group_of_col[i] = 1

    def offense_entry(pid: str) -> tuple[int, float] | None:
        key = f"off:{pid}"
        idx = cmap.get(key)
        if idx is not None:
            return (idx, 1.0)
        if pool_mode:
            grp = _position_group(roster, pid, "?")
            pooled = cmap.get(f"off:pool:{grp}")
            if pooled is not None:
                return (pooled, 1.0)
        return None

    def defense_entry(pid: str) -> tuple[int, float] | None:
        idx = cmap.get(f"def:{pid}")
        if idx is not None:
            return (idx, 1.0)
        if pool_mode:
            grp = _position_group(roster, pid, "?")
            pooled = cmap.get(f"def:pool:{grp}")
            if pooled is not None:
                return (pooled, 1.0)
        return None

    builder = _Builder(cmap, group_of_col, len(group_names))
    for shift in shifts:
        scale = SECONDS_PER_HOUR / shift.duration_s
        mapped = 0
        for attackers, defenders, goalie, goals in (
            (shift.home_skaters, shift.away_skaters, shift.away_goalie, shift.home_goals),
            (shift.away_skaters, shift.home_skaters, shift.home_goalie, shift.away_goals),
        ):
            entries: list[tuple[int, float]] = []
            for pid in attackers:
                entry = offense_entry(pid)
                if entry is not None:
                    entries.append(entry)
            for pid in defenders:
                entry = defense_entry(pid)
                if entry is not None:
                    entries.append(entry)
            entry = defense_entry(goalie)
            if entry is not None:
                entries.append(entry)
            mapped += len(entries)
            builder.add_row(entries, goals * scale, shift.duration_s)
        _check_not_all_ineligible(shift, mapped)
    return builder.finish(group_names)


def _build_r_design(shifts, roster, eligible, subthreshold, total: bool) -> DesignMatrix:
    if subthreshold not in ("drop", "pool"):
        raise ValueError(f"unknown subthreshold mode {subthreshold!r}")
    if not eligible:
        raise DesignError("eligible set is empty")
    skaters, goalies, ineligible = _split_eligibility(shifts, roster, eligible)

    columns = [Column(key=f"net:{p}", role="net", player_id=p) for p in skaters + goalies]
    pool_mode = subthreshold == "pool"
    if pool_mode and ineligible:
        for grp in sorted({_position_group(roster, p, "?") for p in ineligible}):
            columns.append(Column(key=f"net:pool:{grp}", role="net", pool=grp))
    cmap = ColumnMap(columns)

    group_names = ["skater", "goalie"]
    goalie_set = set(goalies)
    group_of_col = {
        i: (1 if col.pool == "G" or (col.player_id in goalie_set) else 0)
        for i, col in enumerate(cmap.columns)
    }

    def entry(pid: str, value: float) -> tuple[int, float] | None:
        idx = cmap.get(f"net:{pid}")
        if idx is not None:
            return (idx, value)
        if pool_mode:
            pooled = cmap.get(f"net:pool:{_position_group(roster, pid, '?')}")
            if pooled is not None:
                return (pooled, value)
        return None

    builder = _Builder(cmap, group_of_col, len(group_names))
    for shift in shifts:
        scale = SECONDS_PER_HOUR / shift.duration_s
        if total:
            response = (shift.home_goals + shift.away_goals) * scale
            away_value = 1.0
        else:
            response = (shift.home_goals - shift.away_goals) * scale
            away_value = -1.0
        entries: list[tuple[int, float]] = []
        for pid in shift.home_onice:
            e = entry(pid, 1.0)
            if e is not None:
                entries.append(e)
        for pid in shift.away_onice:
            e = entry(pid, away_value)
            if e is not None:
                entries.append(e)
        _check_not_all_ineligible(shift, len(entries))
        builder.add_row(entries, response, shift.duration_s)
    return builder.finish(group_names)


def build_r_net_design(shifts, roster, eligible, subthreshold: str = "drop") -> DesignMatrix:
    """Net-goals design: one row per shift, +1 home players, -1 away players,
    response = (home goals - away goals) * 3600 / duration."""
    return _build_r_design(shifts, roster, eligible, subthreshold, total=False)


def build_r_total_design(shifts, roster, eligible, subthreshold: str = "drop") -> DesignMatrix:
    """Total-goals design: one row per shift, +1 for every on-ice player,
    response = (home goals + away goals) * 3600 / duration."""
    return _build_r_design(shifts, roster, eligible, subthreshold, total=True)

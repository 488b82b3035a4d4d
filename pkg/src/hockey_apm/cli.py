"""Command-line surface tying the pipeline together.

Subcommands::

    hockey-apm simulate  --out DIR --seed N [league sizing flags]
    hockey-apm ingest    --input shifts.csv --out DIR
    hockey-apm fit       --input DIR/validated_shifts.csv --roster roster.csv --out DIR
    hockey-apm rate      like fit, plus ratings.csv with linemates and raw stats
    hockey-apm report    --input DIR/ratings.csv --metric apm --top 10 [--pos D]
    hockey-apm kde       --input DIR/ratings.csv --metric opm60 --pos F,D --out kde.csv

Each stage persists its outputs so later stages never silently recompute
earlier ones, and every run logs its fully-resolved configuration. Outputs
are deterministic for fixed inputs and flags; --threads is accepted for
interface stability but never changes results.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__, design, ingest, pipeline, report, simulate, wls

POSITION_GROUPS = ("F", "D", "G")


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--threads", type=int, default=1,
                        help="reserved; results are identical for every value")
    parser.add_argument("--seed", type=int, default=42)


def _positions_arg(value: str) -> set[str]:
    groups = {part.strip().upper() for part in value.split(",") if part.strip()}
    unknown = groups - set(POSITION_GROUPS)
    if unknown:
        raise argparse.ArgumentTypeError(
            f"unknown position group(s) {sorted(unknown)}; use F, D, G"
        )
    return groups


def _log_config(out_dir: Path | None, command: str, args: argparse.Namespace) -> None:
    resolved = {"command": command, "version": __version__}
    for key, value in sorted(vars(args).items()):
        if key == "func":
            continue
        resolved[key] = str(value) if isinstance(value, Path) else value
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        with open(out_dir / "run_config.json", "w", encoding="utf-8") as handle:
            json.dump(resolved, handle, indent=2, sort_keys=True)
            handle.write("\n")
    else:
        print(f"# config: {json.dumps(resolved, sort_keys=True)}", file=sys.stderr)


def cmd_simulate(args) -> int:
    config = simulate.SimConfig(
        n_teams=args.teams,
        skaters_per_team=args.skaters_per_team,
        goalies_per_team=args.goalies_per_team,
        n_seasons=args.seasons,
        games_per_season=args.games_per_season,
        shifts_per_game=args.shifts_per_game,
        mean_shift_s=args.mean_shift_s,
        effect_spread=args.effect_spread,
        league_base=args.league_base,
        seed=args.seed,
    )
    if args.twin_fraction is None:
        shifts, truth, roster = simulate.generate(config)
    else:
        shifts, truth, roster = simulate.twin_scenario(config, args.twin_fraction)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _log_config(out, "simulate", args)
    ingest.write_shift_csv(shifts, out / "shifts.csv")
    ingest.write_roster_csv(roster, out / "roster.csv")
    simulate.write_ground_truth_csv(truth, out / "ground_truth.csv")
    print(f"wrote {len(shifts)} shifts for {len(roster)} players to {out}")
    return 0


def cmd_ingest(args) -> int:
    records = ingest.parse_shift_file(args.input)
    shifts, rep = ingest.filter_shifts(records)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _log_config(out, "ingest", args)
    ingest.write_shift_csv(shifts, out / "validated_shifts.csv")
    with open(out / "filter_report.json", "w", encoding="utf-8") as handle:
        json.dump(rep.as_dict(), handle, indent=2, sort_keys=True)
        handle.write("\n")
    for key, value in rep.as_dict().items():
        print(f"{key}: {value}")
    return 0


def _load_validated(args):
    records = ingest.parse_shift_file(args.input)
    shifts, _ = ingest.filter_shifts(records)
    roster = ingest.parse_roster_file(args.roster)
    return shifts, roster


def _write_fit_csv(fit_result, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        handle.write("column_id,estimate,std_error\n")
        handle.write(f"intercept,{fit_result.intercept:.17g},{fit_result.intercept_se:.17g}\n")
        for i, col in enumerate(fit_result.column_map.columns):
            handle.write(
                f"{col.key},{fit_result.coefficients[i]:.17g},{fit_result.std_errors[i]:.17g}\n"
            )


def _run_models(args, shifts, roster):
    result = pipeline.run_pipeline(
        shifts,
        roster,
        min_shifts=args.min_shifts,
        model=args.model,
        collinearity=args.collinearity,
        subthreshold=args.subthreshold,
        compute_linemates=True,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if result.ib_fit is not None:
        _write_fit_csv(result.ib_fit, out / "fit_ib.csv")
        flags = result.ib_fit.diagnostics
        print(f"split-shift fit: dof={result.ib_fit.dof} sigma2={result.ib_fit.sigma2:.4g}"
              + (" [ridge]" if flags.ridge_applied else ""))
    if result.net_fit is not None:
        _write_fit_csv(result.net_fit, out / "fit_net.csv")
        _write_fit_csv(result.total_fit, out / "fit_total.csv")
        flags = result.net_fit.diagnostics
        print(f"net/total fits: dof={result.net_fit.dof} sigma2={result.net_fit.sigma2:.4g}"
              + (" [ridge]" if flags.ridge_applied else ""))
    if args.model != "both":
        print("warning: single model selected; averaging skipped", file=sys.stderr)
    return result


def cmd_fit(args) -> int:
    shifts, roster = _load_validated(args)
    _log_config(Path(args.out), "fit", args)
    _run_models(args, shifts, roster)
    return 0


def cmd_rate(args) -> int:
    shifts, roster = _load_validated(args)
    _log_config(Path(args.out), "rate", args)
    result = _run_models(args, shifts, roster)
    out = Path(args.out)
    report.write_ratings_csv(result.ratings, out / "ratings.csv", precision=args.precision)
    print(f"rated {len(result.ratings)} players -> {out / 'ratings.csv'}")
    return 0


def cmd_report(args) -> int:
    _log_config(None, "report", args)
    rows = report.read_ratings_csv(args.input)
    table = report.top_n_rows(
        rows, args.metric, args.top,
        positions=args.pos, min_minutes=args.min_minutes,
    )
    header = ["Rk", "Player", "Pos", args.metric, "Err", "Mins", "APM"]
    body = []
    for rank, row in table:
        body.append([
            str(rank), row.name, row.pos,
            _cell(row.values.get(args.metric)),
            _cell(row.values.get("err")),
            _cell(row.values.get("mins"), "{:.0f}"),
            _cell(row.values.get("apm")),
        ])
    if args.format == "csv":
        lines = [",".join(header)] + [",".join(r) for r in body]
        text = "\n".join(lines) + "\n"
    else:
        text = report.format_table(header, body)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _cell(value, fmt="{:g}"):
    return "NA" if value is None else fmt.format(value)


def cmd_kde(args) -> int:
    _log_config(None, "kde", args)
    rows = report.read_ratings_csv(args.input)
    groups = sorted(args.pos) if args.pos else ["all"]
    curves = {}
    for group in groups:
        values = [
            row.values[args.metric]
            for row in rows
            if row.values.get(args.metric) is not None
            and (group == "all" or _group_of(row.pos) == group)
        ]
        if len(values) < 2:
            print(f"error: fewer than two {args.metric} values for group {group}",
                  file=sys.stderr)
            return 1
        curves[group] = report.kde(values, bandwidth=args.bandwidth)
    report.write_kde_csv(curves, args.out)
    print(f"wrote {len(curves)} curve(s) to {args.out}")
    return 0


def _group_of(pos: str) -> str:
    return {"C": "F", "LW": "F", "RW": "F", "D": "D", "G": "G"}[pos]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hockey-apm",
        description="Adjusted plus-minus player ratings from shift-level data",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic league with known effects")
    p.add_argument("--out", required=True)
    p.add_argument("--teams", type=int, default=8)
    p.add_argument("--skaters-per-team", type=int, default=13)
    p.add_argument("--goalies-per-team", type=int, default=2)
    p.add_argument("--seasons", type=int, default=3)
    p.add_argument("--games-per-season", type=int, default=250)
    p.add_argument("--shifts-per-game", type=int, default=40)
    p.add_argument("--mean-shift-s", type=float, default=50.0)
    p.add_argument("--effect-spread", type=float, default=0.35)
    p.add_argument("--league-base", type=float, default=3.0)
    p.add_argument("--twin-fraction", type=float, default=None,
                   help="force a designated pair on ice together with this probability")
    _add_common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("ingest", help="validate and filter a shift file")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_ingest)

    for name, func, extra_help in (
        ("fit", cmd_fit, "fit the selected models and persist coefficients"),
        ("rate", cmd_rate, "fit models and write the full ratings CSV"),
    ):
        p = sub.add_parser(name, help=extra_help)
        p.add_argument("--input", required=True, help="validated shifts CSV")
        p.add_argument("--roster", required=True)
        p.add_argument("--out", required=True)
        p.add_argument("--min-shifts", type=int, default=pipeline.DEFAULT_MIN_SHIFTS)
        p.add_argument("--model", choices=("ib", "r", "both"), default="both")
        p.add_argument("--collinearity", choices=("error", "ridge"), default="error")
        p.add_argument("--subthreshold", choices=("drop", "pool"), default="drop")
        if name == "rate":
            p.add_argument("--precision", choices=("table", "full"), default="table")
        _add_common(p)
        p.set_defaults(func=func)

    p = sub.add_parser("report", help="top-N table from a ratings CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--metric", default="apm")
    p.add_argument("--top", type=int, default=10)
    p.add_argument("--pos", type=_positions_arg, default=None)
    p.add_argument("--min-minutes", type=float, default=None)
    p.add_argument("--format", choices=("text", "csv"), default="text")
    p.add_argument("--out", default=None)
    _add_common(p)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("kde", help="kernel density curves for a rating metric")
    p.add_argument("--input", required=True)
    p.add_argument("--metric", default="apm60")
    p.add_argument("--pos", type=_positions_arg, default=None)
    p.add_argument("--bandwidth", type=float, default=None)
    p.add_argument("--out", required=True)
    _add_common(p)
    p.set_defaults(func=cmd_kde)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        ingest.ShiftFileError,
        ingest.SchemaError,
        design.DesignError,
        wls.CollinearityError,
        wls.SizingError,
        simulate.SimConfigError,
        FileNotFoundError,
        ValueError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

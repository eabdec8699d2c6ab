"""Command-line surface: ingestion, indexing, fitting, synthesis.

Every subcommand is deterministic given its flags and input bytes.
Data goes to the output file or stdout; diagnostics go to stderr; the
exit code is 0 exactly when no error occurred.  The default output
format can be preset with the LOGDEX_FORMAT environment variable.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from datetime import date

from . import corpus as corpus_mod
from . import stats as stats_mod
from . import synth as synth_mod
from .indexes import GammaConfig

FORMAT_ENV_VAR = "LOGDEX_FORMAT"

# regression vocabulary: report fields usable as response/regressors
_NUMERIC_FIELDS = (
    "d_tot", "n_tot", "n_pos", "k", "k_star", "d_star", "kappa", "kappa_star",
    "f_star", "h", "g", "w", "omega", "u", "mu", "v", "T", "composite",
)


def _default_format() -> str:
    value = os.environ.get(FORMAT_ENV_VAR, "csv").strip().lower()
    return value if value in ("csv", "json") else "csv"


def _in_source(path: str):
    return sys.stdin if path == "-" else path


def _out_dest(path: str | None):
    return sys.stdout if path in (None, "-") else path


def _iso_date(raw: str) -> date:
    try:
        return date.fromisoformat(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected YYYY-MM-DD, got {raw!r}") from None


def _load_profiles(args) -> list[corpus_mod.AuthorProfile]:
    profiles = corpus_mod.parse_corpus(_in_source(args.input_path), args.format)
    totals_path = getattr(args, "totals", None)
    if totals_path:
        totals = corpus_mod.parse_totals(totals_path)
        profiles = corpus_mod.with_declared_totals(profiles, totals)
    return profiles


def _write_pairs(pairs: list[tuple[str, object]], dest, format: str) -> None:
    """Write statistic/value rows as CSV or one JSON object."""
    with corpus_mod.open_text(dest, "w") as stream:
        if format == "json":
            json.dump({k: v for k, v in pairs}, stream, indent=2)
            stream.write("\n")
            return
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(["statistic", "value"])
        for key, value in pairs:
            if value is None:
                writer.writerow([key, ""])
            elif isinstance(value, float):
                writer.writerow([key, f"{value:.10g}"])
            else:
                writer.writerow([key, str(value)])


def _fit_pairs(fit: stats_mod.FitResult, terms: list[str]) -> list[tuple[str, object]]:
    pairs: list[tuple[str, object]] = []
    for name, coef in zip(terms, fit.coefficients):
        pairs.append((f"coef_{name}", coef))
    for name, se in zip(terms, fit.std_errors or [None] * len(terms)):
        pairs.append((f"se_{name}", se))
    for name, t in zip(terms, fit.t_stats or [None] * len(terms)):
        pairs.append((f"t_{name}", t))
    pairs.append(("r_squared", fit.r_squared))
    pairs.append(("adj_r_squared", fit.adj_r_squared))
    pairs.append(("f_statistic", fit.f_statistic))
    pairs.append(("n_obs", fit.n_obs))
    return pairs


# ---------------------------------------------------------------------------
# subcommands


def cmd_index(args) -> int:
    profiles = _load_profiles(args)
    config = GammaConfig(gamma=args.gamma)
    reports = corpus_mod.build_reports(profiles, config, args.as_of)
    corpus_mod.write_reports(reports, _out_dest(args.output_path), args.format)
    return 0


def cmd_summary(args) -> int:
    profiles = _load_profiles(args)
    config = GammaConfig(gamma=args.gamma)
    reports = corpus_mod.build_reports(profiles, config, args.as_of)
    rows = corpus_mod.cross_section(reports)
    dest = _out_dest(args.output_path)
    with corpus_mod.open_text(dest, "w") as stream:
        if args.format == "json":
            payload = {
                name: None if summary is None else {
                    "min": summary.min, "q1": summary.q1, "median": summary.median,
                    "mean": summary.mean, "q3": summary.q3, "max": summary.max,
                }
                for name, summary in rows.items()
            }
            json.dump(payload, stream, indent=2)
            stream.write("\n")
        else:
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(["quantity", "min", "q1", "median", "mean", "q3", "max"])
            for name, summary in rows.items():
                if summary is None:
                    writer.writerow([name, "", "", "", "", "", ""])
                else:
                    writer.writerow([name] + [f"{x:.6g}" for x in
                                              (summary.min, summary.q1, summary.median,
                                               summary.mean, summary.q3, summary.max)])
    return 0


def _downloads_for_rank_fit(args) -> list[int]:
    if args.reports:
        reports = corpus_mod.read_reports(_in_source(args.input_path), args.format)
        totals = [r.d_tot for r in reports]
    else:
        profiles = corpus_mod.parse_corpus(_in_source(args.input_path), args.format)
        totals = [corpus_mod.clean(p).vector.d_tot for p in profiles]
    return [t for t in totals if t >= 1]


def cmd_fit_rank(args) -> int:
    downloads = _downloads_for_rank_fit(args)
    fit = stats_mod.fit_rank_curve(downloads)
    a, b, c = fit.coefficients
    pairs = _fit_pairs(fit, ["a", "b", "c"])
    lower, upper = stats_mod.inflection_points(a, b, c)
    pairs.append(("inflection_d", upper))
    pairs.append(("inflection_d_lower", lower))
    _write_pairs(pairs, _out_dest(args.output_path), args.format)
    return 0


def cmd_fit_gauss(args) -> int:
    profiles = corpus_mod.parse_corpus(_in_source(args.input_path), args.format)
    values = []
    for profile in profiles:
        cleaned = corpus_mod.clean(profile)
        if cleaned.n_tot >= 1 and cleaned.vector.d_tot >= 1:
            values.append(math.log(cleaned.vector.d_tot / cleaned.n_tot))
    curve = stats_mod.kde(values, args.grid_size)
    fit = stats_mod.fit_gaussian(curve)
    pairs = [
        ("mean", fit.mean),
        ("sd", fit.sd),
        ("peak", fit.peak),
        ("residual_sse", fit.residual_sse),
        ("bandwidth", curve.bandwidth),
        ("n_authors", len(values)),
    ]
    _write_pairs(pairs, _out_dest(args.output_path), args.format)
    if args.density_out:
        _write_points(args.density_out, curve.grid, curve.values)
    if args.fit_out:
        fitted = [fit.peak * math.exp(-((x - fit.mean) ** 2) / (2.0 * fit.sd * fit.sd)) for x in curve.grid]
        _write_points(args.fit_out, curve.grid, fitted)
    return 0


def _write_points(dest, xs, ys) -> None:
    # plot emissions: bare x,y lines, no header
    with corpus_mod.open_text(dest, "w") as stream:
        for x, y in zip(xs, ys):
            stream.write(f"{x:.10g},{y:.10g}\n")


def cmd_inflect(args) -> int:
    lower, upper = stats_mod.inflection_points(args.a, args.b, args.c)
    pairs = [("inflection_d", upper), ("inflection_d_lower", lower)]
    _write_pairs(pairs, _out_dest(args.output_path), args.format)
    return 0


def _truncate_down(value: float, decimals: int) -> str:
    scale = 10 ** decimals
    return f"{math.floor(value * scale) / scale:.{decimals}f}"


def cmd_top(args) -> int:
    if args.by not in _NUMERIC_FIELDS:
        raise ValueError(f"unknown sort key {args.by!r}")
    reports = corpus_mod.read_reports(_in_source(args.input_path), args.format)

    def sort_value(r):
        value = getattr(r, args.by)
        return -math.inf if value is None else float(value)

    ordered = sorted(reports, key=lambda r: (-sort_value(r), -r.d_tot, r.author_id))
    chosen = ordered[: args.top_n]
    dest = _out_dest(args.output_path)
    with corpus_mod.open_text(dest, "w") as stream:
        rows = []
        for position, r in enumerate(chosen, start=1):
            value = getattr(r, args.by)
            if value is None:
                shown: object = None
            elif isinstance(value, int):
                shown = value
            else:
                shown = _truncate_down(float(value), 3)
            rows.append({
                "rank": position,
                "author_id": r.author_id,
                args.by: shown,
                "d_star": math.floor(r.d_star),
                "f_star": math.floor(r.f_star),
                "d_tot": r.d_tot,
                "n_tot": r.n_tot,
            })
        if args.format == "json":
            json.dump(rows, stream, indent=2)
            stream.write("\n")
        else:
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(["rank", "author_id", args.by, "d_star", "f_star", "d_tot", "n_tot"])
            for row in rows:
                writer.writerow(["" if v is None else v for v in row.values()])
    return 0


def cmd_synth(args) -> int:
    base = synth_mod.default_params()
    params = synth_mod.SynthParams(
        n_authors=args.authors if args.authors is not None else base.n_authors,
        paper_count_mean_log=args.count_mean_log if args.count_mean_log is not None else base.paper_count_mean_log,
        paper_count_sd_log=args.count_sd_log if args.count_sd_log is not None else base.paper_count_sd_log,
        author_quality_mean=args.quality_mean if args.quality_mean is not None else base.author_quality_mean,
        author_quality_sd=args.quality_sd if args.quality_sd is not None else base.author_quality_sd,
        paper_noise_sd=args.noise_sd if args.noise_sd is not None else base.paper_noise_sd,
        seed=args.seed if args.seed is not None else base.seed,
    )
    profiles = synth_mod.generate(params)
    corpus_mod.write_corpus(profiles, _out_dest(args.output_path), args.format)
    if args.totals_out:
        corpus_mod.write_totals(profiles, args.totals_out)
    return 0


def _regress_columns(reports, tokens: list[str]):
    """Resolve response/regressor tokens to per-report values.

    A token is a report field or ln_<field>.  Rows missing any needed
    value are dropped; ln needs a positive argument; using T in any form
    keeps only rows with T >= 1.
    """
    resolved = []
    for token in tokens:
        logged = token.startswith("ln_")
        field = token[3:] if logged else token
        if field not in _NUMERIC_FIELDS:
            raise ValueError(f"unknown regression term {token!r}")
        resolved.append((token, field, logged))
    columns: dict[str, list[float]] = {token: [] for token, _, _ in resolved}
    kept = 0
    for r in reports:
        values = {}
        usable = True
        for token, field, logged in resolved:
            raw = getattr(r, field)
            if raw is None:
                usable = False
                break
            raw = float(raw)
            if field == "T" and raw < 1.0:
                usable = False
                break
            if logged:
                if raw <= 0.0:
                    usable = False
                    break
                values[token] = math.log(raw)
            else:
                values[token] = raw
        if not usable:
            continue
        kept += 1
        for token in values:
            columns[token].append(values[token])
    if kept == 0:
        raise ValueError("no usable rows after filtering absent and out-of-domain values")
    return columns, kept


def cmd_regress(args) -> int:
    reports = corpus_mod.read_reports(_in_source(args.input_path), args.format)
    regressors = [t.strip() for t in args.on.split(",") if t.strip()]
    if not regressors:
        raise ValueError("need at least one regressor")
    columns, kept = _regress_columns(reports, [args.response] + regressors)
    y = columns[args.response]
    design = [[1.0] + [columns[t][i] for t in regressors] for i in range(kept)]
    fit = stats_mod.ols(y, design)
    pairs = _fit_pairs(fit, ["intercept"] + regressors)
    pairs.insert(0, ("response", args.response))
    _write_pairs(pairs, _out_dest(args.output_path), args.format)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="logdex",
        description="Log-scale download indexes and rank statistics over author/paper corpora.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, with_input: bool = True) -> None:
        if with_input:
            p.add_argument("input_path", metavar="INPUT", help="input file, or - for stdin")
        p.add_argument("-o", "--output", dest="output_path", default=None,
                       help="output file, defaults to stdout")
        p.add_argument("-f", "--format", choices=("csv", "json"), default=_default_format(),
                       help=f"file format (default csv, or ${FORMAT_ENV_VAR})")

    p = sub.add_parser("index", help="per-author index report from a corpus")
    add_common(p)
    p.add_argument("--gamma", type=float, default=1.0, help="log scale factor (default 1)")
    p.add_argument("--as-of", dest="as_of", type=_iso_date, default=None,
                   help="reference date for career length, YYYY-MM-DD")
    p.add_argument("--totals", default=None, help="declared-totals side file (author_id,declared_total)")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("summary", help="cross-section summary table from a corpus")
    add_common(p)
    p.add_argument("--gamma", type=float, default=1.0, help="log scale factor (default 1)")
    p.add_argument("--as-of", dest="as_of", type=_iso_date, default=None)
    p.add_argument("--totals", default=None, help="declared-totals side file")
    p.set_defaults(func=cmd_summary)

    p = sub.add_parser("fit-rank", help="quadratic log-log rank curve over author totals")
    add_common(p)
    p.add_argument("--reports", action="store_true",
                   help="input is a report file rather than a corpus")
    p.set_defaults(func=cmd_fit_rank)

    p = sub.add_parser("fit-gauss", help="density of ln(downloads per paper) with a Gaussian fit")
    add_common(p)
    p.add_argument("--grid-size", dest="grid_size", type=int, default=512,
                   help="density grid points (default 512)")
    p.add_argument("--density-out", dest="density_out", default=None,
                   help="write the density curve as x,y lines")
    p.add_argument("--fit-out", dest="fit_out", default=None,
                   help="write the fitted curve as x,y lines")
    p.set_defaults(func=cmd_fit_gauss)

    p = sub.add_parser("inflect", help="concavity change of a fitted rank curve")
    add_common(p, with_input=False)
    p.add_argument("--a", type=float, required=True, help="level coefficient")
    p.add_argument("--b", type=float, required=True, help="slope coefficient")
    p.add_argument("--c", type=float, required=True, help="curvature coefficient")
    p.set_defaults(func=cmd_inflect)

    p = sub.add_parser("top", help="leaderboard from a report file")
    add_common(p)
    p.add_argument("--by", default="k_star", help="report column to sort by (default k_star)")
    p.add_argument("-n", "--top-n", dest="top_n", type=int, default=20,
                   help="rows to keep (default 20)")
    p.set_defaults(func=cmd_top)

    p = sub.add_parser("synth", help="generate a seeded synthetic corpus")
    add_common(p, with_input=False)
    p.add_argument("--seed", type=int, default=None, help="stream seed (default 42)")
    p.add_argument("--authors", type=int, default=None, help="number of authors (default 30000)")
    p.add_argument("--quality-mean", dest="quality_mean", type=float, default=None)
    p.add_argument("--quality-sd", dest="quality_sd", type=float, default=None)
    p.add_argument("--noise-sd", dest="noise_sd", type=float, default=None)
    p.add_argument("--count-mean-log", dest="count_mean_log", type=float, default=None)
    p.add_argument("--count-sd-log", dest="count_sd_log", type=float, default=None)
    p.add_argument("--totals-out", dest="totals_out", default=None,
                   help="also write the declared-totals side file")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("regress", help="linear regression over report columns")
    add_common(p)
    p.add_argument("--response", required=True, help="response column, e.g. k_star or ln_w")
    p.add_argument("--on", required=True, help="comma-separated regressors, e.g. ln_d_tot,ln_n_tot")
    p.set_defaults(func=cmd_regress)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

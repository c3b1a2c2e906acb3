"""Command line pipeline: synth -> enrich -> polarize -> analyze.

Every subcommand reads and validates all of its inputs before it writes
anything, and writes its outputs under ``--out`` with fixed file names.
Exit codes: 0 success, 1 I/O or runtime failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from datetime import datetime
from pathlib import Path
from typing import Callable, Optional

from . import analytics, geo, ingest, ptr, synth
from .errors import ConfigError

log = logging.getLogger("polartrack")

EXIT_OK, EXIT_IO, EXIT_CONFIG = 0, 1, 2

ENRICHED = "enriched.jsonl"
STATS = "stats.json"
TWEET_ASSIGNMENTS = "tweet_assignments.jsonl"
USER_ASSIGNMENTS = "user_assignments.jsonl"
HASHTAG_MAP = "hashtag_map.tsv"
PTR_REPORT = "ptr_report.json"


# -- helpers -------------------------------------------------------------------

def _write_outputs(out_dir: Path, writers: dict[str, Callable]) -> None:
    """Write every file to a temporary name first, then move them all into place."""
    out_dir.mkdir(parents=True, exist_ok=True)
    tmp_paths = []
    try:
        for name, write in writers.items():
            tmp = out_dir / f".{name}.tmp"
            with open(tmp, "w", encoding="utf-8", newline="") as fh:
                write(fh)
            tmp_paths.append((tmp, out_dir / name))
    except BaseException:
        for tmp, _ in tmp_paths:
            tmp.unlink(missing_ok=True)
        raise
    for tmp, final in tmp_paths:
        os.replace(tmp, final)


def _require(args, *names):
    for name in names:
        if getattr(args, name, None) in (None, ""):
            raise ConfigError(f"--{name.replace('_', '-')} is required")


def _existing(path, what: str) -> Path:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"{what} not found: {p}")
    return p


def _read(reader, path, what: str):
    """Call ``reader`` on an existing file; malformed content is a config error."""
    try:
        return reader(_existing(path, what))
    except (ValueError, KeyError, TypeError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"malformed {what} {path}: {exc}") from exc


def _gazetteer(args) -> geo.Gazetteer:
    if args.gazetteer:
        return geo.load_gazetteer(_existing(args.gazetteer, "gazetteer"))
    return geo.load_gazetteer()


def _dump_json(obj) -> Callable:
    return lambda fh: fh.write(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _parse_day(value: str) -> datetime:
    try:
        return ingest.parse_timestamp(value if "T" in value else value + "T00:00:00Z")
    except ValueError as exc:
        raise ConfigError(f"bad date {value!r}") from exc


def _country_list(value: Optional[str]) -> Optional[list[str]]:
    if not value:
        return None
    return [c.strip().upper() for c in value.split(",") if c.strip()]


# -- subcommands ---------------------------------------------------------------

def cmd_enrich(args) -> int:
    _require(args, "input", "topics", "out")
    src = _existing(args.input, "input")
    topics = ingest.load_topic_hashtags(_existing(args.topics, "topic file"))
    gz = _gazetteer(args)

    with open(src, "rb") as fh:
        corpus = ingest.parse_stream(fh, threads=args.threads)
    print(f"input: {corpus.skips.summary()}", file=sys.stderr)
    relevant = ingest.filter_relevant(corpus, topics)
    enriched = geo.enrich_corpus(relevant, gz, threads=args.threads)
    _write_outputs(Path(args.out), {
        ENRICHED: lambda fh: geo.write_enriched(enriched, fh),
        STATS: _dump_json(enriched.stats.to_dict()),
    })
    return EXIT_OK


def _ptr_config(args) -> ptr.PtrConfig:
    return ptr.PtrConfig(beta=args.beta, dominance_factor=args.dominance,
                         max_iterations=args.max_iter, min_class_tweets=args.min_class_tweets)


def cmd_polarize(args) -> int:
    _require(args, "seeds", "out")
    out = Path(args.out)
    enriched = _read(geo.read_enriched, args.enriched or out / ENRICHED, "enriched corpus")
    seeds = _read(ptr.load_seeds, args.seeds, "seed file")
    config = _ptr_config(args)
    gz = _gazetteer(args)
    if not len(enriched):
        raise ConfigError("enriched corpus is empty")

    history: list = []
    state = ptr.ptr_run(enriched.tweets, seeds, config, gz, history=history)
    tweet_cov, user_cov = ptr.coverage_stats(state, enriched.tweets)
    report = {
        "iterations": state.iteration,
        "converged": state.converged,
        "map_sizes": [{"iteration": s.iteration, **s.hashtag_map.sizes()} for s in history],
        "tweet_coverage": tweet_cov,
        "user_coverage": user_cov,
        "n_tweets": len(enriched),
        "n_users": len(state.user_polarity),
        "config": {"beta": config.beta, "dominance_factor": config.dominance_factor,
                   "max_iterations": config.max_iterations,
                   "min_class_tweets": config.min_class_tweets},
    }
    _write_outputs(out, {
        TWEET_ASSIGNMENTS: lambda fh: ptr.write_tweet_assignments(state, fh),
        USER_ASSIGNMENTS: lambda fh: ptr.write_user_assignments(state, fh),
        HASHTAG_MAP: lambda fh: ptr.write_hashtag_report(state, fh),
        PTR_REPORT: _dump_json(report),
    })
    return EXIT_OK


def _load_analysis_inputs(args, need_users=False, need_tweets=False):
    out = Path(args.out)
    enriched = _read(geo.read_enriched, args.enriched or out / ENRICHED, "enriched corpus")
    users = tweets = None
    if need_users:
        users = _read(ptr.read_user_assignments, args.users or out / USER_ASSIGNMENTS,
                      "user assignments")
    if need_tweets:
        tweets = _read(ptr.read_tweet_assignments, args.tweets or out / TWEET_ASSIGNMENTS,
                       "tweet assignments")
    return enriched, users, tweets


def _level(by: str) -> str:
    return "city" if by == "city" else "country"


def cmd_analyze(args) -> int:
    _require(args, "out")
    out = Path(args.out)
    what = args.analysis

    if what == "rho":
        enriched, users, _ = _load_analysis_inputs(args, need_users=True)
        table = analytics.rho_by_region(users, enriched, _level(args.by), args.min_users)
        writers = {f"rho_{_level(args.by)}.csv": lambda fh: analytics.write_rho_table(table, fh)}

    elif what == "perception":
        enriched, users, _ = _load_analysis_inputs(args, need_users=True)
        scope = analytics.PerceptionScope(args.scope)
        table = analytics.rho_by_perception(users, enriched, scope,
                                            1 if args.min_users is None else args.min_users)
        writers = {f"perception_{scope.value}.csv":
                   lambda fh: analytics.write_rho_table(table, fh)}

    elif what in ("timeline", "mentions"):
        enriched, _, _ = _load_analysis_inputs(args)
        groupby = "mention_country" if what == "mentions" else args.by.replace("-", "_")
        series = analytics.volume_series(enriched, groupby, _country_list(args.countries))
        name = "mentions.csv" if what == "mentions" else f"timeline_{groupby}.csv"
        writers = {name: lambda fh: analytics.write_volume_series(series, fh)}

    elif what == "sentiment-mentions":
        _require(args, "country")
        enriched, _, tweets = _load_analysis_inputs(args, need_tweets=True)
        country = args.country.upper()
        series = analytics.sentiment_mention_series(enriched, tweets, country)
        writers = {f"sentiment_mentions_{country}.csv":
                   lambda fh: analytics.write_sentiment_series(country, series, fh)}

    elif what == "variance":
        if args.top < 1:
            raise ConfigError("--top must be >= 1")
        enriched, _, _ = _load_analysis_inputs(args)
        matrix = analytics.day_frequency_matrix(enriched, min_count=args.min_count)
        try:
            ranking = analytics.hashtag_variance_ranking(matrix, args.top)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        writers = {"variance.csv": lambda fh: analytics.write_variance_ranking(ranking, fh)}

    elif what == "split":
        _require(args, "pivot")
        pivot = _parse_day(args.pivot)
        enriched, _, tweets = _load_analysis_inputs(args, need_tweets=True)
        try:
            before, after = analytics.split_window(enriched, pivot)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        level = _level(args.by)
        config = _ptr_config(args)
        tables = {}
        for name, part in (("before", before), ("after", after)):
            # user labels from the tweets inside the window only
            users = ptr.us_class(tweets, part.tweets, config)
            tables[name] = analytics.rho_by_region(users, part, level, args.min_users)
        print(f"split at {pivot.isoformat()}: before={len(before)} after={len(after)}",
              file=sys.stderr)
        writers = {f"rho_{name}.csv": (lambda t: lambda fh: analytics.write_rho_table(t, fh))(t)
                   for name, t in tables.items()}
    else:  # argparse restricts choices; kept for direct callers
        raise ConfigError(f"unknown analysis {what!r}")

    _write_outputs(out, writers)
    return EXIT_OK


def _mix(value: str) -> tuple[float, float, float]:
    parts = [float(x) for x in value.split(",")]
    if len(parts) != 3:
        raise ConfigError("--mix needs three comma-separated fractions")
    return tuple(parts)


def _seed_counts(value: str):
    parts = [int(x) for x in value.split(",")]
    return parts[0] if len(parts) == 1 else tuple(parts)


def cmd_synth(args) -> int:
    _require(args, "out")
    try:
        config = synth.SynthConfig(
            n_users=args.users, n_days=args.days, tweets_per_user_mean=args.tweets_per_user,
            class_mix=_mix(args.mix), vocab_pos=args.vocab_pos, vocab_neg=args.vocab_neg,
            vocab_shared=args.vocab_shared, noise_rate=args.noise,
            seed_tags_per_class=_seed_counts(args.seeds_per_class), rng_seed=args.rng_seed,
            pad_rate=args.pad_rate,
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    gz = _gazetteer(args)
    corpus, truth = synth.generate(config, gz)
    _write_outputs(Path(args.out), {
        "corpus.jsonl": lambda fh: synth.write_corpus(corpus, fh),
        "truth.jsonl": lambda fh: synth.write_truth(truth, fh),
        "seeds.txt": lambda fh: ptr.write_seeds(truth.seeds, fh),
        "topics.txt": lambda fh: fh.write("".join(f"{t}\n" for t in sorted(truth.topics))),
    })
    return EXIT_OK


# -- parser --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; explicit flags win")
    common.add_argument("--out", help="output (and working) directory")
    common.add_argument("--threads", type=int, default=1, help="worker threads (output is unaffected)")
    common.add_argument("--gazetteer", help="gazetteer TSV (default: bundled mini gazetteer)")
    common.add_argument("-v", "--verbose", action="store_true")

    ptr_opts = argparse.ArgumentParser(add_help=False)
    ptr_opts.add_argument("--beta", type=float, default=0.005)
    ptr_opts.add_argument("--dominance", type=float, default=2.0)
    ptr_opts.add_argument("--max-iter", type=int, default=10)
    ptr_opts.add_argument("--min-class-tweets", type=int, default=1)

    parser = argparse.ArgumentParser(prog="polartrack", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enrich", parents=[common], help="parse, filter and geo-enrich tweets")
    p.add_argument("--input", help="tweets JSON-lines")
    p.add_argument("--topics", help="topic hashtag file")
    p.set_defaults(func=cmd_enrich)

    p = sub.add_parser("polarize", parents=[common, ptr_opts], help="run PTR on enriched tweets")
    p.add_argument("--enriched", help=f"default: <out>/{ENRICHED}")
    p.add_argument("--seeds", help="seed file of '<pos|neg> <hashtag>' lines")
    p.set_defaults(func=cmd_polarize)

    p = sub.add_parser("analyze", help="write one analysis table")
    asub = p.add_subparsers(dest="analysis", required=True)
    inputs = argparse.ArgumentParser(add_help=False)
    inputs.add_argument("--enriched", help=f"default: <out>/{ENRICHED}")
    inputs.add_argument("--users", help=f"default: <out>/{USER_ASSIGNMENTS}")
    inputs.add_argument("--tweets", help=f"default: <out>/{TWEET_ASSIGNMENTS}")
    parents = [common, inputs]

    a = asub.add_parser("rho", parents=parents)
    a.add_argument("--by", choices=["country", "city"], default="country")
    a.add_argument("--min-users", type=int)
    a = asub.add_parser("perception", parents=parents)
    a.add_argument("--scope", choices=["internal", "external"], default="internal")
    a.add_argument("--min-users", type=int)
    a = asub.add_parser("timeline", parents=parents)
    a.add_argument("--by", choices=["all", "user-country", "mention-country"], default="all")
    a.add_argument("--countries", help="comma-separated country codes")
    a = asub.add_parser("mentions", parents=parents)
    a.add_argument("--countries", help="comma-separated country codes")
    a = asub.add_parser("sentiment-mentions", parents=parents)
    a.add_argument("--country")
    a = asub.add_parser("variance", parents=parents)
    a.add_argument("--top", type=int, default=20)
    a.add_argument("--min-count", type=int, default=1)
    a = asub.add_parser("split", parents=parents + [ptr_opts])
    a.add_argument("--pivot", help="UTC date or timestamp, e.g. 2015-09-04")
    a.add_argument("--by", choices=["country", "city"], default="country")
    a.add_argument("--min-users", type=int)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("synth", parents=[common], help="generate a planted synthetic corpus")
    p.add_argument("--users", type=int, default=1000)
    p.add_argument("--days", type=int, default=30)
    p.add_argument("--tweets-per-user", type=float, default=10.0)
    p.add_argument("--mix", default="0.45,0.45,0.10", help="pos,neg,neutral user fractions")
    p.add_argument("--vocab-pos", type=int, default=20)
    p.add_argument("--vocab-neg", type=int, default=20)
    p.add_argument("--vocab-shared", type=int, default=30)
    p.add_argument("--noise", type=float, default=0.05)
    p.add_argument("--pad-rate", type=float, default=0.3)
    p.add_argument("--seeds-per-class", default="3", help="N or POS,NEG")
    p.add_argument("--rng-seed", type=int, default=0)
    p.set_defaults(func=cmd_synth)
    return parser


def _all_parsers(parser: argparse.ArgumentParser):
    yield parser
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            for child in action.choices.values():
                yield from _all_parsers(child)


def read_config_file(path) -> dict[str, str]:
    values = {}
    with open(_existing(path, "config file"), encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


def _apply_config(parser: argparse.ArgumentParser, values: dict[str, str]) -> None:
    known = set()
    for p in _all_parsers(parser):
        dests = {a.dest for a in p._actions}
        hits = {k: v for k, v in values.items() if k in dests}
        known.update(hits)
        if hits:
            p.set_defaults(**hits)
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")


def main(argv: Optional[list[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        pre = argparse.ArgumentParser(add_help=False)
        pre.add_argument("--config")
        known, _ = pre.parse_known_args(argv)
        if known.config:
            _apply_config(parser, read_config_file(known.config))
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        return args.func(args)
    except ConfigError as exc:
        print(f"polartrack: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"polartrack: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

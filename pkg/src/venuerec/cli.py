"""Command line front end for the staged pipeline.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
Logs go to stderr; only recommendation rows, evaluation summaries, and
index statistics go to stdout.
"""

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from .config import make_config
from .errors import DataError, UsageError, VenuerecError
from .pipeline import (
    Workspace,
    run_cluster,
    run_evaluate,
    run_index_build,
    run_index_inspect,
    run_ingest,
    run_profiles,
    run_prep,
    run_recommend,
    run_synth,
)
from .synthgen import SynthSpec

logger = logging.getLogger("venuerec")


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad flags; we want a UsageError."""

    def error(self, message):
        raise UsageError(message)


def _csv_list(raw: str):
    return tuple(part.strip() for part in raw.split(",") if part.strip())


def _add_common(p):
    p.add_argument("--artifacts", default="artifacts", help="artifacts directory")
    p.add_argument("--config", default=None, help="key=value config file")
    # every stage sees the full configuration: upstream values take part
    # in the manifest consistency checks even when the stage itself does
    # not use them
    g = p.add_argument_group("configuration overrides")
    g.add_argument("--min-venue-articles", type=int, default=None)
    g.add_argument("--train-through-year", type=int, default=None)
    g.add_argument("--exclude-venues", type=_csv_list, default=None, metavar="V1,V2")
    g.add_argument("--max-df", type=float, default=None)
    g.add_argument("--min-df", type=int, default=None)
    g.add_argument("--stopwords", default=None, help="stopword file (default bundled)")
    g.add_argument("--weighting", choices=("tfidf", "tf"), default=None)
    g.add_argument("--normalize", action=argparse.BooleanOptionalAction, default=None)
    g.add_argument("--k-method", choices=("can", "kaufman", "fixed"), default=None)
    g.add_argument("--k", type=int, default=None)
    g.add_argument("--seed", type=int, default=None)
    g.add_argument("--max-iter", type=int, default=None)
    g.add_argument("--tol", type=float, default=None)
    g.add_argument("--strategy", choices=("sp", "dp", "gp"), default=None)
    g.add_argument("--lambda-s", type=float, default=None)
    g.add_argument("--weight-content", type=float, default=None)
    g.add_argument("--weight-keywords", type=float, default=None)
    g.add_argument("--weight-authors", type=float, default=None)
    g.add_argument("--depth", type=int, default=None)
    g.add_argument("--features", choices=("cb", "au", "combined"), default=None)
    g.add_argument("--lambda-blend", type=float, default=None)
    g.add_argument("--mrr-cutoff", type=int, default=None)


def build_parser() -> _Parser:
    parser = _Parser(prog="venuerec", description=__doc__)
    parser.add_argument(
        "--log-level",
        default="info",
        choices=("debug", "info", "warning", "error"),
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("ingest", help="validate, filter, and split a raw corpus")
    _add_common(p)
    p.add_argument("--input", required=True, help="raw JSONL corpus")

    p = sub.add_parser("prep", help="tokenize training text, prune the vocabulary")
    _add_common(p)

    p = sub.add_parser("cluster", help="global K-means over training articles")
    _add_common(p)

    p = sub.add_parser("profiles", help="aggregate venue subprofile documents")
    _add_common(p)

    p = sub.add_parser("index", help="build or inspect the fielded index")
    index_sub = p.add_subparsers(dest="index_command", required=True, metavar="ACTION")
    pb = index_sub.add_parser("build", help="build index.bin from subprofiles")
    _add_common(pb)
    pi = index_sub.add_parser("inspect", help="print index statistics")
    _add_common(pi)
    pi.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("recommend", help="rank venues for one article")
    _add_common(p)
    p.add_argument("--article", default=None, help="JSON file with article fields")
    p.add_argument("--text", default=None, help="title/abstract text")
    p.add_argument("--query-keywords", type=_csv_list, default=(), metavar="K1,K2")
    p.add_argument("--query-authors", type=_csv_list, default=(), metavar="A1,A2")
    p.add_argument("--top", type=int, default=10)

    p = sub.add_parser("evaluate", help="score the test split, write report.csv")
    _add_common(p)
    p.add_argument(
        "--sweep-lambda",
        default=None,
        metavar="START:STOP:STEP",
        help="evaluate a grid of blend weights instead of one",
    )
    p.add_argument("--out", default=None, help="report CSV path")

    p = sub.add_parser("synth", help="generate a synthetic benchmark corpus")
    p.add_argument("--out", required=True, help="output JSONL path")
    p.add_argument("--seed", type=int, default=SynthSpec.seed)
    p.add_argument("--venues", type=int, default=SynthSpec.n_venues)
    p.add_argument("--topics-per-venue", type=int, default=SynthSpec.topics_per_venue)
    p.add_argument("--vocab-per-topic", type=int, default=SynthSpec.vocab_per_topic)
    p.add_argument("--shared-vocab", type=int, default=SynthSpec.shared_vocab_size)
    p.add_argument(
        "--train-per-topic", type=int, default=SynthSpec.train_articles_per_topic
    )
    p.add_argument(
        "--test-per-topic", type=int, default=SynthSpec.test_articles_per_topic
    )
    p.add_argument(
        "--tokens-per-article", type=int, default=SynthSpec.tokens_per_article
    )
    p.add_argument(
        "--topic-share", type=float, default=SynthSpec.topic_token_share
    )
    p.add_argument(
        "--keywords-per-article", type=int, default=SynthSpec.keywords_per_article
    )
    p.add_argument(
        "--authors-per-venue", type=int, default=SynthSpec.authors_per_venue
    )
    p.add_argument(
        "--max-authors", type=int, default=SynthSpec.max_authors_per_article
    )
    p.add_argument("--loyalty", type=float, default=SynthSpec.venue_loyalty)
    return parser


def _overrides(args, mapping) -> dict:
    out = {}
    for config_key, attr in mapping.items():
        value = getattr(args, attr, None)
        if value is not None:
            out[config_key] = value
    return out


# config key -> argparse attribute, identical for every subcommand
_CONFIG_ATTRS = {
    key: key
    for key in (
        "min_venue_articles",
        "train_through_year",
        "exclude_venues",
        "max_df",
        "min_df",
        "stopwords",
        "weighting",
        "normalize",
        "k_method",
        "k",
        "seed",
        "max_iter",
        "tol",
        "strategy",
        "lambda_s",
        "weight_content",
        "weight_keywords",
        "weight_authors",
        "depth",
        "features",
        "lambda_blend",
        "mrr_cutoff",
    )
}


def _load_query_article(path) -> dict:
    try:
        rec = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DataError(f"cannot read article file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DataError(f"article file {path} is not valid JSON: {exc}") from exc
    if not isinstance(rec, dict):
        raise DataError(f"article file {path} must hold one JSON object")
    return rec


def _dispatch(args) -> int:
    command = args.command
    if command == "synth":
        spec = SynthSpec(
            n_venues=args.venues,
            topics_per_venue=args.topics_per_venue,
            vocab_per_topic=args.vocab_per_topic,
            shared_vocab_size=args.shared_vocab,
            train_articles_per_topic=args.train_per_topic,
            test_articles_per_topic=args.test_per_topic,
            tokens_per_article=args.tokens_per_article,
            topic_token_share=args.topic_share,
            keywords_per_article=args.keywords_per_article,
            authors_per_venue=args.authors_per_venue,
            max_authors_per_article=args.max_authors,
            venue_loyalty=args.loyalty,
            seed=args.seed,
        )
        run_synth(spec, args.out)
        return 0

    if command == "index":
        stage = f"index-{args.index_command}"
    else:
        stage = command
    overrides = _overrides(args, _CONFIG_ATTRS)
    config = make_config(args.config, overrides)
    ws = Workspace(args.artifacts)

    if command == "ingest":
        run_ingest(ws, config, args.input)
    elif command == "prep":
        run_prep(ws, config)
    elif command == "cluster":
        run_cluster(ws, config)
    elif command == "profiles":
        run_profiles(ws, config)
    elif stage == "index-build":
        run_index_build(ws, config)
    elif stage == "index-inspect":
        stats = run_index_inspect(ws, config)
        if args.json:
            print(json.dumps(stats, sort_keys=True, indent=2))
        else:
            print(f"documents: {stats['documents']}")
            print(f"venues:    {stats['venues']}")
            for fieldname, fstats in stats["fields"].items():
                print(
                    f"field {fieldname}: {fstats['terms']} terms, "
                    f"{fstats['tokens']} tokens, {fstats['postings']} postings"
                )
    elif command == "recommend":
        if args.article is not None:
            rec = _load_query_article(args.article)
            title_abstract = rec.get("title_abstract", "")
            keywords = tuple(rec.get("keywords", ()) or ())
            authors = tuple(rec.get("authors", ()) or ())
        elif args.text is not None or args.query_keywords or args.query_authors:
            title_abstract = args.text or ""
            keywords = args.query_keywords
            authors = args.query_authors
        else:
            raise UsageError(
                "recommend needs --article or --text/--query-keywords/--query-authors"
            )
        rows = run_recommend(
            ws,
            config,
            title_abstract=title_abstract,
            keywords=keywords,
            authors=authors,
            top=args.top,
        )
        writer = csv.writer(sys.stdout)
        writer.writerow(["rank", "venue", "score", "content_score", "author_score"])
        for rank, venue, score, c, a in rows:
            writer.writerow([rank, venue, f"{score:.6f}", f"{c:.6f}", f"{a:.6f}"])
    elif command == "evaluate":
        reports = run_evaluate(ws, config, sweep=args.sweep_lambda, out_path=args.out)
        for rep in reports:
            print(rep.to_text())
            print()
    else:  # pragma: no cover - argparse enforces the choices
        raise UsageError(f"unknown command {command!r}")
    return 0


def main(argv=None) -> int:
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"venuerec: error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:
        # argparse raises this for --help; its code is 0 there
        return 0 if exc.code in (0, None) else 1
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, args.log_level.upper()),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return _dispatch(args)
    except UsageError as exc:
        logger.error("%s", exc)
        return 1
    except DataError as exc:
        logger.error("%s", exc)
        return 2
    except VenuerecError as exc:
        logger.error("%s", exc)
        return 3
    except Exception:
        logger.exception("internal error")
        return 3


if __name__ == "__main__":
    sys.exit(main())

"""Staged pipeline over a shared artifacts directory.

Stages: ingest -> prep -> cluster -> profiles -> index, then the
read-only recommend/evaluate front ends.  Every stage records the
config subset it depends on plus content hashes of its inputs and
outputs in ``manifest.json``.  A later stage refuses to run when an
upstream stage is missing, was run under different parameters, or its
artifacts changed on disk since.

All writes are atomic (temp file + rename) and deterministic, so
re-running a stage with unchanged inputs reproduces artifacts
byte-for-byte.  A file lock serializes stage execution per artifacts
directory.
"""

import hashlib
import json
import logging
import os
from pathlib import Path

from filelock import FileLock

from . import textprep
from .cluster import heuristic_k, kmeans, load_clustering, save_clustering
from .config import PipelineConfig, fingerprint, stage_params
from .corpus import (
    SplitSpec,
    exclude_venues,
    filter_venues,
    load_corpus,
    save_corpus,
    split_by_year,
)
from .errors import DataError, UsageError
from .evaluation import evaluate_index, sweep_lambda, write_reports_csv
from .index import FieldedIndex, build_index
from .profiles import build_profiles, load_profiles, save_profiles
from .recommender import build_query, fuse_sides, side_rankings
from .synthgen import SynthSpec, generate
from .textprep import vectorize

logger = logging.getLogger(__name__)

ARTIFACT_NAMES = {
    "train": "train.jsonl",
    "test": "test.jsonl",
    "vocabulary": "vocabulary.json",
    "clustering": "clustering.txt",
    "profiles": "subprofiles.jsonl",
    "index": "index.bin",
    "report": "report.csv",
}

_MANIFEST = "manifest.json"
_LOCKFILE = ".venuerec.lock"


class Workspace:
    """Paths, lock, and manifest bookkeeping for one artifacts directory."""

    def __init__(self, artifacts_dir):
        self.dir = Path(artifacts_dir)

    def prepare(self) -> None:
        self.dir.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        return self.dir / ARTIFACT_NAMES[name]

    def lock(self) -> FileLock:
        self.prepare()
        return FileLock(str(self.dir / _LOCKFILE))

    # -- manifest -------------------------------------------------------

    def load_manifest(self) -> dict:
        path = self.dir / _MANIFEST
        if not path.exists():
            return {"stages": {}}
        try:
            manifest = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"cannot read manifest {path}: {exc}") from exc
        manifest.setdefault("stages", {})
        return manifest

    def save_manifest(self, manifest: dict) -> None:
        blob = json.dumps(manifest, sort_keys=True, indent=2) + "\n"
        atomic_write_bytes(self.dir / _MANIFEST, blob.encode("utf-8"))

    def record_stage(self, manifest, stage, params, inputs, outputs) -> None:
        manifest["stages"][stage] = {
            "params": params,
            "fingerprint": fingerprint(params),
            "inputs": inputs,
            "outputs": outputs,
        }
        self.save_manifest(manifest)


def atomic_write_bytes(path, data: bytes) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)


def _atomic_save(save_fn, obj, path) -> None:
    """Run a writer against a temp path, then rename into place."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    save_fn(obj, tmp)
    os.replace(tmp, path)


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with Path(path).open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _require_stage(ws: Workspace, manifest: dict, stage: str, config: PipelineConfig):
    """Check one upstream stage ran under the current config and is intact."""
    record = manifest["stages"].get(stage)
    if record is None:
        raise DataError(
            f"stage {stage!r} has not been run in {ws.dir}; run `venuerec {stage}` first"
        )
    want = stage_params(config, stage)
    if record["params"] != want:
        raise DataError(
            f"config fingerprint mismatch for stage {stage!r}: artifacts carry "
            f"{record['fingerprint']}, current config gives {fingerprint(want)}; "
            f"re-run `venuerec {stage}` (and everything downstream)"
        )
    for group in ("inputs", "outputs"):
        for fname, sha in record.get(group, {}).items():
            if fname.startswith("external:"):
                continue
            path = ws.dir / fname
            if not path.exists():
                raise DataError(
                    f"artifact {fname} from stage {stage!r} is missing; re-run it"
                )
            if sha256_file(path) != sha:
                raise DataError(
                    f"artifact {fname} changed since stage {stage!r} ran; "
                    f"re-run the pipeline from that stage"
                )
    return record


# -- stage: ingest ------------------------------------------------------


def run_ingest(ws: Workspace, config: PipelineConfig, input_path, schema=None) -> dict:
    """Load, validate, filter, and split a raw corpus into train/test."""
    input_path = Path(input_path)
    with ws.lock():
        manifest = ws.load_manifest()
        corpus = load_corpus(input_path, schema)
        if config.exclude_venues:
            corpus = exclude_venues(corpus, config.exclude_venues)
        corpus = filter_venues(corpus, config.min_venue_articles)
        train, test = split_by_year(corpus, SplitSpec(config.train_through_year))
        _atomic_save(save_corpus, train, ws.path("train"))
        _atomic_save(save_corpus, test, ws.path("test"))
        ws.record_stage(
            manifest,
            "ingest",
            stage_params(config, "ingest"),
            {f"external:{input_path}": sha256_file(input_path)},
            {
                ARTIFACT_NAMES["train"]: sha256_file(ws.path("train")),
                ARTIFACT_NAMES["test"]: sha256_file(ws.path("test")),
            },
        )
    info = {
        "train_articles": len(train),
        "test_articles": len(test),
        "venues": train.n_venues,
    }
    logger.info(
        "ingest: %d train / %d test articles across %d venues",
        info["train_articles"],
        info["test_articles"],
        info["venues"],
    )
    return info


# -- stage: prep --------------------------------------------------------


def _tokenizer_for(config: PipelineConfig):
    stopwords = textprep.load_stopwords(config.stopwords)
    return lambda text: textprep.tokenize(text, stopwords)


def run_prep(ws: Workspace, config: PipelineConfig) -> dict:
    """Tokenize the training split and persist the pruned vocabulary."""
    with ws.lock():
        manifest = ws.load_manifest()
        _require_stage(ws, manifest, "ingest", config)
        train = load_corpus(ws.path("train"))
        tokenize = _tokenizer_for(config)
        token_docs = [tokenize(a.title_abstract) for a in train.articles]
        vocab = textprep.build_vocabulary(token_docs, config.max_df, config.min_df)
        kept = set(vocab.term_to_id)
        n_entries = sum(len({t for t in doc if t in kept}) for doc in token_docs)
        stats = {"m": vocab.n_docs, "t": len(vocab), "e": n_entries}
        _atomic_save(
            lambda v, path: textprep.save_vocabulary(v, stats, path),
            vocab,
            ws.path("vocabulary"),
        )
        ws.record_stage(
            manifest,
            "prep",
            stage_params(config, "prep"),
            {ARTIFACT_NAMES["train"]: sha256_file(ws.path("train"))},
            {ARTIFACT_NAMES["vocabulary"]: sha256_file(ws.path("vocabulary"))},
        )
    logger.info("prep: vocabulary of %d terms, %d nonzero entries", stats["t"], stats["e"])
    return stats


# -- stage: cluster -----------------------------------------------------


def run_cluster(ws: Workspace, config: PipelineConfig) -> dict:
    """Cluster all training articles globally and persist the assignment."""
    with ws.lock():
        manifest = ws.load_manifest()
        _require_stage(ws, manifest, "ingest", config)
        _require_stage(ws, manifest, "prep", config)
        train = load_corpus(ws.path("train"))
        vocab, stats = textprep.load_vocabulary(ws.path("vocabulary"))
        tokenize = _tokenizer_for(config)
        vectors = [
            vectorize(
                tokenize(a.title_abstract),
                vocab,
                weighting=config.weighting,
                normalize=config.normalize,
                article_id=a.article_id,
            )
            for a in train.articles
        ]
        if config.k is not None:
            k = heuristic_k("fixed", fixed_value=config.k)
        else:
            k = heuristic_k(
                config.k_method, m=stats["m"], t=stats["t"], e=stats["e"]
            )
        n_points = sum(1 for v in vectors if v.weights)
        if k > max(n_points, 1):
            logger.warning(
                "K=%d exceeds %d non-empty articles; clamping", k, n_points
            )
            k = max(n_points, 1)
        result = kmeans(
            vectors,
            k,
            seed=config.seed,
            max_iter=config.max_iter,
            tol=config.tol,
            n_features=len(vocab),
        )
        _atomic_save(save_clustering, result, ws.path("clustering"))
        ws.record_stage(
            manifest,
            "cluster",
            stage_params(config, "cluster"),
            {
                ARTIFACT_NAMES["train"]: sha256_file(ws.path("train")),
                ARTIFACT_NAMES["vocabulary"]: sha256_file(ws.path("vocabulary")),
            },
            {ARTIFACT_NAMES["clustering"]: sha256_file(ws.path("clustering"))},
        )
    info = {"k": k, "n_iter": result.n_iter, "inertia": result.inertia}
    logger.info(
        "cluster: K=%d converged after %d iteration(s), inertia %.6f",
        k,
        result.n_iter,
        result.inertia,
    )
    return info


# -- stage: profiles ----------------------------------------------------


def run_profiles(ws: Workspace, config: PipelineConfig) -> dict:
    """Aggregate training articles into subprofile documents."""
    with ws.lock():
        manifest = ws.load_manifest()
        _require_stage(ws, manifest, "ingest", config)
        inputs = {ARTIFACT_NAMES["train"]: sha256_file(ws.path("train"))}
        assignment = None
        n_clusters = None
        if config.strategy == "gp":
            _require_stage(ws, manifest, "cluster", config)
            meta, assignment = load_clustering(ws.path("clustering"))
            n_clusters = int(meta["K"])
            inputs[ARTIFACT_NAMES["clustering"]] = sha256_file(ws.path("clustering"))
        train = load_corpus(ws.path("train"))
        profiles = build_profiles(
            train,
            config.strategy,
            clustering=assignment,
            n_clusters=n_clusters,
            tokenize=_tokenizer_for(config),
        )
        _atomic_save(save_profiles, profiles, ws.path("profiles"))
        manifest.setdefault("info", {})["n_clusters"] = n_clusters
        ws.record_stage(
            manifest,
            "profiles",
            stage_params(config, "profiles"),
            inputs,
            {ARTIFACT_NAMES["profiles"]: sha256_file(ws.path("profiles"))},
        )
    logger.info(
        "profiles: %d %s documents for %d venues",
        len(profiles),
        config.strategy,
        len({p.venue_id for p in profiles}),
    )
    return {"documents": len(profiles), "n_clusters": n_clusters}


# -- stage: index -------------------------------------------------------


def run_index_build(ws: Workspace, config: PipelineConfig) -> dict:
    """Build the binary fielded index from the profiles artifact."""
    with ws.lock():
        manifest = ws.load_manifest()
        _require_stage(ws, manifest, "profiles", config)
        profiles = load_profiles(ws.path("profiles"))
        idx = build_index(profiles)
        _atomic_save(lambda obj, path: obj.save(path), idx, ws.path("index"))
        ws.record_stage(
            manifest,
            "index",
            stage_params(config, "index"),
            {ARTIFACT_NAMES["profiles"]: sha256_file(ws.path("profiles"))},
            {ARTIFACT_NAMES["index"]: sha256_file(ws.path("index"))},
        )
    stats = idx.stats()
    logger.info(
        "index: %d documents, %d venues", stats["documents"], stats["venues"]
    )
    return stats


def run_index_inspect(ws: Workspace, config: PipelineConfig) -> dict:
    """Summary statistics of the persisted index."""
    with ws.lock():
        manifest = ws.load_manifest()
        _require_stage(ws, manifest, "index", config)
        idx = FieldedIndex.load(ws.path("index"))
    return idx.stats()


# -- recommend / evaluate front ends ------------------------------------


def run_recommend(
    ws: Workspace,
    config: PipelineConfig,
    *,
    title_abstract: str = "",
    keywords=(),
    authors=(),
    top: int = 10,
) -> list[tuple[int, str, float, float, float]]:
    """Rank venues for one query article against the persisted index."""
    if top < 1:
        raise UsageError("--top must be >= 1")
    with ws.lock():
        manifest = ws.load_manifest()
        _require_stage(ws, manifest, "profiles", config)
        _require_stage(ws, manifest, "index", config)
        idx = FieldedIndex.load(ws.path("index"))
    tokenize = _tokenizer_for(config)
    query = build_query(title_abstract, keywords, authors, tokenize)
    if query.is_empty():
        raise UsageError("query is empty after tokenization; nothing to rank")
    content_side, author_side = side_rankings(
        idx,
        query,
        lambda_s=config.lambda_s,
        depth=config.depth,
        content_weight=config.weight_content,
        keyword_weight=config.weight_keywords,
        author_weight=config.weight_authors,
    )
    fused = fuse_sides(content_side, author_side, config.features, config.lambda_blend)
    c = dict(content_side)
    a = dict(author_side)
    return [
        (rank, venue, score, c.get(venue, 0.0), a.get(venue, 0.0))
        for rank, (venue, score) in enumerate(fused[:top], start=1)
    ]


def _parse_sweep(sweep: str):
    try:
        start_s, stop_s, step_s = sweep.split(":")
        start, stop, step = float(start_s), float(stop_s), float(step_s)
    except ValueError as exc:
        raise UsageError(f"malformed sweep {sweep!r}; expected start:stop:step") from exc
    if step <= 0 or stop < start:
        raise UsageError("sweep needs step > 0 and stop >= start")
    if not (0.0 <= start <= 1.0 and 0.0 <= stop <= 1.0):
        raise UsageError("sweep bounds must stay within [0, 1]")
    count = int(round((stop - start) / step)) + 1
    values = [round(start + i * step, 10) for i in range(count)]
    return [v for v in values if v <= stop + 1e-12]


def run_evaluate(
    ws: Workspace,
    config: PipelineConfig,
    *,
    sweep: str | None = None,
    out_path=None,
):
    """Evaluate the persisted index over the held-out test split."""
    with ws.lock():
        manifest = ws.load_manifest()
        _require_stage(ws, manifest, "ingest", config)
        if config.strategy == "gp":
            _require_stage(ws, manifest, "cluster", config)
        _require_stage(ws, manifest, "profiles", config)
        _require_stage(ws, manifest, "index", config)
        test = load_corpus(ws.path("test"))
        idx = FieldedIndex.load(ws.path("index"))
        n_clusters = manifest.get("info", {}).get("n_clusters")
    tokenize = _tokenizer_for(config)
    extra = {
        "strategy": config.strategy,
        "n_clusters": n_clusters,
        "seed": config.seed,
    }
    common = dict(
        lambda_s=config.lambda_s,
        depth=config.depth,
        content_weight=config.weight_content,
        keyword_weight=config.weight_keywords,
        author_weight=config.weight_authors,
        mrr_cutoff=config.mrr_cutoff,
        config_extra=extra,
    )
    if sweep is not None:
        reports = sweep_lambda(idx, test, tokenize, lambdas=_parse_sweep(sweep), **common)
    else:
        reports = [
            evaluate_index(
                idx,
                test,
                tokenize,
                features=config.features,
                lambda_blend=config.lambda_blend,
                **common,
            )
        ]
    target = Path(out_path) if out_path is not None else ws.path("report")
    _atomic_save(lambda reps, path: write_reports_csv(reps, path), reports, target)
    logger.info("evaluate: wrote %d report row(s) to %s", len(reports), target)
    return reports


# -- synth --------------------------------------------------------------


def run_synth(spec: SynthSpec, out_path) -> dict:
    """Generate a synthetic corpus and write it as JSONL."""
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    corpus = generate(spec)
    _atomic_save(save_corpus, corpus, out_path)
    info = {"articles": len(corpus), "venues": corpus.n_venues}
    logger.info("synth: %d articles across %d venues -> %s", len(corpus), corpus.n_venues, out_path)
    return info

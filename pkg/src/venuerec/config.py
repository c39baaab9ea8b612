"""Run configuration: flat key=value files, flag overrides, fingerprints.

A config file holds ``key = value`` lines (``#`` comments allowed);
command-line flags override file values.  Each pipeline stage owns a
subset of keys; fingerprints over those subsets let later stages detect
that an artifact was produced under different settings.
"""

import hashlib
import json
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import DataError, UsageError


@dataclass(frozen=True)
class PipelineConfig:
    """Every knob of the staged pipeline, with documented defaults."""

    # ingest
    min_venue_articles: int = 1
    train_through_year: int = 2015
    exclude_venues: tuple[str, ...] = ()
    # prep
    max_df: float = 0.9
    min_df: int = 750
    stopwords: str | None = None
    # cluster
    weighting: str = "tfidf"
    normalize: bool = True
    k_method: str = "kaufman"
    k: int | None = None
    seed: int = 0
    max_iter: int = 300
    tol: float = 1e-4
    # profiles
    strategy: str = "gp"
    # retrieval
    lambda_s: float = 0.1
    weight_content: float = 1.0
    weight_keywords: float = 1.0
    weight_authors: float = 1.0
    depth: int = 1000
    # fusion / evaluation
    features: str = "combined"
    lambda_blend: float = 0.75
    mrr_cutoff: int = 40

    def validate(self) -> "PipelineConfig":
        checks = [
            (self.min_venue_articles >= 1, "min_venue_articles must be >= 1"),
            (0.0 < self.max_df <= 1.0, "max_df must be in (0, 1]"),
            (self.min_df >= 1, "min_df must be >= 1"),
            (self.weighting in ("tfidf", "tf"), "weighting must be tfidf or tf"),
            (
                self.k_method in ("can", "kaufman", "fixed"),
                "k_method must be can, kaufman, or fixed",
            ),
            (self.k is None or self.k >= 1, "k must be >= 1"),
            (
                self.k_method != "fixed" or self.k is not None,
                "k_method fixed requires k",
            ),
            (self.max_iter >= 1, "max_iter must be >= 1"),
            (self.tol >= 0, "tol must be >= 0"),
            (self.strategy in ("sp", "dp", "gp"), "strategy must be sp, dp, or gp"),
            (0.0 < self.lambda_s < 1.0, "lambda_s must be strictly in (0, 1)"),
            (self.weight_content >= 0, "weight_content must be >= 0"),
            (self.weight_keywords >= 0, "weight_keywords must be >= 0"),
            (self.weight_authors >= 0, "weight_authors must be >= 0"),
            (self.depth >= 1, "depth must be >= 1"),
            (
                self.features in ("cb", "au", "combined"),
                "features must be cb, au, or combined",
            ),
            (0.0 <= self.lambda_blend <= 1.0, "lambda_blend must be in [0, 1]"),
            (self.mrr_cutoff >= 1, "mrr_cutoff must be >= 1"),
        ]
        for ok, message in checks:
            if not ok:
                raise UsageError(message)
        return self


_FIELD_TYPES = {f.name: f.type for f in fields(PipelineConfig)}


def _coerce(key: str, raw: str):
    """Parse a raw string into the declared field type."""
    kind = _FIELD_TYPES[key]
    raw = raw.strip()
    try:
        if kind is bool:
            if raw.lower() in ("true", "1", "yes"):
                return True
            if raw.lower() in ("false", "0", "no"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        if kind == (int | None):
            return None if raw.lower() in ("", "none") else int(raw)
        if kind == (str | None):
            return None if raw.lower() in ("", "none") else raw
        if kind == tuple[str, ...]:
            return tuple(part.strip() for part in raw.split(",") if part.strip())
        return raw
    except ValueError as exc:
        raise UsageError(f"config key {key!r}: {exc}") from exc


def load_config_file(path) -> dict:
    """Parse a flat key=value file into a dict of typed values."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read config file {path}: {exc}") from exc
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, raw = line.split("=", 1)
        key = key.strip()
        if key not in _FIELD_TYPES:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = _coerce(key, raw)
    return values


def make_config(file_path=None, overrides: dict | None = None) -> PipelineConfig:
    """Defaults, then file values, then explicit overrides; validated."""
    values = {}
    if file_path is not None:
        values.update(load_config_file(file_path))
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _FIELD_TYPES:
            raise UsageError(f"unknown config key {key!r}")
        values[key] = value
    return PipelineConfig(**values).validate()


# keys whose values shape each stage's output artifacts
STAGE_PARAMS = {
    "ingest": ("min_venue_articles", "train_through_year", "exclude_venues"),
    "prep": ("max_df", "min_df", "stopwords"),
    "cluster": ("weighting", "normalize", "k_method", "k", "seed", "max_iter", "tol"),
    "profiles": ("strategy", "stopwords"),
    "index": (),
}

# stages each stage consumes artifacts from, in pipeline order
STAGE_DEPS = {
    "ingest": (),
    "prep": ("ingest",),
    "cluster": ("ingest", "prep"),
    "profiles": ("ingest",),
    "index": ("profiles",),
    "recommend": ("index",),
    "evaluate": ("ingest", "index"),
}


def stage_params(config: PipelineConfig, stage: str) -> dict:
    """The config subset recorded in the manifest for one stage."""
    out = {}
    for key in STAGE_PARAMS.get(stage, ()):
        value = getattr(config, key)
        if isinstance(value, tuple):
            value = list(value)
        out[key] = value
    return out


def fingerprint(params: dict) -> str:
    """Short stable digest of a parameter dict."""
    blob = json.dumps(params, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:12]

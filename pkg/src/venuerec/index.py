"""Fielded inverted index with Jelinek-Mercer language-model scoring.

Each profile document has three fields (``content``, ``keywords``,
``authors``) indexed independently: per-field postings, document
lengths, and collection term frequencies.  A matching term contributes

    qtf * ln(1 + ((1 - lambda_s) * tf / dl) / (lambda_s * cf / cl))

to the document's field score, which is strictly positive, so documents
sharing no query term never enter the ranking.  Multi-field scores are
weighted sums of the per-field scores.

Ranked output is a list of ``(doc_id, score, position)`` triples with
positions 1-based, scores non-increasing, and ties broken by ascending
doc id.
"""

import json
import math
import struct
import zlib
from bisect import bisect_left
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .errors import DataError

FIELDS = ("content", "keywords", "authors")

_MAGIC = b"VRIX"
_VERSION = 1

RankedList = list[tuple[str, float, int]]


@dataclass
class Query:
    """Fielded query bags; empty fields simply contribute nothing."""

    content: Counter = field(default_factory=Counter)
    keywords: Counter = field(default_factory=Counter)
    authors: Counter = field(default_factory=Counter)

    def field_bag(self, name: str) -> Counter:
        try:
            return getattr(self, name)
        except AttributeError:
            raise ValueError(f"unknown field {name!r}") from None

    def is_empty(self) -> bool:
        return not (self.content or self.keywords or self.authors)


def _validate_lambda(lambda_s: float) -> None:
    if not 0.0 < lambda_s < 1.0:
        raise ValueError("lambda_s must be strictly between 0 and 1")


class FieldedIndex:
    """Inverted index over profile documents; immutable once built."""

    def __init__(self):
        # field -> term -> sorted list of (doc_id, tf)
        self.postings: dict[str, dict[str, list[tuple[str, int]]]] = {
            f: {} for f in FIELDS
        }
        # field -> doc_id -> total tokens in that field
        self.doc_len: dict[str, dict[str, int]] = {f: {} for f in FIELDS}
        # field -> term -> collection frequency
        self.coll_freq: dict[str, dict[str, int]] = {f: {} for f in FIELDS}
        # field -> total tokens in the field across all docs
        self.coll_len: dict[str, int] = {f: 0 for f in FIELDS}
        self.doc_venue: dict[str, str] = {}

    # -- construction ---------------------------------------------------

    @classmethod
    def build(cls, profiles) -> "FieldedIndex":
        """Index an iterable of subprofiles; duplicate doc ids are fatal."""
        idx = cls()
        for prof in profiles:
            if prof.doc_id in idx.doc_venue:
                raise DataError(f"duplicate profile document id {prof.doc_id!r}")
            idx.doc_venue[prof.doc_id] = prof.venue_id
            for f in FIELDS:
                bag = prof.field_bag(f)
                idx.doc_len[f][prof.doc_id] = sum(bag.values())
                for term, tf in bag.items():
                    if tf <= 0:
                        raise DataError(
                            f"non-positive term frequency for {term!r} in {prof.doc_id!r}"
                        )
                    idx.postings[f].setdefault(term, []).append((prof.doc_id, tf))
                    idx.coll_freq[f][term] = idx.coll_freq[f].get(term, 0) + tf
                    idx.coll_len[f] += tf
        if not idx.doc_venue:
            raise DataError("cannot build an index from zero profiles")
        for f in FIELDS:
            for plist in idx.postings[f].values():
                plist.sort()
        return idx

    # -- introspection --------------------------------------------------

    @property
    def n_docs(self) -> int:
        return len(self.doc_venue)

    @property
    def venue_ids(self) -> list[str]:
        return sorted(set(self.doc_venue.values()))

    def stats(self) -> dict:
        out = {
            "documents": self.n_docs,
            "venues": len(set(self.doc_venue.values())),
            "fields": {},
        }
        for f in FIELDS:
            n_terms = len(self.postings[f])
            out["fields"][f] = {
                "terms": n_terms,
                "tokens": self.coll_len[f],
                "postings": sum(len(p) for p in self.postings[f].values()),
            }
        return out

    # -- scoring --------------------------------------------------------

    def term_frequency(self, term: str, doc_id: str, fieldname: str) -> int:
        if fieldname not in FIELDS:
            raise ValueError(f"unknown field {fieldname!r}")
        plist = self.postings[fieldname].get(term)
        if not plist:
            return 0
        i = bisect_left(plist, doc_id, key=lambda entry: entry[0])
        if i < len(plist) and plist[i][0] == doc_id:
            return plist[i][1]
        return 0

    def score_lm_jm(
        self, query_bag: Counter, doc_id: str, fieldname: str, lambda_s: float = 0.1
    ) -> float:
        """Smoothed language-model score of one document field for a query bag."""
        if fieldname not in FIELDS:
            raise ValueError(f"unknown field {fieldname!r}")
        if doc_id not in self.doc_venue:
            raise ValueError(f"unknown document {doc_id!r}")
        _validate_lambda(lambda_s)
        dl = self.doc_len[fieldname].get(doc_id, 0)
        if dl == 0:
            return 0.0
        cl = self.coll_len[fieldname]
        score = 0.0
        for term, qtf in query_bag.items():
            if qtf <= 0:
                continue
            tf = self.term_frequency(term, doc_id, fieldname)
            if tf == 0:
                continue
            cf = self.coll_freq[fieldname][term]
            score += qtf * math.log1p(((1.0 - lambda_s) * tf / dl) / (lambda_s * cf / cl))
        return score

    def search(
        self,
        query: Query,
        field_weights: dict[str, float],
        top_n: int = 1000,
        lambda_s: float = 0.1,
    ) -> RankedList:
        """Top ``top_n`` documents by weighted multi-field score.

        Only documents matching at least one query term in a positively
        weighted field appear; all returned scores are > 0.
        """
        if top_n < 1:
            raise ValueError("top_n must be >= 1")
        _validate_lambda(lambda_s)
        for f, w in field_weights.items():
            if f not in FIELDS:
                raise ValueError(f"unknown field {f!r} in field_weights")
            if w < 0:
                raise ValueError(f"negative weight for field {f!r}")
        acc: dict[str, float] = {}
        for f in FIELDS:
            weight = field_weights.get(f, 0.0)
            if weight == 0.0:
                continue
            bag = query.field_bag(f)
            if not bag:
                continue
            cl = self.coll_len[f]
            if cl == 0:
                continue
            doc_len_f = self.doc_len[f]
            postings_f = self.postings[f]
            coll_freq_f = self.coll_freq[f]
            for term, qtf in bag.items():
                if qtf <= 0:
                    continue
                plist = postings_f.get(term)
                if not plist:
                    continue
                p_coll = coll_freq_f[term] / cl
                base = weight * qtf
                for doc_id, tf in plist:
                    contrib = base * math.log1p(
                        ((1.0 - lambda_s) * tf / doc_len_f[doc_id]) / (lambda_s * p_coll)
                    )
                    acc[doc_id] = acc.get(doc_id, 0.0) + contrib
        ordered = sorted(
            ((d, s) for d, s in acc.items() if s > 0.0),
            key=lambda pair: (-pair[1], pair[0]),
        )[:top_n]
        return [(d, s, pos) for pos, (d, s) in enumerate(ordered, start=1)]

    # -- persistence ----------------------------------------------------

    def save(self, path) -> None:
        """Write a compact binary artifact: magic, version, zlib JSON payload."""
        payload = {
            "doc_venue": self.doc_venue,
            "fields": {
                f: {term: plist for term, plist in sorted(self.postings[f].items())}
                for f in FIELDS
            },
            "doc_len": {f: self.doc_len[f] for f in FIELDS},
        }
        blob = zlib.compress(
            json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8"),
            level=6,
        )
        with Path(path).open("wb") as fh:
            fh.write(_MAGIC)
            fh.write(struct.pack(">I", _VERSION))
            fh.write(struct.pack(">Q", len(blob)))
            fh.write(blob)

    @classmethod
    def load(cls, path) -> "FieldedIndex":
        """Read an artifact written by ``save``; statistics are rebuilt."""
        path = Path(path)
        try:
            raw = path.read_bytes()
        except OSError as exc:
            raise DataError(f"cannot read index file {path}: {exc}") from exc
        header = len(_MAGIC) + 4 + 8
        if len(raw) < header or raw[: len(_MAGIC)] != _MAGIC:
            raise DataError(f"{path} is not an index artifact (bad magic)")
        (version,) = struct.unpack(">I", raw[len(_MAGIC) : len(_MAGIC) + 4])
        if version != _VERSION:
            raise DataError(f"{path}: unsupported index format version {version}")
        (size,) = struct.unpack(">Q", raw[len(_MAGIC) + 4 : header])
        if len(raw) != header + size:
            raise DataError(f"{path}: truncated index payload")
        try:
            payload = json.loads(zlib.decompress(raw[header:]).decode("utf-8"))
            idx = cls()
            idx.doc_venue = dict(payload["doc_venue"])
            for f in FIELDS:
                terms = payload["fields"].get(f, {})
                idx.doc_len[f] = {d: int(n) for d, n in payload["doc_len"][f].items()}
                for term, plist in terms.items():
                    entries = [(str(d), int(tf)) for d, tf in plist]
                    entries.sort()
                    idx.postings[f][term] = entries
                    idx.coll_freq[f][term] = sum(tf for _, tf in entries)
                idx.coll_len[f] = sum(idx.coll_freq[f].values())
        except (KeyError, TypeError, ValueError, zlib.error) as exc:
            raise DataError(f"{path}: corrupt index payload: {exc}") from exc
        if not idx.doc_venue:
            raise DataError(f"{path}: index contains no documents")
        return idx


def build_index(profiles) -> FieldedIndex:
    """Convenience wrapper around ``FieldedIndex.build``."""
    return FieldedIndex.build(profiles)

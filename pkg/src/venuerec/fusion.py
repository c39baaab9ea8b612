"""Aggregate ranked profile documents into venue scores and blend them.

``comb_lgdcs`` collapses a ranked document list to venues: each venue's
best-scoring document (earliest position on score ties) contributes its
full score, every other document of the venue contributes its score
discounted by ``log2(position + 1)``, positions taken from the global
ranked list.

``comb_linear`` blends two venue rankings (content-based and
author-based) after scaling each to a maximum of 1, weighting the
content side by ``lambda_blend``.  Venues absent from a side contribute
0 from that side; venues whose blended score is exactly 0 are dropped,
so the endpoints ``lambda_blend in (0, 1)`` reproduce one input ranking
exactly.

Venue rankings are ``(venue_id, score)`` lists, scores non-increasing,
ties broken by ascending venue id.
"""

import math
from dataclasses import dataclass

from .index import RankedList

VenueRanking = list[tuple[str, float]]


@dataclass(frozen=True)
class FusionParams:
    """Blend weight for the content side; author side gets the rest."""

    lambda_blend: float = 0.75

    def __post_init__(self):
        if not 0.0 <= self.lambda_blend <= 1.0:
            raise ValueError("lambda_blend must be in [0, 1]")


def _sort_venues(scores: dict[str, float]) -> VenueRanking:
    return sorted(scores.items(), key=lambda pair: (-pair[1], pair[0]))


def comb_lgdcs(ranked: RankedList, doc_to_venue: dict[str, str]) -> VenueRanking:
    """Fuse a ranked document list into a venue ranking.

    Every ranked doc id must be mapped by ``doc_to_venue``.  An empty
    input produces an empty ranking.
    """
    best: dict[str, tuple[float, int]] = {}
    members: dict[str, list[tuple[float, int]]] = {}
    for doc_id, score, pos in ranked:
        venue = doc_to_venue.get(doc_id)
        if venue is None:
            raise ValueError(f"ranked document {doc_id!r} has no venue mapping")
        members.setdefault(venue, []).append((score, pos))
        cur = best.get(venue)
        # the venue's representative doc: highest score, earliest
        # position among equal scores
        if cur is None or score > cur[0] or (score == cur[0] and pos < cur[1]):
            best[venue] = (score, pos)
    fused: dict[str, float] = {}
    for venue, entries in members.items():
        top_score, top_pos = best[venue]
        total = top_score
        for score, pos in entries:
            if pos == top_pos:
                continue
            total += score / math.log2(pos + 1)
        fused[venue] = total
    return _sort_venues(fused)


def normalize_max(ranking: VenueRanking) -> VenueRanking:
    """Scale scores so the maximum is 1; empty or all-zero input unchanged."""
    if not ranking:
        return []
    top = max(score for _, score in ranking)
    if top <= 0.0:
        return list(ranking)
    return [(venue, score / top) for venue, score in ranking]


def comb_linear(
    content: VenueRanking, author: VenueRanking, params: FusionParams
) -> VenueRanking:
    """Blend normalized content and author venue rankings linearly."""
    lam = params.lambda_blend
    c = dict(normalize_max(content))
    a = dict(normalize_max(author))
    fused: dict[str, float] = {}
    for venue in c.keys() | a.keys():
        score = lam * c.get(venue, 0.0) + (1.0 - lam) * a.get(venue, 0.0)
        if score > 0.0:
            fused[venue] = score
    return _sort_venues(fused)

"""Venue-level rank fusion and the two-signal linear blend."""

import math
import random

import pytest

from venuerec.fusion import (
    FusionParams,
    comb_lgdcs,
    comb_linear,
    normalize_max,
)


def oracle_comb_lgdcs(ranked, doc_to_venue):
    """Direct restatement: best doc full score, the rest discounted by
    log2(position + 1), using positions from the full ranked list."""
    by_venue = {}
    for doc_id, score, pos in ranked:
        by_venue.setdefault(doc_to_venue[doc_id], []).append((score, pos))
    out = {}
    for venue, entries in by_venue.items():
        best = max(entries, key=lambda e: (e[0], -e[1]))
        total = best[0]
        for score, pos in entries:
            if (score, pos) == best:
                continue
            total += score / math.log2(pos + 1)
        out[venue] = total
    return sorted(out.items(), key=lambda kv: (-kv[1], kv[0]))


class TestCombLgdcs:
    def test_hand_example(self):
        ranked = [("v1#a", 10.0, 1), ("v2#x", 8.0, 2), ("v1#b", 6.0, 3)]
        venues = {"v1#a": "v1", "v2#x": "v2", "v1#b": "v1"}
        got = comb_lgdcs(ranked, venues)
        # v1: 10 + 6/log2(4) = 13, v2: lone doc keeps full score
        assert got == [("v1", pytest.approx(13.0, abs=1e-12)), ("v2", 8.0)]

    def test_single_doc_per_venue_is_identity(self):
        ranked = [("d1", 5.0, 1), ("d2", 3.0, 2), ("d3", 1.0, 3)]
        venues = {"d1": "va", "d2": "vb", "d3": "vc"}
        got = comb_lgdcs(ranked, venues)
        assert got == [("va", 5.0), ("vb", 3.0), ("vc", 1.0)]

    def test_score_tie_prefers_earlier_position(self):
        # Both docs score 4.0; the one ranked earlier is "best" and keeps
        # its full score while the later one is discounted.
        ranked = [("x1", 4.0, 1), ("x2", 4.0, 2)]
        venues = {"x1": "v", "x2": "v"}
        [(venue, score)] = comb_lgdcs(ranked, venues)
        assert venue == "v"
        assert score == pytest.approx(4.0 + 4.0 / math.log2(3), abs=1e-12)

    def test_positions_are_global_not_per_venue(self):
        # v2's doc sits at global position 3 even though it is that
        # venue's second entry.
        ranked = [("a", 9.0, 1), ("b", 7.0, 2), ("c", 5.0, 3)]
        venues = {"a": "v1", "b": "v2", "c": "v2"}
        got = dict(comb_lgdcs(ranked, venues))
        assert got["v2"] == pytest.approx(7.0 + 5.0 / math.log2(4), abs=1e-12)

    def test_empty_input(self):
        assert comb_lgdcs([], {}) == []

    def test_unmapped_doc_rejected(self):
        with pytest.raises(ValueError, match="venue"):
            comb_lgdcs([("mystery", 1.0, 1)], {})

    def test_venue_tie_breaks_by_id(self):
        # identical fused scores across venues -> ascending venue id
        merged = comb_lgdcs(
            [("a", 2.0, 1), ("b", 2.0, 1)], {"a": "vb", "b": "va"}
        )
        assert merged == [("va", 2.0), ("vb", 2.0)]

    def test_matches_oracle_on_random_lists(self):
        rng = random.Random(23)
        for _ in range(50):
            n = rng.randint(1, 60)
            venues = {f"d{i}": f"v{rng.randint(0, 9)}" for i in range(n)}
            scores = sorted(
                (round(rng.uniform(0.1, 20.0), 6) for _ in range(n)), reverse=True
            )
            ranked = [(f"d{i}", scores[i], i + 1) for i in range(n)]
            got = comb_lgdcs(ranked, venues)
            want = oracle_comb_lgdcs(ranked, venues)
            assert [v for v, _ in got] == [v for v, _ in want]
            for (_, gs), (_, ws) in zip(got, want):
                assert gs == pytest.approx(ws, abs=1e-9)


class TestNormalizeMax:
    def test_scales_top_to_one(self):
        got = normalize_max([("v1", 8.0), ("v2", 2.0)])
        assert got == [("v1", 1.0), ("v2", 0.25)]

    def test_empty(self):
        assert normalize_max([]) == []

    def test_nonpositive_top_passes_through(self):
        ranking = [("v1", 0.0), ("v2", -1.0)]
        assert normalize_max(ranking) == ranking

    def test_does_not_mutate_input(self):
        ranking = [("v1", 4.0)]
        normalize_max(ranking)
        assert ranking == [("v1", 4.0)]


class TestCombLinear:
    def test_hand_example(self):
        content = [("v1", 1.0), ("v2", 0.5)]
        author = [("v2", 1.0), ("v3", 0.4)]
        got = comb_linear(content, author, FusionParams(lambda_blend=0.75))
        want = [("v1", 0.75), ("v2", 0.625), ("v3", 0.1)]
        assert [v for v, _ in got] == [v for v, _ in want]
        for (_, gs), (_, ws) in zip(got, want):
            assert gs == pytest.approx(ws, abs=1e-12)

    def test_normalizes_before_blending(self):
        # Raw magnitudes differ by 100x but normalization equalizes them.
        content = [("v1", 200.0)]
        author = [("v2", 2.0)]
        got = dict(comb_linear(content, author, FusionParams(0.5)))
        assert got["v1"] == pytest.approx(0.5)
        assert got["v2"] == pytest.approx(0.5)

    def test_lambda_one_equals_content_ranking_exactly(self):
        content = [("v1", 7.0), ("v2", 3.5), ("v3", 0.7)]
        author = [("v2", 9.0), ("v4", 1.0)]
        got = comb_linear(content, author, FusionParams(1.0))
        assert got == normalize_max(content)

    def test_lambda_zero_equals_author_ranking_exactly(self):
        content = [("v1", 7.0), ("v2", 3.5)]
        author = [("v2", 9.0), ("v4", 1.0), ("v5", 0.25)]
        got = comb_linear(content, author, FusionParams(0.0))
        assert got == normalize_max(author)

    def test_one_empty_side(self):
        content = [("v1", 4.0), ("v2", 1.0)]
        got = comb_linear(content, [], FusionParams(0.75))
        assert [v for v, _ in got] == ["v1", "v2"]
        assert got[0][1] == pytest.approx(0.75)
        assert comb_linear([], [], FusionParams(0.75)) == []

    def test_union_of_venues(self):
        content = [("v1", 1.0)]
        author = [("v2", 1.0)]
        got = dict(comb_linear(content, author, FusionParams(0.6)))
        assert set(got) == {"v1", "v2"}
        assert got["v1"] == pytest.approx(0.6)
        assert got["v2"] == pytest.approx(0.4)

    def test_params_validation(self):
        with pytest.raises(ValueError):
            FusionParams(-0.01)
        with pytest.raises(ValueError):
            FusionParams(1.01)
        FusionParams(0.0)
        FusionParams(1.0)

    def test_sorted_desc_with_id_ties(self):
        content = [("vb", 1.0), ("va", 1.0)]
        got = comb_linear(content, [], FusionParams(1.0))
        assert got == [("va", 1.0), ("vb", 1.0)]

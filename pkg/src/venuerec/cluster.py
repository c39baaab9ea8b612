"""Global K-means over sparse document vectors.

All training articles are clustered together (one global partition, not
one per venue).  Points are CSR rows, centroids are dense.  The
implementation is deliberately plain Lloyd with k-means++ seeding so the
contract stays observable: deterministic argmin tie-breaks (lowest
cluster id), empty clusters repaired by relocating the point farthest
from its assigned centroid, per-iteration inertia recorded, convergence
when the centroid matrix moves by at most ``tol`` in Frobenius norm.
"""

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import sparse

from .errors import DataError

_ASSIGN_CHUNK = 8192


@dataclass(frozen=True)
class ClusteringResult:
    """Hard assignment of articles to clusters plus fit diagnostics."""

    assignment: dict[str, int]
    centroids: np.ndarray
    inertia: float
    n_clusters: int
    seed: int
    n_iter: int
    inertia_history: tuple[float, ...]

    @property
    def n_features(self) -> int:
        return int(self.centroids.shape[1])


def heuristic_k(
    method: str,
    m: int | None = None,
    t: int | None = None,
    e: int | None = None,
    fixed_value: int | None = None,
) -> int:
    """Pick a cluster count.

    ``can``:     floor(sqrt(m / 2)) from the article count alone.
    ``kaufman``: ceil(m * t / e) from matrix shape and fill; the ratio
                 is in practice fractional, and rounding it down can
                 land below the intended scale, so the ceiling is used.
    ``fixed``:   caller-provided value, passed through after validation.
    """
    if method == "can":
        if m is None or m <= 0:
            raise ValueError("can heuristic needs m > 0")
        return max(1, math.floor(math.sqrt(m / 2.0)))
    if method == "kaufman":
        if m is None or m <= 0 or t is None or t <= 0 or e is None or e <= 0:
            raise ValueError("kaufman heuristic needs m, t, e all > 0")
        return max(1, math.ceil(m * t / e))
    if method == "fixed":
        if fixed_value is None or fixed_value < 1:
            raise ValueError("fixed method needs fixed_value >= 1")
        return fixed_value
    raise ValueError(f"unknown K heuristic {method!r}")


def vectors_to_csr(vectors, n_features: int | None = None):
    """Stack DocVectors into a CSR matrix; returns (matrix, article ids)."""
    vectors = list(vectors)
    if not vectors:
        raise ValueError("no vectors given")
    if n_features is None:
        n_features = 1 + max(
            (max(v.weights) for v in vectors if v.weights), default=-1
        )
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    ids = []
    for v in vectors:
        ids.append(v.article_id)
        for fid in sorted(v.weights):
            if fid >= n_features:
                raise ValueError(f"feature id {fid} out of range for {n_features}")
            indices.append(fid)
            data.append(v.weights[fid])
        indptr.append(len(indices))
    mat = sparse.csr_matrix(
        (np.asarray(data, dtype=np.float64), np.asarray(indices), np.asarray(indptr)),
        shape=(len(ids), n_features),
    )
    return mat, ids


def _sq_dists(block, block_sq, centroids, cent_sq):
    # ||x - c||^2 expanded; clipped because the expansion can dip below 0
    d = block_sq[:, None] + cent_sq[None, :] - 2.0 * (block @ centroids.T)
    return np.maximum(np.asarray(d), 0.0)


def _assign(matrix, row_sq, centroids):
    """Nearest-centroid labels and squared distances, chunked over rows."""
    n = matrix.shape[0]
    cent_sq = np.einsum("ij,ij->i", centroids, centroids)
    labels = np.empty(n, dtype=np.int64)
    dists = np.empty(n, dtype=np.float64)
    for start in range(0, n, _ASSIGN_CHUNK):
        stop = min(start + _ASSIGN_CHUNK, n)
        d = _sq_dists(matrix[start:stop], row_sq[start:stop], centroids, cent_sq)
        # argmin takes the first (lowest) index on ties
        lab = np.argmin(d, axis=1)
        labels[start:stop] = lab
        dists[start:stop] = d[np.arange(stop - start), lab]
    return labels, dists


def _kmeanspp(matrix, row_sq, n_clusters, rng):
    """Standard D^2-weighted seeding; returns dense initial centroids."""
    n = matrix.shape[0]
    chosen = [int(rng.integers(n))]
    first = matrix[chosen[0]].toarray().ravel()
    d2 = _sq_dists(matrix, row_sq, first[None, :], np.array([first @ first]))[:, 0]
    for _ in range(1, n_clusters):
        total = float(d2.sum())
        if total <= 0.0:
            # all remaining mass is on already-chosen points; pick any new index
            remaining = np.setdiff1d(np.arange(n), np.asarray(chosen))
            idx = int(rng.choice(remaining))
        else:
            idx = int(rng.choice(n, p=d2 / total))
        chosen.append(idx)
        c = matrix[idx].toarray().ravel()
        cand = _sq_dists(matrix, row_sq, c[None, :], np.array([c @ c]))[:, 0]
        np.minimum(d2, cand, out=d2)
    return matrix[chosen].toarray().astype(np.float64)


def _repair_empty(labels, dists, sizes, matrix, centroids):
    """Give each empty cluster the point farthest from its own centroid.

    Donors are drawn only from clusters of size >= 2 so the repair never
    empties another cluster; one such donor always exists because the
    point count is at least the cluster count.
    """
    moved = np.zeros(len(labels), dtype=bool)
    for k in np.flatnonzero(sizes == 0):
        eligible = ~moved & (sizes[labels] >= 2)
        cand = np.where(eligible, dists, -1.0)
        donor = int(np.argmax(cand))
        sizes[labels[donor]] -= 1
        labels[donor] = k
        sizes[k] = 1
        centroids[k] = matrix[donor].toarray().ravel()
        dists[donor] = 0.0
        moved[donor] = True


def kmeans(
    vectors,
    n_clusters: int,
    seed: int = 0,
    max_iter: int = 300,
    tol: float = 1e-4,
    n_features: int | None = None,
) -> ClusteringResult:
    """Lloyd iterations with k-means++ init over sparse document vectors.

    Raises ``ValueError`` when ``n_clusters`` is outside
    ``[1, number of distinct non-empty points]`` or the other parameters
    are out of range.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if tol < 0:
        raise ValueError("tol must be >= 0")
    matrix, ids = vectors_to_csr(vectors, n_features)
    n = matrix.shape[0]
    nonempty = int((matrix.getnnz(axis=1) > 0).sum())
    if n_clusters < 1 or n_clusters > max(nonempty, 1):
        raise ValueError(
            f"n_clusters must be in [1, {max(nonempty, 1)}] for this corpus, "
            f"got {n_clusters}"
        )
    rng = np.random.default_rng(seed)
    row_sq = np.asarray(matrix.multiply(matrix).sum(axis=1)).ravel()
    centroids = _kmeanspp(matrix, row_sq, n_clusters, rng)

    history: list[float] = []
    n_iter = 0
    for _ in range(max_iter):
        n_iter += 1
        labels, dists = _assign(matrix, row_sq, centroids)
        sizes = np.bincount(labels, minlength=n_clusters)
        if (sizes == 0).any():
            _repair_empty(labels, dists, sizes, matrix, centroids)
        history.append(float(dists.sum()))
        # mean update via a sparse one-hot aggregation
        onehot = sparse.csr_matrix(
            (np.ones(n), (labels, np.arange(n))), shape=(n_clusters, n)
        )
        new_centroids = (onehot @ matrix).toarray() / sizes[:, None]
        shift = float(np.linalg.norm(new_centroids - centroids))
        centroids = new_centroids
        if shift <= tol:
            break

    # final pass so every article ends on its nearest centroid
    labels, dists = _assign(matrix, row_sq, centroids)
    inertia = float(dists.sum())
    history.append(inertia)
    return ClusteringResult(
        assignment={ids[i]: int(labels[i]) for i in range(n)},
        centroids=centroids,
        inertia=inertia,
        n_clusters=n_clusters,
        seed=seed,
        n_iter=n_iter,
        inertia_history=tuple(history),
    )


def save_clustering(result: ClusteringResult, path) -> None:
    """Write the assignment as a small text artifact.

    First line is a header with K, seed, feature count, and final
    inertia; the rest is one ``article_id<TAB>cluster_id`` pair per
    line, sorted by article id.
    """
    path = Path(path)
    lines = [
        f"K={result.n_clusters}\tseed={result.seed}\tt={result.n_features}"
        f"\tinertia={result.inertia!r}"
    ]
    for article_id in sorted(result.assignment):
        lines.append(f"{article_id}\t{result.assignment[article_id]}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_clustering(path) -> tuple[dict[str, str], dict[str, int]]:
    """Read a clustering artifact; returns (header metadata, assignment)."""
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise DataError(f"cannot read clustering file {path}: {exc}") from exc
    if not lines:
        raise DataError(f"clustering file {path} is empty")
    meta: dict[str, str] = {}
    for part in lines[0].split("\t"):
        if "=" not in part:
            raise DataError(f"clustering file {path} has a malformed header")
        key, value = part.split("=", 1)
        meta[key] = value
    assignment: dict[str, int] = {}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        try:
            article_id, cluster_id = line.split("\t")
            assignment[article_id] = int(cluster_id)
        except ValueError as exc:
            raise DataError(f"{path}:{lineno}: malformed assignment line") from exc
    return meta, assignment

"""Variant clustering of cited references.

Two references are variants of the same work when their author/source
strings are close in normalized Levenshtein similarity and their volume
and page numbers do not contradict each other (a shared DOI can also
link them directly).  Candidate pairs are restricted to references with
the same reference publication year; clusters are the connected
components of the link relation.

The pair scan is the hot path: blocks are scanned with a sorted length
window (|len(a) - len(b)| > (1 - threshold) * max_len can never link), a
vectorized character-histogram lower bound, and volume/page masks, so
the exact banded edit-distance kernel only runs on a small survivor set.
The kernel is JIT-compiled when numba is importable and runs as plain
Python otherwise.
"""
from __future__ import annotations

import os
import string
from dataclasses import dataclass

import numpy as np

from .model import CitedReference, Dataset, EmptyDatasetError

_EPS = 1e-9
_HIST_BUCKETS = 64


@dataclass(frozen=True)
class ClusterConfig:
    """Parameters of the variant-linking rule."""

    threshold: float = 0.75
    use_volume: bool = True
    use_page: bool = True
    use_doi: bool = False

    def __post_init__(self) -> None:
        if not 0.0 <= self.threshold <= 1.0:
            raise ValueError("threshold must lie in [0, 1]")


@dataclass
class ClusterAssignment:
    """A partition of the dataset's references into variant clusters."""

    cluster_of: dict[int, int]
    n_clusters: int


class UnionFind:
    """Disjoint sets over 0..n-1 with union by size and path compression."""

    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, x: int, y: int) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return
        if self.size[rx] < self.size[ry]:
            rx, ry = ry, rx
        self.parent[ry] = rx
        self.size[rx] += self.size[ry]


def levenshtein_distance(a: str, b: str) -> int:
    """Unit-cost insert/delete/substitute edit distance."""
    if a == b:
        return 0
    la, lb = len(a), len(b)
    if la == 0:
        return lb
    if lb == 0:
        return la
    if _KERNEL_JITTED:
        return _scalar_kernel_distance(a, b)
    if la < lb:
        a, b, la, lb = b, a, lb, la
    prev = list(range(lb + 1))
    for i in range(1, la + 1):
        ca = a[i - 1]
        cur = [i]
        append = cur.append
        pj = prev[0]
        for j in range(1, lb + 1):
            pj1 = prev[j]
            c = pj if ca == b[j - 1] else pj + 1
            d = pj1 + 1
            if d < c:
                c = d
            e = cur[j - 1] + 1
            if e < c:
                c = e
            append(c)
            pj = pj1
        prev = cur
    return prev[lb]


def levenshtein_similarity(a: str, b: str) -> float:
    """Normalized similarity 1 - lev(a, b) / max(|a|, |b|); 1.0 when both empty."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - levenshtein_distance(a, b) / longest


_PUNCT_TABLE = str.maketrans("", "", string.punctuation)


def comparison_string(ref: CitedReference) -> str:
    """The edit-distance payload of a reference: lowercased author and
    source joined with "|", punctuation stripped, whitespace collapsed.
    Volume/page/DOI act as constraints, not as payload."""
    author = (ref.parsed.first_author or "").lower().translate(_PUNCT_TABLE)
    source = (ref.parsed.source or "").lower().translate(_PUNCT_TABLE)
    return " ".join(author.split()) + "|" + " ".join(source.split())


def _pair_distances_py(codes, lengths, ii, jj, limits, out):
    """Bounded edit distance for each candidate pair.

    ``codes`` holds one string per row as character codes; pair ``k``
    compares rows ``ii[k]`` and ``jj[k]``.  ``out[k]`` is the exact
    distance when it is <= ``limits[k]`` and ``limits[k] + 1``
    otherwise.  Common prefixes/suffixes are trimmed first and the DP
    only fills a band of width ``2 * limit + 1``, abandoning a pair as
    soon as a full row exceeds the limit.
    """
    for k in range(ii.shape[0]):
        a = ii[k]
        b = jj[k]
        la = lengths[a]
        lb = lengths[b]
        if la < lb:
            a, b = b, a
            la, lb = lb, la
        limit = limits[k]
        if la - lb > limit:
            out[k] = limit + 1
            continue
        pre = 0
        while pre < lb and codes[a, pre] == codes[b, pre]:
            pre += 1
        suf = 0
        while suf < lb - pre and codes[a, la - 1 - suf] == codes[b, lb - 1 - suf]:
            suf += 1
        la2 = la - pre - suf
        lb2 = lb - pre - suf
        if lb2 == 0:
            out[k] = la2 if la2 <= limit else limit + 1
            continue
        big = limit + 1
        prev = np.empty(lb2 + 1, dtype=np.int32)
        cur = np.empty(lb2 + 1, dtype=np.int32)
        for j in range(lb2 + 1):
            prev[j] = j if j <= limit else big
        dist = big
        for i in range(1, la2 + 1):
            ca = codes[a, pre + i - 1]
            lo = i - limit
            if lo < 1:
                lo = 1
            hi = i + limit
            if hi > lb2:
                hi = lb2
            cur[lo - 1] = i if lo == 1 else big
            rowmin = cur[lo - 1]
            for j in range(lo, hi + 1):
                c = prev[j - 1]
                if ca != codes[b, pre + j - 1]:
                    c += 1
                d = prev[j] + 1
                if d < c:
                    c = d
                e = cur[j - 1] + 1
                if e < c:
                    c = e
                cur[j] = c
                if c < rowmin:
                    rowmin = c
            if hi < lb2:
                cur[hi + 1] = big
            if rowmin > limit:
                dist = big
                break
            tmp = prev
            prev = cur
            cur = tmp
            dist = prev[lb2]
        out[k] = dist if dist <= limit else big


if os.environ.get("RPYS_NO_NUMBA"):
    _pair_distances = _pair_distances_py
else:
    try:
        from numba import njit

        _pair_distances = njit(cache=True, nogil=True)(_pair_distances_py)
    except ImportError:  # pragma: no cover - exercised only without numba
        _pair_distances = _pair_distances_py

_KERNEL_JITTED = _pair_distances is not _pair_distances_py

_SCALAR_II = np.zeros(1, dtype=np.int64)
_SCALAR_JJ = np.ones(1, dtype=np.int64)


def _scalar_kernel_distance(a: str, b: str) -> int:
    """One-pair dispatch into the batch kernel (full band: exact)."""
    la, lb = len(a), len(b)
    maxlen = max(la, lb)
    codes = np.zeros((2, maxlen), dtype=np.uint32)
    codes[0, :la] = np.frombuffer(a.encode("utf-32-le"), dtype=np.uint32)
    codes[1, :lb] = np.frombuffer(b.encode("utf-32-le"), dtype=np.uint32)
    lengths = np.array([la, lb], dtype=np.int32)
    limits = np.array([maxlen], dtype=np.int32)
    out = np.empty(1, dtype=np.int32)
    _pair_distances(codes, lengths, _SCALAR_II, _SCALAR_JJ, limits, out)
    return int(out[0])


def _encode_block(strings: list[str]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = len(strings)
    lengths = np.fromiter((len(s) for s in strings), dtype=np.int32, count=n)
    maxlen = int(lengths.max()) if n else 0
    codes = np.zeros((n, max(maxlen, 1)), dtype=np.uint32)
    hist = np.zeros((n, _HIST_BUCKETS), dtype=np.int16)
    for k, s in enumerate(strings):
        row = np.frombuffer(s.encode("utf-32-le"), dtype=np.uint32)
        codes[k, : len(s)] = row
        np.add.at(hist[k], row & (_HIST_BUCKETS - 1), 1)
    return codes, lengths, hist


def _intern_ids(values: list[str | None]) -> np.ndarray:
    """Map strings to positive int ids; missing values become 0."""
    ids = np.zeros(len(values), dtype=np.int64)
    table: dict[str, int] = {}
    for k, v in enumerate(values):
        if v is not None:
            ids[k] = table.setdefault(v, len(table) + 1)
    return ids


def _scan_block(members: list[tuple[int, CitedReference]], config: ClusterConfig,
                uf: UnionFind) -> None:
    """Union every linked pair inside one same-RPY block."""
    if config.use_doi:
        first_with: dict[str, int] = {}
        for idx, ref in members:
            for doi in ref.parsed.dois:
                if doi in first_with:
                    uf.union(first_with[doi], idx)
                else:
                    first_with[doi] = idx

    n = len(members)
    if n < 2:
        return
    t = config.threshold
    members = sorted(members, key=lambda m: len(comparison_string(m[1])))
    strings = [comparison_string(ref) for _, ref in members]
    codes, lengths, hist = _encode_block(strings)
    vols = _intern_ids([ref.parsed.volume for _, ref in members])
    pages = _intern_ids([ref.parsed.page for _, ref in members])

    ii_parts: list[np.ndarray] = []
    jj_parts: list[np.ndarray] = []
    lim_parts: list[np.ndarray] = []
    for i in range(n - 1):
        li = int(lengths[i])
        hi = n if t <= 0 else int(np.searchsorted(lengths, li / t + _EPS, side="right"))
        if hi <= i + 1:
            continue
        w = slice(i + 1, hi)
        dmax = ((1.0 - t) * lengths[w] + _EPS).astype(np.int32)
        ok = np.abs(hist[w] - hist[i]).sum(axis=1, dtype=np.int32) <= 2 * dmax
        if config.use_volume and vols[i] != 0:
            ok &= (vols[w] == 0) | (vols[w] == vols[i])
        if config.use_page and pages[i] != 0:
            ok &= (pages[w] == 0) | (pages[w] == pages[i])
        sel = np.nonzero(ok)[0]
        if sel.size:
            ii_parts.append(np.full(sel.size, i, dtype=np.int64))
            jj_parts.append(i + 1 + sel.astype(np.int64))
            lim_parts.append(dmax[sel])

    if not ii_parts:
        return
    ii = np.concatenate(ii_parts)
    jj = np.concatenate(jj_parts)
    limits = np.concatenate(lim_parts)
    out = np.empty(ii.size, dtype=np.int32)
    _pair_distances(codes, lengths, ii, jj, limits, out)
    for k in np.nonzero(out <= limits)[0]:
        uf.union(members[int(ii[k])][0], members[int(jj[k])][0])


def cluster(dataset: Dataset, config: ClusterConfig) -> ClusterAssignment:
    """Partition the dataset's references into variant clusters.

    Pure: the dataset is not modified.  Cluster ids are consecutive
    integers in order of first appearance along the reference list, so
    identical inputs always yield identical assignments.
    """
    if dataset.is_empty:
        raise EmptyDatasetError("cannot cluster an empty dataset")

    refs = dataset.references
    uf = UnionFind(len(refs))
    blocks: dict[int | None, list[tuple[int, CitedReference]]] = {}
    for idx, ref in enumerate(refs):
        blocks.setdefault(ref.rpy, []).append((idx, ref))
    for members in blocks.values():
        _scan_block(members, config, uf)

    cluster_of: dict[int, int] = {}
    root_ids: dict[int, int] = {}
    for idx, ref in enumerate(refs):
        root = uf.find(idx)
        cluster_of[ref.cr_id] = root_ids.setdefault(root, len(root_ids))
    return ClusterAssignment(cluster_of=cluster_of, n_clusters=len(root_ids))


def merge(dataset: Dataset, assignment: ClusterAssignment) -> Dataset:
    """Collapse each cluster into one reference with summed counts.

    The canonical member is the one with the largest pre-merge count
    (ties: lexicographically smallest raw string); it keeps its id and
    parsed fields.  Total counts are conserved.
    """
    ref_ids = {r.cr_id for r in dataset.references}
    if set(assignment.cluster_of) != ref_ids:
        raise ValueError("assignment does not partition the dataset's references")

    groups: dict[int, list[CitedReference]] = {}
    for ref in dataset.references:
        groups.setdefault(assignment.cluster_of[ref.cr_id], []).append(ref)

    canonical: dict[int, CitedReference] = {}
    for cid, members in groups.items():
        best = min(members, key=lambda r: (-r.n_cr, r.raw))
        counts: dict[int, int] = {}
        for member in members:
            for year, cnt in member.counts_by_citing_year.items():
                counts[year] = counts.get(year, 0) + cnt
        canonical[cid] = CitedReference(
            cr_id=best.cr_id,
            parsed=best.parsed,
            counts_by_citing_year=counts,
            cluster_id=None,
        )

    merged: list[CitedReference] = []
    emitted: set[int] = set()
    for ref in dataset.references:
        cid = assignment.cluster_of[ref.cr_id]
        if cid not in emitted and canonical[cid].cr_id == ref.cr_id:
            merged.append(canonical[cid])
            emitted.add(cid)

    out = dataset.copy()
    out.references = merged
    out.op_log.append(
        f"merge: {len(dataset.references)} -> {len(merged)} distinct references"
    )
    return out

"""A mutable analysis session over an immutable dataset value.

Mutations replace the session's dataset with a new value and push the
previous state onto an undo stack, so readers holding a snapshot are
never exposed to a half-applied operation and any mutation can be
rolled back exactly.
"""
from __future__ import annotations

from .clustering import ClusterAssignment, ClusterConfig, cluster, merge
from .model import Dataset, remove_by_ncr


class OperationOrderError(RuntimeError):
    """An operation was invoked before its prerequisite (e.g. merge
    before cluster)."""


class Session:
    def __init__(self, dataset: Dataset):
        self.dataset = dataset
        self.assignment: ClusterAssignment | None = None
        self._undo: list[tuple[Dataset, ClusterAssignment | None]] = []

    @property
    def undo_depth(self) -> int:
        return len(self._undo)

    def snapshot(self) -> Dataset:
        """The current dataset value; safe to read from other threads."""
        return self.dataset

    def _push_undo(self) -> None:
        self._undo.append((self.dataset, self.assignment))

    def cluster(self, config: ClusterConfig) -> int:
        """Compute the variant clusters and stamp them on the references."""
        assignment = cluster(self.dataset, config)
        self._push_undo()
        stamped = self.dataset.copy()
        for ref in stamped.references:
            ref.cluster_id = assignment.cluster_of[ref.cr_id]
        stamped.op_log.append(
            "cluster: threshold {}, volume {}, page {}, DOI {} -> {} clusters".format(
                config.threshold,
                str(config.use_volume).lower(),
                str(config.use_page).lower(),
                str(config.use_doi).lower(),
                assignment.n_clusters,
            )
        )
        self.dataset = stamped
        self.assignment = assignment
        return assignment.n_clusters

    def merge(self) -> int:
        """Merge the most recent cluster assignment; returns the new
        distinct-reference count."""
        if self.assignment is None:
            raise OperationOrderError("merge requires a preceding cluster")
        merged = merge(self.dataset, self.assignment)
        self._push_undo()
        self.dataset = merged
        self.assignment = None
        return len(merged.references)

    def remove_ncr(self, lo: int, hi: int) -> int:
        """Remove references with lo <= N_CR <= hi; returns how many."""
        before = len(self.dataset.references)
        removed = remove_by_ncr(self.dataset, lo, hi)
        self._push_undo()
        self.dataset = removed
        # a removal invalidates any pending assignment
        self.assignment = None
        return before - len(removed.references)

    def undo(self) -> None:
        if not self._undo:
            raise OperationOrderError("nothing to undo")
        self.dataset, self.assignment = self._undo.pop()

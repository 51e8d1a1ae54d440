"""Stand-alone DBSCAN with a pluggable distance.

``min_pts`` counts the query point itself and neighbourhoods are closed
balls (``d <= eps``). A border point reachable from several clusters joins
the first cluster that reaches it.
"""

from __future__ import annotations

import csv
import enum
from collections import deque
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

NOISE = -1


class Role(str, enum.Enum):
    CORE = "core"
    BORDER = "border"
    NOISE = "noise"


@dataclass(frozen=True)
class DbscanParams:
    eps: float = 0.04
    min_pts: int = 10

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("eps must be positive")
        if self.min_pts < 1:
            raise ValueError("min_pts must be at least 1")


@dataclass(frozen=True)
class ClusterAssignment:
    labels: tuple[int, ...]
    roles: tuple[Role, ...]

    @property
    def n_clusters(self) -> int:
        return max(self.labels, default=NOISE) + 1

    @property
    def n_noise(self) -> int:
        return sum(1 for lab in self.labels if lab == NOISE)

    def core_indices(self) -> set[int]:
        return {i for i, r in enumerate(self.roles) if r is Role.CORE}

    def write_csv(self, path, item_ids: Sequence[str]) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["item_id", "cluster_id", "role"])
            for item, lab, role in zip(item_ids, self.labels, self.roles):
                w.writerow([item, lab, role.value])


def dbscan_neighbors(n: int, region_query: Callable[[int], Sequence[int]], params: DbscanParams) -> ClusterAssignment:
    """DBSCAN driven by a region-query callback returning the eps-neighbourhood of an index.

    Every index is queried at most once.
    """
    labels = [NOISE] * n
    core = [False] * n
    visited = [False] * n
    cluster_id = -1
    for i in range(n):
        if visited[i]:
            continue
        visited[i] = True
        seeds = region_query(i)
        if len(seeds) < params.min_pts:
            continue
        core[i] = True
        cluster_id += 1
        labels[i] = cluster_id
        queue = deque(seeds)
        while queue:
            q = int(queue.popleft())
            if labels[q] == NOISE:
                labels[q] = cluster_id
            if visited[q]:
                continue
            visited[q] = True
            reach = region_query(q)
            if len(reach) >= params.min_pts:
                core[q] = True
                queue.extend(reach)
    roles = tuple(
        Role.CORE if core[i] else (Role.NOISE if labels[i] == NOISE else Role.BORDER) for i in range(n)
    )
    return ClusterAssignment(tuple(labels), roles)


def dbscan(items: Sequence, distance: Callable, params: DbscanParams = DbscanParams()) -> ClusterAssignment:
    """DBSCAN over ``items`` using ``distance(a, b)``; neighbourhood scans are linear."""
    n = len(items)

    def region_query(i):
        a = items[i]
        return [j for j in range(n) if distance(a, items[j]) <= params.eps]

    return dbscan_neighbors(n, region_query, params)


def dbscan_packed(packed, params: DbscanParams = DbscanParams(), cache: bool = False) -> ClusterAssignment:
    """DBSCAN over :class:`~semtraj.metric.PackedProfiles` using the distance kernels.

    With ``cache=True`` the full distance matrix is computed once up front.
    """
    n = len(packed)
    if cache:
        dist = packed.matrix()
        return dbscan_neighbors(n, lambda i: np.flatnonzero(dist[i] <= params.eps), params)
    return dbscan_neighbors(n, lambda i: packed.neighbors(i, params.eps), params)


def cache_fits(n: int, budget_bytes: int) -> bool:
    return n * n * 8 <= budget_bytes

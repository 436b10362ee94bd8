"""Deterministic maximum bipartite matching (Hopcroft-Karp shape) with
alternating-reachability extraction of Hall violators."""

from __future__ import annotations

from collections import deque
from typing import Hashable, Sequence

INF = -1


def max_matching(
    lefts: Sequence[Hashable], adjacency: dict
) -> tuple[dict, dict]:
    """Maximum matching; vertices are processed in the given order so the
    result is reproducible.  Returns (pair_left, pair_right)."""
    pair_left: dict = {}
    pair_right: dict = {}
    dist: dict = {}

    def bfs() -> bool:
        queue = deque()
        for u in lefts:
            if u not in pair_left:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = INF
        found = INF
        while queue:
            u = queue.popleft()
            if found != INF and dist[u] >= found:
                continue
            for v in adjacency[u]:
                if v not in pair_right:
                    if found == INF:
                        found = dist[u] + 1
                else:
                    w = pair_right[v]
                    if dist[w] == INF:
                        dist[w] = dist[u] + 1
                        queue.append(w)
        return found != INF

    def dfs(u) -> bool:
        for v in adjacency[u]:
            w = pair_right.get(v)
            if w is None or (dist[w] == dist[u] + 1 and dfs(w)):
                pair_left[u] = v
                pair_right[v] = u
                return True
        dist[u] = INF
        return False

    while bfs():
        for u in lefts:
            if u not in pair_left:
                dfs(u)
    return pair_left, pair_right


def alternating_reachable(
    lefts: Sequence[Hashable], adjacency: dict, pair_left: dict, pair_right: dict
) -> set:
    """Left vertices reachable from the unmatched ones by alternating paths
    (unmatched edge out, matched edge back); the classical Hall violator."""
    reached = {u for u in lefts if u not in pair_left}
    queue = deque(reached)
    while queue:
        u = queue.popleft()
        for v in adjacency[u]:
            w = pair_right.get(v)
            if w is not None and w not in reached:
                reached.add(w)
                queue.append(w)
    return reached

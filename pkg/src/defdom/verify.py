"""Feasibility checking for defender sets.

A defender set counters an attack iff a bipartite matching saturates the
attacked vertices; it is k-defensive iff no Hall violator exists among the
subsets of size at most k that are connected in the graph square.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterator, Optional

from .graph import Graph, VertexSet, closed_nbhd_of_set
from .separation import find_violator_mask, iter_connected_subsets


@dataclass(frozen=True)
class Attack:
    """A set of simultaneously attacked vertices (1..k of them)."""

    vertices: VertexSet

    def __post_init__(self):
        if len(self.vertices) < 1:
            raise ValueError("attack must contain at least one vertex")

    @classmethod
    def of(cls, vertices) -> "Attack":
        return cls(VertexSet.of(vertices))


@dataclass(frozen=True)
class DefenderSet:
    """The 0/1 defender selection (the x-vector of the master problem)."""

    members: VertexSet

    @classmethod
    def of(cls, vertices) -> "DefenderSet":
        return cls(VertexSet.of(vertices))

    def __len__(self) -> int:
        return len(self.members)


def maximum_bipartite_matching(
    left_adj: list[list[int]], n_right: int
) -> tuple[int, list[int], list[int]]:
    """Hopcroft-Karp maximum matching.

    ``left_adj[i]`` lists right-side indices adjacent to left vertex i.
    Returns (size, match_left, match_right) with -1 for unmatched.
    """
    n_left = len(left_adj)
    INF = float("inf")
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    dist = [0.0] * n_left

    def bfs() -> bool:
        q = deque()
        for u in range(n_left):
            if match_l[u] == -1:
                dist[u] = 0.0
                q.append(u)
            else:
                dist[u] = INF
        reachable_free = False
        while q:
            u = q.popleft()
            for v in left_adj[u]:
                w = match_r[v]
                if w == -1:
                    reachable_free = True
                elif dist[w] == INF:
                    dist[w] = dist[u] + 1
                    q.append(w)
        return reachable_free

    def dfs(u: int) -> bool:
        for v in left_adj[u]:
            w = match_r[v]
            if w == -1 or (dist[w] == dist[u] + 1 and dfs(w)):
                match_l[u] = v
                match_r[v] = u
                return True
        dist[u] = INF
        return False

    size = 0
    while bfs():
        for u in range(n_left):
            if match_l[u] == -1 and dfs(u):
                size += 1
    return size, match_l, match_r


def counters(g: Graph, d: DefenderSet, a: Attack) -> bool:
    """True iff distinct defenders can be assigned injectively to all attacked vertices."""
    attacked = a.vertices.vertices()
    defenders = d.members.vertices()
    if len(defenders) < len(attacked):
        return False
    right_index = {v: i for i, v in enumerate(defenders)}
    left_adj = []
    for j in attacked:
        nbhd = g.closed_masks[j]
        left_adj.append([right_index[i] for i in defenders if (nbhd >> i) & 1])
    size, _, _ = maximum_bipartite_matching(left_adj, len(defenders))
    return size == len(attacked)


def find_hall_violator(
    g: Graph, d: DefenderSet, k: int, deadline: Optional[float] = None
) -> Optional[VertexSet]:
    """Some S with |S| <= k, connected in the square, and |N[S] ∩ D| < |S|.

    Returns None iff ``d`` is k-defensive.  Shares the separation DFS with an
    unlimited budget and early exit on the first violator.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    mask = find_violator_mask(g, d.members.mask, k, deadline=deadline)
    return None if mask is None else VertexSet(mask)


def is_k_defensive(g: Graph, d: DefenderSet, k: int) -> bool:
    return find_hall_violator(g, d, k) is None


def enumerate_connected_attacks(g: Graph, k: int) -> Iterator[Attack]:
    """All attacks of size 1..k whose vertices are connected in the square of g."""
    if k < 1:
        raise ValueError("k must be >= 1")
    for s_mask, _cov, _size in iter_connected_subsets(g, k):
        yield Attack(VertexSet(s_mask))

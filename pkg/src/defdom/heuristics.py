"""Bound-strengthening heuristics.

Two procedures tighten the master problem before search: independent-set
attacks seed a batch of initial Hall cuts (a lower bound), and a clique
cover reduced by bipartite matching produces a feasible defender set
(an upper bound / incumbent).
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import Graph, VertexSet, closed_nbhd_of_set, is_chordal, iter_bits, mcs_order
from .separation import FeasibilityCut, cut_from_violator
from .verify import DefenderSet, maximum_bipartite_matching


@dataclass(frozen=True)
class CliqueCover:
    """Cliques covering V, sorted by descending cardinality."""

    cliques: tuple[VertexSet, ...]
    method: str  # "dsatur" or "peo"

    def __len__(self) -> int:
        return len(self.cliques)


@dataclass(frozen=True)
class InitialCutSet:
    cuts: tuple[FeasibilityCut, ...]
    lb0: int


def greedy_mis(g: Graph) -> VertexSet:
    """Maximal independent set, grown low-degree-first (ties by index)."""
    order = sorted(range(g.n), key=lambda v: (g.degree(v), v))
    marked = 0
    out = 0
    for v in order:
        if not (marked >> v) & 1:
            out |= 1 << v
            marked |= g.closed_masks[v]
    return VertexSet(out)


def initial_cuts(g: Graph, k: int) -> InitialCutSet:
    """Hall cuts from independent attacks grown around each MIS vertex.

    For every target size t in 1..k and every seed vertex of the greedy MIS,
    an independent attack is grown by repeatedly adding the non-adjacent
    vertex with the smallest closed neighborhood (ties by index).  Attacks
    that cannot reach size t are discarded.  Emits at most k * |MIS| cuts.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    seeds = greedy_mis(g)
    by_size = sorted(range(g.n), key=lambda v: (len(g.closed(v)), v))
    cuts: list[FeasibilityCut] = []
    seen: set[int] = set()
    for t in range(1, k + 1):
        for s in seeds:
            a_mask = 1 << s
            blocked = g.closed_masks[s]
            size = 1
            for u in by_size:
                if size == t:
                    break
                if not (blocked >> u) & 1:
                    a_mask |= 1 << u
                    blocked |= g.closed_masks[u]
                    size += 1
            if size == t and a_mask not in seen:
                seen.add(a_mask)
                cuts.append(cut_from_violator(g, VertexSet(a_mask)))
    from .master import lp_bound_over_cuts  # deferred: master imports this module

    lb0 = lp_bound_over_cuts(g.n, cuts)
    return InitialCutSet(cuts=tuple(cuts), lb0=lb0)


def clique_cover_dsatur(g: Graph) -> CliqueCover:
    """Clique cover from DSATUR coloring of the complement graph.

    Saturation ties break by higher complement degree, then lower index.
    """
    n = g.n
    full = (1 << n) - 1
    comp = [full & ~g.closed_masks[v] for v in range(n)]  # open complement adjacency
    color = [-1] * n
    neighbor_colors: list[set[int]] = [set() for _ in range(n)]
    n_colors = 0
    classes: list[int] = []
    for _ in range(n):
        best = -1
        key = (-1, -1, 1)
        for v in range(n):
            if color[v] == -1:
                cand = (len(neighbor_colors[v]), comp[v].bit_count(), -v)
                if cand > key:
                    key, best = cand, v
        used = neighbor_colors[best]
        c = next(i for i in range(n_colors + 1) if i not in used)
        color[best] = c
        if c == n_colors:
            n_colors += 1
            classes.append(0)
        classes[c] |= 1 << best
        for u in iter_bits(comp[best]):
            if color[u] == -1:
                neighbor_colors[u].add(c)
    cliques = sorted((VertexSet(m) for m in classes), key=len, reverse=True)
    return CliqueCover(cliques=tuple(cliques), method="dsatur")


def clique_cover_peo(g: Graph) -> CliqueCover:
    """Minimum clique cover of a chordal graph along a perfect elimination ordering.

    Scanning the ordering, each still-uncovered vertex starts a clique made of
    itself and its uncovered later neighbors (a clique by the ordering's
    defining property).  The starting vertices form an independent set, so the
    cover size meets the independence-number lower bound and is minimum.
    """
    order = mcs_order(g)
    if not is_chordal(g):
        raise ValueError("graph is not chordal")
    pos = [0] * g.n
    for i, v in enumerate(order):
        pos[v] = i
    covered = 0
    classes = []
    for v in order:
        if (covered >> v) & 1:
            continue
        m = 1 << v
        for u in g.adj[v]:
            if pos[u] > pos[v] and not (covered >> u) & 1:
                m |= 1 << u
        covered |= m
        classes.append(VertexSet(m))
    cliques = sorted(classes, key=len, reverse=True)
    return CliqueCover(cliques=tuple(cliques), method="peo")


def baseline_cover_bound(g: Graph, k: int, cover: CliqueCover) -> int:
    """Upper bound from taking min(k, |C|) defenders in every clique."""
    return sum(min(k, len(c)) for c in cover.cliques)


def _top_degree(g: Graph, mask: int, count: int) -> int:
    """Mask of the ``count`` highest-degree vertices in ``mask`` (ties by index)."""
    picked = sorted(iter_bits(mask), key=lambda v: (-g.degree(v), v))[:count]
    out = 0
    for v in picked:
        out |= 1 << v
    return out


def warm_start(g: Graph, k: int, cover: CliqueCover) -> DefenderSet:
    """Feasible defender set from a matching-reduced clique cover.

    Per clique (largest first), a maximum matching between the current
    defenders and the clique's vertices (defender d may protect v iff
    v is in N[d], self-protection allowed) identifies the unsaturated
    vertices U; the min(k, |U|) highest-degree members of U join D.

    The reduction alone can leave local deficiencies, so a completion pass
    then enforces |N[v] ∩ D| >= min(k, |N[v]|) for every vertex v, which
    suffices for k-defensiveness: an attack containing any vertex with
    |N[v]| >= k sees at least k defenders, and otherwise N[S] lies inside D
    so |N[S] ∩ D| = |N[S]| >= |S|.  If the completed set ends up larger than
    the plain min(k,|C|)-per-clique selection (itself feasible when the
    cover is disjoint), that selection is returned instead.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    d_mask = 0
    for clique in cover.cliques:
        members = clique.vertices()
        defenders = tuple(iter_bits(d_mask))
        right_index = {v: i for i, v in enumerate(members)}
        left_adj = []
        for d in defenders:
            nbhd = g.closed_masks[d]
            left_adj.append([right_index[v] for v in members if (nbhd >> v) & 1])
        _, _, match_r = maximum_bipartite_matching(left_adj, len(members))
        u_mask = 0
        for i, v in enumerate(members):
            if match_r[i] == -1:
                u_mask |= 1 << v
        need = min(k, u_mask.bit_count())
        d_mask |= _top_degree(g, u_mask, need)

    for v in range(g.n):
        nbhd = g.closed_masks[v]
        want = min(k, nbhd.bit_count())
        short = want - (nbhd & d_mask).bit_count()
        if short > 0:
            d_mask |= _top_degree(g, nbhd & ~d_mask, short)

    union = 0
    disjoint = True
    for c in cover.cliques:
        if union & c.mask:
            disjoint = False
            break
        union |= c.mask
    if disjoint and d_mask.bit_count() > baseline_cover_bound(g, k, cover):
        d_mask = 0
        for c in cover.cliques:
            d_mask |= _top_degree(g, c.mask, min(k, len(c)))
    return DefenderSet(VertexSet(d_mask))

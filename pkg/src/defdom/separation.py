"""Combinatorial Benders feasibility-cut separation.

Cuts take the Hall-violator form sum_{i in N[S]} x_i >= |S|.  Violators are
sampled by a budgeted depth-first search over subsets that are connected in
the graph square, maintained in a bounded, dominance-free buffer.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Iterator, Optional

from .graph import Graph, VertexSet, closed_nbhd_of_set, iter_bits

DEFAULT_BUDGET = 50_000
DEFAULT_CAPACITY = 50

_TIME_CHECK_EVERY = 10_000


class SeparationTimeout(Exception):
    """Separation hit its deadline before the search finished."""


def defender_mask(x) -> int:
    """Accept a DefenderSet, VertexSet, or raw bitmask and return the bitmask."""
    members = getattr(x, "members", None)
    if members is not None:
        return members.mask
    if isinstance(x, VertexSet):
        return x.mask
    if isinstance(x, int):
        return x
    raise TypeError(f"cannot interpret {type(x).__name__} as a defender set")


@dataclass(frozen=True)
class FeasibilityCut:
    """Hall-violator cut: sum of x over ``coverage`` (= N[S]) at least ``rhs`` (= |S|)."""

    violator: VertexSet
    coverage: VertexSet
    rhs: int

    def satisfied_by(self, x) -> bool:
        return (self.coverage.mask & defender_mask(x)).bit_count() >= self.rhs


@dataclass(frozen=True)
class DualRay:
    """Ray of the per-attack dual subproblem built from a Hall violator."""

    alpha: dict[int, int]   # attack vertex -> 0/1
    beta: dict[int, int]    # coverage vertex -> -1/0

    def objective_at(self, x) -> int:
        xm = defender_mask(x)
        return sum(self.alpha.values()) + sum(
            b for i, b in self.beta.items() if (xm >> i) & 1
        )

    def is_feasible_direction(self, g: Graph) -> bool:
        if any(b > 0 for b in self.beta.values()):
            return False
        for j, a in self.alpha.items():
            for i in iter_bits(g.closed_masks[j]):
                if a + self.beta.get(i, 0) > 0:
                    return False
        return True


def build_dual_ray(g: Graph, attack, violator: VertexSet) -> DualRay:
    """Dual ray with alpha=1 on the violator, beta=-1 on its closed neighborhood."""
    attack_set = attack.vertices if hasattr(attack, "vertices") else attack
    if not violator.issubset(attack_set):
        raise ValueError("violator must be a subset of the attack")
    cov = closed_nbhd_of_set(g, violator)
    attack_cov = closed_nbhd_of_set(g, attack_set)
    alpha = {j: (1 if j in violator else 0) for j in attack_set}
    beta = {i: (-1 if i in cov else 0) for i in attack_cov}
    return DualRay(alpha=alpha, beta=beta)


def cut_from_violator(g: Graph, violator: VertexSet) -> FeasibilityCut:
    if len(violator) == 0:
        raise ValueError("violator must be nonempty")
    return FeasibilityCut(
        violator=violator,
        coverage=closed_nbhd_of_set(g, violator),
        rhs=len(violator),
    )


def violation(cut: FeasibilityCut, xhat) -> int:
    """rhs - |coverage ∩ xhat|; positive iff the cut is violated at xhat."""
    return cut.rhs - (cut.coverage.mask & defender_mask(xhat)).bit_count()


def dominates(stronger: FeasibilityCut, weaker: FeasibilityCut) -> bool:
    """Superset-violator dominance: S ⊂ S' and |S'\\S| >= |N[S']\\N[S]|."""
    sv, wv = stronger.violator.mask, weaker.violator.mask
    if sv == wv or wv & ~sv:
        return False
    extra_violator = (sv & ~wv).bit_count()
    extra_coverage = (stronger.coverage.mask & ~weaker.coverage.mask).bit_count()
    return extra_violator >= extra_coverage


class CutBuffer:
    """Bounded collection of violated cuts, kept pairwise dominance-free."""

    def __init__(self, capacity: int = DEFAULT_CAPACITY):
        if capacity < 1:
            raise ValueError("capacity must be >= 1")
        self.capacity = capacity
        self.entries: list[tuple[FeasibilityCut, int]] = []

    def __len__(self) -> int:
        return len(self.entries)

    def cuts(self) -> list[FeasibilityCut]:
        return [c for c, _ in self.entries]

    def __iter__(self):
        return iter(self.entries)


def buffer_update(buf: CutBuffer, g: Graph, candidate: VertexSet, xhat) -> CutBuffer:
    """Insert a violating candidate, discarding dominated cuts on either side.

    When the buffer is full the minimum-violation entry is evicted, but only
    for a strictly more violated candidate.
    """
    cut = cut_from_violator(g, candidate)
    viol = violation(cut, xhat)
    if viol < 1:
        raise ValueError("candidate is not a Hall violator at xhat")
    return _buffer_insert(buf, cut, viol)


def _buffer_insert(buf: CutBuffer, cut: FeasibilityCut, viol: int) -> CutBuffer:
    kept = []
    for old, old_viol in buf.entries:
        if old.violator == cut.violator:
            return buf
        if dominates(cut, old):
            continue  # old is weaker, drop it
        if dominates(old, cut):
            return buf  # candidate is weaker than a buffered cut
        kept.append((old, old_viol))
    buf.entries = kept
    if len(buf.entries) < buf.capacity:
        buf.entries.append((cut, viol))
        return buf
    min_idx = min(range(len(buf.entries)), key=lambda i: buf.entries[i][1])
    if viol > buf.entries[min_idx][1]:
        buf.entries[min_idx] = (cut, viol)
    return buf


# ---------------------------------------------------------------------------
# connected-subset DFS

def iter_connected_subsets(g: Graph, k: int) -> Iterator[tuple[int, int, int]]:
    """Enumerate subsets of size 1..k connected in the square of ``g``.

    Yields (subset_mask, coverage_mask, size) in depth-first preorder, each
    subset exactly once: sets are grown from their minimum-index vertex using
    extension sets restricted to unvisited square-neighbors.
    """
    sq = g.square_adj_masks()
    closed = g.closed_masks
    n = g.n

    def grow(s_mask, cov, size, ext, seen, above):
        yield (s_mask, cov, size)
        if size == k:
            return
        while ext:
            low = ext & -ext
            ext ^= low
            u = low.bit_length() - 1
            new = sq[u] & ~seen & above
            yield from grow(
                s_mask | low,
                cov | closed[u],
                size + 1,
                ext | new,
                seen | new | low,
                above,
            )

    for v in range(n):
        above = -1 << (v + 1)
        ext0 = sq[v] & above
        yield from grow(1 << v, closed[v], 1, ext0, ext0 | (1 << v), above)


def find_violator_mask(
    g: Graph,
    xhat_mask: int,
    k: int,
    deadline: Optional[float] = None,
) -> Optional[int]:
    """First Hall violator found by the DFS, or None if none exists."""
    found = None

    def on_violator(s_mask, viol):
        nonlocal found
        found = s_mask
        return False  # stop immediately

    _run_dfs(g, xhat_mask, k, budget=None, on_violator=on_violator, deadline=deadline)
    return found


def separate_multi(
    g: Graph,
    xhat,
    k: int,
    budget: int = DEFAULT_BUDGET,
    capacity: int = DEFAULT_CAPACITY,
    deadline: Optional[float] = None,
) -> CutBuffer:
    """Budgeted multi-cut sampling at an integer point.

    Explores square-connected subsets depth-first; every violator passes
    through the buffer-update rule.  The search stops once ``budget`` subsets
    have been visited and at least one cut is buffered, or when exhausted.
    Returns an empty buffer iff ``xhat`` is k-defensive.
    """
    if budget < 1 or capacity < 1 or k < 1:
        raise ValueError("budget, capacity, and k must be >= 1")
    xm = defender_mask(xhat)
    buf = CutBuffer(capacity)

    def on_violator(s_mask, viol):
        cut = cut_from_violator(g, VertexSet(s_mask))
        _buffer_insert(buf, cut, viol)
        return True

    def should_stop(count):
        return count >= budget and len(buf) > 0

    _run_dfs(g, xm, k, budget=should_stop, on_violator=on_violator, deadline=deadline)
    return buf


def _run_dfs(
    g: Graph,
    xhat_mask: int,
    k: int,
    budget: Optional[Callable[[int], bool]],
    on_violator: Callable[[int, int], bool],
    deadline: Optional[float],
) -> None:
    count = 0
    for s_mask, cov, size in iter_connected_subsets(g, k):
        count += 1
        if deadline is not None and count % _TIME_CHECK_EVERY == 0:
            if time.perf_counter() > deadline:
                raise SeparationTimeout
        viol = size - (cov & xhat_mask).bit_count()
        if viol > 0:
            if not on_violator(s_mask, viol):
                return
        if budget is not None and budget(count):
            return

"""Master problem and solve modes.

Minimizes the number of defenders subject to Hall feasibility cuts.  Two
modes share one branch-and-bound engine: branch-and-Benders-cut separates
new cuts lazily at integer nodes, while the classical iterative mode solves
the master to optimality between separation rounds.
"""

from __future__ import annotations

import heapq
import itertools
import math
import time
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from .graph import Graph, VertexSet, is_chordal, iter_bits
from .separation import (
    DEFAULT_BUDGET,
    DEFAULT_CAPACITY,
    FeasibilityCut,
    SeparationTimeout,
    separate_multi,
)
from .verify import DefenderSet
from . import heuristics

MODES = ("bbc_single", "bbmc", "iterative")
COVER_METHODS = ("dsatur", "peo", "auto")

_INT_TOL = 1e-6


@dataclass
class MasterModel:
    """Mutable solver state: cut pool, incumbent, and proven lower bound."""

    n: int
    cuts: list[FeasibilityCut] = field(default_factory=list)
    incumbent: Optional[tuple[DefenderSet, int]] = None
    lower_bound: int = 0
    warm_start: Optional[DefenderSet] = None
    lb0: Optional[int] = None
    ub0: Optional[int] = None


@dataclass(frozen=True)
class SolveConfig:
    k: int
    mode: str = "bbmc"
    use_initial_cuts: bool = False
    use_warm_start: bool = False
    cover_method: str = "auto"
    budget: int = DEFAULT_BUDGET
    capacity: int = DEFAULT_CAPACITY
    time_limit: float = 600.0
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.cover_method not in COVER_METHODS:
            raise ValueError(
                f"unknown cover method {self.cover_method!r}; expected one of {COVER_METHODS}"
            )
        if self.budget < 1 or self.capacity < 1:
            raise ValueError("budget and capacity must be >= 1")
        if self.time_limit <= 0:
            raise ValueError("time limit must be positive")

    @property
    def effective_budget(self) -> int:
        return 1 if self.mode == "bbc_single" else self.budget

    @property
    def effective_capacity(self) -> int:
        return 1 if self.mode == "bbc_single" else self.capacity


@dataclass(frozen=True)
class SolveReport:
    status: str  # optimal | feasible | infeasible_time_limit_no_incumbent
    best_value: Optional[int]
    lower_bound: int
    gap_percent: float
    wall_time: float
    cuts_added: int
    nodes_explored: int
    lb0: Optional[int]
    ub0: Optional[int]
    defenders: Optional[DefenderSet] = None


# ---------------------------------------------------------------------------
# bounding

def _greedy_disjoint_bound(cuts: list[FeasibilityCut], fix0: int, fix1: int) -> int:
    """Safe dual bound: sum the residual demands of coverage-disjoint cuts."""
    free_forbidden = fix0 | fix1
    bound = fix1.bit_count()
    used = 0
    residual = []
    for c in cuts:
        need = c.rhs - (c.coverage.mask & fix1).bit_count()
        if need > 0:
            residual.append((need, c.coverage.mask & ~free_forbidden))
    residual.sort(key=lambda t: -t[0])
    for need, cov in residual:
        if cov & used == 0:
            bound += need
            used |= cov
    return bound


def lp_bound_over_cuts(
    n: int, cuts: list[FeasibilityCut], fix0: int = 0, fix1: int = 0
) -> Optional[int]:
    """Integer lower bound on the covering LP, or None if infeasible.

    Solves min 1'x over the cuts with x in [0,1]^n and branching fixings;
    falls back to a combinatorial disjoint-cover bound if the LP solver
    does not converge.
    """
    free = ~(fix0 | fix1)
    for c in cuts:
        need = c.rhs - (c.coverage.mask & fix1).bit_count()
        if need > (c.coverage.mask & free).bit_count():
            return None
    active = [c for c in cuts if c.rhs > (c.coverage.mask & fix1).bit_count()]
    if not active:
        return fix1.bit_count()
    res = _solve_lp(n, active, fix0, fix1)
    if res is None:
        return _greedy_disjoint_bound(cuts, fix0, fix1)
    value, _ = res
    return math.ceil(value - _INT_TOL)


def lp_bound(model: MasterModel) -> int:
    """LP-relaxation lower bound over the model's current cut pool."""
    b = lp_bound_over_cuts(model.n, model.cuts)
    return 0 if b is None else b


def _solve_lp(
    n: int, cuts: list[FeasibilityCut], fix0: int, fix1: int
) -> Optional[tuple[float, np.ndarray]]:
    a = np.zeros((len(cuts), n))
    b = np.empty(len(cuts))
    for r, c in enumerate(cuts):
        for i in iter_bits(c.coverage.mask):
            a[r, i] = -1.0
        b[r] = -float(c.rhs)
    bounds = [
        (1.0, 1.0) if (fix1 >> i) & 1 else (0.0, 0.0) if (fix0 >> i) & 1 else (0.0, 1.0)
        for i in range(n)
    ]
    res = linprog(np.ones(n), A_ub=a, b_ub=b, bounds=bounds, method="highs")
    if not res.success:
        return None
    return float(res.fun), res.x


# ---------------------------------------------------------------------------
# branch and bound

class _TimeUp(Exception):
    pass


class _Search:
    """One branch-and-bound run over a (possibly growing) cut pool."""

    def __init__(self, g: Graph, cfg: SolveConfig, model: MasterModel, deadline: float,
                 separate: bool):
        self.g = g
        self.cfg = cfg
        self.model = model
        self.deadline = deadline
        self.separate = separate
        self.nodes = 0
        self.cuts_added = 0
        self.full = (1 << g.n) - 1

    def _check_time(self):
        if time.perf_counter() > self.deadline:
            raise _TimeUp

    def _evaluate(self, fix0: int, fix1: int):
        """('infeasible',) | ('integer', xhat, value) | ('frac', x, value)."""
        cuts = self.model.cuts
        free = self.full & ~(fix0 | fix1)
        for c in cuts:
            need = c.rhs - (c.coverage.mask & fix1).bit_count()
            if need > (c.coverage.mask & free).bit_count():
                return ("infeasible",)
        if all(c.satisfied_by(fix1) for c in cuts):
            return ("integer", fix1, fix1.bit_count())
        res = _solve_lp(self.g.n, cuts, fix0, fix1)
        if res is None:
            # LP did not converge; the node survives on the fallback bound
            return ("frac", None, float(_greedy_disjoint_bound(cuts, fix0, fix1)))
        value, x = res
        xhat = fix1
        integral = True
        for i in iter_bits(free):
            if x[i] > 1.0 - _INT_TOL:
                xhat |= 1 << i
            elif x[i] > _INT_TOL:
                integral = False
                break
        if integral:
            return ("integer", xhat, xhat.bit_count())
        return ("frac", x, value)

    def _branch_var(self, x: np.ndarray, fix0: int, fix1: int) -> int:
        free = self.full & ~(fix0 | fix1)
        freq = [0] * self.g.n
        for c in self.model.cuts:
            for i in iter_bits(c.coverage.mask & free):
                freq[i] += 1
        best, key = -1, None
        for i in iter_bits(free):
            if _INT_TOL < x[i] < 1.0 - _INT_TOL:
                cand = (abs(x[i] - 0.5), -freq[i], i)
                if key is None or cand < key:
                    key, best = cand, i
        return best

    def _fallback_branch_var(self, fix0: int, fix1: int) -> int:
        """Lowest free vertex covering an unsatisfied cut (LP-failure path)."""
        free = self.full & ~(fix0 | fix1)
        for c in self.model.cuts:
            if not c.satisfied_by(fix1):
                cand = c.coverage.mask & free
                if cand:
                    return (cand & -cand).bit_length() - 1
        return -1

    def _accept_integer(self, xhat: int) -> bool:
        """True iff xhat is feasible (and the incumbent was updated if better)."""
        if self.separate:
            buf = separate_multi(
                self.g,
                xhat,
                self.cfg.k,
                budget=self.cfg.effective_budget,
                capacity=self.cfg.effective_capacity,
                deadline=self.deadline,
            )
            if len(buf) > 0:
                known = {c.violator.mask for c in self.model.cuts}
                for cut in buf.cuts():
                    if cut.violator.mask not in known:
                        self.model.cuts.append(cut)
                        self.cuts_added += 1
                return False
        value = xhat.bit_count()
        if self.model.incumbent is None or value < self.model.incumbent[1]:
            self.model.incumbent = (DefenderSet(VertexSet(xhat)), value)
        return True

    def run(self) -> int:
        """Best-bound search with plunging; returns the final lower bound."""
        ub = self.model.incumbent[1] if self.model.incumbent else self.g.n + 1
        heap: list[tuple[int, int, int, int]] = []  # (bound, seq, fix0, fix1)
        seq = itertools.count()
        heapq.heappush(heap, (self.model.lower_bound, next(seq), 0, 0))
        current_bound = None
        try:
            while heap:
                bound, _, fix0, fix1 = heapq.heappop(heap)
                if bound >= ub:
                    break  # best-first: nothing left can improve
                current_bound = bound
                while True:  # plunge
                    self._check_time()
                    self.nodes += 1
                    verdict = self._evaluate(fix0, fix1)
                    if verdict[0] == "infeasible":
                        break
                    if verdict[0] == "integer":
                        _, xhat, value = verdict
                        if value >= ub:
                            break
                        if self._accept_integer(xhat):
                            ub = min(ub, value)
                            break
                        continue  # new cuts: re-solve this node
                    _, x, value = verdict
                    nbound = math.ceil(value - _INT_TOL)
                    current_bound = max(current_bound, min(nbound, ub))
                    if nbound >= ub:
                        break
                    if x is None:
                        i = self._fallback_branch_var(fix0, fix1)
                    else:
                        i = self._branch_var(x, fix0, fix1)
                    if i < 0:
                        break
                    bit = 1 << i
                    if x is None or x[i] >= 0.5:
                        heapq.heappush(heap, (nbound, next(seq), fix0 | bit, fix1))
                        fix1 |= bit
                    else:
                        heapq.heappush(heap, (nbound, next(seq), fix0, fix1 | bit))
                        fix0 |= bit
                current_bound = None
        except _TimeUp:
            open_bounds = [b for b, _, _, _ in heap]
            if current_bound is not None:
                open_bounds.append(current_bound)
            lb = min(open_bounds) if open_bounds else ub
            self.model.lower_bound = max(self.model.lower_bound, min(lb, ub))
            raise
        self.model.lower_bound = max(self.model.lower_bound, ub if self.model.incumbent else 0)
        return self.model.lower_bound


def _gap_percent(ub: Optional[int], lb: int) -> float:
    if ub is None:
        return 100.0
    if ub <= 0:
        return 0.0
    return max(0.0, 100.0 * (ub - lb) / ub)


def _report(model: MasterModel, status: str, start: float, search_nodes: int,
            cuts_added: int) -> SolveReport:
    ub = model.incumbent[1] if model.incumbent else None
    lb = model.lower_bound
    if status == "optimal":
        lb = ub
        gap = 0.0
    else:
        gap = _gap_percent(ub, lb)
    return SolveReport(
        status=status,
        best_value=ub,
        lower_bound=lb,
        gap_percent=gap,
        wall_time=time.perf_counter() - start,
        cuts_added=cuts_added,
        nodes_explored=search_nodes,
        lb0=model.lb0,
        ub0=model.ub0,
        defenders=model.incumbent[0] if model.incumbent else None,
    )


def apply_enhancements(model: MasterModel, g: Graph, cfg: SolveConfig) -> MasterModel:
    """Install initial cuts (lb0) and/or the warm-start incumbent (ub0)."""
    if cfg.use_initial_cuts:
        ics = heuristics.initial_cuts(g, cfg.k)
        known = {c.violator.mask for c in model.cuts}
        for cut in ics.cuts:
            if cut.violator.mask not in known:
                model.cuts.append(cut)
        model.lb0 = ics.lb0
        model.lower_bound = max(model.lower_bound, ics.lb0)
    if cfg.use_warm_start:
        method = cfg.cover_method
        if method == "auto":
            method = "peo" if is_chordal(g) else "dsatur"
        cover = (
            heuristics.clique_cover_peo(g)
            if method == "peo"
            else heuristics.clique_cover_dsatur(g)
        )
        d = heuristics.warm_start(g, cfg.k, cover)
        model.warm_start = d
        model.incumbent = (d, len(d))
        model.ub0 = len(d)
    return model


def solve_bbc(g: Graph, cfg: SolveConfig) -> SolveReport:
    """Branch-and-Benders-cut: lazy cut separation at integer nodes."""
    if not (1 <= cfg.k <= g.n):
        raise ValueError("require 1 <= k <= n")
    if cfg.mode == "iterative":
        return solve_iterative(g, cfg)
    start = time.perf_counter()
    deadline = start + cfg.time_limit
    model = apply_enhancements(MasterModel(n=g.n), g, cfg)
    search = _Search(g, cfg, model, deadline, separate=True)
    try:
        search.run()
    except (_TimeUp, SeparationTimeout):
        status = "feasible" if model.incumbent else "infeasible_time_limit_no_incumbent"
        return _report(model, status, start, search.nodes, search.cuts_added)
    return _report(model, "optimal", start, search.nodes, search.cuts_added)


def solve_iterative(g: Graph, cfg: SolveConfig) -> SolveReport:
    """Classical alternation: exact master solve, then one separation round."""
    if not (1 <= cfg.k <= g.n):
        raise ValueError("require 1 <= k <= n")
    start = time.perf_counter()
    deadline = start + cfg.time_limit
    model = apply_enhancements(MasterModel(n=g.n), g, cfg)
    total_nodes = 0
    total_cuts = 0
    while True:
        inner = MasterModel(n=g.n, cuts=model.cuts, lower_bound=model.lower_bound,
                            lb0=model.lb0, ub0=model.ub0)
        search = _Search(g, cfg, inner, deadline, separate=False)
        try:
            search.run()
        except _TimeUp:
            model.lower_bound = max(model.lower_bound, inner.lower_bound)
            status = "feasible" if model.incumbent else "infeasible_time_limit_no_incumbent"
            return _report(model, status, start, total_nodes + search.nodes, total_cuts)
        total_nodes += search.nodes
        assert inner.incumbent is not None  # V is always master-feasible
        xhat_set, value = inner.incumbent
        model.lower_bound = max(model.lower_bound, value)
        try:
            buf = separate_multi(
                g,
                xhat_set,
                cfg.k,
                budget=cfg.effective_budget,
                capacity=cfg.effective_capacity,
                deadline=deadline,
            )
        except SeparationTimeout:
            status = "feasible" if model.incumbent else "infeasible_time_limit_no_incumbent"
            return _report(model, status, start, total_nodes, total_cuts)
        if len(buf) == 0:
            if model.incumbent is None or value < model.incumbent[1]:
                model.incumbent = (xhat_set, value)
            return _report(model, "optimal", start, total_nodes, total_cuts)
        known = {c.violator.mask for c in model.cuts}
        for cut in buf.cuts():
            if cut.violator.mask not in known:
                model.cuts.append(cut)
                total_cuts += 1


def solve(g: Graph, cfg: SolveConfig) -> SolveReport:
    """Dispatch on cfg.mode."""
    if cfg.mode == "iterative":
        return solve_iterative(g, cfg)
    return solve_bbc(g, cfg)


def brute_force_optimum(g: Graph, k: int, n_cap: int = 16) -> int:
    """Minimum defender-set size by cardinality-ascending enumeration.

    Desk-scale oracle; refuses graphs above ``n_cap`` vertices.
    """
    if g.n > n_cap:
        raise ValueError(f"brute force refused: n={g.n} exceeds cap {n_cap}")
    if not (1 <= k <= g.n):
        raise ValueError("require 1 <= k <= n")
    from .separation import iter_connected_subsets

    attacks = [(s, cov, size) for s, cov, size in iter_connected_subsets(g, k)]
    for size in range(g.n + 1):
        for combo in itertools.combinations(range(g.n), size):
            d = 0
            for v in combo:
                d |= 1 << v
            if all((cov & d).bit_count() >= s_size for _, cov, s_size in attacks):
                return size
    return g.n

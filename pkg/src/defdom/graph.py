"""Simple undirected graphs: closed neighborhoods, graph square, generators, file I/O.

Vertices are dense 0-based integers.  Vertex sets are carried as bitmasks
(Python ints) wrapped in :class:`VertexSet`, which keeps a cardinality cache.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Iterator, Optional


class VertexSet:
    """Immutable set of vertex ids backed by a bitmask."""

    __slots__ = ("mask", "_count")

    def __init__(self, mask: int = 0):
        if mask < 0:
            raise ValueError("vertex-set mask must be non-negative")
        object.__setattr__(self, "mask", mask)
        object.__setattr__(self, "_count", mask.bit_count())

    def __setattr__(self, name, value):
        raise AttributeError("VertexSet is immutable")

    @classmethod
    def of(cls, vertices: Iterable[int]) -> "VertexSet":
        m = 0
        for v in vertices:
            if v < 0:
                raise ValueError(f"negative vertex id {v}")
            m |= 1 << v
        return cls(m)

    def vertices(self) -> tuple[int, ...]:
        return tuple(iter_bits(self.mask))

    def __len__(self) -> int:
        return self._count

    def __contains__(self, v: int) -> bool:
        return v >= 0 and (self.mask >> v) & 1 == 1

    def __iter__(self) -> Iterator[int]:
        return iter_bits(self.mask)

    def __eq__(self, other) -> bool:
        return isinstance(other, VertexSet) and self.mask == other.mask

    def __hash__(self) -> int:
        return hash(self.mask)

    def __or__(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.mask | other.mask)

    def __and__(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.mask & other.mask)

    def __sub__(self, other: "VertexSet") -> "VertexSet":
        return VertexSet(self.mask & ~other.mask)

    def issubset(self, other: "VertexSet") -> bool:
        return self.mask & ~other.mask == 0

    def __reduce__(self):
        return (VertexSet, (self.mask,))

    def __repr__(self) -> str:
        return f"VertexSet({{{', '.join(map(str, self.vertices()))}}})"


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the set bit positions of ``mask`` in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Graph:
    """Simple undirected graph with precomputed closed-neighborhood bitmasks.

    Immutable after construction; safe to share across threads.
    """

    __slots__ = ("n", "adj", "closed_masks", "meta", "_sq_masks")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]], meta: Optional[dict] = None):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        object.__setattr__(self, "n", n)
        nbrs = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if v in nbrs[u]:
                raise ValueError(f"duplicate edge ({u},{v})")
            nbrs[u].add(v)
            nbrs[v].add(u)
        object.__setattr__(self, "adj", tuple(tuple(sorted(s)) for s in nbrs))
        closed = []
        for v in range(n):
            m = 1 << v
            for u in nbrs[v]:
                m |= 1 << u
            closed.append(m)
        object.__setattr__(self, "closed_masks", tuple(closed))
        object.__setattr__(self, "meta", dict(meta) if meta else {})
        object.__setattr__(self, "_sq_masks", None)

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    @property
    def edge_count(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n):
            for v in self.adj[u]:
                if u < v:
                    yield (u, v)

    def closed(self, v: int) -> VertexSet:
        """Closed neighborhood N[v] = N(v) | {v}."""
        return VertexSet(self.closed_masks[v])

    def square_adj_masks(self) -> tuple[int, ...]:
        """Open adjacency masks of the graph square (distance 1 or 2), cached."""
        if self._sq_masks is None:
            masks = []
            for v in range(self.n):
                m = 0
                for u in iter_bits(self.closed_masks[v]):
                    m |= self.closed_masks[u]
                masks.append(m & ~(1 << v))
            object.__setattr__(self, "_sq_masks", tuple(masks))
        return self._sq_masks

    def __reduce__(self):
        return (Graph, (self.n, list(self.edges()), self.meta))

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.adj == other.adj

    def __hash__(self) -> int:
        return hash((self.n, self.adj))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.edge_count})"


def closed_nbhd_of_set(g: Graph, s: VertexSet) -> VertexSet:
    """N[S]: union of the closed neighborhoods of the members of ``s``."""
    m = 0
    for v in s:
        m |= g.closed_masks[v]
    return VertexSet(m)


def square(g: Graph) -> Graph:
    """Graph with an edge between every pair of vertices at distance 1 or 2."""
    sq = g.square_adj_masks()
    edges = []
    for u in range(g.n):
        rest = sq[u] >> (u + 1)
        for off in iter_bits(rest):
            edges.append((u, u + 1 + off))
    return Graph(g.n, edges, meta={"square_of": g.meta.get("family")})


# ---------------------------------------------------------------------------
# chordality

def mcs_order(g: Graph) -> list[int]:
    """Maximum-cardinality-search order, returned as a candidate PEO.

    For a chordal graph the returned order is a perfect elimination ordering.
    """
    n = g.n
    weight = [0] * n
    numbered = [False] * n
    out = []
    for _ in range(n):
        best, best_w = -1, -1
        for v in range(n):
            if not numbered[v] and weight[v] > best_w:
                best, best_w = v, weight[v]
        numbered[best] = True
        out.append(best)
        for u in g.adj[best]:
            if not numbered[u]:
                weight[u] += 1
    out.reverse()
    return out


def is_peo(g: Graph, order: list[int]) -> bool:
    """Check whether ``order`` is a perfect elimination ordering of ``g``."""
    if sorted(order) != list(range(g.n)):
        return False
    pos = [0] * g.n
    for i, v in enumerate(order):
        pos[v] = i
    later_mask = [0] * g.n
    for v in range(g.n):
        m = 0
        for u in g.adj[v]:
            if pos[u] > pos[v]:
                m |= 1 << u
        later_mask[v] = m
    for v in range(g.n):
        m = later_mask[v]
        if m:
            first = min(iter_bits(m), key=lambda u: pos[u])
            rest = m & ~(1 << first)
            if rest & ~g.closed_masks[first]:
                return False
    return True


def is_chordal(g: Graph) -> bool:
    return is_peo(g, mcs_order(g))


# ---------------------------------------------------------------------------
# generators

FAMILIES = ("erdos_renyi", "barabasi_albert", "chordal")


class SplitMix64:
    """Deterministic 64-bit splitmix generator; identical streams on all platforms."""

    MASK = (1 << 64) - 1

    def __init__(self, seed: int):
        self.state = seed & self.MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & self.MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & self.MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & self.MASK
        return z ^ (z >> 31)

    def random(self) -> float:
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def randrange(self, n: int) -> int:
        if n <= 0:
            raise ValueError("randrange bound must be positive")
        return self.next_u64() % n

    def sample(self, seq, k: int) -> list:
        pool = list(seq)
        if k > len(pool):
            raise ValueError("sample larger than population")
        for i in range(k):
            j = i + self.randrange(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]

    def shuffle(self, seq: list) -> None:
        for i in range(len(seq) - 1, 0, -1):
            j = self.randrange(i + 1)
            seq[i], seq[j] = seq[j], seq[i]


@dataclass(frozen=True)
class GenSpec:
    """Parameters for one generated instance."""

    family: str
    n: int
    density: float
    seed: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not (0.0 <= self.density <= 1.0):
            raise ValueError("density must lie in [0, 1]")
        if self.family == "barabasi_albert" and self.density >= 0.8:
            raise ValueError(
                "barabasi_albert rejects density >= 0.8: this density cannot be "
                "reached by standard preferential attachment without a seed clique "
                "holding most of the vertices"
            )


def generate(spec: GenSpec) -> Graph:
    if spec.family == "erdos_renyi":
        return gen_erdos_renyi(spec)
    if spec.family == "barabasi_albert":
        return gen_barabasi_albert(spec)
    return gen_chordal(spec)


def gen_erdos_renyi(spec: GenSpec) -> Graph:
    """G(n, p): each of the C(n,2) edges is kept independently with probability p."""
    if spec.family != "erdos_renyi":
        raise ValueError("spec.family must be erdos_renyi")
    rng = SplitMix64(spec.seed)
    n, p = spec.n, spec.density
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p:
                edges.append((u, v))
    meta = _gen_meta(spec, len(edges))
    return Graph(n, edges, meta=meta)


def ba_attachment_count(n: int, p: float) -> int:
    """Attachment count m whose final edge count best matches density p.

    With a seed clique on m+1 vertices the edge total is m(2n-m-1)/2; we pick
    the integer m minimizing the density error.
    """
    if n < 2:
        return 1
    total = n * (n - 1) / 2.0
    disc = (2 * n - 1) ** 2 - 8 * p * total
    root = ((2 * n - 1) - math.sqrt(max(disc, 0.0))) / 2.0
    best_m, best_err = 1, float("inf")
    for m in {max(1, math.floor(root)), max(1, math.ceil(root)), 1}:
        m = min(m, n - 1)
        achieved = m * (2 * n - m - 1) / 2.0 / total
        err = abs(achieved - p)
        if err < best_err:
            best_m, best_err = m, err
    return best_m


def gen_barabasi_albert(spec: GenSpec) -> Graph:
    """Preferential attachment seeded with a clique on m+1 vertices."""
    if spec.family != "barabasi_albert":
        raise ValueError("spec.family must be barabasi_albert")
    rng = SplitMix64(spec.seed)
    n = spec.n
    m = ba_attachment_count(n, spec.density)
    edges = []
    repeated = []  # one entry per edge endpoint: degree-proportional sampling
    seed_size = min(m + 1, n)
    for u in range(seed_size):
        for v in range(u + 1, seed_size):
            edges.append((u, v))
            repeated.append(u)
            repeated.append(v)
    for t in range(seed_size, n):
        chosen: set[int] = set()
        while len(chosen) < m:
            u = repeated[rng.randrange(len(repeated))]
            chosen.add(u)
        for u in sorted(chosen):
            edges.append((u, t))
            repeated.append(u)
            repeated.append(t)
    meta = _gen_meta(spec, len(edges))
    meta["m"] = m
    return Graph(n, edges, meta=meta)


def gen_chordal(spec: GenSpec) -> Graph:
    """Chordal graph grown along a random PEO, targeting the requested density.

    Each new vertex attaches to a subset of an existing base clique, so every
    back-neighborhood is a clique and the reverse insertion order is a PEO.
    The attachment size is steered toward the target edge count.
    """
    if spec.family != "chordal":
        raise ValueError("spec.family must be chordal")
    rng = SplitMix64(spec.seed)
    n = spec.n
    target_edges = round(spec.density * n * (n - 1) / 2)
    base: list[list[int]] = [[0]]
    raw_edges: list[tuple[int, int]] = []
    edges_so_far = 0
    for t in range(1, n):
        remaining = n - t
        want = round((target_edges - edges_so_far) / remaining) if remaining else 0
        q = max(0, min(want, t))
        eligible = [u for u in range(t) if len(base[u]) >= q]
        if eligible:
            u = eligible[rng.randrange(len(eligible))]
        else:
            u = max(range(t), key=lambda w: (len(base[w]), -w))
            q = len(base[u])
        attach = rng.sample(base[u], q)
        for w in attach:
            raw_edges.append((w, t))
        base.append(sorted(attach) + [t])
        edges_so_far += q
    label = list(range(n))
    rng.shuffle(label)
    edges = [(min(label[u], label[v]), max(label[u], label[v])) for u, v in raw_edges]
    peo = [label[v] for v in range(n - 1, -1, -1)]  # reverse insertion order
    meta = _gen_meta(spec, len(edges))
    meta["peo"] = peo
    return Graph(n, edges, meta=meta)


def _gen_meta(spec: GenSpec, m: int) -> dict:
    total = spec.n * (spec.n - 1) / 2
    return {
        "family": spec.family,
        "n": spec.n,
        "target_density": spec.density,
        "achieved_density": (m / total) if total else 0.0,
        "seed": spec.seed,
    }


# ---------------------------------------------------------------------------
# edge-list I/O

class EdgeListParseError(ValueError):
    """Raised for malformed edge-list text; message names the offending line."""


HeaderParser = Callable[[str], tuple[int, int]]


def _default_header(line: str) -> tuple[int, int]:
    parts = line.split()
    if len(parts) != 2:
        raise ValueError("expected 'n m'")
    return int(parts[0]), int(parts[1])


def read_edge_list(text: str, header_parser: HeaderParser = _default_header) -> Graph:
    """Parse the edge-list format: header "n m", then m lines "u v" with u < v.

    Blank lines and lines starting with '#' are ignored.  ``header_parser``
    adapts foreign headers (it receives the first significant line and must
    return (n, m)).
    """
    n = m = None
    edges: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            try:
                n, m = header_parser(line)
            except ValueError as exc:
                raise EdgeListParseError(f"bad header, line {lineno}: {exc}") from None
            if n < 0 or m < 0:
                raise EdgeListParseError(f"bad header, line {lineno}: negative count")
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListParseError(f"malformed edge line, line {lineno}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListParseError(f"malformed edge line, line {lineno}") from None
        if u >= n or v >= n or u < 0 or v < 0:
            raise EdgeListParseError(f"vertex index out of range, line {lineno}")
        if u == v:
            raise EdgeListParseError(f"self-loop, line {lineno}")
        if not (u < v):
            raise EdgeListParseError(f"edge must satisfy u < v, line {lineno}")
        if (u, v) in seen:
            raise EdgeListParseError(f"duplicate edge, line {lineno}")
        seen.add((u, v))
        edges.append((u, v))
    if n is None:
        raise EdgeListParseError("empty input: missing 'n m' header")
    if len(edges) != m:
        raise EdgeListParseError(f"header promised {m} edges, found {len(edges)}")
    return Graph(n, edges)


def write_edge_list(g: Graph) -> str:
    lines = [f"{g.n} {g.edge_count}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"

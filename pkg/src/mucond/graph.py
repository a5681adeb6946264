"""Immutable weighted graphs and the cut/volume/conductance primitives.

Vertices are the integers 0..n-1. Edges are undirected with strictly
positive weights; parallel entries are merged by summing weights and
self-loops are rejected. All derived quantities (degrees, total volume)
are fixed at construction time, so a Graph can be shared freely.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class GraphFormatError(ValueError):
    """Raised when an edge-list file cannot be parsed."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class VertexSet:
    """A subset of the vertices 0..n-1 of some graph.

    Stored as a frozenset for O(1) membership; helpers convert to the
    bit-mask form used by the enumeration kernels.
    """

    n: int
    members: frozenset[int]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("vertex count must be >= 1")
        for v in self.members:
            if not 0 <= v < self.n:
                raise ValueError(f"vertex {v} out of range 0..{self.n - 1}")

    @classmethod
    def of(cls, n: int, members: Iterable[int]) -> "VertexSet":
        return cls(n, frozenset(int(v) for v in members))

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "VertexSet":
        return cls(n, frozenset(v for v in range(n) if (mask >> v) & 1))

    def complement(self) -> "VertexSet":
        return VertexSet(self.n, frozenset(range(self.n)) - self.members)

    def sorted_members(self) -> list[int]:
        return sorted(self.members)

    def as_mask(self) -> int:
        mask = 0
        for v in self.members:
            mask |= 1 << v
        return mask

    def indicator(self) -> np.ndarray:
        """0/1 vertex function of the set."""
        x = np.zeros(self.n)
        x[self.sorted_members()] = 1.0
        return x

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, v: int) -> bool:
        return v in self.members


class Graph:
    """Undirected weighted graph, immutable after construction.

    Parameters
    ----------
    n : int
        Number of vertices; ids are 0..n-1.
    edge_list : sequence of (u, v, w) or (u, v)
        Undirected edges. A missing weight defaults to 1.0. Entries for
        the same unordered pair are merged by summing their weights.

    Raises
    ------
    ValueError
        On self-loops, non-positive weights, or out-of-range vertex ids.
    """

    __slots__ = ("n", "edge_u", "edge_v", "edge_w", "degrees", "total_volume")

    def __init__(self, n: int, edge_list: Sequence[tuple]):
        if n < 1:
            raise ValueError("vertex count must be >= 1")
        merged: dict[tuple[int, int], float] = {}
        for entry in edge_list:
            if len(entry) == 2:
                u, v = entry
                w = 1.0
            else:
                u, v, w = entry
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise ValueError(f"self-loop at vertex {u} is not allowed")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) has a vertex id outside 0..{n - 1}")
            if not w > 0.0:
                raise ValueError(f"edge ({u},{v}) has non-positive weight {w}")
            key = (u, v) if u < v else (v, u)
            merged[key] = merged.get(key, 0.0) + w

        pairs = sorted(merged)
        self.n = n
        self.edge_u = np.array([p[0] for p in pairs], dtype=np.int64)
        self.edge_v = np.array([p[1] for p in pairs], dtype=np.int64)
        self.edge_w = np.array([merged[p] for p in pairs], dtype=np.float64)

        deg = np.zeros(n, dtype=np.float64)
        for (u, v), w in ((p, merged[p]) for p in pairs):
            deg[u] += w
            deg[v] += w
        self.degrees = deg
        self.total_volume = float(sum(deg))

        for arr in (self.edge_u, self.edge_v, self.edge_w, self.degrees):
            arr.setflags(write=False)

    @property
    def m(self) -> int:
        return len(self.edge_w)

    @property
    def edges(self) -> list[tuple[int, int, float]]:
        return [
            (int(u), int(v), float(w))
            for u, v, w in zip(self.edge_u, self.edge_v, self.edge_w)
        ]

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.edge_u, other.edge_u)
            and np.array_equal(self.edge_v, other.edge_v)
            and np.array_equal(self.edge_w, other.edge_w)
        )

    def __hash__(self):
        return hash((self.n, self.edge_u.tobytes(), self.edge_w.tobytes()))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m}, volume={self.total_volume:g})"

    # -- set primitives ----------------------------------------------------

    def vertex_set(self, members: Iterable[int]) -> VertexSet:
        return VertexSet.of(self.n, members)

    def volume(self, subset: VertexSet | Iterable[int]) -> float:
        """Sum of weighted degrees over the subset."""
        members = self._member_array(subset)
        if members.size == 0:
            return 0.0
        return float(np.sum(self.degrees[members]))

    def cut_weight(self, subset: VertexSet | Iterable[int]) -> float:
        """Total weight of edges with exactly one endpoint in the subset."""
        inside = self._indicator_bool(subset)
        crossing = inside[self.edge_u] != inside[self.edge_v]
        return float(np.dot(self.edge_w, crossing.astype(np.float64)))

    def conductance(self, subset: VertexSet | Iterable[int]) -> float:
        """Cut weight divided by the smaller side's volume.

        Undefined for the empty set and the full vertex set, and for
        subsets whose smaller side has zero volume.
        """
        inside = self._indicator_bool(subset)
        k = int(inside.sum())
        if k == 0 or k == self.n:
            raise ValueError("conductance is undefined for the empty or full set")
        vol = float(np.sum(self.degrees[inside]))
        denom = min(vol, self.total_volume - vol)
        if denom <= 0.0:
            raise ValueError("conductance is undefined: smaller side has zero volume")
        crossing = inside[self.edge_u] != inside[self.edge_v]
        return float(np.dot(self.edge_w, crossing.astype(np.float64))) / denom

    def laplacian_quadratic(self, x) -> float:
        """Quadratic form sum_{uv in E} w(u,v) (x_u - x_v)^2.

        Zero exactly on constant vectors; for a 0/1 indicator it equals
        the cut weight of the indicated set.
        """
        values = np.asarray(getattr(x, "values", x), dtype=np.float64)
        if values.shape != (self.n,):
            raise ValueError(f"embedding has length {values.shape}, expected ({self.n},)")
        diff = values[self.edge_u] - values[self.edge_v]
        return float(np.dot(self.edge_w, diff * diff))

    def adjacency_csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(indptr, neighbors, weights) arrays for kernel-side traversal."""
        counts = np.zeros(self.n + 1, dtype=np.int64)
        for u, v in zip(self.edge_u, self.edge_v):
            counts[u + 1] += 1
            counts[v + 1] += 1
        indptr = np.cumsum(counts)
        nbrs = np.zeros(indptr[-1], dtype=np.int64)
        wts = np.zeros(indptr[-1], dtype=np.float64)
        fill = indptr[:-1].copy()
        for u, v, w in zip(self.edge_u, self.edge_v, self.edge_w):
            nbrs[fill[u]] = v
            wts[fill[u]] = w
            fill[u] += 1
            nbrs[fill[v]] = u
            wts[fill[v]] = w
            fill[v] += 1
        return indptr, nbrs, wts

    def is_connected(self) -> bool:
        if self.n == 1:
            return True
        indptr, nbrs, _ = self.adjacency_csr()
        seen = np.zeros(self.n, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            u = stack.pop()
            for k in range(indptr[u], indptr[u + 1]):
                v = int(nbrs[k])
                if not seen[v]:
                    seen[v] = True
                    stack.append(v)
        return bool(seen.all())

    def _member_array(self, subset) -> np.ndarray:
        if isinstance(subset, VertexSet):
            if subset.n != self.n:
                raise ValueError("vertex set belongs to a graph of different size")
            members = subset.sorted_members()
        else:
            members = sorted(int(v) for v in subset)
        arr = np.asarray(members, dtype=np.int64)
        if arr.size and (arr[0] < 0 or arr[-1] >= self.n):
            raise ValueError("subset contains out-of-range vertex ids")
        return arr

    def _indicator_bool(self, subset) -> np.ndarray:
        inside = np.zeros(self.n, dtype=bool)
        inside[self._member_array(subset)] = True
        return inside


def build_graph(n: int, edge_list: Sequence[tuple]) -> Graph:
    """Validating constructor; see Graph."""
    return Graph(n, edge_list)


# -- generators -------------------------------------------------------------

_GNP_RETRIES = 200


def generate(family: str, params: Sequence, seed: int = 0) -> Graph:
    """Build a unit-weight test graph from a named family.

    Families: path(k), cycle(k), complete(k), barbell(a, b),
    lollipop(k, t), gnp(n, p). Deterministic for a fixed seed; gnp
    redraws until connected, failing after a bounded number of retries.
    """
    params = list(params)
    if family == "path":
        (k,) = params
        k = int(k)
        if k < 2:
            raise ValueError("path needs k >= 2")
        return Graph(k, [(i, i + 1, 1.0) for i in range(k - 1)])
    if family == "cycle":
        (k,) = params
        k = int(k)
        if k < 3:
            raise ValueError("cycle needs k >= 3")
        return Graph(k, [(i, (i + 1) % k, 1.0) for i in range(k)])
    if family == "complete":
        (k,) = params
        k = int(k)
        if k < 2:
            raise ValueError("complete needs k >= 2")
        return Graph(k, [(i, j, 1.0) for i in range(k) for j in range(i + 1, k)])
    if family == "barbell":
        a, b = (int(p) for p in params)
        if a < 2 or b < 2:
            raise ValueError("barbell needs clique sizes >= 2")
        edges = [(i, j, 1.0) for i in range(a) for j in range(i + 1, a)]
        edges += [(a + i, a + j, 1.0) for i in range(b) for j in range(i + 1, b)]
        edges.append((a - 1, a, 1.0))  # bridge
        return Graph(a + b, edges)
    if family == "lollipop":
        k, t = (int(p) for p in params)
        if k < 2 or t < 1:
            raise ValueError("lollipop needs clique size >= 2 and tail length >= 1")
        edges = [(i, j, 1.0) for i in range(k) for j in range(i + 1, k)]
        prev = k - 1  # tail hangs off the last clique vertex
        for i in range(t):
            edges.append((prev, k + i, 1.0))
            prev = k + i
        return Graph(k + t, edges)
    if family == "gnp":
        nv, p = params
        nv, p = int(nv), float(p)
        if nv < 2:
            raise ValueError("gnp needs n >= 2")
        if not 0.0 < p <= 1.0:
            raise ValueError("gnp needs p in (0, 1]")
        rng = np.random.default_rng(seed)
        for _ in range(_GNP_RETRIES):
            edges = [
                (i, j, 1.0)
                for i in range(nv)
                for j in range(i + 1, nv)
                if rng.random() < p
            ]
            if not edges:
                continue
            g = Graph(nv, edges)
            if g.is_connected():
                return g
        raise RuntimeError(
            f"gnp({nv}, {p}) produced no connected graph in {_GNP_RETRIES} tries"
        )
    raise ValueError(f"unknown graph family {family!r}")


# -- edge-list text format ---------------------------------------------------
#
# One edge per line: `<u> <v> [<w>]`, whitespace separated, weight
# defaulting to 1.0. Lines starting with '#' are comments. Labels are
# arbitrary non-whitespace tokens, mapped to 0..n-1 in first-appearance
# order; the mapping is returned next to the graph.


def parse_edge_list(text: str) -> tuple[Graph, list[str]]:
    """Parse edge-list text into (Graph, labels).

    labels[i] is the original token of vertex i. Malformed lines, bad
    weights and self-loops are rejected with their line number.
    """
    label_to_id: dict[str, int] = {}
    labels: list[str] = []
    edges: list[tuple[int, int, float]] = []

    def vertex_id(token: str) -> int:
        if token not in label_to_id:
            label_to_id[token] = len(labels)
            labels.append(token)
        return label_to_id[token]

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        fields = line.split()
        if len(fields) not in (2, 3):
            raise GraphFormatError(
                f"expected '<u> <v> [<w>]', got {len(fields)} fields", lineno
            )
        if fields[0] == fields[1]:
            raise GraphFormatError(f"self-loop at {fields[0]!r}", lineno)
        if len(fields) == 3:
            try:
                w = float(fields[2])
            except ValueError:
                raise GraphFormatError(f"unparseable weight {fields[2]!r}", lineno) from None
            if not w > 0.0:
                raise GraphFormatError(f"non-positive weight {w}", lineno)
        else:
            w = 1.0
        edges.append((vertex_id(fields[0]), vertex_id(fields[1]), w))

    if not edges:
        raise GraphFormatError("no edges found")
    return Graph(len(labels), edges), labels


def serialize_edge_list(graph: Graph, labels: Sequence[str] | None = None) -> str:
    """Canonical edge-list text: sorted edges, one `u v w` line each."""
    if labels is None:
        labels = [str(i) for i in range(graph.n)]
    elif len(labels) != graph.n:
        raise ValueError("labels length must equal vertex count")
    lines = [
        f"{labels[u]} {labels[v]} {w!r}"
        for u, v, w in graph.edges
    ]
    return "\n".join(lines) + "\n"

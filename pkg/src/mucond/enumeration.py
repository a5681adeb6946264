"""Exact conductance and volume-constrained conductance by enumeration.

This module is the ground-truth oracle for the rest of the package: it
scans every {S, complement} pair with the Gray-code kernel and reports
the global minimizer. Practical up to n = 24 by default (seconds), with
a hard cap at n = 30.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .graph import Graph, VertexSet

DEFAULT_CAP = 24
HARD_CAP = 30

# Absolute slack on volume-window comparisons, relative to Vol(G).
# Absorbs floating-point degree sums; exact for integer weights.
WINDOW_SLACK = 1e-9


class SizeCapError(ValueError):
    """Raised when a graph is too large for exhaustive enumeration."""


def volume_window(mu: float, vol_total: float) -> tuple[float, float]:
    """Inclusive [lo, hi] volume bounds for the mu constraint, with slack."""
    slack = WINDOW_SLACK * vol_total
    return mu * vol_total - slack, (1.0 - mu) * vol_total + slack


def _check_mu(mu: float) -> float:
    mu = float(mu)
    if not 0.0 <= mu <= 0.5:
        raise ValueError(f"mu must lie in [0, 1/2], got {mu}")
    return mu


@dataclass(frozen=True)
class MuConductanceResult:
    """Outcome of a volume-constrained conductance minimization.

    When feasible, `value` equals conductance(witness) exactly and the
    witness volume lies in [mu*Vol, (1-mu)*Vol] (within window slack).
    An infeasible mu yields feasible=False and no value or witness.
    """

    mu: float
    feasible: bool
    value: float | None = None
    witness: VertexSet | None = None
    method: str = "exact"

    def witness_members(self) -> list[int]:
        return [] if self.witness is None else self.witness.sorted_members()


def exact_mu_conductance(graph: Graph, mu: float, cap: int = DEFAULT_CAP) -> MuConductanceResult:
    """Global minimum of conductance over subsets in the volume window.

    Ties are resolved to the witness of smallest cardinality, then the
    lexicographically smallest sorted member list, independent of how
    the scan is partitioned.
    """
    mu = _check_mu(mu)
    if cap > HARD_CAP:
        raise ValueError(f"cap {cap} exceeds the hard cap {HARD_CAP}")
    if graph.n > cap:
        raise SizeCapError(
            f"n={graph.n} exceeds the enumeration cap {cap}; "
            "use the sweep heuristic (sweep.constrained_sweep_cut) instead"
        )
    if graph.n > DEFAULT_CAP:
        warnings.warn(
            f"enumerating 2^{graph.n - 1} subsets; this may take minutes",
            RuntimeWarning,
            stacklevel=2,
        )
    if graph.n == 1:
        return MuConductanceResult(mu=mu, feasible=False)

    indptr, nbrs, wts = graph.adjacency_csr()
    lo, hi = volume_window(mu, graph.total_volume)
    found, _, mask, _ = _kernels.gray_scan(
        graph.n,
        indptr,
        nbrs,
        wts,
        graph.edge_u,
        graph.edge_v,
        graph.edge_w,
        graph.degrees,
        graph.total_volume,
        lo,
        hi,
        _kernels.OBJECTIVE_CONDUCTANCE,
    )
    if not found:
        return MuConductanceResult(mu=mu, feasible=False)
    witness = VertexSet.from_mask(graph.n, int(mask))
    return MuConductanceResult(
        mu=mu,
        feasible=True,
        value=graph.conductance(witness),
        witness=witness,
    )


def exact_conductance(graph: Graph, cap: int = DEFAULT_CAP) -> MuConductanceResult:
    """Unconstrained conductance minimum; 0 on disconnected graphs."""
    return exact_mu_conductance(graph, 0.0, cap=cap)


def mu_feasible(graph: Graph, mu: float) -> bool:
    """Whether any proper nonempty subset's volume lies in the window."""
    return find_volume_feasible_set(graph, mu) is not None


def find_volume_feasible_set(graph: Graph, mu: float) -> VertexSet | None:
    """A witness subset with volume in the window, or None.

    Exact: subset enumeration up to n = 30; beyond that, exhaustion over
    the (few) vertices heavier than the window width combined with
    greedy filling by the light ones, which decides feasibility exactly
    as long as at most 24 heavy vertices exist.
    """
    mu = _check_mu(mu)
    if graph.n < 2:
        return None
    lo, hi = volume_window(mu, graph.total_volume)

    deg = graph.degrees
    for v in range(graph.n):  # single-vertex fast path, settles mu ~ 0
        if lo <= deg[v] <= hi:
            return VertexSet.of(graph.n, [v])

    if graph.n <= HARD_CAP:
        mask = _kernels.volume_scan(graph.n, deg, graph.total_volume, lo, hi)
        if mask < 0:
            return None
        return VertexSet.from_mask(graph.n, int(mask))

    return _heavy_light_window_set(graph, mu, lo, hi)


def _heavy_light_window_set(graph: Graph, mu: float, lo: float, hi: float) -> VertexSet | None:
    # Any vertex lighter than the window width cannot jump the window, so
    # greedy filling with light vertices lands inside whenever the target
    # is reachable; only heavy vertices need exhaustion.
    vol_total = graph.total_volume
    width = (1.0 - 2.0 * mu) * vol_total
    deg = graph.degrees
    heavy = [v for v in range(graph.n) if deg[v] > width]
    light = sorted((v for v in range(graph.n) if deg[v] <= width), key=lambda v: (deg[v], v))
    if len(heavy) > 24:
        raise SizeCapError(
            f"mu-feasibility undecided: {len(heavy)} vertices exceed the "
            "volume-window width; exact subset-sum at this scale is unsupported"
        )
    light_total = float(sum(deg[v] for v in light))
    for bits in range(1 << len(heavy)):
        chosen = [heavy[i] for i in range(len(heavy)) if (bits >> i) & 1]
        s = float(sum(deg[v] for v in chosen))
        if s > hi:
            continue
        if s >= lo and 0 < len(chosen) < graph.n:
            return VertexSet.of(graph.n, chosen)
        if s + light_total >= lo:
            members = list(chosen)
            for v in light:
                if s >= lo:
                    break
                members.append(v)
                s += deg[v]
            if lo <= s <= hi and 0 < len(members) < graph.n:
                return VertexSet.of(graph.n, members)
    return None


def feasible_subset_stats(graph: Graph, mu: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(masks, volumes, cuts) of every window-feasible pair representative.

    Vectorized over all 2^(n-1) subsets that exclude vertex n-1, so each
    {S, complement} pair appears once; intended for seeding (n <= 16).
    """
    mu = _check_mu(mu)
    n = graph.n
    if n < 2 or n > 16:
        raise ValueError("feasible_subset_stats supports 2 <= n <= 16")
    masks = np.arange(1, 1 << (n - 1), dtype=np.int64)
    vols = np.zeros(masks.shape[0])
    for v in range(n - 1):
        vols += graph.degrees[v] * ((masks >> v) & 1)
    cuts = np.zeros(masks.shape[0])
    for u, v, w in zip(graph.edge_u, graph.edge_v, graph.edge_w):
        crossing = ((masks >> int(u)) ^ (masks >> int(v))) & 1
        cuts += w * crossing
    lo, hi = volume_window(mu, graph.total_volume)
    keep = (vols >= lo) & (vols <= hi) & (vols > 0.0) & (vols < graph.total_volume)
    return masks[keep], vols[keep], cuts[keep]

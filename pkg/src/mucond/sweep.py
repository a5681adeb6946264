"""Sweep-order analysis of vertex embeddings and sweep-cut rounding.

Vertices are ordered by non-increasing embedding value (ties by id) and
prefix sets S_j are scored incrementally. The profile also records the
three structural indices of that order: the last prefix at or below half
volume (h), the last prefix strictly below the mu volume threshold (u),
and the last strictly positive entry (z).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .enumeration import MuConductanceResult, _check_mu, volume_window
from .graph import Graph, VertexSet


@dataclass(frozen=True, eq=False)
class SweepProfile:
    """Prefix volumes, prefix cuts, and indices of one sweep order.

    Array entry [j-1] describes the prefix S_j of the first j vertices.
    prefix_cut has length n-1; the full set's cut is identically zero.
    p[j-1] is the squared positive part of the j-th ordered value, and
    delta its consecutive difference (both non-negative by ordering).
    """

    mu: float
    total_volume: float
    order: np.ndarray
    prefix_volume: np.ndarray
    prefix_cut: np.ndarray
    h: int
    u: int
    z: int
    p: np.ndarray
    delta: np.ndarray


def _embedding_values(graph: Graph, x) -> np.ndarray:
    values = np.asarray(getattr(x, "values", x), dtype=np.float64)
    if values.shape != (graph.n,):
        raise ValueError(f"embedding has shape {values.shape}, expected ({graph.n},)")
    return values


def sweep_profile(graph: Graph, x, mu: float) -> SweepProfile:
    """Build the sweep profile of an embedding for a given mu."""
    mu = _check_mu(mu)
    values = _embedding_values(graph, x)
    if not np.any(values != 0.0):
        raise ValueError("sweep order undefined for the all-zero embedding")
    n = graph.n
    order = np.argsort(-values, kind="stable")

    prefix_volume = np.cumsum(graph.degrees[order])

    # Edge (u, v) crosses the prefix S_j exactly for rank(u) < j <= rank(v)
    # (ranks sorted), so accumulating +w/-w at the rank boundaries and
    # prefix-summing yields every cut incrementally.
    rank = np.empty(n, dtype=np.int64)
    rank[order] = np.arange(n)
    delta_cut = np.zeros(n + 1)
    ru = rank[graph.edge_u]
    rv = rank[graph.edge_v]
    first = np.minimum(ru, rv)
    second = np.maximum(ru, rv)
    np.add.at(delta_cut, first + 1, graph.edge_w)
    np.add.at(delta_cut, second + 1, -graph.edge_w)
    prefix_cut = np.cumsum(delta_cut[1:])[: n - 1]

    half = graph.total_volume / 2.0
    h = int(np.searchsorted(prefix_volume, half, side="right"))
    u = int(np.searchsorted(prefix_volume, mu * graph.total_volume, side="left"))
    z = int(np.count_nonzero(values > 0.0))

    gplus = np.maximum(values[order], 0.0)
    p = gplus * gplus
    delta = p[:-1] - p[1:]

    for arr in (order, prefix_volume, prefix_cut, p, delta):
        arr.setflags(write=False)
    return SweepProfile(
        mu=mu,
        total_volume=graph.total_volume,
        order=order,
        prefix_volume=prefix_volume,
        prefix_cut=prefix_cut,
        h=h,
        u=u,
        z=z,
        p=p,
        delta=delta,
    )


def verify_index_relations(
    profile: SweepProfile, feasible: bool, tol: float = 1e-8
) -> tuple[bool, dict]:
    """Check the structural relations between the indices u, h, z.

    Always checks u <= h. When the embedding passed the feasibility
    check for mu > 0, additionally checks that the volume of S_z lies in
    the mu window (within tol * Vol slack) and that u < z. The volume
    clause needs only feasibility, not optimality, so it is asserted for
    every feasible embedding rather than just program optimizers.
    """
    details: dict[str, object] = {"u_le_h": profile.u <= profile.h}
    if feasible and profile.mu > 0.0:
        slack = tol * profile.total_volume
        if profile.z >= 1:
            vol_z = float(profile.prefix_volume[profile.z - 1])
            in_window = (
                profile.mu * profile.total_volume - slack
                <= vol_z
                <= (1.0 - profile.mu) * profile.total_volume + slack
            )
        else:
            in_window = False
        details["z_volume_in_window"] = in_window
        details["u_lt_z"] = profile.u < profile.z
    ok = all(bool(v) for v in details.values())
    return ok, details


def constrained_sweep_cut(graph: Graph, x, mu: float) -> MuConductanceResult:
    """Best window-feasible sweep prefix of x, scanning both x and -x.

    An upper-bound heuristic: its value can never undercut the exact
    volume-constrained minimum, because every candidate is itself a
    window-feasible set. Infeasible when no prefix qualifies.
    """
    mu = _check_mu(mu)
    values = _embedding_values(graph, x)
    vol_total = graph.total_volume
    lo, hi = volume_window(mu, vol_total)

    best_phi = np.inf
    finalists: list[tuple[int, np.ndarray]] = []  # (prefix length, order)
    for oriented in (values, -values):
        profile = sweep_profile(graph, oriented, mu)
        vols = profile.prefix_volume[: graph.n - 1]
        denoms = np.minimum(vols, vol_total - vols)
        ok = (vols >= lo) & (vols <= hi) & (denoms > 0.0)
        if not np.any(ok):
            continue
        phis = np.where(ok, profile.prefix_cut / np.where(ok, denoms, 1.0), np.inf)
        local_best = float(phis.min())
        if local_best < best_phi:
            best_phi = local_best
            finalists = []
        if local_best == best_phi:
            for j in np.flatnonzero(phis == best_phi):
                finalists.append((int(j) + 1, profile.order))

    if not finalists:
        return MuConductanceResult(mu=mu, feasible=False, method="sweep")

    best_members: tuple[int, ...] | None = None
    for length, order in finalists:
        members = tuple(sorted(int(v) for v in order[:length]))
        if best_members is None or (len(members), members) < (len(best_members), best_members):
            best_members = members
    witness = VertexSet.of(graph.n, best_members)
    return MuConductanceResult(
        mu=mu,
        feasible=True,
        value=graph.conductance(witness),
        witness=witness,
        method="sweep",
    )

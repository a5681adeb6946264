"""Spectral machinery: lambda_2, set embeddings, and the box-constrained
minimization of the Laplacian quadratic over delocalized embeddings.

The box program has no known direct solver, so solve_lambda_mu returns a
certified feasible upper bound: it seeds with two-valued set embeddings
(exhaustively for small graphs), refines by projected descent that never
accepts an infeasible or worse point, and reports the best value seen.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .enumeration import (
    SizeCapError,
    _check_mu,
    feasible_subset_stats,
    find_volume_feasible_set,
    volume_window,
)
from .graph import Graph, VertexSet
from .sweep import sweep_profile


class MuInfeasibleError(ValueError):
    """No subset volume satisfies the requested mu window."""


@dataclass(frozen=True)
class Embedding:
    """A real value per vertex, tied to the graph it lives on."""

    values: np.ndarray
    graph: Graph

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.shape != (self.graph.n,):
            raise ValueError(
                f"embedding has shape {values.shape}, expected ({self.graph.n},)"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def __neg__(self) -> "Embedding":
        return Embedding(-self.values, self.graph)


@dataclass(frozen=True)
class FeasibilityBox:
    """Per-entry magnitude bounds of the delocalization constraint.

    lo * hi = 1 / Vol(G) whenever 0 < mu <= 1/2; mu = 0 leaves the box
    vacuous (lo = 0, hi = inf).
    """

    mu: float
    lo: float
    hi: float
    tol: float = 1e-8

    @classmethod
    def for_graph(cls, graph: Graph, mu: float, tol: float = 1e-8) -> "FeasibilityBox":
        mu = _check_mu(mu)
        if mu == 0.0:
            return cls(mu=0.0, lo=0.0, hi=math.inf, tol=tol)
        vol = graph.total_volume
        lo = math.sqrt(mu / ((1.0 - mu) * vol))
        hi = math.sqrt((1.0 - mu) / (mu * vol))
        return cls(mu=mu, lo=lo, hi=hi, tol=tol)


@dataclass
class SolverConfig:
    """Knobs for solve_lambda_mu; identical configs give identical runs."""

    max_starts: int = 8
    max_iterations: int = 100
    tol: float = 1e-10
    seed: int = 0
    effort: str = "fast"  # or "exhaustive-signs" (n <= 12)


@dataclass
class SolverResult:
    """Best feasible embedding found and its objective value.

    The value never exceeds the smallest seed objective, so whenever the
    optimal window set is among the seeds the value is at most twice the
    constrained conductance.
    """

    best: Embedding
    value: float
    seed_values: list[float]
    iterations: int
    converged: bool
    seed_mode: str


def _values_of(graph: Graph, x) -> np.ndarray:
    values = np.asarray(getattr(x, "values", x), dtype=np.float64)
    if values.shape != (graph.n,):
        raise ValueError(f"embedding has shape {values.shape}, expected ({graph.n},)")
    return values


def rayleigh(graph: Graph, x) -> float:
    """Laplacian quadratic over the degree-weighted squared norm."""
    values = _values_of(graph, x)
    den = float(values @ (graph.degrees * values))
    if den <= 0.0:
        raise ValueError("Rayleigh quotient undefined: degree-weighted norm is zero")
    return graph.laplacian_quadratic(values) / den


def lambda2(graph: Graph) -> tuple[float, Embedding]:
    """Second-smallest eigenvalue of the normalized Laplacian.

    Returns the eigenvalue and an embedding x with x'd = 0, x'Dx = 1 and
    Rayleigh quotient equal to the eigenvalue; zero exactly when the
    graph is disconnected. Dense symmetric eigendecomposition, so this
    is deterministic and accurate at desk scale.
    """
    deg = graph.degrees
    if np.any(deg <= 0.0):
        raise ValueError("normalized Laplacian undefined with an isolated vertex")
    n = graph.n
    inv_sqrt = 1.0 / np.sqrt(deg)
    norm_lap = np.eye(n)
    for u, v, w in zip(graph.edge_u, graph.edge_v, graph.edge_w):
        s = w * inv_sqrt[u] * inv_sqrt[v]
        norm_lap[u, v] -= s
        norm_lap[v, u] -= s
    evals, evecs = np.linalg.eigh(norm_lap)
    lam = float(evals[1])
    if abs(lam) < 1e-12:
        lam = 0.0

    x = evecs[:, 1] * inv_sqrt
    x = x - float(x @ deg) / graph.total_volume
    x = x / math.sqrt(float(x @ (deg * x)))
    for xi in x:
        if abs(xi) > 1e-12:
            if xi < 0.0:
                x = -x
            break
    return lam, Embedding(x, graph)


def set_embedding(graph: Graph, subset) -> Embedding:
    """Two-valued embedding of a set, positive inside and negative outside.

    Scaled so that x'd = 0 and x'Dx = 1; its Laplacian quadratic equals
    cut(S) * Vol(G) / (Vol(S) * Vol(complement)), at most twice the
    conductance of S. For a window-feasible S the entries land inside
    the mu box automatically.
    """
    if not isinstance(subset, VertexSet):
        subset = VertexSet.of(graph.n, subset)
    k = len(subset)
    if k == 0 or k == graph.n:
        raise ValueError("set embedding undefined for the empty or full set")
    vol_s = graph.volume(subset)
    vol_c = graph.total_volume - vol_s
    if vol_s <= 0.0 or vol_c <= 0.0:
        raise ValueError("set embedding undefined when either side has zero volume")
    a = math.sqrt(vol_c / (vol_s * graph.total_volume))
    b = math.sqrt(vol_s / (vol_c * graph.total_volume))
    x = np.full(graph.n, -b)
    x[subset.sorted_members()] = a
    return Embedding(x, graph)


def check_feasible(
    graph: Graph, x, mu: float, tol: float = 1e-8
) -> tuple[bool, list[tuple[str, float]]]:
    """Diagnostic constraint check; returns (ok, violations).

    Violations are (name, normalized magnitude) pairs: degree
    orthogonality scaled by sqrt(Vol), the unit D-norm residual, and
    per-entry box violations relative to the upper bound.
    """
    mu = _check_mu(mu)
    values = _values_of(graph, x)
    box = FeasibilityBox.for_graph(graph, mu, tol)
    deg = graph.degrees
    violations: list[tuple[str, float]] = []

    r_orth = abs(float(values @ deg)) / math.sqrt(graph.total_volume)
    if r_orth > tol:
        violations.append(("orthogonality", r_orth))
    r_norm = abs(float(values @ (deg * values)) - 1.0)
    if r_norm > tol:
        violations.append(("norm", r_norm))
    if box.lo > 0.0:
        mag = np.abs(values)
        for i in np.flatnonzero(mag < box.lo - tol * box.hi):
            violations.append((f"box_lower:{int(i)}", float(box.lo - mag[i]) / box.hi))
        for i in np.flatnonzero(mag > box.hi + tol * box.hi):
            violations.append((f"box_upper:{int(i)}", float(mag[i] - box.hi) / box.hi))
    return not violations, violations


def decompose_pos_neg(x):
    """Split into (positive part, negative part): x = plus - minus.

    Entrywise, plus and minus have disjoint support, so the squared
    magnitude identity x_i^2 = plus_i^2 + minus_i^2 is exact.
    """
    if isinstance(x, Embedding):
        plus = np.maximum(x.values, 0.0)
        minus = np.maximum(-x.values, 0.0)
        return Embedding(plus, x.graph), Embedding(minus, x.graph)
    values = np.asarray(x, dtype=np.float64)
    return np.maximum(values, 0.0), np.maximum(-values, 0.0)


# -- feasible-region projection ----------------------------------------------


def _project(
    x0: np.ndarray,
    deg: np.ndarray,
    vol_total: float,
    lo: float,
    hi: float,
    signs: np.ndarray | None = None,
    rounds: int = 200,
    tol: float = 1e-10,
) -> tuple[np.ndarray, bool]:
    """Alternating projection onto {x'd=0, x'Dx=1, lo<=|x_i|<=hi}.

    Magnitudes are clamped preserving signs (or a pinned sign pattern),
    the degree component is deflated, and the D-norm rescaled, until all
    residuals drop below tol. Returns (point, converged).
    """
    x = np.array(x0, dtype=np.float64)
    sq_vol = math.sqrt(vol_total)
    boxed = lo > 0.0
    for _ in range(rounds):
        eff = signs if signs is not None else np.where(x < 0.0, -1.0, 1.0)
        if boxed:
            x = eff * np.clip(np.abs(x), lo, hi)
        elif signs is not None:
            x = eff * np.abs(x)
        x = x - float(x @ deg) / vol_total
        q = float(x @ (deg * x))
        if not q > 0.0:
            return x, False
        x = x / math.sqrt(q)

        r_orth = abs(float(x @ deg)) / sq_vol
        r_norm = abs(float(x @ (deg * x)) - 1.0)
        if boxed:
            eff = signs if signs is not None else np.where(x < 0.0, -1.0, 1.0)
            mag = x * eff  # negative entries mean a violated sign pin
            r_box = max(0.0, lo - float(mag.min()), float(mag.max()) - hi) / hi
        else:
            r_box = 0.0
        if r_orth <= tol and r_norm <= tol and r_box <= tol:
            return x, True
    return x, False


def _random_window_set(graph: Graph, mu: float, rng: np.random.Generator) -> VertexSet | None:
    """Random subset whose volume lands in the mu window, or None."""
    lo, hi = volume_window(mu, graph.total_volume)
    deg = graph.degrees
    n = graph.n
    for _ in range(64):
        if lo <= 0.0:
            bits = rng.random(n) < 0.5
            k = int(bits.sum())
            if 0 < k < n:
                members = np.flatnonzero(bits)
                vol = float(deg[members].sum())
                if 0.0 < vol < graph.total_volume:
                    return VertexSet.of(n, members)
            continue
        perm = rng.permutation(n)
        total = 0.0
        members: list[int] = []
        for v in perm:
            if total >= lo:
                break
            members.append(int(v))
            total += deg[v]
        if members and len(members) < n and lo <= total <= hi:
            return VertexSet.of(n, members)
    return None


def random_feasible(graph: Graph, mu: float, seed: int) -> Embedding:
    """Deterministic sample from the feasible region of the box program.

    Perturbs the embedding of a random window set and projects back;
    fails explicitly if the sampler cannot converge (retry with another
    seed in that case).
    """
    mu = _check_mu(mu)
    if np.any(graph.degrees <= 0.0):
        raise ValueError("feasible sampling needs strictly positive degrees")
    witness = find_volume_feasible_set(graph, mu)
    if witness is None:
        raise MuInfeasibleError(f"no subset volume lies in the mu={mu} window")
    box = FeasibilityBox.for_graph(graph, mu)
    rng = np.random.default_rng(seed)
    scale0 = 1.0 / math.sqrt(graph.total_volume)
    for attempt in range(80):
        base = _random_window_set(graph, mu, rng) or witness
        psi = set_embedding(graph, base).values
        noise = 0.9 * (0.8 ** (attempt // 10))
        x0 = psi + noise * scale0 * rng.standard_normal(graph.n)
        x, ok = _project(x0, graph.degrees, graph.total_volume, box.lo, box.hi)
        if ok and check_feasible(graph, x, mu)[0]:
            return Embedding(x, graph)
    raise RuntimeError(f"feasible-point sampler failed to converge (seed {seed})")


# -- the upper-bound solver ---------------------------------------------------


def _dense_laplacian(graph: Graph) -> np.ndarray:
    lap = np.zeros((graph.n, graph.n))
    np.add.at(lap, (graph.edge_u, graph.edge_u), graph.edge_w)
    np.add.at(lap, (graph.edge_v, graph.edge_v), graph.edge_w)
    np.add.at(lap, (graph.edge_u, graph.edge_v), -graph.edge_w)
    np.add.at(lap, (graph.edge_v, graph.edge_u), -graph.edge_w)
    return lap


def _refine(graph, lap, x0, box, cfg, signs=None):
    """Projected descent from x0; never accepts infeasible or worse points.

    Steps along the tangent-projected negative gradient with exact line
    search of the quadratic, halving on failure. Returns None when even
    the starting point cannot be projected.
    """
    deg = graph.degrees
    vol = graph.total_volume
    x, ok = _project(x0, deg, vol, box.lo, box.hi, signs=signs, tol=cfg.tol)
    if not ok:
        return None
    f = graph.laplacian_quadratic(x)
    iterations = 0
    converged = False
    for _ in range(cfg.max_iterations):
        iterations += 1
        grad = 2.0 * (lap @ x)
        p = -grad
        p = p - float(p @ deg) / vol
        p = p - float(p @ (deg * x)) * x
        p_norm = math.sqrt(max(float(p @ (deg * p)), 0.0))
        if p_norm <= 1e-12 * (1.0 + abs(f)):
            converged = True
            break
        lap_p = lap @ p
        plp = float(p @ lap_p)
        xlp = float(x @ lap_p)
        t = -xlp / plp if (plp > 0.0 and xlp < 0.0) else 1.0 / p_norm
        accepted = False
        for _ in range(25):
            y, ok = _project(x + t * p, deg, vol, box.lo, box.hi, signs=signs, tol=cfg.tol)
            if ok:
                fy = graph.laplacian_quadratic(y)
                if fy < f - 1e-14 * (1.0 + abs(f)):
                    x, f = y, fy
                    accepted = True
                    break
            t *= 0.5
        if not accepted:
            converged = True
            break
    return x, f, iterations, converged


def _solve_balanced(graph: Graph, extra_seeds) -> SolverResult:
    # mu = 1/2 collapses the box to |x_i| = 1/sqrt(Vol); only sign
    # patterns with balanced signed degree sums are feasible, and those
    # are exactly the embeddings of volume-balanced sets.
    if graph.n > 24:
        raise SizeCapError(
            "mu = 1/2 requires exact balanced-sign enumeration, supported for n <= 24"
        )
    lo, hi = volume_window(0.5, graph.total_volume)
    indptr, nbrs, wts = graph.adjacency_csr()
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
        _kernels.OBJECTIVE_EMBEDDING,
    )
    if not found:
        raise MuInfeasibleError("mu = 1/2: no volume-balanced sign pattern exists")
    best = set_embedding(graph, VertexSet.from_mask(graph.n, int(mask)))
    value = graph.laplacian_quadratic(best.values)
    seed_values = [value]
    best_x = best.values
    for seed in extra_seeds:
        xv = _values_of(graph, seed)
        if not check_feasible(graph, xv, 0.5)[0]:
            continue
        fv = graph.laplacian_quadratic(xv)
        seed_values.append(fv)
        if fv < value:
            value, best_x = fv, xv
    return SolverResult(
        best=Embedding(best_x, graph),
        value=value,
        seed_values=seed_values,
        iterations=0,
        converged=True,
        seed_mode="balanced-sign-enumeration",
    )


def solve_lambda_mu(
    graph: Graph,
    mu: float,
    config: SolverConfig | None = None,
    extra_seeds=(),
) -> SolverResult:
    """Certified feasible upper bound on the box program's optimum.

    Seeding: for n <= 16 the embedding of every window-feasible set, one
    per {S, complement} pair; for larger graphs, sweep-cut roundings of
    the lambda_2 eigenvector plus random window sets. Additional warm
    starts (e.g. solutions for a larger mu, which stay feasible as the
    box widens) can be passed via extra_seeds. Deterministic for a fixed
    config; at mu = 0 the program degenerates and lambda_2 is returned.
    """
    cfg = config if config is not None else SolverConfig()
    if cfg.effort not in ("fast", "exhaustive-signs"):
        raise ValueError(f"unknown effort mode {cfg.effort!r}")
    mu = _check_mu(mu)
    if np.any(graph.degrees <= 0.0):
        raise ValueError("solver needs strictly positive degrees")
    vol = graph.total_volume

    if mu == 0.0:
        lam, emb = lambda2(graph)
        seed_values = [lam]
        best_x, value = emb.values, lam
        for seed in extra_seeds:
            xv = _values_of(graph, seed)
            fv = graph.laplacian_quadratic(xv)
            seed_values.append(fv)
            if fv < value:
                value, best_x = fv, xv
        return SolverResult(
            best=Embedding(best_x, graph),
            value=value,
            seed_values=seed_values,
            iterations=0,
            converged=True,
            seed_mode="lambda2",
        )

    if mu == 0.5:
        return _solve_balanced(graph, extra_seeds)

    witness = find_volume_feasible_set(graph, mu)
    if witness is None:
        raise MuInfeasibleError(f"no subset volume lies in the mu={mu} window")
    box = FeasibilityBox.for_graph(graph, mu, tol=1e-8)

    # Seed pool: (objective value, insertion index, lazily built start).
    seed_values: list[float] = []
    makers: list = []
    if graph.n <= 16:
        seed_mode = "exhaustive-psi"
        masks, vols, cuts = feasible_subset_stats(graph, mu)
        obj = cuts * vol / (vols * (vol - vols))
        seed_values.extend(float(v) for v in obj)
        makers.extend(int(m) for m in masks)
    else:
        seed_mode = "sweep+random"
        candidate_sets: list[VertexSet] = [witness]
        _, fiedler = lambda2(graph)
        lo_w, hi_w = volume_window(mu, vol)
        for oriented in (fiedler.values, -fiedler.values):
            profile = sweep_profile(graph, oriented, mu)
            pv = profile.prefix_volume[: graph.n - 1]
            ok = (pv >= lo_w) & (pv <= hi_w) & (pv > 0.0) & (pv < vol)
            obj = np.where(ok, profile.prefix_cut * vol / (pv * (vol - pv)), np.inf)
            for j in np.argsort(obj, kind="stable")[:4]:
                if np.isfinite(obj[j]):
                    candidate_sets.append(
                        VertexSet.of(graph.n, profile.order[: int(j) + 1])
                    )
        rng = np.random.default_rng(cfg.seed)
        for _ in range(max(8, cfg.max_starts)):
            random_set = _random_window_set(graph, mu, rng)
            if random_set is not None:
                candidate_sets.append(random_set)
        seen: set[frozenset] = set()
        for cand in candidate_sets:
            if cand.members in seen:
                continue
            seen.add(cand.members)
            psi = set_embedding(graph, cand)
            seed_values.append(graph.laplacian_quadratic(psi.values))
            makers.append(cand)

    def materialize(maker) -> np.ndarray:
        if isinstance(maker, int):
            return set_embedding(graph, VertexSet.from_mask(graph.n, maker)).values
        if isinstance(maker, VertexSet):
            return set_embedding(graph, maker).values
        return np.array(maker, dtype=np.float64)

    for seed in extra_seeds:
        xv = _values_of(graph, seed)
        seed_values.append(graph.laplacian_quadratic(xv))
        makers.append(xv)

    order = sorted(range(len(seed_values)), key=lambda i: (seed_values[i], i))
    value = seed_values[order[0]]
    best_x = materialize(makers[order[0]])

    lap = _dense_laplacian(graph)
    total_iterations = 0
    converged = True
    for i in order[: cfg.max_starts]:
        outcome = _refine(graph, lap, materialize(makers[i]), box, cfg)
        if outcome is None:
            converged = False
            continue
        x, f, iterations, conv = outcome
        total_iterations += iterations
        converged = converged and conv
        if f < value:
            value, best_x = f, x

    if cfg.effort == "exhaustive-signs":
        if graph.n > 12:
            raise ValueError("exhaustive-signs effort supports n <= 12")
        seed_mode += "+exhaustive-signs"
        mid = 1.0 / math.sqrt(vol)
        for bits in range(1 << (graph.n - 1)):
            signs = np.ones(graph.n)
            for v in range(graph.n - 1):
                if (bits >> v) & 1:
                    signs[v] = -1.0
            outcome = _refine(graph, lap, signs * mid, box, cfg, signs=signs)
            if outcome is None:
                continue
            x, f, iterations, conv = outcome
            total_iterations += iterations
            if f < value:
                value, best_x = f, x

    return SolverResult(
        best=Embedding(best_x, graph),
        value=value,
        seed_values=seed_values,
        iterations=total_iterations,
        converged=converged,
        seed_mode=seed_mode,
    )

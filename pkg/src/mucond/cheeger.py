"""Two-sided bound evaluation between the volume-constrained conductance
and the box-constrained spectral value, plus the algebraic inequality
checkers the bound's derivation rests on.

The sandwich verified here is

    2 * phi_mu  >=  lambda_mu  >=  lower_bound(phi0, phi_mu, mu)

where lambda_mu is only ever observed through a certified feasible upper
bound, so the lower comparison checks consistency rather than tightness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .enumeration import (
    DEFAULT_CAP,
    MuConductanceResult,
    _check_mu,
    exact_conductance,
    exact_mu_conductance,
    mu_feasible,
)
from .graph import Graph
from .spectral import (
    MuInfeasibleError,
    SolverConfig,
    SolverResult,
    lambda2,
    random_feasible,
    set_embedding,
    solve_lambda_mu,
)
from .sweep import constrained_sweep_cut


def theorem_lower_bound(phi0: float, phi_mu: float, mu: float) -> float:
    """Closed-form lower bound implied by phi0, phi_mu and mu.

    Evaluates, exactly as stated,

        1/2 * max{ min{ (mu/(1-mu) * phi_mu)^2,
                        ((mu^2 phi_mu + (1-2mu) phi0) / (1-mu-mu^2))^2 },
                   phi0^2 }

    which degenerates to the classical phi0^2 / 2 at mu = 0.
    """
    return _lower_bound_branches(phi0, phi_mu, mu)[0]


def _lower_bound_branches(phi0: float, phi_mu: float, mu: float) -> tuple[float, str]:
    mu = _check_mu(mu)
    phi0, phi_mu = float(phi0), float(phi_mu)
    if phi0 < 0.0:
        raise ValueError("phi0 must be non-negative")
    if phi0 > phi_mu * (1.0 + 1e-12) + 1e-15:
        raise ValueError(
            f"phi0={phi0} exceeds phi_mu={phi_mu}; constrained minima cannot"
            " fall below the unconstrained one"
        )
    ratio_branch = (mu / (1.0 - mu) * phi_mu) ** 2
    mixed_branch = (
        (mu * mu * phi_mu + (1.0 - 2.0 * mu) * phi0) / (1.0 - mu - mu * mu)
    ) ** 2
    inner = min(ratio_branch, mixed_branch)
    if phi0 * phi0 >= inner:
        return 0.5 * phi0 * phi0, "phi0"
    if ratio_branch <= mixed_branch:
        return 0.5 * ratio_branch, "ratio"
    return 0.5 * mixed_branch, "mixed"


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    margin: float


@dataclass
class CheegerReport:
    """Everything computed while verifying the sandwich on one graph.

    certified is True when the conductance values are exact enumeration
    results; with the sweep heuristic the checks are indicative only.
    """

    n: int
    m: int
    volume: float
    mu: float
    feasible: bool
    certified: bool
    phi0: MuConductanceResult | None = None
    phi_mu: MuConductanceResult | None = None
    lambda2_value: float | None = None
    lambda_mu_upper: float | None = None
    solver: SolverResult | None = None
    bound_lower: float | None = None
    bound_upper: float | None = None
    active_branch: str | None = None
    checks: list[CheckResult] = None

    def __post_init__(self):
        if self.checks is None:
            self.checks = []

    def all_passed(self) -> bool:
        return self.feasible and all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "m": self.m,
            "volume": self.volume,
            "mu": self.mu,
            "feasible": self.feasible,
            "certified": self.certified,
        }
        if self.phi0 is not None:
            out["phi0"] = {
                "value": self.phi0.value,
                "witness": self.phi0.witness_members(),
                "method": self.phi0.method,
            }
        if self.phi_mu is not None:
            out["phi_mu"] = {
                "value": self.phi_mu.value,
                "witness": self.phi_mu.witness_members(),
                "method": self.phi_mu.method,
            }
        if self.lambda2_value is not None:
            out["lambda2"] = self.lambda2_value
        if self.lambda_mu_upper is not None:
            out["lambda_mu_upper"] = self.lambda_mu_upper
        if self.solver is not None:
            out["solver"] = {
                "seed_mode": self.solver.seed_mode,
                "seed_count": len(self.solver.seed_values),
                "iterations": self.solver.iterations,
                "converged": self.solver.converged,
            }
        if self.bound_lower is not None:
            out["bound_lower"] = self.bound_lower
            out["bound_upper"] = self.bound_upper
            out["active_branch"] = self.active_branch
        out["checks"] = {
            c.name: {"passed": c.passed, "margin": c.margin} for c in self.checks
        }
        out["all_passed"] = self.all_passed()
        return out


def verify_sandwich(
    graph: Graph,
    mu: float,
    tol: float = 1e-7,
    cap: int = DEFAULT_CAP,
    config: SolverConfig | None = None,
) -> CheegerReport:
    """Compute both sides of the sandwich and check them against each other.

    With n within the enumeration cap the conductance values are exact
    and the upper comparison is certified (the optimal window set seeds
    the solver). Infeasible mu yields a report with feasible=False.
    """
    mu = _check_mu(mu)
    base = dict(n=graph.n, m=graph.m, volume=graph.total_volume, mu=mu)
    if not mu_feasible(graph, mu):
        return CheegerReport(feasible=False, certified=False, **base)

    certified = graph.n <= cap
    if certified:
        phi0 = exact_conductance(graph, cap=cap)
        phi_mu = exact_mu_conductance(graph, mu, cap=cap)
    else:
        _, fiedler = lambda2(graph)
        phi0 = constrained_sweep_cut(graph, fiedler, 0.0)
        phi_mu = constrained_sweep_cut(graph, fiedler, mu)
        if not (phi0.feasible and phi_mu.feasible):
            return CheegerReport(feasible=True, certified=False, **base)

    lam2, _ = lambda2(graph)
    extra = [set_embedding(graph, phi_mu.witness)] if certified else []
    solver = solve_lambda_mu(graph, mu, config=config, extra_seeds=extra)

    bound_lower, branch = _lower_bound_branches(phi0.value, phi_mu.value, mu)
    bound_upper = 2.0 * phi_mu.value

    checks = [
        CheckResult("phi0_le_phi_mu", phi_mu.value - phi0.value >= -1e-12,
                    phi_mu.value - phi0.value),
        CheckResult("lower_le_solver_upper", solver.value - bound_lower >= -tol,
                    solver.value - bound_lower),
        CheckResult("solver_upper_le_twice_phi_mu", bound_upper - solver.value >= -tol,
                    bound_upper - solver.value),
    ]
    if certified:
        up = 2.0 * phi0.value - lam2
        low = lam2 - 0.5 * phi0.value * phi0.value
        checks.append(CheckResult("classical_upper", up >= -1e-9, up))
        checks.append(CheckResult("classical_lower", low >= -1e-9, low))

    return CheegerReport(
        feasible=True,
        certified=certified,
        phi0=phi0,
        phi_mu=phi_mu,
        lambda2_value=lam2,
        lambda_mu_upper=solver.value,
        solver=solver,
        bound_lower=bound_lower,
        bound_upper=bound_upper,
        active_branch=branch,
        checks=checks,
        **base,
    )


def classical_cheeger_check(
    graph: Graph, tol: float = 1e-9, cap: int = DEFAULT_CAP
) -> tuple[bool, dict]:
    """Verify 2*phi >= lambda_2 >= phi^2 / 2 with numeric margins."""
    if not graph.is_connected():
        raise ValueError("classical check expects a connected graph")
    phi = exact_conductance(graph, cap=cap).value
    lam, _ = lambda2(graph)
    upper_margin = 2.0 * phi - lam
    lower_margin = lam - 0.5 * phi * phi
    margins = {
        "phi": phi,
        "lambda2": lam,
        "upper_margin": upper_margin,
        "lower_margin": lower_margin,
    }
    return upper_margin >= -tol and lower_margin >= -tol, margins


def feasible_point_bound_check(
    graph: Graph,
    mu: float,
    samples: int,
    seed: int,
    tol: float = 1e-9,
) -> tuple[bool, float]:
    """Every sampled feasible embedding's quadratic dominates the bound.

    Draws `samples` deterministic feasible points and returns whether
    all of them satisfy x'Lx >= lower_bound - tol, plus the worst margin
    observed. Any feasible objective dominates the optimum, which the
    closed-form expression bounds below, so failures indicate a bug.
    """
    mu = _check_mu(mu)
    phi0 = exact_conductance(graph)
    phi_mu = exact_mu_conductance(graph, mu)
    if not phi_mu.feasible:
        raise MuInfeasibleError(f"mu={mu} admits no window set")
    bound = theorem_lower_bound(phi0.value, phi_mu.value, mu)
    worst = math.inf
    for k in range(samples):
        x = random_feasible(graph, mu, seed + k)
        worst = min(worst, graph.laplacian_quadratic(x.values) - bound)
    return worst >= -tol, worst


# -- algebraic inequality checkers -------------------------------------------
#
# Each checker validates its preconditions (raising on violations, which
# are caller errors rather than inequality failures) and then tests the
# inequality itself with a small relative epsilon to absorb rounding.


def _as_float_array(seq, name: str) -> np.ndarray:
    arr = np.asarray(seq, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    return arr


def lemma1_check(a, b, tol: float = 1e-12) -> bool:
    """max_i a_i/b_i >= (sum a)/(sum b) >= min_i a_i/b_i."""
    a = _as_float_array(a, "a")
    b = _as_float_array(b, "b")
    if a.size == 0 or a.size != b.size:
        raise ValueError("a and b must be nonempty and of equal length")
    if np.any(a < 0.0):
        raise ValueError("a must be non-negative")
    if np.any(b <= 0.0):
        raise ValueError("b must be strictly positive")
    ratios = a / b
    pooled = float(a.sum() / b.sum())
    eps = tol * (1.0 + abs(pooled))
    return float(ratios.max()) >= pooled - eps and pooled >= float(ratios.min()) - eps


def lemma2_check(A, B, a, b, c, d, x, tol: float = 1e-12) -> bool:
    """Both monotone fraction chains for a bounded sequence x in [b, a].

    Chain one compares A / (B + sum c_i x_i) against the endpoints where
    every x_i sits at b or at a; chain two does the same with d-weighted
    subtractions in the numerator and requires A - a*sum(d) >= 0. Empty
    sequences are vacuously true.
    """
    A, B, a, b = float(A), float(B), float(a), float(b)
    c = _as_float_array(c, "c")
    d = _as_float_array(d, "d")
    x = _as_float_array(x, "x")
    if not (c.size == d.size == x.size):
        raise ValueError("c, d, x must have equal length")
    if A < 0.0 or B < 0.0:
        raise ValueError("A and B must be non-negative")
    if not a >= b >= 0.0:
        raise ValueError("bounds must satisfy a >= b >= 0")
    if np.any(c < 0.0) or np.any(d < 0.0):
        raise ValueError("c and d must be non-negative")
    if c.size == 0:
        return True
    pad = 1e-12 * (1.0 + a)
    if np.any(x < b - pad) or np.any(x > a + pad):
        raise ValueError("x entries must lie in [b, a]")

    sum_c, sum_d = float(c.sum()), float(d.sum())
    sum_cx, sum_dx = float(c @ x), float(d @ x)
    if A - a * sum_d < -1e-12 * (1.0 + A):
        raise ValueError("second chain requires A - a*sum(d) >= 0")

    den_b, den_x, den_a = B + b * sum_c, B + sum_cx, B + a * sum_c
    if min(den_b, den_x, den_a) <= 0.0:
        raise ValueError("denominators must be positive")

    hi1, mid1, lo1 = A / den_b, A / den_x, A / den_a
    hi2 = (A - b * sum_d) / den_b
    mid2 = (A - sum_dx) / den_x
    lo2 = (A - a * sum_d) / den_a
    eps = tol * (1.0 + max(abs(hi1), abs(lo1), abs(hi2), abs(lo2)))
    return (
        hi1 >= mid1 - eps
        and mid1 >= lo1 - eps
        and hi2 >= mid2 - eps
        and mid2 >= lo2 - eps
    )


def lemma3_check(X, Y, a, b, A, B, C, D, tol: float = 1e-12) -> bool:
    """(AX+BY)/(CX+DY) >= min over the ratio endpoints a and b."""
    X, Y, a, b = float(X), float(Y), float(a), float(b)
    A, B, C, D = float(A), float(B), float(C), float(D)
    if min(X, a, A, B, C, D) < 0.0 or Y <= 0.0:
        raise ValueError("inputs must be non-negative with Y > 0")
    ratio = X / Y
    pad = 1e-12 * (1.0 + b)
    if not (b + pad >= ratio >= a - pad):
        raise ValueError("ratio X/Y must lie in [a, b]")
    lhs_den = C * X + D * Y
    if lhs_den <= 0.0:
        raise ValueError("CX + DY must be positive")

    def endpoint(t: float) -> float:
        den = C * t + D
        if den <= 0.0:
            return math.inf
        return (A * t + B) / den

    lhs = (A * X + B * Y) / lhs_den
    rhs = min(endpoint(b), endpoint(a))
    eps = tol * (1.0 + abs(lhs) + (0.0 if math.isinf(rhs) else abs(rhs)))
    return lhs >= rhs - eps


def fact1_check(
    graph: Graph,
    mu_grid,
    config: SolverConfig | None = None,
    tol: float = 1e-9,
) -> tuple[bool, list[float]]:
    """Upper bounds are non-decreasing along an ascending mu grid.

    Solves from the largest mu downward, warm-starting every solve with
    all solutions found for larger mu (feasible there, hence feasible in
    the wider box too), which forces the computed sequence to be
    monotone whenever the solver honors its never-worsen contract. When
    the grid contains 0, that value must match lambda_2 within 1e-6.
    """
    grid = [_check_mu(m) for m in mu_grid]
    if sorted(grid) != grid:
        raise ValueError("mu grid must be sorted ascending")
    for m in grid:
        if not mu_feasible(graph, m):
            raise MuInfeasibleError(f"mu={m} admits no window set")

    carried = []
    values_desc: list[float] = []
    for m in reversed(grid):
        result = solve_lambda_mu(graph, m, config=config, extra_seeds=carried)
        carried = carried + [result.best]
        values_desc.append(result.value)
    values = list(reversed(values_desc))

    ok = all(values[i] <= values[i + 1] + tol for i in range(len(values) - 1))
    if grid and grid[0] == 0.0:
        lam, _ = lambda2(graph)
        ok = ok and abs(values[0] - lam) <= 1e-6
    return ok, values

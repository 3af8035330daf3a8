"""Orthonormality-constrained steepest ascent for the relaxed objective.

The relaxed problem maximizes F(Z) = tr((ZᵀAZ)²) over n×k matrices with
orthonormal columns.  Ascent stays feasible by moving along Cayley-transform
curves of a skew-symmetric direction built from the gradient, with an
Armijo backtracking search choosing the step size.  All heavy inverses are
reduced to 2k×2k solves via the Sherman–Morrison–Woodbury identity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ParameterError
from .graph import Graph

__all__ = [
    "RelaxedSolution",
    "OcsaConfig",
    "AscentTrace",
    "SkewDirection",
    "CayleyStepError",
    "trace_objective_relaxed",
    "trace_objective_split",
    "gradient",
    "skew_direction",
    "cayley_step",
    "line_search",
    "random_orthonormal_init",
    "orthonormality_defect",
    "ocsa",
]

# A relaxed solution is a plain n×k float array with orthonormal columns
# (‖ZᵀZ − I‖_max ≤ 1e-8); feasibility is checked where contracts demand it,
# not on every objective evaluation, so finite-difference probes of the
# objective at perturbed (infeasible) points remain legal.
RelaxedSolution = np.ndarray

FEASIBILITY_TOL = 1e-8
_STATIONARY_REL = 1e-8


class CayleyStepError(RuntimeError):
    """The 2k×2k curve system was numerically singular for this step size."""


@dataclass(frozen=True)
class OcsaConfig:
    """Ascent-loop knobs: iteration budget, step seed, and stop tolerance."""

    max_iterations: int = 100
    initial_step: float = 1e-3
    relative_tolerance: float = 1e-3
    contraction: float = 0.5
    sufficient_increase: float = 1e-4
    max_backtracks: int = 30

    def __post_init__(self):
        if self.max_iterations < 0:
            raise ParameterError("max_iterations must be >= 0")
        if not self.initial_step > 0:
            raise ParameterError("initial_step must be positive")
        if self.relative_tolerance < 0:
            raise ParameterError("relative_tolerance must be >= 0")
        if not 0 < self.contraction < 1:
            raise ParameterError("contraction must lie in (0, 1)")
        if self.sufficient_increase < 0 or self.max_backtracks < 0:
            raise ParameterError("sufficient_increase and max_backtracks must be >= 0")


@dataclass(frozen=True)
class AscentTrace:
    """Objective history of one ascent run.

    ``objectives[0]`` is the starting value; entry t is the objective after
    the t-th accepted step, whose size is ``step_sizes[t-1]``.  ``reason``
    is one of "tolerance", "max-iter", "no-ascent-step".
    """

    objectives: np.ndarray
    step_sizes: np.ndarray
    reason: str

    @property
    def iterations(self) -> int:
        return len(self.objectives) - 1


@dataclass(frozen=True)
class SkewDirection:
    """Skew operator W = left·rightᵀ − right·leftᵀ kept in factored form.

    Products W·x cost O(nk) instead of O(n²); ``dense()`` materializes the
    full matrix for small-scale checks.
    """

    left: np.ndarray
    right: np.ndarray

    def apply(self, x: np.ndarray) -> np.ndarray:
        return self.left @ (self.right.T @ x) - self.right @ (self.left.T @ x)

    def dense(self) -> np.ndarray:
        return self.left @ self.right.T - self.right @ self.left.T


class LineSearchResult(NamedTuple):
    tau: float
    solution: np.ndarray
    objective: float


def trace_objective_relaxed(graph: Graph, Z: np.ndarray) -> float:
    """F(Z) = tr((ZᵀAZ)²), the squared Frobenius norm of ZᵀAZ.

    Defined for any n×k real matrix; column-orthonormal inputs are what the
    optimization contracts assume.
    """
    Z = np.asarray(Z, dtype=np.float64)
    M = Z.T @ graph.adjacency_matmat(Z)
    return float(np.sum(M * M))


def trace_objective_split(graph: Graph, Z: np.ndarray) -> tuple[float, float]:
    """Diagonal/off-diagonal split of F(Z).

    Returns (t1, t2): t1 sums the squared diagonal of ZᵀAZ (per-column
    self terms), t2 the squared off-diagonal cross terms; t1 + t2 = F(Z).
    """
    Z = np.asarray(Z, dtype=np.float64)
    M = Z.T @ graph.adjacency_matmat(Z)
    diag = np.diag(M)
    t1 = float(np.sum(diag * diag))
    return t1, float(np.sum(M * M) - np.sum(diag * diag))


def gradient(graph: Graph, Z: np.ndarray) -> np.ndarray:
    """Euclidean gradient of F: G = 4·A·Z·(ZᵀAZ)."""
    Z = np.asarray(Z, dtype=np.float64)
    AZ = graph.adjacency_matmat(Z)
    return 4.0 * (AZ @ (Z.T @ AZ))


def skew_direction(Z: np.ndarray, G: np.ndarray) -> SkewDirection:
    """Feasible ascent direction W = Z·Gᵀ − G·Zᵀ in factored form."""
    Z = np.asarray(Z, dtype=np.float64)
    G = np.asarray(G, dtype=np.float64)
    if Z.shape != G.shape:
        raise ValueError(f"shape mismatch: Z {Z.shape} vs G {G.shape}")
    return SkewDirection(left=Z, right=G)


def cayley_step(Z: np.ndarray, W: SkewDirection, tau: float) -> np.ndarray:
    """One point on the curve Z(τ) = (I + τ/2·W)⁻¹ (I − τ/2·W) Z.

    With W = B·Cᵀ for B = [U V], C = [V −U], the Woodbury identity
    collapses the n×n inverse to Z(τ) = Z − τ·B·(I + τ/2·CᵀB)⁻¹·CᵀZ,
    an O(nk² + k³) computation.  The transform is orthogonal for skew W,
    so column orthonormality is preserved to rounding.

    Raises
    ------
    CayleyStepError
        When the 2k×2k system is singular or overflows (τ pathologically
        large); callers shrink τ and retry.
    """
    Z = np.asarray(Z, dtype=np.float64)
    B = np.hstack([W.left, W.right])
    C = np.hstack([W.right, -W.left])
    two_k = B.shape[1]
    S = np.eye(two_k) + (tau / 2.0) * (C.T @ B)
    try:
        coeff = np.linalg.solve(S, C.T @ Z)
    except np.linalg.LinAlgError as exc:
        raise CayleyStepError(f"singular curve system at tau={tau}") from exc
    out = Z - tau * (B @ coeff)
    if not np.all(np.isfinite(out)):
        raise CayleyStepError(f"non-finite curve point at tau={tau}")
    return out


def line_search(graph: Graph, Z: np.ndarray, W: SkewDirection, tau0: float,
                contraction: float = 0.5, sufficient_increase: float = 1e-4,
                max_backtracks: int = 30, *, objective: float | None = None,
                grad: np.ndarray | None = None) -> LineSearchResult | None:
    """Armijo backtracking along the Cayley curve of W.

    Tries τ₀, τ₀ρ, τ₀ρ², … and accepts the first (largest) step with
    F(Z(τ)) ≥ F(Z) + c·τ·g₀, where g₀ = ⟨G, −W·Z⟩ is the analytic curve
    derivative at τ = 0.  Returns None when the direction offers no ascent:
    g₀ ≤ 0, the direction is stationary relative to the gradient scale
    (‖W·Z‖ ≤ 1e-8·‖G‖), or every backtrack level fails the test.
    """
    Z = np.asarray(Z, dtype=np.float64)
    F0 = trace_objective_relaxed(graph, Z) if objective is None else objective
    G = gradient(graph, Z) if grad is None else grad

    direction = -W.apply(Z)
    if np.linalg.norm(direction) <= _STATIONARY_REL * np.linalg.norm(G):
        return None
    g0 = float(np.vdot(G, direction))
    if g0 <= 0:
        return None

    tau = tau0
    for _ in range(max_backtracks + 1):
        try:
            candidate = cayley_step(Z, W, tau)
        except CayleyStepError:
            tau *= contraction
            continue
        value = trace_objective_relaxed(graph, candidate)
        if value >= F0 + sufficient_increase * tau * g0:
            return LineSearchResult(tau=tau, solution=candidate, objective=value)
        tau *= contraction
    return None


def random_orthonormal_init(n: int, k: int, seed: int | None) -> np.ndarray:
    """Orthonormal factor of a seeded Gaussian n×k matrix.

    The QR sign ambiguity is fixed (positive R diagonal) so a seed pins
    the result bit-for-bit.
    """
    from .rng import make_generator

    if k > n:
        raise ParameterError(f"k={k} exceeds n={n}")
    if k < 1:
        raise ParameterError("k must be >= 1")
    raw = make_generator(seed).standard_normal((n, k))
    Q, R = np.linalg.qr(raw)
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Q * signs


def orthonormality_defect(Z: np.ndarray) -> float:
    """‖ZᵀZ − I‖_max, the feasibility defect of a candidate solution."""
    Z = np.asarray(Z, dtype=np.float64)
    gram = Z.T @ Z
    return float(np.abs(gram - np.eye(Z.shape[1])).max())


def ocsa(graph: Graph, Z0: np.ndarray,
         config: OcsaConfig | None = None) -> tuple[np.ndarray, AscentTrace]:
    """Curvilinear steepest ascent on the orthonormal-columns manifold.

    Repeats gradient → skew direction → backtracking search → Cayley step
    until the relative objective gain drops to ``relative_tolerance``, the
    search finds no ascent step, or ``max_iterations`` is exhausted.  The
    objective history is non-decreasing and every iterate stays feasible.

    Raises
    ------
    ParameterError
        If Z0 has the wrong row count or is not column-orthonormal.
    """
    config = config or OcsaConfig()
    Z = np.array(Z0, dtype=np.float64)
    if Z.ndim != 2 or Z.shape[0] != graph.node_count:
        raise ParameterError(
            f"Z0 shape {Z.shape} incompatible with n={graph.node_count}")
    if Z.shape[1] > graph.node_count:
        raise ParameterError("more columns than nodes")
    if orthonormality_defect(Z) > FEASIBILITY_TOL:
        raise ParameterError("Z0 is not column-orthonormal")

    value = trace_objective_relaxed(graph, Z)
    objectives = [value]
    steps: list[float] = []
    reason = "max-iter"
    for _ in range(config.max_iterations):
        G = gradient(graph, Z)
        W = skew_direction(Z, G)
        found = line_search(graph, Z, W, config.initial_step, config.contraction,
                            config.sufficient_increase, config.max_backtracks,
                            objective=value, grad=G)
        if found is None:
            reason = "no-ascent-step"
            break
        Z = found.solution
        objectives.append(found.objective)
        steps.append(found.tau)
        if value > 0:
            relative_gain = (found.objective - value) / value
        else:
            relative_gain = math.inf if found.objective > 0 else 0.0
        value = found.objective
        if relative_gain <= config.relative_tolerance:
            reason = "tolerance"
            break

    trace = AscentTrace(objectives=np.asarray(objectives, dtype=np.float64),
                        step_sizes=np.asarray(steps, dtype=np.float64),
                        reason=reason)
    return Z, trace

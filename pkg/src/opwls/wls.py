r"""Weighted least-squares assembly, solve, and stability diagnostics.

The discrete problem is block separable: with scalar features ``phi`` of
dimension ``N_eff`` and ``d_out`` output modes, the full ``N x N`` normal
equations decompose into ``d_out`` identical ``N_eff x N_eff`` blocks, so a
single ``M x N_eff`` matrix least-squares problem

    min_C || A C - B ||_F,
    A[i, :] = sqrt(w_i / M) phi(f^i),   B[i, :] = sqrt(w_i / M) ghat^i,

yields the whole coefficient matrix at cost O(N_eff^3 + N_eff^2 d_out).  The
solve runs on an orthogonal factorization of the design, never on the Gram
matrix; the Gram ``G = A^T A`` is formed only for diagnostics, where
``||G - I||_2 <= delta`` certifies ``cond(G) <= (1 + delta)/(1 - delta)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "StabilityBudget",
    "WlsSystem",
    "GramSummary",
    "OperatorEstimate",
    "c_delta",
    "min_samples",
    "assemble",
    "gram_diagnostics",
    "solve",
    "truncate_output",
    "condition_estimator",
    "predict",
    "gamma_diagnostic",
]

# Singular values below this times the largest are treated as zero.
RANK_RTOL = 1e-12


def c_delta(delta: float) -> float:
    """Stability constant ``1 / (delta + (1 - delta) log(1 - delta))``.

    Diverges as ``delta -> 0`` and is about 6.518 at ``delta = 1/2``.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    return 1.0 / (delta + (1.0 - delta) * math.log1p(-delta))


def min_samples(n_eff: int, delta: float, epsilon: float) -> int:
    """Smallest sample count certifying ``||G - I|| <= delta`` w.p. ``1 - epsilon``.

    ``ceil(c_delta * N_eff * log(2 N_eff / epsilon))`` under optimal sampling;
    depends on the scalar factor dimension only, never on ``d_out``.
    """
    if n_eff < 1:
        raise ValueError(f"n_eff must be >= 1, got {n_eff}")
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    return int(math.ceil(c_delta(delta) * n_eff * math.log(2.0 * n_eff / epsilon)))


def gamma_diagnostic(n_total: int, delta: float, epsilon: float) -> float:
    """Derived constant ``gamma(N) = 1 / (c_delta log(2N / epsilon))``.

    Logged next to measured errors; the expected-error bound it enters
    involves unobservable terms and is never asserted.
    """
    return 1.0 / (c_delta(delta) * math.log(2.0 * n_total / epsilon))


@dataclass(frozen=True)
class StabilityBudget:
    """Sampling budget for a target spectral gap and failure probability."""

    delta: float
    epsilon: float
    c_delta: float
    m_min: int

    @classmethod
    def for_dimension(
        cls, n_eff: int, delta: float = 0.5, epsilon: float = 0.5
    ) -> "StabilityBudget":
        return cls(
            delta=delta,
            epsilon=epsilon,
            c_delta=c_delta(delta),
            m_min=min_samples(n_eff, delta, epsilon),
        )


@dataclass(frozen=True)
class WlsSystem:
    """Scaled design and target rows of one weighted least-squares problem."""

    design: np.ndarray
    targets: np.ndarray

    def __post_init__(self) -> None:
        design = np.atleast_2d(np.asarray(self.design, dtype=float))
        targets = np.atleast_2d(np.asarray(self.targets, dtype=float))
        object.__setattr__(self, "design", design)
        object.__setattr__(self, "targets", targets)
        if design.shape[0] != targets.shape[0] or design.shape[0] < 1:
            raise ValueError("design and targets must share a positive row count")
        if not (np.all(np.isfinite(design)) and np.all(np.isfinite(targets))):
            raise ValueError("system entries must be finite")

    @property
    def n_samples(self) -> int:
        return int(self.design.shape[0])

    @property
    def n_eff(self) -> int:
        return int(self.design.shape[1])

    @property
    def d_out(self) -> int:
        return int(self.targets.shape[1])

    def gram(self) -> np.ndarray:
        return self.design.T @ self.design


def assemble(
    basis, samples: np.ndarray, weights: np.ndarray, observations: np.ndarray
) -> WlsSystem:
    """Build the scaled system from samples, weights, and output coefficients.

    Row ``i`` is ``sqrt(w_i / M)`` times the features / observations at
    sample ``i``; the implied Gram equals the direct block sum
    ``(1/M) sum_i w_i phi_j(f^i) phi_k(f^i)``.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    weights = np.atleast_1d(np.asarray(weights, dtype=float))
    observations = np.atleast_2d(np.asarray(observations, dtype=float))
    m = samples.shape[0]
    if weights.shape != (m,) or observations.shape[0] != m:
        raise ValueError("samples, weights, and observations must agree in length")
    if np.any(weights <= 0.0):
        raise ValueError("weights must be strictly positive")
    phi = np.atleast_2d(basis.scalar_features(samples))
    scale = np.sqrt(weights / m)[:, None]
    return WlsSystem(design=scale * phi, targets=scale * observations)


@dataclass(frozen=True)
class GramSummary:
    """Spectral diagnostics of the scalar Gram block."""

    spectral_gap: float
    condition: float
    block_size: int

    def stable(self, delta: float) -> bool:
        return self.spectral_gap <= delta


def gram_diagnostics(system: WlsSystem) -> GramSummary:
    """Spectral gap ``||G - I||_2`` and condition number of the Gram block."""
    gram = system.gram()
    eigenvalues = np.linalg.eigvalsh(gram)
    gap = float(np.max(np.abs(eigenvalues - 1.0)))
    smallest = eigenvalues[0]
    condition = float("inf") if smallest <= 0.0 else float(eigenvalues[-1] / smallest)
    return GramSummary(spectral_gap=gap, condition=condition, block_size=system.n_eff)


@dataclass(frozen=True)
class OperatorEstimate:
    """Fitted operator: coefficient matrix over a basis.

    The prediction at ``fhat`` is ``C^T phi(fhat)``.  ``rank`` is the
    numerical rank used by the solver (rank deficiency degrades to the
    minimum-norm solution and is reported here, never raised).
    """

    coefficients: np.ndarray
    basis: object
    rank: int
    residual_norm: float = 0.0
    tau: float | None = None
    conditioned_out: bool = False

    @property
    def n_eff(self) -> int:
        return int(self.coefficients.shape[0])

    @property
    def d_out(self) -> int:
        return int(self.coefficients.shape[1])

    def predict(self, fhat: np.ndarray) -> np.ndarray:
        return predict(self, fhat)


def solve(system: WlsSystem, basis=None) -> OperatorEstimate:
    """Minimal-Frobenius-residual coefficients via SVD of the design.

    Exactly equivalent to the per-output-block solves of the full normal
    equations; if the design is numerically rank deficient the minimum-norm
    solution is returned with the numerical rank recorded.
    """
    coeffs, residuals, rank, _ = np.linalg.lstsq(
        system.design, system.targets, rcond=RANK_RTOL
    )
    if residuals.size:
        residual = float(np.sqrt(residuals.sum()))
    else:
        misfit = system.design @ coeffs - system.targets
        residual = float(np.linalg.norm(misfit))
    return OperatorEstimate(
        coefficients=coeffs, basis=basis, rank=int(rank), residual_norm=residual
    )


def predict(estimate: OperatorEstimate, fhat: np.ndarray) -> np.ndarray:
    """Features then coefficient application; batched over leading axis."""
    phi = estimate.basis.scalar_features(fhat)
    return np.asarray(phi) @ estimate.coefficients


def truncate_output(prediction: np.ndarray, tau: float) -> np.ndarray:
    """Radial clip of output coefficient vectors to norm at most ``tau``.

    ``T(g) = g * min(||g||, tau) / ||g||``, with ``T(0) = 0``.  Applies to a
    single vector or a batch of rows.
    """
    if tau <= 0.0:
        raise ValueError(f"tau must be positive, got {tau}")
    arr = np.asarray(prediction, dtype=float)
    single = arr.ndim == 1
    batch = arr[None, :] if single else arr
    norms = np.linalg.norm(batch, axis=1)
    scale = np.ones_like(norms)
    oversized = norms > tau
    scale[oversized] = tau / norms[oversized]
    out = batch * scale[:, None]
    return out[0] if single else out


def default_tau(training_outputs: np.ndarray) -> float:
    """Data-driven truncation level: twice the largest training output norm."""
    norms = np.linalg.norm(np.atleast_2d(training_outputs), axis=1)
    top = float(norms.max(initial=0.0))
    return 2.0 * top if top > 0.0 else 1.0


def condition_estimator(
    estimate: OperatorEstimate, summary: GramSummary, delta: float
) -> OperatorEstimate:
    """Gate the estimate on the stability certificate.

    Returns the estimate unchanged when ``||G - I||_2 <= delta`` (inclusive
    at the boundary), otherwise the zero estimate with the flag set.
    """
    if summary.spectral_gap <= delta:
        return estimate
    return replace(
        estimate,
        coefficients=np.zeros_like(estimate.coefficients),
        conditioned_out=True,
    )

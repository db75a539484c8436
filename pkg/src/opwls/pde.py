r"""Desk-scale ground-truth operators and dataset construction.

Poisson problems are solved exactly in the sine eigenbasis; viscous Burgers
is advanced by a first-order IMEX Euler scheme (implicit viscosity, explicit
pseudospectral flux) on an oversampled interior grid.  All solvers are pure
functions of (input coefficients, configuration).

Conventions: the 1-D basis is ``sqrt(2) sin(n pi x)`` on (0, 1) and the 2-D
basis ``2 sin(n1 pi x1) sin(n2 pi x2)`` on the unit square, both orthonormal
in L^2.  Coefficient vectors are indexed by 0-based positions into an
explicit mode list; 2-D mode lists enumerate ``(n1, n2)`` pairs.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as _fft

__all__ = [
    "BurgersConfig",
    "DataSet",
    "sine_modes_2d",
    "sine_value_1d",
    "sine_value_2d",
    "poisson_apply_1d",
    "poisson_apply_2d",
    "greens_kernel",
    "burgers_solve",
    "burgers_evolve",
    "build_dataset",
    "default_d_solve",
    "default_dt",
]

_FFT_WORKERS = 2
_BATCH_CHUNK = 1024


def sine_modes_2d(max_mode: int, order: str = "row") -> np.ndarray:
    """Mode pairs ``(n1, n2)`` of ``[1..max_mode]^2`` in lexicographic order.

    ``order`` selects which component varies fastest: ``"row"`` keeps ``n1``
    outermost (row-major), ``"column"`` the transpose.  Both orders appear in
    practice; configurations record the one in use.
    """
    n1, n2 = np.meshgrid(
        np.arange(1, max_mode + 1), np.arange(1, max_mode + 1), indexing="ij"
    )
    pairs = np.column_stack([n1.ravel(), n2.ravel()])
    if order == "column":
        pairs = pairs[:, ::-1][np.lexsort((pairs[:, 1], pairs[:, 0]))]
        pairs = pairs[:, ::-1]
    elif order != "row":
        raise ValueError(f"unknown mode order {order!r}")
    return pairs


def sine_value_1d(n: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``sqrt(2) sin(n pi x)``, broadcasting ``n`` against ``x``."""
    return math.sqrt(2.0) * np.sin(np.multiply.outer(np.asarray(n), np.pi * x))


def sine_value_2d(pair, x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
    """``2 sin(n1 pi x1) sin(n2 pi x2)`` on the grid ``x1 x x2``."""
    n1, n2 = int(pair[0]), int(pair[1])
    return 2.0 * np.outer(np.sin(n1 * np.pi * x1), np.sin(n2 * np.pi * x2))


def poisson_apply_2d(fhat: np.ndarray, modes: np.ndarray) -> np.ndarray:
    """Solve ``Delta u = f`` with zero Dirichlet data on the unit square.

    The Laplacian is diagonal with eigenvalue ``-pi^2 (n1^2 + n2^2)`` on mode
    ``(n1, n2)``, so ``uhat = -fhat / (pi^2 (n1^2 + n2^2))`` exactly.
    Batched over the leading axis of ``fhat``.
    """
    modes = np.atleast_2d(np.asarray(modes, dtype=int))
    if np.any(modes < 1):
        raise ValueError("2-d sine modes start at (1, 1)")
    eig = np.pi**2 * (modes[:, 0] ** 2 + modes[:, 1] ** 2).astype(float)
    return -np.asarray(fhat, dtype=float) / eig


def poisson_apply_1d(fhat: np.ndarray) -> np.ndarray:
    """Solve ``-u'' = f`` on (0, 1) with ``u(0) = u(1) = 0``.

    ``uhat_n = fhat_n / (pi^2 n^2)`` for ``n = 1 .. d`` (1-based modes at
    0-based positions).  Batched over the leading axis.
    """
    arr = np.asarray(fhat, dtype=float)
    n = np.arange(1, arr.shape[-1] + 1)
    return arr / (np.pi**2 * n**2)


def greens_kernel(x, y):
    """Green's function ``min(x, y) - x y`` of the 1-D Dirichlet problem."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return np.minimum(x, y) - x * y


def default_d_solve(d_in: int, d_out: int) -> int:
    """Smallest ``2^m - 1`` solver dimension exceeding ``10 max(d_in, d_out)``.

    The power-of-two form keeps the internal sine transforms fast.
    """
    floor = 10 * max(d_in, d_out)
    m = 1
    while 2**m - 1 <= floor:
        m += 1
    return 2**m - 1


def default_dt(viscosity: float, final_time: float) -> float:
    """Step size rule: ``T/2000`` down to ``nu = 1e-2``, ``T/8000`` below."""
    return final_time / 2000.0 if viscosity >= 1e-2 else final_time / 8000.0


@dataclass(frozen=True)
class BurgersConfig:
    """Viscous Burgers solver configuration.

    ``d_solve`` must exceed ``10 max(d_in, d_out)`` (anti-aliasing headroom
    for the quantities of interest); ``grid_size`` interior points realize
    the pseudospectral products, alias-free for quadratic terms whenever
    ``grid_size >= 2 d_solve``.
    """

    viscosity: float
    final_time: float
    dt: float
    d_solve: int
    grid_size: int
    d_in: int
    d_out: int

    def __post_init__(self) -> None:
        if self.viscosity <= 0.0:
            raise ValueError("viscosity must be positive")
        if self.final_time <= 0.0 or self.dt <= 0.0:
            raise ValueError("final_time and dt must be positive")
        if self.d_solve <= 10 * max(self.d_in, self.d_out):
            raise ValueError(
                "d_solve must exceed 10 * max(d_in, d_out) "
                f"({self.d_solve} <= {10 * max(self.d_in, self.d_out)})"
            )
        if self.grid_size < 2 * self.d_solve:
            raise ValueError("grid_size must be at least 2 * d_solve")

    @classmethod
    def create(
        cls,
        viscosity: float,
        final_time: float = 0.2,
        d_in: int = 8,
        d_out: int = 48,
        dt: float | None = None,
        d_solve: int | None = None,
        grid_size: int | None = None,
    ) -> "BurgersConfig":
        d_solve = default_d_solve(d_in, d_out) if d_solve is None else d_solve
        return cls(
            viscosity=viscosity,
            final_time=final_time,
            dt=default_dt(viscosity, final_time) if dt is None else dt,
            d_solve=d_solve,
            grid_size=2 * d_solve + 1 if grid_size is None else grid_size,
            d_in=d_in,
            d_out=d_out,
        )

    def as_dict(self) -> dict:
        return {
            "viscosity": self.viscosity,
            "final_time": self.final_time,
            "dt": self.dt,
            "d_solve": self.d_solve,
            "grid_size": self.grid_size,
            "d_in": self.d_in,
            "d_out": self.d_out,
        }


class BlowUpError(RuntimeError):
    """The explicit flux produced a non-finite state."""


def _sine_synthesis(coeffs: np.ndarray, grid_size: int) -> np.ndarray:
    # values at x_i = i/(P+1), i = 1..P, of sum_j c_j sqrt(2) sin(j pi x)
    m, d = coeffs.shape
    padded = np.zeros((m, grid_size))
    padded[:, :d] = coeffs
    return _fft.dst(padded, type=1, axis=1, workers=_FFT_WORKERS) / math.sqrt(2.0)


def _sine_analysis(values: np.ndarray, d: int) -> np.ndarray:
    # inverse of _sine_synthesis restricted to the first d coefficients
    grid_size = values.shape[1]
    out = _fft.dst(values, type=1, axis=1, workers=_FFT_WORKERS)
    return out[:, :d] / (math.sqrt(2.0) * (grid_size + 1))


def _cosine_synthesis(coeffs: np.ndarray, grid_size: int) -> np.ndarray:
    # values at the same interior grid of sum_j c_j cos(j pi x)
    m, d = coeffs.shape
    padded = np.zeros((m, grid_size + 2))
    padded[:, 1 : d + 1] = 0.5 * coeffs
    out = _fft.dct(padded, type=1, axis=1, workers=_FFT_WORKERS)
    return out[:, 1 : grid_size + 1]


def burgers_evolve(u0hat: np.ndarray, config: BurgersConfig) -> np.ndarray:
    """Advance a batch of initial sine coefficients to the final time.

    Per step: synthesize ``u`` and ``u_x`` on the oversampled grid, form the
    pointwise flux ``u u_x``, project back to sine coefficients, then apply
    the implicit viscous update

        uhat <- (uhat - dt * fluxhat) / (1 + dt * nu * pi^2 j^2).

    Returns all ``d_solve`` coefficients at the final time; callers truncate.
    """
    u0 = np.atleast_2d(np.asarray(u0hat, dtype=float))
    if u0.shape[1] > config.d_solve:
        raise ValueError("initial coefficients exceed the solver dimension")
    m = u0.shape[0]
    state = np.zeros((m, config.d_solve))
    state[:, : u0.shape[1]] = u0

    j = np.arange(1, config.d_solve + 1, dtype=float)
    damp = 1.0 / (1.0 + config.dt * config.viscosity * np.pi**2 * j**2)
    deriv_scale = j * np.pi * math.sqrt(2.0)
    n_steps = int(round(config.final_time / config.dt))

    for _ in range(n_steps):
        u_grid = _sine_synthesis(state, config.grid_size)
        ux_grid = _cosine_synthesis(state * deriv_scale, config.grid_size)
        flux_hat = _sine_analysis(u_grid * ux_grid, config.d_solve)
        state = (state - config.dt * flux_hat) * damp
        if not np.all(np.isfinite(state)):
            raise BlowUpError("non-finite Burgers state; reduce dt or amplitudes")
    return state


def burgers_solve(
    u0hat: np.ndarray, config: BurgersConfig, n_keep: int | None = None
) -> np.ndarray:
    """Single-trajectory wrapper around :func:`burgers_evolve`."""
    out = burgers_evolve(np.atleast_2d(u0hat), config)[0]
    return out if n_keep is None else out[:n_keep]


@dataclass(frozen=True)
class DataSet:
    """Paired input/output coefficient matrices with provenance."""

    inputs: np.ndarray
    outputs: np.ndarray
    weights: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        inputs = np.atleast_2d(np.asarray(self.inputs, dtype=float))
        outputs = np.atleast_2d(np.asarray(self.outputs, dtype=float))
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if inputs.shape[0] == 0:
            outputs = outputs.reshape(0, outputs.shape[-1] if outputs.size else 0)
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "weights", weights)
        if not (inputs.shape[0] == outputs.shape[0] == weights.shape[0]):
            raise ValueError("inputs, outputs, and weights must agree in length")
        if np.any(weights <= 0.0):
            raise ValueError("weights must be strictly positive")

    @property
    def n_samples(self) -> int:
        return int(self.inputs.shape[0])


def content_hash(*parts) -> str:
    """Stable hash of arrays / JSON-serializable metadata."""
    digest = hashlib.sha256()
    for part in parts:
        if isinstance(part, np.ndarray):
            digest.update(np.ascontiguousarray(part).tobytes())
            digest.update(str(part.shape).encode())
        else:
            digest.update(json.dumps(part, sort_keys=True, default=str).encode())
    return digest.hexdigest()


def build_dataset(
    samples: np.ndarray,
    weights: np.ndarray,
    operator: str,
    *,
    modes_2d: np.ndarray | None = None,
    burgers_config: BurgersConfig | None = None,
    d_out: int | None = None,
    seed: int | None = None,
    sampler: str = "unspecified",
) -> DataSet:
    """Apply a ground-truth operator to sampled inputs.

    ``operator`` is ``"poisson1d"``, ``"poisson2d"`` (needs ``modes_2d``), or
    ``"burgers"`` (needs ``burgers_config``).  Outputs are truncated to
    ``d_out`` columns when given.  Provenance records the seed, sampler kind,
    solver configuration, and a content hash of the inputs.
    """
    samples = np.atleast_2d(np.asarray(samples, dtype=float))
    weights = np.atleast_1d(np.asarray(weights, dtype=float))
    if samples.shape[0] == 0:
        width = d_out if d_out is not None else samples.shape[1]
        outputs = np.zeros((0, width))
    elif operator == "poisson1d":
        outputs = poisson_apply_1d(samples)
    elif operator == "poisson2d":
        if modes_2d is None:
            raise ValueError("poisson2d requires the mode list")
        outputs = poisson_apply_2d(samples, modes_2d)
    elif operator == "burgers":
        if burgers_config is None:
            raise ValueError("burgers requires a solver configuration")
        chunks = [
            burgers_evolve(samples[i : i + _BATCH_CHUNK], burgers_config)
            for i in range(0, samples.shape[0], _BATCH_CHUNK)
        ]
        outputs = np.vstack(chunks)
    else:
        raise ValueError(f"unknown operator {operator!r}")
    if d_out is not None and samples.shape[0] > 0:
        outputs = outputs[:, :d_out]
    provenance = {
        "operator": operator,
        "sampler": sampler,
        "seed": seed,
        "solver_config": burgers_config.as_dict() if burgers_config else None,
        "input_hash": content_hash(samples),
    }
    return DataSet(
        inputs=samples, outputs=outputs, weights=weights, provenance=provenance
    )

r"""Multi-index sets defining scalar polynomial approximation spaces.

Two families of anisotropic index sets over ``d`` input modes are supported:

* weighted ``l^p`` balls:        ``|| gamma . lam ||_p <= k``,
* weighted hyperbolic crosses:   ``|| gamma . log(lam + 1) ||_1 <= log(k + 1)``,

both intersected with the degree cap ``lam_j <= r`` (an ``l^inf`` ball).
Membership comparisons carry a ``1e-12`` slack toward inclusion so that
irrational thresholds (e.g. linearly decaying ``gamma``) do not flap on the
boundary.

The enumeration order is fixed: ascending total degree, ties broken by
lexicographic comparison of the entries (coordinate 0 most significant).
Prefixes of this order are always monotone lower sets, because every
``lam - e_j`` has strictly smaller total degree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "IndexSetSpec",
    "generate",
    "is_monotone_lower",
    "effective_dimension",
    "indices_to_text",
    "indices_from_text",
]

MEMBERSHIP_SLACK = 1e-12
DEFAULT_MAX_SIZE = 10**6


@dataclass(frozen=True)
class IndexSetSpec:
    """Defining data of a weighted index set.

    ``kind`` is ``"lp_ball"`` (with exponent ``p``, possibly ``inf``) or
    ``"hyperbolic_cross"``.  ``gamma`` holds one strictly positive anisotropy
    weight per input mode; its length sets the dimension.
    """

    kind: str
    radius: float
    gamma: np.ndarray
    degree_cap: int
    p: float = 1.0
    max_size: int = DEFAULT_MAX_SIZE

    def __post_init__(self) -> None:
        gamma = np.asarray(self.gamma, dtype=float)
        object.__setattr__(self, "gamma", gamma)
        if self.kind not in ("lp_ball", "hyperbolic_cross"):
            raise ValueError(f"unknown index set kind {self.kind!r}")
        if gamma.ndim != 1 or gamma.size < 1:
            raise ValueError("gamma must be a non-empty 1-d array")
        if np.any(gamma <= 0.0):
            raise ValueError("gamma entries must be strictly positive")
        if self.radius < 0.0:
            raise ValueError("radius must be >= 0")
        if self.degree_cap < 0:
            raise ValueError("degree_cap must be >= 0")
        if self.kind == "lp_ball" and not (self.p >= 1.0):
            raise ValueError("p must be >= 1 (or inf)")

    @property
    def dim(self) -> int:
        return int(self.gamma.size)


def _coordinate_bounds(spec: IndexSetSpec) -> np.ndarray:
    """Largest admissible entry per coordinate, after the degree cap."""
    if spec.kind == "hyperbolic_cross":
        budget = math.log(spec.radius + 1.0) + MEMBERSHIP_SLACK
        raw = np.expm1(budget / spec.gamma)
    else:
        raw = (spec.radius + MEMBERSHIP_SLACK) / spec.gamma
    bounds = np.floor(raw + MEMBERSHIP_SLACK).astype(int)
    return np.minimum(bounds, spec.degree_cap)


def generate(spec: IndexSetSpec) -> np.ndarray:
    """Enumerate all indices of ``spec`` in canonical order.

    Returns an ``(N, d)`` integer array.  Raises ``ValueError`` if the member
    count would exceed ``spec.max_size``.
    """
    d = spec.dim
    bounds = _coordinate_bounds(spec)
    hc = spec.kind == "hyperbolic_cross"
    p_inf = spec.kind == "lp_ball" and math.isinf(spec.p)

    if hc:
        budget = math.log(spec.radius + 1.0) + MEMBERSHIP_SLACK
        costs = [spec.gamma[j] * np.log1p(np.arange(bounds[j] + 1)) for j in range(d)]
    elif p_inf:
        budget = math.inf  # per-coordinate bounds already encode membership
        costs = [np.zeros(bounds[j] + 1) for j in range(d)]
    else:
        budget = (spec.radius + MEMBERSHIP_SLACK) ** spec.p
        costs = [
            (spec.gamma[j] * np.arange(bounds[j] + 1)) ** spec.p for j in range(d)
        ]

    members: list[tuple[int, ...]] = []
    current = [0] * d

    def descend(j: int, used: float) -> None:
        if j == d:
            if len(members) >= spec.max_size:
                raise ValueError(
                    f"index set exceeds the hard limit of {spec.max_size} members"
                )
            members.append(tuple(current))
            return
        cost_j = costs[j]
        for lam in range(bounds[j] + 1):
            spent = used + cost_j[lam]
            if spent > budget:
                break
            current[j] = lam
            descend(j + 1, spent)
        current[j] = 0

    descend(0, 0.0)

    members.sort(key=lambda idx: (sum(idx), idx))
    return np.array(members, dtype=int).reshape(len(members), d)


def is_monotone_lower(indices: np.ndarray) -> bool:
    """True iff ``lam - e_j`` is a member for every member and every ``lam_j > 0``."""
    pool = {tuple(int(v) for v in row) for row in np.atleast_2d(indices)}
    for idx in pool:
        for j, entry in enumerate(idx):
            if entry > 0:
                lower = idx[:j] + (entry - 1,) + idx[j + 1 :]
                if lower not in pool:
                    return False
    return True


def effective_dimension(indices: np.ndarray) -> int:
    """Cardinality of the scalar index set (``N_eff``)."""
    return int(np.atleast_2d(indices).shape[0])


def indices_to_text(indices: np.ndarray) -> str:
    """Newline-delimited dump, one index per line, space-separated entries."""
    rows = np.atleast_2d(indices)
    return "\n".join(" ".join(str(int(v)) for v in row) for row in rows) + "\n"


def indices_from_text(text: str) -> np.ndarray:
    """Inverse of :func:`indices_to_text`."""
    rows = [
        [int(tok) for tok in line.split()]
        for line in text.splitlines()
        if line.strip()
    ]
    return np.array(rows, dtype=int)

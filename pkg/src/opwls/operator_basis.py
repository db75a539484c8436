r"""Orthonormal operator families and their Christoffel machinery.

Every approximation space here is block separable: the operator index set is
the tensor product ``[d_out] x Lambda_scalar``, so a basis is described by a
scalar feature map ``phi`` of dimension ``N_eff`` together with the number of
output modes.  The full operator basis has dimension ``N = d_out * N_eff``
and its members act as ``Phi_{(o, lam)}(f) = phi_lam(f) psi_o``.

Two concrete families:

* :class:`LinearRankOneBasis` -- rank-one linear operators with scalar
  features ``phi_{n}(f) = fhat_n / sigma_n`` over selected input modes;
* :class:`PolyOperatorBasis` -- tensor orthogonal-polynomial operators with
  scalar features ``phi_lam(f) = prod_j p^j_{lam_j}(fhat_j)``.

Because output modes are orthonormal, the reciprocal Christoffel function of
the operator space collapses to ``w * d_out * sum_lam phi_lam(f)^2`` and the
optimal sampling weight to ``N_eff / sum_lam phi_lam(f)^2``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .measures import PolynomialFamily, ProductMeasure, build_family, poly_table

__all__ = [
    "LinearRankOneBasis",
    "PolyOperatorBasis",
    "scalar_features",
    "linear_features",
    "christoffel",
    "optimal_weight",
    "monomial_operator_eval",
]


@dataclass(frozen=True)
class LinearRankOneBasis:
    """Rank-one linear operator family over ``input_modes x [d_out]``.

    ``input_modes`` are 0-based positions into the input coefficient vector;
    ``sigmas`` the standard deviations of those coefficients under the
    approximation measure.  ``d_in`` is the total input coefficient length.
    """

    input_modes: np.ndarray
    sigmas: np.ndarray
    d_out: int
    d_in: int

    def __post_init__(self) -> None:
        modes = np.asarray(self.input_modes, dtype=int)
        sigmas = np.asarray(self.sigmas, dtype=float)
        object.__setattr__(self, "input_modes", modes)
        object.__setattr__(self, "sigmas", sigmas)
        if modes.ndim != 1 or sigmas.shape != modes.shape:
            raise ValueError("input_modes and sigmas must be matching 1-d arrays")
        if np.any(sigmas <= 0.0):
            raise ValueError("all sigmas must be strictly positive")
        if self.d_out < 1 or self.d_in < 1:
            raise ValueError("d_out and d_in must be >= 1")
        if np.any(modes < 0) or np.any(modes >= self.d_in):
            raise ValueError("input modes out of range")

    @classmethod
    def from_measure(
        cls, measure: ProductMeasure, input_modes, d_out: int
    ) -> "LinearRankOneBasis":
        modes = np.asarray(input_modes, dtype=int)
        if np.any(modes < 0) or np.any(modes >= len(measure)):
            raise ValueError("input modes out of range for the measure")
        sigmas = measure.sigmas[modes]
        return cls(input_modes=modes, sigmas=sigmas, d_out=d_out, d_in=len(measure))

    @property
    def n_eff(self) -> int:
        return int(self.input_modes.size)

    @property
    def n_total(self) -> int:
        return self.n_eff * self.d_out

    @property
    def pairs(self) -> list[tuple[int, int]]:
        """Operator index pairs ``(n1, n2)`` in block order (outputs outermost)."""
        return [
            (int(n1), o) for o in range(self.d_out) for n1 in self.input_modes
        ]

    def scalar_features(self, fhat: np.ndarray) -> np.ndarray:
        return linear_features(self, fhat)


@dataclass(frozen=True)
class PolyOperatorBasis:
    """Tensor orthogonal-polynomial operator family ``[d_out] x Lambda_scalar``."""

    scalar_indices: np.ndarray
    families: tuple[PolynomialFamily, ...]
    d_out: int

    def __post_init__(self) -> None:
        indices = np.atleast_2d(np.asarray(self.scalar_indices, dtype=int))
        object.__setattr__(self, "scalar_indices", indices)
        object.__setattr__(self, "families", tuple(self.families))
        if indices.shape[1] != len(self.families):
            raise ValueError("one polynomial family per input mode is required")
        if np.any(indices < 0):
            raise ValueError("scalar indices must be non-negative")
        if self.d_out < 1:
            raise ValueError("d_out must be >= 1")
        for j, family in enumerate(self.families):
            if indices[:, j].max(initial=0) > family.n_max:
                raise ValueError(f"family for mode {j} is too short")

    @classmethod
    def build(
        cls, measure: ProductMeasure, scalar_indices, d_out: int
    ) -> "PolyOperatorBasis":
        indices = np.atleast_2d(np.asarray(scalar_indices, dtype=int))
        if indices.shape[1] != len(measure):
            raise ValueError("scalar index width must match the measure dimension")
        families = tuple(
            build_family(measure.marginals[j], int(indices[:, j].max(initial=0)))
            for j in range(len(measure))
        )
        return cls(scalar_indices=indices, families=families, d_out=d_out)

    @property
    def d_in(self) -> int:
        return int(self.scalar_indices.shape[1])

    @property
    def n_eff(self) -> int:
        return int(self.scalar_indices.shape[0])

    @property
    def n_total(self) -> int:
        return self.n_eff * self.d_out

    def scalar_features(
        self, fhat: np.ndarray, warn_extrapolation: bool = True
    ) -> np.ndarray:
        return scalar_features(self, fhat, warn_extrapolation=warn_extrapolation)


def _as_batch(fhat: np.ndarray, d_in: int) -> tuple[np.ndarray, bool]:
    arr = np.asarray(fhat, dtype=float)
    single = arr.ndim == 1
    batch = arr[None, :] if single else arr
    if batch.shape[1] != d_in:
        raise ValueError(f"expected input length {d_in}, got {batch.shape[1]}")
    return batch, single


def scalar_features(
    basis: PolyOperatorBasis, fhat: np.ndarray, warn_extrapolation: bool = True
) -> np.ndarray:
    """Evaluate ``phi_lam(fhat) = prod_j p^j_{lam_j}(fhat_j)`` for every ``lam``.

    Accepts a single coefficient vector or an ``(M, d_in)`` batch.  Entries
    outside [-1, 1] are allowed but flagged with a warning: the features are
    then polynomial extrapolations, useful only for diagnostics.
    """
    batch, single = _as_batch(fhat, basis.d_in)
    if warn_extrapolation and np.any(np.abs(batch) > 1.0 + 1e-14):
        warnings.warn(
            "input coefficients outside [-1, 1]: features are extrapolated",
            RuntimeWarning,
            stacklevel=2,
        )
    out = np.ones((batch.shape[0], basis.n_eff))
    for j, family in enumerate(basis.families):
        degrees = basis.scalar_indices[:, j]
        top = int(degrees.max(initial=0))
        if top == 0:
            continue
        table = poly_table(family, top, batch[:, j])
        out *= table[degrees].T
    return out[0] if single else out


def linear_features(basis: LinearRankOneBasis, fhat: np.ndarray) -> np.ndarray:
    """Normalized selected coordinates ``fhat_{n1} / sigma_{n1}``."""
    batch, single = _as_batch(fhat, basis.d_in)
    out = batch[:, basis.input_modes] / basis.sigmas
    return out[0] if single else out


def christoffel(basis, fhat: np.ndarray, weight: float = 1.0) -> float | np.ndarray:
    """Weighted reciprocal Christoffel function of the operator space.

    ``kappa_w(f) = w * sum_n ||Phi_n(f)||^2 = w * d_out * sum_lam phi_lam(f)^2``.
    With the optimal weight the value is identically ``N = d_out * N_eff``.
    """
    if np.any(np.asarray(weight) <= 0.0):
        raise ValueError("weight must be strictly positive")
    phi = basis.scalar_features(fhat)
    total = np.sum(np.square(phi), axis=-1)
    return weight * basis.d_out * total


def optimal_weight(basis, fhat: np.ndarray) -> float | np.ndarray:
    """Optimal sampling weight ``w(f) = N_eff / sum_lam phi_lam(f)^2``.

    The ``d_out`` factors of the operator-level formula cancel.  Fails if all
    features vanish, which cannot happen when the zero index is a member.
    """
    phi = basis.scalar_features(fhat)
    total = np.sum(np.square(phi), axis=-1)
    if np.any(total <= 0.0):
        raise ZeroDivisionError(
            "all scalar features vanish at an input; the optimal weight is undefined"
        )
    return basis.n_eff / total


def monomial_operator_eval(
    index: np.ndarray, fhat: np.ndarray, d_out: int
) -> np.ndarray:
    """Evaluate the multilinear monomial operator of a multi-index.

    ``index = (n0, n1, n2, ...)`` places ``prod_j fhat_j^{n_j}`` at output
    mode ``n0`` (0-based position) and zeros elsewhere.  These operators are
    an evaluation oracle only; they are never used for fitting or sampling.
    """
    index = np.asarray(index, dtype=int)
    n0 = int(index[0])
    if not 0 <= n0 < d_out:
        raise ValueError(f"output mode {n0} outside [0, {d_out})")
    fhat = np.asarray(fhat, dtype=float)
    exponents = index[1:]
    if exponents.size != fhat.size:
        raise ValueError("scalar part of the index must match the input length")
    out = np.zeros(d_out)
    out[n0] = np.prod(np.power(fhat, exponents))
    return out

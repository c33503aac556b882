"""Explicit operators: Halmos dilations, tensor ampliations, truncated
diagonal spectra, and the Parrott triple with its generators.

Tensor slots are ordered slot 1 (x) slot 2 (x) ... with the row-major
``numpy.kron`` convention, so the joint eigenvector of diagonal factors at
indices ``(j_1, ..., j_n)`` is the basis vector with that multi-index.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

from .linalg import (
    DimensionError,
    LinalgError,
    adjoint,
    as_matrix,
    direct_sum,
    op_norm,
)
from .opspace import GeneratorTuple, LevelElement, eval_at, os_norm

MAX_AMPLIATION_DIM = 4096
SQRT3_2 = np.sqrt(3.0) / 2


def halmos_dilation(t, tol: float = 1e-10) -> np.ndarray:
    """Unitary ``[[T, D_{T*}], [D_T, -T*]]`` with ``D_T = (I - T*T)^{1/2}``."""
    t = as_matrix(t)
    k = t.shape[0]
    if t.shape[1] != k:
        raise DimensionError("halmos_dilation needs a square matrix")
    if op_norm(t) > 1 + tol:
        raise LinalgError("halmos_dilation needs a contraction")
    # D_T = Y s Y^H and D_{T*} = X s X^H from one SVD T = X diag(sigma) Y^H,
    # so T D_T = D_{T*} T holds structurally; two independent square roots
    # of near-singular I - T*T would not agree to better than ~1e-8.
    x, sigma, yh = np.linalg.svd(t)
    sigma = np.where(np.abs(1.0 - sigma) <= 8 * np.finfo(float).eps, 1.0, np.minimum(sigma, 1.0))
    root = np.sqrt((1.0 - sigma) * (1.0 + sigma))
    y = adjoint(yh)
    d_t = (y * root) @ yh
    d_ts = (x * root) @ adjoint(x)
    th = adjoint(t)
    u = np.empty((2 * k, 2 * k), dtype=np.complex128)
    u[:k, :k] = t
    u[:k, k:] = d_ts
    u[k:, :k] = d_t
    u[k:, k:] = -th
    return u


@dataclass(frozen=True)
class AmpliationFamily:
    factors: tuple[np.ndarray, ...]
    mode: str
    ops: tuple[np.ndarray, ...]

    @property
    def dim(self) -> int:
        return self.ops[0].shape[0]

    def generators(self, contraction_tol: float = 1e-10) -> GeneratorTuple:
        return GeneratorTuple(self.ops, contraction_tol)


def ampliation(factors: Sequence, mode: str = "independent") -> AmpliationFamily:
    """Place each factor in the tensor product of all factor spaces.

    ``independent``: ``I (x) ... (x) T_i (x) ... (x) I``.
    ``cumulative``:  ``T_1 (x) ... (x) T_i (x) I (x) ... (x) I``.
    """
    factors = tuple(as_matrix(f) for f in factors)
    if not 1 <= len(factors) <= 4:
        raise ValueError("ampliation supports 1 to 4 factors")
    if any(f.shape[0] != f.shape[1] for f in factors):
        raise DimensionError("ampliation factors must be square")
    dims = [f.shape[0] for f in factors]
    if int(np.prod(dims)) > MAX_AMPLIATION_DIM:
        raise DimensionError(f"tensor dimension {int(np.prod(dims))} exceeds {MAX_AMPLIATION_DIM}")
    if mode not in ("independent", "cumulative"):
        raise ValueError(f"unknown ampliation mode {mode!r}")
    eyes = [np.eye(d, dtype=np.complex128) for d in dims]
    ops = []
    for i in range(len(factors)):
        if mode == "independent":
            slots = eyes[:i] + [factors[i]] + eyes[i + 1:]
        else:
            slots = list(factors[: i + 1]) + eyes[i + 1:]
        ops.append(reduce(np.kron, slots))
    return AmpliationFamily(factors, mode, tuple(ops))


def roots_of_unity_diag(m: int) -> np.ndarray:
    """``diag(exp(2 pi i j / m))``; its spectrum is a (pi/m)-net of the circle."""
    if m < 1:
        raise ValueError("m must be positive")
    z = np.exp(2j * np.pi * np.arange(m) / m)
    # Exact values at quarter turns keep small cases bit-clean.
    z.real[np.abs(z.real) < 1e-15] = 0.0
    z.imag[np.abs(z.imag) < 1e-15] = 0.0
    return np.diag(z)


def parrott_triple() -> GeneratorTuple:
    """The 2x2 unitaries I, U (reflection) and V (rotation by pi/3)."""
    eye = np.eye(2, dtype=np.complex128)
    u = np.array([[0.5, SQRT3_2], [SQRT3_2, -0.5]], dtype=np.complex128)
    v = np.array([[0.5, -SQRT3_2], [SQRT3_2, 0.5]], dtype=np.complex128)
    return GeneratorTuple((eye, u, v))


def parrott_blocks(m: int) -> AmpliationFamily:
    """Independent ampliation of ``I (+) D_m``, ``U (+) D_m``, ``V (+) D_m``."""
    d = roots_of_unity_diag(m)
    corners = parrott_triple().ops
    return ampliation([direct_sum(c, d) for c in corners], "independent")


def parrott_generators(m: int = 4) -> GeneratorTuple:
    """Generators ``S_i = T_hat_i (+) C_i`` with ``C = (I, U, V)``.

    ``T_hat_i`` are the ampliations from :func:`parrott_blocks`; total
    dimension is ``(m + 2)**3 + 2``.
    """
    if not 2 <= m <= 6:
        raise ValueError("parrott_generators supports 2 <= m <= 6")
    fam = parrott_blocks(m)
    corners = parrott_triple().ops
    return GeneratorTuple(tuple(direct_sum(op, c) for op, c in zip(fam.ops, corners)))


def _is_diagonal(a: np.ndarray) -> bool:
    return np.count_nonzero(a - np.diag(np.diag(a))) == 0


def ampliation_exactness(factors: Sequence, b: LevelElement) -> tuple[float, float]:
    """``(os_norm of the independent ampliation, max over the joint spectrum)``.

    For commuting diagonal unitaries the ampliated operator
    ``sum_s A_s (x) B_s`` is block diagonal over joint eigenvectors, with
    blocks ``sum_s lambda_s B_s``; the two numbers agree up to rounding.
    """
    factors = tuple(as_matrix(f) for f in factors)
    for f in factors:
        if f.shape[0] != f.shape[1] or not _is_diagonal(f):
            raise LinalgError("ampliation_exactness needs diagonal factors")
        if not np.allclose(np.abs(np.diag(f)), 1.0, rtol=0, atol=1e-12):
            raise LinalgError("ampliation_exactness needs unitary factors")
    fam = ampliation(factors, "independent")
    lhs = os_norm(fam.generators(), b)
    spectra = [np.angle(np.diag(f)) for f in factors]
    rhs = max(eval_at(b, np.array(p)) for p in itertools.product(*spectra))
    return lhs, rhs

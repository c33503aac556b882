"""Norms on l1(n) and on its matrix levels M_k(l1(n)).

An element of ``M_k(l1(n))`` is stored as ``n`` coefficient matrices
``B_1..B_n`` (a :class:`LevelElement`); the matrix ``((v_ij))`` it encodes
has entries ``v_ij = sum_s (B_s)_ij e_s``.  A functional ``f`` in the dual
unit ball acts entrywise, so ``((f(v_ij))) = sum_s f(e_s) B_s``.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy.optimize import minimize
from scipy.sparse.csgraph import connected_components

from .linalg import (
    DimensionError,
    as_matrix,
    batch_op_norm,
    matrix_from_dict,
    matrix_to_dict,
    op_norm,
)

GOLDEN = (math.sqrt(5) - 1) / 2
CHUNK_POINTS = 1 << 16


def ell1_norm(a: Any) -> float:
    return float(np.sum(np.abs(np.asarray(a, dtype=np.complex128))))


def _stack(mats: Sequence[Any], what: str) -> tuple[np.ndarray, ...]:
    out = tuple(as_matrix(m) for m in mats)
    if not out:
        raise DimensionError(f"{what} needs at least one matrix")
    shape = out[0].shape
    if shape[0] != shape[1] or any(m.shape != shape for m in out):
        raise DimensionError(f"{what} matrices must be square and share one size")
    return out


@dataclass(frozen=True)
class LevelElement:
    """Element of M_k(l1(n)) given by coefficient matrices B_1..B_n."""

    coeffs: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _stack(self.coeffs, "LevelElement"))

    @classmethod
    def from_vector(cls, a: Any) -> "LevelElement":
        """Level-1 element from a coefficient vector (a_1, ..., a_n)."""
        return cls(tuple(np.array([[z]]) for z in np.asarray(a, dtype=np.complex128)))

    @property
    def n(self) -> int:
        return len(self.coeffs)

    @property
    def k(self) -> int:
        return self.coeffs[0].shape[0]

    def array(self) -> np.ndarray:
        return np.stack(self.coeffs)

    def to_dict(self) -> dict:
        return tuple_to_dict(self.coeffs)


@dataclass(frozen=True)
class GeneratorTuple:
    """Same-size contractions (S_1..S_n) inducing a linear map on l1(n)."""

    ops: tuple[np.ndarray, ...]
    contraction_tol: float = 1e-10

    def __post_init__(self):
        ops = _stack(self.ops, "GeneratorTuple")
        object.__setattr__(self, "ops", ops)
        for s, op in enumerate(ops, start=1):
            nrm = op_norm(op)
            if nrm > 1 + self.contraction_tol:
                raise ValueError(f"generator {s} is not a contraction (norm {nrm:.12g})")

    @property
    def n(self) -> int:
        return len(self.ops)

    @property
    def dim(self) -> int:
        return self.ops[0].shape[0]

    def apply(self, a: Any) -> np.ndarray:
        """The image sum_s a_s S_s of a coefficient vector."""
        a = np.asarray(a, dtype=np.complex128)
        if a.shape != (self.n,):
            raise DimensionError(f"expected {self.n} coefficients, got shape {a.shape}")
        return np.tensordot(a, np.stack(self.ops), axes=1)

    def to_dict(self) -> dict:
        return tuple_to_dict(self.ops)


def tuple_to_dict(mats: Sequence[np.ndarray]) -> dict:
    return {
        "n": len(mats),
        "dim": int(mats[0].shape[0]),
        "matrices": [matrix_to_dict(m) for m in mats],
    }


def tuple_from_dict(obj: dict) -> tuple[np.ndarray, ...]:
    try:
        n, dim, raw = int(obj["n"]), int(obj["dim"]), obj["matrices"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed tuple object: {exc}") from exc
    mats = tuple(matrix_from_dict(m) for m in raw)
    if len(mats) != n:
        raise DimensionError(f"declared n={n} but found {len(mats)} matrices")
    if any(m.shape != (dim, dim) for m in mats):
        raise DimensionError(f"all matrices must be {dim}x{dim}")
    return mats


def load_tuple(text: str) -> tuple[np.ndarray, ...]:
    return tuple_from_dict(json.loads(text))


@dataclass(frozen=True)
class Witness:
    """A unit-l1 coefficient vector with its achieved image norm."""

    vector: np.ndarray
    achieved: float

    @property
    def margin(self) -> float:
        return 1.0 - self.achieved

    def to_dict(self) -> dict:
        return {
            "vector": [[float(z.real), float(z.imag)] for z in self.vector],
            "achieved": float(self.achieved),
            "margin": float(self.margin),
        }


def eval_at(b: LevelElement, phases: Any) -> float:
    """Norm of the scalar matrix obtained by applying the torus functional
    ``e_s -> exp(i * phases[s])`` entrywise."""
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (b.n,):
        raise DimensionError(f"expected {b.n} phases, got shape {phases.shape}")
    return op_norm(np.tensordot(np.exp(1j * phases), b.array(), axes=1))


@dataclass(frozen=True)
class MinNormResult:
    lower: float          # achieved value at ``argmax``
    upper: float          # triangle bound sum_s ||B_s||
    lipschitz_upper: float  # grid max + (pi / grid) * sum_{s>1} ||B_s||
    argmax: np.ndarray    # torus phases, first coordinate fixed at 0
    grid: int
    refine_rounds: int    # rounds actually performed

    @property
    def value(self) -> float:
        return self.lower


def _threads(threads: int | None) -> int:
    if threads is not None:
        return max(1, threads)
    env = os.environ.get("OPSPACE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _grid_chunk(arr: np.ndarray, grid: int, start: int, stop: int) -> tuple[float, int]:
    n = arr.shape[0]
    idx = np.arange(start, stop)
    digits = np.unravel_index(idx, (grid,) * (n - 1))
    phases = np.zeros((stop - start, n))
    for s, d in enumerate(digits, start=1):
        phases[:, s] = d * (2 * np.pi / grid)
    mats = np.einsum("ps,sij->pij", np.exp(1j * phases), arr)
    vals = batch_op_norm(mats)
    j = int(np.argmax(vals))  # first maximum within the chunk
    return float(vals[j]), start + j


def _grid_search(b: LevelElement, grid: int, threads: int | None) -> np.ndarray:
    arr = b.array()
    n = b.n
    total = grid ** (n - 1)
    bounds = [(lo, min(lo + CHUNK_POINTS, total)) for lo in range(0, total, CHUNK_POINTS)]
    workers = min(_threads(threads), len(bounds))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda lh: _grid_chunk(arr, grid, *lh), bounds))
    else:
        results = [_grid_chunk(arr, grid, lo, hi) for lo, hi in bounds]
    # Chunks come back in index order; strict '>' keeps the lexicographically first max.
    best_val, best_idx = results[0]
    for val, idx in results[1:]:
        if val > best_val:
            best_val, best_idx = val, idx
    digits = np.unravel_index(best_idx, (grid,) * (n - 1))
    phases = np.zeros(n)
    phases[1:] = np.array(digits, dtype=float) * (2 * np.pi / grid)
    return phases


def golden_max(f, lo: float, hi: float, tol: float = 1e-10) -> tuple[float, float]:
    """Golden-section search for a maximum of ``f`` on ``[lo, hi]``."""
    c = hi - GOLDEN * (hi - lo)
    d = lo + GOLDEN * (hi - lo)
    fc, fd = f(c), f(d)
    while hi - lo > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - GOLDEN * (hi - lo)
            fc = f(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + GOLDEN * (hi - lo)
            fd = f(d)
    return (c, fc) if fc >= fd else (d, fd)


def min_norm(
    b: LevelElement,
    grid: int = 360,
    refine_iters: int = 50,
    threads: int | None = None,
) -> MinNormResult:
    """MIN norm of ``b`` as a supremum over the n-torus.

    Global phase is irrelevant, so the first phase is pinned to 0 and the
    remaining ``n - 1`` phases are searched on a uniform grid with ``grid``
    points each, followed by golden-section coordinate ascent around the best
    grid point (over all ``n`` phases, re-pinned afterwards).  ``lower`` is an achieved value; ``upper`` and
    ``lipschitz_upper`` are rigorous (up to rounding) upper bounds.
    """
    if grid < 8:
        raise ValueError("grid must be at least 8")
    norms = [op_norm(c) for c in b.coeffs]
    upper = float(sum(norms))
    if b.n == 1:
        val = norms[0]
        return MinNormResult(val, upper, val, np.zeros(1), grid, 0)

    phases = _grid_search(b, grid, threads)
    best = eval_at(b, phases)
    lipschitz_upper = best + (np.pi / grid) * float(sum(norms[1:]))
    step = 2 * np.pi / grid
    rounds = 0
    for _ in range(refine_iters):
        rounds += 1
        improved = False
        # theta_1 moves too: by global-phase invariance that is the joint
        # move of all other phases, which plain coordinates cannot make.
        for s in range(b.n):
            trial = phases.copy()

            def f(t, trial=trial, s=s):
                trial[s] = t
                return eval_at(b, trial)

            t, val = golden_max(f, phases[s] - step, phases[s] + step)
            # ignore rounding-level "gains"
            if val > best * (1 + 4 * np.finfo(float).eps):
                phases[s] = t
                best = val
                improved = True
        if not improved:
            break
    if phases[0] != 0.0:
        phases = np.mod(phases - phases[0], 2 * np.pi)
        best = eval_at(b, phases)
    return MinNormResult(best, upper, min(upper, lipschitz_upper), phases, grid, rounds)


def os_norm(
    s: GeneratorTuple, b: LevelElement, tol: float = 1e-10, method: str = "auto"
) -> float:
    """Level-k norm ``||sum_s S_s (x) B_s||`` of the structure induced by ``s``.

    ``method="auto"`` splits the operator into its permutation blocks before
    taking norms; ``"eig"`` and ``"power"`` go to :func:`op_norm` on the
    full matrix.
    """
    if s.n != b.n:
        raise DimensionError(f"{s.n} generators but {b.n} coefficient matrices")
    big = sum(np.kron(op, c) for op, c in zip(s.ops, b.coeffs))
    if method == "auto":
        # permutation-block structure first; dense solve per block
        return BlockNorm([big])(np.ones(1))
    return op_norm(big, tol=tol, method=method)


class BlockNorm:
    """Operator norm of ``sum_s a_s S_s`` using the joint block structure.

    Connected components of the union sparsity pattern of the ``S_s`` give a
    simultaneous block-diagonal form (up to permutation); the norm of any
    linear combination is the largest block norm.  Blocks of equal size are
    evaluated as one stack.
    """

    def __init__(self, ops: Sequence[np.ndarray]):
        self.ops = np.stack(ops)
        pattern = np.any(self.ops != 0, axis=0)
        ncomp, labels = connected_components(pattern | pattern.T, directed=False)
        self.dense = ncomp == 1
        groups: dict[int, list[np.ndarray]] = {}
        for c in range(ncomp):
            members = np.flatnonzero(labels == c)
            groups.setdefault(members.size, []).append(members)
        # per size: array (n, count, size, size) of the generators' blocks
        self.blocks = []
        for _, members in sorted(groups.items()):
            idx = np.stack(members)
            self.blocks.append(self.ops[:, idx[:, :, None], idx[:, None, :]])

    def __call__(self, a: np.ndarray) -> float:
        if self.dense:
            return op_norm(np.tensordot(a, self.ops, axes=1))
        return float(max(np.max(batch_op_norm(np.tensordot(a, blk, axes=1))) for blk in self.blocks))


def _coefficients(x: np.ndarray, n: int) -> np.ndarray:
    # x = (logits for masses 2..n, phases 2..n); mass 1 has logit 0, phase 0.
    logits = np.concatenate(([0.0], x[: n - 1]))
    logits -= logits.max()
    w = np.exp(logits)
    masses = w / w.sum()
    phases = np.concatenate(([0.0], x[n - 1:]))
    return masses * np.exp(1j * phases)


def isometry_defect(
    s: GeneratorTuple, starts: int = 32, seed: int = 0, maxiter: int = 4000
) -> Witness:
    """Minimize ``||sum_s a_s S_s||`` over the unit sphere of l1(n).

    Multistart Nelder-Mead over ``2n - 2`` reals (softmax masses, relative
    phases), each start restarted once from its own optimum.  The result is
    an achieved value, hence an upper bound on the true minimum.
    """
    n = s.n
    if n == 1:
        a = np.ones(1, dtype=np.complex128)
        return Witness(a, op_norm(s.apply(a)))
    norm = BlockNorm(s.ops)

    def g(x):
        return norm(_coefficients(x, n))

    rng = np.random.default_rng(seed)
    opts = {"xatol": 1e-11, "fatol": 1e-13, "maxiter": maxiter, "adaptive": n > 2}
    best_x, best_f = None, np.inf
    for _ in range(starts):
        x0 = np.concatenate((rng.normal(size=n - 1), rng.uniform(0, 2 * np.pi, n - 1)))
        res = minimize(g, x0, method="Nelder-Mead", options=opts)
        res = minimize(g, res.x, method="Nelder-Mead", options=opts)
        if res.fun < best_f:
            best_x, best_f = res.x, float(res.fun)
    a = _coefficients(best_x, n)
    a /= ell1_norm(a)
    return Witness(a, op_norm(s.apply(a)))

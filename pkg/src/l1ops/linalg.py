"""Dense complex linear algebra kernel.

Matrices are plain ``numpy`` arrays of dtype ``complex128``; :func:`as_matrix`
is the single validation point.  Everything here is a pure function of its
inputs.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

import numpy as np

HERMITIAN_TOL = 1e-12
PSD_CLAMP_TOL = 1e-12
CLUSTER_TOL = 1e-8
DENSE_EIG_MAX_DIM = 64
POWER_MAX_ITER = 10_000


class LinalgError(ValueError):
    """Invalid input to a kernel routine (shape, structure or finiteness)."""


class DimensionError(LinalgError):
    pass


class NonConvergenceError(ArithmeticError):
    def __init__(self, message: str, iterations: int):
        super().__init__(f"{message} (after {iterations} iterations)")
        self.iterations = iterations


def as_matrix(a: Any) -> np.ndarray:
    """Coerce ``a`` to a finite 2-D complex128 array (scalars become 1x1)."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise LinalgError("matrix has non-finite entries")
    return m


def adjoint(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def matmul(a: Any, b: Any) -> np.ndarray:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def kron(a: Any, b: Any) -> np.ndarray:
    """Kronecker product, block (i, j) equal to ``a[i, j] * b``."""
    return np.kron(as_matrix(a), as_matrix(b))


def direct_sum(*blocks: Any) -> np.ndarray:
    mats = [as_matrix(b) for b in blocks]
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = np.zeros((rows, cols), dtype=np.complex128)
    r = c = 0
    for m in mats:
        out[r:r + m.shape[0], c:c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


def is_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    scale = max(1.0, float(np.max(np.abs(h))))
    return h.shape[0] == h.shape[1] and float(np.max(np.abs(h - adjoint(h)))) <= tol * scale


def is_unitary(w: np.ndarray, tol: float = 1e-10) -> bool:
    w = as_matrix(w)
    if w.shape[0] != w.shape[1]:
        return False
    return float(np.linalg.norm(adjoint(w) @ w - np.eye(w.shape[0]))) <= tol


@dataclass(frozen=True)
class HermitianEig:
    eigenvalues: np.ndarray  # ascending
    eigenvectors: np.ndarray  # orthonormal columns

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ adjoint(v)


def herm_eig(h: Any) -> HermitianEig:
    h = as_matrix(h)
    if not is_hermitian(h):
        raise LinalgError("herm_eig requires a Hermitian matrix")
    # Symmetrize so rounding-level skew parts do not leak into LAPACK.
    w, v = np.linalg.eigh((h + adjoint(h)) / 2)
    return HermitianEig(eigenvalues=w, eigenvectors=v)


def psd_sqrt(p: Any, neg_tol: float = PSD_CLAMP_TOL) -> np.ndarray:
    """Positive square root of a positive semidefinite matrix.

    Eigenvalues in ``[-neg_tol, 0)`` are treated as zero; anything more
    negative is rejected.
    """
    eig = herm_eig(p)
    lam = eig.eigenvalues
    if lam.size and lam[0] < -neg_tol:
        raise LinalgError(f"matrix is not positive semidefinite (eigenvalue {lam[0]:.3e})")
    root = np.sqrt(np.clip(lam, 0.0, None))
    v = eig.eigenvectors
    s = (v * root) @ adjoint(v)
    return (s + adjoint(s)) / 2


def _gram(a: np.ndarray) -> np.ndarray:
    # The smaller Gram matrix has the same nonzero spectrum.
    return adjoint(a) @ a if a.shape[1] <= a.shape[0] else a @ adjoint(a)


def power_norm(
    a: Any, tol: float = 1e-10, seed: int = 0, max_iter: int = POWER_MAX_ITER
) -> tuple[float, int]:
    """Largest singular value by power iteration on ``A^H A``.

    Stops once the Gram residual ``||Mx - rho x||`` drops below ``tol * rho``.
    Returns ``(sigma_max, iterations)``; raises :class:`NonConvergenceError`
    at the iteration cap.
    """
    a = as_matrix(a)
    rng = np.random.default_rng(seed)
    n = a.shape[1]
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x /= np.linalg.norm(x)
    ah = adjoint(a)
    for it in range(1, max_iter + 1):
        y = ah @ (a @ x)
        rho = float(np.vdot(x, y).real)
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0, it
        if np.linalg.norm(y - rho * x) <= tol * rho:
            return float(np.sqrt(rho)), it
        x = y / ny
    raise NonConvergenceError("power iteration did not converge", max_iter)


def op_norm(
    a: Any,
    tol: float = 1e-10,
    method: str = "auto",
    seed: int = 0,
    max_iter: int = POWER_MAX_ITER,
    dense_max_dim: int = 1024,
) -> float:
    """Operator (spectral) norm, i.e. the largest singular value.

    ``method``:
      * ``"eig"``   -- Hermitian eigensolve of the smaller Gram matrix;
      * ``"power"`` -- :func:`power_norm`;
      * ``"auto"``  -- ``"eig"`` up to ``dense_max_dim``, power iteration above.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = as_matrix(a)
    dim = min(a.shape)
    if method == "auto":
        method = "eig" if dim <= dense_max_dim else "power"
    if method == "eig":
        if dim == 1:
            return float(np.linalg.norm(a))
        lam = np.linalg.eigvalsh(_gram(a))
        return float(np.sqrt(max(lam[-1], 0.0)))
    if method == "power":
        return power_norm(a, tol=tol, seed=seed, max_iter=max_iter)[0]
    raise ValueError(f"unknown method {method!r}")


def batch_op_norm(stack: np.ndarray) -> np.ndarray:
    """Operator norms of a stack of matrices with shape ``(..., k, k)``."""
    if stack.shape[-1] == 1 and stack.shape[-2] == 1:
        return np.abs(stack[..., 0, 0])
    if stack.shape[-1] == 2 and stack.shape[-2] == 2:
        # Closed form for 2x2: sigma_max^2 = (f + sqrt(f^2 - 4|det|^2)) / 2.
        f = np.sum(np.abs(stack) ** 2, axis=(-2, -1))
        det = stack[..., 0, 0] * stack[..., 1, 1] - stack[..., 0, 1] * stack[..., 1, 0]
        disc = np.sqrt(np.clip(f * f - 4 * np.abs(det) ** 2, 0.0, None))
        return np.sqrt((f + disc) / 2)
    return np.linalg.svd(stack, compute_uv=False)[..., 0]


@dataclass(frozen=True)
class UnitarySpectrum:
    phases: np.ndarray  # ascending, in [0, 2*pi)
    eigenvectors: np.ndarray

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.exp(1j * self.phases)

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ adjoint(v)


def _wrap_phase(theta: np.ndarray) -> np.ndarray:
    theta = np.mod(theta, 2 * np.pi)
    # tiny negative angles land just below 2*pi; fold them onto 0
    theta[theta >= 2 * np.pi - 1e-12] = 0.0
    return theta


def unitary_spectrum(w: Any, tol: float = 1e-10) -> UnitarySpectrum:
    """Eigenphases of a unitary matrix without a non-Hermitian eigensolver.

    ``W`` is normal, so its Hermitian parts ``H = (W + W^H)/2`` and
    ``K = (W - W^H)/(2i)`` commute.  Diagonalize ``H``, then diagonalize ``K``
    restricted to each (clustered) eigenspace of ``H``; the joint eigenvector
    basis diagonalizes ``W`` with eigenvalues ``h + i k``.
    """
    w = as_matrix(w)
    if not is_unitary(w, tol):
        raise LinalgError("unitary_spectrum requires a unitary matrix")
    n = w.shape[0]
    wh = adjoint(w)
    herm = (w + wh) / 2
    skew = (w - wh) / 2j
    eh = herm_eig(herm)
    lam, basis = eh.eigenvalues, eh.eigenvectors
    vecs = np.empty((n, n), dtype=np.complex128)
    re = np.empty(n)
    im = np.empty(n)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and lam[stop] - lam[stop - 1] <= CLUSTER_TOL:
            stop += 1
        q = basis[:, start:stop]
        sub = adjoint(q) @ skew @ q
        ek = herm_eig((sub + adjoint(sub)) / 2)
        vecs[:, start:stop] = q @ ek.eigenvectors
        re[start:stop] = np.mean(lam[start:stop])
        im[start:stop] = ek.eigenvalues
        start = stop
    # Rayleigh quotients on the joint basis are more accurate than (h, k) pairs.
    diag = np.einsum("ij,ij->j", vecs.conj(), w @ vecs)
    phases = _wrap_phase(np.angle(diag))
    order = np.argsort(phases, kind="stable")
    return UnitarySpectrum(phases=phases[order], eigenvectors=vecs[:, order])


# JSON matrix schema: {"rows", "cols", "data": [[re, im], ...] row-major}.
# json emits floats via repr, the shortest round-tripping decimal form.

def matrix_to_dict(a: Any) -> dict:
    a = as_matrix(a)
    flat = a.reshape(-1)
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in flat],
    }


def matrix_from_dict(obj: dict) -> np.ndarray:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
        entries = [complex(float(re), float(im)) for re, im in data]
    except (KeyError, TypeError, ValueError) as exc:
        raise LinalgError(f"malformed matrix object: {exc}") from exc
    if rows < 1 or cols < 1 or len(entries) != rows * cols:
        raise DimensionError(f"matrix data has {len(entries)} entries, expected {rows}x{cols}")
    return as_matrix(np.array(entries, dtype=np.complex128).reshape(rows, cols))


def matrix_to_json(a: Any) -> str:
    return json.dumps(matrix_to_dict(a))


def matrix_from_json(text: str) -> np.ndarray:
    return matrix_from_dict(json.loads(text))

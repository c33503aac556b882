"""Certificates that a pair (or tuple) of matrix contractions does not
induce an isometric embedding of l1(2) (resp. l1(n)).

Pipeline for a pair ``(T1, T2)`` of ``k x k`` contractions:

1. dilate each ``T_i`` to a ``2k x 2k`` unitary ``U_i`` (Halmos block);
   compressing ``a1 U1 + a2 U2`` to the first ``k`` coordinates gives back
   ``a1 T1 + a2 T2``, so its norm can only drop;
2. ``||a1 U1 + a2 U2|| = ||a1 I + a2 W||`` with ``W = U1^H U2`` unitary;
3. ``W`` is normal with eigenphases ``theta_j``, hence
   ``||a1 I + a2 W|| = max_j |a1 + exp(i theta_j) a2|``;
4. a coefficient pair whose relative phase avoids every ``-theta_j`` makes
   that maximum strictly less than ``|a1| + |a2|``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constructions import halmos_dilation
from .linalg import DimensionError, LinalgError, as_matrix, adjoint, op_norm, unitary_spectrum
from .opspace import GeneratorTuple, Witness

DEDUP_TOL = 1e-9
TWO_PI = 2 * np.pi


def _distinct_phases(phases) -> np.ndarray:
    p = np.sort(np.mod(np.asarray(phases, dtype=float), TWO_PI))
    if p.size == 0:
        raise ValueError("need at least one phase")
    keep = [p[0]]
    for x in p[1:]:
        if x - keep[-1] > DEDUP_TOL:
            keep.append(x)
    # wrap-around duplicate of the first phase
    if len(keep) > 1 and keep[0] + TWO_PI - keep[-1] <= DEDUP_TOL:
        keep.pop()
    return np.array(keep)


def largest_gap_midpoint(points) -> float:
    """Point of the circle farthest (in arc length) from ``points``.

    Ties between equal gaps go to the first gap in ascending order.
    """
    p = _distinct_phases(points)
    gaps = np.diff(np.concatenate((p, [p[0] + TWO_PI])))
    j = int(np.argmax(gaps))
    return float(np.mod(p[j] + gaps[j] / 2, TWO_PI))


def pair_value(a: np.ndarray, phases) -> float:
    """``max_j |a1 + exp(i theta_j) a2|``: the norm of ``a1 I + a2 diag(e^{i theta})``."""
    z = np.exp(1j * np.asarray(phases, dtype=float))
    return float(np.max(np.abs(a[0] + z * a[1])))


def lemma_witness(phases) -> tuple[Witness, float]:
    """Equal-mass witness ``a = (1/2, e^{i delta}/2)`` for a finite phase set.

    ``delta`` is the midpoint of the largest gap of ``{-theta_j}``, so every
    ``theta_j + delta`` stays at least half that gap away from 0 and the
    achieved value ``max_j |cos((theta_j + delta)/2)|`` is below 1.
    Returns ``(witness, delta)``.
    """
    theta = _distinct_phases(phases)
    delta = largest_gap_midpoint(-theta)
    a = np.array([0.5, 0.5 * np.exp(1j * delta)])
    return Witness(a, pair_value(a, theta)), delta


@dataclass(frozen=True)
class Certificate:
    witness: Witness
    eigenphases: np.ndarray
    offset: float   # arg(a2) - arg(a1)
    dilation_dim: int
    recomputed_norm: float  # ||a1 T1 + a2 T2|| on the original pair

    @property
    def margin(self) -> float:
        return self.witness.margin

    def to_dict(self) -> dict:
        return {
            "witness": self.witness.to_dict(),
            "eigenphases": [float(x) for x in self.eigenphases],
            "offset": float(self.offset),
            "dilation_dim": int(self.dilation_dim),
            "recomputed_norm": float(self.recomputed_norm),
        }


def no_embedding_certificate(t1, t2, tol: float = 1e-10) -> Certificate:
    t1, t2 = as_matrix(t1), as_matrix(t2)
    if t1.shape != t2.shape or t1.shape[0] != t1.shape[1]:
        raise DimensionError("need two square matrices of the same size")
    for t in (t1, t2):
        if op_norm(t) > 1 + tol:
            raise LinalgError("inputs must be contractions")
    u1 = halmos_dilation(t1, tol)
    u2 = halmos_dilation(t2, tol)
    # ||a1 U1 + a2 U2|| = ||U1^H (a1 U1 + a2 U2)|| = ||a1 I + a2 W||
    w = adjoint(u1) @ u2
    spec = unitary_spectrum(w, tol=max(tol, 1e-9))
    witness, delta = lemma_witness(spec.phases)
    recomputed = op_norm(witness.vector[0] * t1 + witness.vector[1] * t2)
    return Certificate(witness, spec.phases, delta, u1.shape[0], recomputed)


def certify_tuple(s: GeneratorTuple, pair: tuple[int, int] = (1, 2)) -> Certificate:
    """Certificate for the coordinate plane ``pair`` (1-based indices).

    An isometry of l1(n) restricts to an isometry of every coordinate plane,
    so a positive margin for one pair rules out the whole tuple.
    """
    i, j = pair
    if not (1 <= i <= s.n and 1 <= j <= s.n) or i == j:
        raise ValueError(f"invalid pair {pair} for a {s.n}-tuple")
    return no_embedding_certificate(s.ops[i - 1], s.ops[j - 1], s.contraction_tol)

import numpy as np
import pytest

from l1ops.constructions import (
    ampliation,
    ampliation_exactness,
    halmos_dilation,
    parrott_blocks,
    parrott_generators,
    parrott_triple,
    roots_of_unity_diag,
)
from l1ops.linalg import DimensionError, LinalgError, direct_sum, op_norm, unitary_spectrum
from l1ops.opspace import LevelElement, ell1_norm, eval_at, isometry_defect, os_norm

from conftest import random_complex, random_contraction, random_unitary

S3 = np.sqrt(3)
I2, U, V = parrott_triple().ops


def unitarity_residual(u):
    return np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]))


class TestHalmos:
    def test_zero(self):
        assert np.array_equal(halmos_dilation([[0]]), np.array([[0, 1], [1, 0]]))

    def test_half_is_parrott_u(self):
        u = halmos_dilation([[0.5]])
        assert np.max(np.abs(u - U)) <= 1e-15
        assert np.max(np.abs(u - np.array([[0.5, S3 / 2], [S3 / 2, -0.5]]))) <= 1e-15

    def test_unitary_input(self, rng):
        w = random_unitary(rng, 3)
        u = halmos_dilation(w)
        expected = direct_sum(w, -w.conj().T)
        assert np.max(np.abs(u - expected)) <= 1e-14

    def test_rejects_expansion(self):
        with pytest.raises(LinalgError):
            halmos_dilation([[1.1]])

    def test_compression(self, rng):
        for _ in range(30):
            k = int(rng.integers(1, 9))
            t = random_contraction(rng, k, exact_norm_one=bool(rng.integers(2)))
            u = halmos_dilation(t)
            assert np.array_equal(u[:k, :k], t)
            assert unitarity_residual(u) <= 1e-10

    def test_dilated_sums_dominate(self, rng):
        t1, t2 = random_contraction(rng, 3), random_contraction(rng, 3)
        u1, u2 = halmos_dilation(t1), halmos_dilation(t2)
        for _ in range(10):
            a = random_complex(rng, 2)
            assert np.allclose((a[0] * u1 + a[1] * u2)[:3, :3], a[0] * t1 + a[1] * t2)
            assert op_norm(a[0] * t1 + a[1] * t2) <= op_norm(a[0] * u1 + a[1] * u2) + 1e-12


class TestAmpliation:
    def test_single(self, rng):
        a = random_complex(rng, 3, 3)
        assert np.array_equal(ampliation([a]).ops[0], a)

    def test_sign_diagonals(self):
        z = np.diag([1, -1])
        ops = ampliation([z, z]).ops
        assert np.array_equal(ops[0], np.diag([1, 1, -1, -1]))
        assert np.array_equal(ops[1], np.diag([1, -1, 1, -1]))

    def test_cumulative(self, rng):
        a, b = random_complex(rng, 2, 2), random_complex(rng, 3, 3)
        ops = ampliation([a, b], "cumulative").ops
        assert np.array_equal(ops[0], np.kron(a, np.eye(3)))
        assert np.array_equal(ops[1], np.kron(a, b))

    def test_slot_order(self, rng):
        a, b, c = (random_complex(rng, d, d) for d in (2, 3, 2))
        ops = ampliation([a, b, c]).ops
        assert np.array_equal(ops[1], np.kron(np.kron(np.eye(2), b), np.eye(2)))

    def test_exact_commutation(self, rng):
        fs = [random_complex(rng, d, d) for d in (2, 3, 2)]
        ops = ampliation(fs).ops
        for i in range(3):
            for j in range(i + 1, 3):
                assert np.count_nonzero(ops[i] @ ops[j] - ops[j] @ ops[i]) == 0

    def test_guards(self):
        with pytest.raises(DimensionError):
            ampliation([np.eye(17)] * 3)
        with pytest.raises(ValueError):
            ampliation([np.eye(1)] * 5)
        with pytest.raises(ValueError):
            ampliation([np.eye(2)], "mixed")


class TestRootsOfUnity:
    def test_two(self):
        assert np.array_equal(roots_of_unity_diag(2), np.diag([1, -1]))

    def test_four(self):
        assert np.array_equal(roots_of_unity_diag(4), np.diag([1, 1j, -1, -1j]))

    def test_spectral_mesh(self):
        theta = unitary_spectrum(roots_of_unity_diag(8)).phases
        assert np.allclose(theta, 2 * np.pi * np.arange(8) / 8, atol=1e-14)
        pts = np.linspace(0, 2 * np.pi, 2001)
        gap = np.max([np.min(np.abs(np.angle(np.exp(1j * (p - theta))))) for p in pts])
        assert gap <= np.pi / 8 + 1e-12


class TestParrott:
    def test_unitaries(self):
        for op in parrott_triple().ops:
            assert op_norm(op) == pytest.approx(1, abs=1e-15)
            assert unitarity_residual(op) <= 1e-15

    def test_tensor_witness(self):
        assert op_norm(np.kron(I2, I2) + np.kron(U, U) + np.kron(V, V)) == pytest.approx(3, abs=1e-9)

    @pytest.mark.parametrize("m", [2, 3, 4, 5, 6])
    def test_generators(self, m):
        s = parrott_generators(m)
        assert s.dim == (m + 2) ** 3 + 2
        for op in s.ops:
            assert unitarity_residual(op) <= 1e-12
        assert os_norm(s, LevelElement(parrott_triple().ops)) >= 3 - 1e-9

    def test_generator_layout(self):
        s = parrott_generators(2)
        blocks = parrott_blocks(2)
        for op, hat, c in zip(s.ops, blocks.ops, parrott_triple().ops):
            assert np.array_equal(op[:64, :64], hat)
            assert np.array_equal(op[64:, 64:], c)
        assert np.array_equal(blocks.factors[1], direct_sum(U, roots_of_unity_diag(2)))

    def test_range(self):
        with pytest.raises(ValueError):
            parrott_generators(7)

    def test_defect_bound(self):
        m = 4
        w = isometry_defect(parrott_generators(m), starts=2, seed=0)
        assert np.cos(np.pi / m) - 1e-6 <= w.achieved <= 1 + 1e-12

    @pytest.mark.parametrize("mode", ["independent", "cumulative"])
    def test_truncated_isometry_bounds(self, rng, mode):
        d = roots_of_unity_diag(5)
        ops = np.stack(ampliation([d, d, d], mode).ops)
        for _ in range(20):
            a = random_complex(rng, 3)
            val = op_norm(np.tensordot(a, ops, axes=1))
            assert np.cos(np.pi / 5) * ell1_norm(a) - 1e-9 <= val <= ell1_norm(a) + 1e-9


class TestAmpliationExactness:
    def test_trivial(self, rng):
        b = LevelElement((random_complex(rng, 2, 2),))
        lhs, rhs = ampliation_exactness([np.eye(1)], b)
        assert lhs == pytest.approx(op_norm(b.coeffs[0])) and rhs == pytest.approx(lhs)

    def test_aligned(self):
        d2 = roots_of_unity_diag(2)
        lhs, rhs = ampliation_exactness([d2, d2], LevelElement((I2, I2)))
        assert lhs == pytest.approx(2, abs=1e-12) and rhs == pytest.approx(2, abs=1e-12)

    def test_parrott_grid(self):
        d8 = roots_of_unity_diag(8)
        b = LevelElement(parrott_triple().ops)
        lhs, rhs = ampliation_exactness([d8] * 3, b)
        lam = 2 * np.pi * np.arange(8) / 8
        brute = max(eval_at(b, [x, y, z]) for x in lam for y in lam for z in lam)
        assert abs(lhs - brute) <= 1e-9 and abs(rhs - brute) <= 1e-9

    def test_dense_route(self, rng):
        factors = [np.diag(np.exp(1j * rng.uniform(0, 2 * np.pi, 3))) for _ in range(2)]
        b = LevelElement(tuple(random_complex(rng, 2, 2) for _ in range(2)))
        lhs, rhs = ampliation_exactness(factors, b)
        big = sum(np.kron(f, c) for f, c in zip(ampliation(factors).ops, b.coeffs))
        assert np.linalg.svd(big, compute_uv=False)[0] == pytest.approx(lhs, rel=1e-12)
        assert lhs == pytest.approx(rhs, abs=1e-9)

    def test_rejects_non_diagonal(self, rng):
        with pytest.raises(LinalgError):
            ampliation_exactness([random_unitary(rng, 2)], LevelElement((I2,)))
        with pytest.raises(LinalgError):
            ampliation_exactness([np.diag([1, 0.5])], LevelElement((I2,)))

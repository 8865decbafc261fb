import numpy as np
import pytest
from hypothesis import given, strategies as st

from renyicont import operators as ops
from renyicont.errors import ValidationError
from renyicont.states import random_density, random_psd, random_unitary

from oracles import partial_trace_loops

X = np.array([[0, 1], [1, 0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def rand_herm(n, rng):
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (g + g.conj().T) / 2


seeds = st.integers(0, 2**32 - 1)
dims = st.integers(2, 6)


def gen(seed):
    return np.random.Generator(np.random.Philox(seed))


class TestEig:
    def test_identity(self):
        w, u = ops.eig_hermitian(np.eye(2))
        assert np.allclose(w, [1, 1])
        assert np.allclose(u.conj().T @ u, np.eye(2), atol=1e-9)

    def test_diag(self):
        w, _ = ops.eig_hermitian(np.diag([3.0, 1.0]))
        assert np.allclose(w, [1, 3])

    def test_pauli_x(self):
        w, _ = ops.eig_hermitian(X)
        assert np.allclose(w, [-1, 1])

    @given(seeds, dims)
    def test_reconstruction(self, seed, n):
        h = rand_herm(n, gen(seed))
        w, u = ops.eig_hermitian(h)
        assert np.all(np.diff(w) >= 0)
        assert np.allclose((u * w) @ u.conj().T, h, atol=1e-9)
        assert np.allclose(u.conj().T @ u, np.eye(n), atol=1e-9)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValidationError):
            ops.eig_hermitian(np.array([[0, 1], [0, 0]]))

    def test_rejects_non_square_and_nan(self):
        with pytest.raises(ValidationError):
            ops.as_hermitian(np.zeros((2, 3)))
        with pytest.raises(ValidationError):
            ops.as_hermitian(np.array([[np.nan, 0], [0, 1]]))

    def test_symmetrizes_small_asymmetry(self):
        h = np.array([[1, 1e-12], [0, 1]], dtype=complex)
        out = ops.as_hermitian(h)
        assert np.array_equal(out, out.conj().T)


class TestMatrixPower:
    def test_examples(self):
        assert np.allclose(ops.matrix_power(np.eye(2) / 2, 2), np.eye(2) / 4)
        assert np.allclose(ops.matrix_power(np.diag([4.0, 0.0]), -0.5), np.diag([0.5, 0.0]))
        assert np.allclose(ops.matrix_power(np.diag([9.0, 4.0]), 0.5), np.diag([3.0, 2.0]))

    @given(seeds, dims, st.floats(-2, 2), st.floats(-2, 2))
    def test_composition_full_rank(self, seed, n, a, b):
        rng = gen(seed)
        p = random_psd(n, rng) + 0.1 * np.eye(n)
        lhs = ops.matrix_power(ops.matrix_power(p, a), b)
        rhs = ops.matrix_power(p, a * b)
        assert np.allclose(lhs, rhs, atol=1e-8 * max(1.0, np.abs(rhs).max()))

    def test_rejects_non_psd_and_nonfinite(self):
        with pytest.raises(ValidationError):
            ops.matrix_power(np.diag([1.0, -0.5]), 0.5)
        with pytest.raises(ValidationError):
            ops.matrix_power(np.eye(2), np.inf)

    def test_kernel_maps_to_zero_for_negative_exponent(self):
        u = random_unitary(3, gen(3))
        p = u @ np.diag([2.0, 1e-14, 0.0]) @ u.conj().T
        out = ops.matrix_power(p, -1.0)
        w = np.linalg.eigvalsh(out)
        assert np.allclose(np.sort(w), [0.0, 0.0, 0.5], atol=1e-9)


class TestTensorPartialTrace:
    def test_examples(self):
        assert np.allclose(ops.tensor(np.eye(2), np.eye(2)), np.eye(4))
        assert np.allclose(ops.tensor(np.diag([1, 0]), np.diag([0, 1])), np.diag([0, 1, 0, 0]))
        assert np.allclose(ops.tensor(Z, Z), np.diag([1, -1, -1, 1]))

    def test_max_dim(self):
        with pytest.raises(ValidationError):
            ops.tensor(np.eye(64), np.eye(65))

    def test_bell_marginal(self):
        v = np.array([1, 0, 0, 1]) / np.sqrt(2)
        bell = np.outer(v, v)
        assert np.allclose(ops.partial_trace(bell, (2, 2), "B"), np.eye(2) / 2)
        assert np.allclose(ops.partial_trace(np.eye(4) / 4, (2, 2), "A"), np.eye(2) / 2)

    @given(seeds, st.integers(1, 4), st.integers(1, 4))
    def test_product_and_loops(self, seed, d_a, d_b):
        rng = gen(seed)
        a, b = rand_herm(d_a, rng), rand_herm(d_b, rng)
        ab = ops.tensor(a, b)
        assert np.allclose(ops.partial_trace(ab, (d_a, d_b), "A"), a * np.trace(b), atol=1e-10)
        m = rand_herm(d_a * d_b, rng)
        for keep in "AB":
            ref = partial_trace_loops(m, d_a, d_b, keep)
            out = ops.partial_trace(m, (d_a, d_b), keep)
            assert np.allclose(out, ref, atol=1e-12)
            assert abs(np.trace(out) - np.trace(m)) < 1e-10

    def test_tripartite_and_index_convention(self):
        rng = gen(7)
        a, b, c = (random_density(d, rng) for d in (2, 3, 2))
        abc = np.kron(np.kron(a, b), c)
        assert np.allclose(ops.partial_trace(abc, (2, 3, 2), (0, 2)), np.kron(a, c))
        assert np.allclose(ops.partial_trace(abc, (2, 3, 2), 1), b)
        # |a=1, b=0> sits at index 1 * d_B + 0
        e = np.zeros(6)
        e[3] = 1
        m = np.outer(e, e)
        assert np.allclose(ops.partial_trace(m, (2, 3), "A"), np.diag([0, 1]))
        assert np.allclose(ops.partial_trace(m, (2, 3), "B"), np.diag([1, 0, 0]))

    def test_dims_mismatch(self):
        with pytest.raises(ValidationError):
            ops.partial_trace(np.eye(4), (2, 3), "A")
        with pytest.raises(ValidationError):
            ops.partial_trace(np.eye(4), (2, 2), "Q")


class TestDistances:
    def test_trace_distance_examples(self):
        r = random_density(3, gen(1))
        assert ops.trace_distance(r, r) == pytest.approx(0, abs=1e-15)
        assert ops.trace_distance(np.diag([1, 0]), np.diag([0, 1])) == pytest.approx(1)
        assert ops.trace_distance(np.diag([0.75, 0.25]), np.eye(2) / 2) == pytest.approx(0.25)
        with pytest.raises(ValidationError):
            ops.trace_distance(np.eye(2), np.eye(3))

    @given(seeds, dims)
    def test_triangle_and_unitary_invariance(self, seed, n):
        rng = gen(seed)
        a, b, c = (random_density(n, rng) for _ in range(3))
        u = random_unitary(n, rng)
        assert ops.trace_distance(a, c) <= ops.trace_distance(a, b) + ops.trace_distance(b, c) + 1e-9
        assert ops.trace_distance(a, b) == pytest.approx(ops.trace_distance(b, a), abs=1e-12)
        uu = lambda m: u @ m @ u.conj().T
        assert abs(ops.trace_distance(uu(a), uu(b)) - ops.trace_distance(a, b)) < 1e-9

    def test_fidelity_examples(self):
        r = random_density(3, gen(2))
        assert ops.fidelity(r, r) == pytest.approx(1, abs=1e-9)
        assert ops.fidelity(np.diag([1, 0]), np.diag([0, 1])) == pytest.approx(0, abs=1e-12)
        assert ops.fidelity(np.diag([1, 0]), np.eye(2) / 2) == pytest.approx(1 / np.sqrt(2), abs=1e-12)
        assert ops.fidelity(2 * r, 2 * r) == pytest.approx(2.0, abs=1e-9)
        with pytest.raises(ValidationError):
            ops.fidelity(np.diag([1.0, -0.1]), np.eye(2))

    @given(seeds, dims)
    def test_fuchs_van_de_graaf(self, seed, n):
        rng = gen(seed)
        r, s = random_density(n, rng), random_density(n, rng)
        f = ops.fidelity(r, s)
        t = ops.trace_distance(r, s)
        assert 1 - f <= t + 1e-9
        assert t <= np.sqrt(max(0.0, 1 - f * f)) + 1e-8


class TestJordan:
    def test_examples(self):
        p, n = ops.jordan_decomposition(np.diag([1.0, -1.0]))
        assert np.allclose(p, np.diag([1, 0])) and np.allclose(n, np.diag([0, 1]))
        p, n = ops.jordan_decomposition(np.zeros((2, 2)))
        assert np.allclose(p, 0) and np.allclose(n, 0)
        p, n = ops.jordan_decomposition(np.diag([0.3, -0.1, -0.2]))
        assert np.allclose(p, np.diag([0.3, 0, 0])) and np.allclose(n, np.diag([0, 0.1, 0.2]))

    @given(seeds, dims)
    def test_orthogonal_parts(self, seed, n):
        rng = gen(seed)
        r, s = random_density(n, rng), random_density(n, rng)
        p, m = ops.jordan_decomposition(r - s)
        assert np.allclose(p - m, r - s, atol=1e-12)
        assert abs(np.trace(p @ m)) <= 1e-9
        assert np.allclose(p @ m, 0, atol=1e-9)
        eps = ops.trace_distance(r, s)
        assert np.trace(p).real == pytest.approx(eps, abs=1e-10)
        assert np.trace(m).real == pytest.approx(eps, abs=1e-10)


class TestPurification:
    def test_pure_input(self):
        v = np.array([0.6, 0.8j])
        pur = ops.purify(np.outer(v, v.conj()))
        assert pur.d_C == 1
        assert np.allclose(pur.reduced(), np.outer(v, v.conj()))

    def test_maximally_mixed(self):
        pur = ops.purify(np.eye(2) / 2)
        assert pur.d_C == 2
        # the purification of I/2 is maximally entangled: both marginals are I/2
        assert np.allclose(pur.reduced(), np.eye(2) / 2)
        assert np.allclose(pur.complement(), np.eye(2) / 2)

    def test_diag(self):
        pur = ops.purify(np.diag([0.9, 0.1]))
        sv = np.linalg.svd(pur.matrix, compute_uv=False)
        assert np.allclose(sv, [np.sqrt(0.9), np.sqrt(0.1)])

    @given(seeds, dims, st.integers(1, 6))
    def test_marginal(self, seed, n, k):
        rng = gen(seed)
        rho = random_density(n, rng, "rank-limited", min(k, n))
        pur = ops.purify(rho)
        assert abs(np.linalg.norm(pur.vector) - 1) < 1e-10
        assert pur.d_C == np.linalg.matrix_rank(rho, tol=1e-10)
        assert ops.trace_distance(pur.reduced(), rho) < 1e-8

    def test_close_purifications_examples(self):
        r = random_density(2, gen(4))
        a, b = ops.close_purifications(r, r)
        assert abs(ops.overlap(a, b) - 1) < 1e-9
        a, b = ops.close_purifications(np.diag([1.0, 0]), np.diag([0, 1.0]))
        assert abs(ops.overlap(a, b)) < 1e-12

    @given(seeds, dims)
    def test_uhlmann_overlap(self, seed, n):
        rng = gen(seed)
        r, s = random_density(n, rng), random_density(n, rng)
        a, b = ops.close_purifications(r, s)
        assert a.d_C == b.d_C == n
        ov = ops.overlap(a, b)
        assert abs(ov.imag) < 1e-9
        assert abs(ov.real - ops.fidelity(r, s)) < 1e-8
        assert ops.trace_distance(a.reduced(), r) < 1e-8
        assert ops.trace_distance(b.reduced(), s) < 1e-8

    def test_purified_distance_budget(self):
        rng = gen(11)
        r = random_density(2, rng)
        tau = random_density(2, rng)
        t = 0.1 / ops.trace_distance(r, tau)
        s = (1 - t) * r + t * tau
        eps = ops.trace_distance(r, s)
        a, b = ops.close_purifications(r, s)
        d_pure = ops.trace_distance(a.projector(), b.projector())
        assert d_pure <= np.sqrt(2 * eps) + 1e-12
        assert d_pure <= np.sqrt(0.2) + 1e-12

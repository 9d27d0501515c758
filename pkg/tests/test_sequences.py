import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import crandn
from quasiframes.errors import UsageError
from quasiframes.gallery import HermiteGrid, make_counterexample
from quasiframes.linalg import HilbertGrid, LinearMap
from quasiframes.sequences import (
    SubspaceBasis,
    VectorFamily,
    analysis,
    bessel_bound,
    biorthogonality_defect,
    excess,
    frame_bounds,
    frame_operator,
    is_riesz,
    mixed_gram,
    partial_sum_trace,
    rank,
    strong_residuals,
    weak_residual,
)


def test_frame_bounds_of_repeated_member():
    F = VectorFamily(np.array([[1, 1, 0], [0, 0, 1]]), HilbertGrid.unit(2))
    fb = frame_bounds(F)
    assert (fb.lower, fb.upper) == pytest.approx((1.0, 2.0))
    assert bessel_bound(F) == pytest.approx(2.0)
    assert excess(F) == 1


def test_frame_bounds_match_frame_operator_spectrum(weighted_space, rng):
    F = VectorFamily(crandn(rng, 12, 20), weighted_space)
    S = frame_operator(F)
    s = weighted_space.sqrt_weights
    ev = np.linalg.eigvalsh(S.symmetrized())
    fb = frame_bounds(F)
    assert fb.lower == pytest.approx(ev[0], rel=1e-9)
    assert fb.upper == pytest.approx(ev[-1], rel=1e-9)
    assert np.allclose(S.symmetrized(), (s[:, None] * S.matrix) / s[None, :])


@pytest.mark.parametrize("N, expected", [(8, 3.879385), (64, 3.997664)])
def test_bessel_bound_of_adjacent_sums(N, expected):
    # chi_n = e_n + e_{n+1}: bound 2 + 2 cos(pi/(N+1)), increasing to 4
    M = np.zeros((N + 1, N))
    M[np.arange(N), np.arange(N)] = 1
    M[np.arange(1, N + 1), np.arange(N)] = 1
    b = bessel_bound(VectorFamily(M, HilbertGrid.unit(N + 1)))
    assert b == pytest.approx(2 + 2 * np.cos(np.pi / (N + 1)), rel=1e-12)
    assert b == pytest.approx(expected, abs=1e-6)
    assert b <= 4


def test_excess_of_counterexample_prefix():
    phi, _ = make_counterexample(3)
    assert rank(phi) == 3
    assert excess(phi) == 6


def test_weighted_family_riesz_bounds():
    g = HermiteGrid(24)
    rho = 2 + np.sin(g.nodes)
    F = VectorFamily(rho[:, None] * g.U, g.space)
    ok, fb = is_riesz(F)
    assert ok
    assert fb.lower >= 1 - 1e-12 and fb.upper <= 9 + 1e-12


def test_repeated_family_is_not_riesz():
    F = VectorFamily(np.array([[1, 1], [0, 0], [0, 0]]), HilbertGrid.unit(3))
    ok, fb = is_riesz(F)
    assert not ok and fb.lower == pytest.approx(0, abs=1e-14)


def test_biorthogonal_pair_reconstructs(rng):
    sp = HilbertGrid.unit(9)
    G = np.eye(9) + 0.2 * crandn(rng, 9, 9) / 6
    F = VectorFamily(G, sp)
    Fd = VectorFamily(np.linalg.inv(G).conj().T, sp)
    assert biorthogonality_defect(F, Fd) <= 1e-12
    tests = [sp.vector(crandn(rng, 9)) for _ in range(5)]
    assert max(strong_residuals(F, Fd, tests)) <= 1e-12
    assert max(strong_residuals(Fd, F, tests)) <= 1e-12
    assert weak_residual(F, Fd, tests[0], tests[1]) <= 1e-12


def test_mixed_gram_entries(weighted_space, rng):
    A, B = crandn(rng, 12, 3), crandn(rng, 12, 4)
    M = mixed_gram(VectorFamily(A, weighted_space), VectorFamily(B, weighted_space))
    assert M[1, 2] == pytest.approx(np.sum(weighted_space.weights * A[:, 1].conj() * B[:, 2]))


def test_analysis_accepts_vector_and_block(weighted_space, rng):
    F = VectorFamily(crandn(rng, 12, 5), weighted_space)
    V = crandn(rng, 12, 3)
    block = analysis(F, V)
    assert block.shape == (5, 3)
    assert np.allclose(analysis(F, weighted_space.vector(V[:, 1])), block[:, 1])


def test_counterexample_traces():
    phi, tilde = make_counterexample(3)
    sp = phi.space
    fwd = partial_sum_trace(phi, tilde, sp.vector([1, 1, 0]))
    assert fwd[-1] <= 1e-12
    rev = partial_sum_trace(tilde, phi, sp.basis_vector(0))
    hits = np.flatnonzero(np.isclose(rev, 1.0, atol=1e-12)) + 1
    assert {5, 8} <= set(hits.tolist())


def test_partner_checks():
    a = VectorFamily(np.eye(3), HilbertGrid.unit(3))
    b = VectorFamily(np.eye(3)[:, :2], HilbertGrid.unit(3))
    with pytest.raises(UsageError):
        mixed_gram(a, VectorFamily(np.eye(2), HilbertGrid.unit(2)))
    with pytest.raises(UsageError):
        biorthogonality_defect(a, b)


def test_subspace_basis(weighted_space, rng):
    B = crandn(rng, 12, 3)
    D = SubspaceBasis(B, weighted_space)
    P = D.projector()
    assert np.allclose(P.matrix @ P.matrix, P.matrix, atol=1e-12)
    assert np.allclose(P.adjoint().matrix, P.matrix, atol=1e-12)
    assert D.contains(weighted_space.vector(B @ np.array([1, 2j, -1])))
    assert not D.is_full and SubspaceBasis.full(weighted_space).is_full
    with pytest.raises(UsageError):
        SubspaceBasis(np.column_stack([B[:, 0], 2 * B[:, 0]]), weighted_space)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 6), extra=st.integers(0, 5))
def test_excess_plus_rank_is_length(seed, n, extra):
    rng = np.random.default_rng(seed)
    F = VectorFamily(crandn(rng, n, n + extra), HilbertGrid.unit(n))
    assert rank(F) + excess(F) == len(F)
    assert excess(F) == extra


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), c=st.complex_numbers(min_magnitude=0.1, max_magnitude=10))
def test_frame_bounds_scale_quadratically(seed, c):
    rng = np.random.default_rng(seed)
    F = VectorFamily(crandn(rng, 4, 7), HilbertGrid(rng.uniform(0.5, 2, 4)))
    a, b = frame_bounds(F), frame_bounds(c * F)
    assert b.upper == pytest.approx(abs(c) ** 2 * a.upper, rel=1e-9)
    assert b.lower == pytest.approx(abs(c) ** 2 * a.lower, rel=1e-7, abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_mapped_family_bessel_bound(seed):
    rng = np.random.default_rng(seed)
    sp = HilbertGrid.unit(5)
    F = VectorFamily(crandn(rng, 5, 8), sp)
    T = LinearMap(crandn(rng, 5, 5), sp)
    from quasiframes.linalg import operator_norm

    assert bessel_bound(F.mapped(T)) <= operator_norm(T) ** 2 * bessel_bound(F) * (1 + 1e-10)

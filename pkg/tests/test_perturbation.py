import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import crandn
from quasiframes.errors import (
    ContractionFailure,
    ExtensionMismatch,
    HypothesisViolated,
    KernelMismatch,
    UsageError,
)
from quasiframes.gallery import (
    HermiteGrid,
    make_christensen,
    make_lower_semiframe,
    make_rank_one_abstract,
    make_shifted_oscillator,
    make_weighted_onb,
)
from quasiframes.linalg import HilbertGrid, LinearMap
from quasiframes.perturbation import (
    ConditionId,
    PerturbationCertificate,
    assemble_q,
    build_duals_strong,
    build_duals_subspace,
    build_duals_weak,
    certify_strong,
    check_C25,
    check_C28,
    check_C210,
    check_L12,
    check_L13,
    excess_transport,
    predicted_bounds,
    random_tests,
    scan_lambda,
)
from quasiframes.sequences import (
    SubspaceBasis,
    VectorFamily,
    excess,
    frame_bounds,
    is_riesz,
    mixed_gram,
    strong_residuals,
)


def onb(n):
    return VectorFamily(np.eye(n, dtype=complex), HilbertGrid.unit(n), "e")


# -- closed-form bounds ------------------------------------------------------


@pytest.mark.parametrize(
    "A, B, value, mode, lo, hi",
    [
        (1.0, 2.0, 0.25, "L12", 0.25, 2 * (1 + math.sqrt(0.125)) ** 2),
        (1.0, 4.0, 0.5, "L13", 0.25, 9.0),
        (1.0, 1.0, 0.4, "L13", 0.36, 1.96),
    ],
)
def test_predicted_bounds(A, B, value, mode, lo, hi):
    fb = predicted_bounds(A, B, value, mode)
    assert (fb.lower, fb.upper) == pytest.approx((lo, hi), rel=1e-14)


def test_predicted_bounds_numeric_value():
    assert predicted_bounds(1, 2, 0.25).upper == pytest.approx(3.66421, abs=1e-5)


@pytest.mark.parametrize("args", [(1, 2, 1.5, "L12"), (1, 2, 1.0, "L13"), (0, 1, 0.1, "L12"), (2, 1, 0.1, "L12")])
def test_predicted_bounds_outside_hypotheses(args):
    with pytest.raises(HypothesisViolated):
        predicted_bounds(*args)


# -- frame / Riesz perturbation ----------------------------------------------


def test_L12_cyclic_shift():
    xi = onb(16)
    phi = VectorFamily(np.eye(16) + 0.3 * np.roll(np.eye(16), 1, axis=0), xi.space)
    cert = check_L12(xi, phi)
    assert cert.verdict
    assert cert.constants["Bprime"] == pytest.approx(0.09, rel=1e-12)
    assert frame_bounds(phi).within(cert.predicted_bounds, 1e-10)


def test_L12_false_verdict_for_large_perturbation():
    xi = onb(4)
    cert = check_L12(xi, 3 * xi)
    assert not cert.verdict and cert.predicted_bounds is None


def test_L13_diagonal():
    xi = onb(8)
    psi = VectorFamily(1.4 * np.eye(8), xi.space)
    cert = check_L13(xi, psi)
    assert cert.constants["alpha"] == pytest.approx(0.4, abs=1e-14)
    pb = cert.predicted_bounds
    assert (pb.lower, pb.upper) == pytest.approx((0.36, 1.96), abs=1e-12)
    ok, fb = is_riesz(psi)
    assert ok and fb.within(pb, 1e-10)


def test_L13_riesz_with_bounds_one_four(rng):
    # xi = diag(1..2) scaled Riesz basis with bounds (1, 4); psi perturbs with alpha = 0.5
    d = np.linspace(1, 2, 10)
    xi = VectorFamily(np.diag(d).astype(complex), HilbertGrid.unit(10))
    U = np.linalg.qr(crandn(rng, 10, 10))[0]
    psi = VectorFamily(xi.matrix + 0.5 * U @ xi.matrix, xi.space)
    cert = check_L13(xi, psi)
    assert cert.constants["alpha"] == pytest.approx(0.5, rel=1e-10)
    ok, fb = is_riesz(psi)
    assert ok and fb.within(predicted_bounds(1, 4, 0.5, "L13"), 1e-10)


def test_L13_kernel_mismatch():
    sp = HilbertGrid.unit(2)
    xi = VectorFamily(np.array([[1, 1], [0, 0]]), sp)
    psi = VectorFamily(np.array([[1, 0], [0, 1]]), sp)
    with pytest.raises(KernelMismatch):
        check_L13(xi, psi)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), size=st.floats(0.01, 0.95))
def test_L12_soundness(seed, size):
    rng = np.random.default_rng(seed)
    xi = VectorFamily(crandn(rng, 6, 9), HilbertGrid(rng.uniform(0.5, 2, 6)))
    A = frame_bounds(xi).lower
    E = crandn(rng, 6, 9)
    E *= math.sqrt(size * A) / np.linalg.svd(xi.space.sqrt_weights[:, None] * E, compute_uv=False)[0]
    phi = VectorFamily(xi.matrix + E, xi.space)
    cert = check_L12(xi, phi)
    assert cert.verdict
    assert frame_bounds(phi).within(cert.predicted_bounds, 1e-8)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), alpha=st.floats(0.0, 0.95))
def test_L13_soundness(seed, alpha):
    rng = np.random.default_rng(seed)
    xi = VectorFamily(np.eye(5) + 0.3 * crandn(rng, 5, 5) / 5, HilbertGrid.unit(5))
    U = np.linalg.qr(crandn(rng, 5, 5))[0]
    psi = VectorFamily(xi.matrix + alpha * U @ xi.matrix, xi.space)
    cert = check_L13(xi, psi)
    assert cert.constants["alpha"] == pytest.approx(alpha, abs=1e-9)
    if cert.verdict and cert.predicted_bounds is not None:
        assert frame_bounds(psi).within(cert.predicted_bounds, 1e-8)


# -- strong construction -----------------------------------------------------


@pytest.fixture(scope="module")
def rank_one():
    return make_rank_one_abstract(64, 0.2, 0.3, seed=7)


def test_rank_one_closed_forms(rank_one):
    sc = rank_one
    cert, dual = build_duals_strong(sc["phi"], sc["psi"], 1.0, tol=1e-13)
    ref = sc.reference
    assert cert.verdict and cert.constants["alpha"] < 1
    assert np.max(np.abs(dual.Q.matrix - ref["Q"].matrix)) <= 1e-10
    assert np.max(np.abs(dual.Qinv.matrix - ref["Qinv"].matrix)) <= 1e-10
    assert np.max(np.abs(dual.phi_tilde.matrix - ref["phi_tilde"].matrix)) <= 1e-10
    assert np.max(np.abs(dual.psi_tilde.matrix - ref["psi_tilde"].matrix)) <= 1e-10
    # Q = 1.3 I - 0.1 P
    P = ref["P"].matrix
    assert np.allclose(dual.Q.matrix, 1.3 * np.eye(64) - 0.1 * P, atol=1e-10)


def test_rank_one_reconstruction(rank_one):
    sc = rank_one
    V = random_tests(sc.space, 100, seed=1)
    _, dual = build_duals_strong(sc["phi"], sc["psi"], 1.0, tests=V, tol=1e-13)
    assert max(strong_residuals(sc["phi"], dual.phi_tilde, V)) <= 1e-8
    assert max(strong_residuals(dual.psi_tilde, sc["psi"], V)) <= 1e-8
    log = dual.construction_log
    assert log["residual_primal_max"] <= 1e-8 and log["residual_dual_max"] <= 1e-8


def test_scaled_psi_is_refused(rank_one):
    with pytest.raises(ContractionFailure):
        build_duals_strong(rank_one["phi"], 3 * rank_one["psi"])


def test_zero_lambda_is_refused(rank_one):
    with pytest.raises(UsageError):
        certify_strong(rank_one["phi"], rank_one["psi"], 0)


def test_weighted_onb_duals():
    g = HermiteGrid(20)
    sc = make_weighted_onb(lambda x: np.exp(x**2 / 4), lambda x: np.exp(-x**2 / 4), g)
    cert, dual = build_duals_strong(sc["phi"], sc["psi"], 1.0)
    assert cert.constants["alpha"] <= 1e-8
    assert np.allclose(dual.Q.matrix, np.eye(20), atol=1e-8)
    assert np.max(np.abs(dual.phi_tilde.matrix - sc.reference["phi_tilde"].matrix)) <= 1e-8


def test_reciprocal_weights_give_identity():
    g = HermiteGrid(16)
    sc = make_weighted_onb(lambda x: 2 + np.sin(x), lambda x: 1 / (2 + np.sin(x)), g)
    assert np.allclose(assemble_q(sc["phi"], sc["psi"]).matrix, np.eye(16), atol=1e-10)
    assert is_riesz(sc["phi"])[0] and is_riesz(sc["psi"])[0]


def test_scan_on_constant_product():
    g = HermiteGrid(12)
    sc = make_weighted_onb(lambda x: 2 + 0 * x, lambda x: 1 + 0 * x, g)
    rows = scan_lambda(sc["phi"], sc["psi"], [0.25, 0.5, 0.75, 1.0])
    alphas = [r[1] for r in rows]
    assert alphas == pytest.approx([0.5, 0.0, 0.5, 1.0], abs=1e-12)
    assert [r[2] for r in rows] == [True, True, True, False]


# -- weak and subspace constructions ------------------------------------------


@pytest.fixture(scope="module")
def oscillator():
    return make_shifted_oscillator(0.3, 64, HermiteGrid(64))


def test_weak_oscillator_deformation(oscillator):
    from quasiframes.gallery import make_rank_one

    s = oscillator
    sc = make_rank_one(s.eta, s.chi, s.sigma, 0.2, 0.3)
    assert sc.reference["bound_sum"] == pytest.approx(0.56)
    cert, dual = build_duals_weak(sc["phi"], sc["psi"], 1.0, tol=1e-12)
    assert cert.verdict
    P = sc.reference["P"].matrix
    R = np.eye(64) - P
    assert np.max(np.abs(dual.phi_tilde.matrix - (np.eye(64) - P / 6) @ s.chi.matrix)) <= 1e-8
    assert np.max(np.abs(dual.psi_tilde.matrix - (np.eye(64) - 3 * R / 13) @ s.eta.matrix)) <= 1e-8
    assert dual.construction_log["weak_residual_phi_max"] <= 1e-8


def test_subspace_construction_weighted():
    g = HermiteGrid(48)
    rho = lambda x: 1 + 0.4 * np.sin(x)  # noqa: E731
    sc = make_weighted_onb(rho, lambda x: 1 + 0 * x, g)
    D = SubspaceBasis.full(sc.space)
    cert, dual = build_duals_subspace(sc["phi"], sc["psi"], 1.0, D, D, sc.reference["Q"])
    assert cert.constants["alpha"] <= 0.4 + 1e-12
    assert cert.constants["alpha"] == pytest.approx(np.max(np.abs(rho(g.nodes) - 1)), rel=1e-10)
    log = dual.construction_log
    assert log["weak_residual_phi_max"] <= 1e-8 and log["weak_residual_psi_max"] <= 1e-8


def test_subspace_extension_mismatch():
    g = HermiteGrid(12)
    sc = make_weighted_onb(lambda x: 1 + 0.2 * np.sin(x), lambda x: 1 + 0 * x, g)
    D = SubspaceBasis.full(sc.space)
    wrong = LinearMap(np.eye(12), sc.space)
    with pytest.raises(ExtensionMismatch):
        build_duals_subspace(sc["phi"], sc["psi"], 1.0, D, D, wrong)


def test_strong_on_proper_subspace(rng):
    sp = HilbertGrid.unit(6)
    # Q acts as 1.2 on span(e0, e1) and is singular elsewhere
    phi = VectorFamily(np.eye(6)[:, :2], sp)
    psi = VectorFamily(1.2 * np.eye(6)[:, :2], sp)
    with pytest.raises(ContractionFailure):
        build_duals_strong(phi, psi)
    D = SubspaceBasis(np.eye(6)[:, :2].astype(complex), sp)
    cert, dual = build_duals_strong(phi, psi, 1.0, D)
    assert cert.constants["alpha"] == pytest.approx(0.2)
    V = D.projector().matrix @ crandn(rng, 6, 4)
    assert max(strong_residuals(phi, dual.phi_tilde, V)) <= 1e-9


# -- corollaries --------------------------------------------------------------


def test_C25_lower_semiframe():
    sc = make_lower_semiframe(32, 0.125, 0.2)
    cert = check_C25(sc["xi"], sc["chi"], sc["phi"], sc["chi"])
    assert cert.constants["beta"] == pytest.approx(0.2, abs=1e-12)
    assert cert.constants["gamma"] == pytest.approx(0.0, abs=1e-14)
    assert cert.verdict and cert.dual is not None


def test_C28_variant_two_semiframe():
    sc = make_lower_semiframe(32, 0.125, 0.5)
    cert = check_C28(sc["xi"], sc["chi"], sc["phi"], lam=1.0, variant=2)
    assert cert.constants["B_diff"] == pytest.approx(0.25, rel=1e-12)
    assert cert.constants["B_chi"] == pytest.approx(1.0, rel=1e-12)
    assert cert.verdict


def test_C28_variant_two_requires_equal_families():
    sc = make_lower_semiframe(8, 0.125, 0.5)
    with pytest.raises(UsageError):
        check_C28(sc["xi"], sc["chi"], sc["phi"], sc["xi"], variant=2)


def test_C28_product_sum_is_not_a_certificate():
    sp = HilbertGrid.unit(1)
    one = VectorFamily(np.ones((1, 1)), sp)
    zero = VectorFamily(np.zeros((1, 1)), sp)
    psi = VectorFamily(0.7 * np.ones((1, 1)), sp)
    cert = check_C28(one, one, zero, psi, variant=1, build=False)
    assert cert.constants["product_sum"] == pytest.approx(0.58)
    assert not cert.verdict
    assert np.allclose(assemble_q(zero, psi).matrix, 0)


@pytest.mark.parametrize("variant", [1, 3])
def test_C28_small_perturbation_passes(variant, rng):
    sp = HilbertGrid.unit(8)
    xi = VectorFamily(np.eye(8), sp)
    phi = VectorFamily(np.eye(8) + 0.01 * crandn(rng, 8, 8), sp)
    psi = VectorFamily(np.eye(8) + 0.01 * crandn(rng, 8, 8), sp)
    cert = check_C28(xi, xi, phi, psi, variant=variant)
    assert cert.verdict and cert.dual is not None


def test_christensen_variant_two():
    sc = make_christensen(64, 1.0, 0.1)
    assert sc.reference["column_sup"] < 0.25
    cert = check_C28(sc["xi"], sc["chi"], sc["phi"], lam=1.0, variant=2, D=sc.subspace)
    assert cert.verdict
    V = sc.subspace.projector().matrix @ random_tests(sc.space, 20)
    assert max(strong_residuals(sc["phi"], cert.dual.phi_tilde, V)) <= 1e-8


def test_C210_perturbed_synthesis(rank_one):
    sc = rank_one
    psi = VectorFamily(sc["chi"].matrix * 1.1, sc.space)
    cert = check_C210(sc["eta"], sc["chi"], psi, lam=1.0)
    assert cert.constants["alpha"] == pytest.approx(0.1, rel=1e-9)
    assert cert.verdict and cert.dual is not None


# -- symmetry and serialisation -------------------------------------------------


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), a=st.floats(-0.3, 0.3), b=st.floats(-0.3, 0.3), extra=st.integers(0, 3))
def test_gram_symmetry_and_excess_transport(seed, a, b, extra):
    rng = np.random.default_rng(seed)
    sc = make_rank_one_abstract(6, a, b, seed=seed % 1000)
    phi, psi = sc["phi"], sc["psi"]
    if extra:
        # pad with redundant members that leave Q untouched
        pad = crandn(rng, 6, extra)
        phi = phi.concat(VectorFamily(pad, sc.space))
        psi = psi.concat(VectorFamily(np.zeros((6, extra)), sc.space))
    cert, dual = build_duals_strong(phi, psi, 1.0, tol=1e-13)
    G1 = mixed_gram(phi, dual.phi_tilde)
    G2 = mixed_gram(dual.psi_tilde, psi)
    assert np.max(np.abs(G1 - G2)) <= 1e-8
    e_pt, e_psi, e_st, e_phi = excess_transport(phi, psi, dual)
    assert e_pt == e_psi and e_st == e_phi


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 1000), mod=st.floats(0.3, 3.0), arg=st.floats(-3.1, 3.1))
def test_certificate_lambda_rescaling(seed, mod, arg):
    sc = make_rank_one_abstract(5, 0.2, 0.1, seed=seed)
    c = mod * np.exp(1j * arg)
    base = certify_strong(sc["phi"], sc["psi"], 1.0).constants["alpha"]
    moved = certify_strong(sc["phi"], c * sc["psi"], 1.0 / c).constants["alpha"]
    assert moved == pytest.approx(base, abs=1e-10)


def test_certificate_round_trip(rank_one):
    cert = check_L13(onb(4), VectorFamily(1.2 * np.eye(4), HilbertGrid.unit(4)), lam=1 + 0.5j)
    d = json.loads(cert.to_json())
    back = PerturbationCertificate.from_dict(d)
    assert back.condition_id is ConditionId.L13_COEFF
    assert back.lam == cert.lam and back.verdict == cert.verdict
    assert back.predicted_bounds == cert.predicted_bounds
    assert back.constants["alpha"] == pytest.approx(cert.constants["alpha"])


def test_excess_of_duals_without_padding(rank_one):
    _, dual = build_duals_strong(rank_one["phi"], rank_one["psi"])
    assert excess(dual.phi_tilde) == 0 and excess(dual.psi_tilde) == 0

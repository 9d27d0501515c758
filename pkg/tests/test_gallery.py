import math

import numpy as np
import pytest
from scipy import integrate
from scipy.special import eval_hermite

from quasiframes.errors import (
    EpsilonOutOfRange,
    HypothesisViolated,
    PositivityViolation,
    QuadratureUnderresolved,
    StencilOverflow,
    UsageError,
)
from quasiframes.gallery import (
    HermiteGrid,
    christensen_eps_limit,
    hermite_functions,
    make_christensen,
    make_counterexample,
    make_lower_semiframe,
    make_rank_one_abstract,
    make_shifted_oscillator,
    make_weighted_onb,
    oscillator_eigencheck,
    oscillator_energy,
    oscillator_operators,
    pi_n,
)
from quasiframes.linalg import norm
from quasiframes.sequences import bessel_bound, biorthogonality_defect, frame_bounds


def hermite_oracle(n, x):
    return eval_hermite(n, x) * np.exp(-x**2 / 2) / math.sqrt(2.0**n * math.factorial(n) * math.sqrt(math.pi))


@pytest.mark.parametrize("n", [0, 1, 5, 17, 40])
def test_hermite_functions_against_scipy(n):
    x = np.linspace(-6, 6, 31)
    assert np.allclose(hermite_functions(n + 1, x)[n], hermite_oracle(n, x), atol=1e-12)


@pytest.mark.parametrize("M", [8, 33, 129])
def test_grid_is_discretely_orthonormal(M):
    g = HermiteGrid(M)
    G = g.space.gram(g.U, g.U)
    assert np.max(np.abs(G - np.eye(M))) <= 1e-11
    assert g.max_exact_degree == 2 * M - 1


def test_grid_coefficients_round_trip():
    g = HermiteGrid(20)
    c = np.arange(20) / 20.0
    assert np.allclose(g.coefficients(g.U @ c), c, atol=1e-12)


def test_basis_family_needs_enough_nodes():
    with pytest.raises(QuadratureUnderresolved):
        HermiteGrid(10).basis_family(11)


# -- weighted model ------------------------------------------------------------


def test_weighted_reference_objects():
    g = HermiteGrid(24)
    sc = make_weighted_onb(lambda x: 1 + 0.4 * np.sin(x), lambda x: 1 + 0 * x, g)
    assert sc.reference["alpha_at_lambda_1"] == pytest.approx(np.max(np.abs(0.4 * np.sin(g.nodes))))
    assert sc.reference["alpha_at_lambda_1"] < 0.4
    fb = frame_bounds(sc["phi"])
    assert fb.lower >= 0.36 - 1e-12 and fb.upper <= 1.96 + 1e-12


@pytest.mark.parametrize(
    "rho1, rho2",
    [(lambda x: np.sin(x), lambda x: 1 + 0 * x), (lambda x: 1 + 0 * x, lambda x: -1 + 0 * x)],
)
def test_weighted_positivity(rho1, rho2):
    with pytest.raises(PositivityViolation):
        make_weighted_onb(rho1, rho2, HermiteGrid(12))


# -- rank-one model ------------------------------------------------------------


def test_rank_one_reference_inverse():
    sc = make_rank_one_abstract(16, 0.2, 0.3, seed=3)
    Q, Qi = sc.reference["Q"].matrix, sc.reference["Qinv"].matrix
    assert np.allclose(Q @ Qi, np.eye(16), atol=1e-13)
    assert sc.reference["base_defect"] <= 1e-12
    assert sc.reference["bound_sum"] == pytest.approx(0.56)


@pytest.mark.parametrize("a, b", [(0.5, 0.4), (-0.6, 0.3), (0.9, 0.1)])
def test_rank_one_rejects_large_deformations(a, b):
    with pytest.raises(HypothesisViolated):
        make_rank_one_abstract(4, a, b)


# -- oscillator ------------------------------------------------------------------


@pytest.fixture(scope="module")
def osc():
    return make_shifted_oscillator(0.3, 129, HermiteGrid(129))


@pytest.fixture(scope="module")
def osc_ops(osc):
    return oscillator_operators(osc)


def test_oscillator_biorthogonality(osc):
    assert osc.biorthogonality <= 1e-8
    sub = biorthogonality_defect(
        type(osc.eta)(osc.eta.matrix[:, :13], osc.space), type(osc.chi)(osc.chi.matrix[:, :13], osc.space)
    )
    assert sub <= 1e-8


@pytest.mark.parametrize("which", ["H", "Hdag", "H1", "H2", "H3", "H4"])
@pytest.mark.parametrize("n", [0, 2, 5, 8])
def test_oscillator_eigen_residuals(osc, osc_ops, which, n):
    assert oscillator_eigencheck(osc, which, n, osc_ops) <= 1e-6


def test_energy_value():
    assert oscillator_energy(2, 0.3) == pytest.approx(2.59)


@pytest.mark.parametrize("n", range(0, 21, 4))
def test_pi_n_closed_form_matches_grid(osc, n):
    grid_val = np.sum(osc.space.weights * osc.sigma.coords.conj() * osc.eta.matrix[:, n])
    assert abs(grid_val - pi_n(n, 0.3)) <= 1e-8


@pytest.mark.parametrize("n, expected", [(0, 1.133148), (1, -0.566574)])
def test_pi_n_quadrature_oracle(n, expected):
    c = math.sqrt(math.pi) * math.sqrt(2.0**n * math.factorial(n))
    f = lambda x: eval_hermite(n, x) * np.exp(-x**2 - math.sqrt(2) * 0.5 * x) / c  # noqa: E731
    val, _ = integrate.quad(f, -30, 30, epsabs=1e-13, limit=200)
    assert val == pytest.approx(pi_n(n, 0.5), abs=1e-10)
    assert pi_n(n, 0.5) == pytest.approx(expected, abs=1e-6)


def test_deformed_family_formula(osc):
    e0 = osc.grid.U[:, 0]
    for n in range(10):
        expected = osc.eta.matrix[:, n] - (-0.3) ** (n + 1) / math.sqrt(math.factorial(n)) * math.exp(0.045) * e0
        assert np.max(np.abs(osc.phi.matrix[:, n] - expected)) <= 1e-8


def test_stencil_overflow():
    s = make_shifted_oscillator(0.2, 10, HermiteGrid(10))
    with pytest.raises(StencilOverflow):
        oscillator_eigencheck(s, "H", 9)
    with pytest.raises(UsageError):
        oscillator_eigencheck(s, "H7", 1)


def test_oscillator_underresolved():
    with pytest.raises(QuadratureUnderresolved):
        make_shifted_oscillator(0.3, 41, HermiteGrid(40))


def test_no_deformation_for_large_alpha():
    s = make_shifted_oscillator(0.6, 40, HermiteGrid(60))
    assert s.deformed is None
    with pytest.raises(HypothesisViolated):
        s.phi


def test_eta_norm_grows_with_alpha():
    g = HermiteGrid(60)
    small = make_shifted_oscillator(0.1, 10, g)
    large = make_shifted_oscillator(0.4, 10, g)
    assert norm(large.eta[0]) > norm(small.eta[0])
    assert norm(small.eta[0]) ** 2 == pytest.approx(math.exp(2 * 0.1**2), rel=1e-10)


# -- alternating sums, counterexample, lower semi-frame ----------------------------


def test_christensen_column_sums():
    sc = make_christensen(64, 1.0, 0.1)
    ref = sc.reference
    assert ref["limit_sup"] == pytest.approx(0.0164493, abs=1e-7)
    assert ref["column_sup"] < 0.25
    # each column sum is a partial zeta sum, so the sup is the longest one
    assert ref["column_sup"] == pytest.approx(0.01 * sum(1 / j**2 for j in range(1, 65)), rel=1e-12)
    assert biorthogonality_defect(sc["xi"], sc["chi"]) <= 1e-12
    assert bessel_bound(sc["chi"]) <= 4


@pytest.mark.parametrize("eps", [0.2, christensen_eps_limit(), -0.01])
def test_christensen_eps_range(eps):
    with pytest.raises(EpsilonOutOfRange):
        make_christensen(8, 1.0, eps)


def test_christensen_eps_limit_value():
    assert christensen_eps_limit() == pytest.approx(0.15198, abs=1e-5)


def test_counterexample_layout():
    phi, tilde = make_counterexample(3)
    assert len(phi) == 9
    assert np.allclose(phi.matrix[:, 3:6], np.eye(3)[:, [1, 1, 1]])
    assert np.allclose(tilde.matrix[:, 3:6], np.array([[0, 1, -1], [1, 0, 0], [0, 0, 0]]))
    with pytest.raises(UsageError):
        make_counterexample(1)


def test_lower_semiframe_bounds():
    sc = make_lower_semiframe(32, 0.125)
    assert frame_bounds(sc["xi"]).lower == pytest.approx(1.0)
    assert bessel_bound(sc["chi"]) == pytest.approx(1.0)
    assert frame_bounds(sc["xi"]).upper == pytest.approx((1 + 31 / 8) ** 2)

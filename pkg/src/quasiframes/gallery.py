"""Scenario generators: concrete families on which the perturbation checks run.

The continuous examples live in ``L^2(R)``, discretised on Gauss-Hermite
nodes with weights chosen so that the sampled Hermite functions
``e_0, ..., e_{M-1}`` are exactly orthonormal (:class:`HermiteGrid`). On that
grid multiplication by ``x`` is diagonal and ``d/dx`` acts through its exact
tridiagonal representation in the Hermite basis, which keeps the oscillator
eigen-residuals at spectral accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.polynomial.hermite import hermgauss

from .errors import (
    EpsilonOutOfRange,
    HypothesisViolated,
    PositivityViolation,
    QuadratureUnderresolved,
    StencilOverflow,
    UsageError,
)
from .linalg import ComplexVector, HilbertGrid, LinearMap, norm, rank_one_projector
from .sequences import SubspaceBasis, VectorFamily, biorthogonality_defect

__all__ = [
    "HermiteGrid",
    "Scenario",
    "OscillatorScenario",
    "hermite_functions",
    "pi_n",
    "make_weighted_onb",
    "make_rank_one",
    "make_rank_one_abstract",
    "random_riesz_pair",
    "make_shifted_oscillator",
    "oscillator_operators",
    "oscillator_eigencheck",
    "oscillator_energy",
    "make_christensen",
    "christensen_eps_limit",
    "make_counterexample",
    "make_lower_semiframe",
]


def hermite_functions(n_max: int, x) -> np.ndarray:
    """Normalised Hermite functions ``e_0..e_{n_max-1}`` at ``x``; shape ``(n_max, len(x))``."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max, x.size))
    if n_max == 0:
        return out
    out[0] = math.pi**-0.25 * np.exp(-(x**2) / 2)
    if n_max > 1:
        out[1] = math.sqrt(2.0) * x * out[0]
    for n in range(1, n_max - 1):
        out[n + 1] = math.sqrt(2.0 / (n + 1)) * x * out[n] - math.sqrt(n / (n + 1)) * out[n - 1]
    return out


@dataclass(frozen=True, eq=False)
class HermiteGrid:
    """``M`` Gauss-Hermite nodes with Christoffel weights.

    The weights ``1 / sum_{n<M} e_n(x_i)^2`` make the discrete inner product
    exact for every product ``e_n e_m`` with ``n + m <= 2M - 1``, so the
    matrix ``U[i, n] = e_n(x_i)`` is unitary in the weighted metric.
    """

    M: int

    def __post_init__(self):
        if self.M < 2:
            raise UsageError("a Hermite grid needs at least two nodes")
        x, _ = hermgauss(self.M)
        U = hermite_functions(self.M, x).T
        w = 1.0 / np.sum(U**2, axis=1)
        object.__setattr__(self, "nodes", x)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "U", U)
        object.__setattr__(self, "space", HilbertGrid(w, f"hermite-grid(M={self.M})"))

    @property
    def max_exact_degree(self) -> int:
        return 2 * self.M - 1

    def sample(self, f: Callable) -> np.ndarray:
        return np.asarray(f(self.nodes), dtype=complex) * np.ones(self.M)

    def coefficients(self, v: np.ndarray) -> np.ndarray:
        """Hermite-basis coordinates of grid samples (``U^H W v``)."""
        v = np.asarray(v)
        w = self.weights if v.ndim == 1 else self.weights[:, None]
        return self.U.T @ (w * v)

    def from_basis(self, B: np.ndarray) -> np.ndarray:
        """Grid matrix of the operator with Hermite-basis matrix ``B``."""
        return self.U @ B @ (self.U.T * self.weights[None, :])

    def basis_family(self, N: int | None = None) -> VectorFamily:
        N = self.M if N is None else N
        if N > self.M:
            raise QuadratureUnderresolved(f"{N} Hermite functions need at least {N} nodes, grid has {self.M}")
        return VectorFamily(self.U[:, :N], self.space, "e")


@dataclass(frozen=True, eq=False)
class Scenario:
    """A named bundle of families plus the closed-form objects they should reproduce."""

    name: str
    space: HilbertGrid
    families: dict
    params: dict = field(default_factory=dict)
    reference: dict = field(default_factory=dict)
    subspace: SubspaceBasis | None = None
    anchor: str = ""

    def __getitem__(self, key: str) -> VectorFamily:
        return self.families[key]


# -- weighted orthonormal bases ---------------------------------------------


def make_weighted_onb(rho1: Callable, rho2: Callable, grid: HermiteGrid, N: int | None = None) -> Scenario:
    """``phi_n = rho1 e_n`` and ``psi_n = rho2 e_n`` on a Hermite grid.

    With ``N = M`` the mixed operator is multiplication by
    ``conj(rho1) rho2`` and the reference duals are ``e_n / rho1`` and
    ``e_n / rho2`` (real weights). ``sup |rho1 rho2|`` over the nodes is the
    operative sup-norm; any ``lam`` in ``(0, 2 / sup)`` contracts when the
    product is positive.
    """
    N = grid.M if N is None else N
    e = grid.basis_family(N)
    r1, r2 = grid.sample(rho1), grid.sample(rho2)
    prod = np.conj(r1) * r2
    if np.min(prod.real) <= 0 or np.max(np.abs(prod.imag)) > 1e-12 * np.max(np.abs(prod)):
        raise PositivityViolation("rho1*rho2 must be real and positive on every node")
    if not np.all(np.isfinite(prod)):
        raise PositivityViolation("rho1*rho2 is not finite on the nodes")
    sup = float(np.max(prod.real))
    phi = VectorFamily(r1[:, None] * e.matrix, grid.space, "phi")
    psi = VectorFamily(r2[:, None] * e.matrix, grid.space, "psi")
    ref = {
        "Q": LinearMap(np.diag(prod), grid.space),
        "phi_tilde": VectorFamily(e.matrix / np.conj(r1)[:, None], grid.space, "phi~"),
        "psi_tilde": VectorFamily(e.matrix / np.conj(r2)[:, None], grid.space, "psi~"),
        "sup_product": sup,
        "inf_product": float(np.min(prod.real)),
        "lambda_range": (0.0, 2.0 / sup),
        "alpha_at_lambda_1": float(np.max(np.abs(prod - 1.0))),
    }
    return Scenario(
        "weighted_onb",
        grid.space,
        {"phi": phi, "psi": psi, "e": e},
        {"M": grid.M, "N": N},
        ref,
        anchor="phi_n = rho1*c_n, psi_n = rho2*c_n; Q = multiplication by rho1*rho2",
    )


# -- rank-one deformations ----------------------------------------------------


def _check_ab(a: float, b: float):
    s = abs(a) + abs(b) + abs(a) * abs(b)
    if not s < 1.0:
        raise HypothesisViolated(f"|a| + |b| + |a||b| = {s:.6g} is not below 1")
    if a == -1.0 or b == -1.0:
        raise HypothesisViolated("a and b must differ from -1")
    return s


def make_rank_one(
    eta: VectorFamily, chi: VectorFamily, sigma: ComplexVector, a: float, b: float
) -> Scenario:
    """``phi_n = (I + a P) eta_n`` and ``psi_n = (I + b R) chi_n`` with ``P = <sigma, .> sigma``, ``R = I - P``.

    When ``sum <eta_n, f> chi_n = f`` the mixed operator is
    ``Q = (1 + b) I + (a - b) P`` with inverse
    ``(1/(1 + b)) (I + ((b - a)/(1 + a)) P)``, and the duals are
    ``phi~_n = (I - a/(1+a) P) chi_n`` and ``psi~_n = (I - b/(1+b) R) eta_n``.
    These closed forms are attached under ``reference``; ``base_defect``
    records how far ``(eta, chi)`` is from reconstructing exactly.

    Signed ``a``, ``b`` are accepted as long as ``|a| + |b| + |a||b| < 1``.
    """
    eta._check_partner(chi)
    if not sigma.space.compatible(eta.space):
        raise UsageError("sigma lives on a different space")
    s = _check_ab(a, b)
    space = eta.space
    P = rank_one_projector(sigma)
    I = space.identity()
    R = I - P
    phi = eta.mapped(I + a * P, "phi")
    psi = chi.mapped(I + b * R, "psi")
    Q = (1 + b) * I + (a - b) * P
    Qinv = (1.0 / (1 + b)) * (I + ((b - a) / (1 + a)) * P)
    base = chi.matrix @ (eta.matrix.conj().T * space.weights[None, :])
    ref = {
        "Q": Q,
        "Qinv": Qinv,
        "phi_tilde": chi.mapped(I - (a / (1 + a)) * P, "phi~"),
        "psi_tilde": eta.mapped(I - (b / (1 + b)) * R, "psi~"),
        "P": P,
        "bound_sum": s,
        "alpha_exact": max(abs(a), abs(b)),
        "base_defect": float(np.max(np.abs(base - np.eye(space.dim)))),
    }
    return Scenario(
        "rank_one",
        space,
        {"phi": phi, "psi": psi, "eta": eta, "chi": chi},
        {"a": a, "b": b},
        ref,
        anchor="Q = (1+b)I + (a-b)P_sigma with X = aP_sigma, Y = bR_sigma",
    )


def random_riesz_pair(dim: int, seed: int = 0, spread: float = 0.3) -> tuple[VectorFamily, VectorFamily]:
    """Seeded biorthogonal Riesz pair ``(G e_n, G^{-H} e_n)`` in unit-weight ``C^dim``."""
    rng = np.random.default_rng(seed)
    Z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    G = np.eye(dim) + spread * Z / (2 * math.sqrt(dim))
    space = HilbertGrid.unit(dim)
    eta = VectorFamily(G, space, "eta")
    chi = VectorFamily(np.linalg.inv(G).conj().T, space, "chi")
    return eta, chi


def make_rank_one_abstract(dim: int, a: float, b: float, seed: int = 0) -> Scenario:
    """:func:`make_rank_one` on a seeded Riesz pair with a seeded unit ``sigma`` in ``C^dim``."""
    eta, chi = random_riesz_pair(dim, seed)
    rng = np.random.default_rng(seed + 1)
    s = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    sigma = ComplexVector(s / np.linalg.norm(s), eta.space)
    sc = make_rank_one(eta, chi, sigma, a, b)
    sc.params.update({"dim": dim, "seed": seed})
    return sc


# -- shifted harmonic oscillator -----------------------------------------------


def pi_n(n: int, alpha: float) -> float:
    """``<e_0, e_n exp(-sqrt(2) alpha x)> = (-alpha)^n e^{alpha^2/2} / sqrt(n!)``."""
    return (-alpha) ** n * math.exp(alpha**2 / 2) / math.sqrt(math.factorial(n))


def oscillator_energy(n: int, alpha: float) -> float:
    return n + 0.5 + alpha**2


@dataclass(frozen=True, eq=False)
class OscillatorScenario:
    """Eigenfamilies of ``H = (-d^2/dx^2 + x^2)/2 - sqrt(2) alpha d/dx`` and its adjoint.

    ``eta_n = e_n exp(-sqrt(2) alpha x)`` and ``chi_n = e_n exp(sqrt(2) alpha x)``
    are biorthogonal; ``sigma = e_0``. The deformed families
    ``phi_n = (I + alpha P) eta_n`` and ``psi_n = (I - alpha R) chi_n`` are
    built by :func:`make_rank_one` with ``b = -alpha`` whenever
    ``2|alpha| + alpha^2 < 1``; otherwise ``deformed`` is ``None``.
    """

    alpha: float
    N: int
    grid: HermiteGrid
    eta: VectorFamily
    chi: VectorFamily
    sigma: ComplexVector
    deformed: Scenario | None
    biorthogonality: float

    @property
    def space(self) -> HilbertGrid:
        return self.grid.space

    def _deformed(self) -> Scenario:
        if self.deformed is None:
            raise HypothesisViolated(f"no rank-one deformation for alpha={self.alpha}")
        return self.deformed

    @property
    def phi(self) -> VectorFamily:
        return self._deformed()["phi"]

    @property
    def psi(self) -> VectorFamily:
        return self._deformed()["psi"]

    def pi(self, n: int) -> float:
        return pi_n(n, self.alpha)

    def energy(self, n: int) -> float:
        return oscillator_energy(n, self.alpha)


def make_shifted_oscillator(alpha: float, N: int, grid: HermiteGrid) -> OscillatorScenario:
    """Shifted-oscillator families on ``grid``.

    Raises
    ------
    QuadratureUnderresolved
        If ``N > M`` or the discrete biorthogonality defect exceeds ``1e-6``.
    """
    if N > grid.M or N < 1:
        raise QuadratureUnderresolved(f"N={N} must lie in [1, M={grid.M}]")
    e = grid.U[:, :N]
    shift = np.exp(-math.sqrt(2.0) * alpha * grid.nodes)
    eta = VectorFamily(e * shift[:, None], grid.space, "eta")
    chi = VectorFamily(e / shift[:, None], grid.space, "chi")
    defect = biorthogonality_defect(eta, chi)
    if defect > 1e-6:
        raise QuadratureUnderresolved(f"biorthogonality defect {defect:.3g} exceeds 1e-6")
    sigma = ComplexVector(grid.U[:, 0], grid.space)
    deformed = None
    # the deformation with b = -alpha needs 2|alpha| + alpha^2 < 1
    if 2 * abs(alpha) + alpha**2 < 1.0:
        deformed = make_rank_one(eta, chi, sigma, alpha, -alpha)
        deformed.params.update({"alpha": alpha, "N": N, "M": grid.M})
    return OscillatorScenario(alpha, N, grid, eta, chi, sigma, deformed, defect)


def _ladder_derivative(M: int) -> np.ndarray:
    # d/dx e_n = sqrt(n/2) e_{n-1} - sqrt((n+1)/2) e_{n+1}, truncated to M
    D = np.zeros((M, M))
    n = np.arange(1, M)
    D[n - 1, n] = np.sqrt(n / 2.0)
    D[n, n - 1] = -np.sqrt(n / 2.0)
    return D


def oscillator_operators(s: OscillatorScenario) -> dict[str, LinearMap]:
    """Grid matrices of ``x``, ``d/dx``, ``P``, ``H``, ``H^dagger`` and the four deformed Hamiltonians."""
    g = s.grid
    sp = g.space
    a = s.alpha
    M = g.M
    D = _ladder_derivative(M)
    H0 = np.diag(np.arange(M) + 0.5)
    c = math.sqrt(2.0) * a
    X = np.diag(g.nodes).astype(complex)
    P = rank_one_projector(s.sigma).matrix
    H = g.from_basis(H0 - c * D)
    Hd = g.from_basis(H0 + c * D)

    def h1(t):
        return H - c * t * (P @ X + (X @ P) / (1 + t))

    def h2(t):
        return Hd + c * t * (X @ P + (P @ X) / (1 - t))

    mats = {
        "x": X,
        "d/dx": g.from_basis(D),
        "P": P,
        "H": H,
        "Hdag": Hd,
        "H1": h1(a),
        "H2": h2(a),
        "H3": h2(-a),
        "H4": h1(-a),
    }
    return {k: LinearMap(v, sp) for k, v in mats.items()}


def _eigenvector(s: OscillatorScenario, which: str, n: int) -> ComplexVector:
    sp = s.space
    a = s.alpha
    P = rank_one_projector(s.sigma)
    I = sp.identity()
    R = I - P
    if which == "H":
        return s.eta[n]
    if which == "Hdag":
        return s.chi[n]
    if which == "H1":
        return s.phi[n]
    if which == "H2":
        return s.psi[n]
    if which == "H3":  # phi~_n = (I - a/(1+a) P) chi_n
        return (I - (a / (1 + a)) * P) @ s.chi[n]
    if which == "H4":  # psi~_n = (I + a/(1-a) R) eta_n
        return (I + (a / (1 - a)) * R) @ s.eta[n]
    raise UsageError(f"unknown Hamiltonian {which!r}")


def oscillator_eigencheck(s: OscillatorScenario, which: str, n: int, ops: dict | None = None) -> float:
    """Relative residual ``||H v - E_n v|| / ||v||`` for the matching eigenvector ``v``.

    ``which`` selects the pair: ``H`` with ``eta_n``, ``Hdag`` with
    ``chi_n``, ``H1`` with ``phi_n``, ``H2`` with ``psi_n``, ``H3`` with
    ``phi~_n`` and ``H4`` with ``psi~_n``.

    Raises
    ------
    StencilOverflow
        If ``n > N - 2``.
    """
    if n < 0 or n > s.N - 2:
        raise StencilOverflow(f"n={n} exceeds N-2={s.N - 2}")
    ops = oscillator_operators(s) if ops is None else ops
    v = _eigenvector(s, which, n)
    r = ops[which] @ v - s.energy(n) * v
    return norm(r) / norm(v)


# -- alternating-sum family --------------------------------------------------


def christensen_eps_limit() -> float:
    return 3.0 / (2.0 * math.pi**2)


def make_christensen(N: int, lam: complex = 1.0, eps: float = 0.1) -> Scenario:
    """Biorthogonal pair ``chi_n = e_n + e_{n+1}``, ``xi_n = sum_{k<=n} (-1)^{n+k} e_k`` and its perturbation.

    ``phi_n = sum_{k<=n} (-1)^{n+k} g_{n,k} e_k`` with
    ``g_{n,k} = (eps/(n-k+1) + 1)/lam``; indices run over ``1..N`` and the
    space is ``C^{N+1}`` so that ``chi_N`` fits. The subspace ``D`` is the
    span of ``chi``. ``reference['column_sup']`` is
    ``max_k sum_{n>=k} |lam g_{n,k} - 1|^2`` over the truncation.

    Raises
    ------
    EpsilonOutOfRange
        Unless ``0 <= eps < 3/(2 pi^2)``.
    """
    lam = complex(lam)
    if lam == 0:
        raise UsageError("lambda must be nonzero")
    if not 0.0 <= eps < christensen_eps_limit():
        raise EpsilonOutOfRange(f"eps={eps} outside [0, {christensen_eps_limit():.6g})")
    if N < 1:
        raise UsageError("N must be positive")
    space = HilbertGrid.unit(N + 1, f"C^{N + 1}")
    n = np.arange(1, N + 1)
    sign = (-1.0) ** (n[None, :] + n[:, None])  # [k, n]
    lower = n[:, None] <= n[None, :]  # k <= n
    xi = np.zeros((N + 1, N), dtype=complex)
    xi[:N] = np.where(lower, sign, 0.0)
    gap = np.where(lower, n[None, :] - n[:, None] + 1.0, 1.0)
    gamma = (eps / gap + 1.0) / lam
    phi = np.zeros((N + 1, N), dtype=complex)
    phi[:N] = np.where(lower, sign * gamma, 0.0)
    chi = np.zeros((N + 1, N), dtype=complex)
    chi[n - 1, n - 1] = 1.0
    chi[n, n - 1] = 1.0
    dev = np.where(lower, np.abs(lam * gamma - 1.0) ** 2, 0.0)
    col = dev.sum(axis=1)
    chi_f = VectorFamily(chi, space, "chi")
    return Scenario(
        "christensen",
        space,
        {"xi": VectorFamily(xi, space, "xi"), "chi": chi_f, "phi": VectorFamily(phi, space, "phi")},
        {"N": N, "lambda": lam, "eps": eps},
        {"column_sup": float(col.max()), "column_sums": col, "limit_sup": eps**2 * math.pi**2 / 6},
        subspace=SubspaceBasis(chi_f),
        anchor="sup_k sum_{n>=k} |lam*gamma_{n,k} - 1|^2 < 1/4 with gamma_{n,k} = (eps/(n-k+1) + 1)/lam",
    )


# -- reordering counterexample -----------------------------------------------


def make_counterexample(K: int) -> tuple[VectorFamily, VectorFamily]:
    """Families ``{e_j, e_j, e_j}_j`` and ``{e_j, e_1, -e_1}_j`` for ``j = 1..K`` in ``C^K``.

    Summed in order, ``sum <phi_n, v> phi~_n = v`` because each group
    telescopes. With the roles exchanged the partial sums of
    ``sum <phi~_n, v> phi_n`` jump by ``<e_1, v>`` at the second member of
    every group.
    """
    if K < 2:
        raise UsageError("need at least two groups")
    space = HilbertGrid.unit(K)
    E = np.eye(K, dtype=complex)
    phi = np.repeat(E, 3, axis=1)
    tilde = np.empty((K, 3 * K), dtype=complex)
    tilde[:, 0::3] = E
    tilde[:, 1::3] = E[:, [0]]
    tilde[:, 2::3] = -E[:, [0]]
    return VectorFamily(phi, space, "phi"), VectorFamily(tilde, space, "phi~")


# -- lower semi-frame ----------------------------------------------------------


def make_lower_semiframe(N: int, growth: float, shift: float = 0.0) -> Scenario:
    """``xi_n = (1 + n growth) e_n`` with dual ``chi_n = e_n / (1 + n growth)`` in ``C^N``.

    ``xi`` has lower bound 1 and an upper bound that grows with ``N``;
    ``chi`` is Bessel with bound 1. ``shift`` adds ``shift * e_n`` to get the
    perturbed family ``phi``.
    """
    if growth < 0:
        raise UsageError("growth must be nonnegative")
    space = HilbertGrid.unit(N)
    d = 1.0 + growth * np.arange(N)
    E = np.eye(N, dtype=complex)
    xi = VectorFamily(E * d[None, :], space, "xi")
    chi = VectorFamily(E / d[None, :], space, "chi")
    phi = VectorFamily(E * (d + shift)[None, :], space, "phi")
    return Scenario(
        "lower_semiframe",
        space,
        {"xi": xi, "chi": chi, "phi": phi},
        {"N": N, "growth": growth, "shift": shift},
        {"A": 1.0, "chi_bessel": 1.0, "diff_bessel": shift**2},
        anchor="xi a lower semi-frame with Bessel dual chi; phi - xi Bessel with bound below A",
    )


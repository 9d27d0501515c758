"""Perturbation hypotheses and the dual sequences they guarantee.

Every check measures the constants of one perturbation condition and
returns a :class:`PerturbationCertificate`. A false verdict is a normal
result. The constructors (``build_duals_*``) assemble the mixed operator

    Q f = sum_n <phi_n, f> psi_n,

certify ``||lam Q - I|| < 1``, invert through the Neumann series and return
the dual families ``phi~_n = Q^{-1} psi_n`` and ``psi~_n = (Q^{-1})^dagger phi_n``
inside a :class:`DualSystem`.

In finite dimension the weak and strong definitions of ``Q`` coincide, so
one dense assembly serves every theorem; they differ only in which
reconstruction residuals get reported.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import ContractionFailure, ExtensionMismatch, HypothesisViolated, KernelMismatch, UsageError
from .linalg import (
    ComplexVector,
    HilbertGrid,
    LinearMap,
    neumann_inverse,
    spectral_norm,
)
from .sequences import (
    RANK_CUTOFF,
    FrameBounds,
    SubspaceBasis,
    VectorFamily,
    bessel_bound,
    excess,
    frame_bounds,
    mixed_gram,
    strong_residuals,
    weak_residual,
)

__all__ = [
    "ConditionId",
    "PerturbationCertificate",
    "DualSystem",
    "assemble_q",
    "predicted_bounds",
    "check_L12",
    "check_L13",
    "check_C25",
    "check_C28",
    "check_C210",
    "certify_strong",
    "build_duals_strong",
    "build_duals_weak",
    "build_duals_subspace",
    "scan_lambda",
    "random_tests",
    "excess_transport",
    "operator_norm_of",
]


class ConditionId(str, Enum):
    L12_FRAME = "L12_frame"
    L13_COEFF = "L13_coeff"
    T21_STRONG = "T21_strong"
    C25_SPLIT = "C25_split"
    C28_BESSEL_1 = "C28_bessel_1"
    C28_BESSEL_2 = "C28_bessel_2"
    C28_NORM_SUM = "C28_norm_sum"
    T31_WEAK = "T31_weak"
    T32_SUBSPACE = "T32_subspace"
    C210_COEFF_DUAL = "C210_coeff_dual"


@dataclass(frozen=True, eq=False)
class DualSystem:
    """Result of a successful dual construction.

    ``Q`` is the operator that was inverted: the assembled mixed operator,
    or its extension off a proper subspace ``D`` (identity times
    ``1/lam`` on the orthogonal complement). ``Q_assembled`` is always the
    raw ``sum_n <phi_n, .> psi_n``.
    """

    Q: LinearMap
    Qinv: LinearMap
    phi_tilde: VectorFamily
    psi_tilde: VectorFamily
    Q_assembled: LinearMap | None = None
    D1_image: SubspaceBasis | None = None
    D2_image: SubspaceBasis | None = None
    construction_log: dict = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class PerturbationCertificate:
    condition_id: ConditionId
    lam: complex
    constants: dict
    verdict: bool
    predicted_bounds: FrameBounds | None = None
    evidence: str = ""
    dual: DualSystem | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        lam = complex(self.lam)
        return {
            "condition_id": ConditionId(self.condition_id).value,
            "lambda": [lam.real, lam.imag],
            "constants": _jsonable(self.constants),
            "verdict": bool(self.verdict),
            "predicted_bounds": None if self.predicted_bounds is None else self.predicted_bounds.to_dict(),
            "evidence": self.evidence,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "PerturbationCertificate":
        pb = d.get("predicted_bounds")
        return cls(
            condition_id=ConditionId(d["condition_id"]),
            lam=complex(*d["lambda"]),
            constants=dict(d["constants"]),
            verdict=bool(d["verdict"]),
            predicted_bounds=None if pb is None else FrameBounds(**pb),
            evidence=d.get("evidence", ""),
        )


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _check_lam(lam) -> complex:
    lam = complex(lam)
    if lam == 0:
        raise UsageError("lambda must be nonzero")
    return lam


def _wnorm(space: HilbertGrid, block: np.ndarray) -> float:
    """Operator norm of a ``dim x k`` block acting from Euclidean ``C^k`` into the space."""
    return spectral_norm(space.sqrt_weights[:, None] * block)


def _subspace_frame(space: HilbertGrid, D: SubspaceBasis | None) -> np.ndarray:
    """Weighted-orthonormal basis block of ``D`` (the whole space when ``None``)."""
    if D is None:
        return np.diag(1.0 / space.sqrt_weights).astype(complex)
    if not D.space.compatible(space):
        raise UsageError("subspace lives on a different space")
    return D.orthonormal()


def random_tests(space: HilbertGrid, k: int = 8, seed: int = 0) -> np.ndarray:
    """``dim x k`` block of seeded complex Gaussian test vectors, unit weighted norm."""
    rng = np.random.default_rng(seed)
    V = rng.standard_normal((space.dim, k)) + 1j * rng.standard_normal((space.dim, k))
    V /= np.sqrt(np.einsum("i,ij->j", space.weights, np.abs(V) ** 2))[None, :]
    return V


def _as_block(tests, space: HilbertGrid) -> np.ndarray:
    if isinstance(tests, np.ndarray):
        return np.asarray(tests, dtype=complex).reshape(space.dim, -1)
    tests = list(tests)
    if not tests:
        return np.zeros((space.dim, 0), dtype=complex)
    return np.column_stack([t.coords for t in tests])


def assemble_q(phi: VectorFamily, psi: VectorFamily) -> LinearMap:
    """Dense mixed operator ``Q = synthesis(psi) . analysis(phi)``."""
    phi._check_partner(psi)
    w = phi.space.weights
    return LinearMap(psi.matrix @ (phi.matrix.conj().T * w[None, :]), phi.space)


# -- closed-form bounds -----------------------------------------------------


def predicted_bounds(A: float, B: float, value: float, mode: str = "L12") -> FrameBounds:
    """Frame bounds promised for a perturbed frame.

    ``mode="L12"``: ``value`` is the Bessel bound ``B'`` of the difference
    family and the bounds are ``A(1 - sqrt(B'/A))^2``, ``B(1 + sqrt(B'/B))^2``.

    ``mode="L13"``: ``value`` is the coefficient-side constant ``alpha`` and
    the bounds are ``A(1 - alpha)^2``, ``B(1 + alpha)^2``.
    """
    if A <= 0 or B < A or value < 0:
        raise HypothesisViolated(f"need 0 < A <= B and a nonnegative constant, got A={A}, B={B}, {value}")
    if mode == "L12":
        if not value < A:
            raise HypothesisViolated(f"B'={value} must be below A={A}")
        lo = A * (1.0 - math.sqrt(value / A)) ** 2
        hi = B * (1.0 + math.sqrt(value / B)) ** 2
    elif mode == "L13":
        if not value < 1:
            raise HypothesisViolated(f"alpha={value} must be below 1")
        lo = A * (1.0 - value) ** 2
        hi = B * (1.0 + value) ** 2
    else:
        raise UsageError(f"unknown mode {mode!r}")
    return FrameBounds(lo, hi, lo == hi)


def _scaled(fb: FrameBounds, lam: complex) -> FrameBounds:
    # bounds are stated for lam*phi; divide by |lam|^2 to speak about phi itself
    s = abs(lam) ** 2
    return FrameBounds(fb.lower / s, fb.upper / s, fb.tight)


# -- frame / Riesz perturbation ---------------------------------------------


def check_L12(xi: VectorFamily, phi: VectorFamily, lam: complex = 1.0) -> PerturbationCertificate:
    """Bessel-bound perturbation of a frame.

    Measures ``B'`` = Bessel bound of ``{xi_n - lam phi_n}`` and compares it
    with the lower frame bound ``A`` of ``xi``. The predicted bounds refer
    to ``phi`` itself (the classical bounds for ``lam phi`` divided by
    ``|lam|^2``). A non-frame ``xi`` (``A = 0``) gives a false verdict.
    """
    lam = _check_lam(lam)
    xi._check_partner(phi)
    fb = frame_bounds(xi)
    Bp = bessel_bound(xi - lam * phi)
    verdict = fb.lower > 0 and Bp < fb.lower
    pb = _scaled(predicted_bounds(fb.lower, fb.upper, Bp, "L12"), lam) if verdict else None
    return PerturbationCertificate(
        ConditionId.L12_FRAME,
        lam,
        {"Bprime": Bp, "A": fb.lower, "B": fb.upper},
        verdict,
        pb,
        "B' = largest eigenvalue of the frame operator of xi - lam*phi; A, B = extreme eigenvalues for xi",
    )


def _coefficient_alpha(base: VectorFamily, other: VectorFamily, lam: complex) -> float:
    """``sup_c ||sum c_n (base_n - lam other_n)|| / ||sum c_n base_n||``."""
    s = base.space.sqrt_weights
    T = s[:, None] * base.matrix
    Dm = s[:, None] * (base.matrix - lam * other.matrix)
    U, sv, Vh = np.linalg.svd(T, full_matrices=True)
    r = int(np.sum(sv > RANK_CUTOFF * sv[0])) if sv.size and sv[0] > 0 else 0
    kernel = Vh[r:].conj().T
    if kernel.shape[1]:
        leak = spectral_norm(Dm @ kernel)
        if leak > 1e-8 * max(1.0, spectral_norm(Dm)):
            raise KernelMismatch(
                f"difference synthesis does not vanish on ker(synthesis(base)): leak {leak:.3g}"
            )
    if r == 0:
        return 0.0
    pinv = Vh[:r].conj().T @ (U[:, :r].conj().T / sv[:r, None])
    return spectral_norm(Dm @ pinv)


def check_L13(xi: VectorFamily, psi: VectorFamily, lam: complex = 1.0) -> PerturbationCertificate:
    """Coefficient-side (Paley-Wiener type) perturbation.

    ``alpha`` is the smallest constant with
    ``||sum c_n (xi_n - lam psi_n)|| <= alpha ||sum c_n xi_n||`` for all
    finite ``c``, i.e. the norm of the difference synthesis composed with the
    pseudo-inverse of ``synthesis(xi)``.

    Raises
    ------
    KernelMismatch
        When some ``c`` with ``sum c_n xi_n = 0`` has a nonzero difference
        synthesis; no finite ``alpha`` exists then.
    """
    lam = _check_lam(lam)
    xi._check_partner(psi)
    alpha = _coefficient_alpha(xi, psi, lam)
    fb = frame_bounds(xi)
    verdict = alpha < 1.0
    pb = None
    if verdict and fb.lower > 0:
        pb = _scaled(predicted_bounds(fb.lower, fb.upper, alpha, "L13"), lam)
    return PerturbationCertificate(
        ConditionId.L13_COEFF,
        lam,
        {"alpha": alpha, "A": fb.lower, "B": fb.upper},
        verdict,
        pb,
        "alpha = ||(X - lam*Y) X^+|| with X, Y the synthesis matrices, weighted metric",
    )


# -- mixed-operator constructions -------------------------------------------


def _strong_alpha(phi, psi, lam, D):
    Q = assemble_q(phi, psi)
    V = _subspace_frame(phi.space, D)
    E = lam * Q.matrix - np.eye(phi.dim)
    return Q, _wnorm(phi.space, E @ V)


def certify_strong(
    phi: VectorFamily, psi: VectorFamily, lam: complex = 1.0, D: SubspaceBasis | None = None
) -> PerturbationCertificate:
    """Measure ``alpha = ||(lam Q - I)|_D||`` without constructing anything."""
    lam = _check_lam(lam)
    _, alpha = _strong_alpha(phi, psi, lam, D)
    return PerturbationCertificate(
        ConditionId.T21_STRONG,
        lam,
        {"alpha": alpha},
        alpha < 1.0,
        None,
        "alpha = ||lam*Q - I|| restricted to D" if D is not None else "alpha = ||lam*Q - I||",
    )


def _extend(Q: LinearMap, lam: complex, D: SubspaceBasis | None) -> LinearMap:
    # Q on D, (1/lam) I on the orthogonal complement: same contraction constant as Q|_D
    if D is None or D.is_full:
        return Q
    P = D.projector().matrix
    n = Q.space.dim
    return LinearMap(Q.matrix @ P + (np.eye(n) - P) / lam, Q.space)


def _dual_families(phi, psi, Qinv: LinearMap):
    phi_t = psi.mapped(Qinv, name=f"{phi.name}~" if phi.name else "phi~")
    psi_t = phi.mapped(Qinv.adjoint(), name=f"{psi.name}~" if psi.name else "psi~")
    return phi_t, psi_t


def _gram_symmetry(phi, psi, phi_t, psi_t) -> float:
    return float(np.max(np.abs(mixed_gram(phi, phi_t) - mixed_gram(psi_t, psi))))


def build_duals_strong(
    phi: VectorFamily,
    psi: VectorFamily,
    lam: complex = 1.0,
    D: SubspaceBasis | None = None,
    tests=None,
    tol: float = 1e-10,
    max_terms: int = 10_000,
    seed: int = 0,
) -> tuple[PerturbationCertificate, DualSystem]:
    """Strong-sense duals from ``||lam sum <phi_n, f> psi_n - f|| <= alpha ||f||`` on ``D``.

    With a proper subspace ``D`` the assembled ``Q`` is extended by
    ``1/lam`` times the identity on ``D^perp``; the extension has exactly
    the contraction constant measured on ``D``. Test vectors are projected
    onto ``D`` before the reconstruction residual ``sum <phi_n, f> phi~_n - f``
    is evaluated; the dual-side residual ``sum <psi~_n, f> psi_n - f`` is
    reported only when ``D`` is the whole space.

    Raises
    ------
    ContractionFailure
        If ``alpha >= 1``.
    """
    lam = _check_lam(lam)
    Q, alpha = _strong_alpha(phi, psi, lam, D)
    full = D is None or D.is_full
    if not alpha < 1.0:
        raise ContractionFailure(f"alpha = {alpha:.6g} >= 1; no strong-sense dual is guaranteed", alpha=alpha)
    Qbar = _extend(Q, lam, D)
    Qinv = neumann_inverse(Qbar, lam, tol, max_terms)
    phi_t, psi_t = _dual_families(phi, psi, Qinv)

    V = random_tests(phi.space, seed=seed) if tests is None else _as_block(tests, phi.space)
    if not full:
        V = D.projector().matrix @ V
    res13 = strong_residuals(phi, phi_t, V)
    log = {
        "alpha": alpha,
        "terms": Qinv.info["terms"],
        "term_bound": Qinv.info["term_bound"],
        "inverse_residual": max(Qinv.info["residual_right"], Qinv.info["residual_left"]),
        "residual_primal_max": max(res13, default=0.0),
        "gram_symmetry": _gram_symmetry(phi, psi, phi_t, psi_t),
        "tol": tol,
        "n_tests": V.shape[1],
    }
    if full:
        log["residual_dual_max"] = max(strong_residuals(psi_t, psi, V), default=0.0)
    cert = PerturbationCertificate(
        ConditionId.T21_STRONG,
        lam,
        {"alpha": alpha},
        True,
        None,
        ("alpha = ||lam*Q - I|| restricted to D, Q extended by I/lam off D" if not full else "alpha = ||lam*Q - I||"),
    )
    dual = DualSystem(Qbar, Qinv, phi_t, psi_t, Q_assembled=Q, construction_log=log)
    return replace(cert, dual=dual), dual


def _pairs(probes, space: HilbertGrid, seed: int):
    if probes is None:
        F = random_tests(space, seed=seed)
        G = random_tests(space, seed=seed + 1)
        return [(ComplexVector(F[:, j], space), ComplexVector(G[:, j], space)) for j in range(F.shape[1])]
    return list(probes)


def build_duals_weak(
    phi: VectorFamily,
    psi: VectorFamily,
    lam: complex = 1.0,
    probes: Iterable[tuple[ComplexVector, ComplexVector]] | None = None,
    tol: float = 1e-10,
    max_terms: int = 10_000,
    seed: int = 0,
) -> tuple[PerturbationCertificate, DualSystem]:
    """Weak-sense duals from ``|lam sum <f, phi_n><psi_n, g> - <f, g>| <= alpha ||f|| ||g||``.

    The weak residuals
    ``|sum <f, phi_n><phi~_n, g> - <f, g>|`` and
    ``|sum <f, psi_n><psi~_n, g> - <f, g>|`` are evaluated on ``probes``
    (seeded random pairs by default).
    """
    lam = _check_lam(lam)
    Q = assemble_q(phi, psi)
    alpha = operator_norm_of(lam * Q.matrix - np.eye(phi.dim), phi.space)
    if not alpha < 1.0:
        raise ContractionFailure(f"alpha = {alpha:.6g} >= 1; no weak-sense dual is guaranteed", alpha=alpha)
    Qinv = neumann_inverse(Q, lam, tol, max_terms)
    phi_t, psi_t = _dual_families(phi, psi, Qinv)
    pairs = _pairs(probes, phi.space, seed)
    r_phi = [weak_residual(phi, phi_t, f, g) for f, g in pairs]
    r_psi = [weak_residual(psi, psi_t, f, g) for f, g in pairs]
    log = {
        "alpha": alpha,
        "terms": Qinv.info["terms"],
        "term_bound": Qinv.info["term_bound"],
        "inverse_residual": max(Qinv.info["residual_right"], Qinv.info["residual_left"]),
        "weak_residual_phi_max": max(r_phi, default=0.0),
        "weak_residual_psi_max": max(r_psi, default=0.0),
        "gram_symmetry": _gram_symmetry(phi, psi, phi_t, psi_t),
        "tol": tol,
        "n_probes": len(pairs),
    }
    dual = DualSystem(Q, Qinv, phi_t, psi_t, Q_assembled=Q, construction_log=log)
    cert = PerturbationCertificate(
        ConditionId.T31_WEAK,
        lam,
        {"alpha": alpha},
        True,
        None,
        "alpha = ||lam*Q - I|| with Q defined through the sesquilinear form",
        dual,
    )
    return cert, dual


def operator_norm_of(matrix: np.ndarray, space: HilbertGrid) -> float:
    s = space.sqrt_weights
    return spectral_norm((s[:, None] * matrix) / s[None, :])


def build_duals_subspace(
    phi: VectorFamily,
    psi: VectorFamily,
    lam: complex,
    D1: SubspaceBasis,
    D2: SubspaceBasis,
    Qbar: LinearMap,
    probes: int = 8,
    tol: float = 1e-10,
    max_terms: int = 10_000,
    seed: int = 0,
    agreement_tol: float = 1e-8,
) -> tuple[PerturbationCertificate, DualSystem]:
    """Weak duals restricted to ``D1 x D2`` with a caller-supplied extension ``Qbar``.

    ``Qbar`` must reproduce the form ``sum <f, phi_n><psi_n, g>`` on
    ``D1 x D2``. The measured constant is the norm of ``lam Qbar - I``
    compressed between orthonormal bases of ``D1`` and ``D2``, which equals
    the supremum of the bilinear defect over unit vectors. Transported
    subspaces are ``D1~ = Qbar D1`` and ``D2~ = Qbar^dagger D2``. Probe
    residuals are evaluated for ``f in D1, g in D2~`` and for
    ``f in D2, g in D1~``.

    Raises
    ------
    ExtensionMismatch
        If ``Qbar`` disagrees with the assembled form on ``D1 x D2``.
    ContractionFailure
        If ``||lam Qbar - I|| >= 1`` (the extension cannot be inverted by the series).
    """
    lam = _check_lam(lam)
    space = phi.space
    if not Qbar.space.compatible(space):
        raise UsageError("Qbar lives on a different space")
    Q = assemble_q(phi, psi)
    V1 = _subspace_frame(space, D1)
    V2 = _subspace_frame(space, D2)
    w = space.weights
    comp = lambda M: V2.conj().T @ (w[:, None] * (M @ V1))  # noqa: E731
    mismatch = spectral_norm(comp(Qbar.matrix - Q.matrix))
    if mismatch > agreement_tol * max(1.0, operator_norm_of(Qbar.matrix, space)):
        raise ExtensionMismatch(f"Qbar differs from the assembled form on D1 x D2 by {mismatch:.3g}")
    alpha = spectral_norm(comp(lam * Qbar.matrix - np.eye(space.dim)))
    if not alpha < 1.0:
        raise ContractionFailure(f"alpha = {alpha:.6g} >= 1 on D1 x D2", alpha=alpha)
    Qinv = neumann_inverse(Qbar, lam, tol, max_terms)
    phi_t, psi_t = _dual_families(phi, psi, Qinv)
    D1_img = SubspaceBasis(Qbar.matrix @ V1, space)
    D2_img = SubspaceBasis(Qbar.adjoint().matrix @ V2, space)

    rng = np.random.default_rng(seed)

    def sample(Vblock):
        c = rng.standard_normal((Vblock.shape[1], probes)) + 1j * rng.standard_normal((Vblock.shape[1], probes))
        return Vblock @ c

    F1, G1 = sample(V1), sample(D2_img.block)
    F2, G2 = sample(V2), sample(D1_img.block)
    r1 = [
        weak_residual(phi, phi_t, ComplexVector(F1[:, j], space), ComplexVector(G1[:, j], space))
        for j in range(probes)
    ]
    r2 = [
        weak_residual(psi, psi_t, ComplexVector(F2[:, j], space), ComplexVector(G2[:, j], space))
        for j in range(probes)
    ]
    log = {
        "alpha": alpha,
        "alpha_extension": Qinv.info["alpha"],
        "extension_mismatch": mismatch,
        "terms": Qinv.info["terms"],
        "term_bound": Qinv.info["term_bound"],
        "inverse_residual": max(Qinv.info["residual_right"], Qinv.info["residual_left"]),
        "weak_residual_phi_max": max(r1, default=0.0),
        "weak_residual_psi_max": max(r2, default=0.0),
        "gram_symmetry": _gram_symmetry(phi, psi, phi_t, psi_t),
        "tol": tol,
    }
    dual = DualSystem(Qbar, Qinv, phi_t, psi_t, Q_assembled=Q, D1_image=D1_img, D2_image=D2_img, construction_log=log)
    cert = PerturbationCertificate(
        ConditionId.T32_SUBSPACE,
        lam,
        {"alpha": alpha},
        True,
        None,
        "alpha = ||P_D2 (lam*Qbar - I) P_D1|| between orthonormal bases",
        dual,
    )
    return cert, dual


# -- corollaries ------------------------------------------------------------


def _try_build(cert, phi, psi, D, tests, build, **kw):
    if not (build and cert.verdict):
        return cert
    _, dual = build_duals_strong(phi, psi, cert.lam, D, tests, **kw)
    return replace(cert, dual=dual)


def check_C25(
    xi: VectorFamily,
    chi: VectorFamily,
    phi: VectorFamily,
    psi: VectorFamily,
    lam: complex = 1.0,
    D: SubspaceBasis | None = None,
    build: bool = True,
    tests=None,
    **kw,
) -> PerturbationCertificate:
    """Split condition ``beta + gamma < 1`` around a reconstructing pair ``(xi, chi)``.

    ``beta = ||sum <lam phi_n - xi_n, .> psi_n||`` and
    ``gamma = ||sum <xi_n, .> (psi_n - chi_n)||``, both as operator norms on
    ``D``. On success the strong duals are attached to ``cert.dual``.
    """
    lam = _check_lam(lam)
    for F in (chi, phi, psi):
        xi._check_partner(F)
    space = xi.space
    V = _subspace_frame(space, D)
    w = space.weights
    beta = _wnorm(space, psi.matrix @ ((lam * phi.matrix - xi.matrix).conj().T @ (w[:, None] * V)))
    gamma = _wnorm(space, (psi.matrix - chi.matrix) @ (xi.matrix.conj().T @ (w[:, None] * V)))
    cert = PerturbationCertificate(
        ConditionId.C25_SPLIT,
        lam,
        {"beta": beta, "gamma": gamma},
        beta + gamma < 1.0,
        None,
        "beta, gamma = operator norms of the two split terms on D",
    )
    return _try_build(cert, phi, psi, D, tests, build, **kw)


def check_C28(
    xi: VectorFamily,
    chi: VectorFamily,
    phi: VectorFamily,
    psi: VectorFamily | None = None,
    lam: complex = 1.0,
    variant: int = 1,
    D: SubspaceBasis | None = None,
    build: bool = True,
    tests=None,
    **kw,
) -> PerturbationCertificate:
    """Bessel-product and norm-sum sufficient conditions.

    ``variant=1``: the split constants are bounded by
    ``sqrt(B_{lam phi - xi} B_psi) + sqrt(B_xi B_{psi - chi})`` and the
    verdict requires that sum of square roots to be below one. The plain
    product sum ``B_{lam phi - xi} B_psi + B_xi B_{psi - chi}`` is recorded
    as ``product_sum`` but is not used for the verdict: it does not bound
    ``||lam Q - I||`` (``xi = chi = 1``, ``phi = 0``, ``psi = 0.7`` in one
    dimension gives 0.58 while ``Q = 0``).

    ``variant=2``: ``psi`` must equal ``chi``; verdict ``B_{lam phi - xi} B_chi < 1``.

    ``variant=3``: ``sum_n ||lam phi_n - xi_n|| ||psi_n|| + ||xi_n|| ||psi_n - chi_n|| < 1``.
    """
    lam = _check_lam(lam)
    if psi is None:
        psi = chi
    for F in (chi, phi, psi):
        xi._check_partner(F)
    diff = lam * phi - xi
    if variant == 1:
        b_d, b_psi, b_xi, b_pc = bessel_bound(diff), bessel_bound(psi), bessel_bound(xi), bessel_bound(psi - chi)
        products = [b_d * b_psi, b_xi * b_pc]
        value = math.sqrt(products[0]) + math.sqrt(products[1])
        constants = {
            "B_diff": b_d,
            "B_psi": b_psi,
            "B_xi": b_xi,
            "B_psi_minus_chi": b_pc,
            "bessel_products": products,
            "product_sum": sum(products),
            "value": value,
        }
        cid = ConditionId.C28_BESSEL_1
        evidence = "value = sqrt(B_diff*B_psi) + sqrt(B_xi*B_{psi-chi}); Bessel bounds are frame-operator norms"
    elif variant == 2:
        if np.max(np.abs(psi.matrix - chi.matrix)) > 1e-12 * max(1.0, np.max(np.abs(chi.matrix))):
            raise UsageError("variant 2 requires psi == chi")
        b_d, b_chi = bessel_bound(diff), bessel_bound(chi)
        value = b_d * b_chi
        constants = {"B_diff": b_d, "B_chi": b_chi, "bessel_products": [value], "value": value}
        cid = ConditionId.C28_BESSEL_2
        evidence = "value = B_diff * B_chi; Bessel bounds are frame-operator norms"
    elif variant == 3:
        value = float(np.sum(diff.norms() * psi.norms() + xi.norms() * (psi - chi).norms()))
        constants = {"value": value}
        cid = ConditionId.C28_NORM_SUM
        evidence = "value = truncated sum of member-norm products"
    else:
        raise UsageError(f"variant must be 1, 2 or 3, got {variant!r}")
    cert = PerturbationCertificate(cid, lam, constants, value < 1.0, None, evidence)
    return _try_build(cert, phi, psi, D, tests, build, **kw)


def check_C210(
    phi: VectorFamily,
    phi_tilde: VectorFamily,
    psi: VectorFamily,
    lam: complex = 1.0,
    build: bool = True,
    tests=None,
    **kw,
) -> PerturbationCertificate:
    """Perturb the synthesis side of a reconstructing pair ``(phi, phi~)``.

    ``alpha`` is the least constant with
    ``||sum c_n (lam psi_n - phi~_n)|| <= alpha ||sum c_n phi~_n||``. When it
    is below one the pair ``(phi, psi)`` has strong duals on the whole space.
    """
    lam = _check_lam(lam)
    phi._check_partner(phi_tilde)
    phi._check_partner(psi)
    alpha = _coefficient_alpha(phi_tilde, psi, lam)
    cert = PerturbationCertificate(
        ConditionId.C210_COEFF_DUAL,
        lam,
        {"alpha": alpha},
        alpha < 1.0,
        None,
        "alpha = ||(X~ - lam*Y) X~^+|| with X~ the synthesis of phi~",
    )
    return _try_build(cert, phi, psi, None, tests, build, **kw)


def scan_lambda(
    phi: VectorFamily,
    psi: VectorFamily,
    lams: Sequence[complex],
    D: SubspaceBasis | None = None,
) -> list[tuple[complex, float, bool]]:
    """``(lam, alpha, alpha < 1)`` for each ``lam``; no optimality is claimed."""
    out = []
    for lam in lams:
        c = certify_strong(phi, psi, lam, D)
        out.append((c.lam, c.constants["alpha"], c.verdict))
    return out


def excess_transport(phi, psi, dual: DualSystem) -> tuple[int, int, int, int]:
    """``(e(phi~), e(psi), e(psi~), e(phi))``; the first two and the last two must agree."""
    return excess(dual.phi_tilde), excess(psi), excess(dual.psi_tilde), excess(phi)


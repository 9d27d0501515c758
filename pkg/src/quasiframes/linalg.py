"""Dense complex linear algebra on a weighted coordinate space.

A :class:`HilbertGrid` carries positive quadrature weights ``w``; the inner
product is ``<u, v> = sum_i w_i * conj(u_i) * v_i`` (conjugate-linear in the
first slot). The same code path therefore serves plain ``C^n`` (unit
weights) and grid discretisations of ``L^2(R)``.

Operators are stored as plain coordinate matrices. Everything that depends
on the metric (adjoints, norms, condition numbers) goes through the
similarity ``B = W^{1/2} T W^{-1/2}``, under which the weighted problem
becomes a Euclidean one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractionFailure, NonConvergence, SingularOperator, UsageError

__all__ = [
    "HilbertGrid",
    "ComplexVector",
    "LinearMap",
    "inner",
    "norm",
    "operator_norm",
    "neumann_inverse",
    "neumann_term_bound",
    "direct_inverse",
    "rank_one_projector",
    "weighted_orthonormalize",
    "spectral_norm",
]

#: below this dimension the operator norm comes from a full SVD
_SVD_DIM_LIMIT = 512


def _frozen(a, dtype=None):
    arr = np.array(a, dtype=dtype, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class HilbertGrid:
    """Coordinate space ``C^dim`` with a diagonal positive weight.

    Parameters
    ----------
    weights : array_like of float
        Strictly positive weights, one per coordinate.
    label : str
        Free-form description, used in reports and serialised headers.
    """

    weights: np.ndarray
    label: str = ""

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise UsageError("weights must be a non-empty 1-d array")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise UsageError("weights must be finite and strictly positive")
        object.__setattr__(self, "weights", _frozen(w))
        if not self.label:
            object.__setattr__(self, "label", f"C^{w.size}")

    @classmethod
    def unit(cls, dim: int, label: str = "") -> "HilbertGrid":
        if dim < 1:
            raise UsageError("dim must be positive")
        return cls(np.ones(int(dim)), label or f"C^{int(dim)}")

    @property
    def dim(self) -> int:
        return self.weights.size

    @property
    def sqrt_weights(self) -> np.ndarray:
        return np.sqrt(self.weights)

    def compatible(self, other: "HilbertGrid") -> bool:
        return self is other or (
            self.dim == other.dim and np.array_equal(self.weights, other.weights)
        )

    def vector(self, coords) -> "ComplexVector":
        return ComplexVector(coords, self)

    def basis_vector(self, k: int) -> "ComplexVector":
        c = np.zeros(self.dim, dtype=complex)
        c[k] = 1.0
        return ComplexVector(c, self)

    def operator(self, matrix) -> "LinearMap":
        return LinearMap(matrix, self)

    def identity(self) -> "LinearMap":
        return LinearMap(np.eye(self.dim, dtype=complex), self)

    def gram(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        """Matrix of inner products ``<A[:, i], B[:, j]>`` for column blocks."""
        B = np.asarray(B)
        w = self.weights if B.ndim == 1 else self.weights[:, None]
        return np.asarray(A).conj().T @ (w * B)


def _check_space(a: HilbertGrid, b: HilbertGrid):
    if not a.compatible(b):
        raise UsageError(f"space mismatch: {a.label!r} vs {b.label!r}")


@dataclass(frozen=True, eq=False)
class ComplexVector:
    # keep numpy scalars from broadcasting over the object
    __array_ufunc__ = None

    coords: np.ndarray
    space: HilbertGrid

    def __post_init__(self):
        c = np.asarray(self.coords, dtype=complex).reshape(-1)
        if c.size != self.space.dim:
            raise UsageError(
                f"vector has {c.size} coordinates, space has dimension {self.space.dim}"
            )
        object.__setattr__(self, "coords", _frozen(c))

    def __add__(self, other):
        _check_space(self.space, other.space)
        return ComplexVector(self.coords + other.coords, self.space)

    def __sub__(self, other):
        _check_space(self.space, other.space)
        return ComplexVector(self.coords - other.coords, self.space)

    def __mul__(self, scalar):
        return ComplexVector(scalar * self.coords, self.space)

    __rmul__ = __mul__

    def __neg__(self):
        return ComplexVector(-self.coords, self.space)

    def __truediv__(self, scalar):
        return ComplexVector(self.coords / scalar, self.space)

    def norm(self) -> float:
        return norm(self)


@dataclass(frozen=True, eq=False)
class LinearMap:
    """Square operator on a :class:`HilbertGrid`.

    ``info`` is free metadata attached by constructors (for instance the
    term count of a Neumann inversion); it never affects arithmetic.
    """

    # keep numpy scalars from broadcasting over the object
    __array_ufunc__ = None

    matrix: np.ndarray
    space: HilbertGrid
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        n = self.space.dim
        if m.shape != (n, n):
            raise UsageError(f"operator shape {m.shape} does not match space dimension {n}")
        object.__setattr__(self, "matrix", _frozen(m))

    def adjoint(self) -> "LinearMap":
        # <T u, v>_W = <u, T^dagger v>_W  =>  T^dagger = W^{-1} T^H W
        w = self.space.weights
        return LinearMap((self.matrix.conj().T * w[None, :]) / w[:, None], self.space)

    def symmetrized(self) -> np.ndarray:
        """``W^{1/2} T W^{-1/2}``: the Euclidean matrix with the same norm and spectrum."""
        s = self.space.sqrt_weights
        return (s[:, None] * self.matrix) / s[None, :]

    def __matmul__(self, other):
        if isinstance(other, LinearMap):
            _check_space(self.space, other.space)
            return LinearMap(self.matrix @ other.matrix, self.space)
        if isinstance(other, ComplexVector):
            _check_space(self.space, other.space)
            return ComplexVector(self.matrix @ other.coords, self.space)
        return NotImplemented

    def __add__(self, other):
        _check_space(self.space, other.space)
        return LinearMap(self.matrix + other.matrix, self.space)

    def __sub__(self, other):
        _check_space(self.space, other.space)
        return LinearMap(self.matrix - other.matrix, self.space)

    def __mul__(self, scalar):
        return LinearMap(scalar * self.matrix, self.space)

    __rmul__ = __mul__

    def __neg__(self):
        return LinearMap(-self.matrix, self.space)

    def apply(self, block: np.ndarray) -> np.ndarray:
        """Apply to a raw ``dim x k`` coordinate block."""
        return self.matrix @ block


def inner(u: ComplexVector, v: ComplexVector) -> complex:
    """Weighted inner product, conjugate-linear in ``u``."""
    _check_space(u.space, v.space)
    return complex(np.sum(u.space.weights * np.conj(u.coords) * v.coords))


def norm(u: ComplexVector) -> float:
    return math.sqrt(max(inner(u, u).real, 0.0))


def spectral_norm(B: np.ndarray, seed: int = 0, tol: float = 1e-13, max_iter: int = 5000) -> float:
    if min(B.shape) == 0:
        return 0.0
    if min(B.shape) < _SVD_DIM_LIMIT:
        return float(np.linalg.norm(B, 2))
    rng = np.random.default_rng(seed)
    n = B.shape[1]
    x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(max_iter):
        y = B.conj().T @ (B @ x)
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0
        new = math.sqrt(ny)
        x = y / ny
        if abs(new - est) <= tol * new:
            return new
        est = new
    # slow convergence (clustered top singular values): pay for the SVD
    return float(np.linalg.norm(B, 2))


def operator_norm(T: LinearMap) -> float:
    """Largest singular value of ``T`` with respect to the weighted inner product."""
    return spectral_norm(T.symmetrized())


def neumann_term_bound(alpha: float, tol: float) -> int:
    """``ceil(log(tol (1 - alpha)) / log(alpha))``: a priori number of series terms."""
    if alpha <= 0.0:
        return 1
    return max(1, math.ceil(math.log(tol * (1.0 - alpha)) / math.log(alpha)))


def neumann_inverse(
    Q: LinearMap,
    lam: complex = 1.0,
    tol: float = 1e-10,
    max_terms: int = 10_000,
) -> LinearMap:
    """Invert ``Q`` through ``Q^{-1} = lam * sum_k (I - lam Q)^k``.

    Requires ``alpha = ||lam Q - I|| < 1``. The partial sum with ``k + 1``
    terms has ``Q R - I = -(I - lam Q)^{k+1}``, so the residual is the norm
    of the next power and the loop stops as soon as that drops below
    ``tol``.

    Returns
    -------
    LinearMap
        The inverse, with ``info`` holding ``alpha``, ``terms``,
        ``term_bound`` and the measured residuals of ``QR - I`` and ``RQ - I``.

    Raises
    ------
    ContractionFailure
        If ``alpha >= 1``.
    NonConvergence
        If ``max_terms`` is exhausted first.
    """
    if lam == 0:
        raise UsageError("lam must be nonzero")
    space = Q.space
    n = space.dim
    eye = np.eye(n, dtype=complex)
    E = eye - lam * Q.matrix
    s = space.sqrt_weights
    alpha = spectral_norm((s[:, None] * E) / s[None, :])
    if not alpha < 1.0:
        raise ContractionFailure(
            f"||lam*Q - I|| = {alpha:.6g} is not below 1; the Neumann series diverges",
            alpha=alpha,
        )

    total = eye.copy()
    power = eye
    terms = 1
    converged = alpha == 0.0
    while not converged:
        if terms >= max_terms:
            raise NonConvergence(
                f"Neumann series not within tol={tol:g} after {max_terms} terms (alpha={alpha:.6g})"
            )
        power = power @ E
        total += power
        terms += 1
        # ||E^{k+1}|| <= alpha^{k+1}, and the Frobenius norm bounds the spectral one
        if alpha**terms <= tol:
            converged = True
        else:
            nxt = (s[:, None] * (power @ E)) / s[None, :]
            converged = np.linalg.norm(nxt) <= tol

    R = lam * total
    res_right = operator_norm(LinearMap(Q.matrix @ R - eye, space))
    res_left = operator_norm(LinearMap(R @ Q.matrix - eye, space))
    return LinearMap(
        R,
        space,
        info={
            "method": "neumann",
            "alpha": alpha,
            "terms": terms,
            "term_bound": neumann_term_bound(alpha, tol),
            "residual_right": res_right,
            "residual_left": res_left,
            "tol": tol,
        },
    )


def direct_inverse(T: LinearMap, max_cond: float = 1e12) -> LinearMap:
    """LU-based inverse, refusing operators with weighted condition number above ``max_cond``."""
    B = T.symmetrized()
    cond = float(np.linalg.cond(B))
    if not np.isfinite(cond) or cond > max_cond:
        raise SingularOperator(f"condition number {cond:.3g} exceeds {max_cond:.0e}")
    R = np.linalg.inv(T.matrix)
    eye = np.eye(T.space.dim)
    residual = operator_norm(LinearMap(T.matrix @ R - eye, T.space))
    return LinearMap(R, T.space, info={"method": "direct", "cond": cond, "residual_right": residual})


def rank_one_projector(sigma: ComplexVector) -> LinearMap:
    """``P f = <sigma, f> sigma`` for a unit vector ``sigma``."""
    nrm = norm(sigma)
    if abs(nrm - 1.0) > 1e-10:
        raise UsageError(f"sigma must be a unit vector, got norm {nrm:.12g}")
    c = sigma.coords
    w = sigma.space.weights
    return LinearMap(np.outer(c, c.conj() * w), sigma.space)


def weighted_orthonormalize(block: np.ndarray, space: HilbertGrid, cutoff: float = 1e-8) -> np.ndarray:
    """Orthonormal basis (``dim x r``) of the column span of ``block`` in the weighted metric.

    Columns whose singular value falls below ``cutoff * sigma_max`` are
    dropped.
    """
    s = space.sqrt_weights
    U, sv, _ = np.linalg.svd(s[:, None] * np.asarray(block, dtype=complex), full_matrices=False)
    if sv.size == 0 or sv[0] == 0.0:
        return np.zeros((space.dim, 0), dtype=complex)
    r = int(np.sum(sv > cutoff * sv[0]))
    return U[:, :r] / s[:, None]

"""Finite vector families and their frame-theoretic diagnostics.

A :class:`VectorFamily` is a truncated sequence ``{v_0, ..., v_{N-1}}`` stored
column-wise, so that the coordinate matrix *is* the synthesis operator
``c -> sum_n c_n v_n``. Frame bounds, Bessel bounds, excess and the Riesz
test all reduce to the singular values of ``W^{1/2} V``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import UsageError
from .linalg import ComplexVector, HilbertGrid, LinearMap, weighted_orthonormalize

__all__ = [
    "VectorFamily",
    "FrameBounds",
    "SubspaceBasis",
    "synthesis",
    "analysis",
    "frame_operator",
    "frame_bounds",
    "bessel_bound",
    "rank",
    "excess",
    "is_riesz",
    "biorthogonality_defect",
    "mixed_gram",
    "strong_residuals",
    "partial_sum_trace",
    "weak_residual",
]

#: relative singular-value cutoff used for numerical rank
RANK_CUTOFF = 1e-10


@dataclass(frozen=True, eq=False)
class VectorFamily:
    """Ordered finite family of vectors on one :class:`HilbertGrid`.

    ``matrix[:, n]`` holds member ``n``.
    """

    # keep numpy scalars from broadcasting over the object
    __array_ufunc__ = None

    matrix: np.ndarray
    space: HilbertGrid
    name: str = ""

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex, copy=True)
        if m.ndim != 2 or m.shape[0] != self.space.dim:
            raise UsageError(
                f"family matrix must be {self.space.dim} x N, got shape {m.shape}"
            )
        if m.shape[1] < 1:
            raise UsageError("a family needs at least one member")
        m.flags.writeable = False
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_vectors(cls, vectors: Sequence[ComplexVector], name: str = "") -> "VectorFamily":
        if not vectors:
            raise UsageError("a family needs at least one member")
        space = vectors[0].space
        for v in vectors[1:]:
            if not v.space.compatible(space):
                raise UsageError("all members must live on the same space")
        return cls(np.column_stack([v.coords for v in vectors]), space, name)

    @classmethod
    def from_rows(cls, rows, space: HilbertGrid, name: str = "") -> "VectorFamily":
        """Build from an ``(N, dim)`` array whose rows are the members."""
        return cls(np.asarray(rows).T, space, name)

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def members(self) -> list[ComplexVector]:
        return [ComplexVector(self.matrix[:, n], self.space) for n in range(len(self))]

    def __len__(self) -> int:
        return self.matrix.shape[1]

    def __getitem__(self, n: int) -> ComplexVector:
        return ComplexVector(self.matrix[:, n], self.space)

    def _check_partner(self, other: "VectorFamily"):
        if not self.space.compatible(other.space):
            raise UsageError("families live on different spaces")
        if len(self) != len(other):
            raise UsageError(f"family lengths differ: {len(self)} vs {len(other)}")

    def __add__(self, other: "VectorFamily") -> "VectorFamily":
        self._check_partner(other)
        return VectorFamily(self.matrix + other.matrix, self.space, f"({self.name}+{other.name})")

    def __sub__(self, other: "VectorFamily") -> "VectorFamily":
        self._check_partner(other)
        return VectorFamily(self.matrix - other.matrix, self.space, f"({self.name}-{other.name})")

    def __mul__(self, scalar) -> "VectorFamily":
        return VectorFamily(scalar * self.matrix, self.space, self.name)

    __rmul__ = __mul__

    def concat(self, other: "VectorFamily") -> "VectorFamily":
        """Union of two families, ``self`` first."""
        if not self.space.compatible(other.space):
            raise UsageError("families live on different spaces")
        return VectorFamily(np.hstack([self.matrix, other.matrix]), self.space, self.name)

    def mapped(self, T: LinearMap, name: str = "") -> "VectorFamily":
        """Image family ``{T v_n}``."""
        if not T.space.compatible(self.space):
            raise UsageError("operator and family live on different spaces")
        return VectorFamily(T.matrix @ self.matrix, self.space, name or self.name)

    def renamed(self, name: str) -> "VectorFamily":
        return VectorFamily(self.matrix, self.space, name)

    def norms(self) -> np.ndarray:
        return np.sqrt(np.einsum("i,ij->j", self.space.weights, np.abs(self.matrix) ** 2))


@dataclass(frozen=True)
class FrameBounds:
    lower: float
    upper: float
    tight: bool = False

    def __post_init__(self):
        if self.lower < 0 or self.upper < self.lower:
            raise UsageError(f"invalid bounds ({self.lower}, {self.upper})")

    def within(self, outer: "FrameBounds", rel_slack: float = 0.0) -> bool:
        """True if ``[lower, upper]`` sits inside ``outer`` up to a relative slack."""
        return (
            self.lower >= outer.lower * (1.0 - rel_slack)
            and self.upper <= outer.upper * (1.0 + rel_slack)
        )

    def to_dict(self) -> dict:
        return {"lower": float(self.lower), "upper": float(self.upper), "tight": bool(self.tight)}


class SubspaceBasis:
    """A subspace given by a numerically independent spanning set.

    Raises :class:`UsageError` when the smallest singular value of the
    (weighted) basis matrix is below ``1e-8``.
    """

    def __init__(self, basis, space: HilbertGrid | None = None):
        if isinstance(basis, VectorFamily):
            space, block = basis.space, basis.matrix
        elif isinstance(basis, np.ndarray):
            if space is None:
                raise UsageError("a raw basis block needs its space")
            block = np.asarray(basis, dtype=complex)
        else:
            basis = list(basis)
            if not basis:
                raise UsageError("empty subspace basis")
            space = basis[0].space
            block = np.column_stack([v.coords for v in basis])
        if block.ndim != 2 or block.shape[0] != space.dim:
            raise UsageError("basis block has the wrong shape")
        sv = np.linalg.svd(space.sqrt_weights[:, None] * block, compute_uv=False)
        if sv.size == 0 or sv[-1] <= 1e-8:
            raise UsageError("subspace basis is not numerically linearly independent")
        block = block.copy()
        block.flags.writeable = False
        self.block = block
        self.space = space

    @classmethod
    def full(cls, space: HilbertGrid) -> "SubspaceBasis":
        return cls(np.eye(space.dim, dtype=complex) / space.sqrt_weights[None, :], space)

    @property
    def basis(self) -> list[ComplexVector]:
        return [ComplexVector(self.block[:, j], self.space) for j in range(self.dim)]

    @property
    def dim(self) -> int:
        return self.block.shape[1]

    @property
    def is_full(self) -> bool:
        return self.dim == self.space.dim

    def orthonormal(self) -> np.ndarray:
        return weighted_orthonormalize(self.block, self.space, cutoff=0.0)

    def projector(self) -> LinearMap:
        V = self.orthonormal()
        return LinearMap(V @ (V.conj().T * self.space.weights[None, :]), self.space)

    def distance(self, v: ComplexVector) -> float:
        P = self.projector()
        d = v.coords - P.matrix @ v.coords
        return float(np.sqrt(np.sum(self.space.weights * np.abs(d) ** 2)))

    def contains(self, v: ComplexVector, rtol: float = 1e-8) -> bool:
        return self.distance(v) <= rtol * v.norm()


def synthesis(F: VectorFamily) -> np.ndarray:
    """``dim x N`` synthesis matrix; column ``n`` is member ``n``."""
    return F.matrix


def analysis(F: VectorFamily, v) -> np.ndarray:
    """Coefficients ``<f_n, v>`` for a vector or a ``dim x k`` block."""
    x = v.coords if isinstance(v, ComplexVector) else np.asarray(v)
    return F.space.gram(F.matrix, x)


def frame_operator(F: VectorFamily) -> LinearMap:
    """``S f = sum_n <f_n, f> f_n``."""
    return LinearMap(F.matrix @ (F.matrix.conj().T * F.space.weights[None, :]), F.space)


def _singular_values(F: VectorFamily) -> np.ndarray:
    return np.linalg.svd(F.space.sqrt_weights[:, None] * F.matrix, compute_uv=False)


def frame_bounds(F: VectorFamily) -> FrameBounds:
    """Optimal frame bounds: extreme eigenvalues of the frame operator.

    ``lower == 0`` means the family does not span the space.
    """
    eig = _singular_values(F) ** 2
    upper = float(eig[0]) if eig.size else 0.0
    lower = float(eig[-1]) if eig.size == F.dim else 0.0
    tight = lower > 0 and np.isclose(lower, upper, rtol=1e-10, atol=0.0)
    return FrameBounds(lower, upper, bool(tight))


def bessel_bound(F: VectorFamily) -> float:
    """Optimal Bessel bound, ``||S||``."""
    sv = _singular_values(F)
    return float(sv[0] ** 2) if sv.size else 0.0


def rank(F: VectorFamily) -> int:
    sv = _singular_values(F)
    if sv.size == 0 or sv[0] == 0.0:
        return 0
    return int(np.sum(sv > RANK_CUTOFF * sv[0]))


def excess(F: VectorFamily) -> int:
    """Number of redundant members: ``N - rank(synthesis)``."""
    return len(F) - rank(F)


def is_riesz(F: VectorFamily, tol: float = 1e-10) -> tuple[bool, FrameBounds]:
    """A finite family is a Riesz basis iff it is a frame with zero excess."""
    fb = frame_bounds(F)
    return (fb.lower > tol and excess(F) == 0), fb


def mixed_gram(F: VectorFamily, G: VectorFamily) -> np.ndarray:
    """``M[n, m] = <f_n, g_m>``."""
    if not F.space.compatible(G.space):
        raise UsageError("families live on different spaces")
    return F.space.gram(F.matrix, G.matrix)


def biorthogonality_defect(F: VectorFamily, G: VectorFamily) -> float:
    """``max_{n,m} |<f_n, g_m> - delta_{nm}|``."""
    F._check_partner(G)
    M = mixed_gram(F, G)
    return float(np.max(np.abs(M - np.eye(len(F)))))


def _test_block(tests, space: HilbertGrid) -> np.ndarray:
    if isinstance(tests, ComplexVector):
        tests = [tests]
    if isinstance(tests, np.ndarray):
        block = tests.reshape(space.dim, -1)
    else:
        tests = list(tests)
        for t in tests:
            if not t.space.compatible(space):
                raise UsageError("test vector lives on a different space")
        block = np.column_stack([t.coords for t in tests]) if tests else np.zeros((space.dim, 0))
    return np.asarray(block, dtype=complex)


def _wnorm_cols(block: np.ndarray, space: HilbertGrid) -> np.ndarray:
    return np.sqrt(np.einsum("i,ij->j", space.weights, np.abs(block) ** 2))


def strong_residuals(
    analysis_family: VectorFamily, synthesis_family: VectorFamily, tests: Iterable
) -> list[float]:
    """``|| sum_n <f_n, v> g_n - v ||`` for every test vector ``v``."""
    analysis_family._check_partner(synthesis_family)
    V = _test_block(tests, analysis_family.space)
    C = analysis(analysis_family, V)
    R = synthesis_family.matrix @ C - V
    return [float(r) for r in _wnorm_cols(R, analysis_family.space)]


def partial_sum_trace(
    analysis_family: VectorFamily, synthesis_family: VectorFamily, v: ComplexVector
) -> np.ndarray:
    """``||S_m - v||`` for ``m = 1..N`` with ``S_m = sum_{n<m} <f_n, v> g_n``.

    Members are summed in family order, without any grouping.
    """
    analysis_family._check_partner(synthesis_family)
    c = analysis(analysis_family, v)
    S = np.cumsum(synthesis_family.matrix * c[None, :], axis=1)
    return _wnorm_cols(S - v.coords[:, None], v.space)


def weak_residual(F: VectorFamily, G: VectorFamily, f: ComplexVector, g: ComplexVector) -> float:
    """``| sum_n <f, f_n> <g_n, g> - <f, g> |``."""
    F._check_partner(G)
    space = F.space
    a = np.conj(analysis(F, f))  # <f, f_n>
    b = analysis(G, g)  # <g_n, g>
    ref = np.sum(space.weights * np.conj(f.coords) * g.coords)
    return float(abs(np.dot(a, b) - ref))

"""Monomials, derivatives of the delta distribution, and multiplier deformations.

The pair

    Phi_n(x) = x^n / sqrt(n!),      eta_n = (-1)^n delta^(n) / sqrt(n!)

is biorthonormal, and for ``f, g`` integrable, bounded and entire,
``sum_n <f, Phi_n><eta_n, g> = <f, g>`` formally. Pairings are never formed as
convolutions. Against monomials they are moments ``int conj(f) x^n dx``,
and against delta combs they are Taylor coefficients at the origin:

    <eta_n, g> = g^(n)(0) / sqrt(n!),
    <sum_k c_k delta^(k), g> = sum_k conj(c_k) (-1)^k g^(k)(0).

Multiplying by a smooth ``l`` acts on delta combs through the Leibniz rule
``l delta^(n) = sum_j (-1)^j C(n, j) l^(j)(0) delta^(n-j)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import ContractionFailure, HypothesisViolated, ReciprocalUnderflow, TaylorTooShort, UsageError
from .quadrature import QuadResult, integrate_real_line

__all__ = [
    "AnalyticFunction",
    "DeltaComb",
    "PolyVector",
    "MultiplierScenario",
    "DEFAULT_ORDER",
    "function_registry",
    "make_function",
    "gaussian",
    "exp_quadratic",
    "constant",
    "polynomial",
    "sine_affine",
    "exp_sine",
    "from_taylor",
    "eta",
    "Phi",
    "moment_pairing",
    "inner_product",
    "delta_pairing",
    "eta_pairing",
    "biorthonormality",
    "quasi_identity_partial",
    "make_multiplier_pair",
    "deformed_quasi_identity",
    "sup_deviation",
    "taylor_radius_estimate",
]

#: default Taylor truncation order
DEFAULT_ORDER = 60


@dataclass(frozen=True, eq=False)
class AnalyticFunction:
    """A function on the real line known both pointwise and through its Taylor data at 0.

    ``taylor[k]`` is the ``k``-th Taylor coefficient ``f^(k)(0) / k!``.
    ``decay_class`` is a declared tag; it is spot-checked, not proven.
    """

    evaluator: Callable
    taylor: np.ndarray
    decay_class: str = "schwartz-like"
    name: str = ""

    def __post_init__(self):
        t = np.array(self.taylor, dtype=complex).reshape(-1)
        t.flags.writeable = False
        object.__setattr__(self, "taylor", t)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.asarray(self.evaluator(x), dtype=complex) * np.ones_like(x)

    @property
    def order(self) -> int:
        return self.taylor.size - 1

    @property
    def is_real(self) -> bool:
        return bool(np.all(self.taylor.imag == 0))

    def coefficient(self, k: int) -> complex:
        if k < 0:
            raise UsageError("negative Taylor order")
        if k > self.order:
            raise TaylorTooShort(f"order {k} requested from {self.name or 'function'} stored to order {self.order}")
        return complex(self.taylor[k])

    def derivative_at_zero(self, k: int) -> complex:
        return self.coefficient(k) * math.factorial(k)

    def taylor_eval(self, x, order: int | None = None) -> np.ndarray:
        order = self.order if order is None else order
        if order > self.order:
            raise TaylorTooShort(f"order {order} exceeds stored order {self.order}")
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), self.taylor[: order + 1])

    def self_consistency(self, radius: float = 1.0, order: int = 30, samples: int = 81) -> float:
        """``max |f(x) - T_order f(x)|`` on ``[-radius, radius]``."""
        x = np.linspace(-radius, radius, samples)
        return float(np.max(np.abs(self(x) - self.taylor_eval(x, order))))

    def __mul__(self, other: "AnalyticFunction") -> "AnalyticFunction":
        if not isinstance(other, AnalyticFunction):
            c = complex(other)
            return AnalyticFunction(lambda x, f=self.evaluator: c * f(x), c * self.taylor, self.decay_class, self.name)
        n = min(self.taylor.size, other.taylor.size)
        coeffs = np.convolve(self.taylor[:n], other.taylor[:n])[:n]
        f, g = self.evaluator, other.evaluator
        return AnalyticFunction(
            lambda x: f(x) * g(x), coeffs, _product_class(self, other), f"({self.name})*({other.name})"
        )

    __rmul__ = __mul__

    def conj(self) -> "AnalyticFunction":
        """Complex conjugate on the real line."""
        f = self.evaluator
        return AnalyticFunction(lambda x: np.conj(f(x)), np.conj(self.taylor), self.decay_class, f"conj({self.name})")

    def reciprocal(self, floor: float = 1e-8) -> "AnalyticFunction":
        """``1/f`` with Taylor coefficients from the Cauchy-product recursion.

        Raises
        ------
        ReciprocalUnderflow
            If ``|f(0)|`` is below ``floor``.
        """
        a = self.taylor
        if abs(a[0]) < floor:
            raise ReciprocalUnderflow(f"|f(0)| = {abs(a[0]):.3g} is below {floor:g}")
        b = np.zeros_like(a)
        b[0] = 1.0 / a[0]
        for k in range(1, a.size):
            b[k] = -np.dot(a[1 : k + 1], b[k - 1 :: -1][:k]) / a[0]
        f = self.evaluator
        return AnalyticFunction(lambda x: 1.0 / f(x), b, "bounded-analytic", f"1/({self.name})")


def _product_class(f: AnalyticFunction, g: AnalyticFunction) -> str:
    if "schwartz-like" in (f.decay_class, g.decay_class):
        return "schwartz-like"
    return "bounded-analytic"


def _exp_series(s: np.ndarray) -> np.ndarray:
    """Taylor coefficients of ``exp(s(x))`` from those of ``s`` (``n h_n = sum k s_k h_{n-k}``)."""
    h = np.zeros_like(s, dtype=complex)
    h[0] = np.exp(s[0])
    k = np.arange(s.size)
    for n in range(1, s.size):
        h[n] = np.dot(k[1 : n + 1] * s[1 : n + 1], h[n - 1 :: -1][:n]) / n
    return h


def _sin_series(order: int) -> np.ndarray:
    t = np.zeros(order + 1)
    for k in range(1, order + 1, 2):
        t[k] = (-1) ** ((k - 1) // 2) / math.factorial(k)
    return t


def exp_quadratic(a: float = 1.0, order: int = DEFAULT_ORDER) -> AnalyticFunction:
    """``exp(-a x^2)``; integrable only for ``a > 0``, a growing weight otherwise."""
    t = np.zeros(order + 1)
    for k in range(0, order // 2 + 1):
        t[2 * k] = (-a) ** k / math.factorial(k)
    tag = "schwartz-like" if a > 0 else "growing"
    return AnalyticFunction(lambda x: np.exp(-a * x**2), t, tag, f"exp(-{a:g}x^2)")


def gaussian(order: int = DEFAULT_ORDER) -> AnalyticFunction:
    """``exp(-x^2)``."""
    f = exp_quadratic(1.0, order)
    return AnalyticFunction(f.evaluator, f.taylor, f.decay_class, "exp(-x^2)")


def constant(c: complex = 1.0, order: int = DEFAULT_ORDER) -> AnalyticFunction:
    t = np.zeros(order + 1, dtype=complex)
    t[0] = c
    return AnalyticFunction(lambda x: c * np.ones_like(x), t, "bounded-analytic", f"{c:g}")


def polynomial(coeffs, order: int = DEFAULT_ORDER) -> AnalyticFunction:
    """``sum_j coeffs[j] x^j``; not integrable, so only usable where the other factor decays."""
    c = np.asarray(coeffs, dtype=complex)
    t = np.zeros(max(order, c.size - 1) + 1, dtype=complex)
    t[: c.size] = c
    return AnalyticFunction(lambda x: np.polynomial.polynomial.polyval(x, c), t, "polynomial", f"poly{list(c.real)}")


def sine_affine(c0: float = 2.0, c1: float = 1.0, scale: float = 1.0, order: int = DEFAULT_ORDER) -> AnalyticFunction:
    """``scale * (c0 + c1 sin x)``."""
    t = scale * (c1 * _sin_series(order))
    t[0] += scale * c0
    return AnalyticFunction(
        lambda x: scale * (c0 + c1 * np.sin(x)), t, "bounded-analytic", f"{scale:g}*({c0:g}+{c1:g}sin x)"
    )


def exp_sine(a: float = 0.5, order: int = DEFAULT_ORDER) -> AnalyticFunction:
    """``exp(a sin x)``: bounded, bounded away from zero, with an entire reciprocal."""
    return AnalyticFunction(
        lambda x: np.exp(a * np.sin(x)), _exp_series(a * _sin_series(order)), "bounded-analytic", f"exp({a:g}sin x)"
    )


def from_taylor(coeffs, decay_class: str = "bounded-analytic", name: str = "taylor") -> AnalyticFunction:
    """Function given only by Taylor coefficients; the evaluator is the truncated series."""
    c = np.asarray(coeffs, dtype=complex)
    return AnalyticFunction(lambda x: np.polynomial.polynomial.polyval(x, c), c, decay_class, name)


def function_registry() -> dict[str, Callable[..., AnalyticFunction]]:
    return {
        "gaussian": gaussian,
        "exp_quadratic": exp_quadratic,
        "constant": constant,
        "polynomial": polynomial,
        "sine_affine": sine_affine,
        "exp_sine": exp_sine,
        "taylor": from_taylor,
    }


def make_function(name: str, **params) -> AnalyticFunction:
    reg = function_registry()
    if name not in reg:
        raise UsageError(f"unknown function {name!r}; known: {sorted(reg)}")
    return reg[name](**params)


# -- distributions and polynomials ---------------------------------------------


@dataclass(frozen=True)
class DeltaComb:
    """Finite combination ``sum_k c_k delta^(k)``."""

    coefficients: dict = field(default_factory=dict)

    @property
    def max_order(self) -> int:
        return max(self.coefficients, default=-1)

    def pair(self, g: AnalyticFunction) -> complex:
        return delta_pairing(self, g)

    def multiplied(self, h: AnalyticFunction) -> "DeltaComb":
        """``h * comb`` by the Leibniz rule, using Taylor data of ``h``."""
        out: dict[int, complex] = {}
        for n, c in self.coefficients.items():
            for j in range(n + 1):
                hj = h.derivative_at_zero(j)
                out[n - j] = out.get(n - j, 0.0) + c * (-1) ** j * math.comb(n, j) * hj
        return DeltaComb(out)


@dataclass(frozen=True)
class PolyVector:
    """Polynomial ``sum_j p_j x^j``."""

    coefficients: tuple = ()

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(np.asarray(x, dtype=float), np.asarray(self.coefficients, dtype=complex))


def eta(n: int) -> DeltaComb:
    """``(-1)^n delta^(n) / sqrt(n!)``."""
    return DeltaComb({n: (-1) ** n / math.sqrt(math.factorial(n))})


def Phi(n: int) -> PolyVector:
    """``x^n / sqrt(n!)``."""
    return PolyVector(tuple([0.0] * n + [1.0 / math.sqrt(math.factorial(n))]))


def delta_pairing(comb: DeltaComb, g: AnalyticFunction) -> complex:
    """``<sum c_k delta^(k), g> = sum conj(c_k) (-1)^k g^(k)(0)``; exact in the Taylor data."""
    total = 0j
    for k in sorted(comb.coefficients):
        total += np.conj(comb.coefficients[k]) * (-1) ** k * g.derivative_at_zero(k)
    return complex(total)


def eta_pairing(n: int, g: AnalyticFunction) -> complex:
    """``<eta_n, g> = g^(n)(0) / sqrt(n!) = sqrt(n!) a_n``."""
    return g.coefficient(n) * math.sqrt(math.factorial(n))


def moment_pairing(f: AnalyticFunction, n: int, weight: Callable | None = None, **quad) -> QuadResult:
    """``<f, Phi_n> = int conj(f(x)) x^n dx / sqrt(n!)`` (times ``weight(x)`` if given).

    Raises
    ------
    IntegrationDivergence
        When the integrand does not decay fast enough for the rule to converge.
    """
    if n < 0:
        raise UsageError("negative moment order")
    s = 1.0 / math.sqrt(math.factorial(n))
    if weight is None:
        integrand = lambda x: np.conj(f(x)) * x**n  # noqa: E731
    else:
        integrand = lambda x: np.conj(f(x)) * weight(x) * x**n  # noqa: E731
    r = integrate_real_line(integrand, **quad)
    return QuadResult(r.value * s, r.error * s, r.levels, r.evaluations)


def inner_product(f: AnalyticFunction, g: AnalyticFunction, **quad) -> QuadResult:
    """``<f, g> = int conj(f) g dx``."""
    return integrate_real_line(lambda x: np.conj(f(x)) * g(x), **quad)


def biorthonormality(n: int, m: int) -> int:
    """``<Phi_n, eta_m>`` in exact integer arithmetic.

    The pairing is ``d^m/dx^m (x^n)`` at 0 divided by ``sqrt(n! m!)``; its
    square is formed as a fraction so no floating point is involved.
    """
    if n < 0 or m < 0:
        raise UsageError("orders must be nonnegative")
    deriv = math.factorial(n) if n == m else 0  # d^m x^n at 0
    sq = Fraction(deriv * deriv, math.factorial(n) * math.factorial(m))
    if sq.denominator != 1:
        raise ArithmeticError("non-integral pairing")  # cannot happen
    root = math.isqrt(sq.numerator)
    if root * root != sq.numerator:
        raise ArithmeticError("non-square pairing")  # cannot happen
    return root


def quasi_identity_partial(
    f: AnalyticFunction, g: AnalyticFunction, N: int, **quad
) -> tuple[complex, complex, float]:
    """``(sum_{n<=N} <f, Phi_n><eta_n, g>, <f, g>, |difference|)``, summed in ascending ``n``."""
    terms = [moment_pairing(f, n, **quad).value * eta_pairing(n, g) for n in range(N + 1)]
    total = complex(math.fsum(t.real for t in terms) + 1j * math.fsum(t.imag for t in terms))
    ref = inner_product(f, g, **quad).value
    return total, ref, abs(total - ref)


# -- multiplier deformations ---------------------------------------------------


def sup_deviation(h: Callable, radius: float = 60.0, samples: int = 24001) -> tuple[float, float]:
    """``(sup |h(x)|, argmax)`` estimated on a dense grid and refined locally."""
    x = np.linspace(-radius, radius, samples)
    v = np.abs(h(x))
    i = int(np.argmax(v))
    step = x[1] - x[0]
    lo, hi = x[max(i - 1, 0)], x[min(i + 1, samples - 1)]
    if hi - lo >= step:
        r = minimize_scalar(lambda t: -abs(complex(h(np.array([t]))[0])), bounds=(lo, hi), method="bounded",
                            options={"xatol": 1e-12})
        if -r.fun > v[i]:
            return float(-r.fun), float(r.x)
    return float(v[i]), float(x[i])


def taylor_radius_estimate(f: AnalyticFunction, tail: int = 20) -> float:
    """Root-test estimate ``1 / max_k |a_k|^(1/k)`` over the last ``tail`` stored orders.

    Grows without bound (with the truncation order) for entire functions.
    """
    k = np.arange(max(1, f.order - tail + 1), f.order + 1)
    a = np.abs(f.taylor[k])
    with np.errstate(divide="ignore"):
        roots = np.where(a > 0, a ** (1.0 / k), 0.0)
    top = roots.max() if roots.size else 0.0
    return math.inf if top == 0 else float(1.0 / top)


@dataclass(frozen=True, eq=False)
class MultiplierScenario:
    """Deformation ``phi_n = m Phi_n``, ``psi_n = l eta_n`` with duals ``m^{-1} eta_n`` and ``l^{-1} Phi_n``.

    ``contraction`` is ``sup |m l - 1|`` over the sampling grid, the bound
    used for ``||M^dagger L - 1||``. ``reciprocal_radius`` is the estimated
    Taylor radius of ``1/m`` at 0; a finite value means ``1/m`` is not
    entire and the deformed expansions need not converge.
    """

    m: AnalyticFunction
    l: AnalyticFunction
    m_inv: AnalyticFunction
    l_inv: AnalyticFunction
    contraction: float
    argmax: float
    reciprocal_radius: dict = field(default_factory=dict)

    def phi(self, n: int) -> Callable:
        s = 1.0 / math.sqrt(math.factorial(n))
        m = self.m
        return lambda x: m(x) * x**n * s

    def psi(self, n: int) -> DeltaComb:
        return eta(n).multiplied(self.l)

    def phi_tilde(self, n: int) -> DeltaComb:
        return eta(n).multiplied(self.m_inv)

    def psi_tilde(self, n: int) -> Callable:
        s = 1.0 / math.sqrt(math.factorial(n))
        li = self.l_inv
        return lambda x: li(x) * x**n * s


def make_multiplier_pair(
    m: AnalyticFunction, l: AnalyticFunction, radius: float = 60.0, floor: float = 1e-8
) -> MultiplierScenario:
    """Validate multipliers ``m, l`` and package the deformed families.

    Raises
    ------
    HypothesisViolated
        If ``m`` or ``l`` is not real-valued.
    ReciprocalUnderflow
        If ``|m|`` or ``|l|`` drops below ``floor`` on the sampling grid.
    ContractionFailure
        If ``sup |m l - 1| >= 1``.
    """
    if not (m.is_real and l.is_real):
        raise HypothesisViolated("multipliers must be real-valued")
    x = np.linspace(-radius, radius, 24001)
    for name, h in (("m", m), ("l", l)):
        low = float(np.min(np.abs(h(x))))
        if low < floor:
            raise ReciprocalUnderflow(f"|{name}| reaches {low:.3g} on the sampling grid")
    c, at = sup_deviation(lambda t: m(t) * l(t) - 1.0, radius)
    if not c < 1.0:
        raise ContractionFailure(f"sup |m l - 1| = {c:.6g} is not below 1", alpha=c)
    m_inv, l_inv = m.reciprocal(floor), l.reciprocal(floor)
    radii = {"m_inv": taylor_radius_estimate(m_inv), "l": taylor_radius_estimate(l)}
    return MultiplierScenario(m, l, m_inv, l_inv, c, at, radii)


def deformed_quasi_identity(
    sc: MultiplierScenario, f: AnalyticFunction, g: AnalyticFunction, N: int, chain: str = "phi", **quad
) -> tuple[complex, complex, float]:
    """Partial sums of a deformed resolution of the identity.

    ``chain="phi"``: ``sum_{n<=N} <f, phi_n><phi~_n, g>`` evaluated as
    ``<m f, Phi_n> <eta_n, m^{-1} g>`` (real ``m``).

    ``chain="psi"``: ``sum_{n<=N} <f, psi_n><psi~_n, g>`` evaluated as
    ``conj(<eta_n, l f>) <Phi_n, l^{-1} g>`` (real ``l``).

    Returns ``(partial sum, <f, g>, |difference|)``.
    """
    if chain == "phi":
        left = sc.m * f
        right = sc.m_inv * g
        terms = [moment_pairing(left, n, **quad).value * eta_pairing(n, right) for n in range(N + 1)]
    elif chain == "psi":
        left = sc.l * f
        right = sc.l_inv * g
        terms = [
            np.conj(eta_pairing(n, left)) * np.conj(moment_pairing(right, n, **quad).value) for n in range(N + 1)
        ]
    else:
        raise UsageError(f"chain must be 'phi' or 'psi', got {chain!r}")
    total = complex(math.fsum(t.real for t in terms) + 1j * math.fsum(t.imag for t in terms))
    ref = inner_product(f, g, **quad).value
    return total, ref, abs(total - ref)

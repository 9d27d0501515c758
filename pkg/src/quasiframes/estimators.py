"""scikit-learn style front end for the dual construction."""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import check_lambda, check_pair, check_rows, check_space
from .errors import UsageError
from .perturbation import build_duals_strong, build_duals_weak
from .sequences import SubspaceBasis, VectorFamily

__all__ = ["PerturbationDual"]


class PerturbationDual(TransformerMixin, BaseEstimator):
    """Dual families of a perturbed pair ``(phi, psi)``.

    ``fit`` takes the two families as ``(n_members, dim)`` arrays (one
    member per row), certifies ``||lam Q - I|| < 1`` and stores the duals.
    ``transform`` returns analysis coefficients ``<phi_n, x>`` and
    ``inverse_transform`` synthesises ``sum_n c_n phi~_n``, so that
    ``inverse_transform(transform(X))`` reproduces ``X`` on the certified
    subspace.

    Parameters
    ----------
    lam : complex, default=1.0
        Nonzero scaling in the contraction ``||lam Q - I||``.
    mode : {"strong", "weak"}, default="strong"
        Which residuals are evaluated during ``fit``.
    subspace : array of shape (k, dim), optional
        Rows spanning the subspace on which reconstruction is required
        (``mode="strong"`` only). Defaults to the whole space.
    weights : array of shape (dim,), optional
        Positive weights of the inner product; unit weights by default.
    tol, max_terms
        Neumann-series controls.

    Attributes
    ----------
    Q_, Q_inv_ : ndarray of shape (dim, dim)
    phi_tilde_, psi_tilde_ : ndarray of shape (n_members, dim)
    alpha_ : float
    certificate_ : PerturbationCertificate
    """

    def __init__(self, lam=1.0, mode="strong", subspace=None, weights=None, tol=1e-10, max_terms=10_000):
        self.lam = lam
        self.mode = mode
        self.subspace = subspace
        self.weights = weights
        self.tol = tol
        self.max_terms = max_terms

    def fit(self, phi, psi):
        lam = check_lambda(self.lam)
        A, B = check_pair(phi, psi)
        space = check_space(self.weights, A.shape[1])
        F = VectorFamily.from_rows(A, space, "phi")
        G = VectorFamily.from_rows(B, space, "psi")
        if self.mode == "strong":
            D = None
            if self.subspace is not None:
                D = SubspaceBasis(check_rows(self.subspace, "subspace", A.shape[1]).T, space)
            cert, dual = build_duals_strong(F, G, lam, D, tol=self.tol, max_terms=self.max_terms)
        elif self.mode == "weak":
            if self.subspace is not None:
                raise UsageError("subspace restriction is only available in strong mode")
            cert, dual = build_duals_weak(F, G, lam, tol=self.tol, max_terms=self.max_terms)
        else:
            raise UsageError(f"mode must be 'strong' or 'weak', got {self.mode!r}")
        self.space_ = space
        self.n_features_in_ = A.shape[1]
        self.certificate_ = cert
        self.dual_ = dual
        self.alpha_ = cert.constants["alpha"]
        self.Q_ = np.array(dual.Q.matrix)
        self.Q_inv_ = np.array(dual.Qinv.matrix)
        self.phi_ = A
        self.phi_tilde_ = dual.phi_tilde.matrix.T.copy()
        self.psi_tilde_ = dual.psi_tilde.matrix.T.copy()
        return self

    def transform(self, X):
        """Coefficients ``<phi_n, x>`` for each row ``x``; shape ``(n_samples, n_members)``."""
        check_is_fitted(self, "certificate_")
        X = check_rows(X, "X", self.n_features_in_)
        return (self.phi_.conj() @ (self.space_.weights[:, None] * X.T)).T

    def inverse_transform(self, C):
        """Synthesis ``sum_n c_n phi~_n`` for each coefficient row."""
        check_is_fitted(self, "certificate_")
        C = check_rows(C, "C", self.phi_tilde_.shape[0])
        return C @ self.phi_tilde_

"""Deterministic dense complex linear algebra primitives.

Matrices are plain ``numpy`` arrays with ``complex128`` entries; every function
validates shape and finiteness before computing.  These routines are the
substrate for all higher modules: operator norms, spectra of normal matrices,
span membership, and numerical rank.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, NotNormalError

#: Default relative tolerance used across the package.
TOL_NUM = 1e-9


def as_matrix(a) -> np.ndarray:
    """Coerce to a finite 2-d complex array, raising DimensionError otherwise."""
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise DimensionError(f"expected a nonempty 2-d matrix, got shape {m.shape}")
    if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise DimensionError("matrix has non-finite entries")
    return m


def as_vector(v) -> np.ndarray:
    m = np.asarray(v, dtype=np.complex128).ravel()
    if m.size == 0:
        raise DimensionError("expected a nonempty vector")
    if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise DimensionError("vector has non-finite entries")
    return m


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues and an orthonormal eigenbasis of a normal matrix.

    ``eigenvectors`` is unitary with eigenvectors as columns, so that
    ``A = Q diag(eigenvalues) Q*`` up to the construction tolerance.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        q = self.eigenvectors
        return q @ np.diag(self.eigenvalues) @ q.conj().T


def op_norm(a) -> float:
    """Largest singular value of ``a`` (the operator norm on column vectors)."""
    m = as_matrix(a)
    return float(np.linalg.svd(m, compute_uv=False)[0])


def eig_normal(a, tol: float = TOL_NUM) -> SpectralDecomposition:
    """Eigendecomposition of a normal matrix with an orthonormal eigenbasis.

    Uses a unitary (Schur) triangularization followed by diagonal extraction;
    the off-diagonal part of the triangular factor is the normality defect and
    must be small relative to ``||a||``.

    Raises:
        DimensionError: if ``a`` is not square.
        NotNormalError: if ``a a* - a* a`` exceeds ``tol * ||a||^2``.
    """
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {m.shape}")
    nrm = op_norm(m)
    if nrm == 0.0:
        n = m.shape[0]
        return SpectralDecomposition(np.zeros(n, dtype=np.complex128), np.eye(n, dtype=np.complex128))
    defect = op_norm(m @ m.conj().T - m.conj().T @ m) / nrm**2
    if defect > tol:
        raise NotNormalError(defect, tol)
    t, q = scipy.linalg.schur(m, output="complex")
    # For a normal matrix the Schur form is diagonal up to the defect.
    off = t - np.diag(np.diag(t))
    if op_norm(off) > max(tol, np.sqrt(defect)) * nrm * 10:
        raise NotNormalError(op_norm(off) / nrm**2, tol)
    return SpectralDecomposition(np.diag(t).copy(), q)


def span_membership(v, basis, tol: float = TOL_NUM):
    """Minimum-norm least-squares coefficients of ``v`` in ``span(basis)``.

    Returns the coefficient vector ``c`` with ``||sum c_j b_j - v|| <= tol *
    max(1, ||v||)``, or ``None`` when the least-squares residual misses that
    bound.
    """
    w = as_vector(v)
    cols = [as_vector(b) for b in basis]
    if not cols:
        raise DimensionError("basis must be nonempty")
    if any(c.size != w.size for c in cols):
        raise DimensionError("basis vectors must match the length of v")
    mat = np.column_stack(cols)
    coeffs = np.linalg.pinv(mat, rcond=1e-13) @ w
    residual = np.linalg.norm(mat @ coeffs - w)
    if residual <= tol * max(1.0, np.linalg.norm(w)):
        return coeffs
    return None


def gram_rank(vectors, tol: float = TOL_NUM) -> int:
    """Numerical rank of the span of the given vectors.

    Counts singular values of the stacked matrix exceeding ``tol`` times the
    largest one.
    """
    cols = [as_vector(v) for v in vectors]
    if not cols:
        raise DimensionError("need at least one vector")
    n = cols[0].size
    if any(c.size != n for c in cols):
        raise DimensionError("vectors must have equal lengths")
    s = np.linalg.svd(np.column_stack(cols), compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def kron(a, b) -> np.ndarray:
    """Tensor product with the standard block layout ``A_ij * B``."""
    return np.kron(as_matrix(a), as_matrix(b))


def vec(a) -> np.ndarray:
    """Row-major vectorization of a matrix, for span/rank tests."""
    return as_matrix(a).ravel()

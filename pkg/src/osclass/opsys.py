"""Concrete finite-dimensional operator systems as matrix spans.

An operator system here is a linearly independent list of k x k matrices whose
span contains the identity and is closed under adjoints.  The module provides
construction from generators, membership diagnostics, amplified (matrix-level)
norms, and the minimal operator-space norm driven by a polyhedral dual ball.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .errors import DimensionError, EmptySystemError, NoUnitError
from .linalg import TOL_NUM, as_matrix, gram_rank, op_norm, span_membership, vec


@dataclass(frozen=True)
class OperatorSystemSpan:
    """A self-adjoint unital span of matrices in M_k with a distinguished unit.

    Attributes:
        ambient_dim: k, the size of the ambient matrix algebra.
        basis: linearly independent k x k matrices spanning the system.
        unit_coeffs: coefficients expressing the identity I_k in the basis.
    """

    ambient_dim: int
    basis: tuple
    unit_coeffs: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.basis)

    def assemble(self, coeffs) -> np.ndarray:
        """The matrix sum_j coeffs_j basis_j."""
        c = np.asarray(coeffs, dtype=np.complex128).ravel()
        if c.size != self.dim:
            raise DimensionError(f"expected {self.dim} coefficients, got {c.size}")
        out = np.zeros((self.ambient_dim, self.ambient_dim), dtype=np.complex128)
        for cj, bj in zip(c, self.basis):
            out += cj * bj
        return out

    def unit(self) -> np.ndarray:
        return self.assemble(self.unit_coeffs)


@dataclass(frozen=True)
class AmplifiedElement:
    """An element of M_n(X) given by an n x n array of coefficient vectors."""

    level: int
    coeffs: np.ndarray  # shape (n, n, N)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.ndim != 3 or c.shape[0] != self.level or c.shape[1] != self.level:
            raise DimensionError(f"coeffs must have shape (n, n, N), got {c.shape}")
        object.__setattr__(self, "coeffs", c)


@dataclass(frozen=True)
class SystemCheck:
    """Result of the operator-system membership test with diagnostics."""

    ok: bool
    failed: str | None = None
    detail: str = ""

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class PolyhedralDualBall:
    """A dual unit ball given as the absolutely convex hull of finitely many functionals."""

    dim: int
    functionals: tuple = field(default=())

    def __post_init__(self):
        if not self.functionals:
            raise DimensionError("functional list must be nonempty")
        fs = tuple(linalg.as_vector(f) for f in self.functionals)
        for f in fs:
            if f.size != self.dim:
                raise DimensionError("functional length must match dim")
            if np.linalg.norm(f) == 0.0:
                raise DimensionError("functionals must be nonzero")
        object.__setattr__(self, "functionals", fs)


def build_system(generators, include_identity: bool = True, tol: float = TOL_NUM) -> OperatorSystemSpan:
    """Build the operator system spanned by I and the generators with adjoints.

    Basis extraction is greedy in a fixed order (identity first, then each
    generator followed by its adjoint, in input order), skipping any candidate
    that does not increase the numerical rank.  This makes ``unit_coeffs``
    reproducible across runs.
    """
    gens = [as_matrix(g) for g in generators]
    if not gens and not include_identity:
        raise EmptySystemError("need at least one generator or include_identity")
    k = gens[0].shape[0] if gens else None
    for g in gens:
        if g.shape[0] != g.shape[1]:
            raise DimensionError("generators must be square")
        if g.shape[0] != k:
            raise DimensionError("generators must have equal sizes")
    if k is None:
        raise EmptySystemError("cannot infer ambient dimension without generators")
    candidates = []
    if include_identity:
        candidates.append(np.eye(k, dtype=np.complex128))
    for g in gens:
        candidates.append(g)
        candidates.append(g.conj().T)
    basis: list[np.ndarray] = []
    for c in candidates:
        if np.linalg.norm(c) == 0.0:
            continue
        if not basis:
            basis.append(c)
            continue
        if gram_rank([vec(b) for b in basis] + [vec(c)], tol) > len(basis):
            basis.append(c)
    if not basis:
        raise EmptySystemError("generators span the zero space")
    unit = find_unit_coeffs(basis, tol)
    return OperatorSystemSpan(ambient_dim=k, basis=tuple(basis), unit_coeffs=unit)


def is_operator_system(matrices, tol: float = TOL_NUM) -> SystemCheck:
    """Decide whether a tuple of matrices spans an operator system.

    Checks, in order: linear independence of the tuple, closure of the span
    under adjoints, and membership of the identity in the span.  The first
    failed condition is named in the diagnostics.
    """
    ms = [as_matrix(m) for m in matrices]
    if not ms:
        raise DimensionError("tuple must be nonempty")
    k = ms[0].shape[0]
    for m in ms:
        if m.shape != (k, k):
            raise DimensionError("matrices must be square of equal size")
    vs = [vec(m) for m in ms]
    if gram_rank(vs, tol) < len(ms):
        return SystemCheck(False, "independence", "tuple is linearly dependent")
    for i, m in enumerate(ms):
        if span_membership(vec(m.conj().T), vs, tol) is None:
            return SystemCheck(False, "adjoints", f"adjoint of element {i} is outside the span")
    if span_membership(np.eye(k, dtype=np.complex128).ravel(), vs, tol) is None:
        return SystemCheck(False, "unit", "identity is not in the span")
    return SystemCheck(True)


def find_unit_coeffs(basis, tol: float = TOL_NUM) -> np.ndarray:
    """Minimum-norm coefficients reproducing the identity in the given span."""
    ms = [as_matrix(b) for b in basis]
    k = ms[0].shape[0]
    coeffs = span_membership(np.eye(k, dtype=np.complex128).ravel(), [vec(m) for m in ms], tol)
    if coeffs is None:
        raise NoUnitError("identity is not in the span of the basis")
    return coeffs


def assemble_amplified(x: OperatorSystemSpan, a: AmplifiedElement) -> np.ndarray:
    """The nk x nk matrix sum_ij E_ij otimes (coeffs_ij . basis)."""
    n, k = a.level, x.ambient_dim
    if a.coeffs.shape[2] != x.dim:
        raise DimensionError(f"coefficient vectors must have length {x.dim}")
    out = np.zeros((n * k, n * k), dtype=np.complex128)
    for i in range(n):
        for j in range(n):
            out[i * k:(i + 1) * k, j * k:(j + 1) * k] = x.assemble(a.coeffs[i, j])
    return out


def amplified_norm(x: OperatorSystemSpan, a: AmplifiedElement) -> float:
    """Norm of an element of M_n(X), computed in the concrete representation."""
    return op_norm(assemble_amplified(x, a))


def min_os_norm(ball: PolyhedralDualBall, x) -> float:
    """Minimal operator-space norm of an n x n array of vectors.

    Computes ``max over listed functionals phi of op_norm([phi(x_ij)])``.  This
    equals the supremum over the whole dual ball: the objective is convex and
    invariant under unimodular scaling of phi, so it is attained at one of the
    listed extreme points.
    """
    arr = np.asarray(x, dtype=np.complex128)
    if arr.ndim == 1:
        arr = arr.reshape(1, 1, -1)
    if arr.ndim != 3 or arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"expected an n x n array of vectors, got shape {arr.shape}")
    if arr.shape[2] != ball.dim:
        raise DimensionError("vector length must match ball.dim")
    best = 0.0
    for phi in ball.functionals:
        applied = arr @ phi
        best = max(best, op_norm(applied))
    return best

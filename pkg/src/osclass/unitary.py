"""Classification of operator systems generated by a single unitary.

The complete invariant is the spectrum on the unit circle up to rigid motions
(rotations ``z -> lam z`` and reflections ``z -> lam conj(z)``).  This module
extracts spectra, canonicalizes them as circular gap sequences, searches for
witnessing motions, and decides complete order isomorphism either through the
cardinality/rigid-motion fast path or through an exact finite-spectrum oracle
that enumerates spectrum bijections and tests the three-term span conditions.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import CapacityError, DimensionError, NotUnitaryError
from .linalg import TOL_NUM, as_matrix, eig_normal, op_norm

TWO_PI = 2.0 * np.pi

#: Dedup tolerance for spectrum angles (circle distance).
SPECTRUM_DEDUP_TOL = 1e-8

#: Slack for tolerance-aware lexicographic comparison of gap sequences.
NECKLACE_SLACK = 1e-9


def circle_dist(a: float, b: float) -> float:
    """Shortest arc distance between two angles."""
    d = abs(a - b) % TWO_PI
    return min(d, TWO_PI - d)


@dataclass(frozen=True)
class CircleSet:
    """A finite subset of the unit circle, stored as sorted angles in [0, 2pi)."""

    angles: np.ndarray
    tol: float = SPECTRUM_DEDUP_TOL

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=np.float64).ravel()
        if a.size == 0:
            raise DimensionError("circle set must be nonempty")
        a = np.sort(a % TWO_PI)
        if a.size > 1:
            gaps = np.diff(a)
            wrap = TWO_PI - a[-1] + a[0]
            if np.min(gaps) <= self.tol or wrap <= self.tol:
                raise DimensionError("angles are not separated beyond the dedup tolerance")
        object.__setattr__(self, "angles", a)

    @property
    def size(self) -> int:
        return int(self.angles.size)

    def points(self) -> np.ndarray:
        """The set as complex points on the unit circle."""
        return np.exp(1j * self.angles)

    def gaps(self) -> np.ndarray:
        """Circular gap sequence, starting at the gap after the first angle."""
        if self.size == 1:
            return np.array([TWO_PI])
        g = np.diff(self.angles)
        return np.append(g, TWO_PI - self.angles[-1] + self.angles[0])


@dataclass(frozen=True)
class CanonicalNecklace:
    """Canonical rotation of a circular gap sequence; the rigid-motion invariant."""

    gaps: np.ndarray
    reflected: bool

    def __eq__(self, other) -> bool:
        if not isinstance(other, CanonicalNecklace):
            return NotImplemented
        if self.gaps.size != other.gaps.size:
            return False
        return bool(np.all(np.abs(self.gaps - other.gaps) <= NECKLACE_SLACK))

    def __hash__(self):
        return hash(self.gaps.size)


@dataclass(frozen=True)
class RigidMotion:
    """A circle isometry ``z -> lam z`` (reflect=False) or ``z -> lam conj(z)``."""

    rotation: float
    reflect: bool = False

    def apply_angles(self, angles: np.ndarray) -> np.ndarray:
        a = -np.asarray(angles) if self.reflect else np.asarray(angles)
        return np.sort((a + self.rotation) % TWO_PI)


@dataclass(frozen=True)
class CoisDecision:
    """Outcome of a complete-order-isomorphism decision."""

    verdict: str  # "Isomorphic" | "NotIsomorphic" | "Unknown"
    method: str  # "theorem-fast-path" | "oracle"
    certificate: dict | None = field(default=None)


def spectrum(u, tol: float = TOL_NUM) -> CircleSet:
    """Deduplicated spectrum of a unitary as a CircleSet.

    Eigenvalues within ``tol`` of the unit circle are projected radially; the
    angle set is deduplicated at circle distance ``SPECTRUM_DEDUP_TOL``.
    """
    m = as_matrix(u)
    if m.shape[0] != m.shape[1]:
        raise DimensionError("unitary must be square")
    defect = op_norm(m.conj().T @ m - np.eye(m.shape[0]))
    if defect > tol:
        raise NotUnitaryError(defect, tol)
    eigs = eig_normal(m, tol=max(tol, 1e-8)).eigenvalues
    moduli = np.abs(eigs)
    if np.any(np.abs(moduli - 1.0) > max(tol, 1e-8) * 10):
        raise NotUnitaryError(float(np.max(np.abs(moduli - 1.0))), tol)
    angles = np.sort(np.angle(eigs / moduli) % TWO_PI)
    deduped = [angles[0]]
    for a in angles[1:]:
        if circle_dist(a, deduped[-1]) > SPECTRUM_DEDUP_TOL:
            deduped.append(a)
    # the first and last retained angles can still collide across the wrap
    if len(deduped) > 1 and circle_dist(deduped[0], deduped[-1]) <= SPECTRUM_DEDUP_TOL:
        deduped.pop()
    return CircleSet(np.array(deduped))


def _lex_less(a: np.ndarray, b: np.ndarray, slack: float = NECKLACE_SLACK) -> bool:
    """Tolerance-aware strict lexicographic comparison."""
    for x, y in zip(a, b):
        if x < y - slack:
            return True
        if x > y + slack:
            return False
    return False


def _min_rotation(seq: np.ndarray) -> np.ndarray:
    """Lexicographically least cyclic rotation under the tolerance-aware order."""
    m = seq.size
    best = seq
    for r in range(1, m):
        cand = np.roll(seq, -r)
        if _lex_less(cand, best):
            best = cand
    return best


def canonical_form(s: CircleSet) -> CanonicalNecklace:
    """Canonical necklace of a circle set: the rigid-motion complete invariant.

    The gap sequence is rotated to its lexicographic minimum and compared with
    the minimum over rotations of the reversed sequence (a reflection of the
    circle reverses the gap order); ties break toward unreflected.
    """
    gaps = s.gaps()
    plain = _min_rotation(gaps)
    mirrored = _min_rotation(gaps[::-1].copy())
    if _lex_less(mirrored, plain):
        return CanonicalNecklace(gaps=mirrored, reflected=True)
    return CanonicalNecklace(gaps=plain, reflected=False)


def _hausdorff_angles(a: np.ndarray, b: np.ndarray) -> float:
    d = np.array([[circle_dist(x, y) for y in b] for x in a])
    return max(float(np.max(np.min(d, axis=1))), float(np.max(np.min(d, axis=0))))


def rigid_equivalent(s: CircleSet, t: CircleSet, tol: float = 1e-8):
    """A rigid motion carrying ``t`` onto ``s``, or None.

    Tries the 2 * |t| candidate motions aligning each point of ``t`` (plain or
    reflected) to the first point of ``s`` and returns the passing candidate
    with the smallest Hausdorff residual.
    """
    if s.size != t.size:
        return None
    best = None
    best_resid = np.inf
    for reflect in (False, True):
        base = (-t.angles) % TWO_PI if reflect else t.angles
        for j in range(t.size):
            rot = (s.angles[0] - base[j]) % TWO_PI
            moved = np.sort((base + rot) % TWO_PI)
            resid = _hausdorff_angles(moved, s.angles)
            if resid <= tol and resid < best_resid:
                best = RigidMotion(rotation=float(rot), reflect=reflect)
                best_resid = resid
    return best


def cois_unitary_theorem(u, v, tol: float = TOL_NUM) -> CoisDecision:
    """Fast-path complete-order-isomorphism decision for two unitaries.

    Small spectra (either side with at most 3 points) are decided by
    cardinality alone; spectra with at least 5 points on both sides by rigid
    equivalence of the spectra.  When a 4-point spectrum is involved and no
    rigid motion matches, the verdict is Unknown: the 4-point case is open.
    """
    ss, tt = spectrum(u, tol), spectrum(v, tol)
    m, mp = ss.size, tt.size
    method = "theorem-fast-path"
    if min(m, mp) <= 3:
        if m == mp:
            return CoisDecision("Isomorphic", method, {"cardinality": m})
        return CoisDecision("NotIsomorphic", method, {"cardinalities": [m, mp]})
    motion = rigid_equivalent(ss, tt, tol=max(tol, 1e-8))
    if motion is not None:
        return CoisDecision(
            "Isomorphic", method,
            {"motion": {"rotation": motion.rotation, "reflect": motion.reflect}},
        )
    if m == 4 or mp == 4:
        return CoisDecision("Unknown", method, {"reason": "4-point spectra without a rigid motion"})
    return CoisDecision("NotIsomorphic", method, {"reason": "no rigid motion matches the spectra"})


def _span_fit(target: np.ndarray, points: np.ndarray):
    """Least-squares fit of ``target`` in span{1, z, conj z} at the given points."""
    mat = np.column_stack([np.ones_like(points), points, points.conj()])
    coeffs = np.linalg.pinv(mat, rcond=1e-13) @ target
    resid = float(np.linalg.norm(mat @ coeffs - target))
    return coeffs, resid


def _bijection_order(ss: CircleSet, tt: CircleSet, tol: float):
    """All bijections as index permutations, rigid-motion candidates first."""
    m = ss.size
    preferred = []
    seen = set()
    for reflect in (False, True):
        base = (-tt.angles) % TWO_PI if reflect else tt.angles
        for j in range(m):
            rot = (ss.angles[0] - base[j]) % TWO_PI
            moved = (base + rot) % TWO_PI
            # match each source angle to its nearest moved target angle
            perm = []
            used = set()
            ok = True
            for a in ss.angles:
                dists = [circle_dist(a, mb) for mb in moved]
                idx = int(np.argmin(dists))
                if idx in used or dists[idx] > max(tol, 1e-6):
                    ok = False
                    break
                used.add(idx)
                perm.append(idx)
            if ok:
                key = tuple(perm)
                if key not in seen:
                    seen.add(key)
                    preferred.append(key)
    for perm in itertools.permutations(range(m)):
        if perm not in seen:
            seen.add(perm)
            preferred.append(perm)
    return preferred


def cois_unitary_oracle(u, v, tol: float = TOL_NUM, cap: int = 9) -> CoisDecision:
    """Exact finite-spectrum oracle for complete order isomorphism.

    Both systems contain the generator products, so a complete order
    isomorphism extends to a *-isomorphism of the generated commutative
    C*-algebras, i.e. a bijection ``h`` of the spectra.  The span condition
    becomes: ``h`` lies in span{1, z, conj z} on the source spectrum and
    ``h^-1`` in span{1, w, conj w} on the target.  All bijections are
    enumerated (rigid-motion candidates first) with a fixed deterministic
    order, so the first accepted certificate is schedule-independent.
    """
    ss, tt = spectrum(u, tol), spectrum(v, tol)
    m = ss.size
    if m != tt.size:
        return CoisDecision("NotIsomorphic", "oracle", {"cardinalities": [m, tt.size]})
    if m > cap:
        raise CapacityError(f"spectrum size {m} exceeds enumeration cap {cap}")
    zs, ws = ss.points(), tt.points()
    accept = max(tol, 1e-8) * np.sqrt(m)
    order = _bijection_order(ss, tt, tol)
    perms = np.array(order, dtype=int)
    invs = np.argsort(perms, axis=1)
    # residual of the least-squares fit = norm of the complementary projection
    mat_f = np.column_stack([np.ones_like(zs), zs, zs.conj()])
    mat_b = np.column_stack([np.ones_like(ws), ws, ws.conj()])
    comp_f = np.eye(m) - mat_f @ np.linalg.pinv(mat_f, rcond=1e-13)
    comp_b = np.eye(m) - mat_b @ np.linalg.pinv(mat_b, rcond=1e-13)
    fwd_targets = ws[perms]  # row r: h(z_i) = w_{perms[r, i]}
    bwd_targets = zs[invs]  # row r: h^-1(w_j) = z_{invs[r, j]}
    fwd_resids = np.linalg.norm(comp_f @ fwd_targets.T, axis=0)
    bwd_resids = np.linalg.norm(comp_b @ bwd_targets.T, axis=0)
    passing = np.nonzero((fwd_resids <= accept) & (bwd_resids <= accept))[0]
    if passing.size:
        r = int(passing[0])
        fwd_coeffs, fwd_resid = _span_fit(fwd_targets[r], zs)
        bwd_coeffs, bwd_resid = _span_fit(bwd_targets[r], ws)
        return CoisDecision(
            "Isomorphic", "oracle",
            {
                "bijection": list(order[r]),
                "forward_coeffs": fwd_coeffs,
                "backward_coeffs": bwd_coeffs,
                "residuals": [fwd_resid, bwd_resid],
            },
        )
    if len(order) <= 720:
        failures = [
            {"bijection": list(order[r]),
             "residuals": [float(fwd_resids[r]), float(bwd_resids[r])]}
            for r in range(len(order))
        ]
        return CoisDecision("NotIsomorphic", "oracle", {"failed_bijections": failures})
    summary = {
        "failed_count": len(order),
        "min_residuals": [float(np.min(fwd_resids)), float(np.min(bwd_resids))],
    }
    return CoisDecision("NotIsomorphic", "oracle", summary)


def validate_unitary_image(alpha: complex, beta: complex, gamma: complex,
                           tol: float = TOL_NUM) -> bool:
    """Check the coefficient relations forced on the image of a unitary.

    A *-isomorphism sending ``U`` to ``alpha I + beta V + gamma V*`` with
    five-point spectra forces all four displayed relations, hence ``alpha = 0``
    and exactly one of ``|beta| = 1``, ``|gamma| = 1``.
    """
    checks = [
        abs(abs(alpha) ** 2 + abs(beta) ** 2 + abs(gamma) ** 2 - 1.0),
        abs(np.conj(alpha) * beta + alpha * np.conj(gamma)),
        abs(alpha * np.conj(beta) + np.conj(alpha) * gamma),
        abs(np.conj(beta) * gamma),
    ]
    return all(c <= max(tol, 1e-8) for c in checks)


def four_point_obstruction(u, v, tol: float = TOL_NUM) -> dict:
    """Determinant report for the 4-point obstruction.

    For each assignment of the source spectrum to the rows indexed by the
    target spectrum, reports the determinant of the 4 x 4 matrix with columns
    (assignment, ones, target spectrum, conjugate target spectrum).  A nonzero
    determinant certifies the assignment is outside span{I, V, V*}.
    """
    ss, tt = spectrum(u, tol), spectrum(v, tol)
    if ss.size != 4 or tt.size != 4:
        raise DimensionError("both spectra must have exactly 4 points")
    zs, ws = ss.points(), tt.points()
    fixed = np.column_stack([np.ones(4, dtype=np.complex128), ws, ws.conj()])
    records = []
    for perm in itertools.permutations(range(4)):
        assignment = zs[np.array(perm)]
        mat = np.column_stack([assignment, fixed])
        det = complex(np.linalg.det(mat))
        records.append({"assignment": list(perm), "determinant": det})
    min_mod = min(abs(r["determinant"]) for r in records)
    return {
        "determinants": records,
        "all_nonzero": min_mod > max(tol, 1e-8),
        "min_modulus": min_mod,
    }

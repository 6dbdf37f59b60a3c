import numpy as np
import pytest

from osclass.errors import CapacityError, DimensionError, NotUnitaryError
from osclass.unitary import (TWO_PI, CircleSet, canonical_form, circle_dist,
                             cois_unitary_oracle, cois_unitary_theorem,
                             four_point_obstruction, rigid_equivalent,
                             spectrum, validate_unitary_image)

FOUR_POINT_U = np.diag([1, -1, 1j, -1j])
FOUR_POINT_V = np.diag([1, (1 + 1j) / np.sqrt(2), 1j, -1])


def brute_canonical_gaps(angles):
    """Independent necklace oracle: plain lexicographic min over all rotations
    of the gap sequence and of its reversal (as python tuples)."""
    a = np.sort(np.asarray(angles) % TWO_PI)
    g = np.append(np.diff(a), TWO_PI - a[-1] + a[0])
    cands = []
    for seq in (g, g[::-1]):
        for r in range(len(seq)):
            cands.append(tuple(np.roll(seq, -r)))
    return np.array(min(cands))


class TestSpectrum:
    def test_diag_unitary(self):
        s = spectrum(np.diag(np.exp(1j * np.array([2.0, 0.5, 5.0]))))
        assert s.size == 3
        assert np.allclose(s.angles, [0.5, 2.0, 5.0], atol=1e-12)

    def test_conjugated_unitary_same_spectrum(self):
        rng = np.random.default_rng(0)
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        q, _ = np.linalg.qr(a)
        u = q @ FOUR_POINT_U @ q.conj().T
        s = spectrum(u)
        assert s.size == 4
        ref = np.sort(np.array([0.0, np.pi / 2, np.pi, 3 * np.pi / 2]))
        assert np.allclose(s.angles, ref, atol=1e-8)

    def test_deduplication(self):
        s = spectrum(np.diag([1.0, 1.0, 1j]))
        assert s.size == 2

    def test_dedup_across_wrap(self):
        eps = 1e-10
        s = spectrum(np.diag([np.exp(1j * eps), np.exp(-1j * eps), 1j]))
        assert s.size == 2

    def test_rejects_non_unitary(self):
        with pytest.raises(NotUnitaryError):
            spectrum(np.diag([1.0, 2.0]))


class TestCanonicalForm:
    def test_matches_brute_force_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            m = int(rng.integers(3, 9))
            angles = np.sort(rng.uniform(0, TWO_PI, m))
            neck = canonical_form(CircleSet(angles))
            assert np.allclose(neck.gaps, brute_canonical_gaps(angles), atol=1e-9)

    def test_invariant_under_rotation_and_reflection(self):
        rng = np.random.default_rng(7)
        angles = np.sort(rng.uniform(0, TWO_PI, 6))
        base = canonical_form(CircleSet(angles))
        rot = canonical_form(CircleSet((angles + 1.234) % TWO_PI))
        ref = canonical_form(CircleSet((-angles + 0.777) % TWO_PI))
        assert np.allclose(base.gaps, rot.gaps, atol=1e-9)
        assert np.allclose(base.gaps, ref.gaps, atol=1e-9)

    def test_singleton(self):
        neck = canonical_form(CircleSet(np.array([1.0])))
        assert np.allclose(neck.gaps, [TWO_PI])


class TestRigidEquivalent:
    def test_finds_rotation(self):
        rng = np.random.default_rng(1)
        a = np.sort(rng.uniform(0, TWO_PI, 5))
        s = CircleSet(a)
        t = CircleSet((a + 0.9) % TWO_PI)
        motion = rigid_equivalent(s, t)
        assert motion is not None
        assert np.allclose(motion.apply_angles(t.angles), s.angles, atol=1e-8)

    def test_finds_reflection(self):
        rng = np.random.default_rng(2)
        a = np.sort(rng.uniform(0, TWO_PI, 5))
        t = CircleSet((-a + 0.3) % TWO_PI)
        motion = rigid_equivalent(CircleSet(a), t)
        assert motion is not None
        assert motion.reflect

    def test_none_for_generic_pair(self):
        rng = np.random.default_rng(3)
        s = CircleSet(np.sort(rng.uniform(0, TWO_PI, 5)))
        t = CircleSet(np.sort(rng.uniform(0, TWO_PI, 5)))
        assert rigid_equivalent(s, t) is None

    def test_none_on_size_mismatch(self):
        s = CircleSet(np.array([0.0, 1.0]))
        t = CircleSet(np.array([0.0, 1.0, 2.0]))
        assert rigid_equivalent(s, t) is None


class TestTheoremFastPath:
    def test_small_spectra_decided_by_cardinality(self):
        u = np.diag([1.0, -1.0])
        v = np.diag([1j, -1j])
        dec = cois_unitary_theorem(u, v)
        assert dec.verdict == "Isomorphic"
        dec2 = cois_unitary_theorem(u, np.diag([1.0, 1j, -1.0]))
        assert dec2.verdict == "NotIsomorphic"

    def test_five_points_rigid_pair(self):
        a = np.array([0.0, 0.8, 1.7, 3.1, 5.0])
        u = np.diag(np.exp(1j * a))
        v = np.diag(np.exp(1j * ((a + 0.4) % TWO_PI)))
        dec = cois_unitary_theorem(u, v)
        assert dec.verdict == "Isomorphic"
        assert dec.method == "theorem-fast-path"

    def test_five_points_generic_pair(self):
        rng = np.random.default_rng(9)
        u = np.diag(np.exp(1j * np.sort(rng.uniform(0, TWO_PI, 5))))
        v = np.diag(np.exp(1j * np.sort(rng.uniform(0, TWO_PI, 5))))
        assert cois_unitary_theorem(u, v).verdict == "NotIsomorphic"

    def test_four_point_pair_stays_open(self):
        dec = cois_unitary_theorem(FOUR_POINT_U, FOUR_POINT_V)
        assert dec.verdict == "Unknown"


class TestOracle:
    def test_settles_the_four_point_pair(self):
        dec = cois_unitary_oracle(FOUR_POINT_U, FOUR_POINT_V)
        assert dec.verdict == "NotIsomorphic"
        assert len(dec.certificate["failed_bijections"]) == 24

    def test_rotation_pair_has_pure_coefficients(self):
        a = np.array([0.1, 1.1, 2.3, 3.6, 5.1])
        lam = np.exp(1j * 0.75)
        u = np.diag(np.exp(1j * a))
        v = np.diag(lam * np.exp(1j * a))
        dec = cois_unitary_oracle(u, v)
        assert dec.verdict == "Isomorphic"
        alpha, beta, gamma = dec.certificate["forward_coeffs"]
        assert abs(alpha) < 1e-8 and abs(gamma) < 1e-8
        assert abs(beta - lam) < 1e-8
        assert max(dec.certificate["residuals"]) < 1e-8

    def test_reflection_pair(self):
        a = np.array([0.1, 1.1, 2.3, 3.6, 5.1])
        u = np.diag(np.exp(1j * a))
        v = np.diag(np.exp(-1j * a))
        dec = cois_unitary_oracle(u, v)
        assert dec.verdict == "Isomorphic"
        alpha, beta, gamma = dec.certificate["forward_coeffs"]
        assert abs(beta) < 1e-8 and abs(abs(gamma) - 1.0) < 1e-8

    def test_four_point_affine_pair_beats_the_fast_path(self):
        # spectra related by z -> ((a+b)/2) z + ((a-b)/2) conj z, built from the
        # four intersections of the unit circle with an (a, b)-ellipse; the
        # gap multisets differ so no rigid motion exists, yet the affine map
        # and its affine inverse witness the span conditions exactly
        ea, eb = 1.2, 0.9
        x = np.sqrt((1 - 1 / eb ** 2) / (1 / ea ** 2 - 1 / eb ** 2))
        y = np.sqrt(1 - x ** 2)
        ws = np.array([x + 1j * y, -x + 1j * y, -x - 1j * y, x - 1j * y])
        zs = ws.real / ea + 1j * ws.imag / eb
        u, v = np.diag(zs), np.diag(ws)
        assert cois_unitary_theorem(u, v).verdict == "Unknown"
        dec = cois_unitary_oracle(u, v)
        assert dec.verdict == "Isomorphic"
        alpha, beta, gamma = dec.certificate["forward_coeffs"]
        assert abs(alpha) < 1e-9
        assert beta == pytest.approx((ea + eb) / 2, abs=1e-9)
        assert gamma == pytest.approx((ea - eb) / 2, abs=1e-9)

    def test_agrees_with_theorem_on_three_points(self):
        # any two 3-point spectra are related by a degree-1 Mobius-like fit:
        # the 3x3 evaluation matrix [1, z, conj z] is invertible
        rng = np.random.default_rng(12)
        u = np.diag(np.exp(1j * np.sort(rng.uniform(0, TWO_PI, 3))))
        v = np.diag(np.exp(1j * np.sort(rng.uniform(0, TWO_PI, 3))))
        assert cois_unitary_oracle(u, v).verdict == "Isomorphic"
        assert cois_unitary_theorem(u, v).verdict == "Isomorphic"

    def test_capacity(self):
        rng = np.random.default_rng(4)
        u = np.diag(np.exp(1j * np.sort(rng.uniform(0, TWO_PI, 6))))
        with pytest.raises(CapacityError):
            cois_unitary_oracle(u, u, cap=5)


def test_validate_unitary_image_relations():
    assert validate_unitary_image(0.0, 1.0, 0.0)
    assert validate_unitary_image(0.0, 0.0, np.exp(1j * 0.3))
    assert not validate_unitary_image(0.0, 0.6, 0.8)  # both coefficients nonzero
    assert not validate_unitary_image(0.1, 1.0, 0.0)  # norm relation broken


class TestFourPointObstruction:
    def test_determinant_identity(self):
        # with V's spectrum (1, e^{i pi/4}, i, -1), the determinant of
        # [assignment | 1 | w | conj w] collapses to 2i(-a + 2b - sqrt2 c + (sqrt2 - 1) d)
        report = four_point_obstruction(FOUR_POINT_U, FOUR_POINT_V)
        ws = spectrum(FOUR_POINT_V).points()
        s2 = np.sqrt(2.0)
        zs = spectrum(FOUR_POINT_U).points()
        for rec in report["determinants"]:
            a, b, c, d = zs[np.array(rec["assignment"])]
            closed_form = 2j * (-a + 2 * b - s2 * c + (s2 - 1) * d)
            assert rec["determinant"] == pytest.approx(closed_form, abs=1e-9)
        assert report["all_nonzero"]
        assert report["min_modulus"] > 0.1
        assert len(report["determinants"]) == 24
        # sanity on the fixed columns used above
        assert np.allclose(np.sort(np.angle(ws) % TWO_PI),
                           np.sort(np.array([0, np.pi / 4, np.pi / 2, np.pi])))

    def test_requires_four_points(self):
        with pytest.raises(DimensionError):
            four_point_obstruction(np.diag([1.0, -1.0]), FOUR_POINT_V)


def test_circle_dist_wraps():
    assert circle_dist(0.1, TWO_PI - 0.1) == pytest.approx(0.2)
    assert circle_dist(1.0, 1.0) == 0.0

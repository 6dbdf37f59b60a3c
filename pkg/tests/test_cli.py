import json
import math
from io import StringIO

import numpy as np
import pytest

from osclass.cli import (EXIT_CAPACITY, EXIT_INVALID, EXIT_OK, EXIT_UNKNOWN,
                         run)


def call(argv):
    buf = StringIO()
    code = run(argv, stdout=buf)
    out = buf.getvalue().strip()
    return code, (json.loads(out) if out else None), out


def cnum(z):
    return [float(np.real(z)), float(np.imag(z))]


def matrix_file(tmp_path, name, m):
    rows = [[cnum(z) for z in row] for row in np.asarray(m, dtype=complex)]
    p = tmp_path / name
    p.write_text(json.dumps({"rows": rows}))
    return str(p)


def points_file(tmp_path, name, pts):
    data = [[cnum(z) for z in row] for row in np.atleast_2d(np.asarray(pts, dtype=complex)).T.T]
    p = tmp_path / name
    p.write_text(json.dumps({"dim": len(data[0]), "points": data}))
    return str(p)


def structure_file(tmp_path, name, metric, relations=None):
    obj = {"metric": np.asarray(metric, dtype=float).tolist()}
    if relations:
        obj["relations"] = relations
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


FOUR_POINT_U = np.diag([1, -1, 1j, -1j])
FOUR_POINT_V = np.diag([1, (1 + 1j) / np.sqrt(2), 1j, -1])


class TestSpectrumAndCanon:
    def test_spectrum(self, tmp_path):
        f = matrix_file(tmp_path, "u.json", np.diag([1.0, 1j]))
        code, rep, _ = call(["spectrum", f])
        assert code == EXIT_OK
        assert rep["size"] == 2
        assert rep["angles"] == pytest.approx([0.0, math.pi / 2])

    def test_canon(self, tmp_path):
        f = matrix_file(tmp_path, "u.json", np.diag([1.0, -1.0, 1j]))
        code, rep, _ = call(["canon", f])
        assert code == EXIT_OK
        assert sum(rep["gaps"]) == pytest.approx(2 * math.pi)

    def test_non_unitary_is_invalid(self, tmp_path):
        f = matrix_file(tmp_path, "m.json", np.diag([1.0, 3.0]))
        code, rep, _ = call(["spectrum", f])
        assert code == EXIT_INVALID
        assert rep["error"]["kind"] == "NotUnitaryError"


class TestUnitaryCois:
    def test_four_point_pair_without_oracle_is_unknown(self, tmp_path):
        fu = matrix_file(tmp_path, "u.json", FOUR_POINT_U)
        fv = matrix_file(tmp_path, "v.json", FOUR_POINT_V)
        code, rep, _ = call(["unitary-cois", fu, fv])
        assert code == EXIT_UNKNOWN
        assert rep["verdict"] == "Unknown"

    def test_four_point_pair_with_oracle(self, tmp_path):
        fu = matrix_file(tmp_path, "u.json", FOUR_POINT_U)
        fv = matrix_file(tmp_path, "v.json", FOUR_POINT_V)
        code, rep, _ = call(["unitary-cois", fu, fv, "--oracle"])
        assert code == EXIT_OK
        assert rep["verdict"] == "NotIsomorphic"
        assert len(rep["certificate"]["failed_bijections"]) == 24
        assert len(rep["obstruction"]["determinants"]) == 24
        assert rep["obstruction"]["all_nonzero"] is True

    def test_capacity_exit(self, tmp_path):
        # a 4-point Unknown pair escalates to the oracle, which refuses caps < 4
        fu = matrix_file(tmp_path, "u.json", FOUR_POINT_U)
        fv = matrix_file(tmp_path, "v.json", FOUR_POINT_V)
        code, rep, _ = call(["unitary-cois", fu, fv, "--oracle", "--cap", "3"])
        assert code == EXIT_CAPACITY
        assert rep["error"]["kind"] == "capacity"


class TestDeg1:
    def test_affine_pair(self, tmp_path):
        rng = np.random.default_rng(0)
        z = rng.standard_normal(5) + 1j * rng.standard_normal(5)
        fd = points_file(tmp_path, "d.json", z.reshape(-1, 1))
        fe = points_file(tmp_path, "e.json", (2 * z + 1j).reshape(-1, 1))
        code, rep, _ = call(["deg1", fd, fe])
        assert code == EXIT_OK
        assert rep["homeomorphic"] is True
        assert max(rep["witness"]["residuals"]) < 1e-8
        code2, rep2, _ = call(["deg1", fd, fe, "--via-opsys"])
        assert code2 == EXIT_OK and rep2["homeomorphic"] is True

    def test_malformed_input(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        code, rep, _ = call(["deg1", str(p), str(p)])
        assert code == EXIT_INVALID


class TestNorm:
    def test_level_one_norm(self, tmp_path):
        fs = tmp_path / "sys.json"
        fs.write_text(json.dumps(
            {"generators": [{"rows": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]}]}))
        fe = tmp_path / "el.json"
        # coefficients (0, 1, 0): the element E12, norm 1
        fe.write_text(json.dumps(
            {"level": 1, "coeffs": [[[[0, 0], [1, 0], [0, 0]]]]}))
        code, rep, _ = call(["norm", str(fs), "--element", str(fe)])
        assert code == EXIT_OK
        assert rep["norm"] == pytest.approx(1.0)
        assert rep["system_dim"] == 3


class TestOsdist:
    def test_self_distance(self, tmp_path):
        fs = tmp_path / "sys.json"
        fs.write_text(json.dumps(
            {"generators": [{"rows": [[[0, 0], [1, 0]], [[0, 0], [0, 0]]]}]}))
        code, rep, _ = call(["osdist", str(fs), str(fs), "--levels", "2",
                             "--restarts", "2", "--seed", "1"])
        assert code == EXIT_OK
        assert rep["weighted"] <= 1e-6
        assert len(rep["per_level"]) == 2


class TestFamily:
    def test_3x3_off_diagonal(self):
        code, rep, _ = call(["family", "wt", "--variant", "3x3", "--t", "0.3", "--s", "0.7"])
        assert code == EXIT_OK
        assert rep["verdict"] == "NotIsomorphic"

    def test_3x3_diagonal(self):
        code, rep, _ = call(["family", "wt", "--variant", "3x3", "--t", "0.5", "--s", "0.5"])
        assert code == EXIT_OK
        assert rep["verdict"] == "Isomorphic"

    def test_2x2_reports_oracle_method(self):
        code, rep, _ = call(["family", "wt", "--variant", "2x2", "--t", "0.3",
                             "--s", "0.7", "--restarts", "32"])
        assert code == EXIT_OK
        assert rep["method"] == "oracle"

    def test_out_of_range(self):
        code, rep, _ = call(["family", "wt", "--variant", "3x3", "--t", "0", "--s", "0.5"])
        assert code == EXIT_INVALID


class TestGh:
    def test_dist_and_theory(self, tmp_path):
        m = structure_file(tmp_path, "m.json", [[0.0, 1.0], [1.0, 0.0]])
        n = structure_file(tmp_path, "n.json", [[0.0, 2.0], [2.0, 0.0]])
        code, rep, _ = call(["gh-dist", m, m, "--kmax", "2"])
        assert code == EXIT_OK and rep["distance"] == 0.0
        code, rep, _ = call(["gh-dist", m, n, "--kmax", "2"])
        assert code == EXIT_OK and rep["distance"] > 0.5
        code, t1, _ = call(["gh-theory", m, "--depth", "2"])
        code2, t2, _ = call(["gh-theory", n, "--depth", "2"])
        assert code == EXIT_OK and code2 == EXIT_OK
        assert t1["length"] == t2["length"]
        assert t1["fingerprint"] != t2["fingerprint"]

    def test_capacity(self, tmp_path):
        big = structure_file(tmp_path, "big.json",
                             (np.ones((8, 8)) - np.eye(8)).tolist())
        code, rep, _ = call(["gh-dist", big, big])
        assert code == EXIT_CAPACITY


class TestDeterminism:
    def test_byte_identical_across_runs_and_jobs(self, tmp_path):
        fu = matrix_file(tmp_path, "u.json", FOUR_POINT_U)
        fv = matrix_file(tmp_path, "v.json", FOUR_POINT_V)
        argv = ["unitary-cois", fu, fv, "--oracle"]
        _, _, a = call(argv)
        _, _, b = call(argv)
        _, _, c = call(["--jobs", "4"] + argv)
        d = call(["--jobs", "1"] + argv)[2]
        assert a == b
        assert c == d == a  # worker settings never reach the report

    def test_timing_flag_adds_wall_time(self, tmp_path):
        fu = matrix_file(tmp_path, "u.json", np.diag([1.0, 1j]))
        _, rep, _ = call(["--timing", "spectrum", fu])
        assert "wall_time_s" in rep
        _, rep2, _ = call(["spectrum", fu])
        assert "wall_time_s" not in rep2


class TestVerify:
    def test_replay_roundtrip(self, tmp_path):
        fu = matrix_file(tmp_path, "u.json", np.diag([1.0, -1.0, 1j]))
        argv = ["canon", fu]
        _, _, text = call(argv)
        report_path = tmp_path / "report.json"
        report_path.write_text(text + "\n")
        code, rep, _ = call(["verify", str(report_path)])
        assert code == EXIT_OK
        assert rep["verified"] is True

    def test_detects_tampering(self, tmp_path):
        fu = matrix_file(tmp_path, "u.json", np.diag([1.0, -1.0, 1j]))
        _, _, text = call(["canon", fu])
        tampered = text.replace("3", "4", 1)
        report_path = tmp_path / "tampered.json"
        report_path.write_text(tampered + "\n")
        code, rep, _ = call(["verify", str(report_path)])
        assert code == EXIT_INVALID
        assert rep["verified"] is False

    def test_replays_isomorphism_certificate(self, tmp_path):
        # 4-point pair related by the real-affine map z -> 1.05 z + 0.15 conj z
        # (an ellipse meeting the circle at four points): the fast path says
        # Unknown, the oracle proves Isomorphic, and verify replays the fit
        ea, eb = 1.2, 0.9
        x = np.sqrt((1 - 1 / eb ** 2) / (1 / ea ** 2 - 1 / eb ** 2))
        y = np.sqrt(1 - x ** 2)
        ws = np.array([x + 1j * y, -x + 1j * y, -x - 1j * y, x - 1j * y])
        zs = ws.real / ea + 1j * ws.imag / eb
        fu = matrix_file(tmp_path, "u.json", np.diag(zs))
        fv = matrix_file(tmp_path, "v.json", np.diag(ws))
        argv = ["unitary-cois", fu, fv, "--oracle"]
        _, rep, text = call(argv)
        assert rep["verdict"] == "Isomorphic"
        report_path = tmp_path / "iso.json"
        report_path.write_text(text + "\n")
        code, vrep, _ = call(["verify", str(report_path)])
        assert code == EXIT_OK
        assert any(c["check"].startswith("forward") and c["pass"]
                   for c in vrep["certificate_checks"])


def test_unknown_subcommand_is_invalid():
    code, _, _ = call(["frobnicate"])
    assert code == EXIT_INVALID

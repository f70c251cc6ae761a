import csv
import io
import json

import pytest

from magneto_casimir import cli, reference
from magneto_casimir.lifshitz import ideal_pressure


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestEpsilon:
    def test_defaults(self, capsys):
        code, out, _ = run(capsys, "epsilon")
        assert code == 0
        assert out.splitlines()[0] == "zeta,eps_xx,eps_yy,eps_yz"
        rows = parse_csv(out)
        assert len(rows) == 200
        unit = [r for r in rows if float(r["zeta"]) == 1.0]
        assert len(unit) == 1
        vals = [float(unit[0][k]) for k in ("eps_xx", "eps_yy", "eps_yz")]
        assert vals == pytest.approx([30.8, 30.20769, -2.96154], abs=1e-5)

    def test_grid_is_log_spaced_and_increasing(self, capsys):
        _, out, _ = run(capsys, "epsilon", "--zeta-min", "0.1", "--zeta-max", "0.5", "--zeta-points", "5")
        z = [float(r["zeta"]) for r in parse_csv(out)]
        assert z[0] == 0.1 and z[-1] == 0.5
        ratios = [b / a for a, b in zip(z, z[1:])]
        assert max(ratios) == pytest.approx(min(ratios), rel=1e-12)

    def test_isotropic(self, capsys):
        _, out, _ = run(capsys, "epsilon", "--omega-c", "0")
        for row in parse_csv(out):
            assert row["eps_xx"] == row["eps_yy"]
            assert float(row["eps_yz"]) == 0

    @pytest.mark.parametrize(
        "argv",
        [["--zeta-points", "1"], ["--zeta-min", "2", "--zeta-max", "1"], ["--zeta-min", "0"],
         ["--omega-c", "0.1,0.2"], ["--eps-l", "0.5"], ["--omega-c", "-1"]],
    )
    def test_usage_errors(self, capsys, argv):
        code, out, err = run(capsys, "epsilon", *argv)
        assert code == 2 and out == "" and "error" in err

    def test_json(self, capsys):
        _, out, _ = run(capsys, "epsilon", "--format", "json", "--zeta-points", "3")
        data = json.loads(out)
        assert len(data) == 3 and set(data[0]) == {"zeta", "eps_xx", "eps_yy", "eps_yz"}


class TestForce:
    def test_single_isotropic_point(self, capsys):
        code, out, _ = run(capsys, "force", "--omega-c", "0", "--separation", "1")
        assert code == 0
        rows = parse_csv(out)
        assert len(rows) == 1
        assert list(rows[0]) == list(cli.FORCE_COLUMNS)
        expected = reference.pressure_zero_t(1.0, 15.4) / ideal_pressure(1.0)
        assert float(rows[0]["ratio"]) == pytest.approx(expected, rel=1e-8)

    def test_small_grid(self, capsys):
        code, out, _ = run(capsys, "force", "--l-min", "0.5", "--l-max", "1.5", "--l-points", "3",
                           "--omega-c", "0,0.5")
        rows = parse_csv(out)
        assert code == 0 and len(rows) == 6
        assert [(float(r["omega_c"]), float(r["L"])) for r in rows] == [
            (0.0, 0.5), (0.0, 1.0), (0.0, 1.5), (0.5, 0.5), (0.5, 1.0), (0.5, 1.5)
        ]
        assert all(int(r["terms"]) == 0 for r in rows)

    def test_finite_temperature_reports_terms(self, capsys):
        _, out, _ = run(capsys, "force", "--separation", "1", "--omega-c", "0", "--theta", "0.05")
        assert int(parse_csv(out)[0]["terms"]) > 0

    @pytest.mark.parametrize(
        "argv",
        [["--l-min", "0"], ["--l-min", "-1"], ["--l-points", "1"], ["--separation", "0"],
         ["--theta", "0.1", "--zero-t"], ["--thickness", "0"], ["--format", "xml"], ["--bogus"]],
    )
    def test_usage_errors(self, capsys, argv):
        code, out, _ = run(capsys, "force", *argv)
        assert code == 2 and out == ""

    def test_partial_failure(self, capsys, monkeypatch):
        from magneto_casimir import lifshitz
        from magneto_casimir.errors import ConvergenceError

        real = lifshitz.pressure

        def flaky(sep, material, *a, **k):
            if sep == 1.0:
                raise ConvergenceError("synthetic")
            return real(sep, material, *a, **k)

        monkeypatch.setattr(lifshitz, "pressure", flaky)
        code, out, _ = run(capsys, "force", "--separation", "0.5,1", "--omega-c", "0")
        rows = parse_csv(out)
        assert code == 3
        assert list(rows[0]) == list(cli.FORCE_COLUMNS) + ["error"]
        assert rows[0]["error"] == "" and "synthetic" in rows[1]["error"]
        assert rows[1]["ratio"] == ""

    def test_output_file_and_sidecar(self, tmp_path, capsys):
        out_path = tmp_path / "f.csv"
        code, out, _ = run(capsys, "force", "--separation", "1", "--omega-c", "0.2", "--output", str(out_path))
        assert code == 0 and out == ""
        assert out_path.read_bytes().startswith(b"omega_c,L,ratio,pressure,terms,err_estimate\n")
        sidecar = json.loads((tmp_path / "f.csv.config.json").read_text())
        assert sidecar["omega_c"] == [0.2] and sidecar["separation"] == [1.0]

    def test_config_precedence(self, tmp_path, capsys):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"omega_c": [0.5], "separation": [2.0], "eps_l": 12.0}))
        _, out, _ = run(capsys, "force", "--config", str(config), "--separation", "1")
        row = parse_csv(out)[0]
        assert float(row["omega_c"]) == 0.5 and float(row["L"]) == 1.0

    def test_config_unknown_key(self, tmp_path, capsys):
        config = tmp_path / "run.json"
        config.write_text(json.dumps({"colour": "red"}))
        code, _, err = run(capsys, "force", "--config", str(config))
        assert code == 2 and "colour" in err


class TestPoint:
    def test_matches_force_row(self, capsys):
        _, doc, _ = run(capsys, "point", "--separation", "1", "--omega-c", "0")
        _, out, _ = run(capsys, "force", "--separation", "1", "--omega-c", "0")
        point = json.loads(doc)
        assert repr(point["ratio"]) == parse_csv(out)[0]["ratio"]
        assert len(point["reflectance_probes"]) == 3
        for probe in point["reflectance_probes"]:
            assert 0 <= probe["R_s"] <= 1 and 0 <= probe["R_p"] <= 1

    def test_field_lowers_ratio(self, capsys):
        _, a, _ = run(capsys, "point", "--separation", "1", "--omega-c", "0.5")
        _, b, _ = run(capsys, "point", "--separation", "1", "--omega-c", "0")
        assert json.loads(a)["ratio"] < json.loads(b)["ratio"]

    @pytest.mark.parametrize("argv", [["--omega-c", "0,1"], ["--separation", "1,2"], ["--frobnicate"]])
    def test_usage_errors(self, capsys, argv):
        code, _, _ = run(capsys, "point", *argv)
        assert code == 2


class TestValidate:
    def test_clean_build(self, capsys):
        code, out, _ = run(capsys, "validate")
        assert code == 0
        assert out.count("PASS") == 5 and "FAIL" not in out

    def test_json_report(self, capsys):
        code, out, _ = run(capsys, "validate", "--format", "json", "--tolerance", "1e-6")
        report = json.loads(out)
        assert code == 0
        assert {r["check"] for r in report} == {
            "tensor_reduction", "fresnel_limit", "reflection_oracle",
            "ideal_mirror_calibration", "isotropic_lifshitz",
        }
        assert all(r["tolerance"] == 1e-6 and r["passed"] for r in report)

    def test_fault_injection(self, capsys):
        code, out, _ = run(capsys, "validate", "--inject-fault", "eps-v-sign")
        assert code == 1
        assert "FAIL reflection_oracle" in out

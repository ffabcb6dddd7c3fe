from __future__ import annotations

import json
import subprocess
import sys
from fractions import Fraction

import pytest

from apfact.appoly import APPoly
from apfact.cli import EXIT_ERROR, EXIT_OK, EXIT_UNKNOWN, main, run
from apfact.errors import ParseError, ValidationError
from apfact.report import CSV_HEADER, emit_report, job_from_dict, load_json, parse_report


def term(freq, re=1.0, im=0.0):
    return {"freq": freq, "re": re, "im": im}


def job(lam, g, **extra):
    return {"lambda": lam, "g": g, **extra}


LAMBDA_FOUR = job("4/1", [term("-1/1"), term("1/1")], command="classify")
LAMBDA_TWO = job("2/1", [term("-1/1"), term("1/1")], command="factorize")
LAMBDA_THREE = job("3/1", [term("-2/1"), term("2/1")], command="factorize")
STRIP_FAILS = job("4/1", [term("-2/1"), term("-1/1"), term("1/1"), term("2/1")],
                  command="factorize")


def write(tmp_path, data, name="job.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data) if not isinstance(data, str) else data)
    return str(p)


def invoke(capsys, argv):
    code = main(argv)
    return code, capsys.readouterr().out


class TestParse:
    def test_valid_job(self):
        j = job_from_dict(LAMBDA_FOUR)
        assert j.command == "classify"
        assert j.symbol.lam == 4
        assert j.symbol.g == APPoly.exp(-1) + APPoly.exp(1)
        assert j.tol == 1e-10

    def test_lambda_zero(self):
        with pytest.raises(ValidationError):
            job_from_dict(job("0/1", [term("1/1")]))

    def test_unreduced_rational(self):
        j = job_from_dict(job("3/1", [term("2/4")]))
        assert j.symbol.g.freqs == (Fraction(1, 2),)

    def test_bad_json_reports_position(self):
        with pytest.raises(ParseError, match="line 2"):
            load_json('{"lambda": "1/1",\n "g": [}')

    def test_bad_field(self):
        with pytest.raises(ParseError, match="g\\[0\\]"):
            job_from_dict(job("1/1", [{"re": 1}]))

    def test_overrides_win(self):
        j = job_from_dict({**LAMBDA_FOUR, "options": {"tol": 1e-6}}, tol=1e-8, command="solve")
        assert j.tol == 1e-8 and j.command == "solve"

    def test_nonpositive_tol(self):
        with pytest.raises(ValidationError):
            job_from_dict(LAMBDA_FOUR, tol=-1.0)


class TestRun:
    def test_classify(self):
        report, code = run(job_from_dict(LAMBDA_FOUR))
        c = report["classification"]
        assert code == EXIT_OK
        assert c["N"] == 2 and c["nu"] == "1/1"
        assert APPoly.from_json(c["a_plus"]) == APPoly.const(1)
        assert APPoly.from_json(c["a_minus"]) == APPoly.const(1)

    def test_factorize_canonical(self):
        report, code = run(job_from_dict(LAMBDA_TWO))
        assert code == EXIT_OK
        assert report["verdict"]["verdicts"] == ["Invertible"]
        assert report["verdict"]["mu"] == "0/1"
        assert report["verification"]["max_residual"] < 1e-12

    def test_factorize_non_canonical(self):
        report, code = run(job_from_dict(LAMBDA_THREE))
        assert code == EXIT_OK
        assert report["verdict"]["verdicts"] == ["FactorableNonCanonical", "NotSemiFredholm"]
        assert report["verdict"]["mu"] == "1/1"

    def test_solve(self):
        report, code = run(job_from_dict({**LAMBDA_FOUR, "command": "solve"}))
        assert code == EXIT_OK
        assert report["verification"]["passed"]

    def test_unknown_exit_code(self):
        _, code = run(job_from_dict(STRIP_FAILS))
        assert code == EXIT_UNKNOWN


class TestMain:
    @pytest.mark.parametrize("data, expected", [(LAMBDA_FOUR, EXIT_OK), (LAMBDA_TWO, EXIT_OK),
                                                (LAMBDA_THREE, EXIT_OK),
                                                (STRIP_FAILS, EXIT_UNKNOWN)])
    def test_exit_codes(self, tmp_path, capsys, data, expected):
        code, out = invoke(capsys, ["--input", write(tmp_path, data)])
        assert code == expected
        json.loads(out)

    def test_error_exit_code(self, tmp_path, capsys):
        code, out = invoke(capsys, ["--input", write(tmp_path, job("0/1", [term("1/1")]))])
        assert code == EXIT_ERROR
        assert json.loads(out)["error"]["type"] == "ValidationError"

    def test_missing_file(self, tmp_path, capsys):
        code, _ = invoke(capsys, ["--input", str(tmp_path / "absent.json")])
        assert code == EXIT_ERROR

    def test_json_round_trip(self, tmp_path, capsys):
        _, out = invoke(capsys, ["--input", write(tmp_path, LAMBDA_THREE)])
        report = parse_report(out.encode())
        assert parse_report(emit_report(report, "json")) == report

    def test_text_mentions_mu_and_case(self, tmp_path, capsys):
        _, out = invoke(capsys, ["--input", write(tmp_path, LAMBDA_THREE), "--output", "text"])
        assert "mu: 1/1" in out
        assert "case: big-gap-index" in out
        assert "single-exponential-gap:exceeds-lambda" in out

    def test_csv_header(self, tmp_path, capsys):
        _, out = invoke(capsys, ["--input", write(tmp_path, LAMBDA_TWO), "--output", "csv"])
        lines = out.splitlines()
        assert lines[0] == ",".join(CSV_HEADER) == "x,abs_g_minus,abs_g_plus,residual"
        assert len(lines) == 402
        assert max(float(r.split(",")[3]) for r in lines[1:]) < 1e-12

    def test_verify_report_file(self, tmp_path, capsys):
        _, out = invoke(capsys, ["--input", write(tmp_path, LAMBDA_THREE)])
        path = write(tmp_path, out, "report.json")
        code, out = invoke(capsys, ["--input", path, "--command", "verify"])
        assert code == EXIT_OK
        assert json.loads(out)["verification"]["passed"]

    def test_verify_detects_tampering(self, tmp_path, capsys):
        _, out = invoke(capsys, ["--input", write(tmp_path, LAMBDA_TWO)])
        report = json.loads(out)
        report["factorization"]["G_plus"][0][0][0]["re"] += 1e-3
        code, out = invoke(capsys, ["--input", write(tmp_path, report, "bad.json"),
                                    "--command", "verify"])
        assert code == EXIT_ERROR
        assert not json.loads(out)["verification"]["passed"]

    def test_nu_override(self, tmp_path, capsys):
        data = job("3/1", [term("-1/1"), term("1/1")], command="solve")
        _, out = invoke(capsys, ["--input", write(tmp_path, data), "--nu", "1/1"])
        assert json.loads(out)["solution"]["used_nu"] == "1/1"

    def test_console_module(self, tmp_path):
        r = subprocess.run([sys.executable, "-m", "apfact", "--input", write(tmp_path, LAMBDA_TWO),
                            "--output", "text"], capture_output=True, text=True)
        assert r.returncode == 0
        assert "verdict: Invertible" in r.stdout

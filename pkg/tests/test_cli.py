import csv
import io
import json

import numpy as np
import pytest

from ratebound import region_catalog
from ratebound.channels import channel_to_dict, random_net
from ratebound.cli import run
from ratebound.prob_core import psi

WORKED = """R1 - R10 - R11 = 0
R10 + R11 < 2
R11 < 6/5
R2 + R10 < 3/2
nonneg R10, R11, R1, R2
"""


def call(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def net_file(tmp_path):
    p = tmp_path / "net.json"
    p.write_text(json.dumps(channel_to_dict(random_net(3))))
    return str(p)


@pytest.fixture
def fig13_file(tmp_path):
    p = tmp_path / "gauss.json"
    p.write_text(json.dumps({"model": "gaussian-cic", "a": "sqrt(5/2)", "b": "sqrt(1/4)", "p1": 10, "p2": 10}))
    return str(p)


class TestPlotData:
    def test_fig12_contains_sum_corner(self, capsys):
        code, out, _ = call(capsys, "region", "plot-data", "--figure", "12")
        assert code == 0
        rows = list(csv.reader(io.StringIO(out)))
        assert rows[0] == ["series", "R1", "R2"]
        pts = [(float(r[1]), float(r[2])) for r in rows[1:] if r[0] == "gaussian-strong-CIC-III-24"]
        assert any(abs(a - 3.1699) < 1e-4 and abs(b - 0.1592) < 1e-4 for a, b in pts)
        assert any(abs(a - psi(80)) < 1e-9 and abs(b - (psi(100) - psi(80))) < 1e-9 for a, b in pts)

    def test_ten_significant_digits(self, capsys):
        _, out, _ = call(capsys, "region", "plot-data", "--figure", "12")
        assert "3.169925001" in out

    def test_csv_file_output(self, capsys, tmp_path):
        target = tmp_path / "fig13.csv"
        code, out, _ = call(capsys, "region", "plot-data", "--figure", "13", "--out", str(target))
        assert code == 0 and out == ""
        assert target.read_text().splitlines()[0] == "series,P,R1+R2"


class TestClassify:
    def test_fig13_mixed_side_one(self, capsys, fig13_file):
        code, out, _ = call(capsys, "classify", "--channel", fig13_file)
        assert code == 0
        body = json.loads(out)
        assert body["regime"] == "mixed" and body["strong_side"] == 1
        assert body["stamp"] == "EXACT" and "version" in body

    def test_discrete_needs_seed(self, capsys, net_file):
        code, _, err = call(capsys, "classify", "--channel", net_file, "--condition", "CIC-strong")
        assert code == 2
        assert json.loads(err)["error"] == "argument"

    def test_discrete_verdict(self, capsys, net_file):
        code, out, _ = call(capsys, "classify", "--channel", net_file, "--condition", "CIC-strong",
                            "--k", "4", "--samples", "100", "--seed", "1")
        assert code == 0
        assert json.loads(out)["regime"] == "CIC-strong"


class TestFm:
    def test_worked_system_three_rows(self, capsys, tmp_path):
        src = tmp_path / "lifted.txt"
        src.write_text(WORKED)
        code, out, _ = call(capsys, "fm", "--in", str(src), "--eliminate", "R10,R11")
        assert code == 0
        assert sorted(out.strip().splitlines()) == sorted(["R1 < 2", "R2 < 3/2", "R1 + R2 < 27/10"])

    def test_json_keeps_rationals(self, capsys, tmp_path):
        src = tmp_path / "lifted.txt"
        src.write_text(WORKED)
        _, out, _ = call(capsys, "fm", "--in", str(src), "--eliminate", "R10,R11", "--format", "json")
        assert "27/10" in out


class TestRegion:
    def test_list(self, capsys):
        code, out, _ = call(capsys, "region", "list")
        assert code == 0
        assert len(json.loads(out)["regions"]) >= 45

    def test_eval_csv_header(self, capsys, net_file):
        code, out, _ = call(capsys, "region", "eval", "--id", "HK-III-18", "--channel", net_file, "--seed", "1",
                            "--samples", "100", "--k", "0", "--format", "csv")
        assert code == 0
        assert out.splitlines()[0] == "R1,R2"

    def test_eval_json_stamp(self, capsys, net_file):
        _, out, _ = call(capsys, "region", "eval", "--id", "Sato-III-20", "--channel", net_file, "--seed", "1",
                         "--samples", "100", "--k", "0")
        assert json.loads(out)["stamp"] == "BEST-EFFORT"

    def test_byte_identical_reruns(self, capsys, net_file):
        argv = ["region", "eval", "--id", "HK-III-18", "--channel", net_file, "--seed", "7", "--samples", "150"]
        first = call(capsys, *argv)[1]
        second = call(capsys, *argv)[1]
        assert first == second

    def test_unknown_region(self, capsys, net_file):
        code, _, err = call(capsys, "region", "eval", "--id", "nope", "--channel", net_file, "--seed", "1")
        assert code == 2 and json.loads(err)["error"] == "argument"


class TestExitCodes:
    def test_resource(self, capsys, tmp_path):
        pmf = tmp_path / "p.json"
        pmf.write_text(json.dumps({"variables": ["X"], "table": [0.75, 0.25]}))
        code, _, err = call(capsys, "typicality", "audit", "--pmf", str(pmf), "--n", "60", "--eps1", "0.1",
                            "--eps2", "0.2", "--trials", "10000", "--seed", "0")
        assert code == 3 and json.loads(err)["error"] == "resource"

    def test_invariant_on_non_finite_output(self, capsys, monkeypatch):
        monkeypatch.setattr(region_catalog, "figure_data", lambda *a, **k: (["series", "R1"], [["s", np.nan]]))
        code, _, err = call(capsys, "region", "plot-data", "--figure", "12")
        assert code == 4 and json.loads(err)["error"] == "invariant"

    def test_bad_flags(self, capsys):
        assert call(capsys, "region", "plot-data", "--figure", "11")[0] == 2

    def test_bad_number_in_channel(self, capsys, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text(json.dumps({"model": "gaussian-cic", "a": "x", "b": 1, "p1": 1, "p2": 1}))
        assert call(capsys, "classify", "--channel", str(p))[0] == 2


class TestTypicalityAndScheme:
    def test_audit_best_effort(self, capsys, tmp_path):
        pmf = tmp_path / "p.json"
        pmf.write_text(json.dumps({"variables": ["X"], "table": [0.75, 0.25]}))
        code, out, _ = call(capsys, "typicality", "audit", "--pmf", str(pmf), "--n", "8", "--eps1", "0.1",
                            "--eps2", "0.2", "--trials", "10000", "--seed", "0")
        body = json.loads(out)
        assert code == 0 and body["stamp"] == "BEST-EFFORT" and body["passed"]

    def test_scheme_derive_fig16(self, capsys):
        from pathlib import Path

        import ratebound

        graph = Path(ratebound.__file__).parent / "data" / "fig16.json"
        code, out, _ = call(capsys, "scheme", "derive", "--graph", str(graph))
        body = json.loads(out)
        assert code == 0 and "B1 >= I(V2;W1|W2)" in body["lifted"]

    def test_compare_reports_containment(self, capsys):
        code, out, _ = call(capsys, "compare", "--inner", "strong-CIC-III-23", "--outer", "Sato-III-20",
                            "--channels", "2", "--seed", "0", "--samples", "100", "--k", "0")
        body = json.loads(out)
        assert code == 0 and body["contained"] and len(body["per_channel"]) == 2

import csv
import io
import json

import pytest

from losmax.cli import run


def invoke(argv):
    out = io.StringIO()
    code = run(argv, out)
    lines = [json.loads(line) for line in out.getvalue().splitlines()] if not (argv and "csv" in argv) else out.getvalue()
    return code, lines


def test_certify_golden():
    code, lines = invoke(["certify", "--n", "24", "--emit-xstar"])
    assert code == 0
    (report,) = lines
    assert report["verdict"] == "verified"
    assert report["payload"]["xstar"][0] == "123587941503427/187646731272000"
    assert set(report) == {"command", "parameters", "verdict", "payload", "elapsed_ms"}


def test_seq_csv():
    code, text = invoke(["seq", "--n", "10", "--format", "csv"])
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 10 and rows[-1]["a"] == "24"


def test_seq_json():
    code, (report,) = invoke(["seq", "--n", "10"])
    assert code == 0
    assert report["payload"]["a"] == [1, 2, 4, 6, 9, 12, 15, 18, 21, 24]
    assert report["payload"]["c"][:5] == [2, 4, 10, 14, 24]


def test_brute_guard_exit(capsys):
    code, (report,) = invoke(["brute", "--n", "9"])
    assert code == 2 and report["verdict"] == "error"
    assert "guard" in capsys.readouterr().err


def test_usage_error(capsys):
    assert run(["certify", "--n", "3", "--bogus"], io.StringIO()) == 2
    assert "usage" in capsys.readouterr().err
    assert run(["probe", "--n", "3", "--radius", "-1", "--samples", "3", "--seed", "1"], io.StringIO()) == 2


def test_brute_enum_stream():
    code, lines = invoke(["brute-enum", "--n", "2"])
    assert code == 0
    assert lines[:2] == [
        {"x": ["1/1", "2/1"], "basis": [[1, 1], [2, 1]]},
        {"x": ["5/4", "3/2"], "basis": [[2, 1], [2, 2]]},
    ]
    assert lines[-1]["payload"]["vertex_count"] == 2


def test_sweep_lines():
    code, lines = invoke(["sweep", "--from", "1", "--to", "30", "--mode", "reduced"])
    assert code == 0
    assert [line["n"] for line in lines[:-1]] == list(range(1, 31))
    assert all(line["verdict"] == "verified" for line in lines[:-1])
    assert lines[-1]["payload"]["violations"] == []


def test_duality_and_vertex_and_lemmas():
    code, (report,) = invoke(["duality", "--n", "3"])
    assert code == 0 and report["payload"]["dual_value"] == "7/4"
    code, (report,) = invoke(["vertex", "--n", "24"])
    assert code == 0 and report["payload"]["is_vertex"]
    code, lines = invoke(["lemmas", "--jmax", "30"])
    assert code == 0 and len(lines) == 31 and all(line["holds"] for line in lines[:-1])


def test_brute_and_probe():
    code, (report,) = invoke(["brute", "--n", "4"])
    assert code == 0 and report["payload"]["best_value"] == "23/12"
    code, (report,) = invoke(["probe", "--n", "5", "--radius", "1/10", "--samples", "50", "--seed", "2"])
    assert code == 0 and report["payload"]["exceeded"] is False


@pytest.mark.parametrize(
    "argv",
    [
        ["certify", "--n", "40", "--mode", "reduced", "--emit-xstar"],
        ["sweep", "--from", "5", "--to", "60"],
        ["probe", "--n", "8", "--radius", "1/3", "--samples", "40", "--seed", "9", "--signed"],
        ["brute-enum", "--n", "4", "--threads", "2"],
    ],
)
def test_payloads_reproducible(argv):
    def strip(lines):
        return [{k: v for k, v in line.items() if k != "elapsed_ms"} for line in lines]

    assert strip(invoke(argv)[1]) == strip(invoke(argv)[1])


def test_threads_do_not_change_results():
    def payloads(argv):
        return [line.get("payload", line) for line in invoke(argv)[1]]

    base = ["sweep", "--from", "1", "--to", "120", "--mode", "reduced"]
    assert payloads(base) == payloads(base + ["--threads", "3"])

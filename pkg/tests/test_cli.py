import io
import json
import sys

import pytest

from conftest import correlation_document, vertex
from specker_kit.cli import EXIT_INFEASIBLE, EXIT_INVALID, EXIT_OK, run
from specker_kit.console import configure_logging
from specker_kit.models import REPORT_MODELS

QUARTERS = ["1/4"] * 4


def output(capsys):
    return json.loads(capsys.readouterr().out)


def test_check_reports_nc_violation(capsys, write_json):
    path = write_json("v11.json", correlation_document(vertex(11)))
    assert run(["check", "--input", path, "--eta0", "1/2", "--eta0", "0,1"]) == EXIT_OK
    report = output(capsys)
    assert report["command"] == "check"
    assert report["exit_status"] == EXIT_OK
    results = report["results"]
    assert results["ks_violations"] == ["R3"]
    assert [nc["eta0"] for nc in results["nc"]] == ["1/2", "0", "1"]
    assert results["nc"][0]["violations"] == ["R3"]
    assert results["nc"][0]["margins"]["R3"] == "1/2"
    assert results["nc"][1]["violations"] == []
    assert results["polytope"]["member"] is False


def test_check_table_format(capsys, write_json):
    path = write_json("v8.json", correlation_document(vertex(8)))
    assert run(["check", "--input", path, "--eta0", "0", "--format", "table"]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("+")
    assert "R0" in out


def test_vertices(capsys):
    assert run(["vertices"]) == EXIT_OK
    vertices = output(capsys)["results"]["vertices"]
    assert [v["id"] for v in vertices] == list(range(12))
    assert vertices[11]["pairs"]["12"] == ["0", "1/2", "1/2", "0"]
    assert vertices[8]["ks_violations"] == ["R0"]


def test_vertices_table(capsys):
    assert run(["vertices", "--format", "table"]) == EXIT_OK
    assert "indeterministic" in capsys.readouterr().out


def test_decompose(capsys, write_json):
    path = write_json("uniform.json", {"pairs": {"12": QUARTERS, "23": QUARTERS, "13": QUARTERS}})
    assert run(["decompose", "--input", path]) == EXIT_OK
    results = output(capsys)["results"]
    assert len(results["weights"]) == 12
    assert results["extremal"] is False


def test_fine_infeasible_exit_status(capsys, write_json):
    path = write_json("v8.json", correlation_document(vertex(8)))
    assert run(["fine", "--input", path]) == EXIT_INFEASIBLE
    report = output(capsys)
    assert report["exit_status"] == EXIT_INFEASIBLE
    assert report["results"]["status"] == "infeasible"
    certificate = report["results"]["certificate"]
    assert certificate["coefficients"]


def test_fine_feasible_with_interval(capsys, write_json):
    path = write_json("uniform.json", {"pairs": {"12": QUARTERS, "23": QUARTERS, "13": QUARTERS}})
    assert run(["fine", "--input", path]) == EXIT_OK
    results = output(capsys)["results"]
    assert results["p000_interval"] == ["0", "1/4"]
    assert "000" not in results["joint"]


def test_fine_scenario_document(capsys, write_json):
    path = write_json("coins.json", {
        "measurements": [{"name": "A", "outcomes": 2}, {"name": "B", "outcomes": 2}],
        "contexts": [[0, 1]],
        "stats": {"0,1": QUARTERS},
    })
    assert run(["fine", "--input", path]) == EXIT_OK
    assert output(capsys)["results"]["p000_interval"] is None


def test_fine_model(capsys, write_json):
    half = ["1/2", "1/2"]
    path = write_json("coin.json", [{
        "weight": 1,
        "responses": {"M1": half, "M2": half, "M3": half},
        "joint_responses": {label: [0, "1/2", "1/2", 0] for label in ("0,1", "1,2", "0,2")},
    }])
    assert run(["fine", "--model", path]) == EXIT_INFEASIBLE
    results = output(capsys)["results"]
    assert results["factorizable"] is False
    assert results["deterministic"] is False


def test_ontmax(capsys):
    assert run(["ontmax", "--which", "R3", "--eta", "1/2"]) == EXIT_OK
    results = output(capsys)["results"]
    assert results["value"] == "5/2"
    assert results["research_mode"] is False
    assert run(["ontmax", "--which", "R0", "--etas", "1/2,1/4,1"]) == EXIT_OK
    assert output(capsys)["results"]["research_mode"] is True


def test_ontmax_needs_three_etas(capsys):
    assert run(["ontmax", "--etas", "1/2,1/4"]) == EXIT_INVALID
    assert output(capsys)["results"]["error"]


def test_relabel(capsys, write_json):
    path = write_json("v8.json", correlation_document(vertex(8)))
    assert run(["relabel", "--input", path, "--measurement", "3"]) == EXIT_OK
    assert output(capsys)["results"]["pairs"] == vertex(11).as_dict()


def test_invalid_statistics(capsys, write_json):
    path = write_json("bad.json", {"pairs": {"12": ["1/2", "1/2", 0, 0], "23": QUARTERS, "13": [0, 0, "1/2", "1/2"]}})
    assert run(["check", "--input", path]) == EXIT_INVALID
    report = output(capsys)
    assert report["exit_status"] == EXIT_INVALID
    assert report["results"]["violations"][0]["kind"] == "no-disturbance"


def test_malformed_json(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{", encoding="utf-8")
    assert run(["check", "--input", str(path)]) == EXIT_INVALID
    assert output(capsys)["results"]["location"].startswith(str(path))


def test_usage_errors():
    assert run(["check"]) == EXIT_INVALID
    assert run(["no-such-command"]) == EXIT_INVALID
    assert run(["--help"]) == EXIT_OK


def test_quantum_scan(capsys, tmp_path):
    csv_path = tmp_path / "scan.csv"
    code = run(["quantum-scan", "--eta-grid", "0:1/5:1/10", "--state", "bloch:0,0,1", "--csv", str(csv_path)])
    assert code == EXIT_OK
    results = output(capsys)["results"]
    assert [row["eta"] for row in results["rows"]] == pytest.approx([0.0, 0.1, 0.2])
    assert 0.1 in results["violating_etas"]
    assert csv_path.exists()


def test_quantum_scan_bad_state(capsys):
    assert run(["quantum-scan", "--state", "pure"]) == EXIT_INVALID


def test_audit_is_byte_identical(capsys):
    assert run(["audit", "--samples", "20", "--seed", "7"]) == EXIT_OK
    first = capsys.readouterr().out
    assert run(["audit", "--samples", "20", "--seed", "7"]) == EXIT_OK
    assert capsys.readouterr().out == first
    assert json.loads(first)["results"]["membership_disagreements"] == 0


def test_schema(capsys):
    assert run(["schema", "fine"]) == EXIT_OK
    schema = output(capsys)
    assert "results" in schema["properties"]


def test_runs_after_the_log_stream_was_closed(capsys, monkeypatch):
    captured = sys.stderr
    stale = io.StringIO()
    monkeypatch.setattr(sys, "stderr", stale)
    configure_logging("info")
    stale.close()
    monkeypatch.setattr(sys, "stderr", captured)
    assert run(["vertices"]) == EXIT_OK
    assert output(capsys)["command"] == "vertices"
    assert run(["vertices"]) == EXIT_OK
    assert output(capsys)["command"] == "vertices"


def resolve(schema, node):
    ref = node.get("$ref")
    return schema["$defs"][ref.rsplit("/", 1)[-1]] if ref else node


@pytest.mark.parametrize("argv, name", [
    (["check", "--input", "{v11}", "--eta0", "1/2"], "check"),
    (["vertices"], "vertices"),
    (["decompose", "--input", "{uniform}"], "decompose"),
    (["fine", "--input", "{v8}"], "fine"),
    (["fine", "--input", "{uniform}"], "fine"),
    (["ontmax", "--which", "R3", "--eta", "1/2"], "ontmax"),
    (["relabel", "--input", "{v8}", "--measurement", "3"], "relabel"),
    (["quantum-scan", "--eta-grid", "0:1/10:1/10", "--state", "bloch:0,0,1"], "quantum-scan"),
    (["audit", "--samples", "5", "--seed", "1"], "audit"),
    (["check", "--input", "{bad}"], "error"),
])
def test_reports_match_their_published_schema(capsys, write_json, argv, name):
    paths = {
        "{v8}": write_json("v8.json", correlation_document(vertex(8))),
        "{v11}": write_json("v11.json", correlation_document(vertex(11))),
        "{uniform}": write_json("uniform.json", {"pairs": {"12": QUARTERS, "23": QUARTERS, "13": QUARTERS}}),
        "{bad}": write_json("bad.json", {"pairs": {"12": ["1/2"] * 4, "23": QUARTERS, "13": QUARTERS}}),
    }
    run([paths.get(arg, arg) for arg in argv])
    raw = capsys.readouterr().out
    assert run(["schema", name]) == EXIT_OK
    schema = output(capsys)

    report = json.loads(raw)
    assert set(schema["required"]) <= set(report) <= set(schema["properties"])
    results = resolve(schema, schema["properties"]["results"])
    assert set(results.get("required", [])) <= set(report["results"]) <= set(results["properties"])
    assert REPORT_MODELS[name].model_validate_json(raw).model_dump(mode="json") == report

from __future__ import annotations

import json

import pytest
from fastapi.testclient import TestClient

from flowdir import cli, extract_subnetwork, mcda, server, tntp
from flowdir.sue import SueParams

TRIANGLE_NET = """<NUMBER OF ZONES> 3
<NUMBER OF NODES> 3
<NUMBER OF LINKS> 6
<END OF METADATA>
1 2 1000 5 5 0.15 4 0 0 1 ;
2 1 1000 5 5 0.15 4 0 0 1 ;
1 3 1000 5 5 0.15 4 0 0 1 ;
3 1 1000 5 5 0.15 4 0 0 1 ;
2 3 1000 5 5 0.15 4 0 0 1 ;
3 2 1000 5 5 0.15 4 0 0 1 ;
"""

TRIANGLE_TRIPS = """<NUMBER OF ZONES> 3
<TOTAL OD FLOW> 600
<END OF METADATA>
Origin 1
 2 : 100; 3 : 100;
Origin 2
 1 : 100; 3 : 100;
Origin 3
 1 : 100; 2 : 100;
"""


@pytest.fixture()
def triangle_files(tmp_path):
    net = tmp_path / "tri_net.tntp"
    trips = tmp_path / "tri_trips.tntp"
    net.write_text(TRIANGLE_NET)
    trips.write_text(TRIANGLE_TRIPS)
    return str(net), str(trips)


@pytest.fixture()
def triangle_client(triangle_files):
    net, trips = triangle_files
    links, demand = extract_subnetwork(tntp.load_network(net), tntp.load_trips(trips),
                                       {1, 2, 3})
    state = server.default_state(links, demand, SueParams())
    return TestClient(server.create_app(state))


@pytest.fixture(scope="module")
def subnet_client():
    net, trips = tntp.load_sioux_falls()
    links, demand = extract_subnetwork(net, trips, {5, 6, 8, 9, 10, 16, 17})
    state = server.default_state(links, demand, SueParams())
    return TestClient(server.create_app(state))


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_cli_feasibility_smoke(capsys):
    code, out, _ = run_cli(capsys, "feasibility")
    assert code == 0
    doc = json.loads(out)
    assert doc["feasible_by_demand"] == 5007
    assert doc["feasible_excluding_all_two_way"] == 5006


def test_cli_score_scaled_anchors(capsys):
    code, out, _ = run_cli(capsys, "score", "--scaled", "0,0,0")
    assert code == 0
    assert json.loads(out)["dcs"] == 1.178


def test_cli_score_code_prints_metrics(capsys):
    code, out, _ = run_cli(capsys, "score", "--code", "0")
    assert code == 0
    doc = json.loads(out)
    assert doc["code"] == 0
    assert doc["trits"] == "000000000"
    assert abs(doc["tbc"] - 74 / 42) < 1e-9
    assert doc["stt"] > 0
    assert doc["tltf"] > 0
    assert "dcs" in doc and "provenance" in doc


def test_cli_usage_error_is_exit_1(capsys):
    code, _, err = run_cli(capsys, "score")
    assert code == 1
    assert json.loads(err.splitlines()[-1])["error"]["kind"] == "usage"


def test_cli_missing_file_is_exit_2(capsys):
    code, _, err = run_cli(capsys, "train", "--in", "/nonexistent/sweep.csv")
    assert code == 2
    assert json.loads(err.splitlines()[-1])["error"]["kind"] == "data"


def test_cli_infeasible_is_exit_3(capsys, tmp_path):
    scenario = tmp_path / "empty.json"
    scenario.write_text("{\"name\": \"empty\"}")
    code, _, err = run_cli(capsys, "scenario", "run", "--scenario", str(scenario),
                           "--trits", "000000011")
    assert code == 3
    assert json.loads(err.splitlines()[-1])["error"]["kind"] == "compute"


def test_cli_extract_writes_subnetwork(capsys, tmp_path):
    code, out, _ = run_cli(capsys, "extract", "--out", str(tmp_path))
    assert code == 0
    doc = json.loads(out)
    net = tntp.load_network(doc["network"])
    assert len(net.arcs) == 18
    trips = tntp.load_trips(doc["trips"])
    assert trips.total() == 57600.0


def test_cli_sweep_rank_train_round_trip(capsys, tmp_path, triangle_files):
    net, trips = triangle_files
    out_csv = str(tmp_path / "tri.csv")
    code, out, _ = run_cli(capsys, "sweep", "--network", net, "--trips", trips,
                           "--nodes", "1,2,3", "--max-iterations", "30",
                           "--out", out_csv)
    assert code == 0
    assert json.loads(out)["n_feasible"] == 15

    model_path = str(tmp_path / "model.json")
    code, out, _ = run_cli(capsys, "train", "--in", out_csv, "--out", model_path)
    assert code == 0
    doc = json.loads(out)
    assert doc["alpha"] in list(mcda.DEFAULT_ALPHA_GRID)
    assert mcda.model_from_json(json.dumps(doc)).provenance["n_rows"] == 15

    code, out, _ = run_cli(capsys, "score", "--network", net, "--trips", trips,
                           "--nodes", "1,2,3", "--model", model_path, "--code", "0")
    assert code == 0
    assert json.loads(out)["code"] == 0


def test_cli_and_api_return_identical_bytes(capsys, triangle_files, triangle_client):
    net, trips = triangle_files
    code, out, _ = run_cli(capsys, "score", "--network", net, "--trips", trips,
                           "--nodes", "1,2,3", "--code", "5")
    assert code == 0
    api_body = triangle_client.get("/api/config/5").text
    assert out == api_body


def test_api_health(triangle_client):
    assert triangle_client.get("/api/health").json() == {"status": "ok"}


def test_api_network_shape(subnet_client):
    doc = subnet_client.get("/api/network").json()
    assert doc["nodes"] == [5, 6, 8, 9, 10, 16, 17]
    assert len(doc["links"]) == 9
    assert doc["links"][0]["a"] == 5 and doc["links"][0]["b"] == 6
    assert {"seed", "sigma", "model_id"} <= set(doc["provenance"])


def test_api_config_zero_tbc(subnet_client):
    doc = subnet_client.get("/api/config/0").json()
    assert abs(doc["tbc"] - 1.7619) < 5e-4


def test_api_config_out_of_range_404(triangle_client):
    assert triangle_client.get("/api/config/27").status_code == 404


def test_api_evaluate_isolating_node_17_is_422(subnet_client):
    body = {"orientations": ["two_way"] * 7 + ["forward", "forward"]}
    resp = subnet_client.post("/api/evaluate", json=body)
    assert resp.status_code == 422
    message = resp.json()["error"]["message"]
    assert "17 -> 5" in message


def test_api_evaluate_malformed_is_400(triangle_client):
    resp = triangle_client.post("/api/evaluate", content=b"{not json")
    assert resp.status_code == 400
    resp = triangle_client.post("/api/evaluate", json={"orientations": "nope"})
    assert resp.status_code == 400
    resp = triangle_client.post("/api/evaluate", json={})
    assert resp.status_code == 400


def test_api_evaluate_repeat_is_identical(triangle_client):
    body = {"trits": "010"}
    first = triangle_client.post("/api/evaluate", json=body).text
    second = triangle_client.post("/api/evaluate", json=body).text
    assert first == second


def test_api_evaluate_deltas_vs_baseline(triangle_client):
    body = {"trits": "010", "baseline_code": 0}
    doc = triangle_client.post("/api/evaluate", json=body).json()
    assert doc["baseline_code"] == 0
    deltas = doc["deltas"]
    base = triangle_client.get("/api/config/0").json()
    assert deltas["stt"] == pytest.approx(doc["stt"] - base["stt"], rel=1e-12)
    assert deltas["pct_change_stt"] == pytest.approx(
        (base["stt"] - doc["stt"]) / base["stt"] * 100.0, rel=1e-12)


def test_api_ranking_409_before_sweep(triangle_client):
    assert triangle_client.get("/api/ranking").status_code == 409


def test_api_train_409_before_sweep(triangle_client):
    assert triangle_client.post("/api/train", json={}).status_code == 409


def test_api_sweep_then_ranking_and_train(triangle_client):
    doc = triangle_client.post("/api/sweep", json={"workers": 1}).json()
    assert doc["n_feasible"] == 15

    progress = triangle_client.get("/api/sweep/progress").json()
    assert progress["running"] is False
    assert progress["done"] == 15

    ranking = triangle_client.get("/api/ranking", params={"top": 3}).json()
    assert len(ranking["rows"]) == 3
    stts = [row["stt"] for row in ranking["rows"]]
    assert stts == sorted(stts)
    assert ranking["rows"][0]["rank"] == 15

    trained = triangle_client.post("/api/train", json={"folds": 5}).json()
    assert trained["provenance"]["n_rows"] == 15
    model_doc = triangle_client.get("/api/model").json()
    assert model_doc == trained


def test_api_presets_on_subnet(subnet_client):
    doc = subnet_client.get("/api/presets/case-study").json()
    names = [s["name"] for s in doc["scenarios"]]
    assert names == ["A", "B", "C"]
    b = doc["scenarios"][1]
    assert b["forced_orientations"] == {"2": "two_way", "4": "two_way",
                                        "0": "two_way", "8": "backward"}
    c = doc["scenarios"][2]
    assert len(c["added_arcs"]) == 1
    assert (c["added_arcs"][0]["tail"], c["added_arcs"][0]["head"]) == (16, 17)


def test_api_presets_on_wrong_network_409(triangle_client):
    assert triangle_client.get("/api/presets/case-study").status_code == 409


def test_api_model_endpoint_reports_reference(triangle_client):
    doc = triangle_client.get("/api/model").json()
    assert doc["intercept"] == 1.178
    assert doc["weights"] == {"tbc": -0.129, "tltf": 0.086, "stt": -1.18}

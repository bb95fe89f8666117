import json

import pytest

from dclab import __version__, cli


def run(tmp_path, command, cfg, *flags):
    src = tmp_path / "cfg.json"
    out = tmp_path / "out.json"
    src.write_text(json.dumps(cfg))
    code = cli.main([command, "--config", str(src), "--out", str(out), *flags])
    return code, json.loads(out.read_text()), out.read_bytes()


def test_verify_dunkl_passes(tmp_path):
    code, rep, _ = run(tmp_path, "verify", {"suite": "dunkl-commutativity", "family": "B", "rank": 2})
    assert code == 0 and rep["status"] == "pass"
    assert rep["dclab_version"] == __version__
    assert rep["config"]["family"] == "B" and rep["config"]["seed"] == 0
    assert all(c["status"] == "pass" and "residual" in c for c in rep["checks"])


def test_hecke_braid_gl3(tmp_path):
    cfg = {"suite": "hecke-braid", "family": "GLn", "rank": 3, "params": {"tau": "2/3", "q": "5/7"}}
    code, rep, _ = run(tmp_path, "verify", cfg)
    assert code == 0 and rep["status"] == "pass"


def test_mutation_fails_with_witness(tmp_path):
    cfg = {"suite": "dunkl-commutativity", "family": "B", "rank": 2, "mutate": True}
    code, rep, _ = run(tmp_path, "verify", cfg)
    assert code == 1 and rep["status"] == "fail"
    bad = [c for c in rep["checks"] if c["status"] == "fail"]
    assert bad and all(c["witness"] for c in bad)


def test_unknown_suite(tmp_path):
    code, rep, _ = run(tmp_path, "verify", {"suite": "nope", "family": "A", "rank": 1})
    assert code == 2 and "dunkl-commutativity" in rep["suites"]


def test_missing_config_is_usage_error(tmp_path):
    assert cli.main(["verify", "--config", str(tmp_path / "missing.json")]) == 2


def test_compute_macdonald(tmp_path):
    code, rep, _ = run(tmp_path, "compute", {"object": "macdonald", "family": "GLn", "rank": 2, "mu": [1, 0]})
    assert code == 0
    assert rep["coefficients"]["1,0"] == "1"
    assert all("/" in v or v.lstrip("-").isdigit() for v in rep["coefficients"].values())


def test_compute_ruijsenaars(tmp_path):
    cfg = {"object": "hamiltonian", "kind": "ruijsenaars", "family": "GLn", "rank": 3, "r": 1}
    _, rep, _ = run(tmp_path, "compute", cfg)
    assert len(rep["terms"]) == 3
    assert {tuple(t["index"]) for t in rep["terms"]} == {("0", "0", "1"), ("0", "1", "0"), ("1", "0", "0")}
    assert all(t["weyl_word"] == [] for t in rep["terms"])


def test_compute_van_diejen(tmp_path):
    _, rep, _ = run(tmp_path, "compute", {"object": "hamiltonian", "kind": "van-diejen", "n": 2})
    idx = {tuple(t["index"]) for t in rep["terms"]}
    assert {("1", "0"), ("-1", "0"), ("0", "1"), ("0", "-1"), ("0", "0")} <= idx


def test_free_flow(tmp_path):
    cfg = {"system": "free", "family": "A", "rank": 1, "x0": [0.3, -0.3], "p0": [0.4, -0.4], "T": "1/10"}
    code, rep, _ = run(tmp_path, "flow", cfg)
    assert code == 0 and rep["drift"] < 1e-12


def test_a1_flow(tmp_path):
    cfg = {"system": "elliptic-cm", "family": "A", "rank": 1, "params": {"k": [0, 0.5]},
           "x0": [0.3, -0.3], "p0": [0.4, -0.4], "T": "1/10"}
    code, rep, _ = run(tmp_path, "flow", cfg)
    assert code == 0 and rep["drift"] < 1e-6
    ev = rep["series"]["eigenvalues"][0][0]
    assert isinstance(ev, list) and len(ev) == 2


def test_flow_pole(tmp_path):
    cfg = {"system": "elliptic-cm", "family": "A", "rank": 1, "params": {"k": "1/2"},
           "x0": [0.3, 0.3], "p0": [2, -2], "T": "1"}
    code, rep, _ = run(tmp_path, "flow", cfg)
    assert code == 1 and rep["status"] == "pole" and rep["error"]["time"] == 0.0


@pytest.mark.parametrize("command,cfg", [
    ("verify", {"suite": "cherednik-relations", "family": "A", "rank": 2, "trials": 3}),
    ("compute", {"object": "operator", "kind": "dunkl", "family": "A", "rank": 2}),
])
def test_deterministic(tmp_path, command, cfg):
    _, _, a = run(tmp_path, command, cfg, "--seed", "7")
    _, _, b = run(tmp_path, command, cfg, "--seed", "7")
    assert a == b


def test_flags_override_file(tmp_path):
    cfg = {"suite": "dunkl-commutativity", "family": "A", "rank": 1, "seed": 1, "tol": 1e-3}
    _, rep, _ = run(tmp_path, "verify", cfg, "--seed", "5", "--tol", "1e-6", "--trials", "4")
    assert rep["config"]["seed"] == 5 and rep["config"]["tol"] == 1e-6 and rep["config"]["trials"] == 4

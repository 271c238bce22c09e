from __future__ import annotations

import json

import pytest
from click.testing import CliRunner

from helpers import region_calibration, star_mapped
from reuseq.cli import main
from reuseq.placement import uniform_calibration
from reuseq.topology import heavy_hex_27


def run(*args, ok=(0,)):
    res = CliRunner().invoke(main, [str(a) for a in args], catch_exceptions=False)
    assert res.exit_code in ok, res.stderr
    return res


def test_optimize_bv7_with_reuse(tmp_path):
    out = tmp_path / "bv7.json"
    run("optimize", "--circuit", "bv7", "--topology", "heavy_hex_27", "--objective", "swaps", "--reuse", "on",
        "--out", out)
    s = json.loads(out.read_text())["summary"]
    assert s["swap_count"] == 0 and s["used_qubits"] == 4 and s["optimal"]
    assert "runtime_s" not in s


def test_optimize_ladder_depth_to_stdout(tmp_path):
    res = run("optimize", "--circuit", "h_ladder3", "--topology", "line3", "--objective", "depth", "--reuse", "off",
              "--qasm-out", tmp_path / "m.qasm")
    data = json.loads(res.stdout)
    assert data["summary"]["swap_count"] == 0
    assert (tmp_path / "m.qasm").read_text().startswith("OPENQASM 2.0;")
    assert "h_ladder3" in res.stderr


def test_optimize_errors(tmp_path):
    res = run("optimize", "--circuit", "bv5", "--topology", "line3", "--reuse", "off", ok=(1,))
    assert json.loads(res.stdout)["status"] == "infeasible"
    run("optimize", "--circuit", "nosuch", "--topology", "line3", ok=(1,))
    run("optimize", "--circuit", "bv3", "--topology", "line3", "--reuse", "sometimes", ok=(1,))
    bad = tmp_path / "bad.qasm"
    bad.write_text('OPENQASM 2.0;\nqreg q[2];\ncz q[0],q[1];\n')
    res = run("optimize", "--qasm", bad, "--topology", "line3", ok=(1,))
    assert "cz" in res.stderr


def test_optimize_timeout_exit_code():
    res = run("optimize", "--circuit", "bv10", "--topology", "heavy_hex_27", "--reuse", "exact:2", "--budget", "0.5",
              ok=(2,))
    assert json.loads(res.stdout)["summary"]["status"] == "timeout"


def test_seed_env_override(monkeypatch, tmp_path):
    monkeypatch.setenv("REUSEQ_SOLVER_SEED", "5")
    res = run("optimize", "--circuit", "bv4", "--topology", "line4", "--reuse", "off", "--seed", "1")
    assert json.loads(res.stdout)["summary"]["swap_count"] == 1


def write_json(path, data):
    path.write_text(json.dumps(data))
    return path


def test_place_star(tmp_path):
    g = heavy_hex_27()
    mapped = write_json(tmp_path / "star.json", star_mapped().to_json())
    uni = write_json(tmp_path / "uni.json", uniform_calibration(g).to_json())
    data = json.loads(run("place", "--mapped", mapped, "--topology", "heavy_hex_27", "--calibration", uni).stdout)
    assert data["qubit_sets"] == 8 and data["candidates"] == 48
    reg = write_json(tmp_path / "reg.json", region_calibration(g).to_json())
    data = json.loads(run("place", "--mapped", mapped, "--topology", "heavy_hex_27", "--calibration", reg).stdout)
    assert data["qubits"] == [10, 13, 15, 12]


def test_place_missing_reset_table(tmp_path):
    g = heavy_hex_27()
    opt = tmp_path / "opt.json"
    run("optimize", "--circuit", "bv4", "--topology", "heavy_hex_27", "--objective", "qubits", "--out", opt)
    cal = uniform_calibration(g).to_json()
    cal["reset_error"] = {}
    cal["reset_duration"] = {}
    path = write_json(tmp_path / "cal.json", cal)
    res = run("place", "--mapped", opt, "--topology", "heavy_hex_27", "--calibration", path, ok=(1,))
    assert "no reset table for qubit" in res.stderr


def test_characterize_round_trip(tmp_path):
    d = tmp_path / "batch"
    run("characterize", "generate", "--kind", "simultaneous_x", "--P", 27, "--R", 5, "--out", d)
    assert len(list((d / "circuits").glob("*.qasm"))) == 5
    small = tmp_path / "small"
    run("characterize", "generate", "--kind", "simultaneous_x", "--P", 4, "--R", 2, "--out", small)
    manifest = small / "manifest.json"
    clean = tmp_path / "clean.json"
    run("characterize", "simulate", "--manifest", manifest, "--shots", 1000, "--out", clean)
    rep = json.loads(run("characterize", "analyze", "--manifest", manifest, "--counts", clean).stdout)
    assert all(s["mean"] == 1.0 for s in rep["stats"])
    noisy = tmp_path / "noisy.json"
    run("characterize", "simulate", "--manifest", manifest, "--shots", 10000, "--eta", "0.05", "--seed", 3,
        "--out", noisy)
    csv = tmp_path / "r.csv"
    rep = json.loads(run("characterize", "analyze", "--manifest", manifest, "--counts", noisy, "--csv", csv).stdout)
    assert all(abs(row[0] - 0.05) <= 0.01 for row in rep["reset_error"].values())
    assert csv.read_text().startswith("qubit,r1,r2")


def test_characterize_misaligned_counts(tmp_path):
    d = tmp_path / "b"
    run("characterize", "generate", "--kind", "simultaneous_x", "--P", 2, "--R", 2, "--out", d)
    counts = write_json(tmp_path / "c.json", {"x": {"00": 10}})
    run("characterize", "analyze", "--manifest", d / "manifest.json", "--counts", counts, ok=(1,))


def test_verify(tmp_path):
    opt = tmp_path / "opt.json"
    run("optimize", "--circuit", "bv5", "--topology", "heavy_hex_27", "--out", opt)
    rep = json.loads(run("verify", "--circuit", "bv5", "--mapped", opt, "--topology", "heavy_hex_27").stdout)
    assert rep["pass"] and rep["hellinger_fidelity"] == pytest.approx(1.0)
    data = json.loads(opt.read_text())
    for step in data["mapped"]["steps"]:
        for op in step:
            if op["op"] == "h":
                op["op"] = "x"
    bad = write_json(tmp_path / "bad.json", data)
    rep = json.loads(run("verify", "--circuit", "bv5", "--mapped", bad, ok=(1,)).stdout)
    assert not rep["pass"] and rep["hellinger_fidelity"] < 1.0


def test_verify_max_reuse_bv10(tmp_path):
    opt = tmp_path / "bv10.json"
    run("optimize", "--circuit", "bv10", "--topology", "heavy_hex_27", "--objective", "qubits", "--out", opt)
    assert json.loads(opt.read_text())["summary"]["used_qubits"] == 2
    run("verify", "--circuit", "bv10", "--mapped", opt)


def test_verify_qasm_and_cap(tmp_path):
    opt = tmp_path / "m.qasm"
    run("optimize", "--circuit", "bv4", "--topology", "line4", "--reuse", "off", "--qasm-out", opt)
    run("verify", "--circuit", "bv4", "--mapped", opt)
    big = tmp_path / "big.qasm"
    big.write_text('OPENQASM 2.0;\nqreg q[16];\ncreg c[1];\n' + "".join(f"h q[{i}];\n" for i in range(16))
                   + "measure q[0] -> c[0];\n")
    res = run("verify", "--qasm", big, "--mapped", big, ok=(1,))
    assert "qubit" in res.stderr

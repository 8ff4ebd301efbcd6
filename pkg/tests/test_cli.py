import json

import pytest

from coopetition.cli import EXIT_INFEASIBLE, EXIT_INPUT, EXIT_OK, EXIT_VERIFY, InputError, \
    RunConfig, TABLE_IDS, default_runs, main, reproduce_table
from coopetition.polymatrix import PolymatrixGame


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_synth_ipd_max_margin(capsys):
    code, out, _ = run(capsys, "synth", "--game", "ipd3", "--objective", "max-margin")
    assert code == EXIT_OK
    d = json.loads(out)
    assert d["triples"] == [[1, 0, 0]]
    assert d["objective_value"] == pytest.approx(2.35, abs=1e-6)
    assert d["lps_solved"] == 8
    assert d["verification"]["ok"]


def test_synth_custom_objective(capsys):
    code, out, _ = run(capsys, "synth", "--game", "bob", "--class", "type2", "--objective",
                       "custom", "--custom", "v2=1,v3=1")
    assert code == EXIT_OK
    assert json.loads(out)["objective_value"] == pytest.approx(2.2, abs=1e-6)


def test_synth_infeasible(tmp_path, capsys):
    z = [[0.0, 0.0], [0.0, 0.0]]
    five = [[5.0, 5.0], [5.0, 5.0]]
    g = PolymatrixGame(z, z, five, z, five, z)
    path = tmp_path / "g.json"
    path.write_text(g.to_json())
    code, _, err = run(capsys, "synth", "--game", str(path), "--objective", "min-cost")
    assert code == EXIT_INFEASIBLE
    assert "no winning policy" in err


def test_input_errors(capsys):
    assert run(capsys, "synth", "--game", "nope")[0] == EXIT_INPUT
    assert run(capsys, "synth", "--game", "ipd3", "--objective", "max-fun")[0] == EXIT_INPUT
    assert run(capsys, "synth", "--game", "ipd3", "--eps", "0")[0] == EXIT_INPUT
    assert run(capsys, "synth", "--game", "ipd3", "--objective", "custom",
               "--custom", "v2=x")[0] == EXIT_INPUT
    assert run(capsys, "reproduce", "no-such-table")[0] == EXIT_INPUT
    assert run(capsys, "bogus")[0] == EXIT_INPUT
    assert run(capsys, "simulate", "--game", "ipd3", "--agent2", "sgd")[0] == EXIT_INPUT
    assert run(capsys, "simulate", "--game", "ipd3", "--policy", "fixture:bob")[0] == EXIT_INPUT


def test_synth_out_then_verify(tmp_path, capsys):
    cert = tmp_path / "c.json"
    code, _, _ = run(capsys, "synth", "--game", "electric_petrol", "--objective", "min-cost",
                     "--out", str(cert))
    assert code == EXIT_OK
    code, out, _ = run(capsys, "verify", str(cert))
    assert code == EXIT_OK
    assert "FAIL" not in out
    code, out, _ = run(capsys, "verify", str(cert), "--json")
    assert json.loads(out)["ok"] is True

    d = json.loads(cert.read_text())
    d["policy"]["first"]["A21"] = [[0.0, 0.0], [0.0, 0.0]]
    cert.write_text(json.dumps(d))
    code, out, _ = run(capsys, "verify", str(cert))
    assert code == EXIT_VERIFY
    assert "FAIL" in out


def test_verify_missing_file(capsys):
    assert run(capsys, "verify", "/nonexistent/cert.json")[0] == EXIT_INPUT


def test_dump_lp(tmp_path, capsys):
    code, _, _ = run(capsys, "synth", "--game", "ipd3", "--objective", "min-cost",
                     "--dump-lp", str(tmp_path))
    assert code == EXIT_OK
    files = sorted(p.name for p in tmp_path.iterdir())
    assert len(files) == 8
    assert "subject to" in (tmp_path / files[0]).read_text()


def test_simulate_is_byte_identical(tmp_path, capsys):
    args = ("simulate", "--game", "ipd3", "--policy", "fixture:ipd3", "--T", "30", "--N", "5",
            "--seed", "9")
    a = run(capsys, *args)
    b = run(capsys, *args)
    assert a[0] == EXIT_OK
    assert a[1] == b[1]
    d = json.loads(a[1])
    assert d["N"] == 5 and d["seeds"] == [9, 10, 11, 12, 13]


def test_simulate_config_and_trace(tmp_path, capsys):
    cfg = RunConfig(game="electric_petrol", policy="best-constant", T=20, N=4,
                    trace=str(tmp_path / "t.csv"), out=str(tmp_path / "s.json"))
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert RunConfig.from_dict(json.loads(path.read_text())) == cfg
    code, _, _ = run(capsys, "simulate", "--config", str(path), "--seed", "3")
    assert code == EXIT_OK
    stats = json.loads((tmp_path / "s.json").read_text())
    assert stats["config"]["seed"] == 3
    assert "action" in stats["extras"]
    lines = (tmp_path / "t.csv").read_text().splitlines()
    assert lines[0] == "round,u1,u2,u3,cost,a1,a2,a3" and len(lines) == 21


def test_config_rejects_unknown_keys():
    with pytest.raises(InputError):
        RunConfig.from_dict({"gmae": "ipd3"})


def test_default_runs():
    assert default_runs("mwu:1", "ftrl:1") == 200
    assert default_runs("mwu:1", "lmwu:0.1") == 2000


def test_reproduce_small(capsys):
    code, out, _ = run(capsys, "reproduce", "ipd3-policy", "--N", "3", "--T", "20",
                       "--format", "csv")
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines[0] == "table,player2,player3,N,win_rate,margin"
    assert len(lines) == 4


def test_reproduce_table_ids_and_structure():
    assert "electric_petrol-constant" in TABLE_IDS and "bob-policy" in TABLE_IDS
    tab = reproduce_table("bob-constant", N=2, T=10)
    assert [(r["player2"], r["player3"]) for r in tab["rows"]] == \
        [("MWU", "FTRL"), ("MWU", "LMWU"), ("LMWU", "LMWU")]
    assert all(r["policy"].startswith("constant action") for r in tab["rows"])

import csv
import json

import pytest

from noisyxor.cli import EXIT_ERROR, EXIT_INFEASIBLE, EXIT_OK, main

SMALL = {"type": "guv", "q": 2, "pvDeg": 2, "pvLen": 1, "t": 1}  # m = 6, d = 2, M = 64


def run(tmp_path, cmd, cfg, *extra, name="out.json"):
    cfg_path = tmp_path / f"{cmd}-cfg.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / name
    code = main([cmd, "--config", str(cfg_path), "--out", str(out), *extra])
    return code, (json.loads(out.read_text()) if out.exists() else None), out


def test_plan_is_deterministic(tmp_path):
    cfg = {"alpha": 0.5, "regime": "gamma-linear", "D": 4, "gamma": 0.5}
    code, rep, out = run(tmp_path, "plan", cfg)
    first = out.read_bytes()
    code2, _, out2 = run(tmp_path, "plan", cfg, name="again.json")
    assert code == code2 == EXIT_OK and first == out2.read_bytes()
    assert rep["plan"]["q"] == 9 and rep["constant_rate_checks"]["checks"]


def test_plan_tiny_d_is_infeasible(tmp_path):
    code, rep, _ = run(tmp_path, "plan", {"alpha": 0.5, "regime": "gamma-linear", "D": 3, "gamma": 0.2})
    assert code == EXIT_INFEASIBLE and rep["plan"]["feasible"] is False


def test_build_then_audit_from_file(tmp_path):
    code, built, graph_file = run(tmp_path, "build", {"graph": SMALL}, name="graph.json")
    assert code == EXIT_OK and built["summary"] == {"M": 64, "N": 16, "m": 6, "k": 4, "d": 2}
    cfg = {"graph": {"type": "file", "path": str(graph_file)}, "seed": 1, "s_max": 2, "samples": 50,
           "even_cover_w_max": 2}
    code, rep, _ = run(tmp_path, "audit", cfg)
    assert code == EXIT_OK and rep["summary"] == built["summary"]
    direct = run(tmp_path, "audit", dict(cfg, graph=SMALL), name="direct.json")[1]
    assert direct["audit"] == rep["audit"]


def test_sample_then_distinguish(tmp_path):
    code, rep, inst_file = run(tmp_path, "sample", {"graph": SMALL, "seed": 5, "kind": "planted",
                                                    "eta": 0.0, "count": 3}, name="inst.json")
    assert code == EXIT_OK and len(rep["instances"]) == 3
    code, dec, _ = run(tmp_path, "distinguish", {"graph": SMALL, "seed": 6, "eta": 0.0,
                                                 "instances": str(inst_file)})
    assert code == EXIT_OK
    assert [d["verdict"] for d in dec["decisions"]] == [1, 1, 1]


def test_probe_writes_csv(tmp_path):
    code, rep, out = run(tmp_path, "probe", {"m": 5, "r": 1, "etas": [0.02, 0.3], "trials": 20, "seed": 2})
    assert code == EXIT_OK and len(rep["points"]) == 2
    rows = list(csv.DictReader(open(str(out) + ".csv")))
    assert [r["eta"] for r in rows] == ["0.02", "0.3"] and rows[0]["trials"] == "20"


def test_missing_seed_and_bad_json(tmp_path, capsys):
    code, rep, _ = run(tmp_path, "sample", {"graph": SMALL, "kind": "null"})
    assert code == EXIT_ERROR and rep is None
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["plan", "--config", str(bad)]) == EXIT_ERROR
    assert main(["plan", "--config", str(tmp_path / "missing.json")]) == EXIT_ERROR
    assert "error" in capsys.readouterr().err


def test_parity_violation_exits_infeasible(tmp_path):
    odd = {"type": "guv", "q": 3, "pvDeg": 1, "pvLen": 1}  # m = 6, d = 3
    code, _, _ = run(tmp_path, "experiment", {"graph": odd, "seed": 1, "eta": 0.05,
                                              "trials": {"null": 1}})
    assert code == EXIT_INFEASIBLE


def experiment_cfg(**over):
    cfg = {"graph": SMALL, "seed": 11, "eta": 0.05, "trials": {"null": 4, "planted": 4}}
    cfg.update(over)
    return cfg


def test_experiment_bytes_identical(tmp_path):
    _, _, a = run(tmp_path, "experiment", experiment_cfg(), name="a.json")
    _, _, b = run(tmp_path, "experiment", experiment_cfg(), name="b.json")
    _, _, c = run(tmp_path, "experiment", experiment_cfg(), "--workers", "2", name="c.json")
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()
    # a report replays as its own config
    code = main(["experiment", "--config", str(a), "--out", str(tmp_path / "d.json")])
    assert code == EXIT_OK and (tmp_path / "d.json").read_bytes() == a.read_bytes()


def test_noiseless_planted_campaign(tmp_path):
    code, rep, _ = run(tmp_path, "experiment", experiment_cfg(eta=0.0, trials={"planted": 6}))
    assert code == EXIT_OK
    assert rep["aggregate"]["planted"]["accept_rate"] == {"exact": "1", "float": 1.0}
    assert all(r["verdict"] == 1 for r in rep["trials"])


def test_timings_stay_out_of_report(tmp_path):
    tfile = tmp_path / "t.json"
    _, rep, _ = run(tmp_path, "experiment", experiment_cfg(), "--timings", str(tfile))
    assert "trials" in json.loads(tfile.read_text())["stages"]
    assert "stages" not in json.dumps(rep)


def test_budget_exceeded(tmp_path):
    code, rep, _ = run(tmp_path, "experiment", experiment_cfg(budgets={"trials": 0}))
    assert code == EXIT_ERROR and rep is None


@pytest.mark.parametrize("cmd", ["plan", "build", "probe"])
def test_missing_required_key(tmp_path, cmd):
    code, _, _ = run(tmp_path, cmd, {"seed": 1})
    assert code == EXIT_ERROR


def test_wilson_and_newcombe_reference_values():
    from noisyxor.cli import aggregate, wilson

    # textbook values: 8/10 -> [0.4902, 0.9433], 0/10 -> [0, 0.2775]
    assert wilson(8, 10) == pytest.approx((0.4902, 0.9433), abs=1e-4)
    assert wilson(0, 10) == pytest.approx((0.0, 0.2775), abs=1e-4)
    # published hybrid-score example: 56/70 vs 48/80 gives [0.0524, 0.3339]
    recs = [{"arm": "b", "verdict": int(i < 56)} for i in range(70)]
    recs += [{"arm": "a", "verdict": int(i < 48)} for i in range(80)]
    agg = aggregate(recs, ("a", "b"))
    assert agg["advantage"]["exact"] == "1/5"
    assert agg["advantage_ci95"] == pytest.approx([0.0524, 0.3339], abs=1e-4)

import csv
import io
import json

import pytest

from basewalk import cli
from basewalk.errors import ConfigError
from basewalk.harness import COLUMNS, run_experiment, validate_config
from basewalk.instance import load_instance, load_solution, validate_solution

CONFIG = {
    "algorithms": ["dp", "greedy"],
    "instances": [{"family": "graphic", "count": 20, "params": {"m": 5, "T": 3}}],
}


def rows(report):
    return list(csv.DictReader(io.StringIO(report.to_csv())))


def test_dp_baseline_ratios():
    rep = run_experiment(CONFIG)
    data = rows(rep)
    assert len(data) == 40
    assert list(data[0]) == list(COLUMNS)
    for r in data:
        assert r["status"] == "ok"
        assert float(r["ratio"]) >= 1.0
        if r["algorithm"] == "dp":
            assert float(r["ratio"]) == 1.0


def test_rerun_is_byte_identical(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(CONFIG))
    assert run_experiment(path).to_csv() == run_experiment(path).to_csv()


def test_unknown_algorithm_fails_before_running(monkeypatch):
    import basewalk.harness as h
    monkeypatch.setattr(h, "solve", lambda *a, **k: pytest.fail("solver ran"))
    with pytest.raises(ConfigError):
        run_experiment({"algorithms": ["dp", "simplex"], "instances": CONFIG["instances"]})
    for bad in ({"algorithms": ["dp"], "instances": [{"family": "nope"}]},
                {"algorithms": ["dp"], "instances": CONFIG["instances"], "baseline": "greedy"},
                {"algorithms": ["dp"], "instances": CONFIG["instances"], "colour": 1},
                {"algorithms": [], "instances": CONFIG["instances"]}):
        with pytest.raises(ConfigError):
            run_experiment(bad)


def test_seeds_follow_master_seed(monkeypatch):
    cfg = dict(CONFIG, master_seed=7, repeats=2, algorithms=["online"],
               instances=[{"family": "uniform", "count": 3}])
    seeds = [int(r["seed"]) for r in rows(run_experiment(cfg))]
    assert seeds == [7 + k for k in range(6)]
    monkeypatch.setenv("BASEWALK_SEED", "100")
    assert validate_config(cfg)["master_seed"] == 100
    seeds = [int(r["seed"]) for r in rows(run_experiment(cfg))]
    assert seeds[0] == 100


def test_solver_errors_are_recorded():
    cfg = {"algorithms": ["dp", "flow"], "instances": [{"family": "graphic", "count": 2}]}
    data = rows(run_experiment(cfg))
    flow = [r for r in data if r["algorithm"] == "flow"]
    assert all(r["status"] == "error" and "partition" in r["error"] for r in flow)
    assert all(r["status"] == "ok" for r in data if r["algorithm"] == "dp")


def test_summary_and_wall_time():
    rep = run_experiment(dict(CONFIG, record_wall_time=True,
                              instances=[{"family": "partition", "count": 2}]))
    assert "wall_time" in rep.to_csv().splitlines()[0]
    text = rep.summary()
    assert "greedy" in text and "dp" in text


def test_cli_generate_solve_round_trip(tmp_path, capsys):
    inst_path = tmp_path / "i.json"
    assert cli.main(["generate", "partition", "--seed", "3", "--set", "m=6", "--set", "T=3",
                     "-o", str(inst_path)]) == 0
    inst = load_instance(inst_path)
    for alg in ("dp", "flow", "greedy", "round", "online", "epoch", "lazy"):
        out = tmp_path / f"{alg}.json"
        assert cli.main(["solve", str(inst_path), "--alg", alg, "-o", str(out)]) == 0
        sol = load_solution(out)
        rep = validate_solution(inst, sol)
        assert rep
        assert json.loads(out.read_text())["cost"]["total"] == rep.cost.total


def test_cli_log_constraints(tmp_path):
    inst_path = tmp_path / "i.json"
    cli.main(["generate", "graphic", "--seed", "1", "-o", str(inst_path)])
    log = tmp_path / "log.csv"
    assert cli.main(["solve", str(inst_path), "--alg", "online", "--log-constraints", str(log),
                     "-o", str(tmp_path / "s.json")]) == 0
    lines = log.read_text().splitlines()
    assert lines[0] == "timestep,size,rhs,x_before,x_after"
    assert len(lines) > 1
    assert cli.main(["solve", str(inst_path), "--alg", "dp", "--log-constraints", str(log)]) == 2


def test_cli_bench_and_errors(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps(dict(CONFIG, instances=[{"family": "uniform", "count": 2}])))
    out = tmp_path / "out.csv"
    assert cli.main(["bench", str(cfg), "-o", str(out)]) == 0
    assert out.read_text().startswith("trial,instance")
    cfg.write_text("{not json")
    assert cli.main(["bench", str(cfg)]) == 2
    assert "error" in capsys.readouterr().err
    assert cli.main(["solve", str(tmp_path / "missing.json")]) == 2

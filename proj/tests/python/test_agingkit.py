import math
import os
import random
from pathlib import Path

import pytest

import agingkit as ak

SOURCE_DIR = Path(os.environ.get("AGINGKIT_SOURCE_DIR", Path(__file__).resolve().parents[2]))


def grid(n=500, span=10.0):
    return [span * (i + 1) / n for i in range(n)]


def test_lowess_keeps_lines():
    x = [0.5 * i for i in range(40)]
    y = [3.0 - 2.0 * v for v in x]
    for got, want in zip(ak.lowess(x, y, fraction=0.3), y):
        assert got == pytest.approx(want, abs=1e-12)


def test_lowess_rejects_bad_fraction():
    with pytest.raises(ak.DomainError, match="fraction"):
        ak.lowess([0, 1, 2, 3], [1, 2, 3, 4], fraction=0.0)


def test_normalize_orientations():
    assert ak.normalize([2, 4, 6]) == [0.0, 0.5, 1.0]
    assert ak.normalize([2, 4, 6], "lower") == [1.0, 0.5, 0.0]
    with pytest.raises(ak.DomainError):
        ak.normalize([5, 5, 5])


def test_aging_curve_drops_origin():
    t = [float(i) for i in range(50)]
    values = [0.1 * v * v for v in t]
    ts, ys = ak.aging_curve(t, values)
    assert ts[0] > 0
    assert len(ts) == 49
    assert all(0.0 <= y <= 1.0 for y in ys)


def test_fit_recovers_parameters():
    t = grid()
    y = ak.eval_model(0.06, 0.0294, 1.858, t)
    report = ak.fit(t, y, name="w2")
    assert report.converged
    assert report.K == pytest.approx(0.06, rel=1e-6)
    assert report.alpha == pytest.approx(0.0294, abs=1e-6)
    assert report.beta == pytest.approx(1.858, rel=1e-6)
    assert report.row().startswith("w2,")


def test_fit_with_noise():
    rng = random.Random(3)
    t = grid()
    y = [v + rng.gauss(0, 0.02) for v in ak.eval_model(0.4638, 0.0676, 0.43, t)]
    report = ak.fit(t, y)
    assert report.rmse < 0.08
    assert report.r_square > 0.93
    history = report.objective_history
    assert all(b <= a for a, b in zip(history, history[1:]))


def test_metrics():
    assert ak.rmse([1, 2, 4], [1, 3, 3]) == pytest.approx(math.sqrt(2 / 3))
    assert ak.r_square([1, 2, 4], [1, 2, 4]) == 1.0


def test_ode_residual_small():
    t = [1 + 1e-3 * i for i in range(1001)]
    assert ak.ode_residual(0.5, 0.1, 1.2, t) < 1e-6


def test_workload_parsing():
    load = ak.parse_workload("(600, 0, 100, 20, 1000, 0)")
    assert load == ak.WORKLOAD_L2
    assert load.file_object == 100
    with pytest.raises(ak.InputError):
        ak.parse_workload("600,0,20")


def test_simulation_ages_under_l2():
    trace = ak.simulate("600,0,100,20,1000,0", ticks=4000, seed=1)
    assert len(trace["tick"]) == 4001
    assert trace["bandwidth_kbyte"][0] == 120
    assert trace["bandwidth_kbyte"][-1] < 40
    assert trace["working_set_mb"][-1] > 1.8 * trace["working_set_mb"][0]


def test_simulation_is_deterministic():
    a = ak.simulate("600,0,100,20,1000,0", policy="probabilistic:0.3", ticks=500, seed=7)
    b = ak.simulate("600,0,100,20,1000,0", policy="probabilistic:0.3", ticks=500, seed=7)
    assert a == b


def test_rejuvenation_raises_bandwidth():
    trace = ak.rejuvenate("600,0,100,20,1000,0", "cache-hit", at=3000)
    bw = trace["bandwidth_kbyte"]
    before = sum(bw[2801:3001]) / 200
    after = sum(bw[3001:]) / len(bw[3001:])
    assert after > before


def test_config_round_trip():
    values = ak.SimConfig().to_dict()
    assert values["capacity_clients"] == 900
    shipped = ak.SimConfig.load(SOURCE_DIR / "config" / "simulator.conf").to_dict()
    assert shipped == values
    values["leak_fraction"] = 0.0
    values["backlog_gain"] = 0.0
    quiet = ak.simulate("600,0,100,20,1000,0", ticks=200, config=values)
    assert max(quiet["sfr_mb"]) == 0.0
    with pytest.raises(ak.InputError):
        ak.SimConfig.from_dict({"no_such_key": 1})


def test_cli_exit_codes(tmp_path):
    code, _, err = ak.run_cli(["smooth", str(tmp_path / "missing.csv"), "-o", str(tmp_path / "out.csv")])
    assert code == 2 and err
    out = tmp_path / "trace.csv"
    code, _, _ = ak.run_cli(["simulate", "--workload", "600,0,100,20,1000,0", "--ticks", "4000", "-o", str(out)])
    assert code == 0
    code, csv, _ = ak.run_cli(["fit", str(out)])
    assert code == 0
    header, row = csv.strip().splitlines()
    assert header == "name,K,alpha,beta,rmse,r_square"
    assert float(row.split(",")[-1]) >= 0.9

"""End-to-end CLI checks: exit codes, JSON/CSV outputs, determinism."""

import json

import pytest

from fpsig.cli import main

SINGLE = {
    "distribution": {"family": "uniform", "params": {}, "support": [0, 1]},
    "buyers": [{"form": "linear", "params": {"intercept": 0.0, "slope": 1.0}}],
    "rationality": "ex_post",
}
CROSSING = {
    "distribution": {"family": "uniform", "params": {}, "support": [0, 1]},
    "buyers": [
        {"form": "linear", "params": {"intercept": 0.3, "slope": 0.4}},
        {"form": "linear", "params": {"intercept": 0.0, "slope": 1.0}},
    ],
    "rationality": "ex_interim",
    "overrides": {"grid_m": 101, "price_steps": 21},
}
SCALED_PAIR = {
    "distribution": {"family": "uniform", "params": {}, "support": [0, 1]},
    "buyers": [
        {"form": "linear", "params": {"intercept": 0.0, "slope": 1.0}},
        {"form": "linear", "params": {"intercept": 0.0, "slope": 0.5}},
    ],
    "rationality": "ex_post",
    "overrides": {"grid_m": 101},
}


@pytest.fixture
def scenario_file(tmp_path):
    def write(data, name="scenario.json"):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    return write


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr().out
    return code, out


class TestSolve:
    def test_fixed_single(self, scenario_file, capsys):
        code, out = run(["solve", "--scenario", scenario_file(SINGLE), "--space", "fixed"], capsys)
        assert code == 0
        data = json.loads(out)
        assert data["schema"] == "fps/1"
        assert data["price"] == pytest.approx(0.5, abs=1e-4)
        assert data["revenue"] == pytest.approx(0.25, abs=1e-6)

    def test_signaling_crossing(self, scenario_file, capsys):
        code, out = run(
            ["solve", "--scenario", scenario_file(CROSSING), "--space", "signaling"], capsys
        )
        data = json.loads(out)
        assert data["price"] == pytest.approx(0.575, abs=1e-9)
        assert data["revenue"] == pytest.approx(0.575, abs=1e-9)
        assert data["mechanism"]["obedience_mode"] == "aggregate"

    def test_expost_multi_flags_nonexistence(self, scenario_file, capsys):
        code, out = run(
            ["solve", "--scenario", scenario_file(SCALED_PAIR), "--space", "signaling"], capsys
        )
        assert code == 0
        data = json.loads(out)
        assert data["no_obedient_mechanism"] is True
        assert data["restricted"] is True

    def test_bad_scenario_exits_2(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        code, _ = run(["solve", "--scenario", str(bad)], capsys)
        assert code == 2

    def test_unknown_family_exits_2(self, scenario_file, capsys):
        broken = dict(SINGLE, distribution={"family": "cauchy", "params": {}})
        code, _ = run(["solve", "--scenario", scenario_file(broken)], capsys)
        assert code == 2


class TestVerifyRoundTrip:
    def solve_to_file(self, scenario_path, tmp_path, capsys, space="signaling"):
        mech_path = str(tmp_path / "mech.json")
        code, _ = run(
            ["solve", "--scenario", scenario_path, "--space", space, "--out", mech_path],
            capsys,
        )
        assert code == 0
        return mech_path

    def test_threshold_mechanism_obedient(self, scenario_file, tmp_path, capsys):
        scn = scenario_file(SINGLE)
        mech = self.solve_to_file(scn, tmp_path, capsys)
        code, out = run(["verify", "--scenario", scn, "--mechanism", mech], capsys)
        assert code == 0
        assert json.loads(out)["verdict"] == "obedient"

    def test_argmax_mechanism_aggregate_obedient(self, scenario_file, tmp_path, capsys):
        scn = scenario_file(CROSSING)
        mech = self.solve_to_file(scn, tmp_path, capsys)
        code, out = run(["verify", "--scenario", scn, "--mechanism", mech], capsys)
        assert code == 0  # auto mode reads the mechanism's aggregate hint
        data = json.loads(out)
        assert data["verdict"] == "obedient"
        per_buyer = [c for c in data["constraints"] if c["buyer"] == 1 and c["signal_bit"] == 1]
        assert per_buyer[0]["slack"] == pytest.approx(-0.0875, abs=1e-6)

    def test_argmax_mechanism_per_buyer_violated(self, scenario_file, tmp_path, capsys):
        scn = scenario_file(CROSSING)
        mech = self.solve_to_file(scn, tmp_path, capsys)
        code, out = run(
            ["verify", "--scenario", scn, "--mechanism", mech, "--obedience-mode", "per-buyer"],
            capsys,
        )
        assert code == 1
        assert json.loads(out)["verdict"] == "violated"

    def test_restricted_mechanism_obedient(self, scenario_file, tmp_path, capsys):
        scn = scenario_file(SCALED_PAIR)
        mech = self.solve_to_file(scn, tmp_path, capsys)
        code, out = run(["verify", "--scenario", scn, "--mechanism", mech], capsys)
        assert code == 0

    def test_tampered_price_violated(self, scenario_file, tmp_path, capsys):
        single_interim = dict(SINGLE, rationality="ex_interim")
        scn = scenario_file(single_interim)
        mech_path = self.solve_to_file(scn, tmp_path, capsys)
        data = json.loads(open(mech_path).read())
        data["mechanism"]["price"] += 0.1
        tampered = tmp_path / "tampered.json"
        tampered.write_text(json.dumps(data))
        code, out = run(["verify", "--scenario", scn, "--mechanism", str(tampered)], capsys)
        assert code == 1
        slacks = [c["slack"] for c in json.loads(out)["constraints"] if not c["vacuous"]]
        assert min(slacks) == pytest.approx(-0.1, abs=1e-9)

    def test_dimension_mismatch_exits_2(self, scenario_file, tmp_path, capsys):
        mech = self.solve_to_file(scenario_file(SINGLE, "a.json"), tmp_path, capsys)
        code, _ = run(
            ["verify", "--scenario", scenario_file(CROSSING, "b.json"), "--mechanism", mech],
            capsys,
        )
        assert code == 2

    def test_fixed_price_mechanism_rejected(self, scenario_file, tmp_path, capsys):
        scn = scenario_file(SINGLE)
        mech = self.solve_to_file(scn, tmp_path, capsys, space="fixed")
        code, _ = run(["verify", "--scenario", scn, "--mechanism", mech], capsys)
        assert code == 2


class TestCompare:
    def test_single_buyer_spaces_tie(self, scenario_file, capsys):
        code, out = run(["compare", "--scenario", scenario_file(SINGLE)], capsys)
        assert code == 0
        data = json.loads(out)
        assert data["dominance"] == "equal"
        assert data["dominance_ok"] is True
        assert abs(data["signaling"]["revenue"] - data["fixed"]["revenue"]) <= 1e-6

    def test_crossing_dominance(self, scenario_file, capsys):
        code, out = run(["compare", "--scenario", scenario_file(CROSSING)], capsys)
        data = json.loads(out)
        assert data["fixed"]["revenue"] == pytest.approx(0.5, abs=1e-6)
        assert data["signaling"]["revenue"] == pytest.approx(0.575, abs=1e-6)
        assert data["delta_signaling_minus_fixed"] >= 0.07
        assert data["oracle"]["objective"] == pytest.approx(0.575, abs=0.01)

    def test_expost_multi_probe(self, scenario_file, capsys):
        code, out = run(["compare", "--scenario", scenario_file(SCALED_PAIR)], capsys)
        data = json.loads(out)
        assert data["signaling"]["no_obedient_mechanism"] is True
        assert data["full_signaling_probe"]["status"] == "infeasible"
        assert data["dominance_ok"] is True

    def test_byte_determinism(self, scenario_file, capsys):
        scn = scenario_file(CROSSING)
        _, out1 = run(["compare", "--scenario", scn], capsys)
        _, out2 = run(["compare", "--scenario", scn], capsys)
        assert out1 == out2


class TestOracleCommand:
    def test_exinterim_fields(self, scenario_file, capsys):
        code, out = run(["oracle", "--scenario", scenario_file(CROSSING)], capsys)
        assert code == 0
        data = json.loads(out)
        assert data["status"] == "optimal"
        assert data["objective"] == pytest.approx(0.575, abs=0.01)

    def test_probe_price(self, scenario_file, capsys):
        code, out = run(
            ["oracle", "--scenario", scenario_file(SCALED_PAIR), "--probe-price", "0.4"],
            capsys,
        )
        data = json.loads(out)
        assert data["status"] == "infeasible"
        assert data["certificate"] >= 1e-6


class TestSimulateCommand:
    def test_estimate_and_trace(self, scenario_file, tmp_path, capsys):
        trace = str(tmp_path / "trace.csv")
        code, out = run(
            [
                "simulate", "--scenario", scenario_file(SINGLE), "--space", "fixed",
                "--trials", "2000", "--seed", "7", "--trace", trace,
            ],
            capsys,
        )
        assert code == 0
        est = json.loads(out)["estimate"]
        assert abs(est["mean"] - 0.25) <= 4 * est["stderr"] + 1e-12
        lines = open(trace).read().strip().split("\n")
        assert len(lines) == 2001  # header + one row per trial
        assert lines[0].startswith("trial,quality,bit_1")

    def test_mechanism_file_input(self, scenario_file, tmp_path, capsys):
        scn = scenario_file(CROSSING)
        mech_path = str(tmp_path / "m.json")
        run(["solve", "--scenario", scn, "--space", "signaling", "--out", mech_path], capsys)
        code, out = run(
            [
                "simulate", "--scenario", scn, "--mechanism", mech_path,
                "--trials", "500", "--seed", "1", "--behavior", "follow",
            ],
            capsys,
        )
        assert code == 0
        est = json.loads(out)["estimate"]
        assert est["mean"] == pytest.approx(0.575, abs=1e-9)
        assert est["stderr"] == 0.0


class TestSweep:
    def test_csv_shape_and_values(self, scenario_file, tmp_path, capsys):
        out_path = str(tmp_path / "sweep.csv")
        code, out = run(
            [
                "sweep", "--scenario", scenario_file(SINGLE),
                "--price-range", "0", "1", "--steps", "11", "--out", out_path,
            ],
            capsys,
        )
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "price,rev_fixed_expost,rev_fixed_exinterim_indicator,rev_sig_restricted"
        assert len(lines) == 12
        mid = dict(zip(lines[0].split(","), lines[6].split(",")))
        assert float(mid["price"]) == pytest.approx(0.5)
        assert float(mid["rev_fixed_expost"]) == pytest.approx(0.25, abs=1e-9)
        assert open(out_path).read() == out

    def test_two_steps(self, scenario_file, capsys):
        code, out = run(
            ["sweep", "--scenario", scenario_file(SINGLE), "--price-range", "0", "1", "--steps", "2"],
            capsys,
        )
        assert code == 0
        assert len(out.strip().split("\n")) == 3

    def test_empty_range_rejected(self, scenario_file, capsys):
        code, _ = run(
            ["sweep", "--scenario", scenario_file(SINGLE), "--price-range", "0", "0", "--steps", "5"],
            capsys,
        )
        assert code == 2

    def test_plot_rendered(self, scenario_file, tmp_path, capsys):
        fig = tmp_path / "curve.png"
        code, _ = run(
            [
                "sweep", "--scenario", scenario_file(SINGLE),
                "--price-range", "0", "1", "--steps", "21", "--plot", str(fig),
            ],
            capsys,
        )
        assert code == 0
        assert fig.stat().st_size > 1000

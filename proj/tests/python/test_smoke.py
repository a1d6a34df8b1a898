import json

import pytest

import pyoctarm


SMALL_ARM = {
    "n_tm_rings": 8,
    "elements_per_rod": 8,
    "tapered": False,
}


def scenario(**overrides):
    cfg = {"schema_version": 1, "arm": SMALL_ARM, "duration": 0.02,
           "output": {"trajectory_stride": 0, "knot_stride": 100}}
    cfg.update(overrides)
    return json.dumps(cfg)


def test_version_string():
    assert pyoctarm.engine_version.startswith("octarm")


def test_census_default_spec():
    assert pyoctarm.rod_census(json.dumps({"schema_version": 1})) == 197


def test_run_and_analyze_quiescent():
    rec = pyoctarm.run_scenario(scenario())
    assert rec.failure_frame == -1
    assert len(rec) >= 2
    times = rec.times()
    assert times == sorted(times)
    nodes = rec.node_positions(0, 0)
    assert len(nodes) == 9
    for row in pyoctarm.analyze_knot(rec):
        assert abs(row[1]) < 1e-9  # link
        assert row[4] < 1e-6       # residual


def test_trajectory_round_trip(tmp_path):
    rec = pyoctarm.run_scenario(scenario())
    path = str(tmp_path / "t.traj")
    rec.save(path)
    back = pyoctarm.load_trajectory(path)
    assert back.config_hash == rec.config_hash
    assert back.times() == rec.times()
    assert back.node_positions(1, 0) == rec.node_positions(1, 0)


def test_config_errors_are_value_errors():
    with pytest.raises(ValueError, match="total_lenght"):
        pyoctarm.run_scenario(
            json.dumps({"schema_version": 1, "arm": {"total_lenght": 1}}))


def test_validation_suite():
    assert "cfw" in pyoctarm.validation_suites()
    rows = pyoctarm.validate("cfw")
    assert len(rows) == 10
    assert all(r["pass"] for r in rows)

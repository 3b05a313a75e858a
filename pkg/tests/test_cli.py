import json

import numpy as np
import pytest
from click.testing import CliRunner

from robloc import bundled_dataset, save_dataset_csv
from robloc.cli import main


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def demo10_csv(tmp_path):
    path = tmp_path / "demo10.csv"
    save_dataset_csv(bundled_dataset("demo10_2d"), path)
    return str(path)


@pytest.fixture
def demo5_csv(tmp_path):
    path = tmp_path / "demo5.csv"
    save_dataset_csv(bundled_dataset("demo5_1d"), path)
    return str(path)


def invoke(runner, args):
    return runner.invoke(main, args, catch_exceptions=False)


def test_estimate_mcd_json(runner, demo10_csv):
    result = invoke(runner, ["estimate", demo10_csv, "--estimator", "mcd"])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["estimator"] == "mcd"
    assert payload["equivariance_class"] == "affine"
    assert len(payload["members"][0]) == 2
    assert "config_hash" in payload


def test_estimate_unknown_estimator_exits_3(runner, demo10_csv):
    result = runner.invoke(main, ["estimate", demo10_csv, "--estimator", "nope"])
    assert result.exit_code == 3


def test_estimate_empty_file_exits_2(runner, tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    result = runner.invoke(main, ["estimate", str(empty), "--estimator", "mcd"])
    assert result.exit_code == 2


def test_estimate_missing_file_exits_2(runner):
    result = runner.invoke(main, ["estimate", "no-such.csv", "--estimator", "mcd"])
    assert result.exit_code == 2


def test_estimate_pm_requires_seed(runner, demo10_csv):
    result = runner.invoke(main, ["estimate", demo10_csv, "--estimator", "pm"])
    assert result.exit_code == 4


def test_attack_default_gamma_grid_emits_8_rows(runner, demo10_csv, tmp_path):
    curve = tmp_path / "curve.csv"
    result = invoke(
        runner,
        ["attack", demo10_csv, "--estimator", "mcd", "--family", "shear",
         "--emit-curve", str(curve)],
    )
    assert result.exit_code == 0
    rows = [line for line in curve.read_text().splitlines() if line.strip()]
    assert len(rows) == 8
    payload = json.loads(result.stdout)
    assert len(payload["grid"]) == 8
    assert payload["diverged"] is True


def test_attack_deterministic_bytes(runner, demo10_csv):
    args = ["attack", demo10_csv, "--estimator", "mcd", "--family", "shear",
            "--seed", "7", "--gamma-grid", "10,100"]
    out1 = invoke(runner, args).stdout
    out2 = invoke(runner, args).stdout
    assert out1 == out2


def test_attack_m_exceeding_n_exits_4(runner, demo10_csv):
    result = runner.invoke(
        main, ["attack", demo10_csv, "--estimator", "mcd", "--family", "cluster", "--m", "11"]
    )
    assert result.exit_code == 4


def test_attack_cluster_requires_m(runner, demo10_csv):
    result = runner.invoke(
        main, ["attack", demo10_csv, "--estimator", "mcd", "--family", "cluster"]
    )
    assert result.exit_code == 4


def test_fsbv_median_demo5(runner, demo5_csv):
    # 1-D certification has no sampled directions, so no seed is needed
    result = invoke(runner, ["fsbv", demo5_csv, "--estimator", "cmedian"])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["fraction"] == [3, 5]
    assert payload["certificates"]["3"]["status"] == "broken"
    assert payload["certificates"]["2"]["status"] == "survived"


def test_fsbv_2d_requires_seed(runner, demo10_csv):
    result = runner.invoke(main, ["fsbv", demo10_csv, "--estimator", "mcd"])
    assert result.exit_code == 4


def test_fsbv_mcd_demo10_certifies_4_of_10(runner, demo10_csv):
    result = invoke(runner, ["fsbv", demo10_csv, "--estimator", "mcd", "--seed", "0"])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["fraction"] == [4, 10]


def test_condition_h_below_k_requires_seed(runner, demo10_csv):
    result = runner.invoke(main, ["condition", demo10_csv, "--estimator", "mcd", "--h", "1"])
    assert result.exit_code == 4


def test_estimate_matches_library_call(runner, demo10_csv):
    import numpy as np

    from robloc import bundled_dataset, make_estimator

    result = invoke(runner, ["estimate", demo10_csv, "--estimator", "mcd"])
    payload = json.loads(result.stdout)
    direct = make_estimator("mcd")(bundled_dataset("demo10_2d"))
    assert np.allclose(payload["members"], direct.members)
    assert np.allclose(payload["canonical"], direct.canonical)


def test_fsbv_deterministic_bytes(runner, demo5_csv):
    args = ["fsbv", demo5_csv, "--estimator", "cmedian", "--seed", "1"]
    assert invoke(runner, args).stdout == invoke(runner, args).stdout


def test_bounds_table(runner):
    result = invoke(runner, ["bounds", "10", "2", "2"])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["translation"] == [5, 10]
    assert payload["affine_condition_h"] == [4, 10]
    assert payload["scatter"] == [4, 10]
    assert payload["projection_median"] == [5, 10]


def test_bounds_invalid_exits_4(runner):
    assert runner.invoke(main, ["bounds", "10", "2", "3"]).exit_code == 4


def test_depth_exact(runner, demo10_csv):
    result = invoke(runner, ["depth", demo10_csv, "--point", "3.5,5.0"])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["mode"] == "exact2d"
    assert payload["depth"] >= 1


def test_depth_sampled_requires_seed(runner, demo10_csv):
    result = runner.invoke(main, ["depth", demo10_csv, "--point", "1,1", "--mode", "sampled"])
    assert result.exit_code == 4


def test_condition_report(runner, demo10_csv):
    result = invoke(runner, ["condition", demo10_csv, "--estimator", "mcd", "--seed", "0"])
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert payload["h"] == 2
    assert payload["holds_empirically"] is True


def test_metric_between_samples(runner, tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    a.write_text("0.0\n10.0\n")
    b.write_text("9.0\n1.0\n")
    result = invoke(runner, ["metric", str(a), str(b)])
    assert result.exit_code == 0
    assert json.loads(result.stdout)["distance"] == 1.0


def test_metric_rejects_multicolumn(runner, tmp_path, demo10_csv):
    b = tmp_path / "b.csv"
    b.write_text("1.0\n2.0\n")
    result = runner.invoke(main, ["metric", demo10_csv, str(b)])
    assert result.exit_code == 2


def test_scenario_pm_rejects_bad_delta(runner):
    result = runner.invoke(
        main, ["scenario-pm", "--deltas", "0.1,1.5", "--seed", "1"]
    )
    assert result.exit_code == 4


def test_scenario_pm_small_run(runner):
    args = ["scenario-pm", "--m", "4", "--deltas", "1e-1,1e-2", "--seed", "3",
            "--random-count", "100", "--grid-refinements", "3"]
    result = invoke(runner, args)
    assert result.exit_code == 0
    payload = json.loads(result.stdout)
    assert len(payload["rows"]) == 2
    assert payload["rows"][0]["n"] == 10
    assert invoke(runner, args).stdout == result.stdout  # byte determinism

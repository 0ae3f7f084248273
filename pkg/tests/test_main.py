import json

import pytest

import main
from cli_io import DEFAULT_SCENARIO_PATH


@pytest.fixture
def small_scenario(write_scenario):
    with open(DEFAULT_SCENARIO_PATH, encoding="utf-8") as f:
        document = json.load(f)
    document["solver"]["rho_grid"] = 11
    document["experiments"]["figure5_n_max"] = 3
    document["phy"]["n_bits"] = 2000
    document["phy"]["snr_db"] = [0, 20]
    return document, write_scenario


class TestCommands:
    def test_solve_writes_results(self, small_scenario, tmp_path):
        document, write = small_scenario
        out = tmp_path / "solve"
        assert main.main(["solve", "--scenario", write(document), "--out", str(out)]) == main.EXIT_OK
        allocation = (out / "allocation.csv").read_text(encoding="utf-8").splitlines()
        assert allocation[0] == ",".join(main.ALLOCATION_HEADER)
        assert len(allocation) == 3
        assert len((out / "outer_trace.csv").read_text(encoding="utf-8").splitlines()) == 12
        summary = json.loads((out / "solve_summary.json").read_text(encoding="utf-8"))
        assert summary["status"] == "Optimal"
        assert summary["peak_tx_power_dbm"] < 30.0

    def test_figure5_is_byte_identical(self, small_scenario, tmp_path):
        document, write = small_scenario
        path = write(document)
        for run in ("first", "second"):
            assert main.main(["figure5", "--scenario", path, "--out", str(tmp_path / run)]) == main.EXIT_OK
        first = (tmp_path / "first" / "figure5.csv").read_bytes()
        assert first == (tmp_path / "second" / "figure5.csv").read_bytes()
        assert first.startswith(b"n_st,ht,wpt,bt,ht_wpt,ht_bt\n")

    def test_ber(self, small_scenario, tmp_path):
        document, write = small_scenario
        assert main.main(["ber", "--scenario", write(document), "--out", str(tmp_path), "--seed", "3"]) == 0
        assert len((tmp_path / "ber.csv").read_text(encoding="utf-8").splitlines()) == 3

    def test_figure4a_grid_override(self, small_scenario, tmp_path):
        document, write = small_scenario
        assert main.main(["figure4a", "--scenario", write(document), "--out", str(tmp_path), "--grid", "5"]) == 0
        assert len((tmp_path / "figure4a.csv").read_text(encoding="utf-8").splitlines()) == 26


class TestExitCodes:
    def test_infeasible(self, small_scenario, tmp_path):
        document, write = small_scenario
        document["scenario"]["r_t"] = 1e6
        code = main.main(["solve", "--scenario", write(document), "--out", str(tmp_path), "--grid", "3"])
        assert code == main.EXIT_INFEASIBLE

    def test_validation(self, small_scenario, tmp_path):
        document, write = small_scenario
        document["scenario"]["tau"] = 1.5
        assert main.main(["solve", "--scenario", write(document), "--out", str(tmp_path)]) == main.EXIT_VALIDATION

    def test_bad_override(self, tmp_path):
        assert main.main(["solve", "--out", str(tmp_path), "--tau", "2"]) == main.EXIT_VALIDATION

    def test_missing_file(self, tmp_path):
        code = main.main(["solve", "--scenario", str(tmp_path / "absent.json"), "--out", str(tmp_path)])
        assert code == main.EXIT_IO

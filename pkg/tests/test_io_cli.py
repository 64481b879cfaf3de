import csv
import io as stdio
import json

import numpy as np
import pytest

from conftest import cached_scan, cached_solve
from dipolechain import io
from dipolechain.chain import ChainConfig, DrivenAtomOutOfRange
from dipolechain.cli import main
from dipolechain.pipeline import PipelineError, SweepSpec, run_scan, run_sweep, summary_row


def test_config_round_trip(tmp_path):
    cfg = ChainConfig(3, 0.3, 2, 0.5, damping_weight=1.0)
    io.save_config(cfg, tmp_path / "c.json")
    assert io.load_config(tmp_path / "c.json") == cfg


def test_config_defaults_and_errors(tmp_path):
    cfg = io.config_from_dict({"n_atoms": 2, "spacing_over_lambda": 0.25})
    assert cfg.driven_atom == 1 and cfg.rabi_over_gamma == 0.02
    with pytest.raises(io.ConfigFileError):
        io.config_from_dict({"n_atoms": 2, "spacing_over_lambda": 0.25, "colour": "red"})
    with pytest.raises(io.ConfigFileError):
        io.config_from_dict({"n_atoms": 2})
    (tmp_path / "list.json").write_text("[1, 2]")
    with pytest.raises(io.ConfigFileError):
        io.load_config(tmp_path / "list.json")


def test_document_round_trip(tmp_path, triple_quarter):
    doc = cached_scan(triple_quarter)
    io.write_document(doc, tmp_path / "doc.json")
    back = io.read_document(tmp_path / "doc.json")
    assert back == doc


def test_document_round_trip_with_undefined_points(tmp_path):
    doc = run_scan(ChainConfig(2, 0.25, 1, 0.02), 720)
    doc.g2_norm[5] = np.nan
    io.write_document(doc, tmp_path / "doc.json")
    back = io.read_document(tmp_path / "doc.json")
    assert np.isnan(back.g2_norm[5])
    assert back == doc


def test_run_scan_is_deterministic(pair_quarter):
    assert run_scan(pair_quarter, 720) == run_scan(pair_quarter, 720)


def test_run_scan_validates_first():
    with pytest.raises(DrivenAtomOutOfRange):
        run_scan(ChainConfig(2, 0.25, 3, 0.02))
    with pytest.raises(ValueError):
        run_scan(ChainConfig(2, 0.25), grid_points=100)


def test_run_scan_wraps_stage_failures(monkeypatch):
    from dipolechain import pipeline
    from dipolechain.liouvillian import DegenerateKernel

    def broken(cfg):
        raise DegenerateKernel(2)

    monkeypatch.setattr(pipeline, "solve", broken)
    with pytest.raises(PipelineError) as info:
        pipeline.run_scan(ChainConfig(2, 0.25))
    assert isinstance(info.value.__cause__, DegenerateKernel)


def test_scan_csv(tmp_path, pair_quarter):
    doc = cached_scan(pair_quarter)
    io.write_scan_csv(doc, tmp_path / "s.csv")
    with open(tmp_path / "s.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == io.SCAN_HEADER
    assert len(rows) == 3601
    assert float(rows[1][0]) == 0.0
    # repr round-trips floats exactly
    assert float(rows[100][2]) == doc.g2_over_u2[99]


def test_density_matrix_round_trip(tmp_path, triple_quarter):
    rho = cached_solve(triple_quarter).rho
    io.write_density_matrix(rho, tmp_path / "rho.txt")
    np.testing.assert_array_equal(io.read_density_matrix(tmp_path / "rho.txt"), rho)
    buf = stdio.StringIO()
    io.write_density_matrix(rho, buf)
    assert buf.getvalue().startswith("#")


def test_sweep_records_failures_and_writes_files(tmp_path):
    spec = SweepSpec(ChainConfig(3, 0.25, 1, 0.02), "driven_atom", [1, 2, 5],
                     out_dir=str(tmp_path / "sw"))
    points = run_sweep(spec, grid_points=720)
    assert [p.document is None for p in points] == [False, False, True]
    assert "DrivenAtomOutOfRange" in points[2].error
    files = sorted(p.name for p in (tmp_path / "sw").iterdir())
    assert files == ["point_000.csv", "point_000.json", "point_001.csv", "point_001.json",
                     "summary.csv"]
    with open(tmp_path / "sw" / "summary.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert list(rows[0]) == io.SUMMARY_HEADER
    assert rows[2]["peak_angles_deg"].startswith("error:")
    assert int(rows[1]["n_peaks"]) >= 4


def test_sweep_in_parallel_matches_serial():
    spec = SweepSpec(ChainConfig(2, 0.25, 1, 0.02), "spacing_over_lambda", [0.25, 0.5, 0.75])
    serial = run_sweep(spec, grid_points=720)
    parallel = run_sweep(spec, grid_points=720, workers=2)
    assert [p.document for p in serial] == [p.document for p in parallel]


def test_sweep_rejects_unknown_parameter():
    with pytest.raises(ValueError):
        SweepSpec(ChainConfig(2, 0.25), "damping_weight", [0.5]).configs()


def test_summary_row_values(pair_quarter):
    from dipolechain.pipeline import SweepPoint
    row = summary_row(SweepPoint(0.25, cached_scan(pair_quarter)))
    assert row["v12"] == pytest.approx(0.957, abs=1e-3)
    assert row["n_peaks"] == len(cached_scan(pair_quarter).peaks)


# command line

def test_cli_validate(capsys):
    assert main(["validate", "--atoms", "2", "--spacing", "0.25"]) == 0
    assert "gamma" in capsys.readouterr().out


@pytest.mark.parametrize("argv", [
    ["validate", "--atoms", "2", "--spacing", "0.25", "--drive-index", "3"],
    ["validate", "--atoms", "9", "--spacing", "0.25"],
    ["validate", "--atoms", "2", "--spacing", "-1"],
    ["validate", "--atoms", "2"],
])
def test_cli_config_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_cli_config_file_with_override(tmp_path, capsys):
    io.save_config(ChainConfig(2, 0.25, 1, 0.02), tmp_path / "c.json")
    assert main(["steady", "--config", str(tmp_path / "c.json"), "--drive-index", "2",
                 "--out", str(tmp_path / "rho.txt")]) == 0
    out = capsys.readouterr().out
    assert "psi12 = +0.63" in out
    assert io.read_density_matrix(tmp_path / "rho.txt").shape == (4, 4)


def test_cli_scan_to_stdout_and_file(tmp_path, capsys):
    assert main(["scan", "--atoms", "2", "--spacing", "0.25", "--points", "360"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == ",".join(io.SCAN_HEADER) and len(lines) == 361
    assert main(["scan", "--atoms", "2", "--spacing", "0.25", "--points", "360",
                 "--out", str(tmp_path / "s.csv"), "--doc", str(tmp_path / "d.json")]) == 0
    assert io.read_document(tmp_path / "d.json").config.n_atoms == 2


def test_cli_peaks_expectation(tmp_path, capsys):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"n_superbunched": 2, "angles_deg": [71, 289], "tolerance_deg": 2}))
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n_superbunched": 3}))
    base = ["peaks", "--atoms", "3", "--spacing", "0.25"]
    assert main(base + ["--expect", str(good)]) == 0
    assert "superbunched" in capsys.readouterr().out
    assert main(base + ["--expect", str(bad)]) == 1
    assert "EXPECTATION FAILED" in capsys.readouterr().err


def test_cli_peaks_two_atoms_reports_extrema(capsys):
    assert main(["peaks", "--atoms", "2", "--spacing", "0.25"]) == 0
    out = capsys.readouterr().out
    assert "G1 extrema check" in out and "FAIL" not in out


def test_cli_sweep(tmp_path, capsys):
    assert main(["sweep", "--atoms", "2", "--spacing", "0.25", "--param", "spacing_over_lambda",
                 "--values", "0.25,0.5", "--points", "720", "--out", str(tmp_path)]) == 0
    assert "2 points, 0 failed" in capsys.readouterr().out
    assert (tmp_path / "summary.csv").exists()

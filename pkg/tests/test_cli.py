import json

from sld.cli import main


def _read_rows(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# schema: ")
    header = lines[1].split(",")
    return header, [line.split(",") for line in lines[2:]]


def test_table1_matches_reference(tmp_path):
    out = tmp_path / "t1.csv"
    assert main(["table1", "--out", str(out)]) == 0
    header, rows = _read_rows(out)
    assert header == ["sigma", "epsilon", "b1_min"]
    got = {(float(r[0]), float(r[1])): int(r[2]) for r in rows}
    assert got[(1.0, 0.001)] == 1
    assert got[(0.1, 0.01)] == 7
    assert got[(0.01, 0.001)] == 10


def test_design_human_and_json(capsys):
    code = main(["design", "--n", "4", "--power", "100", "--sigma", "0.1",
                 "--epsilon", "0.01", "--b1", "10", "--gain2", "4"])
    assert code == 0
    text = capsys.readouterr().out
    assert "phi*" in text and "rs*" in text and "residuals" in text

    code = main(["design", "--n", "4", "--power", "100", "--sigma", "0.1",
                 "--epsilon", "0.01", "--b1", "10", "--gain2", "4", "--json"])
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert {"phi_star", "rb_star", "re_star", "rs_star", "phi_max"} <= payload.keys()
    assert abs(payload["pco_residual"]) < 1e-9
    assert abs(payload["pso_residual"]) < 1e-9


def test_design_infeasible_exit_code(capsys):
    code = main(["design", "--n", "2", "--sigma", "0.1", "--epsilon", "0.001",
                 "--b1", "4", "--gain2", "4"])
    assert code == 3
    err = capsys.readouterr().err
    assert "b1_min = 10" in err


def test_invalid_config_exit_code(capsys):
    assert main(["design", "--sigma", "2.0", "--gain2", "4"]) == 2
    assert main(["outage", "--power", "10", "--power-db", "10"]) == 2
    capsys.readouterr()


def test_io_failure_exit_code(capsys):
    code = main(["table1", "--out", "/nonexistent-dir/t.csv"])
    assert code == 4
    capsys.readouterr()


def test_config_file_and_override(tmp_path, capsys):
    conf = tmp_path / "run.conf"
    conf.write_text("n=2\npower=10\nsigma=0.1\nepsilon=0.05\nb1=6\n# comment\n")
    code = main(["design", "--config", str(conf), "--gain2", "4", "--json"])
    assert code == 0
    base = json.loads(capsys.readouterr().out)
    # A flag overrides the file value.
    code = main(["design", "--config", str(conf), "--gain2", "4", "--json",
                 "--power", "100"])
    assert code == 0
    boosted = json.loads(capsys.readouterr().out)
    assert boosted["rs_star"] > base["rs_star"]


def test_power_db_conversion(capsys):
    args = ["design", "--n", "4", "--sigma", "0.1", "--epsilon", "0.01",
            "--b1", "10", "--gain2", "4", "--json"]
    assert main(args + ["--power", "100"]) == 0
    linear = json.loads(capsys.readouterr().out)
    assert main(args + ["--power-db", "20"]) == 0
    db = json.loads(capsys.readouterr().out)
    assert db == linear


def test_throughput_sweep_axis(tmp_path, capsys):
    out = tmp_path / "th.csv"
    assert main(["throughput", "--n", "4", "--sigma", "0.05", "--epsilon", "0.02",
                 "--b1", "10", "--b2", "5", "--sweep", "power:1:100:7:log",
                 "--out", str(out)]) == 0
    header, rows = _read_rows(out)
    assert header == ["p", "eta", "scheme", "b2"]
    assert len(rows) == 7
    assert rows[0][2] == "equalized"
    assert main(["throughput", "--sweep", "power:1:100:7:cubic"]) == 2
    capsys.readouterr()


def test_unknown_config_key(tmp_path, capsys):
    conf = tmp_path / "bad.conf"
    conf.write_text("powerr=10\n")
    assert main(["design", "--config", str(conf), "--gain2", "4"]) == 2
    capsys.readouterr()


def test_outage_csv_schema(tmp_path, capsys):
    out = tmp_path / "o.csv"
    assert main(["outage", "--n", "4", "--power", "10", "--phi", "0.3",
                 "--gain2", "4", "--points", "9", "--out", str(out)]) == 0
    header, rows = _read_rows(out)
    assert header == ["rate", "pco", "pso"]
    assert len(rows) == 9
    assert float(rows[0][1]) == 0.0  # zero rate never in connection outage
    assert float(rows[0][2]) == 1.0  # zero redundancy never secure
    capsys.readouterr()


def test_rerun_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["fig2", "--points", "5"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    capsys.readouterr()


def test_sidecar_metadata(tmp_path, capsys):
    out = tmp_path / "t.csv"
    assert main(["table1", "--out", str(out)]) == 0
    meta = (tmp_path / "t.csv.meta").read_text()
    assert "config_hash=" in meta
    assert "version=" in meta
    assert "baseline_convention=" in meta
    capsys.readouterr()


def test_sweep_tau_csv(tmp_path, capsys):
    out = tmp_path / "st.csv"
    assert main(["sweep-tau", "--n", "4", "--power", "10", "--sigma", "0.05",
                 "--epsilon", "0.01", "--budget", "40", "--out", str(out)]) == 0
    header, rows = _read_rows(out)
    assert header == ["tau", "b1", "b2", "eta", "is_argmax", "is_tau_star",
                      "is_approximated"]
    assert sum(int(r[5]) for r in rows) == 1  # exactly one tau_star row
    assert all(int(r[1]) + int(r[2]) == 40 for r in rows)
    capsys.readouterr()


def test_montecarlo_experiment(tmp_path, capsys):
    out = tmp_path / "mc.csv"
    assert main(["montecarlo", "--n", "4", "--power", "10", "--sigma", "0.05",
                 "--epsilon", "0.02", "--b1", "10", "--gain2", "6",
                 "--draws", "20000", "--out", str(out)]) == 0
    header, rows = _read_rows(out)
    assert header == ["quantity", "analytic", "empirical", "std_err", "draws"]
    table = {r[0]: (float(r[1]), float(r[2]), float(r[3])) for r in rows}
    ana, emp, se = table["pso_at_design"]
    assert abs(ana - emp) <= 4 * se
    capsys.readouterr()

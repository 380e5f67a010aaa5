import csv

import pytest

from twrcroute.cli import main


def run(args):
    return main(args)


def read_csv(path):
    lines = path.read_text().splitlines()
    assert lines[0] == "# schema=1"
    rows = list(csv.reader(lines[1:]))
    return rows[0], rows[1:]


def test_threshold_csv(tmp_path):
    out = tmp_path / "thr.csv"
    assert run(["threshold", "--out-csv", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["rate_bpcu", "alpha_star"]
    alphas = [float(r[1]) for r in rows]
    # decreasing toward 2
    assert all(a > b for a, b in zip(alphas, alphas[1:]))
    assert alphas[-1] > 2.0
    assert alphas[-1] < 2.1


def test_threshold_empty_range_usage_error(tmp_path):
    out = tmp_path / "thr.csv"
    code = run(["threshold", "--rate-min", "2", "--rate-max", "1",
                "--rate-step", "0.1", "--out-csv", str(out)])
    assert code == 2


def test_placement_csv(tmp_path):
    out = tmp_path / "pl.csv"
    assert run(["placement", "--alpha", "2.0,2.4", "--grid", "200",
                "--p00-mj", "0", "--eta", "1",
                "--out-csv", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["alpha", "relay_pos_fraction", "f_over_n0",
                      "direct_over_n0"]
    by_alpha = {}
    for r in rows:
        by_alpha.setdefault(float(r[0]), []).append(
            (float(r[1]), float(r[2]), float(r[3])))
    # alpha=2.4: some relayed position beats direct; alpha=2.0: none does
    assert any(f < d for _, f, d in by_alpha[2.4])
    assert all(f >= d for _, f, d in by_alpha[2.0])


def test_eebe_csv(tmp_path):
    out = tmp_path / "ee.csv"
    assert run(["eebe", "--k", "1,4", "--rate-min", "0.5", "--rate-max", "2.0",
                "--rate-step", "0.5", "--p00-mj", "0", "--eta", "1",
                "--out-csv", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["d_route_m", "k", "rate_bpcu", "be_bps_hz",
                      "ee_bit_per_j"]
    ks = {int(r[1]) for r in rows}
    assert ks == {1, 4}
    # k=1 keeps BE = R; k=4 halves it
    for r in rows:
        if int(r[1]) == 1:
            assert float(r[3]) == pytest.approx(float(r[2]))
        else:
            assert float(r[3]) == pytest.approx(float(r[2]) / 2.0)


def test_eebe_marks_infeasible_cells(tmp_path):
    out = tmp_path / "ee.csv"
    assert run(["eebe", "--k", "4", "--rate-min", "6.5", "--rate-max", "6.5",
                "--rate-step", "1.0", "--out-csv", str(out)]) == 0
    _, rows = read_csv(out)
    assert rows[0][3] == "inf"


def test_sinr_error_flags_infeasible(tmp_path):
    out = tmp_path / "se.csv"
    assert run(["sinr-error", "--be-min", "1.0", "--be-max", "4.0",
                "--be-step", "1.5", "--p00-mj", "0", "--eta", "1",
                "--out-csv", str(out)]) == 0
    header, rows = read_csv(out)
    assert header[-1] == "feasible"
    flags = [int(r[4]) for r in rows]
    assert flags == [1, 1, 0]


def test_rate_limit_table(tmp_path, capsys):
    out = tmp_path / "rl.csv"
    assert run(["rate-limit", "--out-csv", str(out)]) == 0
    text = capsys.readouterr().out
    assert "unbounded" in text
    _, rows = read_csv(out)
    assert [int(r[0]) for r in rows] == list(range(7))
    assert [int(r[2]) for r in rows] == [k + 1 for k in range(7)]
    assert all(r[1] == "inf" for r in rows[:4])
    assert all(r[1] != "inf" for r in rows[4:])


def test_compare_requires_route(tmp_path):
    out = tmp_path / "cmp.csv"
    assert run(["compare", "--out-csv", str(out)]) == 2


def test_compare_csv(tmp_path):
    out = tmp_path / "cmp.csv"
    assert run(["compare", "--route", "1200:1", "--route", "1000:3",
                "--rate-min", "0.5", "--rate-max", "1.5",
                "--rate-step", "0.5", "--out-csv", str(out)]) == 0
    header, rows = read_csv(out)
    assert header == ["rate_bpcu", "d_route_m", "k", "objective_f", "winner"]
    # exactly one winner per rate point
    by_rate = {}
    for r in rows:
        by_rate.setdefault(r[0], []).append(int(r[4]))
    for winners in by_rate.values():
        assert sum(winners) == 1


def test_compare_rejects_malformed_route():
    assert run(["compare", "--route", "1200:9", "--out-csv", "x.csv"]) == 2


def test_simulate_summary_and_trace(tmp_path, capsys):
    out = tmp_path / "trace.csv"
    assert run(["simulate", "--k", "5", "--pairs", "1",
                "--out-csv", str(out)]) == 0
    assert "total_slots=6" in capsys.readouterr().out
    header, rows = read_csv(out)
    assert header == ["slot", "node", "role", "counterpart", "signal_J",
                      "interference_J", "noise_J", "rate_bpcu"]
    assert len(rows) == 6 * 7  # six slots, seven nodes
    rx_rates = [float(r[7]) for r in rows if r[2] == "rx" and r[7]]
    assert rx_rates  # decoding links carry achieved rates
    for rate in rx_rates:
        assert rate == pytest.approx(1.0, rel=1e-9)


def test_simulate_unsupported_k_exit_code():
    assert run(["simulate", "--k", "7"]) == 3


def test_identical_invocations_byte_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["eebe", "--k", "2,5", "--rate-min", "0.2", "--rate-max", "2.0",
            "--rate-step", "0.2"]
    assert run(args + ["--out-csv", str(a)]) == 0
    assert run(args + ["--out-csv", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_config_file_flows_into_commands(tmp_path):
    conf = tmp_path / "phy.conf"
    conf.write_text("alpha = 3.0\n")
    out = tmp_path / "rl.csv"
    assert run(["rate-limit", "--config", str(conf),
                "--out-csv", str(out)]) == 0
    _, rows = read_csv(out)
    # a lower path-loss exponent shifts the k=4 rate limit
    from twrcroute.power_alloc import rate_upper_limit
    assert float(rows[4][1]) == pytest.approx(rate_upper_limit(4, 3.0),
                                              abs=1e-6)

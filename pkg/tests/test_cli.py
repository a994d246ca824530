import math

import pytest

from chaininject import analytics
from chaininject.analytics import AngleSchedule, ErrorSpec
from chaininject.cli import main, read_config
from chaininject.errors import ConfigError
from chaininject.protocol import RunRecord
from chaininject.sweeps import HEADER, SweepConfig, analytic_points, cmd_analytic_sweep, read_csv

HEADER_LINE = (
    "experiment,d,n_chains,theta_L,theta_p,n_e,error_kind,epsilon,infidelity,P_t,overhead,method,seed,"
    "infidelity_signed,error_weight,accepted,shots,status"
)


def run(tmp_path, *args, name="out.csv"):
    out = tmp_path / name
    code = main([*args, "--out", str(out)])
    return code, out


def test_header_contract():
    assert ",".join(HEADER) == HEADER_LINE


@pytest.mark.parametrize("experiment", ["fig2a", "fig3", "fig4"])
def test_analytic_csv_byte_stable(tmp_path, experiment):
    c1, a = run(tmp_path, "analytic", "--experiment", experiment, "--seed", "3", name="a.csv")
    c2, b = run(tmp_path, "analytic", "--experiment", experiment, "--seed", "3", "--jobs", "2", name="b.csv")
    assert c1 == c2 == 0
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().splitlines()[0] == HEADER_LINE


def test_fig2a_rows(tmp_path):
    _, out = run(tmp_path, "analytic", "--experiment", "fig2a")
    rows = read_csv(out.read_text())
    assert {r["d"] for r in rows} == {str(d) for d in range(3, 16, 2)}
    two = [r for r in rows if r["n_e"] == "2"]
    assert sorted(int(r["d"]) for r in two) == [9, 11, 13, 15]
    assert all(r["method"] == "analytic" and r["status"] == "ok" for r in rows)


def test_fig3_rows_carry_over_rotation(tmp_path):
    _, out = run(tmp_path, "analytic", "--experiment", "fig3")
    rows = read_csv(out.read_text())
    assert rows and all(r["error_kind"] == "overRotation" and float(r["epsilon"]) == 0.2 for r in rows)


def test_fig2b_needs_distance(tmp_path, capsys):
    code, _ = run(tmp_path, "analytic", "--experiment", "fig2b")
    assert code == 2
    assert "distance" in capsys.readouterr().err
    code, out = run(tmp_path, "analytic", "--experiment", "fig2b", "--distances", "5")
    assert code == 0 and {r["d"] for r in read_csv(out.read_text())} == {"5"}


def test_unreachable_target_is_row_level(tmp_path):
    code, out = run(tmp_path, "analytic", "--experiment", "custom", "--distances", "3",
                    "--theta-l", "0.1,3.5", "--n-chains", "1")
    rows = read_csv(out.read_text())
    assert code == 0
    assert [r["status"].startswith("error") for r in rows] == [False, True]


def test_analytic_rows_reproducible_from_library(tmp_path):
    _, out = run(tmp_path, "analytic", "--experiment", "fig2a")
    for row in read_csv(out.read_text()):
        d, n, n_e = int(row["d"]), int(row["n_chains"]), int(row["n_e"])
        theta_p = analytics.solve_physical_angle(float(row["theta_L"]) / n, d)
        sched = AngleSchedule.uniform(theta_p, d)
        tc = analytics.chain_angle(sched)
        te, _ = analytics.chain_angle_with_error(sched, ErrorSpec.pauli_z(0))
        assert float(row["theta_p"]) == theta_p
        if n == 1:
            want = analytics.infidelity_single(tc, te)
        else:
            want = analytics.infidelity_multiple(n, n_e, tc, te)
        assert float(row["infidelity"]) == want
        assert float(row["P_t"]) == analytics.success_probability(sched) ** n


def test_config_file_and_override(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# sweep\nexperiment = custom\ndistances = 3, 5\ntheta_l = 2*pi*1e-2  # comment\nseed = 9\n")
    values = read_config(cfg)
    assert values["distances"] == (3, 5)
    assert values["theta_l_values"] == pytest.approx((2 * math.pi * 1e-2,))
    code, out = run(tmp_path, "analytic", "--config", str(cfg), "--distances", "7")
    rows = read_csv(out.read_text())
    assert code == 0 and {r["d"] for r in rows} == {"7"} and rows[0]["seed"] == "9"


@pytest.mark.parametrize("text", ["nonsense line\n", "bogus = 1\n", "distances = a,b\n"])
def test_bad_config(tmp_path, text):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text(text)
    with pytest.raises(ConfigError):
        read_config(cfg)
    assert main(["analytic", "--config", str(cfg)]) == 2


def test_config_validation():
    with pytest.raises(ConfigError):
        SweepConfig(experiment="fig9")
    with pytest.raises(ConfigError):
        SweepConfig(shots=0)
    with pytest.raises(ConfigError):
        analytic_points(SweepConfig(experiment="custom"))


def test_simulate_worked_example(tmp_path):
    code, out = run(tmp_path, "simulate", "--lattices", "3x3", "--rows", "1,3", "--theta-p", "pi/3")
    rows = read_csv(out.read_text())
    sim = [r for r in rows if r["method"] == "sim"]
    assert code == 0 and len(sim) == 1
    assert float(sim[0]["P_t"]) == pytest.approx(0.19140625, abs=1e-9)
    log = out.with_suffix(".runs.tsv").read_text().splitlines()
    assert RunRecord.from_line(log[0]).accepted


def test_simulate_z_error_matches_analytic(tmp_path):
    code, out = run(tmp_path, "simulate", "--lattices", "3", "--theta-p", "pi/3", "--z-errors", "2")
    rows = read_csv(out.read_text())
    ana = next(r for r in rows if r["method"] == "analytic")
    sim = next(r for r in rows if r["method"] == "sim")
    assert abs(float(sim["infidelity"]) - float(ana["infidelity_signed"])) < 1e-9
    assert abs(float(sim["P_t"]) - float(ana["P_t"])) < 1e-12


def test_simulate_3x5_matches_analytics(tmp_path):
    code, out = run(tmp_path, "simulate", "--lattices", "3x5", "--theta-l", "0.3")
    sim = next(r for r in read_csv(out.read_text()) if r["method"] == "sim")
    theta_p = float(sim["theta_p"])
    assert float(sim["P_t"]) == pytest.approx(
        analytics.success_probability(AngleSchedule.uniform(theta_p, 5)) ** 2, abs=1e-12)
    assert float(sim["infidelity"]) < 1e-12


def test_simulate_sampled_mode(tmp_path):
    code, out = run(tmp_path, "simulate", "--lattices", "3", "--theta-l", "0.4", "--mode", "sampled",
                    "--shots", "200", "--seed", "5")
    sim = read_csv(out.read_text())[0]
    assert code == 0 and sim["shots"] == "200"
    assert float(sim["P_t"]) == int(sim["accepted"]) / 200


def test_simulate_too_large(tmp_path):
    code, _ = run(tmp_path, "simulate", "--lattices", "5x6")
    assert code == 2


def test_plot_written(tmp_path):
    code, out = run(tmp_path, "analytic", "--experiment", "fig4", "--plot")
    png = out.with_suffix(".png")
    assert code == 0 and png.read_bytes()[:4] == b"\x89PNG"


def test_verify_passes(capsys):
    assert main(["verify"]) == 0
    out = capsys.readouterr().out
    assert "theta_c^e(d) = theta_c(d-2)" in out


def test_verify_negative_control(monkeypatch, capsys):
    real = analytics.success_probability
    monkeypatch.setattr(analytics, "success_probability", lambda s: 1.01 * real(s))
    assert main(["verify"]) == 1
    out = capsys.readouterr().out
    assert "FAIL  closed form vs Kronecker expansion" in out


def test_analytic_sweep_library_matches_grid():
    rows = cmd_analytic_sweep(SweepConfig(experiment="fig4"))
    assert len(rows) == 14
    assert all(float(r["theta_L"]) == 2 * math.pi * 1e-3 for r in rows)

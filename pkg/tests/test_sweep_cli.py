import csv
import io
import math

import numpy as np
import pytest

from fidelity_lie.cli import main, read_config_file
from fidelity_lie.models import lmg_chi_closed, lmg_geometric_phase
from fidelity_lie.sweep import (
    ConfigError,
    SweepConfig,
    ed_check,
    grid_points,
    parse_axis,
    run_sweep,
    to_csv,
    validate,
)


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def test_parse_axis():
    assert parse_axis("h=1:2:3") == ("h", (1.0, 1.5, 2.0))
    assert parse_axis("gamma=0.5") == ("gamma", (0.5,))
    assert parse_axis("h=2:2:1") == ("h", (2.0,))
    for bad in ("h", "h=1:2", "h=2:1:3", "h=1:2:0", "h=a:b:c"):
        with pytest.raises(ConfigError):
            parse_axis(bad)


def test_grid_skips_critical_point():
    cfg = SweepConfig(model="lmg", grid={"h": tuple(np.linspace(0.5, 1.5, 11)) + (1 + 5e-7,), "gamma": (0.5,)})
    hs = [p["h"] for p in grid_points(cfg)]
    assert len(hs) == 10
    assert all(abs(h - 1) > 1e-6 for h in hs)


def test_grid_is_row_major():
    cfg = SweepConfig(model="lmg", grid={"h": (1.5, 2.0), "gamma": (0.1, 0.2, 0.3)})
    pts = [(p["h"], p["gamma"]) for p in grid_points(cfg)]
    assert pts == [(1.5, 0.1), (1.5, 0.2), (1.5, 0.3), (2.0, 0.1), (2.0, 0.2), (2.0, 0.3)]


@pytest.mark.parametrize(
    "cfg",
    [
        SweepConfig(model="xxz", oracles=("loop",)),
        SweepConfig(model="lmg", oracles=("loop",)),
        SweepConfig(model="nope"),
        SweepConfig(model="lmg", oracles=("closed",), grid={"eta": (2.0,)}),
        SweepConfig(model="lmg", oracles=()),
        SweepConfig(model="lmg", oracles=("closed",), grid={"h": (0.5,), "gamma": (1.0,)}),
        SweepConfig(model="xxz", grid={"eta": (0.5,)}),
        SweepConfig(model="bec", grid={"lambda": (3.0,)}),
    ],
)
def test_validation_rejects_before_computing(cfg):
    with pytest.raises(ConfigError):
        validate(cfg)


def test_fig2_matches_closed_form(tmp_path):
    out = tmp_path / "fig2.csv"
    rows, summary = run_sweep(SweepConfig.from_preset("fig2", output_path=str(out)))
    data = read_csv(out)
    assert len(data) == 200 == summary["rows"]
    for r in data:
        h = float(r["h"])
        assert 0.2 <= h <= 2 and abs(h - 1) > 1e-6
        assert float(r["chi_closed"]) == lmg_chi_closed(h, 0.5)
        assert float(r["beta_closed"]) == lmg_geometric_phase(h, 0.5)


def test_fig1_maximal_along_critical_edge(tmp_path):
    rows, _ = run_sweep(SweepConfig.from_preset("fig1"))
    assert len(rows) == 2500
    for gamma in sorted({r["gamma"] for r in rows}):
        line = [r for r in rows if r["gamma"] == gamma]
        best = max(line, key=lambda r: r["chi_closed"])
        assert best["h"] == min(r["h"] for r in line)


def test_fig3_phase_and_susceptibility_diverge_together():
    rows, _ = run_sweep(SweepConfig.from_preset("fig3"))
    for r in rows:
        assert r["beta_closed"] <= 0 and r["chi_closed"] >= 0
    for gamma in sorted({r["gamma"] for r in rows}):
        line = sorted((r for r in rows if r["gamma"] == gamma), key=lambda r: r["h"])
        chis = [r["chi_closed"] for r in line]
        betas = [abs(r["beta_closed"]) for r in line]
        assert all(a > b for a, b in zip(chis, chis[1:]))
        assert all(a > b for a, b in zip(betas, betas[1:]))


def test_two_level_single_point_all_oracles():
    rows, _ = run_sweep(
        SweepConfig(model="two_level", grid={"theta": (math.pi / 2,)}, oracles=("closed", "pert", "fd", "loop"))
    )
    (row,) = rows
    for col in ("chi_closed", "chi_pert", "chi_fd"):
        assert row[col] == pytest.approx(0.25, abs=1e-6)
    assert row["beta_loop"] == pytest.approx(row["beta_closed"], abs=1e-4)


def test_bec_and_xxz_sweeps():
    rows, summary = run_sweep(SweepConfig(model="bec", grid={"lambda": (0.2, 0.5)}, oracles=("closed", "pert", "fd")))
    assert summary["max_rel_dev_chi_pert"] < 1e-6 and summary["max_rel_dev_chi_fd"] < 1e-6
    rows, _ = run_sweep(SweepConfig(model="xxz", grid={"eta": (1.5, 2.0, 3.0)}))
    assert rows[0]["chi_closed"] > rows[1]["chi_closed"] > rows[2]["chi_closed"] > 0


def test_csv_format():
    cfg = SweepConfig(model="lmg", grid={"h": (2.0,), "gamma": (0.5,)})
    text = to_csv(cfg, [{"h": 2.0, "gamma": 0.5, "chi_closed": 1 / 288, "beta_closed": -0.1}])
    header, line = text.splitlines()
    assert header == "h,gamma,chi_closed,chi_pert,chi_fd,beta_closed,gap,e0"
    assert line.split(",")[2] == f"{1 / 288:.17g}"
    assert float(line.split(",")[2]) == 1 / 288
    assert line.endswith(",-0.10000000000000001,,")


def test_parallel_sweep_matches_serial():
    cfg = SweepConfig(model="lmg", grid={"h": (1.5, 2.0, 2.5), "gamma": (0.5,)}, oracles=("closed", "pert"), ed_size=64)
    serial, _ = run_sweep(cfg)
    parallel, _ = run_sweep(SweepConfig(**{**cfg.__dict__, "workers": 2}))
    assert to_csv(cfg, serial) == to_csv(cfg, parallel)


def test_ed_check_examples():
    rows, closed, ok = ed_check([128], 2.0, 1.0)
    assert closed == 0.0 and rows[0].chi_pert < 1e-10 and ok
    with pytest.raises(ConfigError):
        ed_check([128], 1.0, 0.5)
    with pytest.raises(ConfigError):
        ed_check([32], 2.0, 0.5)
    rows, closed, ok = ed_check([64, 128, 256], 2.0, 0.5)
    assert ok and [r.N for r in rows] == [64, 128, 256]
    assert rows[0].abs_error > rows[1].abs_error > rows[2].abs_error


# -- CLI ----------------------------------------------------------------------


def test_cli_sweep_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["sweep", "--preset", "fig1", "--out", str(a)]) == 0
    assert main(["sweep", "--preset", "fig1", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert "rows: 2500" in capsys.readouterr().out


def test_cli_config_file_and_override(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    out = tmp_path / "out.csv"
    cfg.write_text(
        "# lmg cross-check\n"
        "model = lmg\n"
        "grid = h=1.5:2:2   # two points\n"
        "grid = gamma=0.5\n"
        "oracles = closed,pert\n"
        "ed-size = 64\n"
        f"out = {out}\n"
    )
    assert read_config_file(str(cfg))["grid"] == ["h=1.5:2:2", "gamma=0.5"]
    assert main(["sweep", "--config", str(cfg), "--grid", "gamma=0.25"]) == 0
    data = read_csv(out)
    assert [float(r["gamma"]) for r in data] == [0.25, 0.25]
    assert all(r["chi_pert"] and r["chi_closed"] for r in data)
    assert "max_rel_dev_chi_pert" in capsys.readouterr().out


def test_cli_point(capsys):
    assert main(["point", "--model", "two_level", "--oracles", "closed,pert,fd,loop"]) == 0
    out = capsys.readouterr().out
    assert "chi_pert" in out and "beta_loop" in out
    assert main(["point", "--model", "lmg", "--grid", "h=1:2:3"]) == 2


def test_cli_ed_check(capsys):
    assert main(["ed-check", "--ed-size", "64,128", "--grid", "h=2", "--grid", "gamma=0.5"]) == 0
    out = capsys.readouterr().out
    assert "chi_closed=0.003472222222222222" in out
    assert main(["ed-check", "--ed-size", "128", "--grid", "h=1"]) == 2


def test_cli_validation_exit_codes(tmp_path):
    assert main(["sweep", "--model", "xxz", "--oracles", "loop"]) == 2
    assert main(["sweep", "--model", "lmg", "--out", str(tmp_path / "missing" / "x.csv")]) == 2
    assert main(["sweep", "--model", "lmg", "--ed-size", "abc", "--oracles", "pert"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--model", "ising"])
    assert exc.value.code == 2


def test_cli_unstable_bec_mode_is_a_validation_error():
    assert main(["sweep", "--model", "bec", "--grid", "lambda=1.9999999", "--oracles", "closed"]) == 2


def test_cli_numerical_failure_exit_code(monkeypatch):
    import fidelity_lie.sweep as sweep_mod
    from fidelity_lie.spectral import SpectralError

    def broken(*args, **kwargs):
        raise SpectralError("solver did not converge")

    monkeypatch.setattr(sweep_mod, "eigensolve", broken)
    assert main(["sweep", "--model", "lmg", "--oracles", "pert", "--ed-size", "64"]) == 3
    assert main(["ed-check", "--ed-size", "64"]) == 3


def test_cli_ed_check_trend_failure(monkeypatch, capsys):
    import fidelity_lie.cli as cli_mod
    from fidelity_lie.sweep import EdCheckRow

    monkeypatch.setattr(
        cli_mod, "ed_check",
        lambda sizes, h, g: ([EdCheckRow(64, 0.1, 1e-3), EdCheckRow(128, 0.1, 2e-3)], 0.1, False),
    )
    assert main(["ed-check", "--ed-size", "64,128"]) == 3

import json
import math
import os

import numpy as np
import pytest

from cwiener import cli
from cwiener.cli import ConfigError, RunConfig, cmd_fernique, cmd_sample_bm, cmd_sample_fgf, main
from cwiener.io import NaNDetectedError, atomic_write_text, check_finite, csv_text, fmt, json_text, read_csv


def test_fmt_round_trips_doubles():
    for x in (math.pi, 1 / 3, 1e-300, -2.5e17, 0.1 + 0.2):
        assert float(fmt(x)) == x


def test_csv_and_json_text():
    text = csv_text(("a", "b"), [(1, 0.1), (2, -1e-20)])
    assert text == "a,b\n1,0.10000000000000001\n2,-9.9999999999999995e-21\n"
    assert json.loads(json_text({"b": 1, "a": [1.5]})) == {"a": [1.5], "b": 1}
    with pytest.raises(NaNDetectedError):
        json_text({"x": [1.0, float("nan")]})


def test_check_finite_nested():
    check_finite({"a": [1, 2j, np.ones(3)]})
    with pytest.raises(NaNDetectedError):
        check_finite({"a": [np.array([1, np.nan])]})
    with pytest.raises(NaNDetectedError):
        check_finite(complex(0, math.nan))


def test_atomic_write(tmp_path):
    path = tmp_path / "sub" / "out.csv"
    atomic_write_text(path, "x\n1\n")
    assert read_csv(path) == (["x"], [["1"]])
    atomic_write_text(path, "y\n")
    assert path.read_text() == "y\n"
    assert [p.name for p in path.parent.iterdir()] == ["out.csv"]


def test_sample_bm_row_count():
    text = cmd_sample_bm(RunConfig("sample-bm", samples=10, grid=256, T=1.0))
    lines = text.splitlines()
    assert lines[0] == "sample_id,t,re,im"
    assert len(lines) - 1 == 10 * 257
    assert lines[-1].startswith("9,1,")


def test_sample_commands_are_deterministic():
    a = cmd_sample_fgf(RunConfig("sample-fgf", samples=3, trunc=20, domain="rect:1,2"))
    b = cmd_sample_fgf(RunConfig("sample-fgf", samples=3, trunc=20, domain="rect:1,2"))
    assert a == b and len(a.splitlines()) == 1 + 60
    c = cmd_sample_fgf(RunConfig("sample-fgf", seed=43, samples=3, trunc=20, domain="rect:1,2"))
    assert a != c


def test_json_format_for_samplers():
    rep = json.loads(cmd_sample_bm(RunConfig("sample-bm", samples=2, grid=4, format="json")))
    assert rep["columns"] == ["sample_id", "t", "re", "im"] and len(rep["rows"]) == 10


def test_fernique_report_is_worker_independent():
    one = cmd_fernique(RunConfig("fernique", samples=3000, grid=64, workers=1))
    many = cmd_fernique(RunConfig("fernique", samples=3000, grid=64, workers=4))
    assert one == many
    rep = json.loads(one)
    assert rep["coarse"]["steps"] == 64 and rep["fine"]["steps"] == 128


def test_fk_compare_default_case():
    rep = cli.fk_compare_report(RunConfig("fk-compare"))
    spectral = complex(*rep["spectral"])
    mc = complex(*rep["mc"])
    assert abs(mc - spectral) <= max(4 * rep["error_bars"]["mc_std_error"], 0.05 * abs(spectral))
    assert rep["error_bars"]["trotter_rel_l2"] < 0.01
    assert all(rep["passed"].values())


@pytest.mark.parametrize("kwargs", [dict(seed=-1), dict(seed=1 << 64), dict(samples=0), dict(T=0.0),
                                    dict(alpha=-0.1), dict(k_sigma=0), dict(fk_sign=2.0),
                                    dict(workers=0), dict(format="xml")])
def test_invalid_config(kwargs):
    with pytest.raises(ConfigError):
        RunConfig("sample-bm", **kwargs)


def test_report_commands_require_json():
    with pytest.raises(ConfigError):
        RunConfig("verify", format="csv")


def test_main_writes_file_and_exit_codes(tmp_path, monkeypatch):
    monkeypatch.delenv(cli.SEED_ENV, raising=False)
    out = tmp_path / "bm.csv"
    assert main(["sample-bm", "--samples", "2", "--grid", "8", "--out", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 1 + 2 * 9
    assert main(["sample-fgf", "--domain", "disk:1"]) == 2
    assert main(["fernique", "--format", "csv"]) == 2
    assert main(["sample-bm", "--samples", "0"]) == 2


def test_seed_environment_override(tmp_path, monkeypatch):
    a, b, c = (tmp_path / n for n in ("a.csv", "b.csv", "c.csv"))
    monkeypatch.delenv(cli.SEED_ENV, raising=False)
    main(["sample-bm", "--samples", "2", "--grid", "4", "--seed", "7", "--out", str(a)])
    monkeypatch.setenv(cli.SEED_ENV, "7")
    main(["sample-bm", "--samples", "2", "--grid", "4", "--seed", "99", "--out", str(b)])
    assert a.read_text() == b.read_text()
    monkeypatch.setenv(cli.SEED_ENV, "not-a-seed")
    assert main(["sample-bm", "--out", str(c)]) == 2
    assert not c.exists()


def test_nan_is_a_hard_failure(monkeypatch, tmp_path):
    def broken(config):
        return json_text({"value": float("nan")})

    monkeypatch.setitem(cli.COMMANDS, "fernique", broken)
    out = tmp_path / "f.json"
    assert main(["fernique", "--out", str(out)]) == 3
    assert not out.exists()


def test_verify_subset_exit_code(tmp_path, monkeypatch):
    monkeypatch.delenv(cli.SEED_ENV, raising=False)
    out = tmp_path / "v.json"
    assert main(["verify", "--only", "9", "11", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert rep["passed"] and [c["id"] for c in rep["criteria"]] == [9, 11]
    for crit in rep["criteria"]:
        for check in crit["checks"]:
            assert {"value", "target", "tolerance", "std_error", "passed"} <= set(check)


def test_verify_failure_gives_nonzero_exit(tmp_path, monkeypatch):
    monkeypatch.delenv(cli.SEED_ENV, raising=False)
    # a vanishing k-sigma makes every Monte-Carlo gate fail
    assert main(["verify", "--only", "1", "--k-sigma", "1e-9", "--out", str(tmp_path / "v.json")]) == 1

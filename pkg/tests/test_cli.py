from __future__ import annotations

import csv
import io
import json

import mpmath
import pytest
from mpmath import mpf

from freud_sextic.cli import build_config, build_parser, main


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_gamma_table(capsys):
    code, out, _ = run(["gamma", "--c", "1", "--t", "0", "--sigma", "0", "--n-max", "10", "--digits", "120"], capsys)
    assert code == 0
    table = rows(out)
    assert table[0] == ["n", "gamma", "Gamma_hat"]
    assert len(table) == 12
    assert mpf(table[1][1]) == 0
    with mpmath.workdps(130):
        g1 = mpf(table[2][1])
        ref = mpmath.gamma(mpf(2) / 3) / mpmath.gamma(mpf(1) / 3)
        assert abs(g1 - ref) <= mpf("1e-115")
    assert len(table[2][1].lstrip("0.").replace(".", "")) >= 110  # full precision string


def test_gamma_deterministic(tmp_path, capsys):
    paths = [tmp_path / f"g{i}.csv" for i in range(2)]
    for path in paths:
        assert main(["gamma", "--t", "1", "--sigma", "1/2", "--n-max", "8", "--digits", "40",
                     "--out", str(path)]) == 0
    assert paths[0].read_bytes() == paths[1].read_bytes()
    assert capsys.readouterr().out == ""


@pytest.mark.parametrize("method", ["hankel", "string"])
def test_gamma_methods(method, capsys):
    base = ["gamma", "--t", "1", "--sigma", "0.5", "--n-max", "8", "--digits", "40"]
    _, ref, _ = run(base, capsys)
    code, out, _ = run(base + ["--method", method], capsys)
    assert code == 0
    with mpmath.workdps(50):
        for a, b in zip(rows(ref)[2:], rows(out)[2:]):
            assert abs(mpf(a[1]) - mpf(b[1])) <= mpf("1e-18") * mpf(a[1])


def test_moments_table(capsys):
    code, out, _ = run(["moments", "--n-max", "3", "--digits", "40"], capsys)
    table = rows(out)
    assert code == 0 and table[0] == ["k", "eta_2k"] and len(table) == 5
    assert mpmath.nstr(mpf(table[1][1]), 10) == "0.8929795116"
    assert mpmath.nstr(mpf(table[2][1]), 10) == "0.4513726465"


def test_zeros_table(capsys):
    code, out, _ = run(["zeros", "--n", "3", "--n-max", "10", "--digits", "40"], capsys)
    table = rows(out)
    assert code == 0 and table[0] == ["j", "zero"] and len(table) == 4
    zs = [mpf(r[1]) for r in table[1:]]
    assert zs[1] == 0 and zs[0] == -zs[2] and zs[0] < 0


def test_zeros_electrostatic(capsys):
    code, out, _ = run(["zeros", "--n", "6", "--n-max", "10", "--digits", "60", "--electrostatic"], capsys)
    table = rows(out)
    assert code == 0 and table[0] == ["j", "zero", "electrostatic_residual"]
    assert all(mpf(r[2]) <= mpf("1e-15") for r in table[1:])


def test_zeros_degree_out_of_range(capsys):
    code, _, err = run(["zeros", "--n", "12", "--n-max", "10", "--digits", "40"], capsys)
    assert code == 2 and "error" in err


def test_verify_passes(capsys):
    code, out, err = run(["verify", "--checks", "string,toda", "--c", "1", "--t", "1", "--sigma", "0.5",
                          "--n-max", "20"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["pass"] is True
    assert [r["check"] for r in doc["reports"]] == ["string_equation", "toda"]
    assert all("runtime_seconds" not in r for r in doc["reports"])
    assert doc["reports"][0]["params"] == {"c": "1", "t": "1", "sigma": "1/2", "digits": 120}
    assert "[PASS]" in err


def test_verify_dde2_is_informational(capsys):
    code, out, _ = run(["verify", "--checks", "dde2", "--digits", "40", "--n-max", "10"], capsys)
    assert code == 0
    (rep,) = json.loads(out)["reports"]
    assert rep["gating"] is False


def test_verify_failing_check_exits_1(capsys):
    # a coefficient tolerance far below what 40 digits can deliver
    code, out, _ = run(["verify", "--checks", "m1", "--digits", "40", "--n-max", "8",
                        "--tol-quadrature", "1e-300"], capsys)
    assert code == 1
    assert json.loads(out)["pass"] is False


def test_verify_timings_flag(capsys):
    code, out, _ = run(["verify", "--checks", "m1", "--digits", "40", "--n-max", "10", "--timings"], capsys)
    assert code == 0
    assert "runtime_seconds" in json.loads(out)["reports"][0]


def test_verify_deterministic(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        assert main(["verify", "--checks", "m1,ode,zeros", "--digits", "40", "--n-max", "12",
                     "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


@pytest.mark.parametrize("argv", [
    ["gamma", "--bogus"],
    ["gamma", "--digits", "many"],
    ["verify", "--method", "qr"],
    [],
])
def test_malformed_flags_exit_2(argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


@pytest.mark.parametrize("argv", [
    ["verify", "--checks", "string,bogus", "--digits", "40"],
    ["gamma", "--c", "0", "--digits", "40"],
    ["gamma", "--sigma", "-1", "--digits", "40"],
    ["gamma", "--digits", "10"],
    ["gamma", "--n-max", "0", "--digits", "40"],
])
def test_usage_errors_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and err.startswith("error:")


def test_config_precedence(tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"c": "2", "t": "1", "digits": 50, "n-max": 7, "checks": "m1,ode"}))
    parser = build_parser()
    conf = build_config(parser.parse_args(["verify", "--config", str(cfg), "--t", "3"]))
    assert (conf.c, conf.t, conf.digits, conf.n_max) == ("2", "3", 50, 7)
    assert conf.checks == ["m1", "ode"]
    conf = build_config(parser.parse_args(["verify", "--config", str(cfg), "--checks", "zeros"]))
    assert conf.checks == ["zeros"]


@pytest.mark.parametrize("content", ["[1, 2]", "{not json", '{"colour": "red"}'])
def test_bad_config_exit_2(tmp_path, content, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text(content)
    code, _, err = run(["gamma", "--config", str(cfg)], capsys)
    assert code == 2 and "config" in err


def test_missing_config_exit_2(tmp_path, capsys):
    code, _, _ = run(["gamma", "--config", str(tmp_path / "absent.json")], capsys)
    assert code == 2


def test_unwritable_output_exit_1(tmp_path, capsys):
    code, _, err = run(["gamma", "--digits", "40", "--n-max", "3", "--out", str(tmp_path / "no" / "x.csv")], capsys)
    assert code == 1 and err.startswith("error:")

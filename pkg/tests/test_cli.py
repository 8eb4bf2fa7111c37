import json
import subprocess
import sys

import pytest

from conftest import P5, P6
from entangle_lab.apf import Apf, parse_anf, reduce_to_indicator
from entangle_lab.cli import jsonable, main
from entangle_lab.gf2 import parse_code_text


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def report(capsys, *argv):
    code, out, _ = run(capsys, "analyze", *argv)
    assert code == 0
    return json.loads(out)


def test_convert_anf_to_code(capsys):
    code, out, _ = run(capsys, "convert", "--anf", "x0*x1+x1*x2+x2*x3", "--to", "code")
    assert code == 0
    c = parse_code_text(out)
    assert (c.n, c.k, c.min_distance()) == (4, 2, 2)


def test_convert_code_to_vector(tmp_path, capsys):
    f = tmp_path / "c.txt"
    f.write_text("110\n011\n")
    code, out, _ = run(capsys, "convert", "--code", str(f), "--to", "vector")
    assert code == 0 and out.strip() == "+00+0++0"


def test_convert_round_trip(tmp_path, capsys):
    _, out, _ = run(capsys, "convert", "--anf", P5, "--to", "code")
    f = tmp_path / "c.txt"
    f.write_text(out)
    _, anf, _ = run(capsys, "convert", "--code", str(f), "--to", "anf")
    back = Apf.bipolar(parse_anf(anf.splitlines()[-1], 5), 5)
    assert reduce_to_indicator(back, "C").same_code(parse_code_text(out))


def test_convert_errors(tmp_path, capsys):
    code, _, err = run(capsys, "convert", "--anf", "x0x1+x1x2+x0x2", "--to", "code")
    assert code == 3 and "bipartite" in err
    code, _, _ = run(capsys, "convert", "--anf", "x0 + + x1", "--to", "code")
    assert code == 2
    code, _, _ = run(capsys, "convert", "--code", str(tmp_path / "missing"), "--to", "vector")
    assert code == 2


def test_analyze_five_qubit(capsys):
    rep = report(capsys, "--anf", P5)
    assert rep["schema"] == "1"
    assert rep["par_l"] == "8/1" and rep["le"] == 2
    assert rep["beta"] == [0, 3, 5] and rep["hierarchy"] == [0, 3, 5]
    assert rep["code"] == {"n": 5, "k": 2, "d": 3}
    assert set(rep["timings"]) >= {"multispectra", "parl", "hierarchy", "se", "crypto"}


def test_analyze_six_qubit(capsys):
    rep = report(capsys, "--anf", P6, "--parl", "--se", "--crypto")
    assert rep["par_l"] == "16/1" and rep["N"] == 2 and rep["beta"] == [0, 3, 6]
    assert "hierarchy" not in rep and "multispectra" not in rep


def test_analyze_product_vector(tmp_path, capsys):
    f = tmp_path / "v.txt"
    f.write_text("n=3\n" + "1 0 0 0\n" + "0 0 0 0\n" * 7)
    rep = report(capsys, "--vector", str(f))
    assert abs(rep["par_l"] - 8) < 1e-9 and abs(rep["le"]) < 1e-9 and rep["order"] == 0
    assert "crypto" in rep["skipped"] and "se" in rep["skipped"]


def test_analyze_float_mode(capsys):
    rep = report(capsys, "--anf", "x0x1 + x1x2", "--multispectra", "--float")
    assert isinstance(rep["multispectra"]["max"], float)
    assert abs(rep["multispectra"]["max"] - 4) < 1e-9


def test_analyze_deterministic(capsys):
    a = report(capsys, "--anf", P5)
    b = report(capsys, "--anf", P5)
    a.pop("timings"), b.pop("timings")
    assert a == b


def test_analyze_out_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, stdout, _ = run(capsys, "analyze", "--anf", "x0x1", "--out", str(out))
    assert code == 0 and stdout == ""
    assert json.loads(out.read_text())["par_l"] == "2/1"


def test_analyze_guard_is_skipped(capsys):
    anf = " + ".join(f"x{i}x{i + 1}" for i in range(13))
    rep = report(capsys, "--anf", anf, "--multispectra", "--hierarchy")
    assert "multispectra" in rep["skipped"]


def test_trajectory_search(capsys):
    code, out, _ = run(capsys, "trajectory", "--anf", P5, "--search")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "basis IIHHH"
    pars = [ln.split()[6] for ln in lines[2:8]]
    assert pars == ["4", "2", "4", "2", "4", "8"]
    assert lines[-1] == "beta b0=0 b1=3 b2=5"


def test_trajectory_order_and_outcomes(capsys):
    code, out, _ = run(capsys, "trajectory", "--anf", P5, "--basis", "IIHHH", "--order", "1,2,0,3,4", "--outcomes", "00000")
    assert code == 0
    pars = [ln.split()[6] for ln in out.splitlines()[2:8]]
    assert pars == ["4", "2", "1", "2", "4", "8"]


def test_trajectory_errors(capsys):
    assert run(capsys, "trajectory", "--anf", "x0x1+x1x2+x0x2", "--search")[0] == 3
    assert run(capsys, "trajectory", "--anf", P5, "--basis", "IIH")[0] == 3
    assert run(capsys, "trajectory", "--anf", P5, "--basis", "IIHHH", "--order", "1,a")[0] == 2


def test_selftest(capsys):
    code, out, _ = run(capsys, "--seed", "5", "selftest")
    assert code == 0 and "FAIL" not in out


def test_threads_env(monkeypatch, capsys):
    monkeypatch.setenv("ENTANGLE_LAB_THREADS", "2")
    assert report(capsys, "--anf", P5, "--multispectra")["multispectra"]["max"] == "8/1"
    monkeypatch.setenv("ENTANGLE_LAB_THREADS", "x")
    assert run(capsys, "analyze", "--anf", P5)[0] == 2


def test_jsonable():
    from fractions import Fraction

    assert jsonable({"a": Fraction(3, 2), "b": (1, Fraction(4))}) == {"a": "3/2", "b": [1, "4/1"]}


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "entangle_lab", "analyze", "--anf", "x0x1", "--parl"],
        capture_output=True, text=True, check=False,
    )
    assert res.returncode == 0
    assert json.loads(res.stdout)["le"] == 1


def test_argparse_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["convert", "--to", "code"])
    assert exc.value.code == 2

import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from orlicz_radius.cli import main
from orlicz_radius.linalg import save_matrix

from helpers import J2, jordan


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def keyvals(out):
    """Parse ``key=value`` lines (later duplicates are collected in lists)."""
    data = {}
    for line in out.splitlines():
        if "=" not in line:
            continue
        key, _, value = line.partition("=")
        if key in data:
            data[key] = data[key] if isinstance(data[key], list) else [data[key]]
            data[key].append(value)
        else:
            data[key] = value
    return data


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, T in [("j2", J2), ("eye", np.eye(2)), ("j3", jordan(3))]:
        paths[name] = tmp_path / f"{name}.json"
        save_matrix(np.asarray(T, dtype=complex), paths[name])
    paths["j3txt"] = tmp_path / "j3.txt"
    save_matrix(jordan(3), paths["j3txt"])
    return paths


# -- radius ----------------------------------------------------------------------


def test_radius_examples(capsys, files):
    code, out, _ = run(capsys, "radius", files["j2"])
    assert code == 0
    kv = keyvals(out)
    assert float(kv["w"]) == pytest.approx(0.5, abs=1e-9)
    assert {"theta_star", "certified_error"} <= set(kv)
    code, out, _ = run(capsys, "radius", files["eye"])
    assert float(keyvals(out)["w"]) == pytest.approx(1.0)
    code, out, _ = run(capsys, "radius", files["j3txt"], "--oracle", 100_000, "--seed", 4)
    kv = keyvals(out)
    assert float(kv["w"]) == pytest.approx(math.cos(math.pi / 4), abs=1e-9)
    assert float(kv["w"]) - float(kv["oracle"]) < 1e-6 and kv["oracle_seed"] == "4"


def test_radius_boundary(capsys, files, tmp_path):
    out_csv = tmp_path / "b.csv"
    code, out, _ = run(capsys, "radius", files["j2"], "--boundary", 36, "--boundary-out", out_csv)
    assert code == 0 and keyvals(out)["boundary_file"] == str(out_csv)
    with out_csv.open() as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 36 and list(rows[0]) == ["theta", "re", "im"]
    assert all(abs(abs(complex(float(r["re"]), float(r["im"]))) - 0.5) < 1e-9 for r in rows)
    code, out, _ = run(capsys, "radius", files["j2"], "--boundary", 8)
    assert (tmp_path / "j2_boundary.csv").exists()


@pytest.mark.parametrize("content", ["garbage", '{"n": 2, "data": [[0, 0]]}', "2\n1 0 0 0\n"])
def test_radius_malformed(capsys, tmp_path, content):
    path = tmp_path / "bad.txt"
    path.write_text(content)
    code, _, err = run(capsys, "radius", path)
    assert code == 2 and "error" in err


def test_radius_missing_file(capsys, tmp_path):
    assert run(capsys, "radius", tmp_path / "none.json")[0] == 2


def test_usage_errors(capsys, files):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["radius", str(files["j2"]), "--grid", "many"])
    assert exc.value.code == 2
    assert run(capsys, "radius", files["j2"], "--boundary", 2)[0] == 2


# -- bound ------------------------------------------------------------------------


def test_bound_file(capsys, files):
    code, out, _ = run(capsys, "bound", "--case", "cor_N222", files["j2"])
    kv = keyvals(out)
    assert code == 0 and kv["status"] == "pass"
    assert float(kv["chain.1"]) == pytest.approx(0.78747, abs=1e-5)
    assert kv["link.0.pass"] == "true"


def test_bound_params_and_overrides(capsys, files):
    code, out, _ = run(capsys, "bound", "--case", "th3_alpha[alpha=0.5]", "--phi", "expm1", "--param", "variant=B", files["j3"])
    kv = keyvals(out)
    assert code == 0
    assert kv["case"] == "th3_alpha[alpha=0.5;phi=expm1;variant=B]"


def test_bound_ensemble_pair_and_vector(capsys):
    code, out, _ = run(capsys, "bound", "--case", "cor_N1", "--family", "ginibre", "--size", 3, "--seed", 2, "--index", 5)
    kv = keyvals(out)
    assert code == 0 and kv["input.index"] == "5" and kv["status"] == "pass"
    code, out, _ = run(capsys, "bound", "--case", "buzano_vec", "--family", "unitary", "--size", 4, "--seed", 2, "--index", 1)
    assert code == 0 and keyvals(out)["status"] == "pass"


def test_bound_corrupt_exit_code(capsys, files):
    code, out, _ = run(capsys, "bound", "--case", "base_norm", files["eye"], "--corrupt", 0.5)
    assert code == 1 and keyvals(out)["status"] == "fail"


def test_bound_json_and_verbose(capsys, files, tmp_path):
    path = tmp_path / "ev.json"
    code, out, err = run(capsys, "bound", "--case", "th6", files["j3"], "--json", path, "--verbose")
    assert code == 0 and "member" in err
    data = json.loads(path.read_text())
    assert data["case"] == "th6[phi=power:p=1]" and data["status"] == "pass"


@pytest.mark.parametrize(
    "argv",
    [
        ["--case", "nope", "{j2}"],
        ["--case", "th3_alpha[alpha=3]", "{j2}"],
        ["--case", "th3_alpha", "--phi", "gauss", "{j2}"],
        ["--case", "cor_N1", "{j2}"],
        ["--case", "base_norm", "{j2}", "--S", "{j2}"],
        ["--case", "base_norm"],
        ["--case", "base_norm", "{j2}", "--family", "ginibre"],
        ["--case", "buzano_vec", "{j2}"],
        ["--case", "base_norm", "--family", "ginibre", "--size", 0],
        ["--case", "base_norm", "{j2}", "--corrupt", -1],
        ["--case", "base_norm", "--param", "alpha", "{j2}"],
    ],
)
def test_bound_errors(capsys, files, argv):
    argv = [str(a).format(j2=files["j2"]) for a in argv]
    code, _, err = run(capsys, "bound", *argv)
    assert code == 2, err


def test_bound_tabulated_phi_submult(capsys, tmp_path, files):
    # th2 needs a sub-multiplicative phi; a tabulated phi is checked on a
    # lattice of quarter steps, whose products are multiples of 1/16.
    # With knots on that lattice, linear interpolation of t^2 is exact there.
    table = tmp_path / "sq.csv"
    ts = np.arange(641) / 16
    table.write_text("t,phi\n" + "".join(f"{t!r},{t * t!r}\n" for t in ts.tolist()))
    code, out, err = run(capsys, "bound", "--case", "th2_gh[s=0.5;v=0.5]", "--phi", f"table:{table}", files["j2"])
    assert code == 0, err
    assert keyvals(out)["status"] in ("pass", "inapplicable")


def test_bound_tabulated_phi_not_submult_is_rejected(capsys, tmp_path, files):
    # off-knot interpolation overestimates t^2, e.g. at 0.0625 on a 0.01 step
    table = tmp_path / "sq.csv"
    ts = np.linspace(0, 40, 4001)
    table.write_text("t,phi\n" + "".join(f"{t!r},{t * t!r}\n" for t in ts.tolist()))
    code, _, err = run(capsys, "bound", "--case", "th2_gh[s=0.5;v=0.5]", "--phi", f"table:{table}", files["j2"])
    assert code == 2
    assert "sub-multiplicative" in err


# -- verify -------------------------------------------------------------------------


def test_verify_selftest(capsys, tmp_path):
    out_path = tmp_path / "st.json"
    code, out, _ = run(capsys, "verify", "--suite", "selftest", "--out", out_path)
    kv = keyvals(out)
    assert code == 1 and int(kv["violations"]) > 0
    report = json.loads(out_path.read_text())
    assert report["summary"]["violations"] == int(kv["violations"])


def test_verify_custom_suite_csv(capsys, tmp_path):
    suite = tmp_path / "s.json"
    suite.write_text(json.dumps({"cases": ["base_norm"], "ensembles": [{"family": "ginibre", "n": 2, "count": 10}]}))
    out_path = tmp_path / "r.csv"
    code, out, err = run(capsys, "verify", "--suite", suite, "--out", out_path, "--verbose")
    assert code == 0 and keyvals(out)["format"] == "csv"
    assert out_path.read_text().startswith("id,params,n,count,violations")
    assert "max_ratio" in err


def test_verify_errors(capsys, tmp_path):
    assert run(capsys, "verify", "--suite", tmp_path / "missing.json")[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"cases": ["nope"], "ensembles": []}))
    assert run(capsys, "verify", "--suite", bad)[0] == 2


def test_jobs_env(capsys, monkeypatch, tmp_path):
    suite = tmp_path / "s.json"
    suite.write_text(json.dumps({"cases": ["base_norm"], "ensembles": [{"family": "unitary", "n": [2, 3], "count": 5}]}))
    monkeypatch.setenv("ORLICZ_RADIUS_JOBS", "2")
    code, out, _ = run(capsys, "verify", "--suite", suite)
    assert code == 0 and keyvals(out)["jobs"] == "2"
    monkeypatch.setenv("ORLICZ_RADIUS_JOBS", "zero")
    assert run(capsys, "verify", "--suite", suite)[0] == 2


# -- compare ------------------------------------------------------------------------


def _compare_rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_compare_hermitian_collapse(capsys, tmp_path):
    out_path = tmp_path / "c.csv"
    code, out, _ = run(
        capsys, "compare", "--bounds", "base_norm,power_norm", "--family", "hermitian", "--size", 4, "--count", 25,
        "--seed", 3, "--out", out_path,
    )
    assert code == 0 and keyvals(out)["rows"] == "25"
    rows = _compare_rows(out_path.read_text())
    assert len(rows) == 25
    for r in rows:
        w = float(r["w"])
        assert float(r["base_norm"]) == pytest.approx(w, abs=1e-8)
        assert float(r["power_norm[phi=expm1]"]) == pytest.approx(w, abs=1e-8)


def test_compare_upper_bounds(capsys, tmp_path):
    spec = tmp_path / "e.json"
    spec.write_text(json.dumps({"family": "ginibre", "n": 2, "count": 40, "seed": 8}))
    code, out, _ = run(capsys, "compare", "--ensemble", spec, "--bounds", "base_kittaneh,cor_N222,th6,cor_halfsum[phi=expsq]")
    assert code == 0
    rows = _compare_rows(out.split("rows=")[0])
    assert len(rows) == 40
    assert [int(r["index"]) for r in rows] == list(range(40))
    for r in rows:
        w = float(r["w"])
        for key in ("base_kittaneh", "cor_N222", "th6[phi=power:p=1]", "cor_halfsum[phi=expsq]"):
            assert float(r[key]) >= w - 1e-9


def test_compare_errors(capsys):
    assert run(capsys, "compare", "--bounds", "th1_power")[0] == 2
    assert run(capsys, "compare", "--bounds", "buzano_vec")[0] == 2
    assert run(capsys, "compare", "--bounds", "nope")[0] == 2
    assert run(capsys, "compare", "--bounds", "")[0] == 2


# -- fuzz ------------------------------------------------------------------------------


def test_fuzz_base_norm_hermitian(capsys, tmp_path):
    out_path = tmp_path / "w.json"
    code, out, _ = run(capsys, "fuzz", "--case", "base_norm", "--family", "hermitian", "--iterations", 32, "--out", out_path)
    kv = keyvals(out)
    assert code == 0 and kv["violation"] == "false"
    assert float(kv["best_ratio"]) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("case", ["cor_N222", "th3_alpha[alpha=0.5;phi=expm1]", "th1_product[phi=power:p=2;v=0.5]"])
def test_fuzz_witness_reproduces(capsys, tmp_path, case):
    out_path = tmp_path / "w.json"
    code, out, _ = run(capsys, "fuzz", "--case", case, "--iterations", 96, "--seed", 11, "--out", out_path)
    kv = keyvals(out)
    assert code == 0 and kv["seed"] == "11"
    ratio = float(kv["best_ratio"])
    assert ratio < 1 + 1e-7
    extra = ["--S", kv["witness_S_file"]] if "witness_S_file" in kv else []
    code, out, _ = run(capsys, "bound", "--case", case, out_path, *extra)
    assert abs(float(keyvals(out)["max_ratio"]) - ratio) <= 1e-12
    if case == "cor_N222":
        assert ratio < 1


def test_fuzz_is_reproducible(capsys, tmp_path):
    a = run(capsys, "fuzz", "--case", "th6", "--iterations", 40, "--seed", 3, "--out", tmp_path / "a.json")[1]
    b = run(capsys, "fuzz", "--case", "th6", "--iterations", 40, "--seed", 3, "--out", tmp_path / "b.json")[1]
    assert a.replace("a.json", "") == b.replace("b.json", "")


def test_fuzz_errors(capsys, tmp_path):
    out_path = tmp_path / "w.json"
    assert run(capsys, "fuzz", "--case", "th6", "--seconds", 0, "--out", out_path)[0] == 2
    assert run(capsys, "fuzz", "--case", "nope", "--iterations", 5, "--out", out_path)[0] == 2
    assert run(capsys, "fuzz", "--case", "buzano_vec", "--iterations", 5, "--out", out_path)[0] == 2
    assert run(capsys, "fuzz", "--case", "th6", "--iterations", 0, "--out", out_path)[0] == 2


def test_fuzz_time_budget(capsys, tmp_path):
    code, out, _ = run(capsys, "fuzz", "--case", "base_kittaneh", "--seconds", 0.5, "--out", tmp_path / "w.json")
    assert code == 0 and int(keyvals(out)["evaluations"]) > 0


# -- catalogue --------------------------------------------------------------------------


@pytest.mark.parametrize("fmt", ["table", "csv", "json"])
def test_catalogue(capsys, fmt):
    code, out, _ = run(capsys, "catalogue", "--format", fmt)
    assert code == 0 and "cor_N222" in out and "th7_power" in out
    if fmt == "json":
        assert len(json.loads(out)) == 35


def test_entry_point(files):
    proc = subprocess.run(
        [sys.executable, "-m", "orlicz_radius", "radius", str(files["j2"])], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0 and proc.stdout.startswith("w=0.5")

import csv
import io
import json
import math
import subprocess
import sys

import pytest

from latdisc import cli

DISC = '{"kind":"disc"}'
C3 = '{"kind":"cgamma","gamma":3}'


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_count(capsys):
    code, out, _ = run(capsys, "count", "--body", DISC, "--R", "2")
    assert code == 0
    r = rows(out)[0]
    assert out.splitlines()[0] == "body,R,rot,tx,ty,count,area_term,discrepancy"
    assert int(r["count"]) == 13
    assert float(r["discrepancy"]) == 13 - 4 * math.pi


def test_ft_zero(capsys):
    code, out, _ = run(capsys, "ft", "--body", DISC, "--rho", "0", "--theta", "0")
    doc = json.loads(out)
    assert code == 0 and doc["re"] == math.pi and doc["im"] == 0
    assert set(doc) == {"rho", "theta", "re", "im", "method", "nodes"}


def test_ft_boundary(capsys):
    code, out, _ = run(capsys, "ft", "--body", DISC, "--rho", "5", "--theta", "0.3",
                       "--method", "boundary")
    doc = json.loads(out)
    from latdisc.fourier import ft_disc_radial
    assert doc["re"] == pytest.approx(float(ft_disc_radial(5.0)), rel=1e-10)
    assert doc["nodes"] > 0


@pytest.mark.parametrize("body,key", [('{"kind":"disc","radius":2}', "radius"),
                                      ('{"gamma":3}', "kind"),
                                      ('{"kind":"cgamma"}', "gamma"),
                                      ('{"kind":"blob"}', "kind")])
def test_malformed_body(capsys, body, key):
    code, _, err = run(capsys, "count", "--body", body, "--R", "2")
    doc = json.loads(err)
    assert code == 2 and doc["exit_code"] == 2 and key in doc["message"]


def test_domain_error_exit_3(capsys):
    code, _, err = run(capsys, "hv", "--R", "2")
    assert code == 3 and json.loads(err)["error"] == "AmbiguousTarget"
    code, _, _ = run(capsys, "count", "--body", DISC, "--R", "0.5")
    assert code == 3


def test_budget_error_exit_4(capsys):
    code, _, err = run(capsys, "ft", "--body", C3, "--rho", "1e9", "--method", "boundary")
    assert code == 4 and json.loads(err)["error"] == "BudgetError"


def test_missing_required(capsys):
    code, _, err = run(capsys, "count", "--body", DISC)
    assert code == 2 and "'R'" in json.loads(err)["message"]


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"command": "count", "body": {"kind": "disc"}, "R": 3}))
    code, out, _ = run(capsys, "--config", str(cfg))
    assert code == 0 and int(rows(out)[0]["count"]) == 29
    # flags override the file
    code, out, _ = run(capsys, "--config", str(cfg), "count", "--R", "2")
    assert int(rows(out)[0]["count"]) == 13


def test_config_unknown_key(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"command": "count", "body": {"kind": "disc"}, "R": 3, "colour": 1}))
    code, _, err = run(capsys, "--config", str(cfg))
    assert code == 2 and "colour" in json.loads(err)["message"]


def test_config_not_json(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text("{")
    assert run(capsys, "--config", str(cfg))[0] == 2


def test_norms_outputs(tmp_path, capsys):
    js = tmp_path / "s.json"
    code, out, _ = run(capsys, "norms", "--body", DISC, "--R", "16:256", "--method", "parseval",
                       "--json", str(js))
    assert code == 0
    r = rows(out)
    assert [float(x["R"]) for x in r] == [16, 32, 64, 128, 256]
    doc = json.loads(js.read_text())
    assert doc["command"] == "norms" and doc["schema"] == 1
    assert {"params", "seed"} <= set(doc["inputs"])
    assert 0.4 < doc["outputs"]["fit"]["slope"] < 0.6
    assert "numpy" in doc["versions"]


def test_csv_seventeen_digits(capsys):
    _, out, _ = run(capsys, "count", "--body", DISC, "--R", "2")
    area = rows(out)[0]["area_term"]
    assert float(area) == 4 * math.pi and len(area.replace(".", "")) >= 16


def test_deterministic_bytes(tmp_path, capsys):
    outs = []
    for k in range(2):
        c, j = tmp_path / f"o{k}.csv", tmp_path / f"o{k}.json"
        run(capsys, "norms", "--body", C3, "--R", "16,32", "--samples", "2000", "--seed", "9",
            "--csv", str(c), "--json", str(j))
        outs.append((c.read_bytes(), j.read_bytes()))
    assert outs[0] == outs[1]


def test_threads_invariant(tmp_path, capsys, monkeypatch):
    res = []
    for n in ("1", "3"):
        monkeypatch.setenv("LATDISC_THREADS", n)
        res.append(run(capsys, "disc", "--body", C3, "--R", "17.5", "--n", "8")[1])
    assert res[0] == res[1]


def test_decay_spherical(capsys):
    code, out, _ = run(capsys, "decay", "--body", DISC, "--mode", "spherical", "--p", "1",
                       "--rho-min", "8", "--rho-max", "512")
    assert code == 0 and len(rows(out)) == 7


def test_decay_directional_json(tmp_path, capsys):
    js = tmp_path / "d.json"
    run(capsys, "decay", "--body", C3, "--rho-min", "16", "--rho-max", "1024", "--json", str(js))
    fit = json.loads(js.read_text())["outputs"]["fit"]
    assert abs(fit["slope"] + 4 / 3) < 0.05


def test_hv_cassels_irreg(capsys):
    _, out, _ = run(capsys, "hv", "--R", "3.5", "--K", "10000")
    assert abs(float(rows(out)[0]["cesaro"]) + 1.4845) < 0.1
    _, out, _ = run(capsys, "cassels", "--N", "64", "--L", "9", "--H", "2", "--seed", "3")
    assert rows(out)[0]["holds"] == "true"
    code, out, _ = run(capsys, "irreg", "--N", "16,64", "--seed", "1")
    assert code == 0 and len(rows(out)) == 2


def test_selftest_passes(capsys):
    code, out, _ = run(capsys, "selftest")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines and all(line.startswith("PASS") for line in lines)


def test_selftest_json(capsys):
    code, out, _ = run(capsys, "selftest", "--json")
    doc = json.loads(out)
    assert code == 0 and doc["outputs"]["all_passed"]
    assert {c["criterion"] for c in doc["outputs"]["criteria"]} >= {"ft_disc", "counting_exactness"}


def test_selftest_catches_bad_bessel(capsys, monkeypatch):
    import latdisc.fourier as fourier
    good = fourier.bessel_j1
    monkeypatch.setattr(fourier, "bessel_j1", lambda x: good(x) * (1 + 1e-6))
    code, out, _ = run(capsys, "selftest", "--json")
    doc = json.loads(out)
    failed = {c["criterion"] for c in doc["outputs"]["criteria"] if not c["passed"]}
    assert code != 0 and "ft_disc" in failed


def test_console_script():
    p = subprocess.run([sys.executable, "-m", "latdisc.cli", "count", "--body", DISC, "--R", "1"],
                       capture_output=True, text=True)
    assert p.returncode == 0 and p.stdout.splitlines()[1].split(",")[5] == "5"


def test_selftest_report_deterministic():
    assert cli.selftest() == cli.selftest()

import math
import os
import subprocess

import pytest

import infoloss as il


def test_entropy_and_mi():
    assert il.entropy([0.5, 0.5]) == pytest.approx(math.log(2), abs=1e-15)
    assert il.mutual_information([[0.5, 0.0], [0.0, 0.5]]) == pytest.approx(math.log(2), abs=1e-15)
    assert il.mutual_information([[0.25, 0.25], [0.25, 0.25]]) == 0.0


def test_invalid_pmf_rejected():
    with pytest.raises(ValueError):
        il.entropy([0.5, 0.6])


def test_extremal_example():
    r = il.extremal_pmf([0.5, 0.3, 0.2], 0.3)
    assert r["K"] == 3
    assert r["pmf"] == pytest.approx([0.7, 0.15, 0.15], abs=1e-12)
    assert il.f_min_mi([0.5, 0.3, 0.2], 0.3) == pytest.approx(0.21084455784169664, abs=1e-12)


def test_i_loss_bound_below_oracle():
    for m in (2, 3):
        lb = il.i_loss_lower_bound(0.2, m)
        assert 0.0 < lb <= il.i_loss_bruteforce(0.2, m, 100) + 2.0 / 100


def test_theorem2_identities():
    joint = [[0.2, 0.05], [0.1, 0.15], [0.05, 0.2], [0.15, 0.1]]
    r = il.theorem2_check(joint, [[0, 1], [2, 3]])
    assert r["ol"] == pytest.approx(r["ol_by_cells"], abs=1e-12)
    assert r["wil"] >= r["bound"] - 1e-12 >= -1e-12


def test_sampling_is_seeded_and_one_based():
    model = {"kind": "scale"}
    a = il.sample(model, 50, seed=3)
    b = il.sample(model, 50, seed=3)
    assert a == b
    assert set(a[1]) <= {1, 2, 3, 4}


def test_bayes_risk_two_class():
    value, se = il.bayes_risk_mc({"kind": "two-class-1d"}, 100_000, 11)
    exact = 0.5 * math.erfc(1.0 / math.sqrt(2.0))
    assert abs(value - exact) < 3 * se + 1e-12


def test_partitions():
    q = il.quadrant_partition()
    assert len(q) == 4
    assert q.quantize([0.0, 0.0]) == 0
    assert q.quantize([-1.0, -1.0]) == 2
    pts, _ = il.sample({"kind": "scale"}, 400, 5)
    g = il.gessaman(pts, 20)
    counts = [0] * len(g)
    for c in g.quantize_all(pts):
        counts[c] += 1
    assert min(counts) >= 20
    assert il.describe(il.asymmetric_dyadic(1))["size"] == 24


def test_loss_curve_roundtrip():
    cfg = {"model": {"kind": "scale"}, "schemes": ["product", "asymmetric"], "sizes": [10, 50],
           "n_eval": 2000, "n_cal": 5000}
    curves = il.loss_curves(cfg)
    assert [c[0]["scheme"] for c in curves] == ["product", "asymmetric"]
    assert curves == il.loss_curves(cfg)
    csv = il.curve_csv(curves[0])
    assert csv.splitlines()[0] == il.CURVE_CSV_HEADER


def test_bad_config():
    with pytest.raises(ValueError):
        il.loss_curves({"model": {"kind": "scale"}, "sizes": [50, 10]})


def test_verify_suite():
    rep = il.verify("theorem2", trials=20)
    assert rep["passed"]


@pytest.mark.skipif("INFOLOSS_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_exit_codes(tmp_path):
    cli = os.environ["INFOLOSS_CLI"]
    ok = subprocess.run([cli, "verify", "theorem2", "--trials", "10"], capture_output=True)
    assert ok.returncode == 0
    bad = subprocess.run([cli, "bounds", "--M", "9"], capture_output=True)
    assert bad.returncode == 2
    cfg = tmp_path / "c.json"
    cfg.write_text('{"model": {"kind": "scale"}, "sizes": [10], "schemes": ["product"], "n_eval": 1000}')
    out = tmp_path / "out"
    run = subprocess.run([cli, "curve", "--config", str(cfg), "--out", str(out)], capture_output=True)
    assert run.returncode == 0
    assert (out / "curve_scale_product.csv").read_text().splitlines()[0] == il.CURVE_CSV_HEADER
    assert (out / "provenance_scale.json").exists()

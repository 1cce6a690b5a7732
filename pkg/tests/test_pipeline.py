import json
import math

import numpy as np
import pytest

from speccert import serialize
from speccert.cli import main
from speccert.errors import ConditionViolated, KernelMismatch
from speccert.finite import (
    assemble_jacobian,
    build_pseudo_diag,
    cluster_disks,
    gershgorin_disks,
)
from speccert.fourier import FourierSeq, Grid, index_list
from speccert.interval import ComplexBox, Interval
from speccert.models import sh_model
from speccert.pipeline import (
    CertifyOptions,
    CountedCluster,
    _reconcile_kernel,
    certify,
    default_window,
    select_shift,
)


@pytest.fixture(scope="module")
def toy_cert(sh_toy):
    return certify(sh_toy["model"], sh_toy["u0"], 1e-8, sh_toy["N"])


# -- certification output -------------------------------------------------

def test_certificate_structure(toy_cert):
    cert = toy_cert
    assert cert.model_name == "swift-hohenberg"
    assert cert.stable == "stable"
    assert cert.unstable_count == 0
    assert cert.clusters == []
    assert any("no eigenvalues" in s for s in cert.statements)
    jlo, jhi = cert.window
    assert jlo == -0.01 and jhi > 3.0
    assert cert.tail_edge < jlo
    assert cert.bounds.eps_factor.hi < 1.0
    for rg, rf in zip(cert.disk_radii_gershgorin, cert.disk_radii_final):
        assert rf >= rg


def test_certificate_window_clears_all_disks(toy_cert):
    jlo = toy_cert.window[0]
    for c, r in zip(toy_cert.disk_centers, toy_cert.disk_radii_final):
        assert c.re.hi + r < jlo


def test_certificate_deterministic(sh_toy, toy_cert):
    again = certify(sh_toy["model"], sh_toy["u0"], 1e-8, sh_toy["N"])
    doc1 = serialize.dumps(serialize.certificate_to_doc(toy_cert))
    doc2 = serialize.dumps(serialize.certificate_to_doc(again))
    assert doc1 == doc2
    assert "time" not in json.loads(doc1)
    assert "wall" not in doc1


def test_certify_huge_r0_rejected(sh_toy):
    with pytest.raises(ConditionViolated) as exc:
        certify(sh_toy["model"], sh_toy["u0"], 1e3, sh_toy["N"])
    assert "r0" in str(exc.value) or "contraction" in str(exc.value)


def test_default_window_and_shift_orientation():
    below = sh_model(0.5, -1.0, 1.0, m=1)
    w = default_window(below, 2.0, 0.01)
    assert w.re.lo == -0.01 and w.re.hi == 2.0
    assert select_shift(below, -1.0, 1.0) == 0.0
    assert select_shift(below, 2.0, 1.0) == -3.0


# -- kernel reconciliation ------------------------------------------------

def _cc(lo, hi, count):
    return CountedCluster(members=list(range(count)), lo=lo, hi=hi,
                          count=count, straddles_zero=lo <= 0.0 <= hi,
                          label="contains 0 candidate" if lo <= 0.0 <= hi
                          else ("negative" if hi < 0 else "positive"))


def test_reconcile_kernel_paths():
    msg, _ = _reconcile_kernel([_cc(-2.0, -1.0, 3)], 0)
    assert "no zero-straddling" in msg

    msg, _ = _reconcile_kernel([_cc(-0.1, 0.1, 1)], 0)
    assert "no invariance dimension declared" in msg

    clusters = [_cc(-0.1, 0.1, 1), _cc(-2.0, -1.0, 2)]
    msg, out = _reconcile_kernel(clusters, 1)
    assert out[0].label == "= 0"
    assert out[1].label == "negative"
    assert "accounted for" in msg

    with pytest.raises(KernelMismatch):
        _reconcile_kernel([_cc(-0.1, 0.1, 2)], 1)


# -- serialization round trips --------------------------------------------

def test_float_round_trip():
    for x in (0.0, -0.0, 1.5, -1e-300, math.pi, math.inf, -math.inf,
              0.19999999999999996):
        assert serialize.dec_float(serialize.enc_float(x)) == x or (
            x != x and serialize.dec_float(serialize.enc_float(x)) != x)


def test_interval_and_box_round_trip():
    iv = Interval(-1.25, 7.5e-12)
    assert serialize.dec_interval(serialize.enc_interval(iv)) == iv
    box = ComplexBox(Interval(0.5, 0.75), Interval(-2.0, -1.0))
    back = serialize.dec_box(serialize.enc_box(box))
    assert back.re == box.re and back.im == box.im


def test_seq_round_trip(sh_toy):
    doc = serialize.seq_to_doc(sh_toy["u0"])
    back = serialize.seq_from_doc(doc)
    assert back == sh_toy["u0"]


def test_seq_csv_loader(tmp_path):
    grid = Grid(1, 10.0)
    p = tmp_path / "u.csv"
    p.write_text("0,1.5\n1,-0.25\n2,0.125\n")
    u = serialize.load_seq_csv(str(p), grid, "c", 2)
    assert u.lo[0] == 1.5 and u.hi[1] == -0.25 and u.lo[2] == 0.125


def test_dumps_sorted_and_stable():
    doc = {"b": serialize.enc_float(1.0), "a": [1, 2]}
    s1 = serialize.dumps(doc)
    s2 = serialize.dumps({"a": [1, 2], "b": serialize.enc_float(1.0)})
    assert s1 == s2
    assert s1.index('"a"') < s1.index('"b"')


# -- theorem consistency over randomized truncations ----------------------

def test_truncation_eigenvalues_in_disks_with_counts():
    grid = Grid(1, 10.0)
    rng = np.random.default_rng(2024)
    for trial in range(50):
        mu = float(rng.uniform(0.3, 2.0))
        model = sh_model(mu, -1.0, 1.0, m=1)
        S = int(rng.integers(2, 5))
        w = FourierSeq.from_point(grid, "c",
                                  rng.standard_normal(S + 1) * 0.3)
        n_inner = int(rng.integers(6, 12))
        a = assemble_jacobian(model, w, "c", n_inner)
        idx = index_list(grid, "c", n_inner)
        pseudo = build_pseudo_diag(a, idx, True)
        disks = gershgorin_disks(model, w, "c", n_inner, pseudo, a)
        big = assemble_jacobian(model, w, "c", disks.n_mid).mid()
        eig = np.linalg.eigvalsh(0.5 * (big + big.T))
        for ev in eig:
            assert any(c.re.lo - r <= ev <= c.re.hi + r
                       for c, r in zip(disks.centers, disks.radii)), \
                (trial, ev)
        for cl in cluster_disks(disks):
            inside = np.sum((eig >= cl.lo) & (eig <= cl.hi))
            assert inside == cl.count, (trial, cl.lo, cl.hi)


# -- command line driver --------------------------------------------------

def _toy_config(tmp_path, sh_toy, **extra):
    sol = tmp_path / "u0.json"
    sol.write_text(serialize.dumps(serialize.seq_to_doc(sh_toy["u0"])))
    cfg = {
        "mode": "certify",
        "model": {"name": "swift-hohenberg", "m": 1,
                  "params": {"mu": 1.5, "nu1": -3.2, "nu2": 1.0}},
        "grid": {"m": 1, "d": 20.0},
        "sector": "c",
        "N": 32,
        "r0": 1e-8,
        "solution": {"path": str(sol)},
        "output": str(tmp_path / "cert.json"),
    }
    cfg.update(extra)
    path = tmp_path / "run.json"
    path.write_text(json.dumps(cfg))
    return path, cfg


def test_cli_certify_and_determinism(tmp_path, sh_toy, capsys):
    path, cfg = _toy_config(tmp_path, sh_toy)
    assert main(["--config", str(path)]) == 0
    first = (tmp_path / "cert.json").read_text()
    doc = json.loads(first)
    assert doc["kind"] == "certificate"
    assert doc["verdict"]["stability"] == "stable"
    assert main(["--config", str(path)]) == 0
    assert (tmp_path / "cert.json").read_text() == first
    out = capsys.readouterr().out
    assert "stability: stable" in out


def test_cli_gershgorin_with_plot(tmp_path, sh_toy):
    path, cfg = _toy_config(tmp_path, sh_toy, mode="gershgorin-only",
                            output=str(tmp_path / "disks.json"))
    plot = tmp_path / "plot.csv"
    assert main(["--config", str(path), "--emit-plot-data", str(plot)]) == 0
    doc = json.loads((tmp_path / "disks.json").read_text())
    assert doc["kind"] == "disk-set"
    lines = plot.read_text().strip().splitlines()
    assert lines[0] == "sector,center_re,center_im,radius"
    assert len(lines) == len(doc["disks"]) + 1


def test_cli_exit_codes(tmp_path, sh_toy):
    # missing config file
    assert main(["--config", str(tmp_path / "absent.json")]) == 2
    # malformed config: missing keys
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"mode": "certify"}))
    assert main(["--config", str(bad)]) == 2
    # failed inequality
    path, _ = _toy_config(tmp_path, sh_toy, r0=1e3)
    assert main(["--config", str(path)]) == 3
    # unknown model falls through as a general certification error
    path2, _ = _toy_config(tmp_path, sh_toy,
                           model={"name": "unknown", "params": {}})
    assert main(["--config", str(path2)]) == 5


def test_cli_essential_mode(tmp_path):
    cfg = {
        "mode": "essential-spectrum",
        "model": {"name": "whitham", "m": 1,
                  "params": {"T": 0.5, "c": 0.8}},
        "output": str(tmp_path / "ess.json"),
    }
    p = tmp_path / "run.json"
    p.write_text(json.dumps(cfg))
    assert main(["--config", str(p)]) == 0
    doc = json.loads((tmp_path / "ess.json").read_text())
    ray = doc["rays"][0]
    assert ray["hi"] is None
    lo = serialize.dec_interval(ray["lo"])
    assert abs(lo.mid() - 0.2) <= 1e-12 and lo.width() <= 1e-12

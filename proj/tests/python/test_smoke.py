import json
import os
import subprocess
from fractions import Fraction
from math import gcd

import pytest

import kgds


def test_arithmetic():
    assert kgds.phi(12) == 4
    assert kgds.mu(30) == -1
    assert kgds.count_primitive_ball(2, 1) == 8
    lhs, rhs = kgds.dirichlet_identity(360)
    assert lhs == rhs
    assert kgds.count_coprime_interval(10, "0", "1/2") == 2
    assert kgds.sum_phi_gcd_ball(1, 1) == Fraction(2)


def test_partitions():
    assert kgds.canonical_partition(2, 2, "2,4|1,3") == "1,3|2,4"
    assert kgds.has_ell(1, 2)
    assert not kgds.has_ell(2, 2, "1,3|2,4")
    with pytest.raises(ValueError):
        kgds.canonical_partition(2, 2, "1|2,3,4")


def test_funny_sum_by_hand():
    # m=1, n=2, trivial partition: sum over the shell of phi(g)/g, g = gcd(q)
    def phi(k):
        return sum(1 for j in range(1, k + 1) if gcd(j, k) == 1)

    q = 6
    want = Fraction(0)
    for a in range(-q, q + 1):
        for b in range(-q, q + 1):
            if max(abs(a), abs(b)) == q:
                g = gcd(abs(a), abs(b))
                want += Fraction(phi(g), g)
    assert kgds.funny_sum(1, 2, "", q) == want
    assert kgds.funny_sum(1, 2, "", 1) == 8


def test_measure_matches_exact():
    mean, se = kgds.measure("A", 1, 2, [2, -3], [0.2], 0.15, samples=50000, seed=4)
    exact = kgds.measure_A_exact([2, -3], [0.2], 0.15)
    assert abs(mean - exact) <= 4 * se


def test_series_and_run():
    s = kgds.series("power:1:2", 1, 1, 10000)
    assert s["verdict_kg"] == "converging"
    r = kgds.run("log_boundary", 1, 2, mode="partition", q_max=100, x_samples=10, seed=3)
    assert r["schedule"] == [10, 100]
    assert len(r["hits_plain"]) == 10
    assert all(c <= p for row_c, row_p in zip(r["hits_constrained"], r["hits_plain"]) for c, p in zip(row_c, row_p))
    again = kgds.run("log_boundary", 1, 2, mode="partition", q_max=100, x_samples=10, seed=3, threads=2)
    assert again["hits_constrained"] == r["hits_constrained"]


def test_errors():
    with pytest.raises(ValueError):
        kgds.run("power", 1, 2, mode="coprime-per-coordinate", q_max=10)
    with pytest.raises(ValueError):
        kgds.series("nonsense", 1, 1, 10)


@pytest.mark.skipif("KGDS_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_json(tmp_path):
    out = tmp_path / "series.json"
    cmd = [os.environ["KGDS_CLI"], "series", "--psi", "log_boundary", "--m", "1", "--n", "2",
           "--q-max", "1000", "--format", "json", "--out", str(out)]
    subprocess.run(cmd, check=True)
    doc = json.loads(out.read_text())
    assert doc["config"]["psi"] == "log_boundary:1"
    assert doc["series"][-1]["Q"] == 1000
    bad = subprocess.run([os.environ["KGDS_CLI"], "series", "--psi", "log_boundary"], capture_output=True)
    assert bad.returncode == 2

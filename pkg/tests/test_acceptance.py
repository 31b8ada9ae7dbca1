"""Acceptance criteria, one test each, with wall-clock limits.

Each test records a PASS/FAIL line that the terminal summary prints.
"""
import json
import math
import random
import re
import time
from contextlib import contextmanager

import numpy as np
import pytest

from apfree.base_sets import exact_max_free
from apfree.cli import main, random_experiment
from apfree.constructor import run_construction
from apfree.datasets import (
    squares_3ap_bruteforce,
    squares_3ap_parameterized,
    squares_set,
    squares_type_bound,
)
from apfree.geometry import AnnuliSpec, ball_volume, choose_z, estimate_volume, f_constant, moments
from apfree.constructor import derive_delta
from apfree.intset import save_set
from apfree.progression import (
    enumerate_progressions,
    is_progression,
    repeated_difference,
    type_of,
)

from conftest import ACCEPTANCE_RESULTS
from oracles import brute_max_free, brute_progressions, clt_shell_fraction


@contextmanager
def criterion(number, name, limit):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        ok = ok and elapsed < limit
        ACCEPTANCE_RESULTS.append((number, name, ok, elapsed, limit))
        print(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {name} ({elapsed:.2f}s)")
    assert elapsed < limit, f"criterion {number} took {elapsed:.1f}s, limit {limit}s"


def test_c01_oracle_equivalence():
    rng = random.Random(2024)
    with criterion(1, "enumeration matches exhaustive oracle", 120):
        mismatches = 0
        for _ in range(300):
            D = rng.randint(1, 2)
            k = rng.randint(max(3, D + 2), 5)
            values = rng.sample(range(-20, 40), rng.randint(1, 12))
            got = list(enumerate_progressions(values, k, D))
            if len(got) != len(set(got)) or set(got) != brute_progressions(values, k, D):
                mismatches += 1
        assert mismatches == 0


def test_c02_worked_examples():
    with criterion(2, "worked example vectors", 1):
        assert tuple(type_of([1, 4, 9, 16, 25])) == (2, 1, 2)
        assert tuple(type_of([1, 5, 11, 19, 29])) == (2, 1, 2)
        assert is_progression([4, 1, 0, 1, 4], 2)
        assert not is_progression([4, 1, 0, 1, 4], 1)
        cubes = [27, 4096, 10648, 19683]
        assert is_progression(cubes, 2)
        assert repeated_difference(cubes, 2) == (2483, 2483)


def test_c03_difference_bound():
    rng = np.random.default_rng(3)
    with criterion(3, "difference bound on 10^4 sequences", 30):
        violations = 0
        for _ in range(10_000):
            length = int(rng.integers(2, 16))
            s = rng.integers(-10**6, 10**6, size=length).tolist()
            spread = max(s) - min(s)
            for m in range(1, length):
                if max(abs(v) for v in repeated_difference(s, m)) > 2 ** (m - 1) * spread:
                    violations += 1
        assert violations == 0


def test_c04_freeness_guarantee():
    rng = random.Random(44)
    combos = [(3, 1), (4, 1), (5, 1), (5, 2)]
    with criterion(4, "200 constructions certified free", 600):
        statuses = []
        for i in range(200):
            k, D = combos[i % len(combos)]
            values = rng.sample(range(-100, 200), rng.randint(1, 60))
            res = run_construction(values, k, D, master_seed=rng.randrange(1 << 40))
            statuses.append(res.certificate.status)
        assert statuses == ["free"] * 200


@pytest.mark.parametrize("d", [40, 80])
def test_c05_annuli_volume(d):
    delta = 0.05
    with criterion(5, f"annuli volume vs normal approximation (d={d})", 120):
        spec = AnnuliSpec(d=d, D=1, A0=(1,), N0=1, delta=delta)
        # both readings of the width hypothesis hold: 2 delta N0 <= 1/4 and 2 delta <= 1/2
        assert spec.satisfies_width_constraint and 2 * delta <= 0.5
        spec = spec.with_z(choose_z(spec, seed=d))
        est = estimate_volume(spec, 1_000_000, seed=d + 1)
        assert est.relative_volume >= 0.4 * len(spec.A0) * delta
        oracle = clt_shell_fraction(delta, spec.z)
        assert abs(est.relative_volume - oracle) <= 3 * est.stderr


def test_c06_expectation_identity():
    values = squares_set(200)
    with criterion(6, "expected |A| and |T| over 400 trials", 600):
        res = run_construction(values, 3, 1, trials=400, master_seed=6)
        N = res.N
        vol_se = res.volume.absolute_stderr
        se_A = math.hypot(res.stderr_A, N * vol_se)
        assert abs(res.mean_A - res.predicted_EA) <= 3 * se_A
        # the |T| bound is linear in the volume estimate
        bound_se = res.predicted_ET_bound * vol_se / res.volume.absolute_volume
        se_T = math.hypot(res.stderr_T, bound_se)
        assert res.mean_T <= res.predicted_ET_bound + 3 * se_T


def test_c07_delta_identity():
    rng = random.Random(7)
    with criterion(7, "delta identity on 100 tuples", 1):
        for _ in range(100):
            d, D = rng.randint(5, 120), rng.randint(1, 3)
            ratio = 2.0 ** rng.uniform(1, 20)
            delta = derive_delta(d, D, ratio, 1.0)
            _, sigma = moments(d, D)
            lhs = 1 - ratio * ball_volume(d, math.sqrt(f_constant(D) * sigma * delta))
            assert abs(lhs - d / (d + 2)) <= 1e-9 * d / (d + 2)


def test_c08_squares_parameterization():
    with criterion(8, "squares parameterization equals brute force, N <= 200", 60):
        for N in range(1, 201):
            triples = squares_3ap_parameterized(N)
            assert triples == squares_3ap_bruteforce(N)
            assert len(triples) <= squares_type_bound(N)


def test_c09_exact_base_oracle():
    with criterion(9, "exact base sets match exhaustive search, N0 <= 14", 120):
        for k, Dg in ((3, 1), (4, 1), (5, 2)):
            for N0 in range(1, 15):
                size, lex_first = brute_max_free(N0, k, Dg)
                assert tuple(exact_max_free(N0, k, Dg)) == lex_first
                assert len(lex_first) == size
        assert len(exact_max_free(9, 3, 1)) == 5


def test_c10_random_sets():
    with criterion(10, "random sets keep positive density", 600):
        rows = random_experiment([2000, 8000], k=3, c=1.0, seeds=5, trials=32, seed=10)
        assert all(r["verified"] for r in rows)
        assert all(r["density"] > 0 for r in rows)
        mean = {n: np.mean([r["density"] for r in rows if r["n"] == n]) for n in (2000, 8000)}
        print(f"mean density: n=2000 {mean[2000]:.4f}, n=8000 {mean[8000]:.4f}")
        assert mean[8000] >= 0.5 * mean[2000]


def test_c11_determinism(tmp_path, capsys):
    path = tmp_path / "squares.txt"
    save_set(squares_set(120), path)
    argv = ["construct", "--in", str(path), "--k", "3", "--seed", "11"]
    with criterion(11, "construct output is byte-identical on replay", 60):
        outputs = []
        for _ in range(2):
            assert main(argv) == 0
            outputs.append(capsys.readouterr().out)
        stripped = [re.sub(r'^\s*"timestamp": .*\n', "", out, flags=re.M) for out in outputs]
        assert all("timestamp" not in s for s in stripped)
        assert stripped[0].encode() == stripped[1].encode()
        assert json.loads(outputs[0])["result"]["certificate"]["status"] == "free"

"""Acceptance criteria, each run at its stated scale on the standard ring grid.

Every test prints one PASS/FAIL line with its instance count and runtime.
"""

import itertools
import json
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from gorenstein_kit.kolyvagin import stabilizer_rearrangement_check, telescoping_holds
from gorenstein_kit.suites import DEFAULT_GRID, PROPERTIES, _ring, check_instance, instance_for, run_property
from gorenstein_kit.rng import SplitMix64
from gorenstein_kit import instances as gen

SEED = 42
BOUND = 65536


def report(capsys, number, title, ok, detail):
    with capsys.disabled():
        print(f"\ncriterion {number:2d} {'PASS' if ok else 'FAIL'}: {title} ({detail})")


def run(names, count):
    instances = failures = 0
    examples = []
    for name in names:
        for label in DEFAULT_GRID:
            e = run_property(name, label, SEED, count, BOUND)
            instances += e["instances"]
            failures += e["failures"]
            if e["counterexample"]:
                examples.append(e["counterexample"])
    return instances, failures, examples


def criterion(capsys, number, title, names, count, limit, minimum):
    start = time.perf_counter()
    n, f, examples = run(names, count)
    elapsed = time.perf_counter() - start
    ok = f == 0 and n >= minimum and (limit is None or elapsed < limit)
    report(capsys, number, title, ok, f"{n} instances, {f} failures, {elapsed:.1f}s")
    assert n >= minimum
    assert f == 0, json.dumps(examples[0], default=str)[:2000]
    if limit is not None:
        assert elapsed < limit


FITTING = ["fitting.surjection_monotone", "fitting.subquotient_product", "fitting.direct_sum",
           "fitting.base_change", "fitting.wedge_annihilation"]


def test_criterion_01_fitting_axioms(capsys):
    criterion(capsys, 1, "Fitting ideal axioms", FITTING, 200, 120, 200 * 5 * len(FITTING))


def test_criterion_02_char_equals_ann(capsys):
    criterion(capsys, 2, "char = Ann against the enumerated annihilator", ["fitting.char_equals_ann"], 100, 120, 500)


def test_criterion_03_evaluation_ideal(capsys):
    criterion(capsys, 3, "evaluation ideal = Fitt^0(H^1)", ["complexes.evaluation_ideal"], 100, 180, 500)


def test_criterion_04_theta_membership_same_instances(capsys):
    start = time.perf_counter()
    source = PROPERTIES["complexes.evaluation_ideal"]
    check = PROPERTIES["complexes.theta_membership"]
    n = f = 0
    ranks = set()
    for label in DEFAULT_GRID:
        R = _ring(label)
        for k in range(100):
            inst = instance_for(source, R, SEED, k)
            ranks.add(gen.decode_quadratic(R, inst).r)
            ok, _ = check_instance(check, R, inst)
            n += 1
            f += not ok
    elapsed = time.perf_counter() - start
    report(capsys, 4, "theta lands in the r-th bidual of H^0", f == 0, f"{n} instances, {f} failures, {elapsed:.1f}s")
    assert ranks <= {1, 2, 3}
    assert f == 0 and n == 500


def test_criterion_05_eagon_northcott(capsys):
    criterion(capsys, 5, "Eagon-Northcott complex, H^0 and annihilation", ["complexes.eagon_northcott"], 50, 300, 250)


def test_criterion_06_extension_sign(capsys):
    criterion(capsys, 6, "extension square with sign", ["complexes.extension_sign"], 50, None, 250)


def test_criterion_07_bidual_identities(capsys):
    criterion(capsys, 7, "im = Ann Ann and kernel-bidual exactness", ["biduals.ann_im", "biduals.kernel_exactness"],
              100, None, 1000)


def test_criterion_08_stark_core(capsys):
    criterion(capsys, 8, "Stark core statements, 20 systems per family", ["stark.core"], 30, 600, 150)


def test_criterion_09_kolyvagin(capsys):
    start = time.perf_counter()
    tele = all(telescoping_holds(k) for k in range(1, 17))
    # every nu <= 4 on every ring, every choice of q
    direct = 0
    ok_direct = True
    for label in DEFAULT_GRID:
        R = _ring(label)
        rng = SplitMix64(SEED)
        for nu in range(5):
            for _ in range(3):
                primes = [f"q{i}" for i in range(nu)]
                kappa = {}
                for size in range(nu + 1):
                    for d in itertools.combinations(primes, size):
                        kappa[d] = np.array([R.random_element(rng) for _ in range(2)])
                x = {(l, q): R.random_element(rng) for l in primes for q in primes if l != q}
                for q in primes:
                    ok_direct &= stabilizer_rearrangement_check(R, primes, q, kappa, x)
                    direct += 1
    n, f, _ = run(["kolyvagin.rearrangement", "kolyvagin.cofactor_iso"], 100)
    elapsed = time.perf_counter() - start
    ok = tele and ok_direct and f == 0
    report(capsys, 9, "telescoping, rearrangement, cofactor isomorphism", ok,
           f"orders 1..16, {direct} direct rearrangements, {n} suite instances, {f} failures, {elapsed:.1f}s")
    assert ok


def test_criterion_10_towers(capsys):
    criterion(capsys, 10, "depth-3 towers: Fitting base change, torsion dual, Tor transitions",
              ["limits.fitting_tower", "limits.torsion_dual", "limits.tor_transition"], 50, 120, 750)


def _cli_report(path):
    env = dict(os.environ)
    cmd = [sys.executable, "-m", "gorenstein_kit", "--suite", "all", "--seed", "42", "--count", "5", "--out", str(path)]
    proc = subprocess.run(cmd, capture_output=True, text=True, env=env)
    assert proc.returncode == 0, proc.stderr
    data = json.loads(path.read_text())
    data.pop("timing")
    return data


def test_criterion_11_determinism(capsys, tmp_path):
    start = time.perf_counter()
    a = _cli_report(tmp_path / "a.json")
    b = _cli_report(tmp_path / "b.json")
    same = a == b
    elapsed = time.perf_counter() - start
    report(capsys, 11, "two verify runs give identical reports modulo timing", same,
           f"{a['summary']['instances']} instances per run, {elapsed:.1f}s")
    assert same and a["summary"]["ok"]

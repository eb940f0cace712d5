"""Acceptance criteria, one test per criterion.

Each test records a one-line PASS/FAIL verdict, printed in the pytest
terminal summary (and directly when this file is run as a script). The
suites share the solver cache in :mod:`conichom.verify`, so later criteria
reuse decisions computed by earlier ones; the two timed criteria clear it
first.
"""

import math
import sys
import time

import pytest

from conichom import verify
from conichom.corpus import DEFAULT_SEED, VERTEX_TRANSITIVE, corpus, corpus_pairs
from conichom.graph import cycle, petersen
from conichom.homomorphisms import STRONG, YES
from conichom.theta import ConeTag, big_theta, theta

pytestmark = pytest.mark.slow

RESULTS: list[str] = []

# frozen oracle values: spectral formula -n lmin / (lmax - lmin) for the
# edge-transitive graphs, subset enumeration for alpha and the LP for chi_f
SQRT5 = 2.2360679774997896
PETERSEN_THETA = 4.0
ALPHA_C5 = 2
CHI_F_C5 = 2.5

CONIC = (ConeTag.DNN, ConeTag.SPLUS)


def record(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    RESULTS.append(line)
    print(line)


def suite(name: str):
    return verify.run_suite(name, DEFAULT_SEED, 10)


def outcome_summary(res) -> str:
    return (f"{len(res.outcomes)} instances, {res.count(verify.PASS)} pass, "
            f"{res.count(verify.FAIL)} fail, {res.count(verify.INCONCLUSIVE)} inconclusive, "
            f"worst residual {res.worst_residual:.2e}, {res.wall_time:.1f}s")


def first_failures(res, k=3) -> str:
    return "; ".join(f"{o.key}: {o.detail}" for o in res.failures[:k])


def test_criterion_01_golden_thetas():
    verify.clear_caches()
    t0 = time.perf_counter()
    c5 = theta(cycle(5), ConeTag.SPLUS).value
    pet = theta(petersen(), ConeTag.SPLUS).value
    a = theta(cycle(5), ConeTag.CP).value
    f = big_theta(cycle(5), ConeTag.CP).value
    elapsed = time.perf_counter() - t0
    ok = (abs(c5 - SQRT5) <= 1e-6 and abs(pet - PETERSEN_THETA) <= 1e-5
          and a == ALPHA_C5 and abs(f - CHI_F_C5) <= 1e-9 and elapsed < 10)
    record(1, "golden thetas", ok,
           f"theta(C5)={c5:.10f}, theta(Petersen)={pet:.10f}, alpha(C5)={a:g}, "
           f"chi_f(C5)={f!r}, {elapsed:.2f}s")
    assert ok


def test_criterion_02_theta_product():
    verify.clear_caches()
    t0 = time.perf_counter()
    worst_bound, worst_eq, n = math.inf, 0.0, 0
    for name, g in corpus():
        for cone in CONIC:
            prod = verify.cached_theta(g, cone).value * verify.cached_big_theta(g, cone).value
            worst_bound = min(worst_bound, prod - g.n)
            if name in VERTEX_TRANSITIVE:
                worst_eq = max(worst_eq, abs(prod - g.n))
            n += 1
    elapsed = time.perf_counter() - t0
    ok = worst_bound >= -1e-6 and worst_eq <= 1e-5 and elapsed < 120
    record(2, "theta * Theta >= |V|", ok,
           f"{n} graph/cone instances, min(theta*Theta - n)={worst_bound:.2e}, "
           f"vertex-transitive max |theta*Theta - n|={worst_eq:.2e}, {elapsed:.1f}s")
    assert ok


def test_criterion_03_hom_oracles_agree():
    res = suite("hom2theta")
    pairs = corpus_pairs()
    assert pairs and all(x.n * y.n <= 40 for (_, x), (_, y) in pairs)
    # re-validate every yes witness independently of the suite's bookkeeping
    bad = 0
    for (_, x), (_, y) in pairs:
        for cone in CONIC:
            d = verify.cached_decision(x, y, cone, STRONG)
            if d.verdict == YES and not d.witness.residuals.passes(STRONG, 1e-7):
                bad += 1
    ok = res.ok and bad == 0
    record(3, "direct feasibility vs theta of the homomorphic product", ok,
           outcome_summary(res) + (f"; {first_failures(res)}" if not res.ok else "")
           + f"; invalid yes-witnesses {bad}")
    assert ok


def test_criterion_04_dnn_repair():
    res = suite("dnnequiv")
    ok = res.ok and len(res.outcomes) > 0 and res.worst_residual <= 1e-7
    record(4, "weak DNN witnesses repaired to strong", ok, outcome_summary(res))
    assert ok


def test_criterion_05_monotonicity():
    res = suite("monotonicity")
    ok = res.ok and len(res.outcomes) > 0 and res.worst_residual <= 1e-6
    record(5, "monotonicity transforms", ok,
           outcome_summary(res) + (f"; {first_failures(res)}" if not res.ok else ""))
    assert ok


def test_criterion_06_multiplicativity():
    ctx = {}
    res = verify.run_suite("multiplicativity", DEFAULT_SEED, 10, ctx)
    lo, hi = ctx["notes"]["big_theta_ratio_range"]
    ok = res.ok and len(res.outcomes) == 32
    record(6, "multiplicativity on {C5, K3, P3, C4}", ok,
           outcome_summary(res) + f"; Theta(X*Y)/(Theta(X)Theta(Y)) in [{lo:.6f}, {hi:.6f}]")
    assert ok


def test_criterion_07_lattice():
    res = suite("lattice")
    kinds = {o.key for o in res.outcomes}
    ok = res.ok and {"union/solver/dnn", "union/solver/splus", "meet/lift/cp"} <= kinds
    record(7, "categorical meet and disjoint union witnesses", ok,
           outcome_summary(res) + (f"; {first_failures(res)}" if not res.ok else ""))
    assert ok


def test_criterion_08_conic_alpha():
    res = suite("alpha")
    ok = res.ok and res.count(verify.PASS) == len(res.outcomes) == 3 * len(corpus())
    record(8, "conic alpha by floor(theta) and by K_n search", ok,
           outcome_summary(res) + (f"; {first_failures(res)}" if not res.ok else ""))
    assert ok


def test_criterion_09_degenerate_weak_splus():
    res = suite("degeneracy")
    sizes = {int(o.detail.split(",")[0].split("=")[1]) for o in res.outcomes}
    ok = res.ok and set(range(2, 7)) <= sizes and res.worst_residual <= 1e-9
    record(9, "degenerate weak S+ witness to K2", ok,
           outcome_summary(res) + f"; orders covered {sorted(sizes)}")
    assert ok


def test_criterion_10_frabjous_closure():
    res = suite("frabjous")
    worst = min(float(o.detail.split("min eigenvalue ")[1]) for o in res.outcomes)
    ok = res.ok and len(res.outcomes) == 8 and worst >= -1e-9
    record(10, "closure of PSD and DNN under the four operations", ok,
           outcome_summary(res) + f"; 200 instances per operation and cone, "
           f"min eigenvalue {worst:.2e}")
    assert ok


if __name__ == "__main__":
    code = pytest.main([__file__, "-q", "-p", "no:cacheprovider"])
    collected = getattr(sys.modules.get("test_acceptance"), "RESULTS", [])
    print("\n".join(collected) if collected else "no results recorded")
    sys.exit(code)

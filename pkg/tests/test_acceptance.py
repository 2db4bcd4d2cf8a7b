"""Acceptance gate: one PASS/FAIL line per criterion.

Run under pytest (lines are echoed in the terminal summary) or directly with
``python tests/test_acceptance.py``.  Tolerances are pinned here and must not
be loosened.
"""
from __future__ import annotations

import math
import sys
import time

import numpy as np
import pytest

from choco import fixtures
from choco.configuration import enumerate_configurations, parse_shorthand
from choco.errors import CertificationFailed
from choco.perturbation import certify_admissible, delta_epsilon, perturb_config
from choco.polynomial import Polynomial
from choco.solver import SolverSettings, best_delta, search_degree, solve_config, solve_system
from choco.stability import classify, minors_nonnegative, minors_positive
from choco.system import build_system, finite_difference_jacobian, jacobian

TOL_CLOSED_FORM = 1e-9
TOL_FIGURE = 1e-6
TOL_PARAMS = 1e-6
TOL_DELTA_HAT = 1e-5
TOL_IDENTITY = 1e-8
TOL_CRITICAL = 1e-4
TOL_UNIT = 1e-8
TOL_AGREE = 1e-4
TOL_FD = 1e-5

RESULTS: list[str] = []


def report(n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def criterion_1():
    out = []
    t = time.perf_counter()
    cubic = best_delta(solve_system(build_system(fixtures.generic_cubic_template()))).delta
    t_cubic = time.perf_counter() - t
    t = time.perf_counter()
    quartic = best_delta(solve_config("[1],[],[]", SolverSettings(), cache=None).candidates).delta
    t_quartic = time.perf_counter() - t
    e1 = abs(cubic - math.sqrt(2 + math.sqrt(2)) / 2)
    e2 = abs(quartic - math.sqrt(10 + 2 * math.sqrt(5)) / 4)
    ok = e1 < TOL_CLOSED_FORM and e2 < TOL_CLOSED_FORM and t_cubic < 1 and t_quartic < 1
    out.append(f"cubic {cubic:.10f} (err {e1:.1e}, {t_cubic:.2f}s); "
               f"quartic {quartic:.10f} (err {e2:.1e}, {t_quartic:.2f}s)")
    return ok, "; ".join(out)


def criterion_2():
    details, ok = [], True
    for deg in (4, 6, 8, 10):
        label, printed = fixtures.FIGURE1[deg]
        t = time.perf_counter()
        rows = search_degree(deg, SolverSettings(), cache=None)
        top = rows[0]
        good = (top.candidate is not None and str(top.config) == str(parse_shorthand(label))
                and abs(top.candidate.delta - printed) < TOL_FIGURE)
        ok &= good
        got = f"{top.candidate.delta:.7f}" if top.candidate else "none"
        details.append(f"deg{deg} {top.config} {got} ({time.perf_counter() - t:.0f}s)")
    t = time.perf_counter()
    res = solve_config(fixtures.DEG20_CONFIG, SolverSettings(warm_starts=(fixtures.DEG20_SOLUTION,)), cache=None)
    el = time.perf_counter() - t
    d20 = best_delta(res.candidates).delta
    ok &= abs(d20 - fixtures.FIGURE1[20][1]) < TOL_FIGURE and el < 60
    details.append(f"deg20 warm start {d20:.7f} ({el:.2f}s)")
    return ok, "; ".join(details)


def criterion_3():
    best = best_delta(solve_config(fixtures.DEG10_CONFIG, SolverSettings(), cache=None).candidates)
    errs = {k: abs(best.values[k] - v) for k, v in fixtures.DEG10_SOLUTION.items()}
    params_ok = max(errs.values()) <= TOL_PARAMS
    try:
        certify_admissible(fixtures.CS_DELTA, fixtures.CS_X, fixtures.CS_Y)
        cert_ok, why = True, "certified"
    except CertificationFailed as exc:
        cert_ok, why = False, f"not certified ({exc.predicate}: {exc.detail})"
    order_ok = fixtures.CS_DELTA < best.delta
    detail = (f"six parameters max err {max(errs.values()):.1e}; transcribed comparison triple {why}; "
              f"{fixtures.CS_DELTA} < {best.delta:.7f} is {order_ok}")
    return params_ok and cert_ok and order_ok, detail


def criterion_4():
    t = time.perf_counter()
    c = perturb_config("[1],[],[]", fixtures.QUARTIC_SOLUTION, fixtures.EXAMPLE_EPSILON)
    el = time.perf_counter() - t
    r = c.critical_root
    dh = float(c.delta_hat)
    ok = (abs(dh - fixtures.EXAMPLE_DELTA_HAT) < TOL_DELTA_HAT
          and c.classifications == ["stable"] * 3
          and c.identity_residual <= TOL_IDENTITY
          and abs(r.real - fixtures.EXAMPLE_DELTA_HAT) < TOL_CRITICAL
          and abs(abs(r.imag) - fixtures.EXAMPLE_CRITICAL_IM) < TOL_CRITICAL
          and abs(abs(r) - 1) < TOL_UNIT and el < 5)
    return ok, (f"delta_hat {dh:.7f}, root {r.real:.6f}+-{abs(r.imag):.6f}i, |r|-1 {abs(r) - 1:.1e}, "
                f"residual {c.identity_residual:.1e}, {el:.2f}s")


def criterion_5():
    ok, parts = True, []
    for deg in (4, 6, 8, 10):
        label = fixtures.FIGURE1[deg][0]
        best = best_delta(solve_config(label, SolverSettings(), cache=None).candidates)
        hats = []
        for eps in (1e-2, 1e-3, 1e-4):
            try:
                c = perturb_config(label, best.values, eps)
            except CertificationFailed as exc:
                ok = False
                parts.append(f"{label} eps={eps}: {exc}")
                continue
            dh = float(c.delta_hat)
            ok &= abs(dh - delta_epsilon(best.delta, eps)) < TOL_AGREE
            ok &= c.classifications == ["stable"] * 3 and c.identity_residual <= TOL_IDENTITY
            hats.append(dh)
        ok &= len(hats) == 3 and hats[0] < hats[1] < hats[2]
        parts.append(f"{label} " + " < ".join(f"{h:.7f}" for h in hats))
    return ok, "; ".join(parts)


def _random_poly(rng):
    if rng.random() < 0.5:
        deg = int(rng.integers(1, 9))
        return Polynomial([*rng.uniform(0.05, 5.0, deg), 1.0])
    p, deg = Polynomial([1.0]), 0
    target = int(rng.integers(1, 9))
    while deg < target:
        re = (-1 if rng.random() < 0.7 else 1) * rng.uniform(0.05, 3.0)
        if target - deg >= 2 and rng.random() < 0.6:
            im = rng.uniform(0.1, 4.0)
            p, deg = p * Polynomial([re * re + im * im, -2 * re, 1.0]), deg + 2
        else:
            p, deg = p * Polynomial([-re, 1.0]), deg + 1
    return p


def criterion_6():
    rng = np.random.default_rng(20240601)
    disagree = stable = 0
    for _ in range(1000):
        p = _random_poly(rng)
        a, b = classify(p).is_stable, minors_positive(p)
        disagree += a != b
        stable += a
    ce = Polynomial([10201, 0, 198, 0, 1])
    ce_ok = minors_nonnegative(ce) and not classify(ce).is_quasi_stable
    return disagree == 0 and ce_ok, (f"{disagree} disagreements in 1000 ({stable} stable); "
                                     f"counterexample nonnegative minors {minors_nonnegative(ce)}, "
                                     f"quasi-stable {classify(ce).is_quasi_stable}")


def criterion_7():
    rng = np.random.default_rng(7)
    worst, count = 0.0, 0
    for deg in range(4, 13, 2):
        for cfg in enumerate_configurations(deg):
            sys_ = build_system(cfg.template())
            pt = rng.uniform(0.2, 1.5, sys_.n_unknowns)
            J = np.array(jacobian(sys_, list(pt)), dtype=float)
            fd = finite_difference_jacobian(sys_, pt)
            worst = max(worst, float(np.max(np.abs(J - fd)) / max(1.0, np.max(np.abs(J)))))
            count += 1
    n4 = len(enumerate_configurations(4))
    return worst <= TOL_FD and n4 == 1, f"{count} configurations, worst relative FD error {worst:.1e}; deg4 count {n4}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7]


@pytest.mark.parametrize("n", range(1, 8))
def test_criterion(n):
    ok, detail = CRITERIA[n - 1]()
    report(n, ok, detail)


if __name__ == "__main__":
    failed = 0
    for i, fn in enumerate(CRITERIA, 1):
        ok, detail = fn()
        print(f"criterion {i}: {'PASS' if ok else 'FAIL'}  {detail}", flush=True)
        failed += not ok
    sys.exit(1 if failed else 0)

"""Acceptance criteria, one test each; each prints a PASS/FAIL line.

The lines are also collected into the pytest terminal summary.  Run with
``pytest tests/test_acceptance.py -v -s`` to see them inline.
"""
import math
import os
import random
import time

import pytest

from conftest import ACCEPTANCE

from borel_cycles.cycles import (
    _rhs_products, build_cycle, chain_bilinear, chain_order, chain_swap, example_matrices, torsion_cycle,
)
from borel_cycles.foxbar import bar_d, psi, steinberg_symbol, linearisation_residual
from borel_cycles.matrices import MatrixGroup
from borel_cycles.regulator import (
    Interrupted, appendix_tuple_exact, appendix_value_exact, evaluate, evaluate_tuples, preprocess,
)
from borel_cycles.zeta import (
    ZETA_STAR_PUBLISHED, hurwitz_bruteforce, hurwitz_zeta, regulator_target, zeta_F2, zeta_F2_bruteforce,
    zeta_star_minus1,
)

# series_seconds of full-cycle runs, shared between criteria 5 and 7
_SERIES_TIMES: dict = {}


def record(n: int, ok: bool, detail: str) -> None:
    ACCEPTANCE[n] = (bool(ok), detail)
    print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} - {detail}")


def test_criterion_1_appendix_regression():
    t0 = time.perf_counter()
    ch, g = appendix_tuple_exact()
    res = evaluate(ch, g, 2)
    dt = time.perf_counter() - t0
    expected = complex(0.0, float(appendix_value_exact()))
    err = abs(res.value - expected)
    ok = err <= 1e-12 and dt < 1.0
    record(1, ok, f"value {res.value.imag:.17e}i, error {err:.1e}, {dt:.3f}s")
    assert ok


def test_criterion_2_exact_certificates(zeta3, x_result):
    t0 = time.perf_counter()
    g = MatrixGroup(zeta3.field, 3)
    m = example_matrices(zeta3)
    a, b, w, c = (g.intern(m[k]) for k in "abwc")
    certs = {
        "bilinear": chain_bilinear(a, b, c, g),
        "order": chain_order(a, b, 3, g),
        "swap": chain_swap(a, b, w, g),
    }
    exact = all(bar_d(ct.chain, g) == ct.boundary for ct in certs.values())
    exact &= certs["order"].boundary == steinberg_symbol(a, b).scale(3)
    exact &= certs["swap"].boundary == steinberg_symbol(a, b).scale(2)

    prods = _rhs_products(x_result.rhs, x_result.cert.group)
    picks = random.Random(2024).sample(range(len(prods)), 100)
    zero = sum(linearisation_residual(prods[k][3], x_result.cert.group).is_zero() for k in picks)
    dt = time.perf_counter() - t0
    ok = exact and zero == 100 and dt < 60
    record(2, ok, f"short certificates exact: {exact}; linearisation residuals zero: {zero}/100; {dt:.1f}s")
    assert ok


def test_criterion_3_pipeline_exactness(zeta3, x_result, cycle_znx):
    t0 = time.perf_counter()
    g = x_result.cert.group
    dX = bar_d(x_result.cert.chain, g)
    x_ok = dX == steinberg_symbol(x_result.A, x_result.B)
    y = build_cycle(zeta3, "Y-2X", x=x_result)
    y_ok = bar_d(y.chain, y.group).is_zero()
    z_ok = bar_d(cycle_znx.chain, cycle_znx.group).is_zero()
    dt = time.perf_counter() - t0 + x_result.stats.seconds
    std = psi(cycle_znx.chain, g)
    n_std = len(preprocess(std, g))
    ok = x_ok and y_ok and z_ok and dt < 1800
    record(3, ok, (f"d(X)={{A,B}}: {x_ok}, d(Y-2X)=0: {y_ok}, d(Z-3X)=0: {z_ok}; "
                   f"X has {len(x_result.cert.chain)} bar tuples (reference 11123), "
                   f"Z-3X has {n_std} standard tuples after preprocessing (reference about 3450); {dt:.1f}s"))
    assert ok


def test_criterion_4_zeta_oracle():
    t0 = time.perf_counter()
    zs = float(zeta_star_minus1(106))
    d_pub = abs(zs - ZETA_STAR_PUBLISHED)
    d_h = max(abs(float(hurwitz_zeta(2, a)) - hurwitz_bruteforce(a)) for a in (1 / 3, 2 / 3, 1.0))
    d_dir = abs(float(zeta_F2(106)) - zeta_F2_bruteforce(10 ** 6))
    dt = time.perf_counter() - t0
    ok = d_pub <= 1e-12 and d_h <= 1e-10 and d_dir <= 1e-10 and dt < 10
    record(4, ok, f"zeta* = {zs:.18f} (diff {d_pub:.1e}); Hurwitz brute force {d_h:.1e}; "
                  f"Dirichlet brute force {d_dir:.1e}; {dt:.2f}s")
    assert ok


def test_criterion_5_end_to_end_regulator(cycle_tuples):
    res = evaluate_tuples(cycle_tuples, 6)
    _SERIES_TIMES.setdefault(6, []).append(res.series_seconds)
    v, tail = res.value, res.tail_estimate
    target = float(regulator_target())
    imaginary = abs(v.real) <= 1e-8 * abs(v)
    negative = v.imag < 0
    close = math.isfinite(tail) and abs(abs(v.imag) - target) <= tail
    ok = imaginary and negative and close
    record(5, ok, (f"value {v.real:+.1e} {v.imag:+.6f}i, tail {tail:.3g}, target -{target:.6f}; "
                   f"purely imaginary: {imaginary}, negative: {negative}, within tail: {close}; "
                   f"partial terms {[round(c.imag, 4) for c in res.partials]}; {res.seconds:.1f}s"))
    assert ok


def test_criterion_6_torsion_kill(zeta3):
    ch, g = torsion_cycle(zeta3, 3)
    res = evaluate(ch, g, 6)
    ok = math.isfinite(res.tail_estimate) and abs(res.value) <= res.tail_estimate
    record(6, ok, f"|value| {abs(res.value):.3g} <= tail {res.tail_estimate:.3g}: {ok}")
    assert ok


def test_criterion_7_cost_ratio(cycle_tuples):
    # series time only (preprocessing excluded), best of two runs each
    for m in (4, 5, 6):
        runs = _SERIES_TIMES.setdefault(m, [])
        while len(runs) < 2:
            runs.append(evaluate_tuples(cycle_tuples, m).series_seconds)
    t = {m: min(_SERIES_TIMES[m]) for m in (4, 5, 6)}
    r4, r5 = t[5] / t[4], t[6] / t[5]
    ok = abs(r4 - 3.0) <= 0.5 and abs(r5 - 3.0) <= 0.5
    record(7, ok, f"times {t[4]:.2f}s, {t[5]:.2f}s, {t[6]:.2f}s; ratios {r4:.2f} (k=4), {r5:.2f} (k=5)")
    assert ok


def test_criterion_8_determinism(cycle_tuples, tmp_path):
    m = 4
    runs = {w: evaluate_tuples(cycle_tuples, m, workers=w) for w in (1, 4, 8)}
    same = lambda a, b: a.value == b.value and a.partials == b.partials and a.tail_estimate == b.tail_estimate
    workers_ok = same(runs[1], runs[4]) and same(runs[1], runs[8])

    ck = tmp_path / "ckpt"
    with pytest.raises(Interrupted):
        evaluate_tuples(cycle_tuples, m, checkpoint_dir=ck, stop_after=40)
    resumed = evaluate_tuples(cycle_tuples, m, checkpoint_dir=ck, workers=4)
    resume_ok = same(runs[1], resumed)
    ok = workers_ok and resume_ok
    record(8, ok, f"1/4/8 workers bitwise equal: {workers_ok}; interrupt after 40 chunks + resume equal: {resume_ok}")
    assert ok


@pytest.mark.skipif(os.environ.get("BOREL_LONG") != "1", reason="long run; set BOREL_LONG=1")
def test_long_run_interval(cycle_tuples):
    """The m <= 9 interval [-0.0375, -0.0125] (takes a long time)."""
    res = evaluate_tuples(cycle_tuples, 9, workers=os.cpu_count() or 1)
    print(f"\nm<=9 value {res.value}, tail {res.tail_estimate}")
    assert -0.0375 <= res.value.imag <= -0.0125

"""Acceptance gates for the whole package, one criterion per test.

Each test prints a single "criterion NN: PASS/FAIL" line with the measured
quantity before asserting, so the run log always carries the full scorecard.
Criterion 3 is expected red on its cubic half: the halved cubic maps
converge like 2^(-k/3) near the origin, so the deviation at k=20 is about
9.8e-3, far above the 1e-3 gate (first green level would be k=32).  The
assertions state the gate anyway; see the repository notes for the analysis.
"""

import json
import math

import numpy as np
import pytest

from reebflow import (BoundaryPoint, BumpProfile, EightPointConfig,
                      HalvingSequence, QuadrantPoint, check_eight_point,
                      check_four_point, counterexample_limit_table,
                      counterexample_model, cubic_pair, eight_point_case,
                      hyperbolic_model, iterate_closed_form, square_root,
                      synthesize, translation_pair)
from reebflow.cli import run
from reebflow.matching import four_point_triples, sector_angle
from reebflow.synthesis import (boundary_flow, check_additivity,
                                check_boundary_consistency)

Y = BoundaryPoint.on_y_axis
X = BoundaryPoint.on_x_axis


def _line(n, ok, detail):
    print("criterion %02d: %s - %s" % (n, "PASS" if ok else "FAIL", detail))


@pytest.fixture(scope="module")
def g():
    return hyperbolic_model()


@pytest.fixture(scope="module")
def f_counter():
    return counterexample_model()


@pytest.fixture(scope="module")
def g_flow(g):
    return synthesize(g)


def test_criterion_01_square_root_oracle():
    s = square_root(cubic_pair())
    xs = np.linspace(-8.0, 8.0, 512)
    worst = max(abs(s.forward(float(x)) - float(np.cbrt(x ** 3 + 0.5)))
                for x in xs)
    ok = worst < 1e-6
    _line(1, ok, "max |sqrt - cube-coordinate oracle| = %.3e on 512 points"
          % worst)
    assert ok


def test_criterion_02_flow_uniqueness_oracle():
    seq = HalvingSequence(cubic_pair(), depth=40)
    worst = 0.0
    for t in np.linspace(-2.0, 2.0, 41):
        for x in (0.0, 1.1):
            got = seq.flow(float(t), x, tol=1e-7)
            worst = max(worst, abs(got - float(np.cbrt(x ** 3 + t))))
    ok = worst < 1e-6
    _line(2, ok, "max |flow(t,x) - (x^3+t)^(1/3)| = %.3e on 41 x 2 grid"
          % worst)
    assert ok


def test_criterion_03_halved_maps_approach_identity():
    verdicts = []
    for pair in (translation_pair(), cubic_pair()):
        seq = HalvingSequence(pair, depth=20, window=(-8.0, 8.0))
        devs = [seq.deviation_from_identity(k) for k in range(21)]
        decreasing = all(b < a for a, b in zip(devs, devs[1:]))
        verdicts.append((pair.label, decreasing, devs[20]))
    ok = all(dec and dev < 1e-3 for _, dec, dev in verdicts)
    _line(3, ok, "; ".join("%s: decreasing=%s, dev@20=%.3e"
                           % v for v in verdicts))
    for label, decreasing, dev20 in verdicts:
        assert decreasing, label
        assert dev20 < 1e-3, label


def test_criterion_04_profile_properties():
    profile = BumpProfile()
    thetas = np.linspace(0.5, 2.0, 100001)
    beta = profile.factor(thetas)
    flat = ((thetas <= 0.75) | ((thetas >= 1.0) & (thetas <= 1.5))
            | (thetas == 2.0))
    prop_i = bool(np.all(beta[flat] == 1.0) and np.all(beta[~flat] > 1.0))
    half = thetas[thetas <= 1.0]
    prop_ii = bool(np.all(profile.factor(half)
                          == profile.factor(2.0 * half)))
    ratio = thetas / beta
    prop_iii = bool(np.all(np.diff(ratio) > 0.0)
                    and ratio[0] == 0.5 and ratio[-1] == 2.0)
    ratio2 = thetas / beta ** 2
    prop_iv = bool(np.all(np.diff(ratio2) > 0.0)
                   and ratio2[0] == 0.5 and ratio2[-1] == 2.0)
    margin = profile.slope_margin()
    ok = prop_i and prop_ii and prop_iii and prop_iv and margin >= 0.05
    _line(4, ok, "i=%s ii=%s iii=%s iv=%s, slope margin %.4f"
          % (prop_i, prop_ii, prop_iii, prop_iv, margin))
    assert ok


def test_criterion_05_closed_form_vs_direct_iteration(f_counter):
    rng = np.random.default_rng(20260822)
    worst = 0.0
    for _ in range(1000):
        p = QuadrantPoint(float(rng.uniform(-2.0, 2.0)),
                          float(rng.uniform(-2.0, 2.0)))
        n = int(rng.integers(0, 61))
        direct = f_counter.iterate(p, n)
        closed = iterate_closed_form(p, n, f_counter.profile)
        worst = max(worst, abs(direct.lx - closed.lx),
                    abs(direct.ly - closed.ly))
    ok = worst < 1e-12
    _line(5, ok, "max log-coordinate gap %.3e over 1000 starts, n <= 60"
          % worst)
    assert ok


def test_criterion_06_four_point_both_models(g, f_counter):
    triples = four_point_triples(10)
    rep_g = check_four_point(g, triples)
    rep_f = check_four_point(f_counter, triples)
    ok = (rep_g.passed() and rep_f.passed()
          and rep_g.max_residual < 1e-8 and rep_f.max_residual < 1e-8)
    _line(6, ok, "hyperbolic residual %.3e, distorted residual %.3e "
          "on 10x10x10 grid" % (rep_g.max_residual, rep_f.max_residual))
    assert ok


def test_criterion_07_eight_point_split(g, f_counter):
    case = eight_point_case(EightPointConfig())
    rep_g = check_eight_point(g, case)
    rep_f = check_eight_point(f_counter, case)
    cfg = EightPointConfig()
    predicted = (f_counter.profile.factor(
        sector_angle(math.log(cfg.delta ** 2 * cfg.b / cfg.a))) - 1.0) \
        * cfg.a / cfg.delta
    rel = abs(rep_f.max_residual - predicted) / predicted
    ok = (rep_g.passed() and rep_g.max_residual < 1e-8
          and not rep_f.passed() and rel < 0.01)
    _line(7, ok, "hyperbolic residual %.3e; distorted residual %.6e vs "
          "predicted %.6e (rel gap %.2e)"
          % (rep_g.max_residual, rep_f.max_residual, predicted, rel))
    assert ok


def test_criterion_08_limit_table(f_counter):
    report = counterexample_limit_table()
    first7 = max(abs(r["computed"] - r["closed_form"])
                 for r in report.witnesses[:7])
    drift7 = max(abs(r["difference"]) for r in report.witnesses[:7])
    case = eight_point_case(EightPointConfig())
    rep_f = check_eight_point(f_counter, case)
    eighth = report.witnesses[7]["difference"]
    rel = abs(eighth - rep_f.max_residual) / rep_f.max_residual
    ok = (report.passed() and first7 < 1e-9 and drift7 < 1e-9
          and rel < 0.01)
    _line(8, ok, "first seven within %.3e of closed forms; eighth differs "
          "by %.6e (eight-point residual %.6e)"
          % (max(first7, drift7), eighth, rep_f.max_residual))
    assert ok


def test_criterion_09_boundary_flow_oracle(g, g_flow):
    times = (-2.0, -1.3, -0.5, 0.25, 0.7, 1.0, 1.75)
    heights = (0.3, 0.8, 1.0, 1.7, 2.9)
    worst = 0.0
    for t in times:
        for y in heights:
            got = g_flow.flow_y.at(t, y).coord
            worst = max(worst, abs(got - 2.0 ** (-t) * y))
    other = boundary_flow(g, anchor=BoundaryPoint.on_x_axis(1.3), depth=24)
    gap = 0.0
    for t in (0.7, -1.3):
        for y in (0.6, 1.1):
            gap = max(gap, abs(g_flow.flow_y.at(t, y, tol=1e-7).coord
                               - other.at(t, y, tol=1e-7).coord))
    ok = worst < 1e-6 and gap < 1e-6
    _line(9, ok, "max |flow - exact halving| = %.3e on 7x5 grid; "
          "anchor disagreement %.3e" % (worst, gap))
    assert ok


def test_criterion_10_planar_flow(g, g_flow):
    rng = np.random.default_rng(1153)
    worst = 0.0
    for _ in range(1000):
        p = QuadrantPoint(float(rng.uniform(-1.0, 1.0)),
                          float(rng.uniform(-1.0, 1.0)))
        t = float(rng.uniform(-3.0, 3.0))
        q = g_flow.at(t, p)
        worst = max(worst,
                    math.hypot(q.x() - 2.0 ** t * p.x(),
                               q.y() - 2.0 ** (-t) * p.y()))
    additivity = check_additivity(g_flow)
    consistency = check_boundary_consistency(g, g_flow.flow_y,
                                             g_flow.flow_x)
    ok = (worst < 1e-6 and additivity.passed()
          and additivity.max_residual < 1e-6 and consistency.passed()
          and consistency.max_residual < 1e-6)
    _line(10, ok, "max planar gap %.3e on 1000 points; additivity %.3e; "
          "boundary consistency %.3e"
          % (worst, additivity.max_residual, consistency.max_residual))
    assert ok


def test_criterion_11_cli_examples(tmp_path):
    def run_twice(argv, name):
        outs = []
        for tag in ("a", "b"):
            out = tmp_path / ("%s_%s" % (tag, name))
            code = run(argv + ["--out", str(out)])
            outs.append(out.read_bytes())
        assert outs[0] == outs[1], name
        return code

    code_g = run_twice(["check", "eight-point", "--model", "hyperbolic_g"],
                       "g.json")
    code_f = run_twice(["check", "eight-point", "--model", "counterexample"],
                       "f.json")
    code_plot = run_twice(["plot", "figure1"], "fig.svg")
    residual = json.loads((tmp_path / "a_f.json").read_text()
                          )["report"]["max_residual"]
    ok = (code_g == 0 and code_f == 1 and code_plot == 0
          and abs(residual - 1.57e-4) / 1.57e-4 < 0.01
          and (tmp_path / "a_fig.svg").read_text().startswith("<svg"))
    _line(11, ok, "exit codes %d/%d/%d, deterministic outputs, distorted "
          "residual %.6e" % (code_g, code_f, code_plot, residual))
    assert ok

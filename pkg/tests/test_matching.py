import math

import numpy as np
import pytest

from reebflow.errors import (ConfigError, LimitDivergenceError,
                             WitnessBracketError)
from reebflow.matching import (MatchingReport, Transversal,
                               check_eight_point, check_four_point,
                               counterexample_limit_table,
                               default_boundary_grid, eight_point_case,
                               four_point_triples, parallel_map,
                               sector_angle, solve_witness, threshold_for,
                               transfer_across, transfer_back,
                               transfer_within)
from reebflow.reeb import (BoundaryPoint, BumpProfile, EightPointConfig,
                           QuadrantPoint, counterexample_model,
                           hyperbolic_model)

TOL = 1e-9
OBSTRUCTION = 0.00015740817252762716     # (beta(0.758) - 1) * a / delta
OBSTRUCTION_SWAPPED = 1.888898070331526e-4  # same bump scaled by c instead of a
C_OVER_DELTA = 1.1935711697268692
A_OVER_DELTA = 0.9946426414390099


def Y(v):
    return BoundaryPoint.on_y_axis(v)


def X(v):
    return BoundaryPoint.on_x_axis(v)


def test_sector_angle_representatives():
    assert sector_angle(math.log(0.7)) == pytest.approx(0.7, abs=1e-15)
    assert sector_angle(math.log(0.7) + 4 * math.log(2.0)) == pytest.approx(
        0.7, abs=1e-13)
    assert sector_angle(math.log(3.0)) == pytest.approx(0.75, abs=1e-13)
    # theta = 2 wraps to the bottom of the half-open sector
    assert sector_angle(math.log(2.0)) == pytest.approx(0.5, abs=1e-13)


def test_solve_witness_hyperbolic_closed_form():
    g = hyperbolic_model()
    w = solve_witness(g, 5, Y(0.7), X(1.0))
    assert w.x() == pytest.approx(2.0 ** -5, rel=1e-12)
    assert w.y() == pytest.approx(0.7, rel=1e-12)
    w1 = solve_witness(g, 1, Y(1.0), X(2.0))
    assert w1.x() == pytest.approx(1.0, rel=1e-12)
    assert w1.y() == pytest.approx(1.0, rel=1e-12)


def test_solve_witness_counterexample_flat_crossing():
    f = counterexample_model()
    w = solve_witness(f, 20, Y(0.7), X(1.2))
    # crossing angle 0.7/1.2 is distortion-free, so the hyperbolic guess holds
    assert w.x() * 2.0 ** 20 == pytest.approx(1.2, rel=1e-10)


def test_solve_witness_argument_checks():
    g = hyperbolic_model()
    with pytest.raises(ConfigError):
        solve_witness(g, 0, Y(1.0), X(1.0))
    with pytest.raises(ConfigError):
        solve_witness(g, 3, X(1.0), Y(1.0))


class _Stuck:
    """Fake map whose images never reach the target; exercises the budget."""

    fast = True

    def forward_log_image(self, lx, ly, n):
        return -50.0, ly

    def iterate(self, p, n):
        return p


def test_witness_bracket_budget_error():
    with pytest.raises(WitnessBracketError, match="witness bracket failure"):
        solve_witness(_Stuck(), 3, Y(1.0), X(1.0))


def test_transfer_across_hyperbolic_product_rule():
    g = hyperbolic_model()
    out = transfer_across(g, Y(0.7), X(1.3), Y(1.1), tol=TOL)
    assert out.coord == pytest.approx(1.3 * 0.7 / 1.1, abs=1e-9)


def test_transfer_across_reflexive():
    g = hyperbolic_model()
    out = transfer_across(g, Y(0.7), X(1.3), Y(0.7), tol=TOL)
    assert out.coord == pytest.approx(1.3, abs=1e-9)


def test_transfer_across_counterexample_slid_pair():
    f = counterexample_model()
    cfg = EightPointConfig()
    out = transfer_across(f, Y(cfg.d), X(cfg.c), Y(cfg.delta * cfg.d),
                          tol=TOL)
    assert out.coord == pytest.approx(C_OVER_DELTA, abs=1e-9)
    out2 = transfer_across(f, Y(cfg.d), X(cfg.a), Y(cfg.delta * cfg.d),
                           tol=TOL)
    assert out2.coord == pytest.approx(A_OVER_DELTA, abs=1e-9)


def test_transfer_round_trip_symmetry():
    for f in (hyperbolic_model(), counterexample_model()):
        for y in default_boundary_grid(3):
            forward = transfer_across(f, Y(0.8), X(1.1), Y(float(y)), tol=TOL)
            back = transfer_back(f, Y(0.8), X(1.1), forward, tol=TOL)
            assert abs(math.log(back.coord) - math.log(y)) < 10 * TOL


def test_transfer_preserves_leaf_order():
    # larger height comes earlier in leaf order, so coordinates reverse
    f = counterexample_model()
    heights = default_boundary_grid(5)
    outs = [transfer_across(f, Y(0.9), X(1.2), Y(float(u)), tol=TOL).coord
            for u in heights]
    assert all(a > b for a, b in zip(outs, outs[1:]))


def test_transfer_commutes_with_the_map():
    # (x, x') relates like (f x, f x'), acting on the rays
    for f in (hyperbolic_model(), counterexample_model()):
        x, xp, y = Y(0.8), X(1.1), Y(1.4)
        lhs = transfer_across(f, f.apply_boundary(x),
                              f.apply_boundary(xp),
                              f.apply_boundary(y), tol=TOL)
        rhs = f.apply_boundary(transfer_across(f, x, xp, y, tol=TOL))
        assert abs(math.log(lhs.coord) - math.log(rhs.coord)) < 10 * TOL


def test_transfer_transitive_through_derived_pair():
    # the derived pair (y, y') defines the same transfer as (x, x')
    f = counterexample_model()
    x, xp = Y(0.8), X(1.25)
    y = Y(1.3)
    yp = transfer_across(f, x, xp, y, tol=TOL)
    for z in [0.6, 1.0, 1.9]:
        direct = transfer_across(f, x, xp, Y(z), tol=TOL)
        via = transfer_across(f, y, yp, Y(z), tol=TOL)
        assert abs(math.log(direct.coord) - math.log(via.coord)) < 10 * TOL


def test_transfer_exactness_collapse():
    # once both orbits pass the sector the terms freeze; gaps are rounding
    cfg = EightPointConfig()
    f = counterexample_model()
    res = transfer_across(f, Y(cfg.b), X(cfg.a), Y(cfg.delta * cfg.b),
                          tol=TOL, detailed=True)
    assert res.sequence.final_gap < 1e-13
    g_res = transfer_across(hyperbolic_model(), Y(0.7), X(1.3), Y(1.1),
                            tol=TOL, detailed=True)
    assert g_res.sequence.final_gap < 1e-13


def test_transfer_divergence_at_zero_tol():
    g = hyperbolic_model()
    with pytest.raises(LimitDivergenceError, match="limit divergence"):
        transfer_across(g, Y(0.7), X(1.3), Y(1.1), tol=0.0, k_max=40)


def test_tilted_transversal_same_limit():
    f = counterexample_model()
    plain = transfer_across(f, Y(0.9), X(1.2), Y(1.5), tol=TOL)
    tilted = transfer_across(f, Y(0.9), X(1.2), Y(1.5), tol=TOL,
                             transversal=Transversal(anchor=Y(0.9), tilt=0.37))
    assert abs(math.log(plain.coord) - math.log(tilted.coord)) < 10 * TOL


def test_transversal_geometry():
    t = Transversal(anchor=Y(0.8), tilt=0.5)
    p = t.point_at(0.2)
    assert p.x() == pytest.approx(0.2)
    assert p.y() == pytest.approx(0.8 * 1.1)
    v = Transversal(anchor=X(1.2)).point_at(0.3)
    assert v.x() == pytest.approx(1.2)
    assert v.y() == pytest.approx(0.3)
    with pytest.raises(ConfigError):
        t.point_at(-1.0)
    with pytest.raises(ConfigError):
        Transversal(anchor=Y(1.0), tilt=-2.0).point_at(0.9)


def test_transfer_within_identity_and_ratio():
    g = hyperbolic_model()
    same = transfer_within(g, Y(0.8), Y(0.8), Y(1.1), X(1.0), tol=TOL)
    assert same.coord == pytest.approx(1.1, abs=1e-8)
    moved = transfer_within(g, Y(0.8), Y(1.6), Y(1.1), X(1.0), tol=TOL)
    assert moved.coord == pytest.approx(1.1 * 1.6 / 0.8, abs=1e-8)


def test_transfer_within_anchor_independence_hyperbolic():
    # the base model transfers coherently: any pivot on the far axis
    # yields the same height, so the five grid anchors must agree
    g = hyperbolic_model()
    anchors = [X(float(v)) for v in default_boundary_grid(5)]
    outs = [transfer_within(g, Y(0.7), Y(1.2), Y(0.9), anchor, tol=TOL).coord
            for anchor in anchors]
    base = outs[0]
    for other in outs[1:]:
        assert abs(math.log(other) - math.log(base)) < 10 * TOL


def test_transfer_within_anchor_independence_counterexample_flat():
    # inputs whose crossing angles stay on the flat plateaus for every
    # grid anchor: the sheared model behaves like the base one there
    f = counterexample_model()
    anchors = [X(float(v)) for v in default_boundary_grid(5)]
    y1 = 2.0 ** 0.26
    outs = [transfer_within(f, Y(1.0), Y(2.0), Y(y1), anchor, tol=TOL).coord
            for anchor in anchors]
    base = outs[0]
    for other in outs[1:]:
        assert abs(math.log(other) - math.log(base)) < 10 * TOL


def test_transfer_within_anchor_split_counterexample():
    # anchor independence is the same coherence the eight-point check
    # quantifies, so the sheared model must break it once a crossing
    # angle lands in the bump: power-of-two anchors agree exactly (the
    # profile repeats per octave) while the half-octave anchor drifts
    f = counterexample_model()
    whole = [transfer_within(f, Y(0.7), Y(1.2), Y(0.9), X(a), tol=TOL).coord
             for a in (0.5, 1.0, 2.0)]
    for other in whole[1:]:
        assert abs(math.log(other) - math.log(whole[0])) < 10 * TOL
    split = transfer_within(f, Y(0.7), Y(1.2), Y(0.9), X(math.sqrt(2.0)),
                            tol=TOL).coord
    gap = abs(math.log(split) - math.log(whole[0]))
    assert 1e-3 < gap < 1e-1
    assert gap == pytest.approx(0.014733020488783943, rel=1e-6)


def test_check_four_point_passes_both_builtins():
    triples = four_point_triples(3)
    for f in (hyperbolic_model(), counterexample_model()):
        rep = check_four_point(f, triples, tol=TOL)
        assert rep.verdict == "pass"
        assert rep.max_residual < 1e-9
        assert len(rep.witnesses) == 27
        assert len(rep.k_depths) == 27


def test_check_four_point_degenerate_tolerance():
    rep = check_four_point(hyperbolic_model(), four_point_triples(2),
                           tol=0.0, k_max=40)
    assert rep.verdict == "fail"
    assert rep.max_residual is None
    assert all(r["status"] == "limit divergence" for r in rep.witnesses)


def test_check_four_point_report_shape():
    rep = check_four_point(hyperbolic_model(), four_point_triples(2), tol=TOL)
    data = rep.to_dict()
    assert data["check"] == "four_point"
    assert set(data) >= {"check", "verdict", "max_residual", "witnesses",
                         "k_depths"}


def test_check_eight_point_counterexample_fails_with_known_residual():
    rep = check_eight_point(counterexample_model(), EightPointConfig(),
                            tol=TOL)
    assert rep.verdict == "fail"
    assert rep.max_residual == pytest.approx(OBSTRUCTION, abs=1e-9)
    # the three derived relations hold: y2* reproduces the given y2
    assert rep.witnesses[0]["given_y2_residual"] < 1e-9


def test_check_eight_point_swapped_slots_also_fails():
    # with the slid b-pair moved into the first slot the bump lands in the
    # first derivation instead, scaling the residual by c/a
    cfg = EightPointConfig()
    tup = (Y(cfg.b), Y(cfg.delta * cfg.b), Y(cfg.d), Y(cfg.delta * cfg.d),
           X(cfg.a), X(cfg.c))
    rep = check_eight_point(counterexample_model(), tup, tol=TOL)
    assert rep.verdict == "fail"
    assert rep.max_residual == pytest.approx(OBSTRUCTION_SWAPPED, abs=1e-9)


def test_check_eight_point_hyperbolic_passes():
    cfg = EightPointConfig()
    rep = check_eight_point(hyperbolic_model(), eight_point_case(cfg),
                            tol=TOL)
    assert rep.verdict == "pass"
    assert rep.max_residual < 1e-9


def test_check_eight_point_degenerate_tuple():
    rep = check_eight_point(
        counterexample_model(),
        (Y(0.8), Y(1.1), Y(0.8), Y(1.1), X(1.3), X(1.3)), tol=TOL)
    assert rep.verdict == "pass"
    assert rep.max_residual < 1e-9


def test_limit_table_reproduces_all_rows():
    rep = counterexample_limit_table(tol=TOL)
    assert rep.verdict == "pass"
    assert rep.check == "section6"
    assert rep.max_residual < 1e-12
    rows = rep.witnesses
    assert [r["row"] for r in rows] == list(range(1, 9))
    cfg = EightPointConfig()
    assert rows[0]["computed"] == pytest.approx(cfg.c, abs=1e-9)
    assert rows[1]["computed"] == pytest.approx(C_OVER_DELTA, abs=1e-9)
    assert rows[2]["computed"] == pytest.approx(cfg.a, abs=1e-9)
    assert rows[3]["computed"] == pytest.approx(A_OVER_DELTA, abs=1e-9)
    for r in rows[:7]:
        assert abs(r["difference"]) < 1e-8
    assert rows[7]["difference"] == pytest.approx(OBSTRUCTION, abs=1e-9)


def test_limit_table_rejects_bad_params():
    with pytest.raises(ConfigError):
        counterexample_limit_table(config=EightPointConfig(b=0.9))


def test_limit_table_matches_transfer_machinery():
    # even rows are exactly the slid transfers of the odd rows' pairs
    cfg = EightPointConfig()
    f = counterexample_model()
    out = transfer_across(f, Y(cfg.d), X(cfg.c), Y(cfg.delta * cfg.d),
                          tol=TOL)
    rep = counterexample_limit_table(tol=TOL)
    assert out.coord == pytest.approx(rep.witnesses[1]["computed"], abs=1e-9)


def test_threshold_floor():
    assert threshold_for(1e-9) == pytest.approx(1e-8)
    assert threshold_for(1e-6) == pytest.approx(1e-5)
    assert threshold_for(1e-12) == 1e-8


def test_parallel_map_preserves_order(monkeypatch):
    items = list(range(20))
    monkeypatch.setenv("REEBFLOW_THREADS", "4")
    assert parallel_map(lambda v: v * v, items) == [v * v for v in items]
    monkeypatch.setenv("REEBFLOW_THREADS", "bogus")
    assert parallel_map(lambda v: v + 1, items) == [v + 1 for v in items]
